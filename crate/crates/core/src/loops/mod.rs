//! Loop-group geometry in the `H^s` metrics and Wodzicki–Chern–Simons
//! integrals over orbit cycles of circle actions.

mod action;
mod algebra;
mod hs;
mod wcs;

pub use action::{squashed_atlas, ActionFn, ActionKind, CircleAction, SquashedMetricFamily};
pub use algebra::{LieAlgebra, LoopAlgebraElement};
pub use hs::{
    alpha_homomorphism_residual, alpha_map, alpha_map_variant, covariant_derivative, hs_connection_operator,
    hs_connection_terms, hs_curvature, AlphaVariant,
};
pub use wcs::{
    sample_orbit, wcs_form_at_loop, wcs_integral, ConvergenceRow, LoopField, SampledLoop, WcsIntegral, WcsOptions,
    DEFAULT_LOOP_NODES,
};
