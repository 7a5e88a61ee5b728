//! Chern–Weil forms, transgressions, Maurer–Cartan generators and fiber
//! integration over product fibrations.
//!
//! Forms are stored raw: `tr(F^k)` carries no `(i/2 pi)^k`. Normalisations
//! live on [`InvariantPolynomial`] and are applied where a number is reported.

mod algebra;
mod chern_weil;
mod connection;
mod fiber;
mod maurer_cartan;
mod polynomial;
mod transgression;

pub use algebra::{Algebra, TraceKind};
pub use chern_weil::{char_form, char_form_series, leading_order_char_form, trace_power_form};
pub use connection::{
    connection_form, curvature_at, curvature_form, monopole_chern_number, monopole_curvature, unitary_basis,
    ConnectionField, CurvatureValues, JetConnection, JetMatrix, JetPotentialFn, LeviCivita, MultiplicationLift,
    Potential, PulledBack,
};
pub use fiber::{bismut_vertical_char_form, fiber_integration, ProductFibration};
pub use maurer_cartan::{
    left_translate_tangent, maurer_cartan_form, mc_generator_form, su2_generator_integral_reference, CompactGroup,
    MaurerCartanConnection,
};
pub use polynomial::{pfaffian, polarized_pfaffian, InvariantPolynomial, PolynomialKind};
pub use transgression::{relative_cs_form, CS_T_NODES};
