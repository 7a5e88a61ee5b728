//! Truncated classical symbols on the circle.
//!
//! A symbol is stored by its homogeneous terms evaluated at the two cosphere
//! directions `xi = +-1`; the `x`-dependence is a matrix Fourier polynomial
//! with a fixed cutoff. Products beyond the cutoff are dropped and their
//! energy accumulates in [`SymbolExpansion::truncation_loss`].

mod expansion;
mod fourier;
mod power;
mod table;
mod traces;

pub use expansion::{HomogeneousSymbol, SymbolExpansion, DEFAULT_CUTOFF, DEFAULT_DEPTH};
pub use fourier::FourierMatrix;
pub use power::{binomial, power_symbol};
pub use table::{from_table, to_table};
pub use traces::{
    leading_order_trace, wodzicki_residue, wodzicki_residue_directed, DirectionMode, DirectionWeights, TraceValue,
};
