use num_complex::Complex64;

use super::expansion::SymbolExpansion;
use crate::error::{arg, Result};

/// A trace value together with its reliability flags.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceValue {
    pub value: Complex64,
    /// The order the functional reads was below the truncation depth, so the
    /// value was reported as zero without being resolved.
    pub truncated: bool,
    pub truncation_loss: f64,
}

/// How the two cosphere directions enter the residue.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DirectionMode {
    #[default]
    Summed,
    Plus,
    Minus,
}

/// Wodzicki residue `(2 pi)^{-1} int_{S^1} tr(sigma_{-1}(x, +1) + sigma_{-1}(x, -1)) dx`.
///
/// Under this normalisation `(I + Delta)^{-1/2}` of rank one has residue 2
/// (the two cosphere points), not the cosphere volume `4 pi`.
pub fn wodzicki_residue(a: &SymbolExpansion) -> TraceValue {
    wodzicki_residue_directed(a, DirectionMode::Summed)
}

pub fn wodzicki_residue_directed(a: &SymbolExpansion, mode: DirectionMode) -> TraceValue {
    let zero = TraceValue { value: Complex64::new(0.0, 0.0), truncated: false, truncation_loss: a.truncation_loss() };
    if a.leading_order() < -1.0 - 1e-12 {
        return zero;
    }
    if a.lowest_order() > -1.0 + 1e-12 {
        return TraceValue { truncated: true, ..zero };
    }
    let Some(c) = a.component_at(-1.0) else {
        // orders off the integer lattice carry no residue density
        return zero;
    };
    let value = match mode {
        DirectionMode::Summed => c.plus.mean_trace() + c.minus.mean_trace(),
        DirectionMode::Plus => c.plus.mean_trace(),
        DirectionMode::Minus => c.minus.mean_trace(),
    };
    TraceValue { value, ..zero }
}

/// Scalar weights on the two cosphere directions, as Fourier modes in `x`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DirectionWeights {
    pub plus: Vec<(i64, Complex64)>,
    pub minus: Vec<(i64, Complex64)>,
}

/// Leading-order symbol trace
/// `(2 pi)^{-1} int_{S^1} tr(sigma_0(x, +1) + sigma_0(x, -1)) dx`, optionally
/// with direction weights.
pub fn leading_order_trace(a: &SymbolExpansion, weights: Option<&DirectionWeights>) -> Result<TraceValue> {
    if a.leading_order() > 1e-12 {
        return arg(format!("leading-order trace needs order <= 0, got {}", a.leading_order()));
    }
    let mut out = TraceValue { value: Complex64::new(0.0, 0.0), truncated: false, truncation_loss: a.truncation_loss() };
    let Some(c) = a.component_at(0.0) else {
        return Ok(out);
    };
    out.value = match weights {
        None => c.plus.mean_trace() + c.minus.mean_trace(),
        Some(w) => c.plus.weighted_mean_trace(&w.plus) + c.minus.weighted_mean_trace(&w.minus),
    };
    Ok(out)
}
