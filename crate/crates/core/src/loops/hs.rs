//! The `H^s` Levi-Civita connection on a loop group as a family of
//! pseudodifferential operators, and the map from loops into symbols.
//!
//! With `A = (I + Delta)^s` self-adjoint and an ad-invariant pairing, the
//! Koszul formula for left-invariant fields gives
//!
//! `2 nabla_X Y = [X, Y] - A^{-1}[A X, Y] + A^{-1}[X, A Y]`.
//!
//! As an operator on `Y` this is
//! `(1/2)(ad_X - A^{-1} ad_{AX} + A^{-1} ad_X A)`, of order zero.

use super::algebra::LoopAlgebraElement;
use crate::error::{arg, Result};
use crate::linalg::{c, I};
use crate::symbols::{power_symbol, FourierMatrix, HomogeneousSymbol, SymbolExpansion};

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.5 && s.is_finite()) {
        return arg(format!("Sobolev parameter must exceed 1/2, got {s}"));
    }
    Ok(())
}

/// `nabla^s_X Y` computed exactly on Fourier modes.
pub fn covariant_derivative(x: &LoopAlgebraElement, y: &LoopAlgebraElement, s: f64) -> Result<LoopAlgebraElement> {
    check_s(s)?;
    let t1 = x.bracket(y)?;
    let t2 = x.sobolev(s).bracket(y)?.sobolev(-s);
    let t3 = x.bracket(&y.sobolev(s))?.sobolev(-s);
    Ok(t1.sub(&t2)?.add(&t3)?.scale(0.5))
}

/// The three summands of `2 nabla^s_X` as symbols on coefficient loops:
/// `ad_X`, `-A^{-1} ad_{AX}` and `A^{-1} ad_X A`.
pub fn hs_connection_terms(x: &LoopAlgebraElement, s: f64, depth: usize) -> Result<[SymbolExpansion; 3]> {
    check_s(s)?;
    let ad = x.ad_matrix();
    let (r, n) = (ad.rank(), ad.cutoff());
    let ad_x = SymbolExpansion::multiplication(ad, depth);
    let ad_ax = SymbolExpansion::multiplication(x.sobolev(s).ad_matrix(), depth);
    let inv = power_symbol(-s, r, n, depth);
    let fwd = power_symbol(s, r, n, depth);
    let middle = inv.compose(&ad_ax)?.scale(c(-1.0));
    let last = inv.compose(&ad_x)?.compose(&fwd)?;
    Ok([ad_x, middle, last])
}

/// Symbol of `Y -> nabla^s_X Y`.
pub fn hs_connection_operator(x: &LoopAlgebraElement, s: f64, depth: usize) -> Result<SymbolExpansion> {
    let [a, b, cc] = hs_connection_terms(x, s, depth)?;
    Ok(a.checked_add(&b)?.checked_add(&cc)?.scale(c(0.5)))
}

/// `Omega^s(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_{[X,Y]}`.
pub fn hs_curvature(x: &LoopAlgebraElement, y: &LoopAlgebraElement, s: f64, depth: usize) -> Result<SymbolExpansion> {
    let nx = hs_connection_operator(x, s, depth)?;
    let ny = hs_connection_operator(y, s, depth)?;
    let (xy, loss) = x.bracket_with_loss(y)?;
    let nxy = hs_connection_operator(&xy, s, depth)?;
    let out = nx.compose(&ny)?.checked_sub(&ny.compose(&nx)?)?.checked_sub(&nxy)?;
    let total = out.truncation_loss() + loss;
    Ok(out.with_truncation_loss(total))
}

/// How many derivatives the `l`-th term of the alpha map carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaVariant {
    /// `d^l X`: the symbol of `D^{-1} X D`, `D = -i d/dtheta`.
    Iterated,
    /// `d X` for every `l >= 1`.
    Single,
}

/// `alpha(X) = sum_{l <= depth} i^l (d^l X) xi^{-l}` in the defining
/// representation; `xi^{-l}` is `(-1)^l |xi|^{-l}` on the negative direction.
pub fn alpha_map(x: &LoopAlgebraElement, depth: usize) -> SymbolExpansion {
    alpha_map_variant(x, depth, AlphaVariant::Iterated)
}

pub fn alpha_map_variant(x: &LoopAlgebraElement, depth: usize, variant: AlphaVariant) -> SymbolExpansion {
    let comps = (0..=depth)
        .map(|l| {
            let order = match variant {
                AlphaVariant::Iterated => l as u32,
                AlphaVariant::Single => (l as u32).min(1),
            };
            let coeff: FourierMatrix = x.values().derivative(order).scale(I.powu(l as u32));
            let sign = if l % 2 == 0 { c(1.0) } else { c(-1.0) };
            HomogeneousSymbol { order: -(l as f64), plus: coeff.clone(), minus: coeff.scale(sign) }
        })
        .collect();
    SymbolExpansion::new(0.0, comps).expect("alpha components share rank and cutoff")
}

/// Componentwise max-norm of `[alpha(X), alpha(Y)] - alpha([X, Y])`.
pub fn alpha_homomorphism_residual(
    x: &LoopAlgebraElement,
    y: &LoopAlgebraElement,
    depth: usize,
    variant: AlphaVariant,
) -> Result<f64> {
    let ax = alpha_map_variant(x, depth, variant);
    let ay = alpha_map_variant(y, depth, variant);
    let lhs = ax.commutator(&ay)?;
    let rhs = alpha_map_variant(&x.bracket(y)?, depth, variant);
    lhs.distance(&rhs)
}
