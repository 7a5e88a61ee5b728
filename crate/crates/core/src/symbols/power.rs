use super::expansion::{HomogeneousSymbol, SymbolExpansion};
use super::fourier::FourierMatrix;
use crate::linalg::c;

/// Generalised binomial coefficient `binom(s, j)`.
pub fn binomial(s: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (s - i as f64) / (i as f64 + 1.0))
}

/// Symbol of `(I + Delta)^s` on the trivial rank-`r` bundle over the circle,
/// expanded as `(1 + xi^2)^s = sum_j binom(s, j) |xi|^{2s - 2j}`. The
/// ladder has unit steps; odd steps are kept as zero components.
pub fn power_symbol(s: f64, rank: usize, cutoff: usize, depth: usize) -> SymbolExpansion {
    let comps = (0..=depth)
        .map(|i| {
            let order = 2.0 * s - i as f64;
            if i % 2 == 0 {
                let coeff = FourierMatrix::identity(rank, cutoff).scale(c(binomial(s, i / 2)));
                HomogeneousSymbol::even(order, coeff)
            } else {
                HomogeneousSymbol::zero(order, rank, cutoff)
            }
        })
        .collect();
    SymbolExpansion::new(2.0 * s, comps).expect("power symbol components are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeff(e: &SymbolExpansion, order: f64) -> f64 {
        e.component_at(order).unwrap().plus.entry(0, 0, 0).re
    }

    #[test]
    fn square_root_coefficients() {
        let p = power_symbol(0.5, 1, 4, 6);
        assert_eq!(coeff(&p, 1.0), 1.0);
        assert_eq!(coeff(&p, -1.0), 0.5);
        assert_eq!(coeff(&p, -3.0), -0.125);
        assert_eq!(coeff(&p, 0.0), 0.0);
    }

    #[test]
    fn integer_power_is_polynomial() {
        let p = power_symbol(1.0, 2, 4, 6);
        assert_eq!(coeff(&p, 2.0), 1.0);
        assert_eq!(coeff(&p, 0.0), 1.0);
        for o in [1.0, -1.0, -2.0, -3.0, -4.0] {
            assert!(p.component_at(o).unwrap().is_zero());
        }
    }

    #[test]
    fn inverse_is_geometric() {
        let p = power_symbol(-1.0, 1, 4, 8);
        for j in 0..4 {
            let want = if j % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(coeff(&p, -2.0 - 2.0 * j as f64), want);
        }
    }
}
