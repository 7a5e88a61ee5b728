use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{arg, Error, Result};
use crate::linalg::{c, CMat, I};
use crate::symbols::FourierMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LieAlgebra {
    U1,
    SU2,
}

impl LieAlgebra {
    /// Size of the defining representation.
    pub fn matrix_size(self) -> usize {
        match self {
            LieAlgebra::U1 => 1,
            LieAlgebra::SU2 => 2,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            LieAlgebra::U1 => 1,
            LieAlgebra::SU2 => 3,
        }
    }

    /// Basis orthonormal for `<A, B> = -2 tr(AB)`: `i` for `u(1)`,
    /// `X_a = i sigma_a / 2` for `su(2)`, with `[X_a, X_b] = -eps_abc X_c`.
    pub fn basis(self) -> Vec<CMat> {
        let z = c(0.0);
        match self {
            LieAlgebra::U1 => vec![CMat::from_element(1, 1, I * std::f64::consts::FRAC_1_SQRT_2)],
            LieAlgebra::SU2 => {
                let half = I * 0.5;
                vec![
                    CMat::from_row_slice(2, 2, &[z, c(1.0), c(1.0), z]) * half,
                    CMat::from_row_slice(2, 2, &[z, -I, I, z]) * half,
                    CMat::from_row_slice(2, 2, &[c(1.0), z, z, c(-1.0)]) * half,
                ]
            }
        }
    }
}

impl FromStr for LieAlgebra {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u1" => Ok(LieAlgebra::U1),
            "su2" => Ok(LieAlgebra::SU2),
            _ => arg(format!("unknown Lie algebra `{s}` (u1 | su2)")),
        }
    }
}

impl fmt::Display for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LieAlgebra::U1 => "u1",
            LieAlgebra::SU2 => "su2",
        })
    }
}

/// A `g`-valued loop as a matrix Fourier polynomial in the defining
/// representation.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopAlgebraElement {
    algebra: LieAlgebra,
    values: FourierMatrix,
}

impl LoopAlgebraElement {
    pub fn zero(algebra: LieAlgebra, cutoff: usize) -> Self {
        LoopAlgebraElement { algebra, values: FourierMatrix::zeros(algebra.matrix_size(), cutoff) }
    }

    /// Checks the pointwise reality condition `X(theta)^* = -X(theta)`, i.e.
    /// `X_{-k}^* = -X_k`, and tracelessness for `su(2)`.
    pub fn from_loop(algebra: LieAlgebra, values: FourierMatrix) -> Result<Self> {
        if values.rank() != algebra.matrix_size() {
            return arg(format!("{algebra} loops are {0}x{0} matrices", algebra.matrix_size()));
        }
        let scale = values.max_abs().max(1.0);
        let x = LoopAlgebraElement { algebra, values };
        if x.reality_residual() > 1e-12 * scale {
            return arg(format!("loop is not {algebra}-valued"));
        }
        Ok(x)
    }

    /// `X = sum_a x_a X_a` with real trigonometric coefficients `x_a` of
    /// degree `max_mode`, entries uniform in `(-amplitude, amplitude)`.
    pub fn random(algebra: LieAlgebra, cutoff: usize, max_mode: usize, amplitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = algebra.basis();
        let n = algebra.matrix_size();
        let mut values = FourierMatrix::zeros(n, cutoff);
        let kmax = max_mode.min(cutoff) as i64;
        for t in &basis {
            for k in 0..=kmax {
                let z = if k == 0 {
                    c(rng.random_range(-amplitude..amplitude))
                } else {
                    Complex64::new(rng.random_range(-amplitude..amplitude), rng.random_range(-amplitude..amplitude))
                };
                values.set_mode(k, &(values.mode(k) + t * z));
                if k != 0 {
                    values.set_mode(-k, &(values.mode(-k) + t * z.conj()));
                }
            }
        }
        LoopAlgebraElement { algebra, values }
    }

    pub fn algebra(&self) -> LieAlgebra {
        self.algebra
    }

    pub fn values(&self) -> &FourierMatrix {
        &self.values
    }

    pub fn cutoff(&self) -> usize {
        self.values.cutoff()
    }

    pub fn reality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in self.values.modes() {
            let a = self.values.mode(k);
            let b = self.values.mode(-k);
            worst = worst.max(crate::linalg::max_abs(&(b.adjoint() + &a)));
            if self.algebra == LieAlgebra::SU2 {
                worst = worst.max(a.trace().norm());
            }
        }
        worst
    }

    fn with(&self, values: FourierMatrix) -> Self {
        LoopAlgebraElement { algebra: self.algebra, values }
    }

    fn check(&self, o: &LoopAlgebraElement) -> Result<()> {
        if self.algebra != o.algebra || self.cutoff() != o.cutoff() {
            return arg("loop elements from different algebras or cutoffs");
        }
        Ok(())
    }

    pub fn add(&self, o: &LoopAlgebraElement) -> Result<Self> {
        self.check(o)?;
        Ok(self.with(&self.values + &o.values))
    }

    pub fn sub(&self, o: &LoopAlgebraElement) -> Result<Self> {
        self.check(o)?;
        Ok(self.with(&self.values - &o.values))
    }

    pub fn scale(&self, k: f64) -> Self {
        self.with(self.values.scale(c(k)))
    }

    /// Pointwise bracket and the energy of modes lost beyond the cutoff.
    pub fn bracket_with_loss(&self, o: &LoopAlgebraElement) -> Result<(Self, f64)> {
        self.check(o)?;
        let (ab, l1) = self.values.mul_truncated(&o.values);
        let (ba, l2) = o.values.mul_truncated(&self.values);
        Ok((self.with(&ab - &ba), l1 + l2))
    }

    pub fn bracket(&self, o: &LoopAlgebraElement) -> Result<Self> {
        self.bracket_with_loss(o).map(|(b, _)| b)
    }

    pub fn derivative(&self, order: u32) -> Self {
        self.with(self.values.derivative(order))
    }

    /// `(I + Delta)^s X`, exactly: mode `k` times `(1 + k^2)^s`.
    pub fn sobolev(&self, s: f64) -> Self {
        self.with(self.values.map_modes(|k| c((1.0 + (k * k) as f64).powf(s))))
    }

    /// `<X, Y>_s = (1/2 pi) int -2 tr(X (I + Delta)^s Y) d theta`.
    pub fn inner(&self, o: &LoopAlgebraElement, s: f64) -> Result<f64> {
        self.check(o)?;
        let ay = o.sobolev(s);
        let mut acc = c(0.0);
        for k in self.values.modes() {
            acc += (self.values.mode(k) * ay.values.mode(-k)).trace();
        }
        Ok(-2.0 * acc.re)
    }

    /// Coefficient loops `x_a` in the orthonormal basis, as scalar Fourier
    /// polynomials.
    pub fn coefficients(&self) -> Vec<FourierMatrix> {
        let basis = self.algebra.basis();
        basis
            .iter()
            .map(|t| {
                let mut f = FourierMatrix::zeros(1, self.cutoff());
                for k in self.values.modes() {
                    let v = (self.values.mode(k) * t).trace() * -2.0;
                    f.set_entry(k, 0, 0, v);
                }
                f
            })
            .collect()
    }

    /// The loop of matrices `ad_X` acting on coefficient vectors:
    /// `[X, Y]` has coefficients `ad_X y`. Zero for `u(1)`.
    pub fn ad_matrix(&self) -> FourierMatrix {
        let d = self.algebra.dim();
        let mut out = FourierMatrix::zeros(d, self.cutoff());
        if self.algebra == LieAlgebra::U1 {
            return out;
        }
        let x = self.coefficients();
        for k in self.values.modes() {
            for a in 0..3 {
                let xa = x[a].entry(k, 0, 0);
                if xa == c(0.0) {
                    continue;
                }
                for b in 0..3 {
                    for cc in 0..3 {
                        let e = levi_civita(a, b, cc);
                        if e != 0.0 {
                            let v = out.entry(k, cc, b) - xa * e;
                            out.set_entry(k, cc, b, v);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.max_abs()
    }
}

fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, max_abs};

    #[test]
    fn su2_structure_constants() {
        let x = LieAlgebra::SU2.basis();
        for a in 0..3 {
            for b in 0..3 {
                let want = (0..3).fold(CMat::zeros(2, 2), |acc, cc| acc - &x[cc] * c(levi_civita(a, b, cc)));
                assert!(max_abs(&(commutator(&x[a], &x[b]) - want)) < 1e-15);
                let g = (&x[a] * &x[b]).trace() * -2.0;
                assert!((g - c(if a == b { 1.0 } else { 0.0 })).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn random_loops_are_valued_in_the_algebra() {
        for alg in [LieAlgebra::U1, LieAlgebra::SU2] {
            let x = LoopAlgebraElement::random(alg, 8, 3, 1.0, 4);
            assert!(x.reality_residual() < 1e-15);
            for th in [0.0, 1.3, 4.0] {
                let v = x.values().eval(th);
                assert!(max_abs(&(v.adjoint() + &v)) < 1e-14);
            }
        }
        let bad = FourierMatrix::identity(2, 4);
        assert!(LoopAlgebraElement::from_loop(LieAlgebra::SU2, bad).is_err());
    }

    #[test]
    fn ad_matrix_reproduces_brackets() {
        let x = LoopAlgebraElement::random(LieAlgebra::SU2, 8, 2, 1.0, 1);
        let y = LoopAlgebraElement::random(LieAlgebra::SU2, 8, 2, 1.0, 2);
        let xy = x.bracket(&y).unwrap().coefficients();
        let ad = x.ad_matrix();
        let ycoef = y.coefficients();
        for th in [0.2, 2.5] {
            let m = ad.eval(th);
            for cc in 0..3 {
                let got: Complex64 = (0..3).map(|b| m[(cc, b)] * ycoef[b].eval(th)[(0, 0)]).sum();
                assert!((got - xy[cc].eval(th)[(0, 0)]).norm() < 1e-12);
            }
        }
    }
}
