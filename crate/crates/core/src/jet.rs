//! Second-order forward-mode jets.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to up to [`MAX_VARS`] independent variables. Arithmetic is the
//! truncated Taylor arithmetic of order two, so every derivative produced is
//! exact up to rounding; nothing here uses finite differences.
//!
//! Catalog metrics, connections and group charts are written once, generic
//! over [`Scalar`], and evaluated either on plain `f64` or on jets.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Num, NumAssign, One, Zero};

/// Largest number of independent variables a jet can track.
pub const MAX_VARS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    /// Number of active variables. Constants have `n = 0`.
    n: usize,
    v: f64,
    d: [f64; MAX_VARS],
    h: [[f64; MAX_VARS]; MAX_VARS],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet { n: 0, v, d: [0.0; MAX_VARS], h: [[0.0; MAX_VARS]; MAX_VARS] }
    }

    /// The `index`-th of `n` independent variables, evaluated at `v`.
    pub fn variable(v: f64, index: usize, n: usize) -> Self {
        assert!(n <= MAX_VARS && index < n, "jet variable {index} of {n} out of range");
        let mut j = Jet { n, ..Jet::constant(v) };
        j.d[index] = 1.0;
        j
    }

    /// Seeds a full point: `x[i]` becomes variable `i`.
    pub fn seed(x: &[f64]) -> Vec<Jet> {
        let n = x.len();
        x.iter().enumerate().map(|(i, &v)| Jet::variable(v, i, n)).collect()
    }

    pub fn value(&self) -> f64 {
        self.v
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.d[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.h[i][j]
    }

    fn chain(self, f: f64, df: f64, ddf: f64) -> Jet {
        let n = self.n;
        let mut out = Jet { n, ..Jet::constant(f) };
        for i in 0..n {
            out.d[i] = df * self.d[i];
            for j in 0..n {
                out.h[i][j] = df * self.h[i][j] + ddf * self.d[i] * self.d[j];
            }
        }
        out
    }

    /// First-order jet of the partial derivative `d_i`: value `d_i f`,
    /// gradient `d_j d_i f`. Its Hessian is unknown and left at zero.
    pub fn partial(&self, i: usize) -> Jet {
        let mut out = Jet { n: self.n, ..Jet::constant(self.d[i]) };
        out.d[..self.n].copy_from_slice(&self.h[i][..self.n]);
        out
    }

    pub fn recip(self) -> Jet {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        let n = self.n.max(o.n);
        self.n = n;
        self.v += o.v;
        for i in 0..n {
            self.d[i] += o.d[i];
            for j in 0..n {
                self.h[i][j] += o.h[i][j];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.v = -self.v;
        for i in 0..self.n {
            self.d[i] = -self.d[i];
            for j in 0..self.n {
                self.h[i][j] = -self.h[i][j];
            }
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let n = self.n.max(o.n);
        let mut out = Jet { n, ..Jet::constant(self.v * o.v) };
        for i in 0..n {
            out.d[i] = self.v * o.d[i] + o.v * self.d[i];
            for j in 0..n {
                out.h[i][j] = self.v * o.h[i][j]
                    + o.v * self.h[i][j]
                    + self.d[i] * o.d[j]
                    + o.d[i] * self.d[j];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

// Only needed to satisfy `Num`; derivatives pass through unchanged.
impl Rem for Jet {
    type Output = Jet;
    fn rem(mut self, o: Jet) -> Jet {
        self.v %= o.v;
        self
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Jet {
            fn $m(&mut self, o: Jet) {
                *self = *self $op o;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);
assign_op!(RemAssign, rem_assign, %);

impl Zero for Jet {
    fn zero() -> Self {
        Jet::constant(0.0)
    }
    fn is_zero(&self) -> bool {
        self.v == 0.0
            && self.d[..self.n].iter().all(|&x| x == 0.0)
            && self.h[..self.n].iter().all(|r| r[..self.n].iter().all(|&x| x == 0.0))
    }
}

impl One for Jet {
    fn one() -> Self {
        Jet::constant(1.0)
    }
}

impl Num for Jet {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Jet::constant)
    }
}

/// Real scalars the catalog formulas are generic over.
pub trait Scalar:
    Copy + Debug + Num + NumAssign + Neg<Output = Self> + Send + Sync + 'static
{
    fn cst(c: f64) -> Self;
    fn val(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;

    fn powi(self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc * self)
    }
}

impl Scalar for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn val(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
}

impl Scalar for Jet {
    fn cst(c: f64) -> Self {
        Jet::constant(c)
    }
    fn val(&self) -> f64 {
        self.v
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.v))
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn product_rule_second_order() {
        let x = Jet::seed(&[0.7, -1.3]);
        // f = x^2 y + sin(x y)
        let f = x[0] * x[0] * x[1] + (x[0] * x[1]).sin();
        let (a, b) = (0.7_f64, -1.3_f64);
        let c = (a * b).cos();
        let s = (a * b).sin();
        assert!(close(f.value(), a * a * b + s));
        assert!(close(f.grad(0), 2.0 * a * b + b * c));
        assert!(close(f.grad(1), a * a + a * c));
        assert!(close(f.hess(0, 0), 2.0 * b - b * b * s));
        assert!(close(f.hess(1, 1), -a * a * s));
        assert!(close(f.hess(0, 1), 2.0 * a + c - a * b * s));
        assert!(close(f.hess(1, 0), f.hess(0, 1)));
    }

    #[test]
    fn quotient_and_sqrt() {
        let x = Jet::seed(&[2.0]);
        let f = x[0].sqrt() / (x[0] + Jet::cst(1.0));
        // f = sqrt(x)/(x+1)
        let h = 1e-4;
        let g = |t: f64| t.sqrt() / (t + 1.0);
        let fd1 = (g(2.0 + h) - g(2.0 - h)) / (2.0 * h);
        let fd2 = (g(2.0 + h) - 2.0 * g(2.0) + g(2.0 - h)) / (h * h);
        assert!((f.grad(0) - fd1).abs() < 1e-8);
        assert!((f.hess(0, 0) - fd2).abs() < 1e-5);
    }

    #[test]
    fn constants_mix_with_variables() {
        let x = Jet::variable(3.0, 1, 3);
        let y = Jet::cst(2.0) * x + Jet::cst(1.0);
        assert_eq!(y.nvars(), 3);
        assert_eq!(y.value(), 7.0);
        assert_eq!(y.grad(1), 2.0);
        assert_eq!(y.grad(0), 0.0);
        assert!(Jet::zero().is_zero());
    }
}
