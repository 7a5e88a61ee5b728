use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{arg, Result};
use crate::ids::CatalogId;
use crate::linalg::{c, max_abs, permutations, trace, CMat, I};

fn check_skew(a: &CMat) -> Result<()> {
    if a.nrows() != a.ncols() {
        return arg("pfaffian of a non-square matrix");
    }
    if a.nrows() % 2 == 1 {
        return arg(format!("pfaffian needs even rank, got {}", a.nrows()));
    }
    let asym = max_abs(&(a + a.transpose()));
    if asym > 1e-12 * max_abs(a).max(1.0) {
        return arg(format!("pfaffian of a non-skew matrix (|A + A^T| = {asym:e})"));
    }
    Ok(())
}

/// Pfaffian by cofactor expansion along the first row.
pub fn pfaffian(a: &CMat) -> Result<Complex64> {
    check_skew(a)?;
    Ok(pf_rec(a))
}

fn pf_rec(a: &CMat) -> Complex64 {
    let n = a.nrows();
    if n == 0 {
        return c(1.0);
    }
    let mut acc = c(0.0);
    for j in 1..n {
        if a[(0, j)] == c(0.0) {
            continue;
        }
        let keep: Vec<usize> = (1..n).filter(|&i| i != j).collect();
        let minor = CMat::from_fn(n - 2, n - 2, |r, s| a[(keep[r], keep[s])]);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        acc += a[(0, j)] * pf_rec(&minor) * sign;
    }
    acc
}

/// Fully polarised Pfaffian
/// `P(A_1, .., A_m) = (2^m m!)^{-1} sum_sigma sgn(sigma) prod_l (A_l)_{sigma(2l-1) sigma(2l)}`,
/// with `P(A, .., A) = Pf(A)`.
pub fn polarized_pfaffian(blocks: &[&CMat]) -> Complex64 {
    let m = blocks.len();
    let n = 2 * m;
    let norm = (1..=m).fold(2f64.powi(m as i32), |acc, l| acc * l as f64);
    let mut acc = c(0.0);
    for (sign, p) in permutations(n) {
        let mut term = c(sign);
        for (l, b) in blocks.iter().enumerate() {
            term *= b[(p[2 * l], p[2 * l + 1])];
            if term == c(0.0) {
                break;
            }
        }
        acc += term;
    }
    acc / norm
}

/// Conjugation-invariant polynomial on `gl(r)` applied to curvature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PolynomialKind {
    /// `tr(A^k)`, a `2k`-form.
    TracePower(usize),
    /// `Pf(A)`, a form of degree equal to the (even) rank.
    Pfaffian,
    /// `A-hat` from `p1 = -tr(A^2)/8pi^2` and `p2 = ((tr A^2)^2 - 2 tr A^4)/128pi^4`,
    /// keeping parts of degree `<= max_degree`.
    AHat { max_degree: usize },
    /// `tr exp(i A / 2 pi)`, keeping parts of degree `<= max_degree`.
    ChernCharacter { max_degree: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantPolynomial {
    pub kind: PolynomialKind,
    /// Multiplies the raw polynomial.
    pub normalization: Complex64,
}

impl InvariantPolynomial {
    pub fn trace_power(k: usize) -> Self {
        InvariantPolynomial { kind: PolynomialKind::TracePower(k), normalization: c(1.0) }
    }

    pub fn pfaffian() -> Self {
        InvariantPolynomial { kind: PolynomialKind::Pfaffian, normalization: c(1.0) }
    }

    pub fn a_hat(max_degree: usize) -> Self {
        InvariantPolynomial { kind: PolynomialKind::AHat { max_degree }, normalization: c(1.0) }
    }

    pub fn chern_character(max_degree: usize) -> Self {
        InvariantPolynomial { kind: PolynomialKind::ChernCharacter { max_degree }, normalization: c(1.0) }
    }

    pub fn normalized(mut self, k: Complex64) -> Self {
        self.normalization = k;
        self
    }

    /// `tr(F^k)` with the Chern normalisation `(i / 2 pi)^k`.
    pub fn chern(k: usize) -> Self {
        InvariantPolynomial::trace_power(k).normalized((I / (2.0 * PI)).powu(k as u32))
    }

    /// `Pf` with the Euler normalisation `(2 pi)^{-m}` for rank `2m`.
    pub fn euler(rank: usize) -> Self {
        InvariantPolynomial::pfaffian().normalized(c((2.0 * PI).powi(-(rank as i32 / 2))))
    }

    /// Parses `trace-power?k=2`, `pfaffian`, `a-hat?max=4`, `ch?max=2`, each
    /// optionally with `norm=<re>` or `norm=chern`/`norm=euler`.
    pub fn parse(s: &str) -> Result<Self> {
        let id = CatalogId::parse(s)?;
        let base = match id.name.as_str() {
            "trace-power" => {
                id.only(&["k", "norm"])?;
                let k = id.get_or("k", 1usize)?;
                if k == 0 {
                    return Err(crate::Error::Validation("trace-power needs k >= 1".into()));
                }
                InvariantPolynomial::trace_power(k)
            }
            "pfaffian" => {
                id.only(&["norm"])?;
                InvariantPolynomial::pfaffian()
            }
            "a-hat" => {
                id.only(&["max", "norm"])?;
                InvariantPolynomial::a_hat(id.get_or("max", 4usize)?)
            }
            "ch" => {
                id.only(&["max", "norm"])?;
                InvariantPolynomial::chern_character(id.get_or("max", 2usize)?)
            }
            other => return arg(format!("unknown invariant polynomial `{other}`")),
        };
        match id.get("norm") {
            None => Ok(base),
            Some("chern") => match base.kind {
                PolynomialKind::TracePower(k) => Ok(InvariantPolynomial::chern(k)),
                _ => arg("norm=chern applies to trace-power only"),
            },
            Some(v) => {
                let x: f64 = v.parse().map_err(|_| crate::Error::Validation(format!("bad normalization `{v}`")))?;
                Ok(base.normalized(c(x)))
            }
        }
    }

    /// Value on a single matrix (curvature at a point contracted on one plane,
    /// or any test matrix), normalisation included.
    pub fn eval(&self, a: &CMat) -> Result<Complex64> {
        let raw = match self.kind {
            PolynomialKind::TracePower(k) => trace(&matrix_power(a, k)),
            PolynomialKind::Pfaffian => pfaffian(a)?,
            PolynomialKind::AHat { max_degree } => {
                let t2 = trace(&(a * a));
                let t4 = trace(&matrix_power(a, 4));
                let p1 = -t2 / (8.0 * PI * PI);
                let p2 = (t2 * t2 - t4 * 2.0) / (128.0 * PI.powi(4));
                let mut v = c(1.0);
                if max_degree >= 4 {
                    v -= p1 / 24.0;
                }
                if max_degree >= 8 {
                    v += (p1 * p1 * 7.0 - p2 * 4.0) / 5760.0;
                }
                v
            }
            PolynomialKind::ChernCharacter { max_degree } => {
                let x = a * (I / (2.0 * PI));
                let mut term = CMat::identity(a.nrows(), a.ncols());
                let mut v = trace(&term);
                for j in 1..=max_degree / 2 {
                    term = &term * &x / c(j as f64);
                    v += trace(&term);
                }
                v
            }
        };
        Ok(raw * self.normalization)
    }
}

impl fmt::Display for InvariantPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PolynomialKind::TracePower(k) => write!(f, "trace-power?k={k}")?,
            PolynomialKind::Pfaffian => write!(f, "pfaffian")?,
            PolynomialKind::AHat { max_degree } => write!(f, "a-hat?max={max_degree}")?,
            PolynomialKind::ChernCharacter { max_degree } => write!(f, "ch?max={max_degree}")?,
        }
        if self.normalization != c(1.0) {
            write!(f, " (x {})", self.normalization)?;
        }
        Ok(())
    }
}

pub(crate) fn matrix_power(a: &CMat, k: usize) -> CMat {
    (0..k).fold(CMat::identity(a.nrows(), a.ncols()), |acc, _| acc * a)
}
