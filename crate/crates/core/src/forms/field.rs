use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{arg, Result};
use crate::jet::Jet;
use crate::linalg::{c, mask, shuffles, CMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Scalar,
    /// `r x r` complex matrices.
    Matrix(usize),
}

impl ValueKind {
    pub fn size(self) -> usize {
        match self {
            ValueKind::Scalar => 1,
            ValueKind::Matrix(r) => r,
        }
    }
}

/// `(chart, point, tangent vectors) -> value`. Scalars are `1 x 1` matrices.
pub type FormEval = dyn Fn(usize, &[f64], &[DVector<f64>]) -> CMat + Send + Sync;

/// A degree-`p` alternating multilinear field on a `dim`-dimensional charted
/// manifold.
#[derive(Clone)]
pub struct FormField {
    dim: usize,
    degree: usize,
    kind: ValueKind,
    eval: Arc<FormEval>,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormField")
            .field("dim", &self.dim)
            .field("degree", &self.degree)
            .field("kind", &self.kind)
            .finish()
    }
}

impl FormField {
    /// Wraps an evaluation closure. The closure must be alternating and
    /// multilinear in its vector arguments; the constructors in this crate
    /// guarantee that.
    pub fn new(
        dim: usize,
        degree: usize,
        kind: ValueKind,
        eval: impl Fn(usize, &[f64], &[DVector<f64>]) -> CMat + Send + Sync + 'static,
    ) -> Self {
        FormField { dim, degree, kind, eval: Arc::new(eval) }
    }

    pub fn zero(dim: usize, degree: usize, kind: ValueKind) -> Self {
        let r = kind.size();
        FormField::new(dim, degree, kind, move |_, _, _| CMat::zeros(r, r))
    }

    /// The coordinate 1-form `dx^i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        FormField::new(dim, 1, ValueKind::Scalar, move |_, _, v| CMat::from_element(1, 1, c(v[0][i])))
    }

    /// A scalar function as a 0-form.
    pub fn function(dim: usize, f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        FormField::new(dim, 0, ValueKind::Scalar, move |_, x, _| CMat::from_element(1, 1, f(x)))
    }

    /// A scalar 1-form `sum_i a_i(x) dx^i`.
    pub fn one_form(dim: usize, coeffs: impl Fn(&[f64]) -> Vec<Complex64> + Send + Sync + 'static) -> Self {
        FormField::new(dim, 1, ValueKind::Scalar, move |_, x, v| {
            let a = coeffs(x);
            CMat::from_element(1, 1, a.iter().zip(v[0].iter()).map(|(ai, vi)| ai * vi).sum())
        })
    }

    /// The coordinate volume form `dx^1 ^ ... ^ dx^d` times `density`.
    pub fn top_form(dim: usize, density: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        FormField::new(dim, dim, ValueKind::Scalar, move |_, x, v| {
            let m = DMatrix::from_fn(dim, dim, |i, j| v[j][i]);
            CMat::from_element(1, 1, density(x) * m.determinant())
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn eval(&self, chart: usize, x: &[f64], vectors: &[DVector<f64>]) -> Result<CMat> {
        if x.len() != self.dim {
            return arg(format!("point has {} coordinates, form lives in dimension {}", x.len(), self.dim));
        }
        if vectors.len() != self.degree {
            return arg(format!("{}-form evaluated on {} vectors", self.degree, vectors.len()));
        }
        if vectors.iter().any(|v| v.len() != self.dim) {
            return arg("tangent vector of wrong length");
        }
        Ok((self.eval)(chart, x, vectors))
    }

    pub(crate) fn eval_unchecked(&self, chart: usize, x: &[f64], vectors: &[DVector<f64>]) -> CMat {
        (self.eval)(chart, x, vectors)
    }

    pub fn eval_scalar(&self, chart: usize, x: &[f64], vectors: &[DVector<f64>]) -> Result<Complex64> {
        if self.kind != ValueKind::Scalar {
            return arg("scalar evaluation of a matrix-valued form");
        }
        Ok(self.eval(chart, x, vectors)?[(0, 0)])
    }

    /// Value on coordinate basis vectors `e_{idx[0]}, ..., e_{idx[p-1]}`.
    pub fn component(&self, chart: usize, x: &[f64], idx: &[usize]) -> Result<CMat> {
        let vs: Vec<DVector<f64>> = idx.iter().map(|&i| basis(self.dim, i)).collect();
        self.eval(chart, x, &vs)
    }

    pub fn scale(&self, k: Complex64) -> FormField {
        let inner = self.eval.clone();
        FormField::new(self.dim, self.degree, self.kind, move |ch, x, v| inner(ch, x, v) * k)
    }

    pub fn add(&self, other: &FormField) -> Result<FormField> {
        if (self.dim, self.degree, self.kind) != (other.dim, other.degree, other.kind) {
            return arg("adding forms of different shape");
        }
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Ok(FormField::new(self.dim, self.degree, self.kind, move |ch, x, v| a(ch, x, v) + b(ch, x, v)))
    }

    pub fn sub(&self, other: &FormField) -> Result<FormField> {
        self.add(&other.scale(c(-1.0)))
    }

    /// Matrix trace of a matrix-valued form.
    pub fn trace(&self) -> FormField {
        let inner = self.eval.clone();
        FormField::new(self.dim, self.degree, ValueKind::Scalar, move |ch, x, v| {
            CMat::from_element(1, 1, inner(ch, x, v).trace())
        })
    }

    /// Pullback along `map`, given on jets so that its Jacobian is exact.
    /// The result lives in dimension `source_dim` and is evaluated in the
    /// target's chart `target_chart`.
    pub fn pullback(
        &self,
        source_dim: usize,
        target_chart: usize,
        map: Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync>,
    ) -> FormField {
        let inner = self.eval.clone();
        let target_dim = self.dim;
        FormField::new(source_dim, self.degree, self.kind, move |_, y, v| {
            let img = map(&Jet::seed(y));
            let x: Vec<f64> = img.iter().map(Jet::value).collect();
            let jac = DMatrix::from_fn(target_dim, source_dim, |a, i| img[a].grad(i));
            let pushed: Vec<DVector<f64>> = v.iter().map(|vi| &jac * vi).collect();
            inner(target_chart, &x, &pushed)
        })
    }
}

pub fn basis(dim: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

pub fn coordinate_frame(dim: usize) -> Vec<DVector<f64>> {
    (0..dim).map(|i| basis(dim, i)).collect()
}

fn multiply(a: &CMat, b: &CMat) -> CMat {
    match (a.nrows(), b.nrows()) {
        (1, _) => b * a[(0, 0)],
        (_, 1) => a * b[(0, 0)],
        _ => a * b,
    }
}

/// `a ^ b`. Matrix values multiply in shuffle order with no trace taken.
/// A degree sum above the dimension gives the zero form.
pub fn wedge(a: &FormField, b: &FormField) -> Result<FormField> {
    if a.dim != b.dim {
        return arg(format!("wedge of forms on dimensions {} and {}", a.dim, b.dim));
    }
    let kind = match (a.kind, b.kind) {
        (ValueKind::Scalar, k) | (k, ValueKind::Scalar) => k,
        (ValueKind::Matrix(r), ValueKind::Matrix(s)) if r == s => ValueKind::Matrix(r),
        _ => return arg("wedge of matrix forms of different rank"),
    };
    let (p, q) = (a.degree, b.degree);
    if p + q > a.dim {
        return Ok(FormField::zero(a.dim, p + q, kind));
    }
    let terms = shuffles(&[p, q]);
    let (fa, fb) = (a.eval.clone(), b.eval.clone());
    let r = kind.size();
    Ok(FormField::new(a.dim, p + q, kind, move |ch, x, v| {
        let mut memo_a: Vec<Option<CMat>> = vec![None; 1 << v.len()];
        let mut memo_b: Vec<Option<CMat>> = vec![None; 1 << v.len()];
        let mut acc = CMat::zeros(r, r);
        for t in &terms {
            let (ia, ib) = (&t.blocks[0], &t.blocks[1]);
            let va = memo_a[mask(ia)]
                .get_or_insert_with(|| fa(ch, x, &ia.iter().map(|&i| v[i].clone()).collect::<Vec<_>>()))
                .clone();
            let vb = memo_b[mask(ib)]
                .get_or_insert_with(|| fb(ch, x, &ib.iter().map(|&i| v[i].clone()).collect::<Vec<_>>()));
            acc += multiply(&va, vb) * c(t.sign);
        }
        acc
    }))
}

/// Largest antisymmetry violation `|w(..u..v..) + w(..v..u..)|` over all slot
/// pairs, at the given point and vectors.
pub fn antisymmetry_residual(w: &FormField, chart: usize, x: &[f64], v: &[DVector<f64>]) -> Result<f64> {
    let a = w.eval(chart, x, v)?;
    let mut worst = 0.0f64;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let mut sw = v.to_vec();
            sw.swap(i, j);
            let b = w.eval(chart, x, &sw)?;
            worst = worst.max(crate::linalg::max_abs(&(&a + b)));
        }
    }
    Ok(worst)
}

/// Multilinearity violation in slot 0: `|w(a u + b u', ...) - a w(u,...) - b w(u',...)|`.
pub fn linearity_residual(
    w: &FormField,
    chart: usize,
    x: &[f64],
    v: &[DVector<f64>],
    other: &DVector<f64>,
    a: f64,
    b: f64,
) -> Result<f64> {
    if v.is_empty() {
        return Ok(0.0);
    }
    let mut comb = v.to_vec();
    comb[0] = &v[0] * a + other * b;
    let mut alt = v.to_vec();
    alt[0] = other.clone();
    let lhs = w.eval(chart, x, &comb)?;
    let rhs = w.eval(chart, x, v)? * c(a) + w.eval(chart, x, &alt)? * c(b);
    Ok(crate::linalg::max_abs(&(lhs - rhs)))
}
