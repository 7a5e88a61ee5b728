use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::algebra::Algebra;
use crate::error::{arg, Error, Result};
use crate::forms::{FormField, ValueKind};
use crate::geometry::{christoffel_derivatives, ChartAtlas, MetricField};
use crate::jet::{Jet, Scalar};
use crate::linalg::{c, CMat, I};
use crate::symbols::SymbolExpansion;

/// Local connection 1-form and its first derivatives at a point:
/// `omega[i] = omega(d_i)`, `d_omega[j][i] = d_j omega(d_i)`.
#[derive(Clone, Debug)]
pub struct Potential<A> {
    pub omega: Vec<A>,
    pub d_omega: Vec<Vec<A>>,
}

/// A connection on a rank-`r` bundle over a charted manifold, trivialised
/// over each chart.
pub trait ConnectionField<A: Algebra = CMat>: Send + Sync {
    fn id(&self) -> String;
    fn atlas(&self) -> &ChartAtlas;
    fn rank(&self) -> usize;
    fn potential(&self, chart: usize, x: &[f64]) -> Result<Potential<A>>;
    /// Columns of a frame that is orthonormal for the bundle metric, when the
    /// natural trivialisation is not (tangent bundles in coordinate frames).
    fn orthonormal_frame(&self, _chart: usize, _x: &[f64]) -> Result<Option<CMat>> {
        Ok(None)
    }
    fn dim(&self) -> usize {
        self.atlas().dim()
    }
}

/// `F(d_i, d_j)` at one point.
#[derive(Clone, Debug)]
pub struct CurvatureValues<A> {
    dim: usize,
    f: Vec<A>,
}

impl<A: Algebra> CurvatureValues<A> {
    /// `F_ij = d_i omega_j - d_j omega_i + [omega_i, omega_j]`.
    pub fn from_potential(p: &Potential<A>) -> Self {
        let d = p.omega.len();
        let zero = p.omega[0].zero_like();
        let mut f = vec![zero.clone(); d * d];
        let m1 = Complex64::new(-1.0, 0.0);
        for i in 0..d {
            for j in i + 1..d {
                let v = p.d_omega[i][j]
                    .plus(&p.d_omega[j][i].scaled(m1))
                    .plus(&p.omega[i].times(&p.omega[j]))
                    .plus(&p.omega[j].times(&p.omega[i]).scaled(m1));
                f[j * d + i] = v.scaled(m1);
                f[i * d + j] = v;
            }
        }
        CurvatureValues { dim: d, f }
    }

    pub(crate) fn from_components(dim: usize, f: Vec<A>) -> Self {
        CurvatureValues { dim, f }
    }

    pub fn component(&self, i: usize, j: usize) -> &A {
        &self.f[i * self.dim + j]
    }

    /// `F(u, v)`.
    pub fn on(&self, u: &DVector<f64>, v: &DVector<f64>) -> A {
        let mut acc = self.f[0].zero_like();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let w = u[i] * v[j] - u[j] * v[i];
                if w != 0.0 {
                    acc = acc.plus(&self.f[i * self.dim + j].scaled(c(w)));
                }
            }
        }
        acc
    }
}

pub fn curvature_at<A: Algebra>(conn: &dyn ConnectionField<A>, chart: usize, x: &[f64]) -> Result<CurvatureValues<A>> {
    Ok(CurvatureValues::from_potential(&conn.potential(chart, x)?))
}

/// Midpoint of the first chart; used to validate a connection once before
/// wrapping it in a form.
pub(crate) fn probe_point(atlas: &ChartAtlas) -> Vec<f64> {
    atlas.charts()[0].ranges.iter().map(|&(a, b)| a + 0.37 * (b - a)).collect()
}

pub(crate) fn nan_matrix(r: usize) -> CMat {
    CMat::from_element(r, r, Complex64::new(f64::NAN, f64::NAN))
}

/// The connection 1-form as a matrix-valued form.
pub fn connection_form(conn: Arc<dyn ConnectionField>) -> FormField {
    let (d, r) = (conn.dim(), conn.rank());
    FormField::new(d, 1, ValueKind::Matrix(r), move |ch, x, v| match conn.potential(ch, x) {
        Ok(p) => (0..d).fold(CMat::zeros(r, r), |acc, i| acc + &p.omega[i] * c(v[0][i])),
        Err(_) => nan_matrix(r),
    })
}

/// The curvature 2-form `F = d omega + omega ^ omega`.
pub fn curvature_form(conn: Arc<dyn ConnectionField>) -> FormField {
    let (d, r) = (conn.dim(), conn.rank());
    FormField::new(d, 2, ValueKind::Matrix(r), move |ch, x, v| match curvature_at(conn.as_ref(), ch, x) {
        Ok(f) => f.on(&v[0], &v[1]),
        Err(_) => nan_matrix(r),
    })
}

/// Row-major `r x r` matrix of complex jets.
pub type JetMatrix = Vec<Complex<Jet>>;

/// Connection coefficients `x -> [omega(d_1), .., omega(d_d)]`, evaluated on jets.
pub type JetPotentialFn = dyn Fn(&[Jet]) -> Vec<JetMatrix> + Send + Sync;

/// A connection given by closed-form coefficients; derivatives come from jets.
#[derive(Clone)]
pub struct JetConnection {
    id: String,
    atlas: ChartAtlas,
    rank: usize,
    f: Arc<JetPotentialFn>,
}

impl JetConnection {
    pub fn new(
        id: impl Into<String>,
        atlas: ChartAtlas,
        rank: usize,
        f: impl Fn(&[Jet]) -> Vec<JetMatrix> + Send + Sync + 'static,
    ) -> Self {
        JetConnection { id: id.into(), atlas, rank, f: Arc::new(f) }
    }

    /// `omega = 0` on the trivial rank-`r` bundle.
    pub fn flat(atlas: ChartAtlas, rank: usize) -> Self {
        let d = atlas.dim();
        JetConnection::new("flat", atlas, rank, move |_| vec![vec![Complex::new(Jet::cst(0.0), Jet::cst(0.0)); rank * rank]; d])
    }

    /// `U(1)` monopole of charge `n` on `S^2`:
    /// `A = -(i n / 2)(1 - cos theta) d phi`, `F = -(i n / 2) sin theta d theta ^ d phi`.
    pub fn monopole(n: i64) -> Self {
        let nn = n as f64;
        JetConnection::new(format!("monopole?n={n}"), ChartAtlas::sphere2(), 1, move |x| {
            let a = (Jet::cst(1.0) - x[0].cos()) * Jet::cst(-nn / 2.0);
            vec![vec![Complex::new(Jet::cst(0.0), Jet::cst(0.0))], vec![Complex::new(Jet::cst(0.0), a)]]
        })
    }

    /// Charge-`n` monopole plus `i` times a random quadratic 1-form pulled back
    /// from the ambient `R^3`. The perturbation is globally smooth on the
    /// sphere, so the bundle and its Chern number are unchanged.
    pub fn perturbed_monopole(n: i64, seed: u64, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // P_a(y) = c_a + sum_b l_ab y_b + sum_bc q_abc y_b y_c
        let coeffs: Vec<(f64, [f64; 3], [[f64; 3]; 3])> = (0..3)
            .map(|_| {
                let mut r = || amplitude * rng.random_range(-1.0..1.0);
                (r(), [r(), r(), r()], [[r(), r(), r()], [r(), r(), r()], [r(), r(), r()]])
            })
            .collect();
        let base = JetConnection::monopole(n);
        JetConnection::new(format!("monopole?n={n}&seed={seed}"), ChartAtlas::sphere2(), 1, move |x| {
            let mut omega = (base.f)(x);
            let y = [x[0].sin() * x[1].cos(), x[0].sin() * x[1].sin(), x[0].cos()];
            for (a, (c0, l, q)) in coeffs.iter().enumerate() {
                let mut p = Jet::cst(*c0);
                for b in 0..3 {
                    p += Jet::cst(l[b]) * y[b];
                    for cc in 0..3 {
                        p += Jet::cst(q[b][cc]) * y[b] * y[cc];
                    }
                }
                for (i, om) in omega.iter_mut().enumerate() {
                    om[0].im += p * y[a].partial(i);
                }
            }
            omega
        })
    }

    /// Random unitary connection `omega_i = sum_a c_ia(x) T_a` with `T_a` an
    /// anti-hermitian basis of `u(r)` and smooth trigonometric coefficients.
    pub fn random_unitary(atlas: ChartAtlas, rank: usize, seed: u64, amplitude: f64) -> Self {
        let d = atlas.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = unitary_basis(rank);
        // c_ia(x) = a0 + sum_j (s_j sin x_j + t_j cos x_j) + u sin x_0 cos x_{d-1}
        let coeffs: Vec<Vec<(f64, Vec<(f64, f64)>, f64)>> = (0..d)
            .map(|_| {
                (0..basis.len())
                    .map(|_| {
                        let a0 = amplitude * rng.random_range(-1.0..1.0);
                        let trig = (0..d)
                            .map(|_| (amplitude * rng.random_range(-1.0..1.0), amplitude * rng.random_range(-1.0..1.0)))
                            .collect();
                        (a0, trig, amplitude * rng.random_range(-1.0..1.0))
                    })
                    .collect()
            })
            .collect();
        JetConnection::new(format!("random-u{rank}?seed={seed}"), atlas, rank, move |x| {
            (0..d)
                .map(|i| {
                    let mut m = vec![Complex::new(Jet::cst(0.0), Jet::cst(0.0)); rank * rank];
                    for (a, t) in basis.iter().enumerate() {
                        let (a0, trig, cross) = &coeffs[i][a];
                        let mut cf = Jet::cst(*a0);
                        for (j, (s, co)) in trig.iter().enumerate() {
                            cf += Jet::cst(*s) * x[j].sin() + Jet::cst(*co) * x[j].cos();
                        }
                        cf += Jet::cst(*cross) * x[0].sin() * x[d - 1].cos();
                        for (e, z) in m.iter_mut().zip(t.iter()) {
                            *e += Complex::new(cf * Jet::cst(z.re), cf * Jet::cst(z.im));
                        }
                    }
                    m
                })
                .collect()
        })
    }
}

impl JetConnection {
    /// A `u(2)` connection on `S^2 x B` (sphere coordinates first) pulled back
    /// from `R^3 x B`, hence smooth at the poles:
    /// `omega = sum_a M_a(y, b) dy^a + sum_j N_j(y, b) db^j` with coefficients
    /// affine in `y` and trigonometric in `b`.
    pub fn ambient_sphere_product(total: ChartAtlas, seed: u64, amplitude: f64) -> Result<Self> {
        if total.dim() < 2 || total.dim() > 2 + 3 {
            return arg(format!("sphere times a base of dimension 0..=3 expected, got dimension {}", total.dim()));
        }
        let nb = total.dim() - 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = unitary_basis(2);
        let nslots = 3 + nb;
        let coeffs: Vec<Vec<Vec<f64>>> = (0..nslots)
            .map(|_| {
                (0..basis.len())
                    .map(|_| (0..1 + 3 + 2 * nb).map(|_| amplitude * rng.random_range(-1.0..1.0)).collect())
                    .collect()
            })
            .collect();
        Ok(JetConnection::new(format!("ambient-u2?seed={seed}"), total, 2, move |x: &[Jet]| {
            let y = [x[0].sin() * x[1].cos(), x[0].sin() * x[1].sin(), x[0].cos()];
            let zero = Complex::new(Jet::cst(0.0), Jet::cst(0.0));
            let slot_matrix = |s: usize| {
                let mut m = vec![zero; 4];
                for (t, cf) in basis.iter().zip(&coeffs[s]) {
                    let mut f = Jet::cst(cf[0]);
                    for a in 0..3 {
                        f += Jet::cst(cf[1 + a]) * y[a];
                    }
                    for j in 0..nb {
                        f += Jet::cst(cf[4 + 2 * j]) * x[2 + j].sin() + Jet::cst(cf[5 + 2 * j]) * y[j % 3] * x[2 + j].cos();
                    }
                    for (e, z) in m.iter_mut().zip(t.iter()) {
                        *e += Complex::new(f * Jet::cst(z.re), f * Jet::cst(z.im));
                    }
                }
                m
            };
            let ms: Vec<_> = (0..nslots).map(slot_matrix).collect();
            (0..x.len())
                .map(|i| {
                    let mut w = vec![zero; 4];
                    for a in 0..3 {
                        let dy = y[a].partial(i);
                        for (e, m) in w.iter_mut().zip(&ms[a]) {
                            *e += Complex::new(m.re * dy, m.im * dy);
                        }
                    }
                    if i >= 2 {
                        for (e, m) in w.iter_mut().zip(&ms[3 + i - 2]) {
                            *e += *m;
                        }
                    }
                    w
                })
                .collect()
        }))
    }
}

/// `i I`, `i sigma_1`, `i sigma_2`, `i sigma_3` for rank 2; `i E_aa` and the
/// off-diagonal anti-hermitian pairs in general.
pub fn unitary_basis(r: usize) -> Vec<CMat> {
    let mut out = Vec::new();
    for a in 0..r {
        let mut m = CMat::zeros(r, r);
        m[(a, a)] = I;
        out.push(m);
    }
    for a in 0..r {
        for b in a + 1..r {
            let mut m = CMat::zeros(r, r);
            m[(a, b)] = c(1.0);
            m[(b, a)] = c(-1.0);
            out.push(m);
            let mut m = CMat::zeros(r, r);
            m[(a, b)] = I;
            m[(b, a)] = I;
            out.push(m);
        }
    }
    out
}

pub(crate) fn jet_potential(omega: &[JetMatrix], r: usize, d: usize) -> Potential<CMat> {
    let om = omega
        .iter()
        .map(|m| CMat::from_fn(r, r, |a, b| Complex64::new(m[a * r + b].re.value(), m[a * r + b].im.value())))
        .collect();
    let dom = (0..d)
        .map(|j| {
            omega
                .iter()
                .map(|m| CMat::from_fn(r, r, |a, b| Complex64::new(m[a * r + b].re.grad(j), m[a * r + b].im.grad(j))))
                .collect()
        })
        .collect();
    Potential { omega: om, d_omega: dom }
}

impl ConnectionField for JetConnection {
    fn id(&self) -> String {
        self.id.clone()
    }
    fn atlas(&self) -> &ChartAtlas {
        &self.atlas
    }
    fn rank(&self) -> usize {
        self.rank
    }
    fn potential(&self, _chart: usize, x: &[f64]) -> Result<Potential<CMat>> {
        if x.len() != self.dim() {
            return arg(format!("point has {} coordinates, expected {}", x.len(), self.dim()));
        }
        Ok(jet_potential(&(self.f)(&Jet::seed(x)), self.rank, self.dim()))
    }
}

/// Levi-Civita connection of a metric on the tangent bundle, in the
/// coordinate frame: `omega(d_i)^k_j = Gamma^k_ij`.
#[derive(Clone)]
pub struct LeviCivita {
    metric: Arc<dyn MetricField>,
}

impl LeviCivita {
    pub fn new(metric: Arc<dyn MetricField>) -> Self {
        LeviCivita { metric }
    }
}

impl ConnectionField for LeviCivita {
    fn id(&self) -> String {
        format!("levi-civita?metric={}", self.metric.id())
    }
    fn atlas(&self) -> &ChartAtlas {
        self.metric.atlas()
    }
    fn rank(&self) -> usize {
        self.metric.dim()
    }
    fn potential(&self, chart: usize, x: &[f64]) -> Result<Potential<CMat>> {
        let dv = christoffel_derivatives(self.metric.as_ref(), chart, x, true)?;
        let d = dv.dim;
        let omega = (0..d).map(|i| CMat::from_fn(d, d, |k, j| c(dv.gamma[(k * d + i) * d + j]))).collect();
        let d_omega = (0..d)
            .map(|m| (0..d).map(|i| CMat::from_fn(d, d, |k, j| c(dv.dgamma[((m * d + k) * d + i) * d + j]))).collect())
            .collect();
        Ok(Potential { omega, d_omega })
    }
    /// `E = L^{-T}` for the Cholesky factor `g = L L^T`, so `E^T g E = 1`.
    fn orthonormal_frame(&self, chart: usize, x: &[f64]) -> Result<Option<CMat>> {
        let g = crate::geometry::metric_at(self.metric.as_ref(), chart, x);
        let chol = g.cholesky().ok_or_else(|| Error::DegenerateMetric { chart, point: x.to_vec() })?;
        let l: DMatrix<f64> = chol.l();
        let e = l.transpose().try_inverse().ok_or_else(|| Error::DegenerateMetric { chart, point: x.to_vec() })?;
        Ok(Some(e.map(c)))
    }
}

/// Pullback of a connection along a smooth map given on jets.
#[derive(Clone)]
pub struct PulledBack {
    inner: Arc<dyn ConnectionField>,
    atlas: ChartAtlas,
    target_chart: usize,
    map: Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync>,
}

impl PulledBack {
    pub fn new(
        inner: Arc<dyn ConnectionField>,
        atlas: ChartAtlas,
        target_chart: usize,
        map: Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync>,
    ) -> Self {
        PulledBack { inner, atlas, target_chart, map }
    }

    /// Pullback along the projection of `Z x B` onto its first factor.
    pub fn from_fiber(inner: Arc<dyn ConnectionField>, total: ChartAtlas) -> Self {
        let dz = inner.dim();
        PulledBack::new(inner, total, 0, Arc::new(move |x: &[Jet]| x[..dz].to_vec()))
    }
}

impl ConnectionField for PulledBack {
    fn id(&self) -> String {
        format!("pullback({})", self.inner.id())
    }
    fn atlas(&self) -> &ChartAtlas {
        &self.atlas
    }
    fn rank(&self) -> usize {
        self.inner.rank()
    }
    fn potential(&self, _chart: usize, x: &[f64]) -> Result<Potential<CMat>> {
        let img = (self.map)(&Jet::seed(x));
        let y: Vec<f64> = img.iter().map(Jet::value).collect();
        let p = self.inner.potential(self.target_chart, &y)?;
        let (d, e, r) = (x.len(), y.len(), self.rank());
        let mut omega = vec![CMat::zeros(r, r); d];
        let mut d_omega = vec![vec![CMat::zeros(r, r); d]; d];
        for i in 0..d {
            for a in 0..e {
                let dia = img[a].grad(i);
                omega[i] += &p.omega[a] * c(dia);
                for j in 0..d {
                    d_omega[j][i] += &p.omega[a] * c(img[a].hess(i, j));
                    if dia != 0.0 {
                        for b in 0..e {
                            let djb = img[b].grad(j);
                            if djb != 0.0 {
                                d_omega[j][i] += &p.d_omega[b][a] * c(dia * djb);
                            }
                        }
                    }
                }
            }
        }
        Ok(Potential { omega, d_omega })
    }
}

/// A matrix connection viewed as a family of multiplication operators on
/// sections over the circle: each value becomes the `xi`-independent symbol
/// of multiplication by a constant matrix.
#[derive(Clone)]
pub struct MultiplicationLift {
    inner: Arc<dyn ConnectionField>,
    cutoff: usize,
    depth: usize,
}

impl MultiplicationLift {
    pub fn new(inner: Arc<dyn ConnectionField>, cutoff: usize, depth: usize) -> Self {
        MultiplicationLift { inner, cutoff, depth }
    }
}

impl ConnectionField<SymbolExpansion> for MultiplicationLift {
    fn id(&self) -> String {
        format!("multiplication({})", self.inner.id())
    }
    fn atlas(&self) -> &ChartAtlas {
        self.inner.atlas()
    }
    fn rank(&self) -> usize {
        self.inner.rank()
    }
    fn potential(&self, chart: usize, x: &[f64]) -> Result<Potential<SymbolExpansion>> {
        let p = self.inner.potential(chart, x)?;
        let lift = |m: &CMat| SymbolExpansion::constant(m, self.cutoff, self.depth);
        Ok(Potential {
            omega: p.omega.iter().map(lift).collect(),
            d_omega: p.d_omega.iter().map(|row| row.iter().map(lift).collect()).collect(),
        })
    }
}

/// Reference value of the monopole curvature, for tests.
pub fn monopole_curvature(n: i64, theta: f64) -> Complex64 {
    Complex64::new(0.0, -(n as f64) / 2.0 * theta.sin())
}

/// Reference Chern number of the charge-`n` monopole,
/// `(i / 2 pi) int F = (i / 2 pi)(-i n / 2)(4 pi)`.
pub fn monopole_chern_number(n: i64) -> f64 {
    (I / (2.0 * PI) * Complex64::new(0.0, -(n as f64) / 2.0) * (4.0 * PI)).re
}
