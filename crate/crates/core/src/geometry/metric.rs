use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::atlas::ChartAtlas;
use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};

/// A Riemannian metric given chart by chart.
///
/// Implementors only supply the components on jet-valued points; values and
/// first and second partial derivatives all come from one jet evaluation.
pub trait MetricField: Send + Sync {
    fn id(&self) -> String;

    fn atlas(&self) -> &ChartAtlas;

    /// Row-major `d x d` components `g_ij` at a jet-valued point.
    fn components_jet(&self, chart: usize, x: &[Jet]) -> Vec<Jet>;

    /// Coordinates the components do not depend on. Translations along them
    /// are isometries.
    fn cyclic_coordinates(&self) -> Vec<usize> {
        Vec::new()
    }

    fn dim(&self) -> usize {
        self.atlas().dim()
    }
}

/// `g`, `dg[k] = d_k g` and `ddg[k][l] = d_k d_l g` at one point.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    pub dg: Vec<DMatrix<f64>>,
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

pub fn metric_at(metric: &dyn MetricField, chart: usize, x: &[f64]) -> DMatrix<f64> {
    let d = x.len();
    let xs: Vec<Jet> = x.iter().map(|&v| Jet::constant(v)).collect();
    let c = metric.components_jet(chart, &xs);
    DMatrix::from_fn(d, d, |i, j| c[i * d + j].value())
}

pub fn metric_jet(metric: &dyn MetricField, chart: usize, x: &[f64]) -> MetricJet {
    let d = x.len();
    let c = metric.components_jet(chart, &Jet::seed(x));
    let g = DMatrix::from_fn(d, d, |i, j| c[i * d + j].value());
    let dg = (0..d).map(|k| DMatrix::from_fn(d, d, |i, j| c[i * d + j].grad(k))).collect();
    let ddg = (0..d)
        .map(|k| (0..d).map(|l| DMatrix::from_fn(d, d, |i, j| c[i * d + j].hess(k, l))).collect())
        .collect();
    MetricJet { g, dg, ddg }
}

/// Riemannian volume density `sqrt(det g)`; fails on non-positive-definite
/// metrics.
pub fn volume_density(metric: &dyn MetricField, chart: usize, x: &[f64]) -> Result<f64> {
    let g = metric_at(metric, chart, x);
    let ch = g.cholesky().ok_or_else(|| Error::DegenerateMetric { chart, point: x.to_vec() })?;
    Ok(ch.l().diagonal().iter().product())
}

fn sym<S: Scalar>(d: usize, entries: &[(usize, usize, S)]) -> Vec<S> {
    let mut g = vec![S::zero(); d * d];
    for &(i, j, v) in entries {
        g[i * d + j] = v;
        g[j * d + i] = v;
    }
    g
}

#[derive(Clone, Debug)]
pub struct Euclidean {
    atlas: ChartAtlas,
}

impl Euclidean {
    pub fn new(d: usize) -> Self {
        Euclidean { atlas: ChartAtlas::cube(d) }
    }
}

impl MetricField for Euclidean {
    fn id(&self) -> String {
        format!("euclidean?d={}", self.atlas.dim())
    }
    fn atlas(&self) -> &ChartAtlas {
        &self.atlas
    }
    fn components_jet(&self, _chart: usize, x: &[Jet]) -> Vec<Jet> {
        let d = x.len();
        (0..d * d).map(|k| Jet::cst(if k % (d + 1) == 0 { 1.0 } else { 0.0 })).collect()
    }
    fn cyclic_coordinates(&self) -> Vec<usize> {
        (0..self.atlas.dim()).collect()
    }
}

/// Round sphere of radius `radius`. `S^3` uses the Euler-angle chart so the
/// Hopf circle is the `psi` coordinate line; other dimensions use
/// hyperspherical angles.
#[derive(Clone, Debug)]
pub struct RoundSphere {
    n: usize,
    radius: f64,
    atlas: ChartAtlas,
}

impl RoundSphere {
    pub fn new(n: usize, radius: f64) -> Result<Self> {
        if n == 0 || n >= crate::jet::MAX_VARS {
            return Err(Error::Argument(format!("round sphere dimension {n} unsupported")));
        }
        let atlas = match n {
            1 => ChartAtlas::circle(),
            3 => ChartAtlas::euler3(),
            _ => ChartAtlas::hyperspherical(n),
        };
        Ok(RoundSphere { n, radius, atlas })
    }

    pub fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let r2 = S::cst(self.radius * self.radius);
        match self.n {
            1 => vec![r2],
            3 => {
                let q = r2 * S::cst(0.25);
                sym(3, &[(0, 0, q), (1, 1, q), (2, 2, q), (1, 2, q * x[0].cos())])
            }
            n => {
                let mut g = vec![S::zero(); n * n];
                let mut f = r2;
                for i in 0..n {
                    g[i * n + i] = f;
                    if i + 1 < n {
                        let s = x[i].sin();
                        f = f * s * s;
                    }
                }
                g
            }
        }
    }
}

impl MetricField for RoundSphere {
    fn id(&self) -> String {
        if self.radius == 1.0 {
            format!("round-s{}", self.n)
        } else {
            format!("round-s{}?radius={}", self.n, self.radius)
        }
    }
    fn atlas(&self) -> &ChartAtlas {
        &self.atlas
    }
    fn components_jet(&self, _chart: usize, x: &[Jet]) -> Vec<Jet> {
        self.components(x)
    }
    fn cyclic_coordinates(&self) -> Vec<usize> {
        match self.n {
            1 => vec![0],
            3 => vec![1, 2],
            n => vec![n - 1],
        }
    }
}

/// Bi-invariant metric `-2 tr(w w)` on SU(2), `w = g^{-1} dg`, in the Euler
/// chart `g = exp(phi X3) exp(theta X2) exp(psi X3)` with `X_a = i sigma_a / 2`.
/// Isometric to the round sphere of radius 2.
#[derive(Clone, Debug)]
pub struct Su2BiInvariant {
    atlas: ChartAtlas,
}

impl Default for Su2BiInvariant {
    fn default() -> Self {
        Su2BiInvariant { atlas: ChartAtlas::euler3() }
    }
}

impl MetricField for Su2BiInvariant {
    fn id(&self) -> String {
        "su2".into()
    }
    fn atlas(&self) -> &ChartAtlas {
        &self.atlas
    }
    fn components_jet(&self, _chart: usize, x: &[Jet]) -> Vec<Jet> {
        let one = Jet::cst(1.0);
        sym(3, &[(0, 0, one), (1, 1, one), (2, 2, one), (1, 2, x[0].cos())])
    }
    fn cyclic_coordinates(&self) -> Vec<usize> {
        vec![1, 2]
    }
}

/// `c * g` for a constant `c > 0`.
#[derive(Clone)]
pub struct ScaledMetric {
    pub inner: Arc<dyn MetricField>,
    pub factor: f64,
}

impl MetricField for ScaledMetric {
    fn id(&self) -> String {
        format!("scaled({})*{}", self.inner.id(), self.factor)
    }
    fn atlas(&self) -> &ChartAtlas {
        self.inner.atlas()
    }
    fn components_jet(&self, chart: usize, x: &[Jet]) -> Vec<Jet> {
        let c = Jet::cst(self.factor);
        self.inner.components_jet(chart, x).into_iter().map(|v| v * c).collect()
    }
    fn cyclic_coordinates(&self) -> Vec<usize> {
        self.inner.cyclic_coordinates()
    }
}

/// Euclidean metric on the unit cube plus a small random symmetric
/// quadratic polynomial perturbation. Used to exercise curvature code on
/// metrics without symmetry.
#[derive(Clone, Debug)]
pub struct PerturbedEuclidean {
    atlas: ChartAtlas,
    seed: u64,
    /// coeffs[(i,j)] = (constant, linear[d], quadratic[d][d])
    coeffs: Vec<(f64, Vec<f64>, Vec<f64>)>,
}

impl PerturbedEuclidean {
    pub fn new(d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = 0.05;
        let coeffs = (0..d * d)
            .map(|_| {
                let c0 = eps * rng.random_range(-1.0..1.0);
                let c1 = (0..d).map(|_| eps * rng.random_range(-1.0..1.0)).collect();
                let c2 = (0..d * d).map(|_| eps * rng.random_range(-1.0..1.0)).collect();
                (c0, c1, c2)
            })
            .collect();
        PerturbedEuclidean { atlas: ChartAtlas::cube(d), seed, coeffs }
    }

    pub fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let d = x.len();
        let poly = |k: usize| {
            let (c0, c1, c2) = &self.coeffs[k];
            let mut p = S::cst(*c0);
            for a in 0..d {
                p += S::cst(c1[a]) * x[a];
                for b in 0..d {
                    p += S::cst(c2[a * d + b]) * x[a] * x[b];
                }
            }
            p
        };
        let mut g = vec![S::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let base = if i == j { S::one() } else { S::zero() };
                g[i * d + j] = base + poly(i * d + j) + poly(j * d + i);
            }
        }
        g
    }
}

impl MetricField for PerturbedEuclidean {
    fn id(&self) -> String {
        format!("perturbed?d={}&seed={}", self.atlas.dim(), self.seed)
    }
    fn atlas(&self) -> &ChartAtlas {
        &self.atlas
    }
    fn components_jet(&self, _chart: usize, x: &[Jet]) -> Vec<Jet> {
        self.components(x)
    }
}

/// Area of the unit round sphere `S^n`, for reference values.
pub fn unit_sphere_volume(n: usize) -> f64 {
    // vol(S^n) = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
    let half = (n + 1) as f64 / 2.0;
    2.0 * PI.powf(half) / gamma_half_integer(n + 1)
}

fn gamma_half_integer(twice: usize) -> f64 {
    // Gamma(twice/2)
    if twice % 2 == 0 {
        (1..twice / 2).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut a = 0.5;
        while a < twice as f64 / 2.0 - 0.25 {
            g *= a;
            a += 1.0;
        }
        g
    }
}
