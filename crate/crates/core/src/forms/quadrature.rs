//! Tensor Gauss–Legendre and Monte-Carlo integration over chart boxes.
//!
//! Work is split into fixed-size chunks of node indices. Chunks are summed
//! sequentially and chunk sums are combined by a pairwise tree in index
//! order, so results are bit-identical for any number of worker threads.
//! Monte-Carlo samples draw from a counter-based stream keyed by
//! `(seed, chart, sample index)`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::field::{basis, FormField, ValueKind};
use crate::error::{arg, Error, Result};
use crate::geometry::ChartAtlas;
use crate::linalg::permutation_sign;

const CHUNK: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    GaussLegendre { nodes: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
}

impl QuadratureSpec {
    pub fn gauss(nodes: usize) -> Self {
        QuadratureSpec { scheme: Scheme::GaussLegendre { nodes } }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        QuadratureSpec { scheme: Scheme::MonteCarlo { samples, seed } }
    }

    /// 48 nodes per axis up to dimension 3, 24 beyond.
    pub fn default_for_dim(dim: usize) -> Self {
        QuadratureSpec::gauss(if dim <= 3 { 48 } else { 24 })
    }

    pub const DEFAULT_MC_SAMPLES: usize = 2_000_000;

    pub fn validate(&self) -> Result<()> {
        match self.scheme {
            Scheme::GaussLegendre { nodes } if nodes < 2 => {
                Err(Error::Validation(format!("nodes-per-axis must be >= 2, got {nodes}")))
            }
            Scheme::MonteCarlo { samples, .. } if samples < 1000 => {
                Err(Error::Validation(format!("sample-count must be >= 1000, got {samples}")))
            }
            _ => Ok(()),
        }
    }

    /// Same scheme at twice the resolution.
    pub fn refined(&self) -> Self {
        match self.scheme {
            Scheme::GaussLegendre { nodes } => QuadratureSpec::gauss(2 * nodes),
            Scheme::MonteCarlo { samples, seed } => QuadratureSpec::monte_carlo(2 * samples, seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    /// Monte-Carlo standard error; `None` for deterministic rules.
    pub std_error: Option<f64>,
    pub evaluations: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

pub fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Integrates a scalar function over every chart box of `atlas` against the
/// coordinate measure. Axes listed in `constant_axes` are ones the integrand
/// is known not to depend on; they get a single node weighted by the range
/// length, which every tensor rule would reproduce exactly.
pub fn integrate_function<F>(atlas: &ChartAtlas, q: &QuadratureSpec, constant_axes: &[usize], f: F) -> Result<Integral>
where
    F: Fn(usize, &[f64]) -> Result<Complex64> + Sync,
{
    q.validate()?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut var = 0.0;
    let mut evaluations = 0;
    for (ci, chart) in atlas.charts().iter().enumerate() {
        let d = chart.dim();
        let active: Vec<usize> = (0..d).filter(|i| !constant_axes.contains(i)).collect();
        let mut base = vec![0.0; d];
        let mut fixed_weight = 1.0;
        for (i, &(a, b)) in chart.ranges.iter().enumerate() {
            if !active.contains(&i) {
                base[i] = 0.5 * (a + b);
                fixed_weight *= b - a;
            }
        }
        match q.scheme {
            Scheme::GaussLegendre { nodes } => {
                let (gx, gw) = gauss_legendre(nodes);
                let count = nodes.pow(active.len() as u32);
                let chunk_sums = run_chunks(count, |idx| {
                    let mut x = base.clone();
                    let mut w = fixed_weight;
                    let mut rest = idx;
                    for &ax in &active {
                        let k = rest % nodes;
                        rest /= nodes;
                        let (a, b) = chart.ranges[ax];
                        x[ax] = 0.5 * (a + b) + 0.5 * (b - a) * gx[k];
                        w *= 0.5 * (b - a) * gw[k];
                    }
                    Ok((f(ci, &x)? * w, 0.0))
                })?;
                total += pairwise_sum(&chunk_sums.iter().map(|s| s.0).collect::<Vec<_>>());
                evaluations += count;
            }
            Scheme::MonteCarlo { samples, seed } => {
                let volume: f64 = fixed_weight * active.iter().map(|&ax| chart.ranges[ax].1 - chart.ranges[ax].0).product::<f64>();
                let chunk_sums = run_chunks(samples, |idx| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(((ci as u64) << 48) | idx as u64);
                    let mut x = base.clone();
                    for &ax in &active {
                        let (a, b) = chart.ranges[ax];
                        x[ax] = a + (b - a) * rng.random::<f64>();
                    }
                    let v = f(ci, &x)?;
                    Ok((v, v.norm_sqr()))
                })?;
                let n = samples as f64;
                let sum = pairwise_sum(&chunk_sums.iter().map(|s| s.0).collect::<Vec<_>>());
                let sumsq: f64 = pairwise_sum(&chunk_sums.iter().map(|s| Complex64::new(s.1, 0.0)).collect::<Vec<_>>()).re;
                let mean = sum / n;
                let sample_var = (sumsq / n - mean.norm_sqr()).max(0.0) * n / (n - 1.0);
                total += mean * volume;
                var += volume * volume * sample_var / n;
                evaluations += samples;
            }
        }
    }
    let std_error = match q.scheme {
        Scheme::MonteCarlo { .. } => Some(var.sqrt()),
        Scheme::GaussLegendre { .. } => None,
    };
    Ok(Integral { value: total, std_error, evaluations })
}

/// Evaluates `g` on `0..count`, in parallel by fixed chunks, returning the
/// per-chunk `(sum, sum of second components)` in chunk order.
fn run_chunks<G>(count: usize, g: G) -> Result<Vec<(Complex64, f64)>>
where
    G: Fn(usize) -> Result<(Complex64, f64)> + Sync,
{
    let nchunks = count.div_ceil(CHUNK);
    (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let mut s = Complex64::new(0.0, 0.0);
            let mut s2 = 0.0;
            for idx in c * CHUNK..((c + 1) * CHUNK).min(count) {
                let (v, v2) = g(idx)?;
                s += v;
                s2 += v2;
            }
            Ok((s, s2))
        })
        .collect()
}

/// Orientation of a chart as an ordering of its coordinate axes; the
/// identity ordering is the catalog orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation(pub Vec<usize>);

impl Orientation {
    pub fn standard(dim: usize) -> Self {
        Orientation((0..dim).collect())
    }

    pub fn sign(&self) -> f64 {
        permutation_sign(&self.0)
    }
}

/// Integrates a top-degree scalar form: the sum over chart tiles of the
/// quadrature of `a(e_{o(1)}, ..., e_{o(d)})` against the coordinate measure.
pub fn integrate(a: &FormField, atlas: &ChartAtlas, orientation: &Orientation, q: &QuadratureSpec) -> Result<Integral> {
    integrate_reduced(a, atlas, orientation, q, &[])
}

/// As [`integrate`], declaring axes along which the coefficient is constant.
pub fn integrate_reduced(
    a: &FormField,
    atlas: &ChartAtlas,
    orientation: &Orientation,
    q: &QuadratureSpec,
    constant_axes: &[usize],
) -> Result<Integral> {
    if a.degree() != atlas.dim() || a.dim() != atlas.dim() {
        return arg(format!("integrating a {}-form over a {}-manifold", a.degree(), atlas.dim()));
    }
    if a.kind() != ValueKind::Scalar {
        return arg("only scalar forms can be integrated; take a trace first");
    }
    let mut sorted = orientation.0.clone();
    sorted.sort_unstable();
    if sorted != (0..atlas.dim()).collect::<Vec<_>>() {
        return arg("orientation must be a permutation of the chart axes");
    }
    let frame: Vec<DVector<f64>> = orientation.0.iter().map(|&i| basis(atlas.dim(), i)).collect();
    integrate_function(atlas, q, constant_axes, |chart, x| Ok(a.eval_unchecked(chart, x, &frame)[(0, 0)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Chart, ChartAtlas};
    use crate::linalg::c;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m8: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((m8 - 2.0 / 9.0).abs() < 1e-14);
        let (x, _) = gauss_legendre(48);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn circle_circumference() {
        let dth = FormField::coordinate(1, 0);
        let r = integrate(&dth, &ChartAtlas::circle(), &Orientation::standard(1), &QuadratureSpec::gauss(8)).unwrap();
        assert!((r.value.re - 2.0 * PI).abs() < 1e-10);
        let rev = integrate(&dth, &ChartAtlas::circle(), &Orientation(vec![0]), &QuadratureSpec::gauss(8)).unwrap();
        assert_eq!(r, rev);
    }

    #[test]
    fn two_chart_tiling_of_circle() {
        let halves = ChartAtlas::new(
            1,
            vec![Chart::new("lower", vec![(0.0, PI)], vec![false]), Chart::new("upper", vec![(PI, 2.0 * PI)], vec![false])],
        )
        .unwrap();
        let r = integrate(&FormField::coordinate(1, 0), &halves, &Orientation::standard(1), &QuadratureSpec::gauss(4)).unwrap();
        assert!((r.value.re - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn reversed_orientation_flips_sign() {
        let vol = FormField::top_form(2, |_| c(1.0));
        let sq = ChartAtlas::cube(2);
        let a = integrate(&vol, &sq, &Orientation::standard(2), &QuadratureSpec::gauss(3)).unwrap();
        let b = integrate(&vol, &sq, &Orientation(vec![1, 0]), &QuadratureSpec::gauss(3)).unwrap();
        assert!((a.value.re - 1.0).abs() < 1e-14);
        assert!((a.value + b.value).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_specs_and_degrees() {
        assert!(QuadratureSpec::gauss(1).validate().is_err());
        assert!(QuadratureSpec::monte_carlo(999, 0).validate().is_err());
        let r = integrate(&FormField::coordinate(2, 0), &ChartAtlas::cube(2), &Orientation::standard(2), &QuadratureSpec::gauss(4));
        assert!(r.is_err());
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let f = FormField::top_form(3, |x| c((x[0] * 3.0).sin() * x[1].exp() + x[2]));
        let atlas = ChartAtlas::cube(3);
        let run = |threads: usize, q: QuadratureSpec| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| integrate(&f, &atlas, &Orientation::standard(3), &q).unwrap())
        };
        for q in [QuadratureSpec::gauss(20), QuadratureSpec::monte_carlo(5000, 3)] {
            let a = run(1, q);
            let b = run(4, q);
            assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
            assert_eq!(a.std_error.map(f64::to_bits), b.std_error.map(f64::to_bits));
        }
    }
}
