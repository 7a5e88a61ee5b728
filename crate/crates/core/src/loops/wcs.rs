//! The Wodzicki–Chern–Simons form on the loop space of a Riemannian
//! manifold, evaluated on orbit loops of circle actions.
//!
//! On `T_gamma LM` with frame `X_1..X_{2k-1}`,
//!
//! `CS^w_k = 2/(2k-1)! sum_sigma sgn(sigma) int_{S^1} tr[(-Omega(X_s1, gdot)
//!     - 2 (w -> Omega(w, gdot) X_s1)) Omega(X_s2, X_s3) ... Omega(X_s(2k-2), X_s(2k-1))] dtheta`
//!
//! where `Omega` is the Riemann curvature endomorphism.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::action::{ActionKind, CircleAction};
use crate::error::{arg, Result};
use crate::forms::{integrate_function, QuadratureSpec};
use crate::geometry::{curvature_unchecked, CurvatureSample, MetricField};
use crate::linalg::{c, permutations};

pub const DEFAULT_LOOP_NODES: usize = 64;

/// A loop sampled on the uniform grid `theta_j = 2 pi j / n`.
#[derive(Clone, Debug)]
pub struct SampledLoop {
    pub points: Vec<Vec<f64>>,
    pub velocity: Vec<DVector<f64>>,
}

impl SampledLoop {
    pub fn nodes(&self) -> usize {
        self.points.len()
    }

    pub fn constant(x: &[f64], nodes: usize) -> Self {
        SampledLoop { points: vec![x.to_vec(); nodes], velocity: vec![DVector::zeros(x.len()); nodes] }
    }
}

/// Vector field along a sampled loop, one vector per node.
pub type LoopField = Vec<DVector<f64>>;

/// The orbit `theta -> a(theta, x)` and the chart frame pushed along it by
/// `d a(theta, .)`.
pub fn sample_orbit(action: &CircleAction, x: &[f64], nodes: usize) -> (SampledLoop, Vec<LoopField>) {
    let d = x.len();
    let mut points = Vec::with_capacity(nodes);
    let mut velocity = Vec::with_capacity(nodes);
    let mut frame = vec![Vec::with_capacity(nodes); d];
    for j in 0..nodes {
        let theta = 2.0 * PI * j as f64 / nodes as f64;
        let (p, v, jac) = action.differential(theta, x);
        points.push(p);
        velocity.push(v);
        for (i, f) in frame.iter_mut().enumerate() {
            f.push(jac.column(i).into_owned());
        }
    }
    (SampledLoop { points, velocity }, frame)
}

/// `w -> Omega(w, v) x`, i.e. `M^i_k = R^i_{m k l} x^m v^l`.
fn transport_term(r: &CurvatureSample, x: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    let d = r.dim();
    DMatrix::from_fn(d, d, |i, k| {
        let mut acc = 0.0;
        for m in 0..d {
            if x[m] == 0.0 {
                continue;
            }
            for l in 0..d {
                if v[l] != 0.0 {
                    acc += r.r(i, m, k, l) * x[m] * v[l];
                }
            }
        }
        acc
    })
}

/// The integrand at one node, without the `2/(2k-1)!` prefactor.
fn density(r: &CurvatureSample, v: &DVector<f64>, frame: &[&DVector<f64>], perms: &[(f64, Vec<usize>)]) -> f64 {
    let n = frame.len();
    let vs = v.as_slice();
    let heads: Vec<DMatrix<f64>> = frame
        .iter()
        .map(|x| -r.endomorphism(x.as_slice(), vs) - transport_term(r, x, v) * 2.0)
        .collect();
    let mut pairs = vec![None; n * n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                pairs[a * n + b] = Some(r.endomorphism(frame[a].as_slice(), frame[b].as_slice()));
            }
        }
    }
    let mut acc = 0.0;
    for (sign, p) in perms {
        let mut m = heads[p[0]].clone();
        for w in p[1..].chunks(2) {
            m *= pairs[w[0] * n + w[1]].as_ref().expect("distinct slots");
        }
        acc += sign * m.trace();
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `CS^w_k` at a loop on the frame `X_1..X_{2k-1}`, the `theta`-integral by
/// the trapezoid rule on the loop's grid.
pub fn wcs_form_at_loop(
    metric: &dyn MetricField,
    chart: usize,
    lp: &SampledLoop,
    frame: &[LoopField],
    k: usize,
) -> Result<f64> {
    if k == 0 {
        return arg("Wodzicki-Chern-Simons degree needs k >= 1");
    }
    let deg = 2 * k - 1;
    if frame.len() != deg {
        return arg(format!("CS^w_{k} takes {deg} frame vectors, got {}", frame.len()));
    }
    let n = lp.nodes();
    if n == 0 || frame.iter().any(|f| f.len() != n) {
        return arg("frame fields must be sampled on the loop's grid");
    }
    if deg > metric.dim() || lp.velocity.iter().all(|v| v.iter().all(|&x| x == 0.0)) {
        return Ok(0.0);
    }
    let perms = permutations(deg);
    let mut sum = 0.0;
    for j in 0..n {
        let r = curvature_unchecked(metric, chart, &lp.points[j])?;
        let fr: Vec<&DVector<f64>> = frame.iter().map(|f| &f[j]).collect();
        sum += density(&r, &lp.velocity[j], &fr, &perms);
    }
    Ok(2.0 / factorial(deg) * sum * 2.0 * PI / n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WcsOptions {
    pub loop_nodes: usize,
    /// Use exact symmetry reductions: a rotation of a cyclic coordinate
    /// makes the loop integrand constant in `theta`, and every cyclic
    /// coordinate becomes a constant quadrature axis.
    pub use_symmetry: bool,
    /// Also evaluate at doubled quadrature and loop resolution.
    pub refine: bool,
}

impl Default for WcsOptions {
    fn default() -> Self {
        WcsOptions { loop_nodes: DEFAULT_LOOP_NODES, use_symmetry: true, refine: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub quadrature: QuadratureSpec,
    pub loop_nodes: usize,
    pub value: f64,
    pub std_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WcsIntegral {
    /// Value at the requested resolution.
    pub value: f64,
    pub std_error: Option<f64>,
    pub evaluations: usize,
    pub convergence: Vec<ConvergenceRow>,
    /// `|v_1 - v_0| / |v_1|` between the last two levels.
    pub relative_change: Option<f64>,
    pub constant_axes: Vec<usize>,
    pub loop_reduced: bool,
}

/// `int_M a~^* CS^w_k` for `dim M = 2k - 1`, in the chart's coordinate
/// orientation: at each node `x` the orbit loop of `x` is sampled and the
/// form is evaluated on the pushed coordinate frame.
pub fn wcs_integral(
    metric: &dyn MetricField,
    action: &CircleAction,
    k: usize,
    q: &QuadratureSpec,
    opts: &WcsOptions,
) -> Result<WcsIntegral> {
    if k == 0 {
        return arg("Wodzicki-Chern-Simons degree needs k >= 1");
    }
    let d = metric.dim();
    if d != 2 * k - 1 {
        return arg(format!("CS^w_{k} integrates over {}-manifolds, the metric has dimension {d}", 2 * k - 1));
    }
    if action.dim() != d {
        return arg(format!("action on a {}-manifold, metric on a {d}-manifold", action.dim()));
    }
    if opts.loop_nodes == 0 {
        return arg("loop grid needs at least one node");
    }
    q.validate()?;
    let atlas = metric.atlas();
    if action.kind() == ActionKind::Trivial {
        let row = ConvergenceRow { level: 0, quadrature: *q, loop_nodes: opts.loop_nodes, value: 0.0, std_error: None };
        return Ok(WcsIntegral {
            value: 0.0,
            std_error: None,
            evaluations: 0,
            convergence: vec![row],
            relative_change: None,
            constant_axes: (0..d).collect(),
            loop_reduced: true,
        });
    }
    let cyclic = metric.cyclic_coordinates();
    let (constant_axes, loop_reduced) = match action.kind() {
        ActionKind::Translation { axis, .. } if opts.use_symmetry && cyclic.contains(&axis) => (cyclic, true),
        _ => (Vec::new(), false),
    };
    let frame_indices: Vec<usize> = (0..d).collect();
    let run = |q: &QuadratureSpec, loop_nodes: usize| -> Result<(f64, Option<f64>, usize)> {
        let nodes = if loop_reduced { 1 } else { loop_nodes };
        let r = integrate_function(atlas, q, &constant_axes, |chart, x| {
            let (lp, frame) = sample_orbit(action, x, nodes);
            let fr: Vec<LoopField> = frame_indices.iter().map(|&i| frame[i].clone()).collect();
            wcs_form_at_loop(metric, chart, &lp, &fr, k).map(c)
        })?;
        Ok((r.value.re, r.std_error, r.evaluations))
    };
    let mut convergence = Vec::new();
    let (v0, e0, n0) = run(q, opts.loop_nodes)?;
    convergence.push(ConvergenceRow { level: 0, quadrature: *q, loop_nodes: opts.loop_nodes, value: v0, std_error: e0 });
    let mut evaluations = n0;
    let mut relative_change = None;
    if opts.refine {
        let q1 = q.refined();
        let (v1, e1, n1) = run(&q1, 2 * opts.loop_nodes)?;
        evaluations += n1;
        convergence.push(ConvergenceRow { level: 1, quadrature: q1, loop_nodes: 2 * opts.loop_nodes, value: v1, std_error: e1 });
        let scale = v1.abs().max(f64::MIN_POSITIVE);
        relative_change = Some(if v1 == v0 { 0.0 } else { (v1 - v0).abs() / scale });
    }
    Ok(WcsIntegral { value: v0, std_error: e0, evaluations, convergence, relative_change, constant_axes, loop_reduced })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RoundSphere;

    #[test]
    fn frame_count_and_degenerate_cases() {
        let s3 = RoundSphere::new(3, 1.0).unwrap();
        let x = [1.0, 2.0, 3.0];
        let (lp, frame) = sample_orbit(&CircleAction::hopf(), &x, 8);
        assert!(wcs_form_at_loop(&s3, 0, &lp, &frame[..2], 2).is_err());
        // constant loop
        let cl = SampledLoop::constant(&x, 8);
        assert_eq!(wcs_form_at_loop(&s3, 0, &cl, &frame, 2).unwrap(), 0.0);
        // degree above the dimension
        let five: Vec<LoopField> = (0..5).map(|i| frame[i % 3].clone()).collect();
        assert_eq!(wcs_form_at_loop(&s3, 0, &lp, &five, 3).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s3 = RoundSphere::new(3, 1.0).unwrap();
        let q = QuadratureSpec::gauss(4);
        assert!(wcs_integral(&s3, &CircleAction::hopf(), 3, &q, &WcsOptions::default()).is_err());
        assert!(wcs_integral(&s3, &CircleAction::psi_rotation(), 2, &q, &WcsOptions::default()).is_err());
    }
}
