use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{arg, Result};
use crate::geometry::{metric_at, ChartAtlas, MetricField};
use crate::jet::{Jet, Scalar};

pub type ActionFn = dyn Fn(Jet, &[Jet]) -> Vec<Jet> + Send + Sync;

/// What is known about an action beyond its formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ActionKind {
    Trivial,
    /// `x_axis -> x_axis + rate (theta + offset)`.
    Translation { axis: usize, rate: f64, offset: f64 },
    General,
}

/// A circle action `(theta, m) -> a(theta, m)` on a charted manifold,
/// `theta` of period `2 pi`.
#[derive(Clone)]
pub struct CircleAction {
    id: String,
    atlas: ChartAtlas,
    kind: ActionKind,
    map: Arc<ActionFn>,
}

impl fmt::Debug for CircleAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CircleAction").field("id", &self.id).field("kind", &self.kind).finish()
    }
}

impl CircleAction {
    pub fn new(id: impl Into<String>, atlas: ChartAtlas, map: impl Fn(Jet, &[Jet]) -> Vec<Jet> + Send + Sync + 'static) -> Self {
        CircleAction { id: id.into(), atlas, kind: ActionKind::General, map: Arc::new(map) }
    }

    pub fn trivial(atlas: ChartAtlas) -> Self {
        CircleAction { id: "trivial".into(), atlas, kind: ActionKind::Trivial, map: Arc::new(|_, x| x.to_vec()) }
    }

    /// Rotation of a periodic coordinate. `rate` times `2 pi` must be a
    /// multiple of the coordinate's period.
    pub fn translation(id: impl Into<String>, atlas: ChartAtlas, axis: usize, rate: f64) -> Result<Self> {
        let chart = &atlas.charts()[0];
        if axis >= atlas.dim() || !chart.periodic[axis] {
            return arg(format!("axis {axis} is not a periodic coordinate"));
        }
        let (a, b) = chart.ranges[axis];
        let turns = rate * 2.0 * PI / (b - a);
        if (turns - turns.round()).abs() > 1e-12 || turns.round() == 0.0 {
            return arg("translation does not close up after one turn");
        }
        Ok(CircleAction::translation_unchecked(id.into(), atlas, axis, rate, 0.0))
    }

    fn translation_unchecked(id: String, atlas: ChartAtlas, axis: usize, rate: f64, offset: f64) -> Self {
        let map = move |t: Jet, x: &[Jet]| {
            let mut y = x.to_vec();
            y[axis] += (t + Jet::cst(offset)) * Jet::cst(rate);
            y
        };
        CircleAction { id, atlas, kind: ActionKind::Translation { axis, rate, offset }, map: Arc::new(map) }
    }

    /// Hopf action on the round `S^3` in Euler angles: `psi -> psi + 2 theta`.
    pub fn hopf() -> Self {
        CircleAction::translation("hopf", ChartAtlas::euler3(), 2, 2.0).expect("psi is periodic")
    }

    /// Fiber rotation `psi -> psi + 2 theta` on the squashed family's chart.
    pub fn psi_rotation() -> Self {
        CircleAction::translation("psi-rotation", squashed_atlas(), 4, 2.0).expect("psi is periodic")
    }

    /// `theta -> a(theta + theta0, .)`.
    pub fn shifted(&self, theta0: f64) -> Self {
        let id = format!("{}+{theta0}", self.id);
        match self.kind {
            ActionKind::Trivial => CircleAction { id, ..self.clone() },
            ActionKind::Translation { axis, rate, offset } => {
                CircleAction::translation_unchecked(id, self.atlas.clone(), axis, rate, offset + theta0)
            }
            ActionKind::General => {
                let inner = self.map.clone();
                CircleAction { id, atlas: self.atlas.clone(), kind: ActionKind::General, map: Arc::new(move |t, x| inner(t + Jet::cst(theta0), x)) }
            }
        }
    }

    /// The same formula with the structural hints dropped, so that consumers
    /// take their general paths.
    pub fn as_general(&self) -> Self {
        CircleAction { kind: ActionKind::General, ..self.clone() }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    pub fn atlas(&self) -> &ChartAtlas {
        &self.atlas
    }

    pub fn dim(&self) -> usize {
        self.atlas.dim()
    }

    /// `a(theta, x)` wrapped into the chart.
    pub fn act(&self, theta: f64, x: &[f64]) -> Vec<f64> {
        let xs: Vec<Jet> = x.iter().map(|&v| Jet::constant(v)).collect();
        let mut y: Vec<f64> = (self.map)(Jet::constant(theta), &xs).iter().map(Jet::value).collect();
        self.atlas.charts()[0].wrap(&mut y);
        y
    }

    /// Point, velocity `d a / d theta` and Jacobian `d a / d x` at `(theta, x)`.
    pub fn differential(&self, theta: f64, x: &[f64]) -> (Vec<f64>, DVector<f64>, DMatrix<f64>) {
        let d = x.len();
        let mut vars = vec![theta];
        vars.extend_from_slice(x);
        let seeds = Jet::seed(&vars);
        let img = (self.map)(seeds[0], &seeds[1..]);
        let mut p: Vec<f64> = img.iter().map(Jet::value).collect();
        self.atlas.charts()[0].wrap(&mut p);
        let vel = DVector::from_fn(d, |i, _| img[i].grad(0));
        let jac = DMatrix::from_fn(d, d, |i, j| img[i].grad(j + 1));
        (p, vel, jac)
    }

    /// `max |J^T g(a(theta, x)) J - g(x)|` over the given points and angles.
    pub fn isometry_residual(&self, metric: &dyn MetricField, points: &[Vec<f64>], thetas: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for x in points {
            let g0 = metric_at(metric, 0, x);
            for &t in thetas {
                let (y, _, jac) = self.differential(t, x);
                let g1 = metric_at(metric, 0, &y);
                worst = worst.max((jac.transpose() * g1 * &jac - &g0).abs().max());
            }
        }
        worst
    }

    /// `max |a(0, x) - x| + max |a(2 pi, x) - a(0, x)|`, periodic coordinates
    /// compared modulo their period.
    pub fn closure_residual(&self, points: &[Vec<f64>]) -> f64 {
        let chart = &self.atlas.charts()[0];
        let dist = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .zip(chart.ranges.iter().zip(&chart.periodic))
                .map(|((u, v), (&(lo, hi), &per))| {
                    let d = (u - v).abs();
                    if per {
                        d.min((hi - lo) - d)
                    } else {
                        d
                    }
                })
                .fold(0.0, f64::max)
        };
        let mut worst = 0.0f64;
        for x in points {
            let mut xw = x.clone();
            chart.wrap(&mut xw);
            worst = worst.max(dist(&self.act(0.0, x), &xw));
            worst = worst.max(dist(&self.act(2.0 * PI, x), &self.act(0.0, x)));
        }
        worst
    }
}

/// Chart `(theta1, phi1, theta2, phi2, psi)` on
/// `(0, pi) x (0, 2 pi) x (0, pi) x (0, 2 pi) x (0, 4 pi)`.
pub fn squashed_atlas() -> ChartAtlas {
    ChartAtlas::single(
        "t11",
        vec![(0.0, PI), (0.0, 2.0 * PI), (0.0, PI), (0.0, 2.0 * PI), (0.0, 4.0 * PI)],
        vec![false, true, false, true, true],
    )
}

/// Circle-bundle metrics over `S^2 x S^2` on `S^2 x S^3`:
///
/// `g_t = (1/6)(dth1^2 + sin^2 th1 dph1^2) + (1/6)(dth2^2 + sin^2 th2 dph2^2)
///        + (t/9)(dpsi + cos th1 dph1 + cos th2 dph2)^2`.
#[derive(Clone, Debug)]
pub struct SquashedMetricFamily {
    t: f64,
    atlas: ChartAtlas,
}

impl SquashedMetricFamily {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return arg(format!("squashing parameter must lie in (0, 1], got {t}"));
        }
        Ok(SquashedMetricFamily { t, atlas: squashed_atlas() })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let sixth = S::cst(1.0 / 6.0);
        let f = S::cst(self.t / 9.0);
        let (s1, c1) = (x[0].sin(), x[0].cos());
        let (s2, c2) = (x[2].sin(), x[2].cos());
        // fiber 1-form eta = dpsi + c1 dph1 + c2 dph2 in (th1, ph1, th2, ph2, psi)
        let eta = [S::zero(), c1, S::zero(), c2, S::one()];
        let mut g = vec![S::zero(); 25];
        g[0] = sixth;
        g[6] = sixth * s1 * s1;
        g[12] = sixth;
        g[18] = sixth * s2 * s2;
        for i in 0..5 {
            for j in 0..5 {
                g[i * 5 + j] += f * eta[i] * eta[j];
            }
        }
        g
    }
}

impl MetricField for SquashedMetricFamily {
    fn id(&self) -> String {
        format!("squashed-t11?t={}", self.t)
    }
    fn atlas(&self) -> &ChartAtlas {
        &self.atlas
    }
    fn components_jet(&self, _chart: usize, x: &[Jet]) -> Vec<Jet> {
        self.components(x)
    }
    fn cyclic_coordinates(&self) -> Vec<usize> {
        vec![1, 3, 4]
    }
}
