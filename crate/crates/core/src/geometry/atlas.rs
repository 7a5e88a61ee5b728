use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default interior margin, as a fraction of each coordinate range.
pub const DEFAULT_MARGIN: f64 = 1e-3;

/// One coordinate chart: a box of open intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub name: String,
    pub ranges: Vec<(f64, f64)>,
    /// Periodic coordinates are wrapped into their range and carry no
    /// boundary singularity, so the interior margin does not apply to them.
    pub periodic: Vec<bool>,
    /// Fraction of each range kept clear of the chart boundary by pointwise
    /// evaluation.
    pub margin: f64,
}

impl Chart {
    pub fn new(name: impl Into<String>, ranges: Vec<(f64, f64)>, periodic: Vec<bool>) -> Self {
        Chart { name: name.into(), ranges, periodic, margin: DEFAULT_MARGIN }
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.ranges.iter().map(|(a, b)| b - a)
    }

    pub fn coordinate_volume(&self) -> f64 {
        self.lengths().product()
    }

    pub fn is_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.ranges).zip(&self.periodic).all(|((&v, &(a, b)), &per)| {
                if per {
                    v.is_finite()
                } else {
                    let m = self.margin * (b - a);
                    v >= a + m && v <= b - m
                }
            })
    }

    /// Wraps periodic coordinates back into their range.
    pub fn wrap(&self, x: &mut [f64]) {
        for ((v, &(a, b)), &per) in x.iter_mut().zip(&self.ranges).zip(&self.periodic) {
            if per {
                let len = b - a;
                *v = a + (*v - a).rem_euclid(len);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionHint {
    pub charts: (usize, usize),
    pub overlap: String,
}

/// A finite atlas whose charts tile the manifold up to measure zero.
///
/// Orientation is the one induced by the coordinate order of each chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartAtlas {
    dim: usize,
    charts: Vec<Chart>,
    pub transitions: Vec<TransitionHint>,
}

impl ChartAtlas {
    pub fn new(dim: usize, charts: Vec<Chart>) -> Result<Self> {
        if charts.is_empty() {
            return Err(Error::Argument("atlas needs at least one chart".into()));
        }
        for (i, c) in charts.iter().enumerate() {
            if c.dim() != dim || c.periodic.len() != dim {
                return Err(Error::Argument(format!(
                    "chart {i} ({}) has dimension {} but the manifold has dimension {dim}",
                    c.name,
                    c.dim()
                )));
            }
            if c.ranges.iter().any(|&(a, b)| !(a.is_finite() && b.is_finite() && b > a)) {
                return Err(Error::Argument(format!("chart {i} ({}) has an empty or infinite range", c.name)));
            }
            if !(c.margin > 0.0 && c.margin < 0.5) {
                return Err(Error::Argument(format!("chart {i} ({}) needs a margin in (0, 1/2)", c.name)));
            }
        }
        Ok(ChartAtlas { dim, charts, transitions: Vec::new() })
    }

    pub fn single(name: &str, ranges: Vec<(f64, f64)>, periodic: Vec<bool>) -> Self {
        let dim = ranges.len();
        ChartAtlas::new(dim, vec![Chart::new(name, ranges, periodic)]).expect("valid single chart")
    }

    /// The zero-dimensional manifold.
    pub fn point() -> Self {
        ChartAtlas::single("point", Vec::new(), Vec::new())
    }

    pub fn circle() -> Self {
        ChartAtlas::single("theta", vec![(0.0, 2.0 * PI)], vec![true])
    }

    /// `(theta, phi)` on `(0, pi) x (0, 2 pi)`.
    pub fn sphere2() -> Self {
        ChartAtlas::single("polar", vec![(0.0, PI), (0.0, 2.0 * PI)], vec![false, true])
    }

    /// Euler angles `(theta, phi, psi)` on `(0, pi) x (0, 2 pi) x (0, 4 pi)`.
    pub fn euler3() -> Self {
        ChartAtlas::single("euler", vec![(0.0, PI), (0.0, 2.0 * PI), (0.0, 4.0 * PI)], vec![false, true, true])
    }

    /// Hyperspherical angles `(chi_1, ..., chi_{n-1}, phi)`.
    pub fn hyperspherical(n: usize) -> Self {
        let mut ranges = vec![(0.0, PI); n - 1];
        ranges.push((0.0, 2.0 * PI));
        let mut periodic = vec![false; n - 1];
        periodic.push(true);
        ChartAtlas::single("hyperspherical", ranges, periodic)
    }

    pub fn cube(d: usize) -> Self {
        ChartAtlas::single("cube", vec![(0.0, 1.0); d], vec![false; d])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, i: usize) -> Result<&Chart> {
        self.charts
            .get(i)
            .ok_or_else(|| Error::Argument(format!("chart {i} not in atlas of {} charts", self.charts.len())))
    }

    pub fn check_interior(&self, chart: usize, x: &[f64]) -> Result<()> {
        if self.chart(chart)?.is_interior(x) {
            Ok(())
        } else {
            Err(Error::Domain { chart, point: x.to_vec() })
        }
    }

    /// Product atlas, first factor's coordinates first. Only single-chart
    /// factors are supported.
    pub fn product(&self, other: &ChartAtlas) -> Result<ChartAtlas> {
        if self.charts.len() != 1 || other.charts.len() != 1 {
            return Err(Error::Argument("product atlases need single-chart factors".into()));
        }
        let (a, b) = (&self.charts[0], &other.charts[0]);
        let mut c = Chart::new(
            format!("{}x{}", a.name, b.name),
            a.ranges.iter().chain(&b.ranges).copied().collect(),
            a.periodic.iter().chain(&b.periodic).copied().collect(),
        );
        c.margin = a.margin.min(b.margin);
        ChartAtlas::new(self.dim + other.dim, vec![c])
    }
}
