//! Charted manifolds, metrics and their curvature.

pub mod atlas;
pub mod curvature;
pub mod metric;

pub use atlas::{Chart, ChartAtlas, TransitionHint};
pub use curvature::{christoffel, riemann_curvature, Christoffel, CurvatureSample};
pub use metric::{
    metric_at, metric_jet, volume_density, Euclidean, MetricField, MetricJet, PerturbedEuclidean, RoundSphere,
    ScaledMetric, Su2BiInvariant,
};

pub(crate) use curvature::{curvature_unchecked, derive as christoffel_derivatives};
