//! Metrics and circle actions addressable by string id.
//!
//! Metric ids: `euclidean?d=N`, `round-sN` (N = 1..5, optional `radius`),
//! `su2`, `perturbed?d=N&seed=K`, `squashed-t11?t=T`.
//! Action ids: `trivial`, `hopf` (round `S^3`), `psi-rotation` (squashed
//! family).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Euclidean, MetricField, PerturbedEuclidean, RoundSphere, Su2BiInvariant};
use crate::ids::CatalogId;
use crate::loops::{CircleAction, SquashedMetricFamily};

pub const METRICS: &[&str] = &["euclidean?d=N", "round-sN?radius=R", "su2", "perturbed?d=N&seed=K", "squashed-t11?t=T"];
pub const ACTIONS: &[&str] = &["trivial", "hopf", "psi-rotation"];

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

/// Keys each metric family reads, so that callers can forward them.
pub fn metric_keys(name: &str) -> &'static [&'static str] {
    match name {
        "euclidean" => &["d"],
        "perturbed" => &["d", "seed"],
        "squashed-t11" => &["t"],
        n if n.starts_with("round-s") => &["radius"],
        _ => &[],
    }
}

pub fn metric(id: &CatalogId) -> Result<Arc<dyn MetricField>> {
    id.only(metric_keys(&id.name))?;
    let m: Arc<dyn MetricField> = match id.name.as_str() {
        "euclidean" => {
            let d: usize = id.get_parsed("d")?.ok_or_else(|| invalid("euclidean needs d"))?;
            if d == 0 || d >= crate::jet::MAX_VARS {
                return Err(invalid(format!("euclidean dimension must be 1..{}", crate::jet::MAX_VARS - 1)));
            }
            Arc::new(Euclidean::new(d))
        }
        "perturbed" => {
            let d: usize = id.get_parsed("d")?.ok_or_else(|| invalid("perturbed needs d"))?;
            if d == 0 || d >= crate::jet::MAX_VARS {
                return Err(invalid(format!("perturbed dimension must be 1..{}", crate::jet::MAX_VARS - 1)));
            }
            Arc::new(PerturbedEuclidean::new(d, id.get_or("seed", 0u64)?))
        }
        "su2" => Arc::new(Su2BiInvariant::default()),
        "squashed-t11" => {
            let t: f64 = id.get_parsed("t")?.ok_or_else(|| invalid("squashed-t11 needs t"))?;
            Arc::new(SquashedMetricFamily::new(t).map_err(|e| invalid(e.to_string()))?)
        }
        name => {
            let n: usize = name
                .strip_prefix("round-s")
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| invalid(format!("unknown metric `{name}`; known: {}", METRICS.join(", "))))?;
            let radius: f64 = id.get_or("radius", 1.0)?;
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(invalid(format!("radius must be positive, got {radius}")));
            }
            Arc::new(RoundSphere::new(n, radius).map_err(|e| invalid(e.to_string()))?)
        }
    };
    Ok(m)
}

pub fn metric_from_str(s: &str) -> Result<Arc<dyn MetricField>> {
    metric(&CatalogId::parse(s)?)
}

/// The action named `name` on `metric`'s manifold; `None` picks the
/// natural one (Hopf on `S^3`, fiber rotation on the squashed family).
pub fn action(name: Option<&str>, metric: &dyn MetricField) -> Result<CircleAction> {
    let mid = CatalogId::parse(&metric.id())?;
    let name = match name {
        Some(n) => n,
        None => match mid.name.as_str() {
            "round-s3" | "su2" => "hopf",
            "squashed-t11" => "psi-rotation",
            _ => return Err(invalid(format!("no default circle action on `{}`; name one of {}", mid.name, ACTIONS.join(", ")))),
        },
    };
    match name {
        "trivial" => Ok(CircleAction::trivial(metric.atlas().clone())),
        "hopf" if mid.name == "round-s3" || mid.name == "su2" => Ok(CircleAction::hopf()),
        "psi-rotation" if mid.name == "squashed-t11" => Ok(CircleAction::psi_rotation()),
        "hopf" | "psi-rotation" => Err(invalid(format!("action `{name}` does not act on `{}`", mid.name))),
        _ => Err(invalid(format!("unknown action `{name}`; known: {}", ACTIONS.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_catalog_members() {
        assert_eq!(metric_from_str("round-s2").unwrap().dim(), 2);
        assert_eq!(metric_from_str("round-s5").unwrap().dim(), 5);
        assert_eq!(metric_from_str("squashed-t11?t=0.5").unwrap().id(), "squashed-t11?t=0.5");
        assert_eq!(metric_from_str("euclidean?d=3").unwrap().dim(), 3);
        assert!(metric_from_str("squashed-t11?t=0").is_err());
        assert!(metric_from_str("round-s9").is_err());
        assert!(metric_from_str("round-s2?t=1").is_err());
        assert!(metric_from_str("torus").is_err());
    }

    #[test]
    fn default_actions() {
        let s3 = metric_from_str("round-s3").unwrap();
        assert_eq!(action(None, s3.as_ref()).unwrap().id(), "hopf");
        let sq = metric_from_str("squashed-t11?t=0.5").unwrap();
        assert_eq!(action(None, sq.as_ref()).unwrap().id(), "psi-rotation");
        assert!(action(Some("hopf"), sq.as_ref()).is_err());
        assert!(action(None, metric_from_str("round-s2").unwrap().as_ref()).is_err());
    }
}
