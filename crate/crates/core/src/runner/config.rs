//! Experiment configuration files.
//!
//! One `key = value` pair per line; `#` starts a comment. Values are
//! strings (optionally double-quoted), reals, integers or booleans
//! (`true` / `false`). Keys:
//!
//! | key | value |
//! |---|---|
//! | `experiment` | catalog id, e.g. `wcs?metric=round-s3&k=2` (required) |
//! | `seed` | integer, default 0 |
//! | `quadrature` | `gauss:N` or `mc:SAMPLES` |
//! | `loop_nodes`, `refine`, `symmetry` | loop grid, refinement pass, symmetry reduction |
//! | `out`, `golden` | report directory, golden file |
//! | `tol.NAME` | bound override for the check `NAME` |
//! | `sweep.axis`, `sweep.values` | parameter and comma-separated values for `sweep` |
//! | any experiment parameter | merged into the experiment id |
//!
//! Any other key is rejected.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::forms::{QuadratureSpec, Scheme};
use crate::ids::CatalogId;

/// Parameters that may be written as top-level keys instead of inside the
/// experiment id.
pub const PARAM_KEYS: &[&str] = &[
    "metric", "action", "k", "s", "t", "n", "d", "radius", "depth", "cutoff", "pairs", "probes", "algebra", "group",
    "variant", "base", "perturb", "direction",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: CatalogId,
    pub seed: u64,
    pub quadrature: Option<QuadratureSpec>,
    pub loop_nodes: Option<usize>,
    pub refine: Option<bool>,
    pub symmetry: Option<bool>,
    pub out: Option<PathBuf>,
    pub golden: Option<PathBuf>,
    pub tolerances: BTreeMap<String, f64>,
    pub sweep_axis: Option<String>,
    pub sweep_values: Vec<String>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(v)
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| invalid(format!("`{key}` expects a number, got `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(invalid(format!("`{key}` expects true or false, got `{v}`"))),
    }
}

/// `gauss:N` or `mc:SAMPLES`; Monte-Carlo takes the run seed.
pub fn parse_quadrature(v: &str, seed: u64) -> Result<QuadratureSpec> {
    let (scheme, n) = v.split_once(':').ok_or_else(|| invalid(format!("quadrature `{v}`: expected gauss:N or mc:SAMPLES")))?;
    let n: usize = parse_num("quadrature", n)?;
    let q = match scheme {
        "gauss" => QuadratureSpec::gauss(n),
        "mc" => QuadratureSpec::monte_carlo(n, seed),
        _ => return Err(invalid(format!("unknown quadrature scheme `{scheme}`"))),
    };
    q.validate()?;
    Ok(q)
}

pub fn quadrature_label(q: &QuadratureSpec) -> String {
    match q.scheme {
        Scheme::GaussLegendre { nodes } => format!("gauss:{nodes}"),
        Scheme::MonteCarlo { samples, .. } => format!("mc:{samples}"),
    }
}

impl ExperimentConfig {
    /// A config with defaults around an experiment id.
    pub fn for_id(id: &str) -> Result<Self> {
        Ok(ExperimentConfig {
            experiment: CatalogId::parse(id)?,
            seed: 0,
            quadrature: None,
            loop_nodes: None,
            refine: None,
            symmetry: None,
            out: None,
            golden: None,
            tolerances: BTreeMap::new(),
            sweep_axis: None,
            sweep_values: Vec::new(),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs: Vec<(String, String, usize)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", ln + 1)))?;
            let (k, v) = (k.trim(), unquote(v.trim()));
            if k.is_empty() {
                return Err(Error::Parse(format!("line {}: empty key", ln + 1)));
            }
            if pairs.iter().any(|(pk, _, _)| pk == k) {
                return Err(invalid(format!("line {}: duplicate key `{k}`", ln + 1)));
            }
            pairs.push((k.to_string(), v.to_string(), ln + 1));
        }
        let experiment = pairs
            .iter()
            .find(|(k, _, _)| k == "experiment")
            .map(|(_, v, _)| v.clone())
            .ok_or_else(|| invalid("missing required key `experiment`"))?;
        let mut cfg = ExperimentConfig::for_id(&experiment)?;
        if let Some((_, v, _)) = pairs.iter().find(|(k, _, _)| k == "seed") {
            cfg.seed = parse_num("seed", v)?;
        }
        for (k, v, ln) in &pairs {
            match k.as_str() {
                "experiment" | "seed" => {}
                "quadrature" => cfg.quadrature = Some(parse_quadrature(v, cfg.seed)?),
                "loop_nodes" => cfg.loop_nodes = Some(parse_num(k, v)?),
                "refine" => cfg.refine = Some(parse_bool(k, v)?),
                "symmetry" => cfg.symmetry = Some(parse_bool(k, v)?),
                "out" => cfg.out = Some(PathBuf::from(v)),
                "golden" => cfg.golden = Some(PathBuf::from(v)),
                "sweep.axis" => cfg.sweep_axis = Some(v.clone()),
                "sweep.values" => {
                    cfg.sweep_values = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
                }
                _ if k.starts_with("tol.") && k.len() > 4 => {
                    cfg.tolerances.insert(k[4..].to_string(), parse_num(k, v)?);
                }
                _ if PARAM_KEYS.contains(&k.as_str()) => cfg.set_param(k, v)?,
                _ => return Err(invalid(format!("line {ln}: unknown key `{k}`"))),
            }
        }
        Ok(cfg)
    }

    /// Sets an experiment parameter; conflicting with the id is an error.
    pub fn set_param(&mut self, k: &str, v: &str) -> Result<()> {
        match self.experiment.params.get(k) {
            Some(old) if old != v => Err(invalid(format!("`{k}` given as `{v}` but the experiment id says `{old}`"))),
            _ => {
                self.experiment.params.insert(k.to_string(), v.to_string());
                Ok(())
            }
        }
    }

    /// Replaces the seed, including the one carried by Monte-Carlo quadrature.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let Some(QuadratureSpec { scheme: Scheme::MonteCarlo { samples, .. } }) = self.quadrature {
            self.quadrature = Some(QuadratureSpec::monte_carlo(samples, seed));
        }
    }

    /// The same config with one parameter replaced.
    pub fn with_param(&self, k: &str, v: &str) -> Self {
        let mut c = self.clone();
        c.experiment.params.insert(k.to_string(), v.to_string());
        c
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentConfig::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let c = ExperimentConfig::parse(
            "# WCS on the squashed family\nexperiment = \"wcs?metric=squashed-t11\"\nt = 0.5\nk = 3\nseed = 7\nquadrature = gauss:12\nrefine = false\ntol.stability = 0.02\n",
        )
        .unwrap();
        assert_eq!(c.experiment.to_string(), "wcs?k=3&metric=squashed-t11&t=0.5");
        assert_eq!(c.seed, 7);
        assert_eq!(c.quadrature, Some(QuadratureSpec::gauss(12)));
        assert_eq!(c.refine, Some(false));
        assert_eq!(c.tolerances["stability"], 0.02);
    }

    #[test]
    fn rejects_unknown_and_conflicting_keys() {
        assert!(matches!(ExperimentConfig::parse("experiment = wcs\nbogus = 1"), Err(Error::Validation(_))));
        assert!(ExperimentConfig::parse("experiment = wcs?k=2\nk = 3").is_err());
        assert!(ExperimentConfig::parse("k = 3").is_err());
        assert!(ExperimentConfig::parse("experiment = wcs\nexperiment = wcs").is_err());
        assert!(ExperimentConfig::parse("experiment = wcs\nrefine = yes").is_err());
        assert!(ExperimentConfig::parse("experiment = wcs\nquadrature = gauss:1").is_err());
        assert!(ExperimentConfig::parse("experiment wcs").is_err());
    }

    #[test]
    fn monte_carlo_takes_the_seed_whatever_the_key_order() {
        let c = ExperimentConfig::parse("quadrature = mc:5000\nexperiment = chern\nseed = 9").unwrap();
        assert_eq!(c.quadrature, Some(QuadratureSpec::monte_carlo(5000, 9)));
    }
}
