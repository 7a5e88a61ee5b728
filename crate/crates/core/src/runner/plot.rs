use std::fmt::Write as _;

use super::report::ExperimentReport;
use crate::error::{arg, Result};

/// Comma-separated table `axis, value, std_error, level_0, level_1, ..` with
/// one row per report. All reports must come from one experiment and agree
/// on every parameter except `axis`.
pub fn emit_plot_data(reports: &[ExperimentReport], axis: &str) -> Result<String> {
    let Some(first) = reports.first() else {
        return arg("no reports to tabulate");
    };
    for r in reports {
        if r.experiment != first.experiment {
            return arg(format!("mixed experiments `{}` and `{}`", first.experiment, r.experiment));
        }
        if !r.params.contains_key(axis) {
            return arg(format!("report `{}` has no parameter `{axis}`", r.id));
        }
        let strip = |p: &std::collections::BTreeMap<String, String>| {
            p.iter().filter(|(k, _)| k.as_str() != axis).map(|(k, v)| (k.clone(), v.clone())).collect::<Vec<_>>()
        };
        if strip(&r.params) != strip(&first.params) {
            return arg(format!("reports `{}` and `{}` differ in more than `{axis}`", first.id, r.id));
        }
        if r.primary().map(|v| &v.name) != first.primary().map(|v| &v.name) {
            return arg("reports carry different primary values");
        }
    }
    let levels = reports.iter().map(|r| r.convergence.len()).max().unwrap_or(0);
    let mut s = format!("{axis},value,std_error");
    for l in 0..levels {
        let _ = write!(s, ",level_{l}");
    }
    s.push('\n');
    for r in reports {
        let p = r.primary();
        let _ = write!(
            s,
            "{},{},{}",
            r.params[axis],
            p.map_or(String::new(), |v| v.value.to_string()),
            p.and_then(|v| v.std_error).map_or(String::new(), |e| e.to_string())
        );
        for l in 0..levels {
            let _ = write!(s, ",{}", r.convergence.get(l).map_or(String::new(), |c| c.value.to_string()));
        }
        s.push('\n');
    }
    Ok(s)
}
