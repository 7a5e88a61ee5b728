use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueField {
    pub name: String,
    pub value: f64,
    pub std_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceEntry {
    pub level: usize,
    pub resolution: String,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `|value| < bound`
    Below,
    /// `|value| > bound`
    Above,
    /// `|value - target| <= bound`
    Near,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub value: f64,
    pub target: Option<f64>,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, kind: CheckKind, value: f64, target: Option<f64>, bound: f64) -> Self {
        let mut c = Check { name: name.into(), kind, value, target, bound, passed: false };
        c.evaluate();
        c
    }

    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check::new(name, CheckKind::Below, value, None, bound)
    }

    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check::new(name, CheckKind::Above, value, None, bound)
    }

    pub fn near(name: impl Into<String>, value: f64, target: f64, bound: f64) -> Self {
        Check::new(name, CheckKind::Near, value, Some(target), bound)
    }

    pub fn evaluate(&mut self) {
        self.passed = match self.kind {
            CheckKind::Below => self.value.abs() < self.bound,
            CheckKind::Above => self.value.abs() > self.bound,
            CheckKind::Near => (self.value - self.target.unwrap_or(0.0)).abs() <= self.bound,
        };
    }

    fn describe(&self) -> String {
        match self.kind {
            CheckKind::Below => format!("|{}| < {:e}", fmt_num(self.value), self.bound),
            CheckKind::Above => format!("|{}| > {:e}", fmt_num(self.value), self.bound),
            CheckKind::Near => format!("{} = {} +- {:e}", fmt_num(self.value), fmt_num(self.target.unwrap_or(0.0)), self.bound),
        }
    }
}

/// Outcome of comparing one report field against a golden value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenOutcome {
    pub field: String,
    pub value: Option<f64>,
    pub expected: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub id: String,
    pub experiment: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub engine: String,
    pub values: Vec<ValueField>,
    pub convergence: Vec<ConvergenceEntry>,
    pub truncation_loss: Option<f64>,
    pub checks: Vec<Check>,
    pub golden: Vec<GoldenOutcome>,
    /// Not part of the machine format.
    pub wall_clock: Duration,
}

/// One line of the machine format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Header { id: String, experiment: String, seed: u64, engine: String },
    Param { name: String, value: String },
    Value(ValueField),
    Convergence(ConvergenceEntry),
    TruncationLoss { value: f64 },
    Check(Check),
    Golden(GoldenOutcome),
    Status { passed: bool },
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) {
        format!("{v:.12}").trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.11e}")
    }
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.golden.iter().all(|g| g.passed)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|v| v.name == name).map(|v| v.value)
    }

    /// The first value field.
    pub fn primary(&self) -> Option<&ValueField> {
        self.values.first()
    }

    pub fn records(&self) -> Vec<Record> {
        let mut out = vec![Record::Header {
            id: self.id.clone(),
            experiment: self.experiment.clone(),
            seed: self.seed,
            engine: self.engine.clone(),
        }];
        out.extend(self.params.iter().map(|(k, v)| Record::Param { name: k.clone(), value: v.clone() }));
        out.extend(self.values.iter().cloned().map(Record::Value));
        out.extend(self.convergence.iter().cloned().map(Record::Convergence));
        if let Some(l) = self.truncation_loss {
            out.push(Record::TruncationLoss { value: l });
        }
        out.extend(self.checks.iter().cloned().map(Record::Check));
        out.extend(self.golden.iter().cloned().map(Record::Golden));
        out.push(Record::Status { passed: self.passed() });
        out
    }

    /// Line-delimited JSON records, a pure function of the computation.
    pub fn to_machine(&self) -> String {
        let mut s = String::new();
        for r in self.records() {
            s.push_str(&serde_json::to_string(&r).expect("records serialize"));
            s.push('\n');
        }
        s
    }

    pub fn from_machine(text: &str) -> Result<Self> {
        let mut rep: Option<ExperimentReport> = None;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let r: Record = serde_json::from_str(line).map_err(|e| Error::Parse(format!("report line {}: {e}", i + 1)))?;
            if let Record::Header { id, experiment, seed, engine } = r {
                if rep.is_some() {
                    return Err(Error::Parse("more than one report header".into()));
                }
                rep = Some(ExperimentReport {
                    id,
                    experiment,
                    params: BTreeMap::new(),
                    seed,
                    engine,
                    values: vec![],
                    convergence: vec![],
                    truncation_loss: None,
                    checks: vec![],
                    golden: vec![],
                    wall_clock: Duration::ZERO,
                });
                continue;
            }
            let rp = rep.as_mut().ok_or_else(|| Error::Parse("report does not start with a header".into()))?;
            match r {
                Record::Header { .. } => unreachable!(),
                Record::Param { name, value } => {
                    rp.params.insert(name, value);
                }
                Record::Value(v) => rp.values.push(v),
                Record::Convergence(c) => rp.convergence.push(c),
                Record::TruncationLoss { value } => rp.truncation_loss = Some(value),
                Record::Check(c) => rp.checks.push(c),
                Record::Golden(g) => rp.golden.push(g),
                Record::Status { .. } => {}
            }
        }
        rep.ok_or_else(|| Error::Parse("empty report".into()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment  {}", self.id);
        let _ = writeln!(s, "engine      cwcs {}   seed {}   wall-clock {:.3} s", self.engine, self.seed, self.wall_clock.as_secs_f64());
        for (k, v) in &self.params {
            let _ = writeln!(s, "  {k:<14} {v}");
        }
        s.push('\n');
        for v in &self.values {
            match v.std_error {
                Some(e) => {
                    let _ = writeln!(s, "  {:<24} {}  (std error {:e})", v.name, fmt_num(v.value), e);
                }
                None => {
                    let _ = writeln!(s, "  {:<24} {}", v.name, fmt_num(v.value));
                }
            }
        }
        if !self.convergence.is_empty() {
            let _ = writeln!(s, "\n  convergence");
            for c in &self.convergence {
                let _ = writeln!(s, "    level {}  {:<22} {}", c.level, c.resolution, fmt_num(c.value));
            }
        }
        if let Some(l) = self.truncation_loss {
            let _ = writeln!(s, "\n  truncation loss {l:e}");
        }
        s.push('\n');
        for c in &self.checks {
            let _ = writeln!(s, "  [{}] {:<28} {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.describe());
        }
        for g in &self.golden {
            let got = g.value.map_or("missing".to_string(), fmt_num);
            let _ = writeln!(
                s,
                "  [{}] golden {:<21} {} vs {} (abs {:e}, rel {:e})",
                if g.passed { "pass" } else { "FAIL" },
                g.field,
                got,
                fmt_num(g.expected),
                g.abs_tol,
                g.rel_tol
            );
        }
        let _ = writeln!(s, "\nstatus      {}", if self.passed() { "pass" } else { "FAIL" });
        s
    }
}
