//! The experiment catalog. Each experiment validates its parameters up
//! front, then runs as a pure function of (config, engine version).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{quadrature_label, ExperimentConfig};
use super::report::{Check, ConvergenceEntry, ValueField};
use crate::catalog;
use crate::charclasses::{
    bismut_vertical_char_form, char_form, fiber_integration, mc_generator_form, relative_cs_form,
    su2_generator_integral_reference, trace_power_form, CompactGroup, ConnectionField, InvariantPolynomial,
    JetConnection, LeviCivita, MaurerCartanConnection, ProductFibration, TraceKind,
};
use crate::error::{Error, Result};
use crate::forms::{exterior_derivative_numeric, integrate_reduced, FormField, Integral, Orientation, QuadratureSpec};
use crate::geometry::ChartAtlas;
use crate::ids::CatalogId;
use crate::loops::{
    alpha_homomorphism_residual, hs_curvature, wcs_integral, ActionKind, AlphaVariant, LieAlgebra, LoopAlgebraElement,
    WcsOptions,
};
use crate::symbols::{
    leading_order_trace, power_symbol, wodzicki_residue, DirectionWeights, SymbolExpansion, DEFAULT_CUTOFF,
    DEFAULT_DEPTH,
};

/// `(name, parameters)` for every experiment.
pub const EXPERIMENTS: &[(&str, &str)] = &[
    ("gauss-bonnet", "metric=round-s2 [radius]"),
    ("chern", "n [perturb]"),
    ("chern-independence", "n [perturb]"),
    ("transgression", "base=s2|su2|cube4 k probes"),
    ("mc-generator", "group=su2|so3|u1 k"),
    ("symbol-inverse", "s depth cutoff"),
    ("power-residue", "s depth cutoff"),
    ("traces", "pairs depth cutoff"),
    ("hs-curvature", "algebra=u1|su2 s pairs depth cutoff"),
    ("alpha", "algebra variant=iterated|single pairs depth cutoff"),
    ("wcs", "metric [t|radius] [action] k"),
    ("fit", "n probes"),
];

/// What a finished experiment hands back to the runner.
#[derive(Debug, Default)]
pub struct Outcome {
    pub values: Vec<ValueField>,
    pub convergence: Vec<ConvergenceEntry>,
    pub truncation_loss: Option<f64>,
    pub checks: Vec<Check>,
}

impl Outcome {
    fn value(&mut self, name: &str, value: f64) {
        self.values.push(ValueField { name: name.into(), value, std_error: None });
    }

    fn integral(&mut self, name: &str, i: &Integral) {
        self.values.push(ValueField { name: name.into(), value: i.value.re, std_error: i.std_error });
    }
}

pub type Job = Box<dyn FnOnce() -> Result<Outcome> + Send>;

/// A validated experiment ready to run.
pub struct Prepared {
    pub id: CatalogId,
    pub params: BTreeMap<String, String>,
    pub check_names: Vec<String>,
    pub job: Job,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

/// Reads parameters, recording the resolved value of each.
struct Params<'a> {
    id: &'a CatalogId,
    resolved: BTreeMap<String, String>,
}

impl<'a> Params<'a> {
    fn new(id: &'a CatalogId, allowed: &[&str]) -> Result<Self> {
        id.only(allowed)?;
        Ok(Params { id, resolved: BTreeMap::new() })
    }

    fn get<T: FromStr + ToString>(&mut self, key: &str, default: T) -> Result<T> {
        let v = match self.id.get(key) {
            Some(s) => s.parse::<T>().map_err(|_| invalid(format!("bad value `{s}` for `{key}`")))?,
            None => default,
        };
        self.resolved.insert(key.into(), v.to_string());
        Ok(v)
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        let v = self.id.get(key).unwrap_or(default).to_string();
        self.resolved.insert(key.into(), v.clone());
        v
    }

    fn set(&mut self, key: &str, v: impl ToString) {
        self.resolved.insert(key.into(), v.to_string());
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(invalid(msg))
    }
}

fn quadrature(cfg: &ExperimentConfig, p: &mut Params, dim: usize) -> Result<QuadratureSpec> {
    let q = cfg.quadrature.unwrap_or_else(|| QuadratureSpec::default_for_dim(dim));
    q.validate()?;
    p.set("quadrature", quadrature_label(&q));
    Ok(q)
}

fn symbol_sizes(p: &mut Params) -> Result<(usize, usize)> {
    let depth: i64 = p.get("depth", DEFAULT_DEPTH as i64)?;
    ensure(depth >= 0, format!("depth must be >= 0, got {depth}"))?;
    ensure(depth <= 24, format!("depth must be <= 24, got {depth}"))?;
    let cutoff: i64 = p.get("cutoff", DEFAULT_CUTOFF as i64)?;
    ensure((1..=256).contains(&cutoff), format!("cutoff must lie in 1..=256, got {cutoff}"))?;
    Ok((depth as usize, cutoff as usize))
}

fn count(p: &mut Params, key: &str, default: usize) -> Result<usize> {
    let n: i64 = p.get(key, default as i64)?;
    ensure((1..=10_000).contains(&n), format!("`{key}` must lie in 1..=10000, got {n}"))?;
    Ok(n as usize)
}

fn interior_points(atlas: &ChartAtlas, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let ranges = &atlas.charts()[0].ranges;
    (0..n).map(|_| ranges.iter().map(|&(a, b)| a + (b - a) * rng.random_range(0.05..0.95)).collect()).collect()
}

fn random_vectors(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<DVector<f64>> {
    (0..count).map(|_| DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))).collect()
}

fn integral_levels(
    out: &mut Outcome,
    name: &str,
    q: &QuadratureSpec,
    f: impl Fn(&QuadratureSpec) -> Result<Integral>,
) -> Result<Integral> {
    let i0 = f(q)?;
    let q1 = q.refined();
    let i1 = f(&q1)?;
    out.integral(name, &i0);
    out.convergence.push(ConvergenceEntry { level: 0, resolution: quadrature_label(q), value: i0.value.re });
    out.convergence.push(ConvergenceEntry { level: 1, resolution: quadrature_label(&q1), value: i1.value.re });
    Ok(i0)
}

/// Validates `cfg` and returns the runnable experiment.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    let id = cfg.experiment.clone();
    let (params, checks, job) = match id.name.as_str() {
        "gauss-bonnet" => gauss_bonnet(cfg)?,
        "chern" => chern(cfg)?,
        "chern-independence" => chern_independence(cfg)?,
        "transgression" => transgression(cfg)?,
        "mc-generator" => mc_generator(cfg)?,
        "symbol-inverse" => symbol_inverse(cfg)?,
        "power-residue" => power_residue(cfg)?,
        "traces" => traces(cfg)?,
        "hs-curvature" => hs_curvature_exp(cfg)?,
        "alpha" => alpha(cfg)?,
        "wcs" => wcs(cfg)?,
        "fit" => fit(cfg)?,
        other => {
            return Err(Error::UnknownExperiment {
                id: other.to_string(),
                known: EXPERIMENTS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", "),
            })
        }
    };
    for k in cfg.tolerances.keys() {
        if !checks.contains(k) {
            return Err(invalid(format!("tolerance override for unknown check `{k}` (checks: {})", checks.join(", "))));
        }
    }
    Ok(Prepared { id, params, check_names: checks, job })
}

type Parts = (BTreeMap<String, String>, Vec<String>, Job);

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn gauss_bonnet(cfg: &ExperimentConfig) -> Result<Parts> {
    let mut p = Params::new(&cfg.experiment, &["metric", "radius"])?;
    let name = p.string("metric", "round-s2");
    ensure(name == "round-s2", "gauss-bonnet runs on round-s2")?;
    let mut mid = CatalogId::parse(&name)?;
    if let Some(r) = cfg.experiment.get("radius") {
        mid.params.insert("radius".into(), r.into());
        p.set("radius", r);
    }
    let metric = catalog::metric(&mid)?;
    let q = quadrature(cfg, &mut p, 2)?;
    let job: Job = Box::new(move || {
        let lc: Arc<dyn ConnectionField> = Arc::new(LeviCivita::new(metric.clone()));
        let e = char_form(lc, &InvariantPolynomial::euler(2))?;
        let mut out = Outcome::default();
        let i = integral_levels(&mut out, "euler_characteristic", &q, |q| {
            integrate_reduced(&e, metric.atlas(), &Orientation::standard(2), q, &[])
        })?;
        out.checks.push(Check::near("euler_characteristic", i.value.re, 2.0, 1e-6));
        Ok(out)
    });
    Ok((p.resolved, names(&["euler_characteristic"]), job))
}

fn charge(p: &mut Params) -> Result<i64> {
    let n: i64 = p.get("n", 1)?;
    ensure(n != 0 && n.abs() <= 16, format!("monopole charge must be nonzero with |n| <= 16, got {n}"))?;
    Ok(n)
}

fn perturbation(p: &mut Params, default: f64) -> Result<f64> {
    let a: f64 = p.get("perturb", default)?;
    ensure((0.0..=2.0).contains(&a), format!("perturb must lie in [0, 2], got {a}"))?;
    Ok(a)
}

fn monopole(n: i64, seed: u64, amp: f64) -> Arc<dyn ConnectionField> {
    if amp == 0.0 {
        Arc::new(JetConnection::monopole(n))
    } else {
        Arc::new(JetConnection::perturbed_monopole(n, seed, amp))
    }
}

fn s2_integral(f: &FormField, q: &QuadratureSpec) -> Result<Integral> {
    integrate_reduced(f, &ChartAtlas::sphere2(), &Orientation::standard(2), q, &[])
}

fn chern(cfg: &ExperimentConfig) -> Result<Parts> {
    let mut p = Params::new(&cfg.experiment, &["n", "perturb"])?;
    let n = charge(&mut p)?;
    let amp = perturbation(&mut p, 0.0)?;
    let q = quadrature(cfg, &mut p, 2)?;
    let seed = cfg.seed;
    let job: Job = Box::new(move || {
        let f = char_form(monopole(n, seed, amp), &InvariantPolynomial::chern(1))?;
        let mut out = Outcome::default();
        let i = integral_levels(&mut out, "chern_number", &q, |q| s2_integral(&f, q))?;
        out.value("imaginary_part", i.value.im);
        out.checks.push(Check::near("chern_number", i.value.re, n as f64, 1e-6));
        Ok(out)
    });
    Ok((p.resolved, names(&["chern_number"]), job))
}

fn chern_independence(cfg: &ExperimentConfig) -> Result<Parts> {
    let mut p = Params::new(&cfg.experiment, &["n", "perturb"])?;
    let n = charge(&mut p)?;
    let amp = perturbation(&mut p, 0.4)?;
    ensure(amp > 0.0, "chern-independence needs perturb > 0")?;
    let q = quadrature(cfg, &mut p, 2)?;
    let seed = cfg.seed;
    let job: Job = Box::new(move || {
        let pc = InvariantPolynomial::chern(1);
        let a = s2_integral(&char_form(monopole(n, 2 * seed + 1, amp), &pc)?, &q)?;
        let b = s2_integral(&char_form(monopole(n, 2 * seed + 2, amp), &pc)?, &q)?;
        let mut out = Outcome::default();
        out.value("difference", (a.value - b.value).norm());
        out.value("chern_number_a", a.value.re);
        out.value("chern_number_b", b.value.re);
        out.checks.push(Check::below("difference", (a.value - b.value).norm(), 1e-6));
        Ok(out)
    });
    Ok((p.resolved, names(&["difference"]), job))
}

fn transgression(cfg: &ExperimentConfig) -> Result<Parts> {
    let mut p = Params::new(&cfg.experiment, &["base", "k", "probes"])?;
    let base = p.string("base", "s2");
    let k: i64 = p.get("k", 1)?;
    let probes = count(&mut p, "probes", 50)?;
    let atlas = match base.as_str() {
        "s2" => ChartAtlas::sphere2(),
        "su2" => CompactGroup::SU2.atlas(),
        "cube4" => ChartAtlas::cube(4),
        _ => return Err(invalid(format!("unknown transgression base `{base}` (s2 | su2 | cube4)"))),
    };
    ensure(k >= 1 && 2 * k as usize <= atlas.dim(), format!("k must satisfy 1 <= 2k <= {} on {base}, got {k}", atlas.dim()))?;
    let k = k as usize;
    let seed = cfg.seed;
    let job: Job = Box::new(move || {
        let conn = |s: u64| -> Result<Arc<dyn ConnectionField>> {
            Ok(match base.as_str() {
                "s2" => Arc::new(JetConnection::ambient_sphere_product(ChartAtlas::sphere2(), s, 0.6)?),
                _ => Arc::new(JetConnection::random_unitary(atlas.clone(), 2, s, 0.6)),
            })
        };
        let (c0, c1) = (conn(2 * seed + 1)?, conn(2 * seed + 2)?);
        let cs = relative_cs_form(c0.clone(), c1.clone(), k, TraceKind::Matrix)?;
        let dcs = exterior_derivative_numeric(&cs, 1e-4)?;
        let rhs = trace_power_form(c1, k, TraceKind::Matrix)?.sub(&trace_power_form(c0, k, TraceKind::Matrix)?)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut worst, mut size) = (0.0f64, 0.0f64);
        for x in interior_points(&atlas, probes, &mut rng) {
            let v = random_vectors(&mut rng, atlas.dim(), 2 * k);
            let r = rhs.eval_scalar(0, &x, &v)?;
            worst = worst.max((dcs.eval_scalar(0, &x, &v)? - r).norm());
            size = size.max(r.norm());
        }
        let mut out = Outcome::default();
        out.value("max_residual", worst);
        out.value("max_char_difference", size);
        out.checks.push(Check::below("max_residual", worst, 1e-5));
        Ok(out)
    });
    Ok((p.resolved, names(&["max_residual"]), job))
}

fn mc_generator(cfg: &ExperimentConfig) -> Result<Parts> {
    let mut p = Params::new(&cfg.experiment, &["group", "k"])?;
    let group: CompactGroup = p.string("group", "su2").parse().map_err(|e: Error| invalid(e.to_string()))?;
    let dim = group.dim();
    let k: i64 = p.get("k", (dim as i64 + 1) / 2)?;
    ensure(k >= 1 && 2 * k - 1 == dim as i64, format!("k must satisfy 2k - 1 = {dim} on {group}, got {k}"))?;
    let k = k as usize;
    let q = quadrature(cfg, &mut p, dim)?;
    let job: Job = Box::new(move || {
        let gen = mc_generator_form(group, k)?;
        let atlas = group.atlas();
        let constant: Vec<usize> = if dim == 3 { vec![1, 2] } else { vec![] };
        let orient = Orientation::standard(dim);
        let mut out = Outcome::default();
        let i = integrate_reduced(&gen, &atlas, &orient, &q, &constant)?;
        let i1 = integrate_reduced(&gen, &atlas, &orient, &q.refined(), &constant)?;
        out.value("abs_generator_integral", i.value.norm());
        out.value("generator_re", i.value.re);
        out.value("generator_im", i.value.im);
        out.convergence.push(ConvergenceEntry { level: 0, resolution: quadrature_label(&q), value: i.value.norm() });
        out.convergence.push(ConvergenceEntry { level: 1, resolution: quadrature_label(&q.refined()), value: i1.value.norm() });
        let reference = match group {
            CompactGroup::SU2 => su2_generator_integral_reference(),
            CompactGroup::SO3 => 48.0 * PI * PI,
            CompactGroup::U1 => 2.0 * PI,
        };
        out.checks.push(Check::near("abs_generator_integral", i.value.norm(), reference, 0.005 * reference));
        if group == CompactGroup::SU2 {
            let flat: Arc<dyn ConnectionField> = Arc::new(JetConnection::flat(atlas.clone(), 2));
            let mc: Arc<dyn ConnectionField> = Arc::new(MaurerCartanConnection::new(group));
            let cs = relative_cs_form(flat, mc, 2, TraceKind::Matrix)?;
            let w = integrate_reduced(&cs, &atlas, &orient, &q, &constant)?;
            out.value("abs_cs_integral", w.value.norm());
            out.checks.push(Check::near("three_abs_cs_integral", 3.0 * w.value.norm(), reference, 0.005 * reference));
        }
        Ok(out)
    });
    let mut checks = names(&["abs_generator_integral"]);
    if group == CompactGroup::SU2 {
        checks.push("three_abs_cs_integral".into());
    }
    Ok((p.resolved, checks, job))
}

fn sobolev(p: &mut Params, default: f64) -> Result<f64> {
    let s: f64 = p.get("s", default)?;
    ensure(s.is_finite() && s.abs() <= 16.0, format!("s must be finite with |s| <= 16, got {s}"))?;
    Ok(s)
}

fn symbol_inverse(cfg: &ExperimentConfig) -> Result<Parts> {
    let mut p = Params::new(&cfg.experiment, &["s", "depth", "cutoff"])?;
    let s = sobolev(&mut p, 0.5)?;
    let (depth, cutoff) = symbol_sizes(&mut p)?;
    let job: Job = Box::new(move || {
        let prod = power_symbol(s, 2, cutoff, depth).compose(&power_symbol(-s, 2, cutoff, depth))?;
        let id = SymbolExpansion::identity(2, cutoff, depth);
        let lead = prod.component_at(0.0).map_or(f64::INFINITY, |c0| {
            let d = &id.components()[0];
            (&c0.plus - &d.plus).max_abs().max((&c0.minus - &d.minus).max_abs())
        });
        let rest = prod.components().iter().filter(|c| c.order != 0.0).map(|c| c.norm()).fold(0.0, f64::max);
        let mut out = Outcome::default();
        out.value("max_nonleading", rest);
        out.value("leading_deviation", lead);
        out.truncation_loss = Some(prod.truncation_loss());
        out.checks.push(Check::below("max_nonleading", rest, 1e-10));
        out.checks.push(Check::below("leading_deviation", lead, 1e-12));
        Ok(out)
    });
    Ok((p.resolved, names(&["max_nonleading", "leading_deviation"]), job))
}

fn power_residue(cfg: &ExperimentConfig) -> Result<Parts> {
    let mut p = Params::new(&cfg.experiment, &["s", "depth", "cutoff"])?;
    let s = sobolev(&mut p, -0.5)?;
    let (depth, cutoff) = symbol_sizes(&mut p)?;
    let job: Job = Box::new(move || {
        let r = wodzicki_residue(&power_symbol(s, 1, cutoff, depth));
        let mut out = Outcome::default();
        out.value("residue_re", r.value.re);
        out.value("residue_im", r.value.im);
        out.value("unresolved", if r.truncated { 1.0 } else { 0.0 });
        Ok(out)
    });
    Ok((p.resolved, vec![], job))
}

fn traces(cfg: &ExperimentConfig) -> Result<Parts> {
    let mut p = Params::new(&cfg.experiment, &["pairs", "depth", "cutoff"])?;
    let pairs = count(&mut p, "pairs", 50)?;
    let (depth, cutoff) = symbol_sizes(&mut p)?;
    let seed = cfg.seed;
    let job: Job = Box::new(move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut res, mut lo, mut lo_w, mut loss) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let max_mode = 3.min(cutoff);
        for i in 0..pairs as u64 {
            let a = SymbolExpansion::random(0.0, 2, cutoff, depth, max_mode, seed.wrapping_mul(1_000_003).wrapping_add(2 * i));
            let b = SymbolExpansion::random(0.0, 2, cutoff, depth, max_mode, seed.wrapping_mul(1_000_003).wrapping_add(2 * i + 1));
            let comm = a.commutator(&b)?;
            loss = loss.max(comm.truncation_loss());
            res = res.max(wodzicki_residue(&comm).value.norm());
            lo = lo.max(leading_order_trace(&comm, None)?.value.norm());
            let mut w = || -> Vec<(i64, Complex64)> {
                (-2..=2).map(|k| (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).collect()
            };
            let weights = DirectionWeights { plus: w(), minus: w() };
            lo_w = lo_w.max(leading_order_trace(&comm, Some(&weights))?.value.norm());
        }
        let mut out = Outcome::default();
        out.value("max_residue_commutator", res);
        out.value("max_lo_trace_commutator", lo);
        out.value("max_weighted_lo_trace_commutator", lo_w);
        out.truncation_loss = Some(loss);
        out.checks.push(Check::below("max_residue_commutator", res, 1e-10));
        out.checks.push(Check::below("max_lo_trace_commutator", lo, 1e-10));
        out.checks.push(Check::below("max_weighted_lo_trace_commutator", lo_w, 1e-10));
        Ok(out)
    });
    Ok((p.resolved, names(&["max_residue_commutator", "max_lo_trace_commutator", "max_weighted_lo_trace_commutator"]), job))
}

fn loop_algebra(p: &mut Params) -> Result<LieAlgebra> {
    p.string("algebra", "su2").parse().map_err(|e: Error| invalid(e.to_string()))
}

fn loop_pair(alg: LieAlgebra, cutoff: usize, seed: u64, i: u64) -> (LoopAlgebraElement, LoopAlgebraElement) {
    let base = seed.wrapping_mul(1_000_003);
    (
        LoopAlgebraElement::random(alg, cutoff, 2, 1.0, base.wrapping_add(2 * i + 1)),
        LoopAlgebraElement::random(alg, cutoff, 2, 1.0, base.wrapping_add(2 * i + 2)),
    )
}

fn order_name(o: usize) -> String {
    if o == 0 {
        "norm_order_0".into()
    } else {
        format!("norm_order_-{o}")
    }
}

fn hs_curvature_exp(cfg: &ExperimentConfig) -> Result<Parts> {
    let mut p = Params::new(&cfg.experiment, &["algebra", "s", "pairs", "depth", "cutoff"])?;
    let alg = loop_algebra(&mut p)?;
    let s = sobolev(&mut p, 2.0)?;
    ensure(s > 0.5, format!("the H^s connection needs s > 1/2, got {s}"))?;
    let pairs = count(&mut p, "pairs", 20)?;
    let (depth, cutoff) = symbol_sizes(&mut p)?;
    ensure(depth >= 2, format!("hs-curvature needs depth >= 2, got {depth}"))?;
    let seed = cfg.seed;
    let abelian = alg == LieAlgebra::U1;
    let checks: Vec<&str> = if abelian || s == 1.0 {
        vec!["all_orders"]
    } else if s > 1.0 {
        vec!["orders_0_and_-1", "min_norm_order_-2"]
    } else {
        vec![]
    };
    let check_names = names(&checks);
    let job: Job = Box::new(move || {
        let mut maxes = vec![0.0f64; depth + 1];
        let (mut min2, mut loss) = (f64::INFINITY, 0.0f64);
        for i in 0..pairs as u64 {
            let (x, y) = loop_pair(alg, cutoff, seed, i);
            let om = hs_curvature(&x, &y, s, depth)?;
            loss = loss.max(om.truncation_loss());
            for (o, m) in maxes.iter_mut().enumerate() {
                *m = m.max(om.component_at(-(o as f64)).map_or(0.0, |c| c.norm()));
            }
            min2 = min2.min(om.component_at(-2.0).map_or(0.0, |c| c.norm()));
        }
        let mut out = Outcome::default();
        for (o, m) in maxes.iter().enumerate() {
            out.value(&order_name(o), *m);
        }
        out.value("min_norm_order_-2", min2);
        out.truncation_loss = Some(loss);
        let all = maxes.iter().cloned().fold(0.0, f64::max);
        for c in &checks {
            out.checks.push(match *c {
                "all_orders" => Check::below("all_orders", all, 1e-8 + loss),
                "orders_0_and_-1" => Check::below("orders_0_and_-1", maxes[0].max(maxes[1]), 1e-8 + loss),
                _ => Check::above("min_norm_order_-2", min2, 1e-3),
            });
        }
        Ok(out)
    });
    Ok((p.resolved, check_names, job))
}

fn alpha(cfg: &ExperimentConfig) -> Result<Parts> {
    let mut p = Params::new(&cfg.experiment, &["algebra", "variant", "pairs", "depth", "cutoff"])?;
    let alg = loop_algebra(&mut p)?;
    let variant = match p.string("variant", "iterated").as_str() {
        "iterated" => AlphaVariant::Iterated,
        "single" => AlphaVariant::Single,
        v => return Err(invalid(format!("unknown alpha variant `{v}` (iterated | single)"))),
    };
    let pairs = count(&mut p, "pairs", 20)?;
    let (depth, cutoff) = symbol_sizes(&mut p)?;
    let seed = cfg.seed;
    let job: Job = Box::new(move || {
        let mut worst = 0.0f64;
        for i in 0..pairs as u64 {
            let (x, y) = loop_pair(alg, cutoff, seed, i);
            worst = worst.max(alpha_homomorphism_residual(&x, &y, depth, variant)?);
        }
        let mut out = Outcome::default();
        out.value("max_residual", worst);
        out.checks.push(Check::below("max_residual", worst, 1e-10));
        Ok(out)
    });
    Ok((p.resolved, names(&["max_residual"]), job))
}

fn wcs(cfg: &ExperimentConfig) -> Result<Parts> {
    let id = &cfg.experiment;
    let metric_name = id.get("metric").ok_or_else(|| invalid("`wcs` needs `metric`"))?;
    let mut mid = CatalogId::parse(metric_name)?;
    let forwarded = catalog::metric_keys(&mid.name);
    for key in forwarded {
        if let Some(v) = id.get(key) {
            mid.params.insert(key.to_string(), v.to_string());
        }
    }
    let mut allowed = vec!["metric", "action", "k"];
    allowed.extend(forwarded.iter().copied());
    let mut p = Params::new(id, &allowed)?;
    p.set("metric", &mid.name);
    for (k, v) in &mid.params {
        p.set(k, v);
    }
    let metric = catalog::metric(&mid)?;
    let d = metric.dim();
    let action = catalog::action(id.get("action"), metric.as_ref())?;
    p.set("action", action.id());
    let k: i64 = p.get("k", (d as i64 + 1) / 2)?;
    ensure(k >= 1, format!("k must be >= 1, got {k}"))?;
    ensure(2 * k - 1 == d as i64, format!("CS^w_{k} integrates over {}-manifolds; `{}` has dimension {d}", 2 * k - 1, mid.name))?;
    let k = k as usize;
    let q = quadrature(cfg, &mut p, d)?;
    let loop_nodes = cfg.loop_nodes.unwrap_or(crate::loops::DEFAULT_LOOP_NODES);
    ensure((1..=4096).contains(&loop_nodes), format!("loop_nodes must lie in 1..=4096, got {loop_nodes}"))?;
    let opts = WcsOptions { loop_nodes, use_symmetry: cfg.symmetry.unwrap_or(true), refine: cfg.refine.unwrap_or(true) };
    p.set("loop_nodes", loop_nodes);
    p.set("refine", opts.refine);
    p.set("symmetry", opts.use_symmetry);
    let claim = match (action.kind(), action.id()) {
        (ActionKind::Trivial, _) => Some("trivial"),
        (_, "hopf") => Some("hopf"),
        (_, "psi-rotation") => Some("squashed"),
        _ => None,
    };
    let check_names = match claim {
        Some("trivial") => names(&["exact_zero"]),
        Some("hopf") => names(&["vanishing"]),
        Some(_) if opts.refine => names(&["nonvanishing", "stability"]),
        Some(_) => names(&["nonvanishing"]),
        None => vec![],
    };
    let job: Job = Box::new(move || {
        let r = wcs_integral(metric.as_ref(), &action, k, &q, &opts)?;
        let mut out = Outcome::default();
        out.values.push(ValueField { name: "integral".into(), value: r.value, std_error: r.std_error });
        if let Some(rc) = r.relative_change {
            out.value("relative_change", rc);
        }
        out.value("loop_reduced", if r.loop_reduced { 1.0 } else { 0.0 });
        for row in &r.convergence {
            out.convergence.push(ConvergenceEntry {
                level: row.level,
                resolution: format!("{}/loop:{}", quadrature_label(&row.quadrature), row.loop_nodes),
                value: row.value,
            });
        }
        match claim {
            Some("trivial") => out.checks.push(Check::near("exact_zero", r.value, 0.0, 0.0)),
            Some("hopf") => out.checks.push(Check::below("vanishing", r.value, 1e-6)),
            Some(_) => {
                out.checks.push(Check::above("nonvanishing", r.value, 1e-4));
                if let Some(rc) = r.relative_change {
                    out.checks.push(Check::below("stability", rc, 1e-2));
                }
            }
            None => {}
        }
        Ok(out)
    });
    Ok((p.resolved, check_names, job))
}

fn fit(cfg: &ExperimentConfig) -> Result<Parts> {
    let mut p = Params::new(&cfg.experiment, &["n", "probes"])?;
    let n = charge(&mut p)?;
    let probes = count(&mut p, "probes", 8)?;
    let q = quadrature(cfg, &mut p, 2)?;
    let seed = cfg.seed;
    let job: Job = Box::new(move || {
        let mut out = Outcome::default();
        // point base: int_{S^2} ch(R^E) = index = n
        let fib = ProductFibration::new(ChartAtlas::sphere2(), ChartAtlas::point())?;
        let m: Arc<dyn ConnectionField> = Arc::new(JetConnection::monopole(n));
        let ch = char_form(m, &InvariantPolynomial::chern_character(2))?;
        let v = fiber_integration(&ch, &fib, &q)?.eval_scalar(0, &[], &[])?;
        out.value("fiber_integral", v.re);
        out.checks.push(Check::near("fiber_integral", v.re, n as f64, 1e-6));
        // closedness of the vertical characteristic form on S^2 x [0,1]^3
        let fib = ProductFibration::new(ChartAtlas::sphere2(), ChartAtlas::cube(3))?;
        let conn: Arc<dyn ConnectionField> =
            Arc::new(JetConnection::ambient_sphere_product(fib.total().clone(), seed.wrapping_add(31), 0.6)?);
        let bis = bismut_vertical_char_form(&fib, conn, 2, &QuadratureSpec::gauss(16))?;
        let d = exterior_derivative_numeric(&bis, 1e-4)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut worst, mut size) = (0.0f64, 0.0f64);
        for b in interior_points(&ChartAtlas::cube(3), probes, &mut rng) {
            let v = random_vectors(&mut rng, 3, 3);
            worst = worst.max(d.eval_scalar(0, &b, &v)?.norm());
            size = size.max(bis.eval_scalar(0, &b, &v[..2])?.norm());
        }
        out.value("d_vertical_form", worst);
        out.value("vertical_form_size", size);
        out.checks.push(Check::below("d_vertical_form", worst, 1e-5));
        Ok(out)
    });
    Ok((p.resolved, names(&["fiber_integral", "d_vertical_form"]), job))
}
