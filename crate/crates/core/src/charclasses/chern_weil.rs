use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use super::algebra::{Algebra, TraceKind};
use super::connection::{curvature_at, nan_matrix, probe_point, ConnectionField, CurvatureValues};
use super::polynomial::{polarized_pfaffian, InvariantPolynomial, PolynomialKind};
use crate::error::{arg, Result};
use crate::forms::{wedge, FormField, ValueKind};
use crate::linalg::{c, mask, max_abs, shuffles, CMat, Shuffle};
use crate::symbols::SymbolExpansion;

/// `F(v_a, v_b)` for every slot pair, indexed by the pair's bitmask.
pub(crate) fn pair_values<A: Algebra>(curv: &CurvatureValues<A>, v: &[DVector<f64>]) -> Vec<Option<A>> {
    let mut memo = vec![None; 1 << v.len()];
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            memo[mask(&[a, b])] = Some(curv.on(&v[a], &v[b]));
        }
    }
    memo
}

/// `sum_shuffles sign * head(block_0) * F(block_1) * ... * F(block_m)` where
/// `head` is absent (all blocks pairs) or a 1-form evaluated on one slot.
pub(crate) fn shuffle_product<A: Algebra>(
    terms: &[Shuffle],
    pairs: &[Option<A>],
    head: Option<&[A]>,
    zero: &A,
) -> A {
    let mut acc = zero.clone();
    for t in terms {
        let mut blocks = t.blocks.iter();
        let mut prod = match head {
            Some(h) => h[blocks.next().expect("head block")[0]].clone(),
            None => pairs[mask(blocks.next().expect("at least one block"))].clone().expect("pair value"),
        };
        for b in blocks {
            prod = prod.times(pairs[mask(b)].as_ref().expect("pair value"));
        }
        acc = acc.plus(&prod.scaled(c(t.sign)));
    }
    acc
}

/// Checks once, at a probe point, that the trace kind applies to the
/// connection's values.
pub(crate) fn probe_trace<A: Algebra>(conn: &dyn ConnectionField<A>, trace: TraceKind) -> Result<()> {
    let p = conn.potential(0, &probe_point(conn.atlas()))?;
    p.omega[0].trace_with(trace).map(|_| ())
}

/// The raw `2k`-form `tr(F ^ ... ^ F)` (`k` factors) under the chosen trace.
pub fn trace_power_form<A: Algebra>(
    conn: Arc<dyn ConnectionField<A>>,
    k: usize,
    trace: TraceKind,
) -> Result<FormField> {
    if k == 0 {
        return arg("trace power needs k >= 1");
    }
    let d = conn.dim();
    if 2 * k > d {
        return Ok(FormField::zero(d, 2 * k, ValueKind::Scalar));
    }
    probe_trace(conn.as_ref(), trace)?;
    let terms = shuffles(&vec![2; k]);
    Ok(FormField::new(d, 2 * k, ValueKind::Scalar, move |ch, x, v| {
        let value = curvature_at(conn.as_ref(), ch, x).and_then(|curv| {
            let pairs = pair_values(&curv, v);
            let zero = curv.component(0, 0).zero_like();
            shuffle_product(&terms, &pairs, None, &zero).trace_with(trace)
        });
        match value {
            Ok(z) => CMat::from_element(1, 1, z),
            Err(_) => nan_matrix(1),
        }
    }))
}

/// Curvature conjugated into an orthonormal frame when the connection has
/// one, `E^{-1} F E`.
fn frame_curvature(conn: &dyn ConnectionField, ch: usize, x: &[f64]) -> Result<CurvatureValues<CMat>> {
    let curv = curvature_at(conn, ch, x)?;
    let Some(e) = conn.orthonormal_frame(ch, x)? else {
        return Ok(curv);
    };
    let einv = e.clone().try_inverse().ok_or_else(|| crate::Error::DegenerateMetric { chart: ch, point: x.to_vec() })?;
    let d = conn.dim();
    Ok(CurvatureValues::from_components(
        d,
        (0..d * d).map(|idx| &einv * curv.component(idx / d, idx % d) * &e).collect(),
    ))
}

fn pfaffian_form(conn: Arc<dyn ConnectionField>, norm: Complex64) -> Result<FormField> {
    let (d, r) = (conn.dim(), conn.rank());
    if r % 2 == 1 {
        return arg(format!("pfaffian needs even rank, the bundle has rank {r}"));
    }
    let m = r / 2;
    if r > d {
        return Ok(FormField::zero(d, r, ValueKind::Scalar));
    }
    let probe = frame_curvature(conn.as_ref(), 0, &probe_point(conn.atlas()))?;
    for i in 0..d {
        for j in 0..d {
            let f = probe.component(i, j);
            if max_abs(&(f + f.transpose())) > 1e-9 * max_abs(f).max(1.0) {
                return arg("pfaffian requested on non-skew curvature");
            }
        }
    }
    let terms = shuffles(&vec![2; m]);
    Ok(FormField::new(d, r, ValueKind::Scalar, move |ch, x, v| match frame_curvature(conn.as_ref(), ch, x) {
        Ok(curv) => {
            let pairs = pair_values(&curv, v);
            let mut acc = c(0.0);
            for t in &terms {
                let blocks: Vec<&CMat> = t.blocks.iter().map(|b| pairs[mask(b)].as_ref().unwrap()).collect();
                acc += polarized_pfaffian(&blocks) * t.sign;
            }
            CMat::from_element(1, 1, acc * norm)
        }
        Err(_) => nan_matrix(1),
    }))
}

/// Homogeneous parts `[deg 0, deg 2, deg 4, ...]` of `p(F)` up to the
/// polynomial's truncation degree and the manifold dimension, normalisation
/// included.
pub fn char_form_series(conn: Arc<dyn ConnectionField>, p: &InvariantPolynomial) -> Result<Vec<FormField>> {
    let d = conn.dim();
    let r = conn.rank() as f64;
    let k = p.normalization;
    let constant = |v: f64| FormField::function(d, move |_| c(v) * k);
    match p.kind {
        PolynomialKind::TracePower(_) | PolynomialKind::Pfaffian => Ok(vec![char_form(conn, p)?]),
        PolynomialKind::ChernCharacter { max_degree } => {
            let mut out = vec![constant(r)];
            let mut fact = 1.0;
            for j in 1..=max_degree.min(d) / 2 {
                fact *= j as f64;
                let coeff = (crate::linalg::I / (2.0 * std::f64::consts::PI)).powu(j as u32) / fact * k;
                out.push(trace_power_form(conn.clone(), j, TraceKind::Matrix)?.scale(coeff));
            }
            Ok(out)
        }
        PolynomialKind::AHat { max_degree } => {
            let pi2 = std::f64::consts::PI.powi(2);
            let mut out = vec![constant(1.0)];
            let top = max_degree.min(d);
            if top >= 2 {
                out.push(FormField::zero(d, 2, ValueKind::Scalar));
            }
            if top >= 4 {
                let t2 = trace_power_form(conn.clone(), 2, TraceKind::Matrix)?;
                // -p1/24 = tr(F^2) / (24 * 8 pi^2)
                out.push(t2.scale(c(1.0 / (24.0 * 8.0 * pi2)) * k));
            }
            if top >= 6 {
                out.push(FormField::zero(d, 6, ValueKind::Scalar));
            }
            if top >= 8 {
                let t2 = trace_power_form(conn.clone(), 2, TraceKind::Matrix)?;
                let t4 = trace_power_form(conn.clone(), 4, TraceKind::Matrix)?;
                let t22 = wedge(&t2, &t2)?;
                let p1sq = t22.scale(c(1.0 / (64.0 * pi2 * pi2)));
                let p2 = t22.sub(&t4.scale(c(2.0)))?.scale(c(1.0 / (128.0 * pi2 * pi2)));
                out.push(p1sq.scale(c(7.0)).sub(&p2.scale(c(4.0)))?.scale(c(1.0 / 5760.0) * k));
            }
            Ok(out)
        }
    }
}

/// `p(F)` as a differential form. Truncated series give their part of
/// degree `max_degree` (zero if that exceeds the dimension); use
/// [`char_form_series`] for all parts.
pub fn char_form(conn: Arc<dyn ConnectionField>, p: &InvariantPolynomial) -> Result<FormField> {
    match p.kind {
        PolynomialKind::TracePower(k) => Ok(trace_power_form(conn, k, TraceKind::Matrix)?.scale(p.normalization)),
        PolynomialKind::Pfaffian => pfaffian_form(conn, p.normalization),
        PolynomialKind::AHat { max_degree } | PolynomialKind::ChernCharacter { max_degree } => {
            let d = conn.dim();
            if max_degree % 2 == 1 || max_degree > d {
                return Ok(FormField::zero(d, max_degree, ValueKind::Scalar));
            }
            let parts = char_form_series(conn, p)?;
            Ok(parts.into_iter().nth(max_degree / 2).expect("series reaches max_degree"))
        }
    }
}

/// Leading-order Chern form of a family of multiplication-operator
/// curvatures: `Tr^lo` of the `k`-th wedge power. For multiplication by
/// matrices this is `2 tr(F^k)`, the factor being the two cosphere points.
pub fn leading_order_char_form(family: Arc<dyn ConnectionField<SymbolExpansion>>, k: usize) -> Result<FormField> {
    let x = probe_point(family.atlas());
    let curv = curvature_at(family.as_ref(), 0, &x)?;
    let d = family.dim();
    for i in 0..d {
        for j in 0..d {
            let f = curv.component(i, j);
            if f.leading_order() != 0.0 || f.components()[1..].iter().any(|h| !h.is_zero()) {
                return arg("leading-order Chern forms need order-0, xi-independent curvature symbols");
            }
        }
    }
    trace_power_form(family, k, TraceKind::LeadingOrder)
}
