use std::sync::Arc;

use num_complex::Complex64;

use super::algebra::{Algebra, TraceKind};
use super::chern_weil::{pair_values, probe_trace, shuffle_product};
use super::connection::{nan_matrix, ConnectionField, CurvatureValues, Potential};
use crate::error::{arg, Result};
use crate::forms::{gauss_legendre, FormField, ValueKind};
use crate::linalg::{c, shuffles, CMat};

/// Nodes of the fixed rule for the homotopy parameter. The integrand is a
/// polynomial of degree `2k - 2` in `t`, so this is exact for `k <= 16`.
pub const CS_T_NODES: usize = 16;

fn combine<A: Algebra>(a: &A, wa: f64, b: &A, wb: f64) -> A {
    a.scaled(c(wa)).plus(&b.scaled(c(wb)))
}

/// Relative Chern–Simons form
/// `CS_k(w1, w0) = k int_0^1 tr[(w1 - w0) ^ F_t^{k-1}] dt`,
/// `w_t = t w0 + (1 - t) w1`, `F_t = d w_t + w_t ^ w_t`.
///
/// The factor `k` makes `d CS_k = tr F_1^k - tr F_0^k` hold exactly for
/// the raw trace forms of [`super::trace_power_form`].
pub fn relative_cs_form<A: Algebra>(
    conn0: Arc<dyn ConnectionField<A>>,
    conn1: Arc<dyn ConnectionField<A>>,
    k: usize,
    trace: TraceKind,
) -> Result<FormField> {
    if conn0.rank() != conn1.rank() {
        return arg(format!("connections on bundles of rank {} and {}", conn0.rank(), conn1.rank()));
    }
    if conn0.dim() != conn1.dim() {
        return arg("connections live on manifolds of different dimension");
    }
    if k == 0 {
        return arg("Chern-Simons degree needs k >= 1");
    }
    let d = conn0.dim();
    let deg = 2 * k - 1;
    if deg > d {
        return Ok(FormField::zero(d, deg, ValueKind::Scalar));
    }
    probe_trace(conn0.as_ref(), trace)?;
    let mut sizes = vec![1];
    sizes.extend(std::iter::repeat_n(2, k - 1));
    let terms = shuffles(&sizes);
    let (gx, gw) = gauss_legendre(CS_T_NODES);
    let nodes: Vec<(f64, f64)> = gx.iter().zip(&gw).map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    Ok(FormField::new(d, deg, ValueKind::Scalar, move |ch, x, v| {
        let value = (|| -> Result<Complex64> {
            let p0 = conn0.potential(ch, x)?;
            let p1 = conn1.potential(ch, x)?;
            // alpha(v_a) for each slot
            let alpha: Vec<A> = v
                .iter()
                .map(|va| {
                    let mut acc = p0.omega[0].zero_like();
                    for i in 0..d {
                        if va[i] != 0.0 {
                            acc = acc.plus(&combine(&p1.omega[i], va[i], &p0.omega[i], -va[i]));
                        }
                    }
                    acc
                })
                .collect();
            if k == 1 {
                return alpha[0].trace_with(trace);
            }
            let zero = alpha[0].zero_like();
            let mut acc = zero.clone();
            for &(t, w) in &nodes {
                let pt = Potential {
                    omega: (0..d).map(|i| combine(&p0.omega[i], t, &p1.omega[i], 1.0 - t)).collect(),
                    d_omega: (0..d)
                        .map(|j| (0..d).map(|i| combine(&p0.d_omega[j][i], t, &p1.d_omega[j][i], 1.0 - t)).collect())
                        .collect(),
                };
                let curv = CurvatureValues::from_potential(&pt);
                let pairs = pair_values(&curv, v);
                acc = acc.plus(&shuffle_product(&terms, &pairs, Some(&alpha), &zero).scaled(c(w)));
            }
            Ok(acc.trace_with(trace)? * k as f64)
        })();
        match value {
            Ok(z) => CMat::from_element(1, 1, z),
            Err(_) => nan_matrix(1),
        }
    }))
}
