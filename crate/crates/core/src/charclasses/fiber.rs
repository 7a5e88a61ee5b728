use std::sync::Arc;

use nalgebra::DVector;

use super::algebra::TraceKind;
use super::chern_weil::trace_power_form;
use super::connection::{nan_matrix, ConnectionField};
use crate::error::{arg, Result};
use crate::forms::{integrate_function, FormField, QuadratureSpec, ValueKind};
use crate::geometry::ChartAtlas;
use crate::linalg::CMat;

/// The product `Z x B -> B`, total coordinates `(z, b)`.
#[derive(Clone, Debug)]
pub struct ProductFibration {
    fiber: ChartAtlas,
    base: ChartAtlas,
    total: ChartAtlas,
}

impl ProductFibration {
    pub fn new(fiber: ChartAtlas, base: ChartAtlas) -> Result<Self> {
        let total = fiber.product(&base)?;
        Ok(ProductFibration { fiber, base, total })
    }

    pub fn fiber(&self) -> &ChartAtlas {
        &self.fiber
    }
    pub fn base(&self) -> &ChartAtlas {
        &self.base
    }
    pub fn total(&self) -> &ChartAtlas {
        &self.total
    }
}

/// `(int_Z a)(b; v_1..v_q) = int_Z a((0,v_1), .., (0,v_q), d_z1, .., d_zm) dz`.
///
/// Fiber directions go in the last slots, which makes `d int_Z = int_Z d` on
/// closed fibers with no extra sign. For a top form this means
/// `int_{Z x B} a = (-1)^{dim Z dim B} int_B int_Z a`.
pub fn fiber_integration(a: &FormField, fib: &ProductFibration, q: &QuadratureSpec) -> Result<FormField> {
    let (m, n) = (fib.fiber.dim(), fib.base.dim());
    if a.dim() != m + n {
        return arg(format!("form lives in dimension {}, the total space has dimension {}", a.dim(), m + n));
    }
    if a.kind() != ValueKind::Scalar {
        return arg("fiber integration takes scalar forms; take a trace first");
    }
    q.validate()?;
    if a.degree() < m {
        return Ok(FormField::zero(n, 0, ValueKind::Scalar));
    }
    let deg = a.degree() - m;
    let (a, fiber, q) = (a.clone(), fib.fiber.clone(), *q);
    Ok(FormField::new(n, deg, ValueKind::Scalar, move |_, b, v| {
        let mut frame: Vec<DVector<f64>> = v
            .iter()
            .map(|vb| DVector::from_fn(m + n, |i, _| if i < m { 0.0 } else { vb[i - m] }))
            .collect();
        frame.extend((0..m).map(|i| DVector::from_fn(m + n, |j, _| if j == i { 1.0 } else { 0.0 })));
        let r = integrate_function(&fiber, &q, &[], |_, z| {
            let x: Vec<f64> = z.iter().chain(b).copied().collect();
            Ok(a.eval_unchecked(0, &x, &frame)[(0, 0)])
        });
        match r {
            Ok(i) => CMat::from_element(1, 1, i.value),
            Err(_) => nan_matrix(1),
        }
    }))
}

/// `b -> int_Z tr((R^E)^k)` on the base of a product, where the vertical
/// curvature of the pushed-forward bundle is that of `conn`.
pub fn bismut_vertical_char_form(
    fib: &ProductFibration,
    conn: Arc<dyn ConnectionField>,
    k: usize,
    q: &QuadratureSpec,
) -> Result<FormField> {
    if conn.dim() != fib.total.dim() {
        return arg(format!("connection lives in dimension {}, the total space has dimension {}", conn.dim(), fib.total.dim()));
    }
    let m = fib.fiber.dim();
    if 2 * k < m {
        return Ok(FormField::zero(fib.base.dim(), 0, ValueKind::Scalar));
    }
    fiber_integration(&trace_power_form(conn, k, TraceKind::Matrix)?, fib, q)
}
