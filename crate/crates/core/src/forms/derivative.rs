use nalgebra::{DMatrix, DVector};

use super::field::{basis, FormField};
use crate::error::{arg, Result};
use crate::linalg::{c, subsets, CMat};

/// Numeric exterior derivative by central differences of the coordinate
/// components:
///
/// `(d a)_{i_0..i_p} = sum_j (-1)^j d_{i_j} a_{i_0..^i_j..i_p}`.
///
/// Only meant for checking closedness and transgression identities; the
/// production paths never difference numerically.
pub fn exterior_derivative_numeric(a: &FormField, step: f64) -> Result<FormField> {
    if !(step > 0.0 && step.is_finite()) {
        return arg(format!("finite-difference step must be positive, got {step}"));
    }
    let (dim, p, kind) = (a.dim(), a.degree(), a.kind());
    if p + 1 > dim {
        return Ok(FormField::zero(dim, p + 1, kind));
    }
    let r = kind.size();
    let index_sets = subsets(dim, p + 1);
    let inner = a.clone();
    Ok(FormField::new(dim, p + 1, kind, move |ch, x, v| {
        let mut out = CMat::zeros(r, r);
        for set in &index_sets {
            // minor of the vectors on this index set
            let minor = DMatrix::from_fn(p + 1, p + 1, |row, col| v[col][set[row]]);
            let det = minor.determinant();
            if det == 0.0 {
                continue;
            }
            let mut comp = CMat::zeros(r, r);
            for (j, &dir) in set.iter().enumerate() {
                let rest: Vec<DVector<f64>> =
                    set.iter().enumerate().filter(|&(m, _)| m != j).map(|(_, &i)| basis(dim, i)).collect();
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[dir] += step;
                xm[dir] -= step;
                let diff = (inner.eval_unchecked(ch, &xp, &rest) - inner.eval_unchecked(ch, &xm, &rest))
                    / c(2.0 * step);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                comp += diff * c(sign);
            }
            out += comp * c(det);
        }
        out
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::field::{coordinate_frame, wedge};
    use crate::linalg::max_abs;

    #[test]
    fn d_of_coordinate_form_vanishes() {
        let d = exterior_derivative_numeric(&FormField::coordinate(1, 0), 1e-4).unwrap();
        assert_eq!(d.degree(), 2);
        assert_eq!(max_abs(&d.eval(0, &[0.5], &[basis(1, 0), basis(1, 0)]).unwrap()), 0.0);
        let d2 = exterior_derivative_numeric(&FormField::coordinate(2, 1), 1e-4).unwrap();
        let v = d2.eval(0, &[0.3, 0.4], &coordinate_frame(2)).unwrap();
        assert!(max_abs(&v) < 1e-8);
    }

    #[test]
    fn d_of_x_dy_is_dx_dy() {
        let xdy = FormField::one_form(2, |x| vec![c(0.0), c(x[0])]);
        let d = exterior_derivative_numeric(&xdy, 1e-4).unwrap();
        let dxdy = wedge(&FormField::coordinate(2, 0), &FormField::coordinate(2, 1)).unwrap();
        let u = DVector::from_vec(vec![0.3, -1.2]);
        let w = DVector::from_vec(vec![2.0, 0.7]);
        for x in [[0.1, 0.2], [1.5, -3.0]] {
            let lhs = d.eval(0, &x, &[u.clone(), w.clone()]).unwrap();
            let rhs = dxdy.eval(0, &x, &[u.clone(), w.clone()]).unwrap();
            assert!(max_abs(&(lhs - rhs)) < 1e-8);
        }
    }

    #[test]
    fn bad_step() {
        assert!(exterior_derivative_numeric(&FormField::coordinate(2, 0), 0.0).is_err());
        assert!(exterior_derivative_numeric(&FormField::coordinate(2, 0), -1.0).is_err());
    }
}
