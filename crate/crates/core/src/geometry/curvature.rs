//! Christoffel symbols and Riemann curvature from exact jet derivatives.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * `g_ij` lowered, `g^ij` its inverse;
//! * `Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)`;
//! * `R^i_jkl` is the `i`-component of `R(d_k, d_l) d_j` with
//!   `R(u, v) = [nabla_u, nabla_v] - nabla_[u,v]`, so
//!   `R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj + Gamma^i_km Gamma^m_lj - Gamma^i_lm Gamma^m_kj`;
//! * with this sign the round unit sphere has sectional curvature `+1`.

use nalgebra::{DMatrix, DVector};

use super::metric::{metric_jet, MetricField};
use crate::error::{Error, Result};

/// `Gamma^k_ij`, stored at `[k][i][j]`.
#[derive(Clone, Debug)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        let d = self.dim;
        self.data[(k * d + i) * d + j]
    }
}

#[derive(Clone, Debug)]
pub struct CurvatureSample {
    pub chart: usize,
    pub point: Vec<f64>,
    pub metric: DMatrix<f64>,
    dim: usize,
    /// `R^i_jkl` at `[i][j][k][l]`.
    riemann: Vec<f64>,
}

impl CurvatureSample {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let d = self.dim;
        self.riemann[((i * d + j) * d + k) * d + l]
    }

    /// `Omega(u, v)` as an endomorphism in the chart basis:
    /// `(Omega(u,v))^i_j = R^i_jkl u^k v^l`.
    pub fn endomorphism(&self, u: &[f64], v: &[f64]) -> DMatrix<f64> {
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d {
            for l in 0..d {
                let c = u[k] * v[l] - u[l] * v[k];
                if c == 0.0 || l <= k {
                    continue;
                }
                for i in 0..d {
                    for j in 0..d {
                        m[(i, j)] += self.r(i, j, k, l) * c;
                    }
                }
            }
        }
        m
    }

    /// `Omega(d_k, d_l)` for all coordinate pairs, indexed `[k * d + l]`.
    pub fn coordinate_endomorphisms(&self) -> Vec<DMatrix<f64>> {
        let d = self.dim;
        let mut out = Vec::with_capacity(d * d);
        for k in 0..d {
            for l in 0..d {
                out.push(DMatrix::from_fn(d, d, |i, j| self.r(i, j, k, l)));
            }
        }
        out
    }

    pub fn bianchi_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let s = self.r(i, j, k, l) + self.r(i, k, l, j) + self.r(i, l, j, k);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest `|g(Omega w, z) + g(w, Omega z)|` over coordinate vectors,
    /// i.e. failure of `R_ijkl` to be antisymmetric in its first pair.
    pub fn skewness_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for k in 0..d {
            for l in 0..d {
                let m = DMatrix::from_fn(d, d, |i, j| self.r(i, j, k, l));
                let low = &self.metric * m;
                worst = worst.max((low.clone() + low.transpose()).abs().max());
            }
        }
        worst
    }

    pub fn sectional(&self, u: &[f64], v: &[f64]) -> f64 {
        let g = &self.metric;
        let (u, v) = (DVector::from_column_slice(u), DVector::from_column_slice(v));
        let rv = self.endomorphism(u.as_slice(), v.as_slice()) * &v;
        let num = (u.transpose() * g * rv)[0];
        let guu = (u.transpose() * g * &u)[0];
        let gvv = (v.transpose() * g * &v)[0];
        let guv = (u.transpose() * g * &v)[0];
        num / (guu * gvv - guv * guv)
    }
}

/// Christoffel symbols with their first derivatives.
pub(crate) struct Derived {
    /// `Gamma^k_ij` at `[k][i][j]`.
    pub(crate) gamma: Vec<f64>,
    /// `d_m Gamma^k_ij` at `[m][k][i][j]`.
    pub(crate) dgamma: Vec<f64>,
    pub(crate) g: DMatrix<f64>,
    pub(crate) dim: usize,
}

pub(crate) fn derive(metric: &dyn MetricField, chart: usize, x: &[f64], second: bool) -> Result<Derived> {
    let d = x.len();
    if d != metric.dim() {
        return Err(Error::Argument(format!("point has {} coordinates, manifold dimension is {}", d, metric.dim())));
    }
    let mj = metric_jet(metric, chart, x);
    let degenerate = || Error::DegenerateMetric { chart, point: x.to_vec() };
    let chol = mj.g.clone().cholesky().ok_or_else(degenerate)?;
    let ginv = chol.inverse();
    if !ginv.iter().all(|v| v.is_finite()) {
        return Err(degenerate());
    }
    let idx = |k: usize, i: usize, j: usize| (k * d + i) * d + j;

    // Christoffel symbols of the first kind: first[l][i][j].
    let mut first = vec![0.0; d * d * d];
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                first[idx(l, i, j)] = 0.5 * (mj.dg[i][(j, l)] + mj.dg[j][(i, l)] - mj.dg[l][(i, j)]);
            }
        }
    }
    let mut gamma = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                // mirror so the lower index symmetry holds bit for bit
                gamma[idx(k, i, j)] = if j < i {
                    gamma[idx(k, j, i)]
                } else {
                    (0..d).map(|l| ginv[(k, l)] * first[idx(l, i, j)]).sum()
                };
            }
        }
    }

    let mut dgamma = Vec::new();
    if second {
        dgamma = vec![0.0; d * d * d * d];
        for m in 0..d {
            // d_m g^{kl} = -g^{ka} d_m g_ab g^{bl}
            let dginv = -(&ginv * &mj.dg[m] * &ginv);
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        if j < i {
                            dgamma[m * d * d * d + idx(k, i, j)] = dgamma[m * d * d * d + idx(k, j, i)];
                            continue;
                        }
                        let mut s = 0.0;
                        for l in 0..d {
                            let dfirst = 0.5
                                * (mj.ddg[m][i][(j, l)] + mj.ddg[m][j][(i, l)] - mj.ddg[m][l][(i, j)]);
                            s += dginv[(k, l)] * first[idx(l, i, j)] + ginv[(k, l)] * dfirst;
                        }
                        dgamma[m * d * d * d + idx(k, i, j)] = s;
                    }
                }
            }
        }
    }
    Ok(Derived { gamma, dgamma, g: mj.g, dim: d })
}

pub fn christoffel(metric: &dyn MetricField, chart: usize, x: &[f64]) -> Result<Christoffel> {
    metric.atlas().check_interior(chart, x)?;
    let dv = derive(metric, chart, x, false)?;
    Ok(Christoffel { dim: dv.dim, data: dv.gamma })
}

pub fn riemann_curvature(metric: &dyn MetricField, chart: usize, x: &[f64]) -> Result<CurvatureSample> {
    metric.atlas().check_interior(chart, x)?;
    curvature_unchecked(metric, chart, x)
}

/// Curvature without the interior-margin check. Quadrature and loop sampling
/// use this: open Gauss rules never touch the chart boundary but may come
/// closer to it than the pointwise margin.
pub(crate) fn curvature_unchecked(metric: &dyn MetricField, chart: usize, x: &[f64]) -> Result<CurvatureSample> {
    let dv = derive(metric, chart, x, true)?;
    let d = dv.dim;
    let g3 = |k: usize, i: usize, j: usize| dv.gamma[(k * d + i) * d + j];
    let dg3 = |m: usize, k: usize, i: usize, j: usize| dv.dgamma[((m * d + k) * d + i) * d + j];
    let mut riemann = vec![0.0; d * d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut r = dg3(k, i, l, j) - dg3(l, i, k, j);
                    for m in 0..d {
                        r += g3(i, k, m) * g3(m, l, j) - g3(i, l, m) * g3(m, k, j);
                    }
                    riemann[((i * d + j) * d + k) * d + l] = r;
                }
            }
        }
    }
    Ok(CurvatureSample { chart, point: x.to_vec(), metric: dv.g, dim: d, riemann })
}
