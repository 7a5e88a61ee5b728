use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};

use super::connection::{ConnectionField, Potential};
use crate::error::{arg, Error, Result};
use crate::forms::{FormField, ValueKind};
use crate::geometry::ChartAtlas;
use crate::jet::{Jet, Scalar};
use crate::linalg::{c, permutations, CMat};

/// Compact groups with an explicit chart.
///
/// * `U(1)`: `g = e^{i theta}`, `theta in (0, 2 pi)`.
/// * `SU(2)`: `g = exp(phi X3) exp(theta X2) exp(psi X3)`, `X_a = i sigma_a / 2`,
///   on `(theta, phi, psi) in (0, pi) x (0, 2 pi) x (0, 4 pi)`.
/// * `SO(3)`: the same product in the adjoint representation, with
///   `psi in (0, 2 pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompactGroup {
    U1,
    SU2,
    SO3,
}

impl FromStr for CompactGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u1" | "U(1)" => Ok(CompactGroup::U1),
            "su2" | "SU(2)" => Ok(CompactGroup::SU2),
            "so3" | "SO(3)" => Ok(CompactGroup::SO3),
            _ => arg(format!("unknown group `{s}` (u1 | su2 | so3)")),
        }
    }
}

impl fmt::Display for CompactGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompactGroup::U1 => "u1",
            CompactGroup::SU2 => "su2",
            CompactGroup::SO3 => "so3",
        })
    }
}

type C<S> = Complex<S>;

fn cz<S: Scalar>() -> C<S> {
    Complex::new(S::zero(), S::zero())
}

fn matmul<S: Scalar>(a: &[C<S>], b: &[C<S>], n: usize) -> Vec<C<S>> {
    let mut out = vec![cz::<S>(); n * n];
    for i in 0..n {
        for l in 0..n {
            for j in 0..n {
                out[i * n + j] = out[i * n + j] + a[i * n + l] * b[l * n + j];
            }
        }
    }
    out
}

fn su2_factors<S: Scalar>(x: &[S]) -> [Vec<C<S>>; 3] {
    let half = S::cst(0.5);
    let (th, ph, ps) = (x[0] * half, x[1] * half, x[2] * half);
    let z = S::zero();
    let e = |a: S| [Complex::new(a.cos(), a.sin()), cz(), cz(), Complex::new(a.cos(), -a.sin())];
    let r = vec![
        Complex::new(th.cos(), z),
        Complex::new(th.sin(), z),
        Complex::new(-th.sin(), z),
        Complex::new(th.cos(), z),
    ];
    [e(ph).to_vec(), r, e(ps).to_vec()]
}

fn so3_factors<S: Scalar>(x: &[S]) -> [Vec<C<S>>; 3] {
    let (o, z) = (S::one(), S::zero());
    // exp(a ad X3) and exp(a ad X2) in the basis (X1, X2, X3)
    let rz = |a: S| vec![a.cos(), a.sin(), z, -a.sin(), a.cos(), z, z, z, o];
    let ry = |a: S| vec![a.cos(), z, -a.sin(), z, o, z, a.sin(), z, a.cos()];
    let cx = |m: Vec<S>| m.into_iter().map(|v| Complex::new(v, z)).collect::<Vec<_>>();
    [cx(rz(x[1])), cx(ry(x[0])), cx(rz(x[2]))]
}

impl CompactGroup {
    pub fn matrix_size(self) -> usize {
        match self {
            CompactGroup::U1 => 1,
            CompactGroup::SU2 => 2,
            CompactGroup::SO3 => 3,
        }
    }

    pub fn atlas(self) -> ChartAtlas {
        match self {
            CompactGroup::U1 => ChartAtlas::circle(),
            CompactGroup::SU2 => ChartAtlas::euler3(),
            CompactGroup::SO3 => {
                ChartAtlas::single("euler", vec![(0.0, PI), (0.0, 2.0 * PI), (0.0, 2.0 * PI)], vec![false, true, true])
            }
        }
    }

    pub fn dim(self) -> usize {
        match self {
            CompactGroup::U1 => 1,
            _ => 3,
        }
    }

    /// The group element at chart coordinates, row-major.
    pub fn element<S: Scalar>(self, x: &[S]) -> Vec<C<S>> {
        match self {
            CompactGroup::U1 => vec![Complex::new(x[0].cos(), x[0].sin())],
            CompactGroup::SU2 | CompactGroup::SO3 => {
                let n = self.matrix_size();
                let [a, b, cc] = if self == CompactGroup::SU2 { su2_factors(x) } else { so3_factors(x) };
                matmul(&matmul(&a, &b, n), &cc, n)
            }
        }
    }

    pub fn element_at(self, x: &[f64]) -> CMat {
        let n = self.matrix_size();
        CMat::from_row_slice(n, n, &self.element(x))
    }

    /// Chart coordinates of an `SU(2)` element, when it lies in the chart.
    pub fn su2_coordinates(g: &CMat) -> Option<Vec<f64>> {
        let (a, b) = (g[(0, 0)], g[(0, 1)]);
        let theta = 2.0 * b.norm().atan2(a.norm());
        let (pa, pb) = (a.arg(), b.arg());
        let mut phi = pa + pb;
        let mut psi = pa - pb;
        let turns = (phi / (2.0 * PI)).floor();
        phi -= turns * 2.0 * PI;
        psi -= turns * 2.0 * PI;
        psi = psi.rem_euclid(4.0 * PI);
        let x = vec![theta, phi, psi];
        ChartAtlas::euler3().check_interior(0, &x).ok().map(|_| x)
    }

    /// `g(x)` with its exact first and second partial derivatives.
    fn jets(self, x: &[f64]) -> (CMat, Vec<CMat>, Vec<Vec<CMat>>) {
        let n = self.matrix_size();
        let d = x.len();
        let e = self.element(&Jet::seed(x));
        let part = |f: &dyn Fn(&Jet) -> f64| CMat::from_fn(n, n, |i, j| {
            let z = &e[i * n + j];
            Complex64::new(f(&z.re), f(&z.im))
        });
        let g = part(&|j| j.value());
        let dg = (0..d).map(|a| part(&|j| j.grad(a))).collect();
        let ddg = (0..d).map(|a| (0..d).map(|b| part(&|j| j.hess(a, b))).collect()).collect();
        (g, dg, ddg)
    }
}

/// `g(x)^{-1} dg(x)[tangent]`.
pub fn maurer_cartan_form(group: CompactGroup, x: &[f64], tangent: &[f64]) -> Result<CMat> {
    if x.len() != group.dim() || tangent.len() != group.dim() {
        return arg(format!("{group} has dimension {}", group.dim()));
    }
    group.atlas().check_interior(0, x)?;
    let (g, dg, _) = group.jets(x);
    let ginv = g.try_inverse().ok_or_else(|| Error::Argument("singular group element".into()))?;
    let dgv = dg.iter().zip(tangent).fold(CMat::zeros(ginv.nrows(), ginv.nrows()), |acc, (m, &t)| acc + m * c(t));
    Ok(ginv * dgv)
}

/// Pushes a coordinate tangent at `x` forward under left translation by `g0`
/// to coordinates at `x'`, the chart point of `g0 g(x)`; least squares on the
/// real and imaginary parts of `g0 dg[v] = dg(x')[w]`.
pub fn left_translate_tangent(group: CompactGroup, g0: &CMat, x_new: &[f64], x: &[f64], v: &[f64]) -> Option<Vec<f64>> {
    let n = group.matrix_size();
    let (_, dg, _) = group.jets(x);
    let (_, dg_new, _) = group.jets(x_new);
    let target = g0 * dg.iter().zip(v).fold(CMat::zeros(n, n), |acc, (m, &t)| acc + m * c(t));
    let d = group.dim();
    let rows = 2 * n * n;
    let a = DMatrix::from_fn(rows, d, |r, col| {
        let z = dg_new[col][((r / 2) / n, (r / 2) % n)];
        if r % 2 == 0 { z.re } else { z.im }
    });
    let b = DVector::from_fn(rows, |r, _| {
        let z = target[((r / 2) / n, (r / 2) % n)];
        if r % 2 == 0 { z.re } else { z.im }
    });
    let sol = a.svd(true, true).solve(&b, 1e-14).ok()?;
    Some(sol.iter().copied().collect())
}

/// The flat connection `g^{-1} dg` on the trivial bundle over a group.
#[derive(Clone, Debug)]
pub struct MaurerCartanConnection {
    group: CompactGroup,
    atlas: ChartAtlas,
}

impl MaurerCartanConnection {
    pub fn new(group: CompactGroup) -> Self {
        MaurerCartanConnection { group, atlas: group.atlas() }
    }
}

impl ConnectionField for MaurerCartanConnection {
    fn id(&self) -> String {
        format!("mc-flat-{}", self.group)
    }
    fn atlas(&self) -> &ChartAtlas {
        &self.atlas
    }
    fn rank(&self) -> usize {
        self.group.matrix_size()
    }
    /// `omega_i = g^{-1} d_i g`,
    /// `d_j omega_i = -g^{-1} d_j g g^{-1} d_i g + g^{-1} d_j d_i g`.
    fn potential(&self, _chart: usize, x: &[f64]) -> Result<Potential<CMat>> {
        let (g, dg, ddg) = self.group.jets(x);
        let ginv = g.try_inverse().ok_or_else(|| Error::Argument("singular group element".into()))?;
        let d = x.len();
        let omega: Vec<CMat> = dg.iter().map(|m| &ginv * m).collect();
        let d_omega = (0..d)
            .map(|j| (0..d).map(|i| -(&ginv * &dg[j]) * &omega[i] + &ginv * &ddg[j][i]).collect())
            .collect();
        Ok(Potential { omega, d_omega })
    }
}

/// The Chern–Simons generator `tr((g^{-1} dg)^{2k-1})` as a scalar form.
pub fn mc_generator_form(group: CompactGroup, k: usize) -> Result<FormField> {
    if k == 0 {
        return arg("generator degree needs k >= 1");
    }
    let d = group.dim();
    let deg = 2 * k - 1;
    if deg > d {
        return Ok(FormField::zero(d, deg, ValueKind::Scalar));
    }
    let perms = permutations(deg);
    let n = group.matrix_size();
    Ok(FormField::new(d, deg, ValueKind::Scalar, move |_, x, v| {
        let (g, dg, _) = group.jets(x);
        let Some(ginv) = g.try_inverse() else {
            return super::connection::nan_matrix(1);
        };
        let w: Vec<CMat> = v
            .iter()
            .map(|vi| &ginv * dg.iter().zip(vi.iter()).fold(CMat::zeros(n, n), |acc, (m, &t)| acc + m * c(t)))
            .collect();
        let mut acc = c(0.0);
        for (sign, p) in &perms {
            let prod = p.iter().skip(1).fold(w[p[0]].clone(), |acc, &i| acc * &w[i]);
            acc += prod.trace() * *sign;
        }
        CMat::from_element(1, 1, acc)
    }))
}

/// Closed form: `tr((g^{-1}dg)^3) = (3/2) theta^1 ^ theta^2 ^ theta^3` on
/// `SU(2)` and the volume of `SU(2)` for the metric making `X_a`
/// orthonormal is `16 pi^2`, so `|int tr(w^3)| = 24 pi^2`.
pub fn su2_generator_integral_reference() -> f64 {
    24.0 * PI * PI
}
