use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cwcs::charclasses::*;
use cwcs::forms::*;
use cwcs::geometry::ChartAtlas;
use cwcs::linalg::c;

fn vectors(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<DVector<f64>> {
    (0..count).map(|_| DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))).collect()
}

fn point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(0.05..0.95)).collect()
}

// sum over S_3 of sign * a(v_s0) b(v_s1) c(v_s2), written out by hand
fn three_form_oracle(a: &FormField, b: &FormField, cf: &FormField, x: &[f64], v: &[DVector<f64>]) -> Complex64 {
    let perms = [([0, 1, 2], 1.0), ([1, 2, 0], 1.0), ([2, 0, 1], 1.0), ([1, 0, 2], -1.0), ([0, 2, 1], -1.0), ([2, 1, 0], -1.0)];
    perms
        .iter()
        .map(|(p, s)| {
            let e = |f: &FormField, i: usize| f.eval_scalar(0, x, &[v[p[i]].clone()]).unwrap();
            e(a, 0) * e(b, 1) * e(cf, 2) * s
        })
        .sum()
}

#[test]
fn wedge_is_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (dx, dy, dz) = (FormField::coordinate(3, 0), FormField::coordinate(3, 1), FormField::coordinate(3, 2));
    let left = wedge(&wedge(&dx, &dy).unwrap(), &dz).unwrap();
    let right = wedge(&dx, &wedge(&dy, &dz).unwrap()).unwrap();
    // non-constant coefficients in four dimensions
    let a = FormField::one_form(4, |x| vec![c(x[1]), c(1.0), c(x[0] * x[2]), c(-x[3])]);
    let b = FormField::one_form(4, |x| vec![c(x[2].sin()), c(x[0]), c(0.5), c(x[1] * x[1])]);
    let g = FormField::one_form(4, |x| vec![c(1.0 + x[3]), c(-x[2]), c(x[0]), c(2.0)]);
    let l4 = wedge(&wedge(&a, &b).unwrap(), &g).unwrap();
    let r4 = wedge(&a, &wedge(&b, &g).unwrap()).unwrap();
    for _ in 0..100 {
        let x = point(&mut rng, 3);
        let v = vectors(&mut rng, 3, 3);
        let det = DMatrix::from_fn(3, 3, |i, j| v[j][i]).determinant();
        let l = left.eval_scalar(0, &x, &v).unwrap();
        let r = right.eval_scalar(0, &x, &v).unwrap();
        assert!((l - det).norm() < 1e-12 && (r - det).norm() < 1e-12);

        let x = point(&mut rng, 4);
        let v = vectors(&mut rng, 4, 3);
        let oracle = three_form_oracle(&a, &b, &g, &x, &v);
        assert!((l4.eval_scalar(0, &x, &v).unwrap() - oracle).norm() < 1e-12);
        assert!((r4.eval_scalar(0, &x, &v).unwrap() - oracle).norm() < 1e-12);
    }
}

#[test]
fn wedge_past_the_dimension_is_zero() {
    let dx = FormField::coordinate(2, 0);
    let w = wedge(&wedge(&dx, &dx).unwrap(), &dx).unwrap();
    assert_eq!(w.degree(), 3);
    let v = vec![DVector::from_element(2, 1.0); 3];
    assert_eq!(w.eval_scalar(0, &[0.1, 0.2], &v).unwrap(), c(0.0));
}

#[test]
fn engine_forms_are_alternating_and_multilinear() {
    let atlas = ChartAtlas::cube(4);
    let c0: Arc<dyn ConnectionField> = Arc::new(JetConnection::random_unitary(atlas.clone(), 2, 3, 0.5));
    let c1: Arc<dyn ConnectionField> = Arc::new(JetConnection::random_unitary(atlas, 2, 4, 0.5));
    let forms: Vec<(&str, FormField)> = vec![
        ("connection", connection_form(c0.clone())),
        ("curvature", curvature_form(c0.clone())),
        ("ch2", char_form(c0.clone(), &InvariantPolynomial::chern(2)).unwrap()),
        ("cs2", relative_cs_form(c0.clone(), c1.clone(), 2, TraceKind::Matrix).unwrap()),
        ("omega^omega", wedge(&curvature_form(c0.clone()), &curvature_form(c1)).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (name, f) in &forms {
        for _ in 0..1000 / forms.len() {
            let x = point(&mut rng, 4);
            let v = vectors(&mut rng, 4, f.degree());
            let other = vectors(&mut rng, 4, 1).remove(0);
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            assert!(antisymmetry_residual(f, 0, &x, &v).unwrap() < 1e-9, "{name}");
            assert!(linearity_residual(f, 0, &x, &v, &other, a, b).unwrap() < 1e-9, "{name}");
        }
    }
    let mc = mc_generator_form(CompactGroup::SU2, 2).unwrap();
    for _ in 0..200 {
        let x = vec![rng.random_range(0.1..3.0), rng.random_range(0.0..6.0), rng.random_range(0.0..12.0)];
        let v = vectors(&mut rng, 3, 3);
        let other = vectors(&mut rng, 3, 1).remove(0);
        assert!(antisymmetry_residual(&mc, 0, &x, &v).unwrap() < 1e-9);
        assert!(linearity_residual(&mc, 0, &x, &v, &other, 0.7, -1.3).unwrap() < 1e-9);
    }
}

fn s2_area() -> FormField {
    FormField::top_form(2, |x| c(x[0].sin()))
}

#[test]
fn sphere_area() {
    let s2 = ChartAtlas::sphere2();
    let o = Orientation::standard(2);
    let gl = integrate(&s2_area(), &s2, &o, &QuadratureSpec::gauss(64)).unwrap();
    assert!((gl.value.re - 4.0 * PI).abs() < 1e-6);
    assert!(gl.std_error.is_none());

    let mc = integrate(&s2_area(), &s2, &o, &QuadratureSpec::monte_carlo(200_000, 7)).unwrap();
    let se = mc.std_error.unwrap();
    assert!(se > 0.0 && se < 0.05);
    assert!((mc.value.re - gl.value.re).abs() < 3.0 * se, "{} vs {} (se {se})", mc.value.re, gl.value.re);
}

#[test]
fn circumference_and_exact_forms() {
    let s1 = ChartAtlas::circle();
    let dtheta = FormField::coordinate(1, 0);
    let v = integrate(&dtheta, &s1, &Orientation::standard(1), &QuadratureSpec::gauss(8)).unwrap();
    assert!((v.value.re - 2.0 * PI).abs() < 1e-10);

    // d(sin^2(theta) cos(phi) dphi) integrates to zero over S^2
    let a = FormField::one_form(2, |x| vec![c(0.0), c(x[0].sin().powi(2) * x[1].cos())]);
    let da = exterior_derivative_numeric(&a, 1e-4).unwrap();
    let v = integrate(&da, &ChartAtlas::sphere2(), &Orientation::standard(2), &QuadratureSpec::gauss(48)).unwrap();
    assert!(v.value.norm() < 1e-6);
    // the same with a non-vanishing pole value sin^2(theta) dphi
    let a = FormField::one_form(2, |x| vec![c(0.0), c(x[0].sin().powi(2))]);
    let da = exterior_derivative_numeric(&a, 1e-4).unwrap();
    let v = integrate(&da, &ChartAtlas::sphere2(), &Orientation::standard(2), &QuadratureSpec::gauss(48)).unwrap();
    assert!(v.value.norm() < 1e-6);
}

#[test]
fn chern_forms_are_closed() {
    // a 2-form in three dimensions, so closedness is not automatic
    let conn: Arc<dyn ConnectionField> = Arc::new(JetConnection::random_unitary(ChartAtlas::cube(3), 2, 6, 0.7));
    let f = char_form(conn, &InvariantPolynomial::chern(1)).unwrap();
    let d = exterior_derivative_numeric(&f, 1e-4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut largest_f = 0.0f64;
    for _ in 0..50 {
        let x = point(&mut rng, 3);
        let v = vectors(&mut rng, 3, 3);
        assert!(d.eval_scalar(0, &x, &v).unwrap().norm() < 1e-6);
        largest_f = largest_f.max(f.eval_scalar(0, &x, &v[..2]).unwrap().norm());
    }
    assert!(largest_f > 1e-2);
}

#[test]
fn refinement_is_stable() {
    let s2 = ChartAtlas::sphere2();
    let o = Orientation::standard(2);
    let cases: Vec<(FormField, ChartAtlas, Orientation)> = vec![
        (s2_area(), s2.clone(), o.clone()),
        (char_form(Arc::new(JetConnection::perturbed_monopole(1, 3, 0.4)), &InvariantPolynomial::chern(1)).unwrap(), s2, o),
        (mc_generator_form(CompactGroup::SU2, 2).unwrap(), ChartAtlas::euler3(), Orientation::standard(3)),
    ];
    for (f, atlas, o) in cases {
        let q = QuadratureSpec::gauss(24);
        let a = integrate(&f, &atlas, &o, &q).unwrap().value;
        let b = integrate(&f, &atlas, &o, &q.refined()).unwrap().value;
        assert!((a - b).norm() < 1e-3 * b.norm(), "{a} vs {b}");
    }
}

#[test]
fn integrate_rejects_misuse() {
    let s2 = ChartAtlas::sphere2();
    let dx = FormField::coordinate(2, 0);
    assert!(integrate(&dx, &s2, &Orientation::standard(2), &QuadratureSpec::gauss(8)).is_err());
    assert!(integrate(&s2_area(), &s2, &Orientation::standard(2), &QuadratureSpec::gauss(1)).is_err());
    assert!(integrate(&s2_area(), &s2, &Orientation::standard(2), &QuadratureSpec::monte_carlo(10, 0)).is_err());
    assert!(integrate(&s2_area(), &s2, &Orientation(vec![0, 0]), &QuadratureSpec::gauss(8)).is_err());
    assert!(exterior_derivative_numeric(&dx, 0.0).is_err());
    // swapping the chart order flips the sign
    let v = integrate(&s2_area(), &s2, &Orientation(vec![1, 0]), &QuadratureSpec::gauss(32)).unwrap();
    assert!((v.value.re + 4.0 * PI).abs() < 1e-6);
}
