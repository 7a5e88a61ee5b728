use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cwcs::charclasses::*;
use cwcs::forms::{
    basis, exterior_derivative_numeric, integrate, integrate_reduced, wedge, FormField, Orientation, QuadratureSpec,
};
use cwcs::geometry::{ChartAtlas, MetricField, RoundSphere};
use cwcs::jet::{Jet, Scalar};
use cwcs::linalg::{c, I};

fn probes(atlas: &ChartAtlas, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranges = &atlas.charts()[0].ranges;
    (0..n)
        .map(|_| ranges.iter().map(|&(a, b)| a + (b - a) * rng.random_range(0.05..0.95)).collect())
        .collect()
}

fn random_vectors(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<DVector<f64>> {
    (0..count).map(|_| DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))).collect()
}

fn chern1() -> Complex64 {
    I / (2.0 * PI)
}

fn s2_integral(f: &FormField) -> Complex64 {
    integrate(f, &ChartAtlas::sphere2(), &Orientation::standard(2), &QuadratureSpec::gauss(48)).unwrap().value
}

#[test]
fn flat_connection_has_zero_forms() {
    let flat: Arc<dyn ConnectionField> = Arc::new(JetConnection::flat(ChartAtlas::cube(4), 2));
    let f = char_form(flat, &InvariantPolynomial::trace_power(2)).unwrap();
    let v = random_vectors(&mut ChaCha8Rng::seed_from_u64(1), 4, 4);
    assert_eq!(f.eval_scalar(0, &[0.5; 4], &v).unwrap(), c(0.0));
}

#[test]
fn monopole_chern_numbers() {
    for n in [-2, -1, 1, 2] {
        let m: Arc<dyn ConnectionField> = Arc::new(JetConnection::monopole(n));
        let c1 = char_form(m, &InvariantPolynomial::chern(1)).unwrap();
        let got = s2_integral(&c1);
        assert!((got.re - n as f64).abs() < 1e-6 && got.im.abs() < 1e-9, "n = {n}: {got}");
        assert_eq!(monopole_chern_number(n), n as f64);
    }
}

#[test]
fn gauss_bonnet_on_round_sphere() {
    let s2: Arc<dyn MetricField> = Arc::new(RoundSphere::new(2, 1.0).unwrap());
    let lc: Arc<dyn ConnectionField> = Arc::new(LeviCivita::new(s2));
    let e = char_form(lc.clone(), &InvariantPolynomial::euler(2)).unwrap();
    let chi = s2_integral(&e);
    assert!((chi.re - 2.0).abs() < 1e-6, "{chi}");

    // odd rank is rejected
    let s3: Arc<dyn MetricField> = Arc::new(RoundSphere::new(3, 1.0).unwrap());
    assert!(char_form(Arc::new(LeviCivita::new(s3)), &InvariantPolynomial::pfaffian()).is_err());
}

#[test]
fn pfaffian_rejects_non_skew_curvature() {
    // a u(1) x gl connection whose curvature is hermitian-looking, not skew
    let conn = JetConnection::new("sym", ChartAtlas::cube(2), 2, |x: &[Jet]| {
        let z = num_complex::Complex::new(Jet::cst(0.0), Jet::cst(0.0));
        let r = |v: Jet| num_complex::Complex::new(v, Jet::cst(0.0));
        vec![vec![r(x[1]), z, z, r(x[1])], vec![z; 4]]
    });
    assert!(char_form(Arc::new(conn), &InvariantPolynomial::pfaffian()).is_err());
}

#[test]
fn chern_number_is_connection_independent() {
    let a: Arc<dyn ConnectionField> = Arc::new(JetConnection::perturbed_monopole(1, 11, 0.4));
    let b: Arc<dyn ConnectionField> = Arc::new(JetConnection::perturbed_monopole(1, 12, 0.4));
    let p = InvariantPolynomial::chern(1);
    let (ia, ib) = (s2_integral(&char_form(a.clone(), &p).unwrap()), s2_integral(&char_form(b.clone(), &p).unwrap()));
    assert!((ia - ib).norm() < 1e-6, "{ia} vs {ib}");
    // the perturbation changes the form itself
    let x = [1.0, 2.0];
    let fr = [basis(2, 0), basis(2, 1)];
    let (fa, fb) = (char_form(a, &p).unwrap(), char_form(b, &p).unwrap());
    assert!((fa.eval_scalar(0, &x, &fr).unwrap() - fb.eval_scalar(0, &x, &fr).unwrap()).norm() > 1e-3);
}

#[test]
fn char_forms_are_closed() {
    let atlas = ChartAtlas::cube(4);
    let conn: Arc<dyn ConnectionField> = Arc::new(JetConnection::random_unitary(atlas.clone(), 2, 5, 0.7));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for p in [InvariantPolynomial::chern(1), InvariantPolynomial::chern(2), InvariantPolynomial::chern_character(2)] {
        let f = char_form(conn.clone(), &p).unwrap();
        let df = exterior_derivative_numeric(&f, 1e-4).unwrap();
        for x in probes(&atlas, 50, 3) {
            let v = random_vectors(&mut rng, 4, df.degree());
            let r = df.eval_scalar(0, &x, &v).unwrap().norm();
            assert!(r < 1e-5, "{p}: {r}");
        }
    }
}

#[test]
fn transgression_identity_pointwise() {
    // k = 2 on a 4-cube with two random u(2) connections
    let atlas = ChartAtlas::cube(4);
    let c0: Arc<dyn ConnectionField> = Arc::new(JetConnection::random_unitary(atlas.clone(), 2, 21, 0.6));
    let c1: Arc<dyn ConnectionField> = Arc::new(JetConnection::random_unitary(atlas.clone(), 2, 22, 0.6));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in [1, 2] {
        let cs = relative_cs_form(c0.clone(), c1.clone(), k, TraceKind::Matrix).unwrap();
        let dcs = exterior_derivative_numeric(&cs, 1e-4).unwrap();
        let rhs = trace_power_form(c1.clone(), k, TraceKind::Matrix)
            .unwrap()
            .sub(&trace_power_form(c0.clone(), k, TraceKind::Matrix).unwrap())
            .unwrap();
        for x in probes(&atlas, 50, 5) {
            let v = random_vectors(&mut rng, 4, 2 * k);
            let r = (dcs.eval_scalar(0, &x, &v).unwrap() - rhs.eval_scalar(0, &x, &v).unwrap()).norm();
            assert!(r < 1e-5, "k = {k}: {r}");
        }
    }
    // identical connections transgress to zero
    let same = relative_cs_form(c0.clone(), c0, 2, TraceKind::Matrix).unwrap();
    let v = random_vectors(&mut rng, 4, 3);
    assert!(same.eval_scalar(0, &[0.3, 0.4, 0.5, 0.6], &v).unwrap().norm() < 1e-15);
}

#[test]
fn transgression_rejects_rank_mismatch() {
    let a: Arc<dyn ConnectionField> = Arc::new(JetConnection::flat(ChartAtlas::cube(3), 1));
    let b: Arc<dyn ConnectionField> = Arc::new(JetConnection::flat(ChartAtlas::cube(3), 2));
    assert!(relative_cs_form(a, b, 2, TraceKind::Matrix).is_err());
}

#[test]
fn su2_winding_normalization() {
    let flat: Arc<dyn ConnectionField> = Arc::new(JetConnection::flat(CompactGroup::SU2.atlas(), 2));
    let mc: Arc<dyn ConnectionField> = Arc::new(MaurerCartanConnection::new(CompactGroup::SU2));
    let cs = relative_cs_form(flat, mc, 2, TraceKind::Matrix).unwrap();
    let gen = mc_generator_form(CompactGroup::SU2, 2).unwrap();
    // with w_t = (1 - t) g^{-1}dg the transgression is -(1/3) tr((g^{-1}dg)^3)
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for x in probes(&CompactGroup::SU2.atlas(), 10, 7) {
        let v = random_vectors(&mut rng, 3, 3);
        let (a, b) = (cs.eval_scalar(0, &x, &v).unwrap(), gen.eval_scalar(0, &x, &v).unwrap());
        assert!((a + b / 3.0).norm() < 1e-10 * b.norm().max(1.0));
    }
    // left-invariant density: only theta varies
    let q = QuadratureSpec::gauss(48);
    let atlas = CompactGroup::SU2.atlas();
    let w = integrate_reduced(&gen, &atlas, &Orientation::standard(3), &q, &[1, 2]).unwrap().value;
    let want = su2_generator_integral_reference();
    assert!((w.norm() - want).abs() < 0.005 * want, "{w}");
    assert!((w.norm() - 24.0 * PI * PI).abs() < 1e-8);
    let wcs = integrate_reduced(&cs, &atlas, &Orientation::standard(3), &q, &[1, 2]).unwrap().value;
    assert!((3.0 * wcs.norm() - want).abs() < 0.005 * want);
}

#[test]
fn so3_and_u1_generators() {
    let q = QuadratureSpec::gauss(48);
    let gen = mc_generator_form(CompactGroup::SO3, 2).unwrap();
    let w = integrate_reduced(&gen, &CompactGroup::SO3.atlas(), &Orientation::standard(3), &q, &[1, 2]).unwrap().value;
    assert!((w.norm() - 48.0 * PI * PI).abs() < 1e-8, "{w}");
    let u1 = mc_generator_form(CompactGroup::U1, 1).unwrap();
    let w = integrate(&u1, &CompactGroup::U1.atlas(), &Orientation::standard(1), &q).unwrap().value;
    assert!((w - I * 2.0 * PI).norm() < 1e-12);
    // tr((g^{-1}dg)^5) vanishes on a 3-manifold
    assert_eq!(mc_generator_form(CompactGroup::SU2, 3).unwrap().degree(), 5);
    assert!(mc_generator_form(CompactGroup::SU2, 0).is_err());
}

#[test]
fn maurer_cartan_rejects_points_outside_the_chart() {
    assert!(maurer_cartan_form(CompactGroup::SU2, &[-0.1, 1.0, 1.0], &[1.0, 0.0, 0.0]).is_err());
    assert!(maurer_cartan_form(CompactGroup::SU2, &[1.0, 1.0], &[1.0, 0.0]).is_err());
}

#[test]
fn naturality_under_pullback() {
    // a map from the square into the sphere
    let map: Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync> = Arc::new(|y: &[Jet]| {
        vec![Jet::cst(0.4) + Jet::cst(1.5) * y[0] + Jet::cst(0.3) * y[1] * y[1], Jet::cst(1.0) + y[0] * y[1] * Jet::cst(2.0) + (y[1] * Jet::cst(3.0)).sin()]
    });
    let base: Arc<dyn ConnectionField> = Arc::new(JetConnection::perturbed_monopole(2, 5, 0.3));
    let pulled: Arc<dyn ConnectionField> = Arc::new(PulledBack::new(base.clone(), ChartAtlas::cube(2), 0, map.clone()));
    let p = InvariantPolynomial::chern(1);
    let lhs = char_form(pulled, &p).unwrap();
    let rhs = char_form(base, &p).unwrap().pullback(2, 0, map);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for x in probes(&ChartAtlas::cube(2), 20, 9) {
        let v = random_vectors(&mut rng, 2, 2);
        let r = (lhs.eval_scalar(0, &x, &v).unwrap() - rhs.eval_scalar(0, &x, &v).unwrap()).norm();
        assert!(r < 1e-9, "{r}");
    }
}

fn sphere_area_form() -> FormField {
    FormField::top_form(2, |x| c(x[0].sin()))
}

#[test]
fn fiber_integral_of_area_is_constant() {
    let fib = ProductFibration::new(ChartAtlas::sphere2(), ChartAtlas::cube(1)).unwrap();
    let area = sphere_area_form().pullback(3, 0, Arc::new(|x: &[Jet]| x[..2].to_vec()));
    let f = fiber_integration(&area, &fib, &QuadratureSpec::gauss(48)).unwrap();
    assert_eq!(f.degree(), 0);
    for b in [0.1, 0.5, 0.9] {
        let v = f.eval_scalar(0, &[b], &[]).unwrap();
        assert!((v.re - 4.0 * PI).abs() < 1e-6);
    }
    // degree below the fiber dimension gives zero
    let dz = FormField::coordinate(3, 0);
    let g = fiber_integration(&dz, &fib, &QuadratureSpec::gauss(8)).unwrap();
    assert_eq!(g.eval_scalar(0, &[0.5], &[]).unwrap(), c(0.0));
}

#[test]
fn fiber_integration_commutes_with_d() {
    // S^2 x [0,1]^2, a non-closed 3-form with fiber and mixed parts
    let fib = ProductFibration::new(ChartAtlas::sphere2(), ChartAtlas::cube(2)).unwrap();
    let f1 = FormField::function(4, |x| Complex64::new(x[0].sin() * x[2] * x[3], x[1].cos().powi(2) * x[3]));
    let f2 = FormField::function(4, |x| c((x[0] + x[2]).sin() * (2.0 * x[1]).cos() + x[2] * x[3] * x[3]));
    let dx = |i| FormField::coordinate(4, i);
    let a = wedge(&f1, &wedge(&wedge(&dx(0), &dx(1)).unwrap(), &dx(2)).unwrap())
        .unwrap()
        .add(&wedge(&f2, &wedge(&wedge(&dx(1), &dx(0)).unwrap(), &dx(3)).unwrap()).unwrap())
        .unwrap()
        .add(&wedge(&f1, &wedge(&wedge(&dx(0), &dx(2)).unwrap(), &dx(3)).unwrap()).unwrap())
        .unwrap();
    let q = QuadratureSpec::gauss(24);
    let lhs = exterior_derivative_numeric(&fiber_integration(&a, &fib, &q).unwrap(), 1e-4).unwrap();
    let rhs = fiber_integration(&exterior_derivative_numeric(&a, 1e-4).unwrap(), &fib, &q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut max_seen = 0.0f64;
    for b in probes(&ChartAtlas::cube(2), 8, 11) {
        let v = random_vectors(&mut rng, 2, 2);
        let (l, r) = (lhs.eval_scalar(0, &b, &v).unwrap(), rhs.eval_scalar(0, &b, &v).unwrap());
        assert!((l - r).norm() < 1e-5, "{l} vs {r}");
        max_seen = max_seen.max(l.norm());
    }
    assert!(max_seen > 1e-2, "test form should not be trivially closed");
}

#[test]
fn families_index_desk_check_on_point_base() {
    // int_Z ch_1(R^E) over S^2 with a point base, A-hat = 1 in this dimension
    for n in [-2, 1, 2] {
        let fib = ProductFibration::new(ChartAtlas::sphere2(), ChartAtlas::point()).unwrap();
        let m: Arc<dyn ConnectionField> = Arc::new(JetConnection::monopole(n));
        let ch1 = char_form(m.clone(), &InvariantPolynomial::chern_character(2)).unwrap();
        let pushed = fiber_integration(&ch1, &fib, &QuadratureSpec::gauss(48)).unwrap();
        let v = pushed.eval_scalar(0, &[], &[]).unwrap();
        assert!((v.re - n as f64).abs() < 1e-6, "{v}");
        let a_hat = char_form_series(
            Arc::new(LeviCivita::new(Arc::new(RoundSphere::new(2, 1.0).unwrap()))),
            &InvariantPolynomial::a_hat(2),
        )
        .unwrap();
        assert_eq!(a_hat.len(), 2);
    }
}

#[test]
fn bismut_form_of_pulled_back_monopole() {
    let fib = ProductFibration::new(ChartAtlas::sphere2(), ChartAtlas::cube(1)).unwrap();
    let q = QuadratureSpec::gauss(48);
    for n in [-1, 2] {
        let m: Arc<dyn ConnectionField> = Arc::new(JetConnection::monopole(n));
        let pulled: Arc<dyn ConnectionField> = Arc::new(PulledBack::from_fiber(m, fib.total().clone()));
        let bis = bismut_vertical_char_form(&fib, pulled.clone(), 1, &q).unwrap();
        let via_char = fiber_integration(&char_form(pulled, &InvariantPolynomial::trace_power(1)).unwrap(), &fib, &q).unwrap();
        for b in [0.2, 0.7] {
            let x = bis.eval_scalar(0, &[b], &[]).unwrap();
            assert!((x - Complex64::new(0.0, -2.0 * PI * n as f64)).norm() < 1e-8, "{x}");
            assert!((x - via_char.eval_scalar(0, &[b], &[]).unwrap()).norm() < 1e-8);
        }
    }
}

#[test]
fn bismut_form_is_closed() {
    // rank-2 connection on S^2 x [0,1]^3 depending on both factors; k = 2
    let fib = ProductFibration::new(ChartAtlas::sphere2(), ChartAtlas::cube(3)).unwrap();
    let conn: Arc<dyn ConnectionField> = Arc::new(JetConnection::ambient_sphere_product(fib.total().clone(), 31, 0.6).unwrap());
    let bis = bismut_vertical_char_form(&fib, conn, 2, &QuadratureSpec::gauss(16)).unwrap();
    assert_eq!(bis.degree(), 2);
    let d = exterior_derivative_numeric(&bis, 1e-4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut size = 0.0f64;
    for b in probes(&ChartAtlas::cube(3), 4, 13) {
        let v = random_vectors(&mut rng, 3, 3);
        assert!(d.eval_scalar(0, &b, &v).unwrap().norm() < 1e-5);
        size = size.max(bis.eval_scalar(0, &b, &v[..2]).unwrap().norm());
    }
    assert!(size > 1e-3);
    // too low a degree gives zero
    let low = bismut_vertical_char_form(
        &ProductFibration::new(CompactGroup::SU2.atlas(), ChartAtlas::cube(1)).unwrap(),
        Arc::new(JetConnection::flat(CompactGroup::SU2.atlas().product(&ChartAtlas::cube(1)).unwrap(), 1)),
        1,
        &QuadratureSpec::gauss(4),
    )
    .unwrap();
    assert_eq!(low.eval_scalar(0, &[0.5], &[]).unwrap(), c(0.0));
}

#[test]
fn leading_order_forms_carry_the_cosphere_factor() {
    let s2: Arc<dyn MetricField> = Arc::new(RoundSphere::new(2, 1.0).unwrap());
    let fr = [basis(2, 0), basis(2, 1)];
    let conns: Vec<Arc<dyn ConnectionField>> = vec![
        Arc::new(LeviCivita::new(s2)),
        Arc::new(JetConnection::random_unitary(ChartAtlas::sphere2(), 2, 3, 0.5)),
    ];
    for conn in conns {
        let lift: Arc<dyn ConnectionField<cwcs::symbols::SymbolExpansion>> = Arc::new(MultiplicationLift::new(conn.clone(), 4, 2));
        let lo = leading_order_char_form(lift, 1).unwrap();
        let mat = trace_power_form(conn, 1, TraceKind::Matrix).unwrap();
        for x in probes(&ChartAtlas::sphere2(), 10, 14) {
            let (a, b) = (lo.eval_scalar(0, &x, &fr).unwrap(), mat.eval_scalar(0, &x, &fr).unwrap());
            assert!((a - b * 2.0).norm() < 1e-9);
        }
    }
    for n in [-1, 2] {
        let lift: Arc<dyn ConnectionField<cwcs::symbols::SymbolExpansion>> =
            Arc::new(MultiplicationLift::new(Arc::new(JetConnection::monopole(n)), 4, 2));
        let lo = leading_order_char_form(lift, 1).unwrap();
        let v = s2_integral(&lo) * chern1();
        assert!((v.re - 2.0 * n as f64).abs() < 1e-6, "{v}");
    }
    let flat: Arc<dyn ConnectionField<cwcs::symbols::SymbolExpansion>> =
        Arc::new(MultiplicationLift::new(Arc::new(JetConnection::flat(ChartAtlas::sphere2(), 2)), 4, 2));
    let lo = leading_order_char_form(flat, 1).unwrap();
    assert_eq!(lo.eval_scalar(0, &[1.0, 1.0], &fr).unwrap(), c(0.0));
}
