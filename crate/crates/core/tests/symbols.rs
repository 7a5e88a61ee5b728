use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cwcs::linalg::c;
use cwcs::symbols::*;

const DEPTH: usize = 6;
const N: usize = 16;

// Coefficients of (1 + u)^s by the recurrence a_{j+1} = a_j (s - j) / (j + 1),
// multiplied as plain sequences: the Cauchy product.
fn binomial_series(s: f64, len: usize) -> Vec<f64> {
    let mut a = vec![1.0];
    for j in 0..len - 1 {
        a.push(a[j] * (s - j as f64) / (j as f64 + 1.0));
    }
    a
}

fn cauchy(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|n| (0..=n).map(|i| a[i] * b[n - i]).sum()).collect()
}

fn scalar(e: &SymbolExpansion, order: f64) -> (Complex64, Complex64) {
    let h = e.component_at(order).unwrap();
    (h.plus.entry(0, 0, 0), h.minus.entry(0, 0, 0))
}

#[test]
fn powers_compose_like_binomial_series() {
    for (s1, s2) in [(0.5, -0.5), (1.0, -1.0), (2.0, -2.0), (0.5, 1.5), (-0.25, 2.0), (1.0, 0.5)] {
        let a = power_symbol(s1, 2, N, DEPTH);
        let b = power_symbol(s2, 2, N, DEPTH);
        let p = a.compose(&b).unwrap();
        assert_eq!(p.leading_order(), 2.0 * (s1 + s2));
        let oracle = cauchy(&binomial_series(s1, DEPTH / 2 + 1), &binomial_series(s2, DEPTH / 2 + 1));
        for (j, comp) in p.components().iter().enumerate() {
            let expected = if j % 2 == 0 { oracle[j / 2] } else { 0.0 };
            for m in [&comp.plus, &comp.minus] {
                assert!((m.entry(0, 0, 0) - expected).norm() < 1e-12, "s = {s1}, {s2}, j = {j}");
                assert!((m.entry(0, 1, 1) - expected).norm() < 1e-12);
                assert!(m.entry(0, 0, 1).norm() == 0.0 && m.mode(1).iter().all(|v| v.norm() == 0.0));
            }
        }
    }
}

#[test]
fn inverse_powers_give_the_identity() {
    for s in [0.5, 1.0, 2.0] {
        let p = power_symbol(s, 2, N, DEPTH).compose(&power_symbol(-s, 2, N, DEPTH)).unwrap();
        assert_eq!(p.leading_order(), 0.0);
        assert_eq!(p.depth(), DEPTH as f64);
        let (lp, lm) = scalar(&p, 0.0);
        assert!((lp - 1.0).norm() < 1e-12 && (lm - 1.0).norm() < 1e-12);
        for comp in &p.components()[1..] {
            assert!(comp.norm() < 1e-10, "s = {s}: order {} has {}", comp.order, comp.norm());
        }
    }
}

#[test]
fn power_coefficients() {
    let half = power_symbol(0.5, 1, N, DEPTH);
    for (order, v) in [(1.0, 1.0), (-1.0, 0.5), (-3.0, -0.125), (-5.0, 0.0625)] {
        assert!((scalar(&half, order).0.re - v).abs() < 1e-15);
    }
    let inv = power_symbol(-1.0, 1, N, DEPTH);
    for j in 0..=3 {
        let expected = if j % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(scalar(&inv, -2.0 - 2.0 * j as f64).0.re, expected);
    }
    let lap = power_symbol(1.0, 3, N, 4);
    assert_eq!(lap.component_at(2.0).unwrap().plus.entry(0, 2, 2), c(1.0));
    assert_eq!(lap.component_at(0.0).unwrap().minus.entry(0, 1, 1), c(1.0));
    assert!(lap.component_at(-2.0).unwrap().is_zero());
    assert!(lap.components().iter().filter(|h| h.order.rem_euclid(2.0) == 1.0).all(|h| h.is_zero()));
}

#[test]
fn composition_is_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for t in 0..10u64 {
        let orders = [rng.random_range(-2..=1) as f64, rng.random_range(-2..=1) as f64, rng.random_range(-2..=1) as f64];
        let [a, b, cc] = [0, 1, 2].map(|i| SymbolExpansion::random(orders[i], 2, N, 5, 3, 100 * t + i as u64));
        let left = a.compose(&b).unwrap().compose(&cc).unwrap();
        let right = a.compose(&b.compose(&cc).unwrap()).unwrap();
        assert_eq!(left.leading_order(), orders.iter().sum::<f64>());
        // modes stay within 9 of the origin, far below the cutoff
        assert_eq!(left.truncation_loss(), 0.0);
        let d = left.distance(&right).unwrap();
        assert!(d < 1e-9 * left.max_norm().max(1.0), "triple {t}: {d}");
    }
}

#[test]
fn truncation_loss_is_tracked() {
    let a = SymbolExpansion::random(0.0, 1, 6, 3, 5, 1);
    let b = SymbolExpansion::random(0.0, 1, 6, 3, 5, 2);
    let p = a.compose(&b).unwrap();
    assert!(p.truncation_loss() > 0.0);
    let r = wodzicki_residue(&p);
    assert_eq!(r.truncation_loss, p.truncation_loss());
}

#[test]
fn traces_vanish_on_commutators() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let weights = |rng: &mut ChaCha8Rng| DirectionWeights {
        plus: (-3..=3).map(|k| (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).collect(),
        minus: (-3..=3).map(|k| (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).collect(),
    };
    let mut largest_product_trace = 0.0f64;
    for i in 0..50u64 {
        let a = SymbolExpansion::random(0.0, 2, N, DEPTH, 3, 2 * i);
        let b = SymbolExpansion::random(0.0, 2, N, DEPTH, 3, 2 * i + 1);
        let comm = a.commutator(&b).unwrap();
        assert!(wodzicki_residue(&comm).value.norm() < 1e-10);
        assert!(leading_order_trace(&comm, None).unwrap().value.norm() < 1e-10);
        let w = weights(&mut rng);
        assert!(leading_order_trace(&comm, Some(&w)).unwrap().value.norm() < 1e-10);
        // the products themselves are not traceless, so the check has teeth
        let ab = a.compose(&b).unwrap();
        largest_product_trace = largest_product_trace.max(wodzicki_residue(&ab).value.norm());
    }
    assert!(largest_product_trace > 1e-2);
}

#[test]
fn residue_examples() {
    assert_eq!(wodzicki_residue(&power_symbol(-0.5, 1, N, DEPTH)).value, c(2.0));
    assert_eq!(wodzicki_residue(&power_symbol(-0.5, 3, N, DEPTH)).value, c(6.0));
    let mult = SymbolExpansion::random(0.0, 2, N, DEPTH, 4, 9);
    let mult = SymbolExpansion::multiplication(mult.components()[0].plus.clone(), DEPTH);
    assert_eq!(wodzicki_residue(&mult).value, c(0.0));
    // orders at or below -2 carry no residue, whatever the symbol
    for (m, seed) in [(-2.0, 1), (-3.0, 2), (-2.5, 3), (-7.0, 4)] {
        let r = wodzicki_residue(&SymbolExpansion::random(m, 2, N, DEPTH, 3, seed));
        assert_eq!(r.value, c(0.0));
        assert!(!r.truncated);
    }
    let shallow = wodzicki_residue(&SymbolExpansion::random(1.0, 1, N, 1, 2, 5));
    assert!(shallow.truncated);
    let plus = wodzicki_residue_directed(&power_symbol(-0.5, 1, N, DEPTH), DirectionMode::Plus);
    assert_eq!(plus.value, c(1.0));
}

#[test]
fn leading_order_trace_examples() {
    assert_eq!(leading_order_trace(&SymbolExpansion::identity(4, N, DEPTH), None).unwrap().value, c(8.0));
    let low = SymbolExpansion::random(-1.0, 2, N, DEPTH, 3, 4);
    assert_eq!(leading_order_trace(&low, None).unwrap().value, c(0.0));
    assert!(leading_order_trace(&SymbolExpansion::random(1.0, 2, N, DEPTH, 3, 4), None).is_err());
}

#[test]
fn tables_round_trip_bit_exactly() {
    let a = SymbolExpansion::random(0.0, 2, N, DEPTH, 5, 3);
    let b = power_symbol(0.5, 2, N, DEPTH);
    let products = [a.compose(&b).unwrap(), b.compose(&power_symbol(-0.25, 2, N, DEPTH)).unwrap(), a];
    for e in products {
        let text = to_table(&e);
        let back = from_table(&text).unwrap();
        assert_eq!(back, e);
        assert_eq!(to_table(&back), text);
    }
}

#[test]
fn mismatches_are_rejected() {
    let a = power_symbol(1.0, 2, N, DEPTH);
    assert!(a.compose(&power_symbol(1.0, 3, N, DEPTH)).is_err());
    assert!(a.compose(&power_symbol(1.0, 2, 8, DEPTH)).is_err());
    assert!(a.checked_add(&power_symbol(0.3, 2, N, DEPTH)).is_err());
}
