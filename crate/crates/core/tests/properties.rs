use std::collections::BTreeMap;

use proptest::prelude::*;

use cwcs::forms::gauss_legendre;
use cwcs::ids::CatalogId;
use cwcs::jet::{Jet, Scalar};

// f(x, y) = sin(x y) + exp(x) / (1 + y^2), differentiated by hand
fn f<S: Scalar>(x: S, y: S) -> S {
    (x * y).sin() + x.exp() / (S::one() + y * y)
}

fn grad_hess(x: f64, y: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let (s, c, e, q) = ((x * y).sin(), (x * y).cos(), x.exp(), 1.0 + y * y);
    let fx = y * c + e / q;
    let fy = x * c - 2.0 * y * e / (q * q);
    let fxx = -y * y * s + e / q;
    let fxy = c - x * y * s - 2.0 * y * e / (q * q);
    let fyy = -x * x * s + e * (6.0 * y * y - 2.0) / (q * q * q);
    ([fx, fy], [[fxx, fxy], [fxy, fyy]])
}

proptest! {
    #[test]
    fn jets_carry_exact_second_derivatives(x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let v = Jet::seed(&[x, y]);
        let j = f(v[0], v[1]);
        let (g, h) = grad_hess(x, y);
        prop_assert!((j.value() - f(x, y)).abs() < 1e-13);
        for a in 0..2 {
            prop_assert!((j.grad(a) - g[a]).abs() < 1e-12 * (1.0 + g[a].abs()));
            for b in 0..2 {
                prop_assert!((j.hess(a, b) - h[a][b]).abs() < 1e-12 * (1.0 + h[a][b].abs()));
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly(
        n in 2usize..40,
        coeffs in proptest::collection::vec(-1.0f64..1.0, 1..80),
    ) {
        let deg = (2 * n - 1).min(coeffs.len() - 1);
        let (x, w) = gauss_legendre(n);
        let p = |t: f64| coeffs[..=deg].iter().rev().fold(0.0, |acc, c| acc * t + c);
        let got: f64 = x.iter().zip(&w).map(|(&t, &wi)| wi * p(t)).sum();
        // odd powers vanish on [-1, 1]; x^k integrates to 2 / (k + 1)
        let exact: f64 = coeffs[..=deg].iter().enumerate().filter(|(k, _)| k % 2 == 0).map(|(k, c)| 2.0 * c / (k as f64 + 1.0)).sum();
        prop_assert!((got - exact).abs() < 1e-12, "n = {}, deg = {}: {} vs {}", n, deg, got, exact);
    }

    #[test]
    fn catalog_ids_have_one_canonical_spelling(
        name in "[a-z][a-z0-9-]{0,10}",
        params in proptest::collection::btree_map("[a-z]{1,6}", "[a-z0-9.-]{1,6}", 0..5),
    ) {
        let mut pairs: Vec<(String, String)> = params.clone().into_iter().collect();
        pairs.reverse();
        let query: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let text = if query.is_empty() { name.clone() } else { format!("{name}?{}", query.join("&")) };
        let id = CatalogId::parse(&text).unwrap();
        prop_assert_eq!(&id.params, &params.into_iter().collect::<BTreeMap<_, _>>());
        let canonical = id.to_string();
        prop_assert_eq!(CatalogId::parse(&canonical).unwrap().to_string(), canonical);
    }
}
