use proptest::prelude::*;

use whitney_lab::jets::{compatibility_residual, taylor_poly_eval, JetError, MultiIndex, WhitneyField};

/// Polynomial `Σ c_γ x^γ` with exact derivatives computed term by term.
#[derive(Debug, Clone)]
struct Poly {
    terms: Vec<(MultiIndex, f64)>,
}

impl Poly {
    fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (g, c) in &self.terms {
            if g.entries().iter().zip(alpha.entries()).any(|(gi, ai)| ai > gi) {
                continue;
            }
            let mut coef = *c;
            let mut term = 1.0;
            for ((&gi, &ai), &xi) in g.entries().iter().zip(alpha.entries()).zip(x) {
                for j in 0..ai {
                    coef *= (gi - j) as f64;
                }
                term *= xi.powi((gi - ai) as i32);
            }
            sum += coef * term;
        }
        sum
    }
}

fn poly(n: usize, m: u32) -> impl Strategy<Value = Poly> {
    let indices = MultiIndex::all_up_to(n, m);
    prop::collection::vec(-3i32..=3, indices.len())
        .prop_map(move |c| Poly { terms: indices.iter().cloned().zip(c.into_iter().map(f64::from)).collect() })
}

fn grid_points(n: usize, k: usize) -> Vec<Vec<f64>> {
    (0..k).map(|i| (0..n).map(|j| 0.3 * i as f64 - 0.5 + 0.17 * (i * j) as f64 % 0.9).collect()).collect()
}

fn case() -> impl Strategy<Value = (usize, u32, Poly, Poly)> {
    (1usize..=3, 0u32..=4).prop_flat_map(|(n, m)| (Just(n), Just(m), poly(n, m), poly(n, m)))
}

fn field_of(p: &Poly, n: usize, m: u32) -> WhitneyField {
    WhitneyField::from_fn(n, m, grid_points(n, 5), |a, x| p.derivative(a, x)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_jets_are_compatible((n, m, p, _) in case()) {
        let r = compatibility_residual(&field_of(&p, n, m)).unwrap();
        prop_assert!(r.max <= 1e-12, "max {}", r.max);
    }

    #[test]
    fn adding_polynomial_jets_preserves_residual((n, m, p, q) in case(), extra in prop::collection::vec(-1.0f64..1.0, 1..4)) {
        let pts = grid_points(n, 5);
        let wobble = |a: &MultiIndex, x: &[f64]| {
            if a.order() == 0 { extra.iter().enumerate().map(|(k, c)| c * (x[0] * (k + 1) as f64).sin()).sum() } else { 0.0 }
        };
        let f = WhitneyField::from_fn(n, m, pts.clone(), |a, x| p.derivative(a, x) + wobble(a, x)).unwrap();
        let g = WhitneyField::from_fn(n, m, pts, |a, x| q.derivative(a, x)).unwrap();
        let before = compatibility_residual(&f).unwrap();
        let after = compatibility_residual(&f.add_jets(&g).unwrap()).unwrap();
        for (u, v) in before.entries.iter().zip(&after.entries) {
            prop_assert_eq!(&u.alpha, &v.alpha);
            prop_assert!((u.value - v.value).abs() <= 1e-9 * (1.0 + u.value.abs()), "{} vs {}", u.value, v.value);
        }
    }

    #[test]
    fn top_order_taylor_polynomial_is_the_jet((n, m, p, _) in case(), x in prop::collection::vec(-2.0f64..2.0, 3)) {
        let f = field_of(&p, n, m);
        for alpha in MultiIndex::all_up_to(n, m).into_iter().filter(|a| a.order() == m) {
            let t = taylor_poly_eval(&f, 1, &alpha, &x[..n]).unwrap();
            prop_assert_eq!(t, f.jet(1, &alpha).unwrap());
        }
    }
}

fn sine(h: f64) -> WhitneyField {
    WhitneyField::from_fn(1, 1, vec![vec![0.0], vec![h]], |a, p| if a.order() == 0 { p[0].sin() } else { p[0].cos() })
        .unwrap()
}

#[test]
fn sine_residual_refines_with_h() {
    let zero = MultiIndex::zero(1);
    let maxima: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|&h| compatibility_residual(&sine(h)).unwrap().max).collect();
    for w in maxima.windows(2) {
        // max is |1 - cos h| ≈ h²/2, so each halving of h quarters it
        assert!(w[1] <= 0.5 * w[0], "{maxima:?}");
        assert!((w[1] / w[0] - 0.25).abs() <= 0.01, "{maxima:?}");
    }
    let r = compatibility_residual(&sine(0.1)).unwrap();
    let oracle = (0.1f64.sin() - 0.1).abs() / 0.1;
    assert!((r.get(&zero, 1, 0).unwrap() - oracle).abs() <= 1e-15);
    assert!((oracle / 1.666e-3 - 1.0).abs() <= 0.01);
}

#[test]
fn two_dimensional_hand_computed_residual() {
    // f = x y at a = (0, 0), x = (1, 2), m = 1
    let f = WhitneyField::from_fn(2, 1, vec![vec![0.0, 0.0], vec![1.0, 2.0]], |a, p| match a.entries() {
        [0, 0] => p[0] * p[1],
        [1, 0] => p[1],
        _ => p[0],
    })
    .unwrap();
    let r = compatibility_residual(&f).unwrap();
    let d = 5f64.sqrt();
    assert!((r.get(&MultiIndex::zero(2), 1, 0).unwrap() - 2.0 / d).abs() < 1e-15);
    assert_eq!(r.get(&MultiIndex::new(vec![1, 0]), 1, 0).unwrap(), 2.0);
    assert_eq!(r.entries.len(), 2 * 3);
}

#[test]
fn field_json_roundtrip() {
    let f = sine(0.1);
    let text = serde_json::to_string(&f).unwrap();
    assert!(text.contains("\"0\""));
    let back: WhitneyField = serde_json::from_str(&text).unwrap();
    assert_eq!(back, f);
    assert!(serde_json::from_str::<WhitneyField>(r#"{"n":1,"m":1,"points":[[0.0]],"jets":[{"0":1.0}]}"#).is_err());
}

#[test]
fn invalid_requests_are_errors() {
    let f = sine(0.1);
    assert!(matches!(taylor_poly_eval(&f, 5, &MultiIndex::zero(1), &[0.0]), Err(JetError::IndexOutOfRange(_))));
    assert!(matches!(taylor_poly_eval(&f, 0, &MultiIndex::new(vec![2]), &[0.0]), Err(JetError::IndexOutOfRange(_))));
    let single = WhitneyField::from_fn(1, 1, vec![vec![0.0]], |_, _| 0.0).unwrap();
    assert!(matches!(compatibility_residual(&single), Err(JetError::TooFewPoints(1))));
    assert!(matches!(WhitneyField::from_fn(1, 21, vec![vec![0.0]], |_, _| 0.0), Err(JetError::OrderTooLarge(21))));
}
