use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use whitney_lab::laguerre::{
    gauss_laguerre, half_line_rule, laguerre_coefficients, laguerre_fn, laguerre_fn_all, laguerre_poly,
    reconstruction_report, LaguerreError,
};

/// Integer coefficients `c_k` with `n! P_n(x) = Σ c_k x^k`, from Leibniz
/// applied to `(d/dx)^n (e^{-x} x^n)`: the `j`-th derivative of `x^n`
/// pairs with `(-1)^{n-j} e^{-x}`.
fn rodrigues_scaled(n: u32) -> Vec<i128> {
    let fact = |k: u32| (1..=k as i128).product::<i128>();
    let binom = |n: u32, k: u32| fact(n) / (fact(k) * fact(n - k));
    let mut c = vec![0i128; n as usize + 1];
    for j in 0..=n {
        let sign = if (n - j).is_multiple_of(2) { 1 } else { -1 };
        c[(n - j) as usize] += sign * binom(n, j) * fact(n) / fact(n - j);
    }
    c
}

fn rodrigues_eval(n: u32, x: f64) -> f64 {
    let nf: f64 = (1..=n).map(f64::from).product();
    rodrigues_scaled(n).iter().rev().fold(0.0, |acc, &c| acc * x + c as f64) / nf
}

#[test]
fn recurrence_matches_rodrigues() {
    assert_eq!(rodrigues_scaled(2), vec![2, -4, 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let x = rng.random_range(0.0..15.0);
        for n in 0..=6 {
            let v = laguerre_poly(n as usize, x).unwrap();
            assert!((v - rodrigues_eval(n, x)).abs() <= 1e-10 * (1.0 + v.abs()), "n={n} x={x}");
        }
    }
}

#[test]
fn values_at_origin_are_one() {
    for n in 0..=10 {
        assert_eq!(rodrigues_scaled(n)[0], (1..=n as i128).product::<i128>());
        assert!((laguerre_fn(n as usize, 0.0).unwrap() - 1.0).abs() <= 1e-14);
    }
}

#[test]
fn negative_arguments_are_rejected() {
    assert!(matches!(laguerre_poly(2, -0.1), Err(LaguerreError::NegativeArgument(_))));
    assert!(matches!(laguerre_fn(0, -1.0), Err(LaguerreError::NegativeArgument(_))));
}

#[test]
fn orthonormality_at_doubled_nodes() {
    let rule = gauss_laguerre(128);
    let mut worst = 0.0f64;
    for n in 0..=30 {
        for m in n..=30 {
            let v: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&x, w)| w * laguerre_poly(n, x).unwrap() * laguerre_poly(m, x).unwrap())
                .sum();
            worst = worst.max((v - if n == m { 1.0 } else { 0.0 }).abs());
        }
    }
    assert!(worst <= 1e-10, "{worst:e}");
    let plain = half_line_rule(64);
    let mass: f64 = plain.nodes.iter().zip(&plain.weights).map(|(&x, w)| w * laguerre_fn(0, x).unwrap().powi(2)).sum();
    assert!((mass - 1.0).abs() <= 1e-12);
}

#[test]
fn exponential_coefficients_decay_by_a_third() {
    let c = laguerre_coefficients(|x: &[f64]| (-x[0]).exp(), 1, 21).unwrap();
    for n in 0..=20 {
        let r = c.get(&[n + 1]) / c.get(&[n]);
        assert!((r - 1.0 / 3.0).abs() <= 1e-6, "n={n}: {r}");
    }
}

#[test]
fn third_function_has_delta_coefficients() {
    let c = laguerre_coefficients(|x: &[f64]| laguerre_fn(3, x[0]).unwrap(), 1, 8).unwrap();
    for n in 0..=8 {
        assert!((c.get(&[n]) - if n == 3 { 1.0 } else { 0.0 }).abs() <= 1e-10, "a_{n} = {}", c.get(&[n]));
    }
}

#[test]
fn product_coefficients_factor() {
    let g = |t: f64| (-t).exp();
    let h = |t: f64| (1.0 + t) * (-2.0 * t).exp();
    let one_g = laguerre_coefficients(|x: &[f64]| g(x[0]), 1, 6).unwrap();
    let one_h = laguerre_coefficients(|x: &[f64]| h(x[0]), 1, 6).unwrap();
    let two = laguerre_coefficients(|x: &[f64]| g(x[0]) * h(x[1]), 2, 6).unwrap();
    for m in 0..=6 {
        for n in 0..=6 {
            let expect = one_g.get(&[m]) * one_h.get(&[n]);
            assert!((two.get(&[m, n]) - expect).abs() <= 1e-9, "({m},{n})");
        }
    }
    let exp2 = laguerre_coefficients(|x: &[f64]| (-x[0] - x[1]).exp(), 2, 4).unwrap();
    for m in 0..=4 {
        for n in 0..=4 {
            let closed = (4.0 / 9.0) * 3f64.powi(-((m + n) as i32));
            assert!((exp2.get(&[m, n]) - closed).abs() <= 1e-10);
        }
    }
}

#[test]
fn reconstruction_and_tails() {
    let f = |x: &[f64]| laguerre_fn(2, x[0]).unwrap();
    let c = laguerre_coefficients(f, 1, 10).unwrap();
    let probes: Vec<Vec<f64>> = [0.0, 0.5, 2.0, 7.0].iter().map(|&x| vec![x]).collect();
    let rep = reconstruction_report(&c, f, &probes, &[2, 5, 10]).unwrap();
    assert!(rep.rows.iter().all(|r| r.max_error <= 1e-9));

    let e = |x: &[f64]| (-x[0]).exp();
    let c = laguerre_coefficients(e, 1, 20).unwrap();
    let ns: Vec<usize> = (0..20).collect();
    let rep = reconstruction_report(&c, e, &[vec![0.0]], &ns).unwrap();
    assert!(rep.rows.windows(2).all(|w| w[1].abs_tail < w[0].abs_tail));
    // tail of the geometric series Σ_{n>N} (2/3) 3^{-n} = 3^{-N-1}
    for row in &rep.rows[..12] {
        let oracle = 3f64.powi(-(row.n as i32) - 1) - 3f64.powi(-21);
        assert!((row.abs_tail - oracle).abs() <= 1e-9, "N={}", row.n);
        assert!((row.max_error - 3f64.powi(-(row.n as i32) - 1)).abs() <= 1e-9);
    }
}

#[test]
fn coefficient_csv_layout() {
    let c = laguerre_coefficients(|x: &[f64]| (-x[0] - x[1]).exp(), 2, 2).unwrap();
    let mut out = Vec::new();
    c.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n1,n2,value");
    assert_eq!(lines.len(), 10);
    assert!(lines[2].starts_with("0,1,"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn all_matches_single(n in 0usize..40, x in 0.0f64..60.0) {
        let all = laguerre_fn_all(n, x);
        prop_assert_eq!(all.len(), n + 1);
        for (k, v) in all.iter().enumerate() {
            let single = laguerre_fn(k, x).unwrap();
            prop_assert!((v - single).abs() <= 1e-12 * (1.0 + single.abs()));
        }
    }

    #[test]
    fn laguerre_functions_are_bounded(n in 0usize..60, x in 0.0f64..200.0) {
        prop_assert!(laguerre_fn(n, x).unwrap().abs() <= 1.0 + 1e-12);
    }
}
