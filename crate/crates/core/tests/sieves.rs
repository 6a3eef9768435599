use std::sync::OnceLock;

use friable::oracle::{evaluate_naive, factor_naive};
use friable::sieves::{
    d_exact, dickman_sum_exact, integral_identity_check, n_exact, psi_exact, s_exact, CountQuery,
    FactorTables, Numerator, StreamingFactors,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn million() -> &'static FactorTables {
    static T: OnceLock<FactorTables> = OnceLock::new();
    T.get_or_init(|| FactorTables::build(1_000_000).unwrap())
}

fn small() -> &'static FactorTables {
    static T: OnceLock<FactorTables> = OnceLock::new();
    T.get_or_init(|| FactorTables::build(10_000).unwrap())
}

#[test]
fn psi_examples() {
    let t = small();
    assert_eq!(psi_exact(t, 10.0, 2.0).unwrap(), 4);
    // 5-smooth n ≤ 100 listed by trial division.
    let smooth5 = (1..=100u64).filter(|&n| factor_naive(n).0 <= 5).count() as u64;
    assert_eq!(smooth5, 34);
    assert_eq!(psi_exact(t, 100.0, 5.0).unwrap(), smooth5);
    for x in [1.0, 17.5, 999.0, 10_000.0] {
        assert_eq!(psi_exact(t, x, x).unwrap(), x.floor() as u64);
    }
    assert!(psi_exact(t, 10_001.0, 5.0).is_err());
    assert!(psi_exact(t, 0.5, 5.0).is_err());
    assert!(psi_exact(t, 100.0, 0.5).is_err());
}

#[test]
fn d_examples() {
    let t = small();
    assert_eq!(d_exact(t, 10.0, 2.0).unwrap(), 4);
    for x in [1.0, 50.0, 10_000.0] {
        assert_eq!(d_exact(t, x, 1.0).unwrap(), x.floor() as u64);
    }
    for (x, u) in [(10_000.0f64, 1.5f64), (5000.0, 2.0), (10_000.0, 3.3), (777.0, 2.5)] {
        let d = d_exact(t, x, u).unwrap();
        assert!(d >= 1 && d <= psi_exact(t, x, x.powf(1.0 / u)).unwrap());
    }
    // n = 4 with u = 2 sits exactly on the boundary and counts.
    assert_eq!(d_exact(t, 4.0, 2.0).unwrap(), 2);
    assert!(d_exact(t, 10.0, -1.0).is_err());
}

#[test]
fn n_and_s_examples() {
    let t = small();
    assert_eq!(n_exact(t, 20.0, 3.0).unwrap(), 7);
    assert_eq!(n_exact(t, 10.0, 1.0).unwrap(), 1);
    assert_eq!(n_exact(t, 9999.0, 9999.0).unwrap(), 9999);
    let expect = [1u64, 4, 8, 9, 16, 25, 27, 32, 36, 48, 49, 54, 64, 72, 81, 96, 100];
    let listed: Vec<u64> = (1..=100u64)
        .filter(|&n| n == 1 || (factor_naive(n).1 as f64) <= (n as f64).sqrt() * (1.0 + 1e-12))
        .collect();
    assert_eq!(listed, expect);
    assert_eq!(s_exact(t, 100.0, 0.5, 0.0).unwrap(), 17);
    assert_eq!(s_exact(t, 5000.0, 1.0, 0.0).unwrap(), 5000);
    assert!(s_exact(t, 100.0, 0.0, 0.0).is_err());
    assert!(s_exact(t, 100.0, 1.2, 0.0).is_err());
}

#[test]
fn dickman_sum_examples() {
    let t = small();
    assert!((dickman_sum_exact(t, 3.0, Numerator::LogN).unwrap() - 2.0).abs() < 1e-15);
    assert!((dickman_sum_exact(t, 4.0, Numerator::LogN).unwrap() - 4.0).abs() < 1e-15);
    let nine: f64 = (2..=10u64)
        .map(|n| (n as f64).ln() / (factor_naive(n).0 as f64).ln())
        .sum();
    assert!((nine - 14.06161).abs() < 1e-5);
    assert!((dickman_sum_exact(t, 10.0, Numerator::LogN).unwrap() - nine).abs() < 1e-13);
    let logx: f64 = (2..=10u64).map(|n| 10f64.ln() / (factor_naive(n).0 as f64).ln()).sum();
    assert!((dickman_sum_exact(t, 10.0, Numerator::LogX).unwrap() - logx).abs() < 1e-13);
    assert!(dickman_sum_exact(t, 1.5, Numerator::LogN).is_err());
}

#[test]
fn integral_identity() {
    assert!(integral_identity_check(small(), 10.0).unwrap() <= 1e-9);
    assert!(integral_identity_check(small(), 100.0).unwrap() <= 1e-9);
    assert!(integral_identity_check(million(), 1e6).unwrap() <= 1e-6);
}

#[test]
fn friable_bound_on_million() {
    let t = million();
    for i in 0..=12 {
        let u = 2.0 + 0.5 * i as f64;
        let x = 1e6f64;
        let psi = psi_exact(t, x, x.powf(1.0 / u)).unwrap() as f64;
        let c = psi / (x * (-u / 2.0).exp());
        assert!(c <= 10.0, "u = {u}: C = {c}");
    }
}

#[test]
fn streaming_counts_match() {
    let s = StreamingFactors::new(1_000_000).unwrap();
    let t = million();
    for q in [
        CountQuery::Psi { x: 999_999.0, y: 300.0 },
        CountQuery::D { x: 1e6, u: 2.7 },
        CountQuery::N { x: 876_543.0, y: 4321.0 },
        CountQuery::S { x: 1e6, theta: 0.45, alpha: -0.5 },
    ] {
        assert_eq!(q.evaluate(&s).unwrap(), q.evaluate(t).unwrap(), "{q:?}");
    }
    assert!((dickman_sum_exact(&s, 1e6, Numerator::LogN).unwrap()
        - dickman_sum_exact(t, 1e6, Numerator::LogN).unwrap())
    .abs()
        < 1e-6);
}

#[test]
fn agrees_with_trial_division() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let t = small();
    for i in 0..200 {
        let x = rng.gen_range(1.0..=10_000.0f64);
        let q = match i % 4 {
            0 => CountQuery::Psi { x, y: rng.gen_range(1.0..200.0) },
            1 => CountQuery::D { x, u: if i % 3 == 0 { rng.gen_range(1..5) as f64 } else { rng.gen_range(0.5..5.0) } },
            2 => CountQuery::N { x, y: rng.gen_range(1.0..2000.0) },
            _ => CountQuery::S { x, theta: rng.gen_range(0.05..=1.0), alpha: rng.gen_range(-2.0..2.0) },
        };
        assert_eq!(q.evaluate(t).unwrap(), evaluate_naive(&q), "{q:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monotone_in_parameters(x in 1.0f64..10_000.0, dx in 0.0f64..3000.0, y in 1.0f64..500.0, dy in 0.0f64..500.0) {
        let t = small();
        let x2 = (x + dx).min(10_000.0);
        prop_assert!(psi_exact(t, x, y).unwrap() <= psi_exact(t, x2, y).unwrap());
        prop_assert!(psi_exact(t, x, y).unwrap() <= psi_exact(t, x, y + dy).unwrap());
        prop_assert!(n_exact(t, x, y).unwrap() <= n_exact(t, x2, y).unwrap());
        prop_assert!(n_exact(t, x, y).unwrap() <= n_exact(t, x, y + dy).unwrap());
    }

    #[test]
    fn d_nonincreasing_in_u(u in 0.0f64..6.0, du in 0.0f64..3.0) {
        let t = small();
        prop_assert!(d_exact(t, 10_000.0, u + du).unwrap() <= d_exact(t, 10_000.0, u).unwrap());
    }

    #[test]
    fn s_nondecreasing(theta in 0.05f64..0.9, dt in 0.0f64..0.1, alpha in -2.0f64..2.0, da in 0.0f64..1.0) {
        let t = small();
        let base = s_exact(t, 10_000.0, theta, alpha).unwrap();
        prop_assert!(base <= s_exact(t, 10_000.0, theta + dt, alpha).unwrap());
        // log log 2 < 0, so n = 2 is the one term whose threshold falls as α grows.
        let two = |a: f64| u64::from(2f64.ln() <= theta * 2f64.ln() + a * 2f64.ln().ln() + 1e-12);
        prop_assert!(base - two(alpha) <= s_exact(t, 10_000.0, theta, alpha + da).unwrap() - two(alpha + da));
        if alpha >= 0.0 {
            prop_assert!(base <= s_exact(t, 10_000.0, theta, alpha + da).unwrap());
        }
    }

    #[test]
    fn d_bracketed(x in 2.0f64..10_000.0, u in 1.0f64..6.0) {
        let t = small();
        let d = d_exact(t, x, u).unwrap();
        prop_assert!(d >= 1);
        prop_assert!(d <= psi_exact(t, x, x.powf(1.0 / u) * (1.0 + 1e-12)).unwrap());
    }
}
