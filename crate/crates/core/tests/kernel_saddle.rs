use std::sync::OnceLock;

use friable::kernel::{big_f, f_increment_check, sigma_asymptotic, PsiPrefix, SaddleContext};
use friable::tolerances::{F_GROWTH_CONST, SIGMA_RESIDUAL_REL, SIGMA_SLOPE_CONST};

fn ctx() -> &'static SaddleContext {
    static CTX: OnceLock<SaddleContext> = OnceLock::new();
    CTX.get_or_init(|| SaddleContext::new(10_000_000).unwrap())
}

/// e^{16 + 4}, enough for every growth-bound query.
const GROWTH_PREFIX_LIMIT: u64 = 485_165_196;

fn prefix() -> &'static PsiPrefix {
    static P: OnceLock<PsiPrefix> = OnceLock::new();
    P.get_or_init(|| PsiPrefix::build(GROWTH_PREFIX_LIMIT).unwrap())
}

/// Σ_p log p/(p(p−1)) over primes to 10⁷ from a plain byte sieve, plus the
/// prime-density tail ∫_{10⁷}^∞ dx/x² = 10⁻⁷.
fn prime_log_sum_oracle() -> f64 {
    let n = 10_000_000usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(p, _)| (p as f64).ln() / (p as f64 * (p as f64 - 1.0)))
        .sum::<f64>()
        + 1.0 / n as f64
}

#[test]
fn g_prime_at_one_matches_prime_sum() {
    let got = ctx().g_prime(1.0 - 1e-12).unwrap();
    let want = -prime_log_sum_oracle();
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    assert!((got + 0.7554).abs() < 1e-4);
}

#[test]
fn g_prime_is_negative_and_increasing() {
    let vals: Vec<f64> = (1..20).map(|i| ctx().g_prime(0.05 * i as f64).unwrap()).collect();
    assert!(vals.iter().all(|&v| v < 0.0));
    assert!(vals.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn sigma_residuals_and_monotonicity() {
    for t in [2.0, 10.0, 100.0] {
        let s = ctx().sigma_solve(t).unwrap();
        assert!(s > 0.0 && s < 1.0);
        let r = ctx().g_prime(s).unwrap() + t;
        assert!(r.abs() <= SIGMA_RESIDUAL_REL * t, "t = {t}: residual {r:e}");
    }
    let sig: Vec<f64> = [1.0, 2.0, 5.0, 10.0, 50.0, 100.0]
        .iter()
        .map(|&t| ctx().sigma_solve(t).unwrap())
        .collect();
    assert!(sig.windows(2).all(|w| w[1] < w[0]), "{sig:?}");
}

#[test]
fn sigma_tracks_expansion() {
    let mut devs = Vec::new();
    for t in [1e2, 1e3, 1e4] {
        let s = ctx().sigma_solve(t).unwrap();
        let scaled = s * (t * f64::ln(t) / 2.0).sqrt();
        assert!((scaled - 1.0).abs() < 0.2, "t = {t}: {scaled}");
        devs.push(((s - sigma_asymptotic(t, 2).unwrap()) / s).abs());
    }
    assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
}

#[test]
fn sigma_slope_bound() {
    for v in [20.0f64, 50.0, 100.0] {
        let d = 1e-3 * v;
        let slope = (ctx().sigma_solve(v + d).unwrap() - ctx().sigma_solve(v - d).unwrap()) / (2.0 * d);
        let bound = SIGMA_SLOPE_CONST * v.powf(-1.5) / v.ln().sqrt();
        assert!(slope < 0.0 && slope.abs() <= bound, "v = {v}: {slope:e} vs {bound:e}");
    }
}

#[test]
fn increment_ratio_near_one_and_stable() {
    let ratios: Vec<f64> = [0.5, 0.25, 0.125]
        .iter()
        .map(|&h| f_increment_check(ctx(), 12.0, h, Some(prefix())).unwrap())
        .collect();
    assert!((0.5..=1.5).contains(&ratios[0]), "{ratios:?}");
    let d1 = (ratios[0] - ratios[1]).abs();
    let d2 = (ratios[1] - ratios[2]).abs();
    assert!(d2 < d1, "{ratios:?}");
    assert!(f_increment_check(ctx(), 12.0, 0.0, Some(prefix())).is_err());
    assert!(f_increment_check(ctx(), 3.0, 0.5, Some(prefix())).is_err());
}

#[test]
fn growth_bound_on_moderate_range() {
    for v in [8.0f64, 10.0, 12.0, 14.0, 16.0] {
        let s = ctx().sigma_solve(v).unwrap();
        let fv = big_f(v, Some(prefix())).unwrap().value;
        for h in [0.0, 0.5, 1.0, 2.0, 3.0, 4.0] {
            let fvh = big_f(v + h, Some(prefix())).unwrap().value;
            let c = fvh / ((h * s).exp() * fv);
            assert!(c <= F_GROWTH_CONST, "v = {v}, h = {h}: {c}");
        }
    }
}
