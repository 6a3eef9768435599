use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::path::Path;

use crate::container::load_or_rebuild;
use crate::primes::{primes_up_to, read_primes, write_primes};
use crate::quad::{integrate, QuadConfig};
use crate::summation::par_sum_by;
use crate::{Error, Result};

pub const DEFAULT_PRIME_LIMIT: u64 = 10_000_000;
pub const MIN_PRIME_LIMIT: u64 = 100_000;
pub const DEFAULT_TAIL_PANELS: usize = 8;
pub const DEFAULT_G_PRIME_REL_ERROR: f64 = 1e-8;

/// Smallest t accepted by [`sigma_asymptotic`].
pub const SIGMA_EXPANSION_MIN_T: f64 = 16.0;

/// Primes up to `prime_limit` plus the configuration of the prime-density
/// tail that stands in for the primes beyond it.
#[derive(Debug, Clone)]
pub struct SaddleContext {
    prime_limit: u64,
    primes: Vec<u32>,
    logs: Vec<f64>,
    tail_quadrature_points: usize,
    target_rel_error: f64,
}

impl SaddleContext {
    pub fn new(prime_limit: u64) -> Result<Self> {
        Self::check_limit(prime_limit)?;
        Ok(Self::from_primes(prime_limit, primes_up_to(prime_limit)?))
    }

    /// Like [`SaddleContext::new`], reading the prime list from `dir` when a
    /// cached copy exists and writing one otherwise.
    pub fn with_cache(prime_limit: u64, dir: &Path) -> Result<Self> {
        Self::check_limit(prime_limit)?;
        let (limit, primes) = load_or_rebuild(
            &dir.join(format!("primes-{prime_limit}.bin")),
            read_primes,
            |(limit, _)| *limit == prime_limit,
            || Ok((prime_limit, primes_up_to(prime_limit)?)),
            |(limit, primes), w| write_primes(w, *limit, primes)?.flush().map_err(Into::into),
        )?;
        Ok(Self::from_primes(limit, primes))
    }

    fn check_limit(prime_limit: u64) -> Result<()> {
        if prime_limit < MIN_PRIME_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "prime_limit = {prime_limit} below {MIN_PRIME_LIMIT}"
            )));
        }
        Ok(())
    }

    fn from_primes(prime_limit: u64, primes: Vec<u32>) -> Self {
        let logs = primes.iter().map(|&p| (p as f64).ln()).collect();
        SaddleContext {
            prime_limit,
            primes,
            logs,
            tail_quadrature_points: DEFAULT_TAIL_PANELS,
            target_rel_error: DEFAULT_G_PRIME_REL_ERROR,
        }
    }

    pub fn with_tail_quadrature_points(mut self, panels: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::InvalidArgument("tail_quadrature_points must be positive".into()));
        }
        self.tail_quadrature_points = panels;
        Ok(self)
    }

    pub fn with_target_rel_error(mut self, rel: f64) -> Result<Self> {
        if !(rel > 0.0 && rel < 1e-2) {
            return Err(Error::InvalidArgument(format!("target_rel_error = {rel} not in (0, 1e-2)")));
        }
        self.target_rel_error = rel;
        Ok(self)
    }

    pub fn prime_limit(&self) -> u64 {
        self.prime_limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn tail_quadrature_points(&self) -> usize {
        self.tail_quadrature_points
    }

    pub fn target_rel_error(&self) -> f64 {
        self.target_rel_error
    }

    fn quad(&self) -> QuadConfig {
        QuadConfig {
            rel_tol: 0.01 * self.target_rel_error,
            abs_tol: 0.0,
            initial_panels: self.tail_quadrature_points,
            max_panels: 4000,
        }
    }

    /// ∫_{W0}^∞ f(w) dw with W0 = log prime_limit, after q = e^{−σ(w−W0)}.
    fn tail<F: Fn(f64) -> f64>(&self, sigma: f64, f: F) -> Result<f64> {
        let w0 = (self.prime_limit as f64).ln();
        let (v, _) = integrate(
            |q: f64| f(w0 - q.ln() / sigma) / (sigma * q),
            0.0,
            1.0,
            self.quad(),
        )
        .map_err(|e| Error::Convergence(format!("g tail at sigma = {sigma}: {e}")))?;
        Ok(v)
    }

    /// g(σ) = Σ_p log(1 + a_p(σ)), a_p(σ) = (1 − p^{σ−1})/(p(p^σ − 1)).
    pub fn g(&self, sigma: f64) -> Result<f64> {
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(Error::domain("sigma", sigma, "0 < sigma <= 1"));
        }
        if sigma == 1.0 {
            return Ok(0.0);
        }
        let head = par_sum_by(&self.logs, |&w| log1p_a(w, sigma)).value();
        // Density 1/log x turns Σ_p f(log p) into ∫ f(w) e^w/w dw; write
        // log1p(a)·e^w/w as (log1p(a)/a)·A·iE/w so nothing overflows.
        let tail = self.tail(sigma, |w| {
            let (a_big, ie) = (-((sigma - 1.0) * w).exp_m1(), 1.0 / (sigma * w).exp_m1());
            let a = a_big * (-w).exp() * ie;
            let ratio = if a < 1e-12 { 1.0 - 0.5 * a } else { a.ln_1p() / a };
            ratio * a_big * ie / w
        })?;
        Ok(head + tail)
    }

    /// g′(σ) for 0 < σ < 1.
    pub fn g_prime(&self, sigma: f64) -> Result<f64> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::domain("sigma", sigma, "0 < sigma < 1"));
        }
        let head = par_sum_by(&self.logs, |&w| w * (-w).exp() * h(w, sigma)).value();
        let tail = self.tail(sigma, |w| h(w, sigma))?;
        Ok(head + tail)
    }

    /// The solution σ_t of g′(σ) + t = 0 for t ≥ 1.
    pub fn sigma_solve(&self, t: f64) -> Result<f64> {
        if !(t >= 1.0 && t.is_finite()) {
            return Err(Error::domain("t", t, "t >= 1"));
        }
        let f = |s: f64| self.g_prime(s).map(|g| g + t);
        // g′ increases from −∞ to g′(1⁻) ≈ −0.755 on (0, 1).
        let mut hi = 1.0 - 1e-9;
        let mut f_hi = f(hi)?;
        if f_hi <= 0.0 {
            return Err(Error::Convergence(format!("no sign change below sigma = 1 for t = {t}")));
        }
        let mut lo = 0.5f64.min(2.0 * leading_term(t.max(3.0)));
        let mut f_lo = f(lo)?;
        while f_lo >= 0.0 {
            hi = lo;
            f_hi = f_lo;
            lo *= 0.5;
            if lo < 1e-6 {
                return Err(Error::Convergence(format!("bracket for sigma_{t} fell below 1e-6")));
            }
            f_lo = f(lo)?;
        }
        let goal = 1e-2 * crate::tolerances::SIGMA_RESIDUAL_REL * t;
        let mut x = if f_hi - f_lo > 0.0 { lo - f_lo * (hi - lo) / (f_hi - f_lo) } else { 0.5 * (lo + hi) };
        for _ in 0..100 {
            let fx = f(x)?;
            if fx.abs() <= goal {
                return Ok(x);
            }
            if fx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = 1e-6 * x;
            let slope = (f(x + d)? - f(x - d)?) / (2.0 * d);
            let newton = x - fx / slope;
            x = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo <= 4.0 * f64::EPSILON * x {
                break;
            }
        }
        let r = f(x)?;
        if r.abs() <= crate::tolerances::SIGMA_RESIDUAL_REL * t {
            Ok(x)
        } else {
            Err(Error::Convergence(format!("sigma_{t}: residual {r:e}")))
        }
    }
}

/// d/dσ log(1 + a_p(σ)) divided by w e^{−w}, w = log p, in a form that stays
/// finite for large w: with em = e^{−w}, A = 1 − e^{(σ−1)w}, iE = 1/(e^{σw} − 1),
/// it is −(1 + iE)(em + A·iE)/(1 + A·em·iE).
#[inline]
fn h(w: f64, sigma: f64) -> f64 {
    let em = (-w).exp();
    let a_big = -((sigma - 1.0) * w).exp_m1();
    let ie = 1.0 / (sigma * w).exp_m1();
    -(1.0 + ie) * (em + a_big * ie) / (1.0 + a_big * em * ie)
}

#[inline]
fn log1p_a(w: f64, sigma: f64) -> f64 {
    let a = -((sigma - 1.0) * w).exp_m1() * (-w).exp() / (sigma * w).exp_m1();
    a.ln_1p()
}

fn leading_term(t: f64) -> f64 {
    (2.0 / (t * t.ln())).sqrt()
}

/// The polynomials P₁, P₂ of the expansion
/// σ_t = √(2/(t log t))·{1 + Σ_k P_k(log log t)/(log t)^k + …}.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaExpansion {
    /// Coefficients of P₁, constant term first.
    pub p1: [f64; 2],
    /// Coefficients of P₂, constant term first.
    pub p2: [f64; 3],
}

impl SigmaExpansion {
    pub fn new() -> Self {
        SigmaExpansion {
            p1: [-0.5 * LN_2, 0.5],
            p2: [
                0.5 * LN_2 + 0.375 * LN_2 * LN_2 + 2.0 / 3.0 * PI * PI,
                -(0.75 * LN_2 + 0.5),
                0.375,
            ],
        }
    }

    pub fn p1(&self, z: f64) -> f64 {
        self.p1[0] + self.p1[1] * z
    }

    pub fn p2(&self, z: f64) -> f64 {
        self.p2[0] + z * (self.p2[1] + z * self.p2[2])
    }

    /// Truncation of the expansion after P_order, order ∈ {0, 1, 2}.
    pub fn eval(&self, t: f64, order: u32) -> Result<f64> {
        if !(t >= SIGMA_EXPANSION_MIN_T && t.is_finite()) {
            return Err(Error::domain("t", t, "t >= 16"));
        }
        if order > 2 {
            return Err(Error::InvalidArgument(format!("order = {order} not in 0..=2")));
        }
        let l = t.ln();
        let z = l.ln();
        let mut bracket = 1.0;
        if order >= 1 {
            bracket += self.p1(z) / l;
        }
        if order >= 2 {
            bracket += self.p2(z) / (l * l);
        }
        Ok(leading_term(t) * bracket)
    }
}

impl Default for SigmaExpansion {
    fn default() -> Self {
        Self::new()
    }
}

pub fn sigma_asymptotic(t: f64, order: u32) -> Result<f64> {
    SigmaExpansion::new().eval(t, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log1p_a_direct(p: f64, s: f64) -> f64 {
        ((1.0 - p.powf(s - 1.0)) / (p * (p.powf(s) - 1.0))).ln_1p()
    }

    #[test]
    fn summand_derivative_matches_central_differences() {
        for p in [2.0f64, 3.0, 101.0, 7919.0, 1e6 + 3.0] {
            for s in [0.05, 0.3, 0.6, 0.95] {
                let d = 1e-6;
                let fd = (log1p_a_direct(p, s + d) - log1p_a_direct(p, s - d)) / (2.0 * d);
                let w = p.ln();
                let an = w * (-w).exp() * h(w, s);
                assert!((an - fd).abs() <= 1e-6 * fd.abs() + 1e-12, "p = {p}, s = {s}: {an} vs {fd}");
                assert!((log1p_a(w, s) - log1p_a_direct(p, s)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn h_stays_finite_far_out() {
        for w in [50.0, 1e3, 1e5] {
            assert!(h(w, 0.005).is_finite());
            assert!(h(w, 0.005) < 0.0);
        }
    }

    #[test]
    fn expansion_polynomials() {
        let e = SigmaExpansion::new();
        assert_eq!(e.p1(LN_2), 0.0);
        assert_eq!(e.p1(0.0), -0.5 * LN_2);
        let z = 1.7;
        let want = 0.375 * z * z - (0.75 * LN_2 + 0.5) * z + 0.5 * LN_2 + 0.375 * LN_2 * LN_2 + 2.0 / 3.0 * PI * PI;
        assert!((e.p2(z) - want).abs() < 1e-14);
        let t: f64 = 1e4;
        assert_eq!(sigma_asymptotic(t, 0).unwrap(), (2.0 / (t * t.ln())).sqrt());
        assert!(sigma_asymptotic(15.9, 0).is_err());
        assert!(sigma_asymptotic(100.0, 3).is_err());
    }

    #[test]
    fn small_context_basics() {
        assert!(SaddleContext::new(99_999).is_err());
        let ctx = SaddleContext::new(MIN_PRIME_LIMIT).unwrap();
        assert_eq!(ctx.primes().len(), 9592);
        assert_eq!(ctx.g(1.0).unwrap(), 0.0);
        assert!(ctx.g_prime(1.0).is_err());
        assert!(ctx.g_prime(0.0).is_err());
        assert!(ctx.sigma_solve(0.5).is_err());
        // g′ is the derivative of g.
        for s in [0.2, 0.5, 0.8] {
            let d = 1e-5;
            let fd = (ctx.g(s + d).unwrap() - ctx.g(s - d).unwrap()) / (2.0 * d);
            let an = ctx.g_prime(s).unwrap();
            assert!((an - fd).abs() < 1e-6 * an.abs(), "s = {s}: {an} vs {fd}");
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("friable-primes-{}", std::process::id()));
        let a = SaddleContext::with_cache(MIN_PRIME_LIMIT, &dir).unwrap();
        let b = SaddleContext::with_cache(MIN_PRIME_LIMIT, &dir).unwrap();
        assert_eq!(a.primes(), b.primes());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
