//! Naive per-integer counters by trial division, used to cross-check the
//! sieve-based counters.

use crate::sieves::CountQuery;
use crate::tolerances::THRESHOLD_GUARD;

/// (P⁺(n), k(n)) by trial division; (1, 1) for n = 1.
pub fn factor_naive(mut n: u64) -> (u64, u64) {
    let mut largest = 1;
    let mut kernel = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            largest = d;
            kernel *= d;
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        largest = n;
        kernel *= n;
    }
    (largest, kernel)
}

pub fn psi_naive(x: f64, y: f64) -> u64 {
    (1..=x.floor() as u64).filter(|&n| factor_naive(n).0 as f64 <= y.floor()).count() as u64
}

pub fn n_naive(x: f64, y: f64) -> u64 {
    (1..=x.floor() as u64).filter(|&n| factor_naive(n).1 as f64 <= y.floor()).count() as u64
}

pub fn d_naive(x: f64, u: f64) -> u64 {
    (1..=x.floor() as u64)
        .filter(|&n| {
            if n == 1 {
                return true;
            }
            let p = factor_naive(n).0;
            if u.fract() == 0.0 && u <= 64.0 {
                // Repeated multiplication with early exit.
                let mut acc: u128 = 1;
                for _ in 0..u as u32 {
                    acc *= p as u128;
                    if acc > n as u128 {
                        return false;
                    }
                }
                true
            } else {
                u * (p as f64).ln() <= (n as f64).ln() + THRESHOLD_GUARD
            }
        })
        .count() as u64
}

pub fn s_naive(x: f64, theta: f64, alpha: f64) -> u64 {
    (1..=x.floor() as u64)
        .filter(|&n| {
            n == 1 || {
                let l = (n as f64).ln();
                (factor_naive(n).1 as f64).ln() <= theta * l + alpha * l.ln() + THRESHOLD_GUARD
            }
        })
        .count() as u64
}

pub fn evaluate_naive(q: &CountQuery) -> u64 {
    match *q {
        CountQuery::Psi { x, y } => psi_naive(x, y),
        CountQuery::D { x, u } => d_naive(x, u),
        CountQuery::N { x, y } => n_naive(x, y),
        CountQuery::S { x, theta, alpha } => s_naive(x, theta, alpha),
    }
}
