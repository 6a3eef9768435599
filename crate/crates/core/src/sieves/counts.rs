use serde::{Deserialize, Serialize};

use super::tables::FactorSource;
use crate::summation::Neumaier;
use crate::tolerances::THRESHOLD_GUARD;
use crate::{Error, Result};

/// What the Dickman-type sum divides by log P⁺(n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Numerator {
    LogN,
    LogX,
}

/// One exact-count request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CountQuery {
    Psi { x: f64, y: f64 },
    D { x: f64, u: f64 },
    N { x: f64, y: f64 },
    S { x: f64, theta: f64, alpha: f64 },
}

impl CountQuery {
    pub fn x(&self) -> f64 {
        match *self {
            CountQuery::Psi { x, .. }
            | CountQuery::D { x, .. }
            | CountQuery::N { x, .. }
            | CountQuery::S { x, .. } => x,
        }
    }

    pub fn evaluate<S: FactorSource>(&self, src: &S) -> Result<u64> {
        match *self {
            CountQuery::Psi { x, y } => psi_exact(src, x, y),
            CountQuery::D { x, u } => d_exact(src, x, u),
            CountQuery::N { x, y } => n_exact(src, x, y),
            CountQuery::S { x, theta, alpha } => s_exact(src, x, theta, alpha),
        }
    }
}

/// ⌊x⌋ after range checks against the source.
fn floor_x<S: FactorSource>(src: &S, x: f64, min: f64) -> Result<u64> {
    if !(x >= min && x.is_finite()) {
        return Err(Error::domain("x", x, if min > 1.0 { "x >= 2" } else { "x >= 1" }));
    }
    let n = x.floor() as u64;
    if n > src.limit() {
        return Err(Error::InvalidArgument(format!(
            "x = {x} exceeds the table limit {}",
            src.limit()
        )));
    }
    Ok(n)
}

/// ⌊y⌋ clamped into u32.
fn floor_y(y: f64) -> Result<u32> {
    if !(y >= 1.0) {
        return Err(Error::domain("y", y, "y >= 1"));
    }
    Ok(if y >= u32::MAX as f64 { u32::MAX } else { y.floor() as u32 })
}

fn count_where<S, F>(src: &S, hi: u64, keep: F) -> u64
where
    S: FactorSource,
    F: Fn(u64, u32, u32) -> bool + Sync,
{
    src.map_windows(hi, |lo, lpf, rad| {
        lpf.iter()
            .zip(rad)
            .enumerate()
            .filter(|(i, (&p, &k))| keep(lo + *i as u64, p, k))
            .count() as u64
    })
    .into_iter()
    .sum()
}

/// Ψ(x, y): n ≤ x with P⁺(n) ≤ y.
pub fn psi_exact<S: FactorSource>(src: &S, x: f64, y: f64) -> Result<u64> {
    let hi = floor_x(src, x, 1.0)?;
    let y = floor_y(y)?;
    Ok(count_where(src, hi, |_, p, _| p <= y))
}

/// N(x, y): n ≤ x with k(n) ≤ y.
pub fn n_exact<S: FactorSource>(src: &S, x: f64, y: f64) -> Result<u64> {
    let hi = floor_x(src, x, 1.0)?;
    let y = floor_y(y)?;
    Ok(count_where(src, hi, |_, _, k| k <= y))
}

/// Whether P⁺(n)^u ≤ n, exactly for integer u ≤ 64 and in guarded log form
/// otherwise.
#[inline]
fn friable_at(n: u64, p: u32, u: f64, int_u: Option<u32>) -> bool {
    if n == 1 {
        return true;
    }
    match int_u {
        Some(e) => (p as u128).checked_pow(e).is_some_and(|v| v <= n as u128),
        None => u * (p as f64).ln() <= (n as f64).ln() + THRESHOLD_GUARD,
    }
}

fn integer_exponent(u: f64) -> Option<u32> {
    (u.fract() == 0.0 && u <= 64.0).then_some(u as u32)
}

/// D(x, u): n ≤ x with P⁺(n) ≤ n^{1/u}; n = 1 always counts.
pub fn d_exact<S: FactorSource>(src: &S, x: f64, u: f64) -> Result<u64> {
    let hi = floor_x(src, x, 1.0)?;
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::domain("u", u, "u >= 0"));
    }
    let int_u = integer_exponent(u);
    Ok(count_where(src, hi, |n, p, _| friable_at(n, p, u, int_u)))
}

/// Whether k(n) ≤ n^ϑ (log n)^α in guarded log form; n = 1 always counts.
#[inline]
fn small_kernel_at(n: u64, k: u32, theta: f64, alpha: f64) -> bool {
    if n == 1 {
        return true;
    }
    let ln = (n as f64).ln();
    (k as f64).ln() <= theta * ln + alpha * ln.ln() + THRESHOLD_GUARD
}

/// S(x; ϑ, α): n ≤ x with k(n) ≤ n^ϑ (log n)^α; n = 1 always counts.
pub fn s_exact<S: FactorSource>(src: &S, x: f64, theta: f64, alpha: f64) -> Result<u64> {
    let hi = floor_x(src, x, 1.0)?;
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::domain("theta", theta, "0 < theta <= 1"));
    }
    if !alpha.is_finite() {
        return Err(Error::domain("alpha", alpha, "finite"));
    }
    Ok(count_where(src, hi, |n, _, k| small_kernel_at(n, k, theta, alpha)))
}

/// Σ_{1<n≤x} (log n or log x)/log P⁺(n), compensated.
pub fn dickman_sum_exact<S: FactorSource>(src: &S, x: f64, numerator: Numerator) -> Result<f64> {
    let hi = floor_x(src, x, 2.0)?;
    let log_x = x.ln();
    let parts = src.map_windows(hi, |lo, lpf, _| {
        let mut acc = Neumaier::new();
        for (i, &p) in lpf.iter().enumerate() {
            let n = lo + i as u64;
            if n < 2 {
                continue;
            }
            let top = match numerator {
                Numerator::LogN => (n as f64).ln(),
                Numerator::LogX => log_x,
            };
            acc.add(top / (p as f64).ln());
        }
        acc
    });
    let mut total = Neumaier::new();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.value())
}

/// Evaluates ∫₀^∞ (D(x, u) − 1) du from the step structure of u ↦ D(x, u)
/// (breakpoints b_n = log n/log P⁺(n), sorted) and returns its distance from
/// [`dickman_sum_exact`] with the log n numerator.
pub fn integral_identity_check<S: FactorSource>(src: &S, x: f64) -> Result<f64> {
    let hi = floor_x(src, x, 2.0)?;
    let mut breaks: Vec<f64> = src
        .map_windows(hi, |lo, lpf, _| {
            lpf.iter()
                .enumerate()
                .filter(|(i, _)| lo + *i as u64 >= 2)
                .map(|(i, &p)| ((lo + i as u64) as f64).ln() / (p as f64).ln())
                .collect::<Vec<f64>>()
        })
        .into_iter()
        .flatten()
        .collect();
    breaks.sort_unstable_by(|a, b| b.total_cmp(a));
    // D(x, u) − 1 = j on (b_{j+1}, b_j] with b sorted descending and b_{m+1} = 0.
    let mut area = Neumaier::new();
    for (j, w) in breaks.iter().enumerate() {
        let next = breaks.get(j + 1).copied().unwrap_or(0.0);
        area.add((j + 1) as f64 * (w - next));
    }
    let direct = dickman_sum_exact(src, x, Numerator::LogN)?;
    Ok((area.value() - direct).abs())
}
