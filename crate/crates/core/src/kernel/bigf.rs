use std::f64::consts::PI;

use serde::Serialize;

use super::psi::{PsiPrefix, PSI_PREFIX_HARD_CAP};
use super::saddle::SaddleContext;
use crate::quad::{integrate, QuadConfig};
use crate::{Error, Result};

/// ζ(2) = Σ 1/(nψ(n)) as an unevaluated double-double.
const ZETA2_HI: f64 = 1.644_934_066_848_226_4;
const ZETA2_LO: f64 = 3.040_672_350_398_476e-17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FValue {
    pub t: f64,
    pub value: f64,
    /// ⌊e^t⌋, the split point between the two parts of the sum.
    pub split: u64,
    /// Set when e^t is beyond the prefix-table cap and the value comes from
    /// extrapolating the logarithmic slope.
    pub reduced_accuracy: bool,
}

/// F(t) = (6/π²) Σ_n min(1, e^t/n)/ψ(n).
///
/// With N = ⌊e^t⌋ and Σ_n 1/(nψ(n)) = ζ(2) this is
/// (6/π²)[S₀(N) + e^t (ζ(2) − S₁(N))], so the infinite tail is exact.
pub fn big_f(t: f64, prefix: Option<&PsiPrefix>) -> Result<FValue> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain("t", t, "t >= 0"));
    }
    let cap_t = (PSI_PREFIX_HARD_CAP as f64).ln();
    if t > cap_t {
        return extrapolate(t, cap_t, prefix);
    }
    let split = (t.exp().floor() as u64).max(1);
    let owned;
    let table = match prefix {
        Some(p) if p.limit() >= split => p,
        _ => {
            owned = PsiPrefix::build(split)?;
            &owned
        }
    };
    let [s0, s1] = table.sums(split)?;
    Ok(FValue {
        t,
        value: 6.0 / (PI * PI) * (s0.value() + t.exp() * tail_s1(s1.parts())),
        split,
        reduced_accuracy: false,
    })
}

/// ζ(2) − S₁ in double-double arithmetic.
fn tail_s1((sum, comp): (f64, f64)) -> f64 {
    ((ZETA2_HI - sum) - comp) + ZETA2_LO
}

/// F′(t)/F(t) = (6/π²)e^t(ζ(2) − S₁(⌊e^t⌋))/F(t) is the local slope; it decays
/// like √(2/(t log t)), which carries F past the cap.
fn extrapolate(t: f64, cap_t: f64, prefix: Option<&PsiPrefix>) -> Result<FValue> {
    let base = big_f(cap_t, prefix)?;
    let table;
    let p = match prefix {
        Some(p) if p.limit() >= base.split => p,
        _ => {
            table = PsiPrefix::build(base.split)?;
            &table
        }
    };
    let [_, s1] = p.sums(base.split)?;
    let slope = 6.0 / (PI * PI) * cap_t.exp() * tail_s1(s1.parts()) / base.value;
    let shape = |s: f64| (1.0 / (s * s.ln())).sqrt();
    let (integral, _) = integrate(shape, cap_t, t, QuadConfig::default())?;
    Ok(FValue {
        t,
        value: base.value * (slope / shape(cap_t) * integral).exp(),
        split: t.exp().floor() as u64,
        reduced_accuracy: true,
    })
}

/// (F(w) − F(w − h))/(h σ_w F(w)), expected near 1.
pub fn f_increment_check(ctx: &SaddleContext, w: f64, h: f64, prefix: Option<&PsiPrefix>) -> Result<f64> {
    if !(w >= 4.0 && w.is_finite()) {
        return Err(Error::domain("w", w, "w >= 4"));
    }
    if !(h > 0.0 && h <= (w * w.ln()).sqrt()) {
        return Err(Error::domain("h", h, "0 < h <= sqrt(w log w)"));
    }
    let fw = big_f(w, prefix)?.value;
    let fwh = big_f(w - h, prefix)?.value;
    let sigma = ctx.sigma_solve(w)?;
    Ok((fw - fwh) / (h * sigma * fw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::psi_mult;

    fn direct(t: f64) -> f64 {
        // Finite sum plus the exact ζ(2) tail, all in plain f64 loops.
        let n_max = t.exp().floor() as i64;
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        for n in 1..=n_max {
            let p = psi_mult(n).unwrap() as f64;
            s0 += 1.0 / p;
            s1 += 1.0 / (n as f64 * p);
        }
        6.0 / (PI * PI) * (s0 + t.exp() * (PI * PI / 6.0 - s1))
    }

    #[test]
    fn value_at_zero_is_one() {
        let f = big_f(0.0, None).unwrap();
        assert!((f.value - 1.0).abs() < 1e-15);
        assert!(big_f(-0.5, None).is_err());
    }

    #[test]
    fn agrees_with_direct_summation() {
        let pre = PsiPrefix::build(100_000).unwrap();
        for t in [0.5, 1.0, 2.3, 5.0, 8.0, 11.4] {
            let got = big_f(t, Some(&pre)).unwrap().value;
            let want = direct(t);
            assert!(((got - want) / want).abs() < 1e-9, "t = {t}: {got} vs {want}");
            assert_eq!(got, big_f(t, None).unwrap().value);
        }
    }

    #[test]
    fn continuous_at_integer_splits() {
        let pre = PsiPrefix::build(10_000).unwrap();
        for n in [2u64, 3, 10, 97, 1000] {
            let t = (n as f64).ln();
            let a = big_f(t - 1e-12, Some(&pre)).unwrap().value;
            let b = big_f(t + 1e-12, Some(&pre)).unwrap().value;
            assert!((a - b).abs() < 1e-9 * b, "n = {n}");
        }
    }

    #[test]
    fn strictly_increasing() {
        let pre = PsiPrefix::build(2_000_000).unwrap();
        let vals: Vec<f64> = (0..=14).map(|t| big_f(t as f64, Some(&pre)).unwrap().value).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
    }
}
