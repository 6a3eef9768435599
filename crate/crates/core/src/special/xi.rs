use crate::{Error, Result};

const MAX_NEWTON: usize = 50;
const MAX_TOTAL: usize = 400;
const NEAR_ONE_SERIES: f64 = 1e-6;
const NEAR_ONE_DERIVATIVE_SERIES: f64 = 1e-4;

/// e^ξ − 1 − vξ.
#[inline]
fn defect(v: f64, x: f64) -> f64 {
    x.exp_m1() - v * x
}

/// Scaled residual |e^ξ − 1 − vξ| / (1 + v|ξ|).
pub fn xi_residual(v: f64, x: f64) -> f64 {
    defect(v, x).abs() / (1.0 + v * x.abs())
}

/// The nonzero root of e^ξ = 1 + vξ (positive for v > 1, negative for
/// v < 1), with ξ(1) = 0.
pub fn xi(v: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::domain("v", v, "v > 0"));
    }
    let d = v - 1.0;
    if d == 0.0 {
        return Ok(0.0);
    }
    if d.abs() < NEAR_ONE_SERIES {
        return Ok(d * (2.0 + d * (-4.0 / 3.0 + d * 10.0 / 9.0)));
    }

    // f is convex with f(log v) < 0; the wanted root sits on the far side of
    // log v from the trivial root 0.
    let (mut lo, mut hi) = if v > 1.0 {
        let lo = v.ln();
        let mut hi = 2.0 * (v * v.ln()).ln().max(1.0) + 2.0;
        while defect(v, hi) <= 0.0 {
            hi *= 2.0;
        }
        (lo, hi)
    } else {
        (-1.0 / v, v.ln())
    };
    let mut x = if v >= 3.0 { (v * v.ln()).ln() } else { 2.0 * d };
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }

    for iter in 0..MAX_TOTAL {
        let f = defect(v, x);
        if f == 0.0 {
            return Ok(x);
        }
        // Keep the sign change inside [lo, hi]: f < 0 on the log v side.
        let toward_log_v = (f < 0.0) == (v > 1.0);
        if toward_log_v {
            lo = x;
        } else {
            hi = x;
        }
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let slope = x.exp() - v;
        let newton = x - f / slope;
        if iter < MAX_NEWTON && newton > a && newton < b && slope != 0.0 {
            if (newton - x).abs() <= 4.0 * f64::EPSILON * x.abs() {
                return Ok(newton);
            }
            x = newton;
        } else {
            x = 0.5 * (a + b);
        }
        if (b - a) <= 4.0 * f64::EPSILON * x.abs() {
            return Ok(x);
        }
    }
    if xi_residual(v, x) <= crate::tolerances::XI_RESIDUAL_SCALED {
        return Ok(x);
    }
    Err(Error::Convergence(format!("xi({v}) did not converge")))
}

/// ξ′(v) = ξ/(1 + vξ − v), with the series 2 − 8δ/3 + 10δ²/3 near v = 1 + δ.
pub fn xi_prime(v: f64) -> Result<f64> {
    let x = xi(v)?;
    let d = v - 1.0;
    if d.abs() < NEAR_ONE_DERIVATIVE_SERIES {
        return Ok(2.0 + d * (-8.0 / 3.0 + d * 10.0 / 3.0));
    }
    Ok(x / (1.0 + v * x - v))
}
