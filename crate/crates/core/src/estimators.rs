//! Closed-form second-order estimates for Ψ, D, N, S and the Dickman-type
//! sums, each reported with the magnitude of its error term.

use serde::{Deserialize, Serialize};

use crate::kernel::{big_f, PsiPrefix, SaddleContext};
use crate::sieves::Numerator;
use crate::special::{z_factor, RhoTable};
use crate::{exp_euler_gamma, Error, Result, EULER_GAMMA};

/// How `value` is assembled from `main_term` and `correction_term`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// value = main + correction
    Additive,
    /// value = main·(1 + correction)
    Multiplicative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub value: f64,
    pub main_term: f64,
    pub correction_term: f64,
    /// Size of the error term with its implied constant set to 1.
    pub error_scale: f64,
    /// Whether the inputs satisfy the hypotheses the estimate is proved under.
    pub in_range: bool,
    pub form: Form,
    pub notes: String,
}

impl EstimateReport {
    fn additive(main: f64, correction: f64, error_scale: f64, in_range: bool, notes: String) -> Self {
        EstimateReport {
            value: main + correction,
            main_term: main,
            correction_term: correction,
            error_scale,
            in_range,
            form: Form::Additive,
            notes,
        }
    }

    fn multiplicative(main: f64, correction: f64, error_scale: f64, in_range: bool, notes: String) -> Self {
        EstimateReport {
            value: main * (1.0 + correction),
            main_term: main,
            correction_term: correction,
            error_scale,
            in_range,
            form: Form::Multiplicative,
            notes,
        }
    }

    /// Recomputes `value` from the parts.
    pub fn recombined(&self) -> f64 {
        match self.form {
            Form::Additive => self.main_term + self.correction_term,
            Form::Multiplicative => self.main_term * (1.0 + self.correction_term),
        }
    }

    /// |exact − value| / error_scale.
    pub fn normalized_deviation(&self, exact: f64) -> f64 {
        (exact - self.value).abs() / self.error_scale
    }
}

/// The range e^{(log log x)^b} < y ≤ x/(log x)^c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HRange {
    pub b: f64,
    pub c: f64,
}

/// Range used for the friable estimates.
pub const FRIABLE_RANGE: HRange = HRange { b: 1.7, c: 10.001 };

impl HRange {
    pub fn new(b: f64, c: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::domain("b", b, "b > 0"));
        }
        if !(c >= 0.0) {
            return Err(Error::domain("c", c, "c >= 0"));
        }
        Ok(HRange { b, c })
    }

    /// Lower bound exclusive, upper bound inclusive; false for x < 3.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        if !(x >= 3.0) {
            return false;
        }
        let lx = x.ln();
        let lower = lx.ln().powf(self.b).exp();
        let upper = x / lx.powf(self.c);
        y > lower && y <= upper
    }
}

pub fn hrange_contains(range: HRange, x: f64, y: f64) -> bool {
    range.contains(x, y)
}

fn check_xy(x: f64, y: f64, y_min: f64) -> Result<(f64, f64)> {
    if !(y >= y_min && y.is_finite()) {
        return Err(Error::domain("y", y, if y_min > 2.0 { "y >= 3" } else { "y >= 2" }));
    }
    if !(x >= y && x.is_finite()) {
        return Err(Error::domain("x", x, "x >= y"));
    }
    let ly = y.ln();
    Ok((x.ln() / ly, ly))
}

/// 𝔑(x, y) = √log 2u / (√u (log y)^{3/2}).
pub fn remainder_r(x: f64, y: f64) -> Result<f64> {
    let (u, ly) = check_xy(x, y, 2.0)?;
    Ok(remainder_from(u, ly))
}

/// 𝔑₁(x, y) = 𝔑(x, y) + (log 2u)²/(log y)².
pub fn remainder_r1(x: f64, y: f64) -> Result<f64> {
    let (u, ly) = check_xy(x, y, 2.0)?;
    Ok(remainder1_from(u, ly))
}

fn remainder_from(u: f64, ly: f64) -> f64 {
    (2.0 * u).ln().sqrt() / (u.sqrt() * ly.powf(1.5))
}

fn remainder1_from(u: f64, ly: f64) -> f64 {
    let l2u = (2.0 * u).ln();
    remainder_from(u, ly) + l2u * l2u / (ly * ly)
}

/// u and log y for a friable query with u > 1.
fn friable_params(x: f64, y: f64) -> Result<(f64, f64)> {
    let (u, ly) = check_xy(x, y, 3.0)?;
    if !(u > 1.0) {
        return Err(Error::domain("u", u, "u > 1"));
    }
    Ok((u, ly))
}

/// Ψ(x, y) ≈ xρ(u)Z(β), β = 1 − r(u)/log y.
pub fn psi_saddle(rho: &RhoTable, x: f64, y: f64) -> Result<EstimateReport> {
    let (u, ly) = friable_params(x, y)?;
    let beta = 1.0 - rho.r(u)? / ly;
    if !(beta > 0.0) {
        return Err(Error::domain("beta", beta, "beta > 0 (log y > r(u))"));
    }
    let main = x * rho.rho(u)?;
    let z = z_factor(beta)?;
    let value = main * z;
    Ok(EstimateReport::multiplicative(
        main,
        z - 1.0,
        value * u / (x.ln() * x.ln()),
        FRIABLE_RANGE.contains(x, y),
        format!("u = {u}, beta = {beta}"),
    ))
}

/// Ψ(x, y) ≈ xρ(u) + (γ − 1)xρ′(u)/log y.
pub fn psi_saias(rho: &RhoTable, x: f64, y: f64) -> Result<EstimateReport> {
    let (u, ly) = friable_params(x, y)?;
    let main = x * rho.rho(u)?;
    let l2u = (2.0 * u).ln();
    Ok(EstimateReport::additive(
        main,
        (EULER_GAMMA - 1.0) * x * rho.rho_prime(u)? / ly,
        main * l2u * l2u / (ly * ly),
        FRIABLE_RANGE.contains(x, y),
        format!("u = {u}"),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DForm {
    /// Saddle estimate of Ψ(x, x^{1/u}) times 1 − r(u)/log y.
    SaddleFactor,
    /// xρ(u) + γxρ′(u)/log y.
    TwoTerm,
}

pub fn d_estimate(rho: &RhoTable, x: f64, u: f64, form: DForm) -> Result<EstimateReport> {
    if !(u > 1.0 && u.is_finite()) {
        return Err(Error::domain("u", u, "u > 1"));
    }
    if !(x >= 3.0 && x.is_finite()) {
        return Err(Error::domain("x", x, "x >= 3"));
    }
    let y = x.powf(1.0 / u);
    let ly = x.ln() / u;
    let in_range = FRIABLE_RANGE.contains(x, y);
    match form {
        DForm::SaddleFactor => {
            let psi = psi_saddle(rho, x, y)?;
            Ok(EstimateReport::multiplicative(
                psi.value,
                -rho.r(u)? / ly,
                psi.value * remainder_from(u, ly),
                in_range,
                format!("u = {u}, saddle factor form"),
            ))
        }
        DForm::TwoTerm => {
            let main = x * rho.rho(u)?;
            Ok(EstimateReport::additive(
                main,
                EULER_GAMMA * x * rho.rho_prime(u)? / ly,
                main * remainder1_from(u, ly),
                in_range,
                format!("u = {u}, two-term form"),
            ))
        }
    }
}

/// Σ_{1<n≤x} (log n or log x)/log P⁺(n) ≈ e^γx + c·e^γx/log x with c = −γ
/// resp. 1 − γ.
pub fn dickman_sum_estimate(x: f64, numerator: Numerator) -> Result<EstimateReport> {
    if !(x >= 3.0 && x.is_finite()) {
        return Err(Error::domain("x", x, "x >= 3"));
    }
    let eg = exp_euler_gamma();
    let lx = x.ln();
    let coeff = match numerator {
        Numerator::LogN => -EULER_GAMMA,
        Numerator::LogX => 1.0 - EULER_GAMMA,
    };
    Ok(EstimateReport::additive(
        eg * x,
        coeff * eg * x / lx,
        x / lx.powf(1.5),
        true,
        format!("numerator = {numerator:?}"),
    ))
}

/// Exponent b of the lower edge e^{(log x)^b} < y for the N(x, y) estimate.
pub const N_RANGE_EXPONENT: f64 = 0.6;

/// N(x, y) ≈ yF(v), v = log(x/y), with error scale yF(v)·y^{−η_x},
/// η_x = √(2/(log x · log log x)).
pub fn n_estimate(prefix: Option<&PsiPrefix>, x: f64, y: f64) -> Result<EstimateReport> {
    if !(x >= 3.0 && x.is_finite()) {
        return Err(Error::domain("x", x, "x >= 3"));
    }
    if !(y >= 1.0 && y <= x) {
        return Err(Error::domain("y", y, "1 <= y <= x"));
    }
    let v = (x / y).ln();
    let f = big_f(v, prefix)?;
    let main = y * f.value;
    let lx = x.ln();
    let eta = (2.0 / (lx * lx.ln())).sqrt();
    let in_range = y > lx.powf(N_RANGE_EXPONENT).exp() && v >= 2.0 && !f.reduced_accuracy;
    Ok(EstimateReport::multiplicative(
        main,
        0.0,
        main * y.powf(-eta),
        in_range,
        format!("v = {v}, F(v) = {}, eta_x = {eta}", f.value),
    ))
}

/// Admissible window 1/(log x)^c ≤ ϑ ≤ 1 − 1/(log x)^c, |α| ≤ A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelWindow {
    pub c: f64,
    pub alpha_bound: f64,
}

impl Default for KernelWindow {
    fn default() -> Self {
        KernelWindow { c: 0.25, alpha_bound: 1.0 }
    }
}

impl KernelWindow {
    pub fn contains(&self, x: f64, theta: f64, alpha: f64) -> bool {
        let edge = x.ln().powf(-self.c);
        theta >= edge && theta <= 1.0 - edge && alpha.abs() <= self.alpha_bound
    }
}

/// y = x^ϑ (log x)^α.
pub fn kernel_threshold(x: f64, theta: f64, alpha: f64) -> f64 {
    x.powf(theta) * x.ln().powf(alpha)
}

/// S(x; ϑ, α) ≈ (yF(v)σ_v/ϑ)(1 − σ_v/ϑ), error scale
/// (yF(v)σ_v/ϑ)(σ_v²/ϑ² + √(log v/v)).
pub fn s_estimate(
    ctx: &SaddleContext,
    prefix: Option<&PsiPrefix>,
    x: f64,
    theta: f64,
    alpha: f64,
    window: KernelWindow,
) -> Result<EstimateReport> {
    if !(x >= 3.0 && x.is_finite()) {
        return Err(Error::domain("x", x, "x >= 3"));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::domain("theta", theta, "0 < theta <= 1"));
    }
    let y = kernel_threshold(x, theta, alpha);
    let v = (x / y).ln();
    if !(v >= 1.0) {
        return Err(Error::domain("v", v, "v = log(x/y) >= 1"));
    }
    let f = big_f(v, prefix)?;
    let sigma = ctx.sigma_solve(v)?;
    let ratio = sigma / theta;
    let main = y * f.value * ratio;
    Ok(EstimateReport::multiplicative(
        main,
        -ratio,
        main * (ratio * ratio + (v.ln() / v).sqrt()),
        window.contains(x, theta, alpha) && !f.reduced_accuracy,
        format!(
            "v = {v}, sigma_v = {sigma}, F(v) = {}, window c = {}, A = {}",
            f.value, window.c, window.alpha_bound
        ),
    ))
}
