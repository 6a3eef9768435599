//! Observed-constant tolerances.
//!
//! The asymptotic statements checked by this crate carry unspecified implied
//! constants. Every threshold used to compare them with exact counts lives
//! here so that the tests, the acceptance suite and `selftest` agree.

/// ρ(v) against 1 − log v on [1, 2].
pub const RHO_CLOSED_FORM_ABS: f64 = 1e-10;
/// Relative agreement of ρ between grid steps h and h/2 on [0, 20].
pub const RHO_STEP_HALVING_REL: f64 = 1e-9;
/// |∫₀^40 ρ − e^γ|.
pub const RHO_MASS_ABS: f64 = 1e-6;

/// Scaled residual of e^ξ = 1 + vξ.
pub const XI_RESIDUAL_SCALED: f64 = 1e-12;
/// v·|r(v) − ξ(v)| on [5, 100].
pub const R_MINUS_XI_CONST: f64 = 3.0;
/// v²·|r′(v) − ξ′(v)| on [5, 100].
pub const R_PRIME_MINUS_XI_PRIME_CONST: f64 = 20.0;
/// Step of the central difference used for r′.
pub const R_PRIME_DIFF_STEP: f64 = 1e-4;

/// Relative residual of g′(σ) + t = 0.
pub const SIGMA_RESIDUAL_REL: f64 = 1e-8;
/// Lower edge of the normalised Euler-product check (6/π²)Σ_{n≤10⁶} 1/(nψ(n)).
pub const EULER_PRODUCT_DEFICIT: f64 = 1e-4;
/// C in F(v + h) ≤ C·e^{hσ_v}·F(v).
pub const F_GROWTH_CONST: f64 = 2.0;
/// C in |dσ_v/dv| ≤ C·v^{−3/2}(log v)^{−1/2}.
pub const SIGMA_SLOPE_CONST: f64 = 5.0;

/// C in 𝔑₁ ≤ C·(log 2u)^{7/6}/(log y)^{3/2}.
pub const R1_UPPER_CONST: f64 = 3.0;
/// |D − (xρ + γxρ′/log y)| ≤ C·xρ(u)·𝔑₁.
pub const D_EXPANSION_CONST: f64 = 5.0;
/// |D/Ψ − (1 − r(u)/log y)| ≤ C·𝔑.
pub const D_OVER_PSI_CONST: f64 = 5.0;
/// Agreement of the two D(x, u) estimates, in units of xρ(u)·𝔑₁.
pub const D_FORMS_CONST: f64 = 3.0;
/// |Σ log n / log P⁺(n) − estimate| ≤ C·x/(log x)^{3/2}.
pub const DICKMAN_SUM_CONST: f64 = 5.0;
/// Relative deviation of the saddle estimate of Ψ at x = 10⁶, u ∈ [2, 4].
pub const PSI_SADDLE_REL: f64 = 0.05;
/// |N − yF(v)| / N.
pub const N_ESTIMATE_REL: f64 = 0.02;
/// Admissible band for S_exact / S_estimate.
pub const S_RATIO_BAND: (f64, f64) = (0.5, 2.0);
/// Sandwich gap with the kernel density evaluator, in units of
/// σ_v/ϑ + √(log v / v).
pub const KERNEL_GAP_CONST: f64 = 3.0;
/// Integral identity, absolute.
pub const INTEGRAL_IDENTITY_ABS: f64 = 1e-6;
/// Guard used for inclusive comparisons against real thresholds, in log units.
pub const THRESHOLD_GUARD: f64 = 1e-12;
