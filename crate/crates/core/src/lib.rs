//! Exact and asymptotic counting of friable integers and of integers with a
//! small squarefree kernel.
//!
//! The crate is organised around five numerical layers:
//!
//! * [`special`]: the Dickman function ρ (tabulated in log space), the
//!   auxiliary root ξ(v), and the real Riemann zeta function.
//! * [`kernel`]: the kernel-side saddle point σ_t, its asymptotic expansion,
//!   and the density function F(t) governing N(x, y).
//! * [`sieves`]: largest-prime-factor and radical tables plus the exact
//!   counters Ψ, D, N, S built on them.
//! * [`estimators`]: closed-form second-order estimates together with their
//!   error scales.
//! * [`sandwich`]: the telescoping discretisation that brackets D(x, u) and
//!   S(x; ϑ, α) between sums of one-condition counts.
//!
//! [`acceptance`] bundles the end-to-end checks that both the integration
//! test suite and the command-line `selftest` run.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod container;
pub mod error;
pub mod estimators;
pub mod kernel;
pub mod oracle;
pub mod primes;
pub mod quad;
pub mod sandwich;
pub mod sieves;
pub mod special;
pub mod summation;
pub mod tolerances;

pub use error::{Error, Result};

/// Euler's constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// e^γ, the total mass ∫₀^∞ ρ(u) du.
pub fn exp_euler_gamma() -> f64 {
    EULER_GAMMA.exp()
}
