//! The kernel side: ψ(n), the prime sums g and g′, the saddle point σ_t and
//! its expansion, and the density function F(t) of N(x, y).

mod bigf;
mod psi;
mod saddle;

pub use bigf::{big_f, f_increment_check, FValue};
pub use psi::{psi_mult, PsiPrefix, PSI_PREFIX_HARD_CAP};
pub use saddle::{
    sigma_asymptotic, SaddleContext, SigmaExpansion, DEFAULT_G_PRIME_REL_ERROR, DEFAULT_PRIME_LIMIT,
    DEFAULT_TAIL_PANELS, MIN_PRIME_LIMIT, SIGMA_EXPANSION_MIN_T,
};
