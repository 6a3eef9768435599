//! Single-variable special functions: ρ and its logarithmic derivative, the
//! root ξ(v) of e^ξ = 1 + vξ, real ζ and Z(s) = (s − 1)ζ(s)/s.

mod rho;
mod xi;
mod zeta;

pub use rho::{RhoTable, DEFAULT_GRID_STEP, DEFAULT_INTERPOLATION_ORDER, MAX_INTERPOLATION_ORDER};
pub use xi::{xi, xi_prime, xi_residual};
pub use zeta::{
    z_factor, zeta_real, ZetaEvaluator, DEFAULT_ACCELERATION_TERMS, DEFAULT_TARGET_ABS_ERROR,
};
