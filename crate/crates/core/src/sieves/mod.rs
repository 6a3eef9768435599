//! Largest-prime-factor and radical tables, and the exact counters built on
//! them.

mod counts;
mod tables;

pub use counts::{
    d_exact, dickman_sum_exact, integral_identity_check, n_exact, psi_exact, s_exact, CountQuery,
    Numerator,
};
pub use tables::{
    FactorSource, FactorTables, StreamingFactors, DEFAULT_TABLE_CAP, MAX_TABLE_LIMIT, STREAM_WINDOW,
};
