use std::fmt;

use rayon::prelude::*;

use crate::primes::primes_up_to;
use crate::summation::Neumaier;
use crate::{Error, Result};

/// Largest argument a [`PsiPrefix`] can be built for.
pub const PSI_PREFIX_HARD_CAP: u64 = 1 << 31;

const BLOCK: u64 = 4096;
const WINDOW_BLOCKS: u64 = 64;

/// ψ(n) = Π_{p | n} (p + 1), by trial division.
pub fn psi_mult(n: i64) -> Result<u64> {
    if n <= 0 {
        return Err(Error::domain("n", n as f64, "n >= 1"));
    }
    let mut m = n as u64;
    let mut out = 1u64;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out *= p + 1;
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out *= m + 1;
    }
    Ok(out)
}

/// ψ(n) for n in [lo, lo + out.len()), given every prime up to √(last n).
fn psi_window(lo: u64, primes: &[u32], rem: &mut [u64], out: &mut [u64]) {
    let len = out.len() as u64;
    for (i, (r, o)) in rem.iter_mut().zip(out.iter_mut()).enumerate() {
        *r = lo + i as u64;
        *o = 1;
    }
    let hi = lo + len;
    for &p in primes {
        let p = p as u64;
        if p * p >= hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m < hi {
            let i = (m - lo) as usize;
            out[i] *= p + 1;
            let mut r = rem[i] / p;
            while r.is_multiple_of(p) {
                r /= p;
            }
            rem[i] = r;
            m += p;
        }
    }
    for (r, o) in rem.iter().zip(out.iter_mut()) {
        if *r > 1 {
            *o *= r + 1;
        }
    }
}

/// Prefix sums S₀(N) = Σ_{n≤N} 1/ψ(n) and S₁(N) = Σ_{n≤N} 1/(nψ(n)), stored
/// at checkpoints every 4096 integers; values between checkpoints are
/// completed on demand by sieving the partial block.
#[derive(Clone)]
pub struct PsiPrefix {
    limit: u64,
    primes: Vec<u32>,
    checkpoints: Vec<[Neumaier; 2]>,
}

impl fmt::Debug for PsiPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PsiPrefix")
            .field("limit", &self.limit)
            .field("checkpoints", &self.checkpoints.len())
            .finish()
    }
}

/// The pair (S₀, S₁) of a run of consecutive integers.
fn block_sums(lo: u64, psi: &[u64]) -> [Neumaier; 2] {
    let mut s0 = Neumaier::new();
    let mut s1 = Neumaier::new();
    for (i, &v) in psi.iter().enumerate() {
        let inv = 1.0 / v as f64;
        s0.add(inv);
        s1.add(inv / (lo + i as u64) as f64);
    }
    [s0, s1]
}

impl PsiPrefix {
    pub fn build(limit: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::domain("limit", 0.0, "limit >= 1"));
        }
        if limit > PSI_PREFIX_HARD_CAP {
            return Err(Error::Resource(format!(
                "psi prefix limit {limit} exceeds {PSI_PREFIX_HARD_CAP}"
            )));
        }
        let primes = primes_up_to(((limit as f64).sqrt() as u64 + 2).min(limit.max(2)))?;
        let full_blocks = limit / BLOCK;
        let windows = full_blocks.div_ceil(WINDOW_BLOCKS);
        let per_window: Vec<Vec<[Neumaier; 2]>> = (0..windows)
            .into_par_iter()
            .map(|w| {
                let first = w * WINDOW_BLOCKS;
                let last = (first + WINDOW_BLOCKS).min(full_blocks);
                let lo = first * BLOCK + 1;
                let len = ((last - first) * BLOCK) as usize;
                let mut rem = vec![0u64; len];
                let mut psi = vec![0u64; len];
                psi_window(lo, &primes, &mut rem, &mut psi);
                psi.chunks(BLOCK as usize)
                    .enumerate()
                    .map(|(b, chunk)| block_sums(lo + b as u64 * BLOCK, chunk))
                    .collect()
            })
            .collect();
        let mut checkpoints = Vec::with_capacity(full_blocks as usize + 1);
        let mut acc = [Neumaier::new(), Neumaier::new()];
        checkpoints.push(acc);
        for block in per_window.iter().flatten() {
            acc[0].merge(&block[0]);
            acc[1].merge(&block[1]);
            checkpoints.push(acc);
        }
        Ok(PsiPrefix {
            limit,
            primes,
            checkpoints,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Compensated (S₀(n), S₁(n)) for 0 ≤ n ≤ limit.
    pub fn sums(&self, n: u64) -> Result<[Neumaier; 2]> {
        if n > self.limit {
            return Err(Error::domain("n", n as f64, "n <= prefix limit"));
        }
        let k = n / BLOCK;
        let mut acc = self.checkpoints[k as usize];
        let lo = k * BLOCK + 1;
        if n >= lo {
            let len = (n - lo + 1) as usize;
            let mut rem = vec![0u64; len];
            let mut psi = vec![0u64; len];
            psi_window(lo, &self.primes, &mut rem, &mut psi);
            let part = block_sums(lo, &psi);
            acc[0].merge(&part[0]);
            acc[1].merge(&part[1]);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(psi_mult(1).unwrap(), 1);
        assert_eq!(psi_mult(12).unwrap(), 12);
        assert_eq!(psi_mult(8).unwrap(), 3);
        assert_eq!(psi_mult(97).unwrap(), 98);
        assert!(psi_mult(0).is_err());
        assert!(psi_mult(-3).is_err());
    }

    #[test]
    fn window_matches_trial_division() {
        let primes = primes_up_to(400).unwrap();
        let lo = 100_000;
        let mut rem = vec![0; 3000];
        let mut out = vec![0; 3000];
        psi_window(lo, &primes, &mut rem, &mut out);
        for (i, &v) in out.iter().enumerate() {
            assert_eq!(v, psi_mult((lo + i as u64) as i64).unwrap());
        }
    }

    #[test]
    fn prefix_matches_direct_sums() {
        let limit = 50_000;
        let pre = PsiPrefix::build(limit).unwrap();
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        for n in 1..=limit {
            let p = psi_mult(n as i64).unwrap() as f64;
            s0 += 1.0 / p;
            s1 += 1.0 / (n as f64 * p);
            if n % 4093 == 0 || n == limit || n < 5 || n == 4096 || n == 4097 {
                let [a, b] = pre.sums(n).unwrap();
                assert!((a.value() - s0).abs() < 1e-12 * s0, "n = {n}: {} vs {s0}", a.value());
                assert!((b.value() - s1).abs() < 1e-12 * s1, "n = {n}: {} vs {s1}", b.value());
            }
        }
        assert_eq!(pre.sums(0).unwrap()[0].value(), 0.0);
        assert!(pre.sums(limit + 1).is_err());
    }

    proptest! {
        #[test]
        fn psi_is_multiplicative(a in 1i64..5000, b in 1i64..5000) {
            let g = gcd(a, b);
            if g == 1 {
                prop_assert_eq!(psi_mult(a * b).unwrap(), psi_mult(a).unwrap() * psi_mult(b).unwrap());
            }
            // ψ depends only on the radical.
            prop_assert_eq!(psi_mult(a * a).unwrap(), psi_mult(a).unwrap());
        }
    }

    fn gcd(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
}
