//! Prime generation shared by the saddle-point sums and the segmented sieves.

use std::io::{Read, Write};

use crate::container::{ContainerReader, ContainerWriter};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"PRIMELST";

/// Largest bound accepted by [`primes_up_to`]; primes are stored as `u32`.
pub const MAX_PRIME_LIMIT: u64 = u32::MAX as u64;

/// All primes ≤ `limit`, ascending (odd-only sieve of Eratosthenes).
pub fn primes_up_to(limit: u64) -> Result<Vec<u32>> {
    if limit > MAX_PRIME_LIMIT {
        return Err(Error::Resource(format!(
            "prime limit {limit} exceeds {MAX_PRIME_LIMIT}"
        )));
    }
    if limit < 2 {
        return Ok(Vec::new());
    }
    let limit = limit as usize;
    // Slot i stands for 2i + 1.
    let half = (limit - 1) / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity(approx_prime_count(limit as f64));
    out.push(2);
    out.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, c)| !**c)
            .map(|(i, _)| (2 * i + 1) as u32),
    );
    Ok(out)
}

fn approx_prime_count(x: f64) -> usize {
    if x < 17.0 {
        8
    } else {
        (1.26 * x / x.ln()) as usize
    }
}

/// Serialises a prime list together with the bound it was sieved to.
pub fn write_primes<W: Write>(w: W, limit: u64, primes: &[u32]) -> Result<W> {
    let mut out = ContainerWriter::new(w, MAGIC)?;
    out.put_u64(limit)?;
    out.put_u64(primes.len() as u64)?;
    out.put_u32s(primes)?;
    out.finish()
}

/// Reads a list written by [`write_primes`], returning `(limit, primes)`.
pub fn read_primes<R: Read>(r: R) -> Result<(u64, Vec<u32>)> {
    let mut inp = ContainerReader::open(r, MAGIC)?;
    let limit = inp.get_u64()?;
    let len = inp.get_u64()? as usize;
    if len > approx_prime_count(limit as f64).max(16) {
        return Err(Error::Format(format!("prime count {len} implausible for limit {limit}")));
    }
    let primes = inp.get_u32s(len)?;
    inp.expect_end()?;
    if primes.windows(2).any(|w| w[0] >= w[1]) || primes.last().is_some_and(|&p| p as u64 > limit) {
        return Err(Error::Format("prime list not ascending within its limit".into()));
    }
    Ok((limit, primes))
}
