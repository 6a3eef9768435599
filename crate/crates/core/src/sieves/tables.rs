use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::container::{load_or_rebuild, ContainerReader, ContainerWriter};
use crate::primes::primes_up_to;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"FACTTBLS";

/// Default upper bound for in-memory tables (two u32 arrays, ~800 MB at 10⁸).
pub const DEFAULT_TABLE_CAP: u64 = 100_000_000;
/// Hard bound imposed by 32-bit entries.
pub const MAX_TABLE_LIMIT: u64 = (1 << 31) - 1;

const BUILD_WINDOW: usize = 1 << 16;
/// Window length of the low-memory scanner.
pub const STREAM_WINDOW: usize = 1 << 22;

/// Fills `lpf` and `rad` for the integers lo, lo + 1, … given every prime up
/// to the square root of the last one.
pub(crate) fn factor_window(lo: u64, primes: &[u32], lpf: &mut [u32], rad: &mut [u32], rem: &mut [u32]) {
    let len = lpf.len();
    let hi = lo + len as u64;
    for i in 0..len {
        rem[i] = (lo + i as u64) as u32;
        lpf[i] = 1;
        rad[i] = 1;
    }
    for &p in primes {
        let p64 = p as u64;
        if p64 * p64 >= hi {
            break;
        }
        let mut m = lo.div_ceil(p64) * p64;
        while m < hi {
            let i = (m - lo) as usize;
            lpf[i] = p;
            rad[i] *= p;
            let mut r = rem[i] / p;
            while r.is_multiple_of(p) {
                r /= p;
            }
            rem[i] = r;
            m += p64;
        }
    }
    for i in 0..len {
        if rem[i] > 1 {
            lpf[i] = rem[i];
            rad[i] *= rem[i];
        }
    }
}

/// Anything that can present P⁺(n) and k(n) for n = 1, 2, … in windows.
pub trait FactorSource: Sync {
    /// Largest n covered.
    fn limit(&self) -> u64;

    /// Applies `f(lo, lpf, rad)` to consecutive windows covering 1..=hi and
    /// returns the results in window order.
    fn map_windows<T, F>(&self, hi: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &[u32], &[u32]) -> T + Sync;
}

/// P⁺(n) and k(n) for every n ≤ limit. Index 0 is unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorTables {
    limit: u64,
    lpf: Vec<u32>,
    radical: Vec<u32>,
}

impl FactorTables {
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with_cap(limit, DEFAULT_TABLE_CAP)
    }

    pub fn build_with_cap(limit: u64, cap: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::domain("X", limit as f64, "X >= 2"));
        }
        let cap = cap.min(MAX_TABLE_LIMIT);
        if limit > cap {
            return Err(Error::Resource(format!("table limit {limit} exceeds cap {cap}")));
        }
        let primes = primes_up_to((limit as f64).sqrt() as u64 + 1)?;
        let n = limit as usize + 1;
        let mut lpf = vec![0u32; n];
        let mut radical = vec![0u32; n];
        lpf[1..]
            .par_chunks_mut(BUILD_WINDOW)
            .zip(radical[1..].par_chunks_mut(BUILD_WINDOW))
            .enumerate()
            .for_each(|(w, (l, r))| {
                let mut rem = vec![0u32; l.len()];
                factor_window(1 + (w * BUILD_WINDOW) as u64, &primes, l, r, &mut rem);
            });
        Ok(FactorTables { limit, lpf, radical })
    }

    /// Entry n holds P⁺(n); entry 0 is 0.
    pub fn lpf(&self) -> &[u32] {
        &self.lpf
    }

    /// Entry n holds k(n); entry 0 is 0.
    pub fn radical(&self) -> &[u32] {
        &self.radical
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<W> {
        let mut out = ContainerWriter::new(w, MAGIC)?;
        out.put_u64(self.limit)?;
        out.put_u32s(&self.lpf[1..])?;
        out.put_u32s(&self.radical[1..])?;
        out.finish()
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut inp = ContainerReader::open(r, MAGIC)?;
        let limit = inp.get_u64()?;
        if !(2..=MAX_TABLE_LIMIT).contains(&limit) {
            return Err(Error::Format(format!("table limit {limit} out of range")));
        }
        let mut lpf = vec![0u32];
        lpf.extend(inp.get_u32s(limit as usize)?);
        let mut radical = vec![0u32];
        radical.extend(inp.get_u32s(limit as usize)?);
        inp.expect_end()?;
        if lpf[1] != 1 || radical[1] != 1 || lpf[2] != 2 || radical[2] != 2 {
            return Err(Error::Format("factor tables fail the n = 1, 2 sanity check".into()));
        }
        Ok(FactorTables { limit, lpf, radical })
    }

    /// Loads `factors-<limit>.bin` from `dir`, building and storing it when
    /// the file is missing or stale.
    pub fn load_or_build(limit: u64, cap: u64, dir: &Path) -> Result<Self> {
        load_or_rebuild(
            &dir.join(format!("factors-{limit}.bin")),
            Self::read_from,
            |t| t.limit == limit,
            || Self::build_with_cap(limit, cap),
            |t, w| t.write_to(w)?.flush().map_err(Into::into),
        )
    }
}

impl FactorSource for FactorTables {
    fn limit(&self) -> u64 {
        self.limit
    }

    fn map_windows<T, F>(&self, hi: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &[u32], &[u32]) -> T + Sync,
    {
        let hi = hi.min(self.limit) as usize;
        self.lpf[1..=hi]
            .par_chunks(BUILD_WINDOW)
            .zip(self.radical[1..=hi].par_chunks(BUILD_WINDOW))
            .enumerate()
            .map(|(w, (l, r))| f(1 + (w * BUILD_WINDOW) as u64, l, r))
            .collect()
    }
}

/// Low-memory mode: recomputes P⁺ and k by segmented sieving in windows of
/// 2²² integers on every scan, holding only the primes up to √limit.
#[derive(Debug, Clone)]
pub struct StreamingFactors {
    limit: u64,
    primes: Vec<u32>,
}

impl StreamingFactors {
    pub fn new(limit: u64) -> Result<Self> {
        if !(2..=MAX_TABLE_LIMIT).contains(&limit) {
            return Err(Error::domain("X", limit as f64, "2 <= X < 2^31"));
        }
        Ok(StreamingFactors {
            limit,
            primes: primes_up_to((limit as f64).sqrt() as u64 + 1)?,
        })
    }
}

impl FactorSource for StreamingFactors {
    fn limit(&self) -> u64 {
        self.limit
    }

    fn map_windows<T, F>(&self, hi: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &[u32], &[u32]) -> T + Sync,
    {
        let hi = hi.min(self.limit);
        let windows = hi.div_ceil(STREAM_WINDOW as u64);
        (0..windows)
            .into_par_iter()
            .map(|w| {
                let lo = 1 + w * STREAM_WINDOW as u64;
                let len = (hi + 1 - lo).min(STREAM_WINDOW as u64) as usize;
                let mut lpf = vec![0u32; len];
                let mut rad = vec![0u32; len];
                let mut rem = vec![0u32; len];
                factor_window(lo, &self.primes, &mut lpf, &mut rad, &mut rem);
                f(lo, &lpf, &rad)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_examples() {
        let t = FactorTables::build(12).unwrap();
        assert_eq!(&t.lpf()[1..], &[1, 2, 3, 2, 5, 3, 7, 2, 3, 5, 11, 3]);
        assert_eq!(t.radical()[12], 6);
        assert_eq!(t.radical()[8], 2);
        assert_eq!(t.radical()[1], 1);
        let t = FactorTables::build(97).unwrap();
        assert_eq!(t.lpf()[97], 97);
        assert_eq!(t.radical()[97], 97);
    }

    #[test]
    fn limits() {
        assert!(FactorTables::build(1).is_err());
        assert!(FactorTables::build_with_cap(1000, 999).unwrap_err().is_resource());
        assert!(StreamingFactors::new(1).is_err());
    }

    #[test]
    fn streaming_agrees_with_tables() {
        let x = 5_000_000;
        let t = FactorTables::build(x).unwrap();
        let s = StreamingFactors::new(x).unwrap();
        let windows = s.map_windows(x, |lo, l, r| (lo, l.to_vec(), r.to_vec()));
        assert_eq!(windows.len(), 2);
        for (lo, l, r) in windows {
            let a = lo as usize;
            assert_eq!(&t.lpf()[a..a + l.len()], &l[..]);
            assert_eq!(&t.radical()[a..a + r.len()], &r[..]);
        }
    }

    #[test]
    fn table_invariants() {
        let t = FactorTables::build(200_000).unwrap();
        let primes = primes_up_to(200_000).unwrap();
        for &p in &primes {
            assert_eq!(t.lpf()[p as usize], p);
        }
        for n in 2..=200_000usize {
            let (p, k) = (t.lpf()[n] as usize, t.radical()[n] as usize);
            assert_eq!(n % k, 0);
            assert_eq!(n % p, 0);
            assert!(primes.binary_search(&(p as u32)).is_ok());
            // Squarefree, and no prime above p divides n.
            assert!(primes.iter().take_while(|&&q| (q as usize) * (q as usize) <= k).all(|&q| k % (q as usize * q as usize) != 0));
            assert_eq!(k % p, 0);
        }
    }

    #[test]
    fn round_trip_and_rejection() {
        let t = FactorTables::build(10_000).unwrap();
        let buf = t.write_to(Vec::new()).unwrap();
        assert_eq!(FactorTables::read_from(&buf[..]).unwrap(), t);
        let mut bad = buf.clone();
        bad[3] = b'X';
        assert!(matches!(FactorTables::read_from(&bad[..]), Err(Error::Format(_))));
        assert!(FactorTables::read_from(&buf[..buf.len() - 1]).is_err());
    }

    proptest! {
        #[test]
        fn window_offsets_do_not_matter(lo in 2u64..1_000_000, len in 1usize..3000) {
            let primes = primes_up_to(1100).unwrap();
            let mut l = vec![0; len];
            let mut r = vec![0; len];
            let mut rem = vec![0; len];
            factor_window(lo, &primes, &mut l, &mut r, &mut rem);
            for i in 0..len {
                let mut n = lo + i as u64;
                let mut big = 1;
                let mut k = 1;
                let mut d = 2;
                while d * d <= n {
                    if n.is_multiple_of(d) {
                        big = d;
                        k *= d;
                        while n.is_multiple_of(d) { n /= d; }
                    }
                    d += 1;
                }
                if n > 1 { big = n; k *= n; }
                prop_assert_eq!(l[i] as u64, big);
                prop_assert_eq!(r[i] as u64, k);
            }
        }
    }
}
