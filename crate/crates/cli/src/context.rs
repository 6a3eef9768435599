//! Tables shared by one invocation, built on first use and optionally cached.

use std::cell::OnceCell;
use std::io::Write;

use friable::container::load_or_rebuild;
use friable::kernel::{PsiPrefix, SaddleContext, PSI_PREFIX_HARD_CAP};
use friable::sieves::{FactorSource, FactorTables, StreamingFactors, DEFAULT_TABLE_CAP};
use friable::special::RhoTable;
use friable::{Error, Result};

use crate::args::GlobalOpts;

/// Smallest rho table built, so small requests share one cache file.
const MIN_RHO_RANGE: f64 = 20.0;

pub enum Source {
    Tables(FactorTables),
    Stream(StreamingFactors),
}

impl FactorSource for Source {
    fn limit(&self) -> u64 {
        match self {
            Source::Tables(t) => t.limit(),
            Source::Stream(s) => s.limit(),
        }
    }

    fn map_windows<T, F>(&self, hi: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &[u32], &[u32]) -> T + Sync,
    {
        match self {
            Source::Tables(t) => t.map_windows(hi, f),
            Source::Stream(s) => s.map_windows(hi, f),
        }
    }
}

pub struct Context {
    opts: GlobalOpts,
    rho: OnceCell<RhoTable>,
    source: OnceCell<Source>,
    saddle: OnceCell<SaddleContext>,
    prefix: OnceCell<PsiPrefix>,
}

impl Context {
    pub fn new(opts: GlobalOpts) -> Self {
        Context {
            opts,
            rho: OnceCell::new(),
            source: OnceCell::new(),
            saddle: OnceCell::new(),
            prefix: OnceCell::new(),
        }
    }

    /// ρ table covering [0, max_v].
    pub fn rho(&self, max_v: f64) -> Result<&RhoTable> {
        if let Some(t) = self.rho.get() {
            if t.max_v() >= max_v {
                return Ok(t);
            }
        }
        let top = max_v.ceil().max(MIN_RHO_RANGE);
        let h = self.opts.grid_step;
        let table = match &self.opts.cache_dir {
            Some(dir) => load_or_rebuild(
                &dir.join(format!("rho-{top}-{h}.bin")),
                RhoTable::read_from,
                |t| t.max_v() == top && t.grid_step() == h,
                || RhoTable::build(top, h),
                |t, w| t.write_to(w)?.flush().map_err(Into::into),
            )?,
            None => RhoTable::build(top, h)?,
        };
        let _ = self.rho.set(table);
        Ok(self.rho.get().expect("set above"))
    }

    /// Factor data for every n ≤ x (or the configured table limit).
    pub fn source(&self, x: f64) -> Result<&Source> {
        if let Some(s) = self.source.get() {
            return Ok(s);
        }
        let need = x.max(1.0).floor() as u64;
        let limit = match self.opts.table_limit {
            Some(l) if l < need => {
                return Err(Error::InvalidArgument(format!("x = {x} exceeds --table-limit {l}")));
            }
            Some(l) => l,
            None => need,
        };
        let src = if self.opts.low_memory {
            Source::Stream(StreamingFactors::new(limit)?)
        } else {
            match &self.opts.cache_dir {
                Some(dir) => Source::Tables(FactorTables::load_or_build(limit, DEFAULT_TABLE_CAP, dir)?),
                None => Source::Tables(FactorTables::build(limit)?),
            }
        };
        let _ = self.source.set(src);
        Ok(self.source.get().expect("set above"))
    }

    pub fn saddle(&self) -> Result<&SaddleContext> {
        if let Some(c) = self.saddle.get() {
            return Ok(c);
        }
        let limit = self.opts.prime_limit;
        let ctx = match &self.opts.cache_dir {
            Some(dir) => SaddleContext::with_cache(limit, dir)?,
            None => SaddleContext::new(limit)?,
        };
        let _ = self.saddle.set(ctx);
        Ok(self.saddle.get().expect("set above"))
    }

    /// Prefix sums of 1/ψ(n) up to min(x, cap).
    pub fn prefix(&self, x: f64) -> Result<&PsiPrefix> {
        if let Some(p) = self.prefix.get() {
            return Ok(p);
        }
        let limit = (x.max(1.0).floor() as u64).min(PSI_PREFIX_HARD_CAP);
        let _ = self.prefix.set(PsiPrefix::build(limit)?);
        Ok(self.prefix.get().expect("set above"))
    }
}
