//! Tabulated Dickman function.
//!
//! ρ is continued from [0, 1] one unit interval at a time. On [k, k+1] it is
//! an entire-in-the-disc power series around k + ½ whose coefficients follow
//! from vρ′(v) = −ρ(v − 1); the constant term is fixed by the integral form
//! vρ(v) = ∫_{v−1}^{v} ρ evaluated at the centre, which involves no
//! cancellation. Each piece is renormalised so values far below the `f64`
//! range stay representable, and the grid stores log ρ.

use std::io::{Read, Write};

use crate::container::{ContainerReader, ContainerWriter};
use crate::{Error, Result};

pub const DEFAULT_GRID_STEP: f64 = 1.0 / 256.0;
pub const DEFAULT_INTERPOLATION_ORDER: usize = 3;
pub const MAX_INTERPOLATION_ORDER: usize = 9;

const SERIES_TERMS: usize = 64;
const MAGIC: &[u8; 8] = b"RHOTABLE";

/// ρ on one unit interval [k, k+1]: exp(log_scale)·Σ coeffs[j]·(v − k − ½)^j.
#[derive(Debug, Clone)]
struct UnitSeries {
    log_scale: f64,
    coeffs: [f64; SERIES_TERMS],
}

impl UnitSeries {
    fn eval_poly(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    fn log_at(&self, z: f64) -> f64 {
        self.log_scale + self.eval_poly(z).ln()
    }

    /// ∫ Σ c_j z^j dz over [lo, hi].
    fn integral(&self, lo: f64, hi: f64) -> f64 {
        let mut s = 0.0;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            let p = (j + 1) as i32;
            s += c * (hi.powi(p) - lo.powi(p)) / p as f64;
        }
        s
    }
}

/// Series pieces for the unit intervals [0,1], [1,2], …, [units−1, units].
fn dickman_pieces(units: usize) -> Vec<UnitSeries> {
    let mut pieces = Vec::with_capacity(units);
    let mut first = [0.0; SERIES_TERMS];
    first[0] = 1.0;
    pieces.push(UnitSeries {
        log_scale: 0.0,
        coeffs: first,
    });
    for k in 1..units {
        let prev = &pieces[k - 1];
        let centre = k as f64 + 0.5;
        // Coefficients j ≥ 1 in the units of the previous piece.
        let mut c = [0.0; SERIES_TERMS];
        for j in 0..SERIES_TERMS - 1 {
            c[j + 1] = -(prev.coeffs[j] + j as f64 * c[j]) / (centre * (j + 1) as f64);
        }
        // centre·ρ(centre) = ∫_{k−½}^{k} ρ + ∫_{k}^{k+½} ρ.
        let from_prev = prev.integral(0.0, 0.5);
        let mut higher = UnitSeries {
            log_scale: 0.0,
            coeffs: c,
        };
        higher.coeffs[0] = 0.0;
        let from_self = higher.integral(-0.5, 0.0);
        c[0] = (from_prev + from_self) / (centre - 0.5);
        let norm = c[0];
        for cj in c.iter_mut() {
            *cj /= norm;
        }
        pieces.push(UnitSeries {
            log_scale: prev.log_scale + norm.ln(),
            coeffs: c,
        });
    }
    pieces
}

/// Dense grid of log ρ(v) on [0, max_v].
#[derive(Debug, Clone, PartialEq)]
pub struct RhoTable {
    grid_step: f64,
    max_v: f64,
    log_values: Vec<f64>,
    interpolation_order: usize,
    nodes_per_unit: usize,
}

fn nodes_per_unit(grid_step: f64) -> Result<usize> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::domain("grid_step", grid_step, "0 < step ≤ 1"));
    }
    let n = (1.0 / grid_step).round();
    if (n * grid_step - 1.0).abs() > 1e-12 {
        return Err(Error::domain("grid_step", grid_step, "step must divide 1"));
    }
    Ok(n as usize)
}

impl RhoTable {
    /// Tabulates log ρ on [0, max_v] with the given spacing. `max_v` is
    /// rounded up to a whole number so every unit interval is complete.
    pub fn build(max_v: f64, grid_step: f64) -> Result<Self> {
        if !(max_v >= 2.0 && max_v.is_finite()) {
            return Err(Error::domain("max_v", max_v, "max_v ≥ 2"));
        }
        let npu = nodes_per_unit(grid_step)?;
        let units = max_v.ceil() as usize;
        let pieces = dickman_pieces(units);
        let mut log_values = Vec::with_capacity(units * npu + 1);
        log_values.extend(std::iter::repeat_n(0.0, npu + 1));
        for (k, piece) in pieces.iter().enumerate().skip(1) {
            for i in 1..=npu {
                let z = i as f64 / npu as f64 - 0.5;
                log_values.push(piece.log_at(z));
            }
            debug_assert_eq!(log_values.len(), (k + 1) * npu + 1);
        }
        Ok(RhoTable {
            grid_step: 1.0 / npu as f64,
            max_v: units as f64,
            log_values,
            interpolation_order: DEFAULT_INTERPOLATION_ORDER.min(npu),
            nodes_per_unit: npu,
        })
    }

    /// Changes the Lagrange order used between nodes.
    pub fn with_interpolation_order(mut self, order: usize) -> Result<Self> {
        if order == 0 || order > MAX_INTERPOLATION_ORDER || order > self.nodes_per_unit {
            return Err(Error::InvalidArgument(format!(
                "interpolation order {order} not in 1..={} for {} nodes per unit",
                MAX_INTERPOLATION_ORDER.min(self.nodes_per_unit),
                self.nodes_per_unit
            )));
        }
        self.interpolation_order = order;
        Ok(self)
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    pub fn max_v(&self) -> f64 {
        self.max_v
    }

    pub fn interpolation_order(&self) -> usize {
        self.interpolation_order
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// Grid nodes as (v, log ρ(v)).
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = self.grid_step;
        self.log_values.iter().enumerate().map(move |(i, &l)| (i as f64 * h, l))
    }

    fn check_range(&self, v: f64) -> Result<()> {
        if !(0.0..=self.max_v).contains(&v) {
            return Err(Error::domain("v", v, "0 ≤ v ≤ max_v of the ρ table"));
        }
        Ok(())
    }

    pub fn log_rho(&self, v: f64) -> Result<f64> {
        self.check_range(v)?;
        if v <= 1.0 {
            return Ok(0.0);
        }
        let npu = self.nodes_per_unit;
        let pos = v * npu as f64;
        let idx = pos.floor();
        if pos == idx {
            return Ok(self.log_values[idx as usize]);
        }
        // Stay inside the unit interval: log ρ is not smooth across integers.
        let unit = (v.floor() as usize).min(self.max_v as usize - 1);
        let m = self.interpolation_order + 1;
        let lo = unit * npu;
        let hi = lo + npu + 1 - m;
        let start = (pos.ceil() as usize).saturating_sub(m.div_ceil(2)).clamp(lo, hi);
        let t = pos - start as f64;
        let mut acc = 0.0;
        for j in 0..m {
            let mut w = 1.0;
            for l in 0..m {
                if l != j {
                    w *= (t - l as f64) / (j as f64 - l as f64);
                }
            }
            acc += w * self.log_values[start + j];
        }
        Ok(acc)
    }

    pub fn rho(&self, v: f64) -> Result<f64> {
        Ok(self.log_rho(v)?.exp())
    }

    /// ρ′(v) = −ρ(v − 1)/v for v ≥ 1 (right-hand value at the kink v = 1), 0 below.
    pub fn rho_prime(&self, v: f64) -> Result<f64> {
        self.check_range(v)?;
        if v < 1.0 {
            return Ok(0.0);
        }
        Ok(-self.rho(v - 1.0)? / v)
    }

    /// r(v) = −ρ′(v)/ρ(v), computed from logs so that it survives underflow of ρ.
    pub fn r(&self, v: f64) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::domain("v", v, "v > 0"));
        }
        self.check_range(v)?;
        if v <= 1.0 {
            return Ok(0.0);
        }
        Ok((self.log_rho(v - 1.0)? - v.ln() - self.log_rho(v)?).exp())
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<W> {
        let mut out = ContainerWriter::new(w, MAGIC)?;
        out.put_f64(self.grid_step)?;
        out.put_f64(self.max_v)?;
        out.put_f64s(&self.log_values)?;
        out.finish()
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut input = ContainerReader::open(r, MAGIC)?;
        let grid_step = input.get_f64()?;
        let max_v = input.get_f64()?;
        let npu = nodes_per_unit(grid_step).map_err(|e| Error::Format(e.to_string()))?;
        if !(max_v >= 2.0 && max_v.fract() == 0.0 && max_v < 1e6) {
            return Err(Error::Format(format!("bad max_v {max_v}")));
        }
        let len = max_v as usize * npu + 1;
        let log_values = input.get_f64s(len)?;
        input.expect_end()?;
        Ok(RhoTable {
            grid_step,
            max_v,
            log_values,
            interpolation_order: DEFAULT_INTERPOLATION_ORDER.min(npu),
            nodes_per_unit: npu,
        })
    }
}
