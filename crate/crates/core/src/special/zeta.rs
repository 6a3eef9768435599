use std::sync::OnceLock;

use crate::{Error, Result};

pub const DEFAULT_ACCELERATION_TERMS: usize = 64;
pub const DEFAULT_TARGET_ABS_ERROR: f64 = 1e-12;

/// Real ζ through the alternating η series, accelerated with the
/// Cohen–Villegas–Zagier weights (Borwein's second algorithm).
#[derive(Debug, Clone)]
pub struct ZetaEvaluator {
    acceleration_terms: usize,
    target_abs_error: f64,
    /// w_k = (d_n − d_k)/d_n; η(s) ≈ Σ_{k<n} (−1)^k w_k (k+1)^{−s}.
    weights: Vec<f64>,
}

impl ZetaEvaluator {
    pub fn new(acceleration_terms: usize, target_abs_error: f64) -> Result<Self> {
        if !(4..=400).contains(&acceleration_terms) {
            return Err(Error::InvalidArgument(format!(
                "acceleration_terms = {acceleration_terms} not in 4..=400"
            )));
        }
        let n = acceleration_terms;
        let nf = n as f64;
        // t_i = n (n+i−1)! 4^i / ((n−i)! (2i)!), d_k = Σ_{i≤k} t_i.
        let mut t = Vec::with_capacity(n + 1);
        t.push(1.0f64);
        for i in 1..=n {
            let fi = i as f64;
            let prev = t[i - 1];
            t.push(prev * 4.0 * (nf + fi - 1.0) * (nf - fi + 1.0) / ((2.0 * fi - 1.0) * (2.0 * fi)));
        }
        let d_n: f64 = t.iter().sum();
        let mut weights = vec![0.0; n];
        let mut suffix = 0.0;
        for k in (0..n).rev() {
            suffix += t[k + 1];
            weights[k] = suffix / d_n;
        }
        Ok(ZetaEvaluator {
            acceleration_terms,
            target_abs_error,
            weights,
        })
    }

    pub fn acceleration_terms(&self) -> usize {
        self.acceleration_terms
    }

    pub fn target_abs_error(&self) -> f64 {
        self.target_abs_error
    }

    /// Dirichlet η(s) = Σ (−1)^{k} (k+1)^{−s}.
    pub fn eta(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::domain("s", s, "s > 0"));
        }
        let mut acc = 0.0;
        for (k, w) in self.weights.iter().enumerate().rev() {
            let term = w * (-s * ((k + 1) as f64).ln()).exp();
            if k % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        Ok(acc)
    }

    pub fn zeta(&self, s: f64) -> Result<f64> {
        if s == 1.0 {
            return Err(Error::domain("s", s, "s ≠ 1 (pole)"));
        }
        let eta = self.eta(s)?;
        Ok(eta / -((1.0 - s) * std::f64::consts::LN_2).exp_m1())
    }

    /// Z(s) = (s − 1)ζ(s)/s, continuous through s = 1 where Z(1) = 1.
    pub fn z(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::domain("s", s, "s > 0"));
        }
        if s == 1.0 {
            return Ok(1.0);
        }
        // (s − 1)/(1 − 2^{1−s}) = (x/(1 − e^{−x}))/log 2 with x = (s − 1) log 2.
        let x = (s - 1.0) * std::f64::consts::LN_2;
        let ratio = if x.abs() < 1e-8 {
            1.0 + 0.5 * x
        } else {
            x / -(-x).exp_m1()
        };
        Ok(self.eta(s)? * ratio / std::f64::consts::LN_2 / s)
    }
}

impl Default for ZetaEvaluator {
    fn default() -> Self {
        ZetaEvaluator::new(DEFAULT_ACCELERATION_TERMS, DEFAULT_TARGET_ABS_ERROR)
            .expect("default parameters are valid")
    }
}

fn shared() -> &'static ZetaEvaluator {
    static EVAL: OnceLock<ZetaEvaluator> = OnceLock::new();
    EVAL.get_or_init(ZetaEvaluator::default)
}

/// ζ(s) for real s > 0, s ≠ 1.
pub fn zeta_real(s: f64) -> Result<f64> {
    shared().zeta(s)
}

/// Z(s) = (s − 1)ζ(s)/s for real s > 0.
pub fn z_factor(s: f64) -> Result<f64> {
    shared().z(s)
}
