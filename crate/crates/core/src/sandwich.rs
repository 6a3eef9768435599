//! Brackets D(x, u) and S(x; ϑ, α) between telescoping sums of a
//! one-condition count Ψ(x, y) or N(x, y) on a geometric grid
//! x_k = x·e^{−kε}.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimators::{kernel_threshold, psi_saddle};
use crate::kernel::{big_f, PsiPrefix};
use crate::sieves::{n_exact, psi_exact, FactorSource};
use crate::special::RhoTable;
use crate::summation::Neumaier;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Friable,
    Kernel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichSchedule {
    pub epsilon: f64,
    pub steps: usize,
    pub kind: ScheduleKind,
    /// x_0 > x_1 > … > x_K.
    pub xs: Vec<f64>,
    /// y_k attached to x_k.
    pub ys: Vec<f64>,
    /// Steps the unconstrained rule asked for, when the floor on x_K cut it.
    pub uncapped_steps: Option<usize>,
}

fn geometric(x: f64, epsilon: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| x * (-(k as f64) * epsilon).exp()).collect()
}

/// Largest K with x·e^{−Kε} ≥ floor.
fn cap_steps(x: f64, epsilon: f64, floor: f64) -> usize {
    ((x / floor).ln() / epsilon).floor().max(0.0) as usize
}

impl SandwichSchedule {
    /// ε = 1/√(log x · log 2u), K = ⌈2 log log x/ε⌉, y_k = x_k^{1/u}.
    pub fn friable(x: f64, u: f64) -> Result<Self> {
        if !(x >= 16.0 && x.is_finite()) {
            return Err(Error::domain("x", x, "x >= 16"));
        }
        if !(u >= 1.0 && u.is_finite()) {
            return Err(Error::domain("u", u, "u >= 1"));
        }
        let lx = x.ln();
        let epsilon = 1.0 / (lx * (2.0 * u).ln()).sqrt();
        let wanted = ((2.0 * lx.ln() / epsilon).ceil() as usize).max(1);
        Self::friable_with(x, u, epsilon, wanted)
    }

    /// A friable schedule with explicit ε and K (K still capped so x_K ≥ 2).
    pub fn friable_with(x: f64, u: f64, epsilon: f64, steps: usize) -> Result<Self> {
        if !(epsilon > 0.0) || steps == 0 {
            return Err(Error::InvalidArgument(format!("epsilon = {epsilon}, K = {steps}")));
        }
        let cap = cap_steps(x, epsilon, 2.0);
        if cap == 0 {
            return Err(Error::domain("epsilon", epsilon, "x e^{-epsilon} >= 2"));
        }
        let k = steps.min(cap);
        let xs = geometric(x, epsilon, k);
        let ys = xs.iter().map(|t| t.powf(1.0 / u)).collect();
        Ok(SandwichSchedule {
            epsilon,
            steps: k,
            kind: ScheduleKind::Friable,
            xs,
            ys,
            uncapped_steps: (k < steps).then_some(steps),
        })
    }

    /// ε = √(log v / v), K = ⌊2 log v/(εϑ)⌋, y_k = x_k^ϑ (log x_k)^α with
    /// v = log(x/y) ≥ 4.
    pub fn kernel(x: f64, theta: f64, alpha: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::domain("theta", theta, "0 < theta <= 1"));
        }
        if !(x >= 16.0 && x.is_finite()) {
            return Err(Error::domain("x", x, "x >= 16"));
        }
        let v = (x / kernel_threshold(x, theta, alpha)).ln();
        if !(v >= 4.0) {
            return Err(Error::domain("v", v, "v = log(x/y) >= 4"));
        }
        let epsilon = (v.ln() / v).sqrt();
        let wanted = ((2.0 * v.ln() / (epsilon * theta)).floor() as usize).max(1);
        Self::kernel_with(x, theta, alpha, epsilon, wanted)
    }

    /// [`SandwichSchedule::kernel`] with v replaced by max(v, 4) in the ε and K
    /// rules, for queries too close to y = x for the default rule.
    pub fn kernel_clamped(x: f64, theta: f64, alpha: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::domain("theta", theta, "0 < theta <= 1"));
        }
        if !(x >= 16.0 && x.is_finite()) {
            return Err(Error::domain("x", x, "x >= 16"));
        }
        let v = (x / kernel_threshold(x, theta, alpha)).ln();
        if v >= 4.0 {
            return Self::kernel(x, theta, alpha);
        }
        let epsilon = (4f64.ln() / 4.0).sqrt();
        let wanted = ((2.0 * 4f64.ln() / (epsilon * theta)).floor() as usize).max(1);
        Self::kernel_with(x, theta, alpha, epsilon, wanted)
    }

    /// A kernel schedule with explicit ε and K. K is capped so that x_K stays
    /// above [`kernel_floor`].
    pub fn kernel_with(x: f64, theta: f64, alpha: f64, epsilon: f64, steps: usize) -> Result<Self> {
        if !(epsilon > 0.0) || steps == 0 {
            return Err(Error::InvalidArgument(format!("epsilon = {epsilon}, K = {steps}")));
        }
        let floor = kernel_floor(theta, alpha);
        let cap = cap_steps(x, epsilon, floor);
        if cap == 0 {
            return Err(Error::domain("x", x, "room for one step above the monotonicity floor"));
        }
        let k = steps.min(cap);
        let xs = geometric(x, epsilon, k);
        let ys = xs.iter().map(|&t| kernel_threshold(t, theta, alpha)).collect();
        Ok(SandwichSchedule {
            epsilon,
            steps: k,
            kind: ScheduleKind::Kernel,
            xs,
            ys,
            uncapped_steps: (k < steps).then_some(steps),
        })
    }

    /// Same kind and query with ε halved and K doubled.
    pub fn refined(&self, x: f64, param: f64, alpha: f64) -> Result<Self> {
        match self.kind {
            ScheduleKind::Friable => Self::friable_with(x, param, 0.5 * self.epsilon, 2 * self.steps),
            ScheduleKind::Kernel => Self::kernel_with(x, param, alpha, 0.5 * self.epsilon, 2 * self.steps),
        }
    }
}

/// Smallest t ≥ 2 past which t ↦ t^ϑ (log t)^α is increasing and at least 1.
pub fn kernel_floor(theta: f64, alpha: f64) -> f64 {
    // Increasing once log t > −α/ϑ; then solve ϑ log t + α log log t ≥ 0.
    let mut lo = (-alpha / theta).max(2f64.ln()) * (1.0 + 1e-9);
    let ok = |l: f64| theta * l + alpha * l.ln() >= 0.0;
    if ok(lo) {
        return lo.exp().max(2.0);
    }
    let mut hi = 2.0 * lo;
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluatorLabel {
    Exact,
    Asymptotic,
}

/// A two-variable count (x, y) ↦ Ψ(x, y) or N(x, y), exact or estimated.
pub trait TwoVarEvaluator: Sync {
    fn label(&self) -> EvaluatorLabel;
    fn eval(&self, x: f64, y: f64) -> Result<f64>;
}

/// Ψ(x, y) from factor tables; 0 when x < 1 or y < 1.
pub struct ExactPsi<'a, S: FactorSource>(pub &'a S);

impl<S: FactorSource> TwoVarEvaluator for ExactPsi<'_, S> {
    fn label(&self) -> EvaluatorLabel {
        EvaluatorLabel::Exact
    }

    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if x < 1.0 || y < 1.0 {
            return Ok(0.0);
        }
        Ok(psi_exact(self.0, x, y)? as f64)
    }
}

/// N(x, y) from factor tables; 0 when x < 1 or y < 1.
pub struct ExactN<'a, S: FactorSource>(pub &'a S);

impl<S: FactorSource> TwoVarEvaluator for ExactN<'_, S> {
    fn label(&self) -> EvaluatorLabel {
        EvaluatorLabel::Exact
    }

    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if x < 1.0 || y < 1.0 {
            return Ok(0.0);
        }
        Ok(n_exact(self.0, x, y)? as f64)
    }
}

/// Ψ(x, y) ≈ xρ(u)Z(β); x itself once y ≥ x.
pub struct SaddlePsi<'a>(pub &'a RhoTable);

impl TwoVarEvaluator for SaddlePsi<'_> {
    fn label(&self) -> EvaluatorLabel {
        EvaluatorLabel::Asymptotic
    }

    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if y >= x {
            return Ok(x);
        }
        Ok(psi_saddle(self.0, x, y)?.value)
    }
}

/// N(x, y) ≈ yF(log(x/y)); x itself once y ≥ x.
pub struct DensityN<'a>(pub Option<&'a PsiPrefix>);

impl TwoVarEvaluator for DensityN<'_> {
    fn label(&self) -> EvaluatorLabel {
        EvaluatorLabel::Asymptotic
    }

    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if y >= x {
            return Ok(x);
        }
        Ok(y * big_f((x / y).ln(), self.0)?.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub x_k: f64,
    pub y_k: f64,
    /// Running lower sum after step k.
    pub lower_partial: f64,
    /// Running upper sum after step k (final row includes the x_K term).
    pub upper_partial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichResult {
    pub lower: f64,
    pub upper: f64,
    pub label: EvaluatorLabel,
    pub trace: Vec<TraceRow>,
}

impl SandwichResult {
    /// (upper − lower)/upper.
    pub fn relative_gap(&self) -> f64 {
        (self.upper - self.lower) / self.upper
    }
}

fn run<E: TwoVarEvaluator + ?Sized>(eval: &E, sched: &SandwichSchedule) -> Result<SandwichResult> {
    let (xs, ys) = (&sched.xs, &sched.ys);
    let k_max = sched.steps;
    let at = |k: usize, x: f64, y: f64| eval.eval(x, y).map_err(|e| Error::Step { step: k, source: Box::new(e) });
    let steps: Vec<(f64, f64)> = (0..k_max)
        .into_par_iter()
        .map(|k| {
            let lower = at(k, xs[k], ys[k + 1])? - at(k, xs[k + 1], ys[k + 1])?;
            let upper = at(k, xs[k], ys[k])? - at(k, xs[k + 1], ys[k])?;
            Ok((lower, upper))
        })
        .collect::<Result<_>>()?;
    let last = at(k_max, xs[k_max], ys[k_max])?;

    let mut lo = Neumaier::new();
    let mut hi = Neumaier::new();
    let mut trace = Vec::with_capacity(k_max + 1);
    for (k, (l, u)) in steps.iter().enumerate() {
        lo.add(*l);
        hi.add(*u);
        trace.push(TraceRow {
            k,
            x_k: xs[k],
            y_k: ys[k],
            lower_partial: lo.value(),
            upper_partial: hi.value(),
        });
    }
    hi.add(last);
    trace.push(TraceRow {
        k: k_max,
        x_k: xs[k_max],
        y_k: ys[k_max],
        lower_partial: lo.value(),
        upper_partial: hi.value(),
    });
    Ok(SandwichResult {
        lower: lo.value(),
        upper: hi.value(),
        label: eval.label(),
        trace,
    })
}

/// Lower and upper sums bracketing D(x, u).
pub fn sandwich_d<E: TwoVarEvaluator + ?Sized>(eval: &E, sched: &SandwichSchedule) -> Result<SandwichResult> {
    if sched.kind != ScheduleKind::Friable {
        return Err(Error::InvalidArgument("sandwich_d needs a friable schedule".into()));
    }
    run(eval, sched)
}

/// Lower and upper sums bracketing S(x; ϑ, α).
pub fn sandwich_s<E: TwoVarEvaluator + ?Sized>(eval: &E, sched: &SandwichSchedule) -> Result<SandwichResult> {
    if sched.kind != ScheduleKind::Kernel {
        return Err(Error::InvalidArgument("sandwich_s needs a kernel schedule".into()));
    }
    run(eval, sched)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Failing;

    impl TwoVarEvaluator for Failing {
        fn label(&self) -> EvaluatorLabel {
            EvaluatorLabel::Asymptotic
        }

        fn eval(&self, x: f64, _y: f64) -> Result<f64> {
            if x < 1e5 {
                Err(Error::InvalidArgument("too small".into()))
            } else {
                Ok(x)
            }
        }
    }

    #[test]
    fn friable_schedule_instantiation() {
        let s = SandwichSchedule::friable(1e6, 2.0).unwrap();
        let lx = 1e6f64.ln();
        assert_eq!(s.epsilon, 1.0 / (lx * 4f64.ln()).sqrt());
        assert_eq!(s.steps, (2.0 * lx.ln() / s.epsilon).ceil() as usize);
        assert!(s.uncapped_steps.is_none());
        assert!(s.xs[s.steps] <= 1e6 / (lx * lx) * (1.0 + 1e-12));
        assert!(s.xs.windows(2).all(|w| w[1] < w[0]));
        assert!(s.ys.windows(2).all(|w| w[1] < w[0]));
        assert!(SandwichSchedule::friable(10.0, 2.0).is_err());
        assert!(SandwichSchedule::friable(100.0, 0.5).is_err());
    }

    #[test]
    fn caps_keep_last_point_above_two() {
        for (x, u) in [(16.0, 1.0), (20.0, 8.0), (1e3, 50.0), (1e4, 1.0)] {
            let s = SandwichSchedule::friable(x, u).unwrap();
            assert!(s.steps >= 1);
            assert!(s.xs[s.steps] >= 2.0, "x = {x}, u = {u}");
        }
    }

    #[test]
    fn kernel_schedule_instantiation() {
        let x = 1e7f64;
        let s = SandwichSchedule::kernel(x, 0.5, 0.0).unwrap();
        let v = 0.5 * x.ln();
        assert!((v - 8.06).abs() < 0.01);
        assert_eq!(s.epsilon, (v.ln() / v).sqrt());
        assert!(s.steps >= 1);
        let xk = s.xs[s.steps];
        let drift = (xk / s.ys[s.steps]).ln() - v;
        let predicted = -(1.0 - 0.5) * s.steps as f64 * s.epsilon;
        assert!((drift - predicted).abs() < 1.0, "{drift} vs {predicted}");
        assert!(SandwichSchedule::kernel(1e7, 1.0, 0.0).is_err());
        for alpha in [-1.0, -0.3, 0.0, 1.0] {
            let s = SandwichSchedule::kernel(1e6, 0.3, alpha).unwrap();
            assert!(s.ys.windows(2).all(|w| w[1] < w[0]));
            assert!(s.ys[s.steps] >= 1.0);
        }
    }

    #[test]
    fn schedule_kind_is_checked() {
        let f = SandwichSchedule::friable(1e6, 2.0).unwrap();
        let k = SandwichSchedule::kernel(1e6, 0.5, 0.0).unwrap();
        assert!(sandwich_s(&Failing, &f).is_err());
        assert!(sandwich_d(&Failing, &k).is_err());
    }

    #[test]
    fn failures_carry_step_index() {
        let s = SandwichSchedule::friable_with(1e6, 2.0, 1.0, 5).unwrap();
        match sandwich_d(&Failing, &s) {
            Err(Error::Step { step, .. }) => assert!(step <= 5),
            other => panic!("{other:?}"),
        }
    }
}
