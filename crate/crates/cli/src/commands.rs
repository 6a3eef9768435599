use friable::acceptance::{Acceptance, Scale};
use friable::estimators::{
    d_estimate, dickman_sum_estimate, kernel_threshold, n_estimate, psi_saddle, psi_saias, s_estimate, DForm,
    EstimateReport, KernelWindow,
};
use friable::kernel::{big_f, sigma_asymptotic, SIGMA_EXPANSION_MIN_T};
use friable::sandwich::{
    sandwich_d, sandwich_s, DensityN, ExactN, ExactPsi, SaddlePsi, SandwichResult, SandwichSchedule, TraceRow,
};
use friable::sieves::{
    d_exact, dickman_sum_exact, integral_identity_check, n_exact, psi_exact, s_exact, Numerator,
};
use friable::special::{xi, xi_prime, xi_residual, z_factor, zeta_real};
use friable::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::{
    Command, CompareKind, CountKind, EstimateKind, Evaluator, Format, Grid, NumeratorArg, Params, SandwichKind,
};
use crate::context::Context;
use crate::output::{to_objects, write_csv, write_json, write_text};

/// What a command produced and how to show it.
pub struct Outcome {
    /// The full result; the JSON view.
    pub rows: Vec<Map<String, Value>>,
    /// Flat rows for the CSV view, when they differ from `rows`; also printed
    /// after `rows` in the text view.
    pub table: Option<Vec<Map<String, Value>>>,
    /// Replaces the text view entirely.
    pub text: Option<String>,
    pub default_format: Format,
    pub exit_code: i32,
}

impl Outcome {
    fn ok<T: Serialize>(rows: &[T], default_format: Format) -> Result<Self> {
        Ok(Outcome {
            rows: to_objects(rows)?,
            table: None,
            text: None,
            default_format,
            exit_code: 0,
        })
    }

    pub fn render<W: std::io::Write>(&self, format: Format, mut out: W) -> Result<()> {
        match format {
            Format::Json => write_json(&self.rows, out),
            Format::Csv => write_csv(self.table.as_ref().unwrap_or(&self.rows), out),
            Format::Text => {
                if let Some(t) = &self.text {
                    out.write_all(t.as_bytes())?;
                    return Ok(());
                }
                write_text(&self.rows, &mut out)?;
                if let Some(t) = &self.table {
                    writeln!(out)?;
                    write_text(t, &mut out)?;
                }
                Ok(())
            }
        }
    }
}

pub fn execute(cmd: &Command, ctx: &Context) -> Result<Outcome> {
    match cmd {
        Command::Rho { v } => rho(ctx, *v),
        Command::Xi { v } => xi_cmd(*v),
        Command::Sigma { t, order } => sigma(ctx, *t, *order),
        Command::Bigf { t } => bigf(*t),
        Command::Zeta { s } => zeta(*s),
        Command::Count { kind, p } => count(ctx, *kind, p),
        Command::Estimate {
            kind,
            p,
            window_c,
            window_a,
        } => estimate(ctx, *kind, p, KernelWindow { c: *window_c, alpha_bound: *window_a }),
        Command::Sandwich {
            kind,
            p,
            evaluator,
            epsilon,
            steps,
        } => sandwich(ctx, *kind, p, *evaluator, epsilon.zip(*steps)),
        Command::Compare { kind, grid } => Outcome::ok(&compare_rows(ctx, *kind, grid)?, Format::Csv),
        Command::Selftest { quick, criterion } => selftest(*quick, criterion),
    }
}

fn rho(ctx: &Context, v: f64) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Row {
        v: f64,
        rho: f64,
        log_rho: f64,
        rho_prime: f64,
        r: f64,
    }
    let t = ctx.rho(v + 1.0)?;
    Outcome::ok(
        &[Row {
            v,
            rho: t.rho(v)?,
            log_rho: t.log_rho(v)?,
            rho_prime: t.rho_prime(v)?,
            r: t.r(v)?,
        }],
        Format::Text,
    )
}

fn xi_cmd(v: f64) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Row {
        v: f64,
        xi: f64,
        xi_prime: f64,
        residual: f64,
    }
    let x = xi(v)?;
    Outcome::ok(
        &[Row {
            v,
            xi: x,
            xi_prime: xi_prime(v)?,
            residual: xi_residual(v, x),
        }],
        Format::Text,
    )
}

fn sigma(ctx: &Context, t: f64, order: u32) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Row {
        t: f64,
        sigma: f64,
        g_prime_residual: f64,
        order: u32,
        expansion: Option<f64>,
        prime_limit: u64,
    }
    let c = ctx.saddle()?;
    let s = c.sigma_solve(t)?;
    let expansion = if t >= SIGMA_EXPANSION_MIN_T {
        Some(sigma_asymptotic(t, order)?)
    } else {
        None
    };
    Outcome::ok(
        &[Row {
            t,
            sigma: s,
            g_prime_residual: c.g_prime(s)? + t,
            order,
            expansion,
            prime_limit: c.prime_limit(),
        }],
        Format::Text,
    )
}

fn bigf(t: f64) -> Result<Outcome> {
    Outcome::ok(&[big_f(t, None)?], Format::Text)
}

fn zeta(s: f64) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Row {
        s: f64,
        zeta: Option<f64>,
        z: f64,
    }
    let zeta = if s == 1.0 { None } else { Some(zeta_real(s)?) };
    Outcome::ok(&[Row { s, zeta, z: z_factor(s)? }], Format::Text)
}

/// The parameters of one query after checking which ones the kind admits.
#[derive(Debug, Clone, Copy, Default, Serialize)]
struct Query {
    x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numerator: Option<Numerator>,
}

#[derive(Clone, Copy)]
enum Shape {
    /// x and one of y, u (y = x^{1/u}).
    XY,
    /// x and u.
    XU,
    /// x and one of y, theta (y = x^theta).
    XYTheta,
    /// x, theta and optionally alpha (default 0).
    Kernel,
    /// x and optionally the numerator.
    Sum,
    /// x alone.
    X,
}

fn shape_query(p: &Params, shape: Shape) -> Result<Query> {
    let given = [
        ("y", p.y.is_some()),
        ("u", p.u.is_some()),
        ("theta", p.theta.is_some()),
        ("alpha", p.alpha.is_some()),
        ("numerator", p.numerator.is_some()),
    ];
    let allowed: &[&str] = match shape {
        Shape::XY => &["y", "u"],
        Shape::XU => &["u"],
        Shape::XYTheta => &["y", "theta"],
        Shape::Kernel => &["theta", "alpha"],
        Shape::Sum => &["numerator"],
        Shape::X => &[],
    };
    if let Some((name, _)) = given.iter().find(|(n, g)| *g && !allowed.contains(n)) {
        return Err(Error::InvalidArgument(format!("--{name} does not apply to this kind")));
    }
    let missing = |what: &str| Error::InvalidArgument(format!("missing {what}"));
    let x = p.x;
    let mut q = Query { x, ..Query::default() };
    match shape {
        Shape::XY => match (p.y, p.u) {
            (Some(y), None) => {
                q.y = Some(y);
                q.u = Some(x.ln() / y.ln());
            }
            (None, Some(u)) => {
                q.u = Some(u);
                q.y = Some(x.powf(1.0 / u));
            }
            (Some(_), Some(_)) => return Err(Error::InvalidArgument("give either --y or --u, not both".into())),
            (None, None) => return Err(missing("--y or --u")),
        },
        Shape::XU => {
            let u = p.u.ok_or_else(|| missing("--u"))?;
            q.u = Some(u);
            q.y = Some(x.powf(1.0 / u));
        }
        Shape::XYTheta => match (p.y, p.theta) {
            (Some(y), None) => q.y = Some(y),
            (None, Some(t)) => {
                q.theta = Some(t);
                q.y = Some(x.powf(t));
            }
            (Some(_), Some(_)) => {
                return Err(Error::InvalidArgument("give either --y or --theta, not both".into()))
            }
            (None, None) => return Err(missing("--y or --theta")),
        },
        Shape::Kernel => {
            let theta = p.theta.ok_or_else(|| missing("--theta"))?;
            let alpha = p.alpha.unwrap_or(0.0);
            q.theta = Some(theta);
            q.alpha = Some(alpha);
            q.y = Some(kernel_threshold(x, theta, alpha));
        }
        Shape::Sum => {
            q.numerator = Some(match p.numerator.unwrap_or(NumeratorArg::LogN) {
                NumeratorArg::LogN => Numerator::LogN,
                NumeratorArg::LogX => Numerator::LogX,
            })
        }
        Shape::X => {}
    }
    Ok(q)
}

fn count(ctx: &Context, kind: CountKind, p: &Params) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Row {
        kind: &'static str,
        #[serde(flatten)]
        q: Query,
        value: Value,
    }
    let shape = match kind {
        CountKind::Psi => Shape::XY,
        CountKind::D => Shape::XU,
        CountKind::N => Shape::XYTheta,
        CountKind::S => Shape::Kernel,
        CountKind::DickmanSum => Shape::Sum,
        CountKind::Identity => Shape::X,
    };
    let q = shape_query(p, shape)?;
    let src = ctx.source(q.x)?;
    let y = q.y.unwrap_or(f64::NAN);
    let (name, value) = match kind {
        CountKind::Psi => ("psi", psi_exact(src, q.x, y)?.into()),
        CountKind::D => ("d", d_exact(src, q.x, q.u.unwrap_or(f64::NAN))?.into()),
        CountKind::N => ("n", n_exact(src, q.x, y)?.into()),
        CountKind::S => (
            "s",
            s_exact(src, q.x, q.theta.unwrap_or(f64::NAN), q.alpha.unwrap_or(0.0))?.into(),
        ),
        CountKind::DickmanSum => (
            "dickman_sum",
            dickman_sum_exact(src, q.x, q.numerator.unwrap_or(Numerator::LogN))?.into(),
        ),
        CountKind::Identity => ("identity_gap", integral_identity_check(src, q.x)?.into()),
    };
    Outcome::ok(&[Row { kind: name, q, value }], Format::Text)
}

/// Largest u at which ρ is needed for a friable estimate at (x, y).
fn rho_range(q: &Query) -> f64 {
    q.u.unwrap_or_else(|| q.x.ln() / q.y.unwrap_or(q.x).ln()) + 1.0
}

fn estimate(ctx: &Context, kind: EstimateKind, p: &Params, window: KernelWindow) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Row {
        kind: &'static str,
        #[serde(flatten)]
        q: Query,
        estimate: f64,
        main: f64,
        correction: f64,
        error_scale: f64,
        in_range: bool,
        form: friable::estimators::Form,
        notes: String,
    }
    let (name, shape) = match kind {
        EstimateKind::PsiSaddle => ("psi_saddle", Shape::XY),
        EstimateKind::PsiSaias => ("psi_saias", Shape::XY),
        EstimateKind::D => ("d_two_term", Shape::XU),
        EstimateKind::DSaddle => ("d_saddle_factor", Shape::XU),
        EstimateKind::DickmanSum => ("dickman_sum", Shape::Sum),
        EstimateKind::N => ("n", Shape::XYTheta),
        EstimateKind::S => ("s", Shape::Kernel),
    };
    let q = shape_query(p, shape)?;
    let y = q.y.unwrap_or(f64::NAN);
    let r: EstimateReport = match kind {
        EstimateKind::PsiSaddle => psi_saddle(ctx.rho(rho_range(&q))?, q.x, y)?,
        EstimateKind::PsiSaias => psi_saias(ctx.rho(rho_range(&q))?, q.x, y)?,
        EstimateKind::D | EstimateKind::DSaddle => {
            let form = if kind == EstimateKind::D { DForm::TwoTerm } else { DForm::SaddleFactor };
            d_estimate(ctx.rho(rho_range(&q))?, q.x, q.u.unwrap_or(f64::NAN), form)?
        }
        EstimateKind::DickmanSum => dickman_sum_estimate(q.x, q.numerator.unwrap_or(Numerator::LogN))?,
        EstimateKind::N => n_estimate(Some(ctx.prefix(q.x / y)?), q.x, y)?,
        EstimateKind::S => s_estimate(
            ctx.saddle()?,
            Some(ctx.prefix(q.x / y)?),
            q.x,
            q.theta.unwrap_or(f64::NAN),
            q.alpha.unwrap_or(0.0),
            window,
        )?,
    };
    Outcome::ok(
        &[Row {
            kind: name,
            q,
            estimate: r.value,
            main: r.main_term,
            correction: r.correction_term,
            error_scale: r.error_scale,
            in_range: r.in_range,
            form: r.form,
            notes: r.notes,
        }],
        Format::Json,
    )
}

fn sandwich(
    ctx: &Context,
    kind: SandwichKind,
    p: &Params,
    evaluator: Evaluator,
    custom: Option<(f64, usize)>,
) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Summary {
        kind: &'static str,
        #[serde(flatten)]
        q: Query,
        epsilon: f64,
        steps: usize,
        uncapped_steps: Option<usize>,
        #[serde(flatten)]
        result: SandwichResult,
        relative_gap: f64,
    }
    let (q, sched, res) = match kind {
        SandwichKind::D => {
            let q = shape_query(p, Shape::XU)?;
            let u = q.u.unwrap_or(f64::NAN);
            let sched = match custom {
                Some((eps, k)) => SandwichSchedule::friable_with(q.x, u, eps, k)?,
                None => SandwichSchedule::friable(q.x, u)?,
            };
            let res = match evaluator {
                Evaluator::Exact => sandwich_d(&ExactPsi(ctx.source(q.x)?), &sched)?,
                Evaluator::Asymptotic => sandwich_d(&SaddlePsi(ctx.rho(rho_range(&q))?), &sched)?,
            };
            (q, sched, res)
        }
        SandwichKind::S => {
            let q = shape_query(p, Shape::Kernel)?;
            let (theta, alpha) = (q.theta.unwrap_or(f64::NAN), q.alpha.unwrap_or(0.0));
            let sched = match custom {
                Some((eps, k)) => SandwichSchedule::kernel_with(q.x, theta, alpha, eps, k)?,
                None => SandwichSchedule::kernel_clamped(q.x, theta, alpha)?,
            };
            let res = match evaluator {
                Evaluator::Exact => sandwich_s(&ExactN(ctx.source(q.x)?), &sched)?,
                Evaluator::Asymptotic => sandwich_s(&DensityN(Some(ctx.prefix(q.x)?)), &sched)?,
            };
            (q, sched, res)
        }
    };
    let name = match kind {
        SandwichKind::D => "d",
        SandwichKind::S => "s",
    };
    let trace = to_objects::<TraceRow>(&res.trace)?;
    let summary = Summary {
        kind: name,
        q,
        epsilon: sched.epsilon,
        steps: sched.steps,
        uncapped_steps: sched.uncapped_steps,
        relative_gap: res.relative_gap(),
        result: res,
    };
    let mut out = Outcome::ok(&[summary], Format::Csv)?;
    out.table = Some(trace);
    Ok(out)
}

/// One exact-versus-estimate comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub kind: String,
    pub x: f64,
    pub y: Option<f64>,
    pub u: Option<f64>,
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub exact: f64,
    pub estimate: f64,
    pub main: f64,
    pub correction: f64,
    pub error_scale: f64,
    pub normalized_dev: f64,
    pub in_range: bool,
}

impl CompareRow {
    fn new(kind: &str, q: &Query, exact: f64, r: &EstimateReport) -> Self {
        CompareRow {
            kind: kind.to_string(),
            x: q.x,
            y: q.y,
            u: q.u,
            theta: q.theta,
            alpha: q.alpha,
            exact,
            estimate: r.value,
            main: r.main_term,
            correction: r.correction_term,
            error_scale: r.error_scale,
            normalized_dev: r.normalized_deviation(exact),
            in_range: r.in_range,
        }
    }
}

fn grid_queries(kind: CompareKind, g: &Grid) -> Result<Vec<Query>> {
    let lists = [("y", &g.y), ("u", &g.u), ("theta", &g.theta), ("alpha", &g.alpha)];
    let allowed: &[&str] = match kind {
        CompareKind::Psi => &["y", "u"],
        CompareKind::D => &["u"],
        CompareKind::N => &["y", "theta"],
        CompareKind::S => &["theta", "alpha"],
        CompareKind::DickmanSum => &[],
    };
    if let Some((name, _)) = lists.iter().find(|(n, l)| !l.is_empty() && !allowed.contains(n)) {
        return Err(Error::InvalidArgument(format!("--{name} does not apply to this kind")));
    }
    let mut out = Vec::new();
    for &x in &g.x {
        let mut push = |y: Option<f64>, u: Option<f64>, theta: Option<f64>, alpha: Option<f64>| {
            let p = Params {
                x,
                y,
                u,
                theta,
                alpha,
                numerator: None,
            };
            let shape = match kind {
                CompareKind::Psi => Shape::XY,
                CompareKind::D => Shape::XU,
                CompareKind::N => Shape::XYTheta,
                CompareKind::S => Shape::Kernel,
                CompareKind::DickmanSum => Shape::X,
            };
            shape_query(&p, shape).map(|q| out.push(q))
        };
        match kind {
            CompareKind::Psi | CompareKind::N => {
                let (first, second) = if kind == CompareKind::Psi { (&g.y, &g.u) } else { (&g.y, &g.theta) };
                if !first.is_empty() && !second.is_empty() {
                    return Err(Error::InvalidArgument("give only one of the two threshold lists".into()));
                }
                for &y in first {
                    push(Some(y), None, None, None)?;
                }
                for &s in second {
                    if kind == CompareKind::Psi {
                        push(None, Some(s), None, None)?;
                    } else {
                        push(None, None, Some(s), None)?;
                    }
                }
                if first.is_empty() && second.is_empty() {
                    return Err(Error::InvalidArgument("missing threshold list".into()));
                }
            }
            CompareKind::D => {
                if g.u.is_empty() {
                    return Err(Error::InvalidArgument("missing --u".into()));
                }
                for &u in &g.u {
                    push(None, Some(u), None, None)?;
                }
            }
            CompareKind::S => {
                if g.theta.is_empty() {
                    return Err(Error::InvalidArgument("missing --theta".into()));
                }
                let alphas = if g.alpha.is_empty() { vec![0.0] } else { g.alpha.clone() };
                for &t in &g.theta {
                    for &a in &alphas {
                        push(None, None, Some(t), Some(a))?;
                    }
                }
            }
            CompareKind::DickmanSum => push(None, None, None, None)?,
        }
    }
    Ok(out)
}

pub fn compare_rows(ctx: &Context, kind: CompareKind, grid: &Grid) -> Result<Vec<CompareRow>> {
    let queries = grid_queries(kind, grid)?;
    let max_x = queries.iter().map(|q| q.x).fold(1.0, f64::max);
    let src = ctx.source(max_x)?;
    let mut rows = Vec::new();
    match kind {
        CompareKind::Psi | CompareKind::D => {
            let top = queries.iter().map(rho_range).fold(0.0, f64::max);
            let rho = ctx.rho(top)?;
            for q in &queries {
                let (y, u) = (q.y.unwrap_or(f64::NAN), q.u.unwrap_or(f64::NAN));
                if kind == CompareKind::Psi {
                    let exact = psi_exact(src, q.x, y)? as f64;
                    rows.push(CompareRow::new("psi_saddle", q, exact, &psi_saddle(rho, q.x, y)?));
                    rows.push(CompareRow::new("psi_saias", q, exact, &psi_saias(rho, q.x, y)?));
                } else {
                    let exact = d_exact(src, q.x, u)? as f64;
                    rows.push(CompareRow::new("d_two_term", q, exact, &d_estimate(rho, q.x, u, DForm::TwoTerm)?));
                    rows.push(CompareRow::new(
                        "d_saddle_factor",
                        q,
                        exact,
                        &d_estimate(rho, q.x, u, DForm::SaddleFactor)?,
                    ));
                }
            }
        }
        CompareKind::N => {
            let prefix = ctx.prefix(max_x)?;
            for q in &queries {
                let y = q.y.unwrap_or(f64::NAN);
                let exact = n_exact(src, q.x, y)? as f64;
                rows.push(CompareRow::new("n", q, exact, &n_estimate(Some(prefix), q.x, y)?));
            }
        }
        CompareKind::S => {
            let prefix = ctx.prefix(max_x)?;
            let saddle = ctx.saddle()?;
            for q in &queries {
                let (theta, alpha) = (q.theta.unwrap_or(f64::NAN), q.alpha.unwrap_or(0.0));
                let exact = s_exact(src, q.x, theta, alpha)? as f64;
                let est = s_estimate(saddle, Some(prefix), q.x, theta, alpha, KernelWindow::default())?;
                rows.push(CompareRow::new("s", q, exact, &est));
            }
        }
        CompareKind::DickmanSum => {
            for q in &queries {
                for (name, num) in [("dickman_sum_log_n", Numerator::LogN), ("dickman_sum_log_x", Numerator::LogX)] {
                    let exact = dickman_sum_exact(src, q.x, num)?;
                    rows.push(CompareRow::new(name, q, exact, &dickman_sum_estimate(q.x, num)?));
                }
            }
        }
    }
    Ok(rows)
}

fn selftest(quick: bool, only: &[u8]) -> Result<Outcome> {
    let suite = Acceptance::new(if quick { Scale::Quick } else { Scale::Full });
    let ids: Vec<u8> = if only.is_empty() { (1..=10).collect() } else { only.to_vec() };
    let outcomes: Vec<_> = ids.iter().map(|&id| suite.run(id)).collect();
    let mut out = Outcome::ok(&outcomes, Format::Text)?;
    out.text = Some(outcomes.iter().map(|o| o.line() + "\n").collect());
    out.table = Some(
        to_objects(&outcomes)?
            .into_iter()
            .map(|mut m| {
                m.shift_remove("failures");
                m
            })
            .collect(),
    );
    if outcomes.iter().any(|o| !o.passed) {
        out.exit_code = 1;
    }
    Ok(out)
}
