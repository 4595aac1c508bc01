//! Experiment runners; pure computation producing CSV-ready reports.

use rayon::prelude::*;

use crate::engine::{apply_discrete, EvalOptions, OperatorSpec};
use crate::functions::FunctionHandle;
use crate::kernel::KernelParams;
use crate::moments::{
    aggregate_verdicts, discrepancy_report, discrete_raw_moments, raw_moment_numeric,
    raw_moment_oracle, DiscrepancyConfig, MomentOrder, PrintedFormula, Verdict,
};
use crate::rates::{
    dbv_bound_check, dt_bound_constant, korovkin_check, lipschitz_check, local_bound_check,
    steklov_bound_check, voronovskaja_check, weighted_convergence_check, BoundCheckResult,
    DbvSpec, OperatorFamily, BOUND_SLACK,
};

use super::config::{Experiment, ExperimentConfig};
use super::report::{derived_name, Cell, Report};
use super::{engine_error, CliError};

/// Everything a run produced; the caller writes the reports and picks the
/// exit code.
#[derive(Debug)]
pub struct RunOutput {
    pub reports: Vec<Report>,
    /// Bound rows with holds = false (exit 2 when nonzero).
    pub violations: usize,
    /// Failed validation checks (exit 3 when nonzero).
    pub validation_failures: usize,
    pub summary: Vec<String>,
}

impl RunOutput {
    fn new() -> Self {
        RunOutput {
            reports: Vec::new(),
            violations: 0,
            validation_failures: 0,
            summary: Vec::new(),
        }
    }
}

/// Integral values print as integers, everything else full precision.
fn num_cell(v: f64) -> Cell {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        Cell::Int(v as i64)
    } else {
        Cell::Float(v)
    }
}

fn sorted_grids(cfg: &ExperimentConfig) -> (Vec<u32>, Vec<f64>) {
    let mut ns = cfg.grids.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut xs = cfg.grids.x.clone();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    (ns, xs)
}

fn required_function(cfg: &ExperimentConfig) -> Result<&super::config::FunctionSpec, CliError> {
    cfg.function.as_ref().ok_or_else(|| {
        CliError::Config(format!(
            "experiment '{}' needs a function",
            cfg.experiment.as_str()
        ))
    })
}

fn smoothed_spec(
    cfg: &ExperimentConfig,
    pair: &crate::appell::AppellPair,
    n: f64,
) -> Result<OperatorSpec, CliError> {
    let kernel = KernelParams::new(n, cfg.operator.rho(), cfg.operator.c())
        .map_err(|e| engine_error(e.into()))?;
    Ok(OperatorSpec::new(pair.clone(), kernel))
}

pub fn run(cfg: &ExperimentConfig, pool: &rayon::ThreadPool) -> Result<RunOutput, CliError> {
    match cfg.experiment {
        Experiment::Validate => validate(cfg),
        Experiment::Eval => eval(cfg, pool),
        Experiment::Moments => moments(cfg, pool),
        Experiment::Limits => limits(cfg, pool),
        Experiment::VerifyPaper => verify_paper(cfg),
        Experiment::Rates => rates(cfg),
        Experiment::Dbv => dbv(cfg),
    }
}

fn validate(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let (ns, xs) = sorted_grids(cfg);
    let pair = cfg.operator.build_pair()?;
    let mut out = RunOutput::new();
    let mut report = Report::new(cfg.output_name(), vec!["quantity", "value", "ok"]);
    let mut push = |quantity: String, value: f64, ok: bool, fails: &mut usize| {
        if !ok {
            *fails += 1;
        }
        report.push(vec![Cell::Text(quantity), Cell::Float(value), Cell::Flag(ok)]);
    };

    let d = pair.derivatives_at_one();
    push("a_at_one".into(), d.a[0], d.a[0] > 0.0, &mut out.validation_failures);
    push("b_at_one".into(), d.b[0], d.b[0] >= 0.0, &mut out.validation_failures);

    let args: Vec<f64> = ns
        .iter()
        .flat_map(|&n| xs.iter().map(move |&x| f64::from(n) * x))
        .collect();
    let max_arg = args.iter().fold(0.0_f64, |m, &a| m.max(a));
    let vr = pair.validate(&args, pair.horizon(max_arg).min(2048));
    push(
        "negative_polynomials".into(),
        vr.negative_polynomials.len() as f64,
        vr.ok(),
        &mut out.validation_failures,
    );

    for &n in &ns {
        for &x in &xs {
            let ws = pair
                .weights(f64::from(n), x, cfg.tolerances.weight_eps)
                .map_err(|e| engine_error(e.into()))?;
            let sum: f64 = 1.0 - ws.truncation_mass;
            let min = ws.weights.iter().copied().fold(f64::INFINITY, f64::min);
            push(
                format!("weight_sum(n={n},x={x})"),
                sum,
                (1.0 - 2e-12..=1.0).contains(&sum),
                &mut out.validation_failures,
            );
            push(
                format!("min_weight(n={n},x={x})"),
                min,
                min >= 0.0,
                &mut out.validation_failures,
            );
        }
    }

    let rows = report.rows.len();
    out.summary.push(format!(
        "validate: {rows} checks, {} failed",
        out.validation_failures
    ));
    out.reports.push(report);
    Ok(out)
}

fn eval(cfg: &ExperimentConfig, pool: &rayon::ThreadPool) -> Result<RunOutput, CliError> {
    let (ns, xs) = sorted_grids(cfg);
    let pair = cfg.operator.build_pair()?;
    let f = required_function(cfg)?.build_handle()?;
    let opts = EvalOptions {
        weight_eps: cfg.tolerances.weight_eps,
        ..EvalOptions::default()
    };
    let tasks: Vec<(u32, f64)> = ns
        .iter()
        .flat_map(|&n| xs.iter().map(move |&x| (n, x)))
        .collect();
    let computed: Vec<Result<Vec<Cell>, CliError>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(n, x)| {
                let value = if cfg.operator.discrete {
                    apply_discrete(&pair, f64::from(n), &f, x, &opts).map_err(engine_error)?
                } else {
                    smoothed_spec(cfg, &pair, f64::from(n))?
                        .apply(&f, x, &opts)
                        .map_err(engine_error)?
                };
                let target = f.eval(x);
                Ok(vec![
                    Cell::Int(i64::from(n)),
                    Cell::Float(x),
                    Cell::Float(value),
                    Cell::Float(target),
                    Cell::Float((value - target).abs()),
                ])
            })
            .collect()
    });
    let mut report = Report::new(
        cfg.output_name(),
        vec!["n", "x", "value", "target", "abs_err"],
    );
    for row in computed {
        report.push(row?);
    }
    let mut out = RunOutput::new();
    out.summary
        .push(format!("eval: {} rows", report.rows.len()));
    out.reports.push(report);
    Ok(out)
}

const DISCRETE_PAPER: [PrintedFormula; 5] = [
    PrintedFormula::Lemma21M0,
    PrintedFormula::Lemma21M1,
    PrintedFormula::Lemma21M2,
    PrintedFormula::Lemma21M3,
    PrintedFormula::Lemma21M4,
];

const SMOOTH_PAPER: [PrintedFormula; 5] = [
    PrintedFormula::Lemma22M0,
    PrintedFormula::Lemma22M1,
    PrintedFormula::Lemma22M2,
    PrintedFormula::Lemma22M3,
    PrintedFormula::Lemma22M4,
];

fn moments(cfg: &ExperimentConfig, pool: &rayon::ThreadPool) -> Result<RunOutput, CliError> {
    let (ns, xs) = sorted_grids(cfg);
    let pair = cfg.operator.build_pair()?;
    let rho = cfg.operator.rho();
    let c = cfg.operator.c();
    let opts = EvalOptions {
        weight_eps: cfg.tolerances.weight_eps,
        ..EvalOptions::default()
    };
    let tasks: Vec<(u32, f64)> = ns
        .iter()
        .flat_map(|&n| xs.iter().map(move |&x| (n, x)))
        .collect();
    let moment_exists =
        |n: f64, r: u32| -> bool { c == 0 || n * rho > f64::from(r) * f64::from(c) };
    let computed: Vec<Result<Vec<Vec<Cell>>, CliError>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(n, x)| {
                let nf = f64::from(n);
                let mut rows = Vec::new();
                let mut push = |r: u32, route: &str, value: f64| {
                    rows.push(vec![
                        Cell::Int(i64::from(n)),
                        Cell::Float(x),
                        Cell::Int(i64::from(r)),
                        Cell::Text(route.into()),
                        Cell::Float(value),
                    ]);
                };
                if cfg.operator.discrete {
                    let mv = discrete_raw_moments(&pair, nf, x);
                    for r in 0..5usize {
                        push(r as u32, "oracle", mv.m[r]);
                        push(
                            r as u32,
                            "paper",
                            DISCRETE_PAPER[r].evaluate(&pair, nf, x, rho, c),
                        );
                    }
                } else {
                    let spec = smoothed_spec(cfg, &pair, nf)?;
                    for r in 0..5u32 {
                        if !moment_exists(nf, r) {
                            continue;
                        }
                        push(
                            r,
                            "oracle",
                            raw_moment_oracle(&spec, x, r).map_err(engine_error)?,
                        );
                        push(
                            r,
                            "numeric",
                            raw_moment_numeric(&spec, x, r, cfg.tolerances.weight_eps)
                                .map_err(engine_error)?,
                        );
                        push(
                            r,
                            "quadrature",
                            spec.apply(&FunctionHandle::monomial(r), x, &opts)
                                .map_err(engine_error)?,
                        );
                        push(
                            r,
                            "paper",
                            SMOOTH_PAPER[r as usize].evaluate(&pair, nf, x, rho, c),
                        );
                    }
                }
                Ok(rows)
            })
            .collect()
    });
    let mut report = Report::new(cfg.output_name(), vec!["n", "x", "r", "route", "value"]);
    for group in computed {
        for row in group? {
            report.push(row);
        }
    }
    let mut out = RunOutput::new();
    out.summary
        .push(format!("moments: {} rows", report.rows.len()));
    out.reports.push(report);
    Ok(out)
}

const LIMIT_ROWS: [(u32, MomentOrder, PrintedFormula); 3] = [
    (1, MomentOrder::One, PrintedFormula::Lemma24Lim1),
    (2, MomentOrder::Two, PrintedFormula::Lemma24Lim2),
    (4, MomentOrder::Four, PrintedFormula::Lemma24Lim4),
];

fn limits(cfg: &ExperimentConfig, pool: &rayon::ThreadPool) -> Result<RunOutput, CliError> {
    if cfg.operator.discrete {
        return Err(CliError::Config(
            "limits applies to the smoothed operator; drop operator.discrete".into(),
        ));
    }
    let (_, xs) = sorted_grids(cfg);
    let pair = cfg.operator.build_pair()?;
    let rho = cfg.operator.rho();
    let c = cfg.operator.c();
    let tasks: Vec<(usize, f64)> = (0..LIMIT_ROWS.len())
        .flat_map(|k| xs.iter().map(move |&x| (k, x)))
        .collect();
    let computed: Vec<Result<Vec<Cell>, CliError>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(k, x)| {
                let (order_label, order, formula) = LIMIT_ROWS[k];
                let fit = crate::moments::limit_estimate(&pair, rho, c, x, order)
                    .map_err(engine_error)?;
                let paper = formula.evaluate(&pair, 1.0, x, rho, c);
                let abs = (fit.estimate - paper).abs();
                let scale = paper.abs().max(fit.estimate.abs());
                let agree =
                    abs <= cfg.tolerances.limit_abs || abs <= cfg.tolerances.limit_rel * scale;
                let verdict = if agree {
                    Verdict::Agree
                } else {
                    Verdict::PaperTypoSuspected
                };
                Ok(vec![
                    Cell::Int(i64::from(order_label)),
                    Cell::Float(x),
                    Cell::Float(fit.estimate),
                    Cell::Float(fit.slope),
                    Cell::Float(fit.residual),
                    Cell::Float(paper),
                    Cell::Text(verdict.as_str().into()),
                ])
            })
            .collect()
    });
    let mut report = Report::new(
        cfg.output_name(),
        vec![
            "order",
            "x",
            "estimate",
            "slope",
            "residual",
            "paper_value",
            "verdict",
        ],
    );
    let mut flagged = 0;
    for row in computed {
        let row = row?;
        if matches!(&row[6], Cell::Text(s) if s == "paper_typo_suspected") {
            flagged += 1;
        }
        report.push(row);
    }
    let mut out = RunOutput::new();
    out.summary.push(format!(
        "limits: {} rows, {flagged} flagged",
        report.rows.len()
    ));
    out.reports.push(report);
    Ok(out)
}

fn verify_paper(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let (ns, xs) = sorted_grids(cfg);
    let pair = cfg.operator.build_pair()?;
    let dcfg = DiscrepancyConfig {
        n_grid: ns.iter().map(|&n| f64::from(n)).collect(),
        x_grid: xs.clone(),
        rel_tol: cfg.tolerances.rel,
        abs_floor: cfg.tolerances.abs,
        limit_rel_tol: cfg.tolerances.limit_rel,
        limit_abs_tol: cfg.tolerances.limit_abs,
    };
    let rows = discrepancy_report(&pair, cfg.operator.rho(), cfg.operator.c(), &dcfg)
        .map_err(engine_error)?;

    let primary = cfg.output_name();
    let mut ledger = Report::new(
        primary.clone(),
        vec![
            "quantity", "n", "x", "oracle", "paper", "abs_diff", "rel_diff", "verdict",
        ],
    );
    for r in &rows {
        ledger.push(vec![
            Cell::Text(r.quantity.into()),
            match r.n {
                Some(n) => num_cell(n),
                None => Cell::Text(String::new()),
            },
            Cell::Float(r.x),
            Cell::Float(r.oracle),
            Cell::Float(r.paper),
            Cell::Float(r.abs_diff),
            Cell::Float(r.rel_diff),
            Cell::Text(r.verdict.as_str().into()),
        ]);
    }

    let mut summary = Report::new(
        derived_name(&primary, "summary"),
        vec!["quantity", "points", "disagreements", "verdict"],
    );
    let verdicts = aggregate_verdicts(&rows);
    let flagged = verdicts
        .iter()
        .filter(|v| v.verdict == Verdict::PaperTypoSuspected)
        .count();
    for v in &verdicts {
        summary.push(vec![
            Cell::Text(v.quantity.into()),
            Cell::Int(v.points as i64),
            Cell::Int(v.disagreements as i64),
            Cell::Text(v.verdict.as_str().into()),
        ]);
    }

    let mut out = RunOutput::new();
    out.summary.push(format!(
        "verify-paper: {} rows, {flagged}/{} formulas flagged",
        ledger.rows.len(),
        verdicts.len()
    ));
    out.reports.push(ledger);
    out.reports.push(summary);
    Ok(out)
}

fn push_bound_result(
    rows: &mut Report,
    consts: &mut Report,
    r: &BoundCheckResult,
    violations: &mut usize,
) {
    for p in &r.points {
        if !p.holds {
            *violations += 1;
        }
        rows.push(vec![
            Cell::Text(r.theorem.into()),
            num_cell(p.n),
            Cell::Float(p.x),
            Cell::Float(p.lhs),
            Cell::Float(p.rhs),
            Cell::Flag(p.holds),
            Cell::Float(p.rhs - p.lhs),
        ]);
    }
    for (name, v) in &r.constants {
        consts.push(vec![
            Cell::Text(r.theorem.into()),
            Cell::Text(name.clone()),
            Cell::Float(*v),
        ]);
    }
}

fn positive_grid(xs: &[f64], what: &str) -> Result<(), CliError> {
    if xs.iter().any(|&x| x <= 0.0) {
        return Err(CliError::Config(format!(
            "{what} needs grids.x entries > 0"
        )));
    }
    Ok(())
}

fn capped_grid(xs: &[f64], cap: f64, what: &str) -> Result<(), CliError> {
    if xs.iter().any(|&x| x > cap) {
        return Err(CliError::Config(format!(
            "{what} needs grids.x entries <= {cap}"
        )));
    }
    Ok(())
}

fn rates(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    if cfg.operator.discrete {
        return Err(CliError::Config(
            "rates applies to the smoothed operator; drop operator.discrete".into(),
        ));
    }
    let (ns, xs) = sorted_grids(cfg);
    let pair = cfg.operator.build_pair()?;
    let family = OperatorFamily::new(pair, cfg.operator.rho(), cfg.operator.c())
        .map_err(engine_error)?;
    let rc = cfg.rates.clone().unwrap_or_default();
    let primary = cfg.output_name();
    let mut rows = Report::new(
        primary.clone(),
        vec!["theorem", "n", "x", "lhs", "rhs", "holds", "margin"],
    );
    let mut consts = Report::new(
        derived_name(&primary, "constants"),
        vec!["theorem", "name", "value"],
    );
    let mut out = RunOutput::new();

    let function = || -> Result<FunctionHandle, CliError> {
        required_function(cfg)?.build_handle()
    };

    for check in &rc.checks {
        match check.as_str() {
            "korovkin" => {
                if ns.len() < 2 {
                    return Err(CliError::Config(
                        "korovkin needs at least two n values".into(),
                    ));
                }
                let fs = [
                    FunctionHandle::one(),
                    FunctionHandle::identity(),
                    FunctionHandle::monomial(2),
                ];
                let r = korovkin_check(&family, rc.interval, &fs, &ns).map_err(engine_error)?;
                push_bound_result(&mut rows, &mut consts, &r, &mut out.violations);
            }
            "lipschitz" => {
                positive_grid(&xs, "lipschitz")?;
                let r = lipschitz_check(&family, &function()?, rc.m, rc.alpha, &xs, &ns)
                    .map_err(engine_error)?;
                push_bound_result(&mut rows, &mut consts, &r, &mut out.violations);
            }
            "voronovskaja" => {
                let vc = rc.voronovskaja.as_ref().ok_or_else(|| {
                    CliError::Config("voronovskaja needs rates.voronovskaja {df, d2f}".into())
                })?;
                if vc.exp_lo + 2 > vc.exp_hi || vc.exp_hi > 20 {
                    return Err(CliError::Config(
                        "voronovskaja ladder needs exp_lo + 2 <= exp_hi <= 20".into(),
                    ));
                }
                let r = voronovskaja_check(
                    &family,
                    &function()?,
                    vc.df,
                    vc.d2f,
                    vc.x,
                    vc.exp_lo..=vc.exp_hi,
                    vc.rel_tol,
                )
                .map_err(engine_error)?;
                push_bound_result(&mut rows, &mut consts, &r, &mut out.violations);
            }
            "local_bound" => {
                capped_grid(&xs, rc.b, "local_bound (rates.b)")?;
                let r = local_bound_check(&family, &function()?, rc.b, &xs, &ns)
                    .map_err(engine_error)?;
                push_bound_result(&mut rows, &mut consts, &r, &mut out.violations);
            }
            "steklov_3_5" => {
                capped_grid(&xs, rc.a, "steklov_3_5 (rates.a)")?;
                let r = steklov_bound_check(&family, &function()?, rc.a, &xs, &ns)
                    .map_err(engine_error)?;
                push_bound_result(&mut rows, &mut consts, &r, &mut out.violations);
            }
            "dt_3_5" => {
                let dt = dt_bound_constant(&family, &function()?, rc.tau, &xs, &ns)
                    .map_err(engine_error)?;
                let first = dt.per_n.first().map(|&(_, c)| c).unwrap_or(0.0);
                let last_idx = dt.per_n.len() - 1;
                for (idx, &(n, c_n)) in dt.per_n.iter().enumerate() {
                    let rhs = if idx == last_idx {
                        2.0 * first
                    } else {
                        f64::INFINITY
                    };
                    let holds = c_n <= rhs + BOUND_SLACK;
                    if !holds {
                        out.violations += 1;
                    }
                    rows.push(vec![
                        Cell::Text("dt_3_5".into()),
                        num_cell(n),
                        Cell::Float(0.0),
                        Cell::Float(c_n),
                        Cell::Float(rhs),
                        Cell::Flag(holds),
                        Cell::Float(rhs - c_n),
                    ]);
                }
                for (name, v) in [("value", dt.value), ("stabilization", dt.stabilization)] {
                    consts.push(vec![
                        Cell::Text("dt_3_5".into()),
                        Cell::Text(name.into()),
                        Cell::Float(v),
                    ]);
                }
            }
            "weighted_4_1" => {
                if ns.len() < 2 {
                    return Err(CliError::Config(
                        "weighted_4_1 needs at least two n values".into(),
                    ));
                }
                let r = weighted_convergence_check(
                    &family,
                    &function()?,
                    rc.weighted_alpha,
                    rc.x_max,
                    &ns,
                )
                .map_err(engine_error)?;
                push_bound_result(&mut rows, &mut consts, &r, &mut out.violations);
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown rates check '{other}'"
                )))
            }
        }
    }

    out.summary.push(format!(
        "rates: {} bound rows, {} violations",
        rows.rows.len(),
        out.violations
    ));
    out.reports.push(rows);
    out.reports.push(consts);
    Ok(out)
}

fn dbv(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    if cfg.operator.discrete {
        return Err(CliError::Config(
            "dbv applies to the smoothed operator; drop operator.discrete".into(),
        ));
    }
    let (ns, xs) = sorted_grids(cfg);
    positive_grid(&xs, "dbv")?;
    let pair = cfg.operator.build_pair()?;
    let family = OperatorFamily::new(pair, cfg.operator.rho(), cfg.operator.c())
        .map_err(engine_error)?;
    let fspec = required_function(cfg)?;
    let poly = fspec.build_poly()?;
    let m_f = fspec.envelope(&poly)?;
    let spec = DbvSpec::new(poly, m_f);
    let r = dbv_bound_check(&family, &spec, &xs, &ns).map_err(engine_error)?;

    let primary = cfg.output_name();
    let mut rows = Report::new(
        primary.clone(),
        vec!["theorem", "n", "x", "lhs", "rhs", "holds", "margin"],
    );
    let mut consts = Report::new(
        derived_name(&primary, "constants"),
        vec!["theorem", "name", "value"],
    );
    let mut out = RunOutput::new();
    push_bound_result(&mut rows, &mut consts, &r, &mut out.violations);
    out.summary.push(format!(
        "dbv: {} bound rows, {} violations",
        rows.rows.len(),
        out.violations
    ));
    out.reports.push(rows);
    out.reports.push(consts);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool() -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new()
            .num_threads(2)
            .build()
            .unwrap()
    }

    fn parse(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text).unwrap()
    }

    #[test]
    fn moments_row_for_phillips_matches_the_closed_value() {
        let cfg = parse(
            r#"{"experiment": "moments", "operator": {"preset": "phillips"},
                "grids": {"x": [1.0], "n": [10]}}"#,
        );
        let out = run(&cfg, &pool()).unwrap();
        let report = &out.reports[0];
        // (n=10, x=1, r=2, oracle) -> x^2 + 2x/n = 1.2
        let row = report
            .rows
            .iter()
            .find(|r| {
                r[2] == Cell::Int(2) && matches!(&r[3], Cell::Text(s) if s == "oracle")
            })
            .unwrap();
        match row[4] {
            Cell::Float(v) => assert!((v - 1.2).abs() < 1e-12, "{v}"),
            _ => panic!("value column"),
        }
    }

    #[test]
    fn moments_skips_divergent_orders() {
        let cfg = parse(
            r#"{"experiment": "moments", "operator": {"a": [1.0], "rho": 1.0, "c": 2},
                "grids": {"x": [1.0], "n": [7]}}"#,
        );
        let out = run(&cfg, &pool()).unwrap();
        // n rho = 7, c = 2: order 4 needs n rho > 8, orders 0..3 stay
        let orders: Vec<i64> = out.reports[0]
            .rows
            .iter()
            .filter_map(|r| match r[2] {
                Cell::Int(v) => Some(v),
                _ => None,
            })
            .collect();
        assert!(orders.contains(&3));
        assert!(!orders.contains(&4));
    }

    #[test]
    fn verify_paper_flags_the_expected_formulas() {
        let cfg = parse(
            r#"{"experiment": "verify-paper", "operator": {"preset": "phillips"},
                "grids": {"x": [0.5, 1.0], "n": [10, 100]}}"#,
        );
        let out = run(&cfg, &pool()).unwrap();
        let summary = &out.reports[1];
        let verdict_of = |q: &str| -> String {
            summary
                .rows
                .iter()
                .find(|r| matches!(&r[0], Cell::Text(s) if s == q))
                .map(|r| r[3].render())
                .unwrap()
        };
        assert_eq!(verdict_of("lemma24_lim2"), "paper_typo_suspected");
        assert_eq!(verdict_of("lemma24_lim1"), "agree");
        assert_eq!(verdict_of("lemma22_m2"), "paper_typo_suspected");
        assert_eq!(verdict_of("lemma21_m0"), "agree");
    }

    #[test]
    fn validate_passes_a_good_pair_and_counts_rows() {
        let cfg = parse(
            r#"{"experiment": "validate", "operator": {"a": [1.0, 2.0], "b": [0.1]},
                "grids": {"x": [0.5, 1.0], "n": [4, 16]}}"#,
        );
        let out = run(&cfg, &pool()).unwrap();
        assert_eq!(out.validation_failures, 0);
        // 3 structural rows + 2 per grid point
        assert_eq!(out.reports[0].rows.len(), 3 + 2 * 4);
    }

    #[test]
    fn rates_korovkin_runs_from_config() {
        let cfg = parse(
            r#"{"experiment": "rates", "operator": {"preset": "phillips"},
                "grids": {"x": [1.0], "n": [16, 32, 64]},
                "rates": {"checks": ["korovkin"], "interval": [0.0, 2.0]}}"#,
        );
        let out = run(&cfg, &pool()).unwrap();
        assert_eq!(out.violations, 0);
        assert!(out.reports[0].rows.len() >= 3 * 5);
        assert!(!out.reports[1].rows.is_empty());
    }

    #[test]
    fn dbv_runs_on_a_kink_preset() {
        let cfg = parse(
            r#"{"experiment": "dbv", "operator": {"preset": "phillips"},
                "grids": {"x": [0.5, 1.0], "n": [16, 64]},
                "function": {"preset": "abs_dev:1"}}"#,
        );
        let out = run(&cfg, &pool()).unwrap();
        assert_eq!(out.violations, 0);
        assert_eq!(out.reports[0].rows.len(), 4);
    }

    #[test]
    fn unknown_check_name_is_a_config_error() {
        let cfg = parse(
            r#"{"experiment": "rates", "operator": {"preset": "phillips"},
                "grids": {"x": [1.0], "n": [16, 32]},
                "rates": {"checks": ["korovkin_typo"]}}"#,
        );
        let err = run(&cfg, &pool()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
