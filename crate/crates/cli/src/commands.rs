use liouville_core::counterexample::{
    build_counterexample, Counterexample, CounterexampleOptions, CounterexampleParams,
};
use liouville_core::criterion::{
    classify_divergence, q_hoelder, series_criterion, series_criterion_log, CriterionReport, LadderOptions, Method,
};
use liouville_core::presets::{self, Preset};
use liouville_core::proofsim::{averaged_coefficient, averaging_harness, blowup_iterate, BlowupParams};
use liouville_core::sampling::{log_points, SamplingPlan};
use liouville_core::tabulated::TabulatedRadialFunction;
use liouville_core::weakform::{holder_chain_check, verify_weak, HolderChain, TestFunction, WeakCheck};
use liouville_core::{ProblemSpec, RadialProfile};
use serde::Serialize;

use crate::args::{Command, Common};
use crate::config::{default_counterexample, load, AveragingConfig, ProofsimConfig, SeriesConfig, VerifyConfig};
use crate::error::CliError;
use crate::output::OutputFile;

#[derive(Serialize)]
struct Report<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config: C,
    result: R,
}

fn report<C: Serialize, R: Serialize>(
    command: &Command,
    common: &Common,
    config: C,
    result: R,
) -> Result<OutputFile, CliError> {
    OutputFile::json(
        "report.json",
        &Report {
            command: command.name(),
            version: env!("CARGO_PKG_VERSION"),
            seed: common.seed,
            config,
            result,
        },
    )
}

fn preset(common: &Common) -> Result<Option<Preset>, CliError> {
    common
        .preset
        .as_deref()
        .map(Preset::from_name)
        .transpose()
        .map_err(CliError::from)
}

fn no_preset(common: &Common, command: &str) -> Result<(), CliError> {
    match &common.preset {
        Some(p) => Err(CliError::Usage(format!(
            "`{command}` takes no preset (got {p:?}); use --spec"
        ))),
        None => Ok(()),
    }
}

fn positive_tol(common: &Common) -> Result<Option<f64>, CliError> {
    match common.tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(CliError::Usage(format!("--tol must be positive, got {t}"))),
        t => Ok(t),
    }
}

/// Runs one command and returns its output files without writing them.
pub fn execute(command: &Command, common: &Common) -> Result<Vec<OutputFile>, CliError> {
    if common.spec.is_some() && common.preset.is_some() {
        return Err(CliError::Usage("--spec and --preset are mutually exclusive".into()));
    }
    positive_tol(common)?;
    match command {
        Command::Criterion { method } => criterion(command, common, method.map(Method::from)),
        Command::Counterexample => counterexample(command, common),
        Command::Verify => verify(command, common),
        Command::Proofsim => proofsim(command, common),
        Command::Averaging => averaging(command, common),
    }
}

#[derive(Serialize)]
struct CriterionConfig<'a> {
    source: &'a str,
    method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    problem: Option<&'a ProblemSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    series: Option<&'a SeriesConfig>,
    ladder: LadderOptions,
}

fn criterion_files(
    command: &Command,
    common: &Common,
    config: CriterionConfig,
    result: &CriterionReport,
) -> Result<Vec<OutputFile>, CliError> {
    let mut files = vec![report(command, common, &config, result)?];
    if result.series_terms.is_empty() {
        files.push(OutputFile::csv("samples.csv", &result.samples)?);
    } else {
        files.push(OutputFile::csv("terms.csv", &result.series_terms)?);
    }
    files.push(OutputFile::csv("ladder.csv", &result.ladder)?);
    Ok(files)
}

fn criterion(command: &Command, common: &Common, method: Option<Method>) -> Result<Vec<OutputFile>, CliError> {
    let mut ladder = LadderOptions::default();
    if let Some(t) = common.tol {
        ladder.quad = ladder.quad.with_rel_tol(t);
    }
    if let Some(g) = common.grid {
        if g < 2 {
            return Err(CliError::Usage(
                "--grid must be at least 2 for the criterion ladder".into(),
            ));
        }
        ladder.samples_per_step = g;
    }
    let chosen = preset(common)?;
    if chosen == Some(Preset::DyadicSeries) || (chosen.is_none() && method == Some(Method::Series)) {
        if let Some(Preset::DyadicSeries) = chosen {
            let (n, k, lambda, nu, terms) = (3, 1, 2.0, -1.0, 1000);
            let (log_r, log_b, pattern) = presets::dyadic_series(n, k, lambda, nu, terms);
            let result = series_criterion_log(&log_r, &log_b, n, 2 * k, lambda, terms, Some(pattern))?;
            let config = CriterionConfig {
                source: "preset:dyadic_series",
                method: Method::Series,
                problem: None,
                series: None,
                ladder,
            };
            return criterion_files(command, common, config, &result);
        }
        let path = common
            .spec
            .as_deref()
            .ok_or_else(|| CliError::Usage("the series criterion needs --spec".into()))?;
        let series: SeriesConfig = load(path)?;
        let terms = series.terms.unwrap_or(series.radii.len());
        let result = series_criterion(
            &series.radii,
            &series.coefficients,
            series.n,
            series.m,
            series.lambda,
            terms,
            series.pattern,
        )?;
        let config = CriterionConfig {
            source: "spec",
            method: Method::Series,
            problem: None,
            series: Some(&series),
            ladder,
        };
        return criterion_files(command, common, config, &result);
    }
    let (spec, source) = match (chosen, &common.spec) {
        (Some(p), _) => (p.spec(), format!("preset:{}", p.name())),
        (None, Some(path)) => (load::<ProblemSpec>(path)?, "spec".to_string()),
        (None, None) => return Err(CliError::Usage("criterion needs --spec or --preset".into())),
    };
    spec.validate()?;
    let method = method.unwrap_or(Method::EssInf);
    let result = classify_divergence(&spec, method, &ladder)?;
    let config = CriterionConfig {
        source: &source,
        method,
        problem: Some(&spec),
        series: None,
        ladder,
    };
    criterion_files(command, common, config, &result)
}

fn counterexample_options(common: &Common) -> Result<CounterexampleOptions, CliError> {
    let mut opts = CounterexampleOptions::default();
    if let Some(t) = common.tol {
        opts.poisson_tol = t;
    }
    if let Some(g) = common.grid {
        opts.grid = liouville_core::LogGrid::new(opts.grid.r_lo, opts.grid.r_hi, g)?;
    }
    Ok(opts)
}

#[derive(Serialize)]
struct ValueRow {
    r: f64,
    value: f64,
}

fn table_rows(t: &TabulatedRadialFunction) -> Vec<ValueRow> {
    t.radii()
        .into_iter()
        .zip(&t.values)
        .map(|(r, &value)| ValueRow { r, value })
        .collect()
}

fn chain_file(ce: &Counterexample) -> Result<OutputFile, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["r".to_string()];
    header.extend((0..ce.chain.len()).map(|i| format!("w{i}")));
    let err = |e: csv::Error| CliError::Output(e.to_string());
    writer.write_record(&header).map_err(err)?;
    for (j, r) in ce.chain[0].radii().into_iter().enumerate() {
        let mut row = vec![format!("{r:e}")];
        row.extend(ce.chain.iter().map(|w| format!("{:e}", w.values[j])));
        writer.write_record(&row).map_err(err)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    Ok(OutputFile {
        name: "chain.csv".into(),
        bytes,
    })
}

fn counterexample(command: &Command, common: &Common) -> Result<Vec<OutputFile>, CliError> {
    no_preset(common, "counterexample")?;
    let params: CounterexampleParams = match &common.spec {
        Some(path) => load(path)?,
        None => default_counterexample(),
    };
    let opts = counterexample_options(common)?;
    let ce = build_counterexample(params, &opts)?;
    #[derive(Serialize)]
    struct Config {
        params: CounterexampleParams,
        options: CounterexampleOptions,
    }
    Ok(vec![
        report(command, common, Config { params, options: opts }, &ce.certificate)?,
        OutputFile::csv("u.csv", table_rows(&ce.u))?,
        OutputFile::csv("implied_b.csv", table_rows(&ce.implied_b))?,
        chain_file(&ce)?,
    ])
}

#[derive(Serialize)]
struct VerifyResult {
    weak: Vec<WeakCheck>,
    hoelder_chain: Vec<HolderChain>,
    all_pass: bool,
}

fn verify(command: &Command, common: &Common) -> Result<Vec<OutputFile>, CliError> {
    no_preset(common, "verify")?;
    let config: VerifyConfig = match &common.spec {
        Some(path) => load(path)?,
        None => VerifyConfig::default(),
    };
    if !(config.b_factor > 0.0) {
        return Err(CliError::Usage(format!(
            "b_factor must be positive, got {}",
            config.b_factor
        )));
    }
    let tol = common.tol.unwrap_or(1e-6);
    let opts = counterexample_options(&Common {
        tol: None,
        ..common.clone()
    })?;
    let p = config.counterexample;
    let ce = build_counterexample(p, &opts)?;
    let b = ce.implied_b.scaled(config.b_factor);
    let one = RadialProfile::constant(1.0);
    let mut weak = Vec::with_capacity(config.tests.len());
    let mut chain = Vec::with_capacity(config.tests.len());
    for &(r1, r2) in &config.tests {
        let test = TestFunction::new(r1, r2, 2 * p.k)?;
        weak.push(verify_weak(&ce.u, &b, p.lambda, p.k, p.n, &test, tol)?);
        chain.push(holder_chain_check(&ce.u, &one, &b, p.lambda, 2 * p.k, p.n, r1, r2)?);
    }
    let all_pass = weak.iter().all(|w| w.verdict) && chain.iter().all(|c| c.verdict);
    #[derive(Serialize)]
    struct Config {
        verify: VerifyConfig,
        tol: f64,
    }
    Ok(vec![
        report(
            command,
            common,
            Config { verify: config, tol },
            VerifyResult {
                weak: weak.clone(),
                hoelder_chain: chain,
                all_pass,
            },
        )?,
        OutputFile::csv("verify.csv", weak)?,
    ])
}

#[derive(Serialize)]
struct TrajectorySummary {
    c: f64,
    blow_up: bool,
    blow_up_index: Option<usize>,
    steps: usize,
    final_value: f64,
    nondecreasing: bool,
    file: String,
}

#[derive(Serialize)]
struct AveragedRow {
    r: f64,
    averaged: f64,
    q: f64,
}

fn proofsim(command: &Command, common: &Common) -> Result<Vec<OutputFile>, CliError> {
    let config = match (preset(common)?, &common.spec) {
        (Some(p), _) => ProofsimConfig::for_problem(p.spec()),
        (None, Some(path)) => load::<ProofsimConfig>(path)?,
        (None, None) => ProofsimConfig::for_problem(Preset::BlowupDivergent.spec()),
    };
    let spec = &config.problem;
    spec.validate()?;
    let plan = SamplingPlan::default();
    let mut files = Vec::new();
    let mut summaries = Vec::new();
    for (i, &c) in config.constants.iter().enumerate() {
        let params = BlowupParams {
            c,
            j0: config.j0,
            r0: config.r0,
            max_steps: config.max_steps,
            overflow: config.overflow,
            ..presets::blowup_params(spec, c, config.max_steps)
        };
        let t = blowup_iterate(|r| averaged_coefficient(spec, r, false), &params, &plan)?;
        let file = format!("trajectory_{i}.csv");
        summaries.push(TrajectorySummary {
            c,
            blow_up: t.blow_up,
            blow_up_index: t.blow_up_index,
            steps: t.values.len() - 1,
            final_value: *t.values.last().expect("nonempty"),
            nondecreasing: t.is_nondecreasing(),
            file: file.clone(),
        });
        files.push(OutputFile::csv(&file, t.rows())?);
    }
    let lo = spec.sigma.max(1.0);
    let rows = log_points(lo, 1e3 * lo, 25)
        .into_iter()
        .map(|r| {
            Ok(AveragedRow {
                r,
                averaged: averaged_coefficient(spec, r, false)?,
                q: q_hoelder(spec, r)?,
            })
        })
        .collect::<Result<Vec<_>, liouville_core::Error>>()?;
    files.push(OutputFile::csv("averaged_coefficient.csv", &rows)?);
    #[derive(Serialize)]
    struct Result_<'a> {
        trajectories: &'a [TrajectorySummary],
        averaged_dominates_q: bool,
    }
    let dominates = rows.iter().all(|r| r.averaged >= r.q * (1.0 - 1e-12));
    files.insert(
        0,
        report(
            command,
            common,
            &config,
            Result_ {
                trajectories: &summaries,
                averaged_dominates_q: dominates,
            },
        )?,
    );
    Ok(files)
}

fn averaging(command: &Command, common: &Common) -> Result<Vec<OutputFile>, CliError> {
    no_preset(common, "averaging")?;
    let config: AveragingConfig = match &common.spec {
        Some(path) => load(path)?,
        None => AveragingConfig::default(),
    };
    let mut stats = Vec::new();
    let mut files = Vec::new();
    for (i, s) in config.settings.iter().enumerate() {
        let (st, trials) = averaging_harness(s.alpha, s.kappa, s.nu, config.trials, common.seed, &config.generator)?;
        stats.push(st);
        files.push(OutputFile::csv(&format!("trials_{i}.csv"), trials)?);
    }
    files.insert(0, report(command, common, &config, &stats)?);
    Ok(files)
}
