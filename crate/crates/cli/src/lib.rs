//! Command-line front end for the `comprehend` engine.
//!
//! Every subcommand writes one CSV or JSON document to stdout or `--out`.
//! Exit codes: 0 on success, 1 on validation or I/O failure, 2 on usage
//! errors.

pub mod args;
pub mod emit;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;

use comprehend::asymptotic::{compare_to_binomial, CENTRAL_TAIL_MASS};
use comprehend::mixture::uniform_marginal_closed;
use comprehend::{
    convergence_study, sample_paths, EpsSchedule, InitialDistribution, MixtureLattice, Model,
    ModelParams, Pmf, ValidationMode, ValidationReport,
};

use args::{Cli, Command, Format, Method, Mode, ModelArgs, OutputArgs};
use emit::{csv, csv_field, fmt_f64, json, opt_f64};

/// Largest `n` for which `exact --self-check` runs the enumeration oracle.
pub const SELF_CHECK_MAX_N: usize = 12;
const SELF_CHECK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("validation failed: {0}")]
    Validation(ValidationReport),
    #[error("cannot read CDF table {path}: {message}")]
    Dist { path: PathBuf, message: String },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("self-check failed: recursion and enumeration differ by {0:e}")]
    SelfCheck(f64),
    #[error(transparent)]
    Engine(#[from] comprehend::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to `stderr`; results to `stdout`
/// unless `--out` is given.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let result = execute(cli.command, stderr).and_then(|o| {
        deliver(&o.doc, o.out.as_deref(), stdout)?;
        o.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => 0,
        Err(e) => report(e, stderr),
    }
}

fn report(e: CliError, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    if let CliError::Engine(comprehend::Error::Validation(r)) | CliError::Validation(r) = &e {
        for v in &r.violations {
            let _ = writeln!(stderr, "  violated: {v}");
        }
    }
    e.exit_code()
}

fn deliver(doc: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, doc)
            .map_err(|source| CliError::Write { path: path.to_path_buf(), source }),
        None => stdout
            .write_all(doc.as_bytes())
            .map_err(|source| CliError::Write { path: "<stdout>".into(), source }),
    }
}

fn load_dist(spec: &str) -> Result<InitialDistribution, CliError> {
    if spec == "uniform" {
        return Ok(InitialDistribution::Uniform01);
    }
    let path = PathBuf::from(spec);
    let bytes = std::fs::read(&path)
        .map_err(|e| CliError::Dist { path: path.clone(), message: e.to_string() })?;
    InitialDistribution::load_cdf_table(&bytes)
        .map_err(|e| CliError::Dist { path, message: e.to_string() })
}

fn build_model(args: &ModelArgs) -> Result<Model, CliError> {
    let dist = load_dist(&args.dist)?;
    let mode = if args.relaxed { ValidationMode::Relaxed } else { ValidationMode::Hypothesis1 };
    match Model::new(ModelParams::new(args.n, args.q, args.eps), dist, mode) {
        Ok(m) => Ok(m),
        Err(comprehend::Error::Validation(r)) => Err(CliError::Validation(r)),
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct ModelHeader<'a> {
    command: &'a str,
    n: usize,
    q: f64,
    eps: f64,
    dist: &'a str,
    mode: ValidationMode,
}

impl<'a> ModelHeader<'a> {
    fn new(command: &'a str, args: &'a ModelArgs) -> Self {
        let mode = if args.relaxed { ValidationMode::Relaxed } else { ValidationMode::Hypothesis1 };
        Self { command, n: args.n, q: args.q, eps: args.eps, dist: &args.dist, mode }
    }
}

#[derive(Serialize)]
struct PmfRow {
    k: usize,
    probability: f64,
}

fn pmf_document(header: &ModelHeader, pmf: &Pmf, format: Format) -> String {
    match format {
        Format::Csv => csv(
            &["k", "probability"],
            pmf.probs().iter().enumerate().map(|(k, p)| vec![k.to_string(), fmt_f64(*p)]),
        ),
        Format::Json => {
            let rows: Vec<PmfRow> =
                pmf.probs().iter().enumerate().map(|(k, &probability)| PmfRow { k, probability }).collect();
            json::<_, _, ()>(header, &rows, None)
        }
    }
}

/// A rendered document plus where it goes. `failure` is set when the
/// document must still be written but the process should exit non-zero.
struct Output {
    doc: String,
    out: Option<PathBuf>,
    failure: Option<CliError>,
}

impl Output {
    fn new(doc: String, out: Option<PathBuf>) -> Self {
        Self { doc, out, failure: None }
    }
}

fn execute(command: Command, stderr: &mut dyn Write) -> Result<Output, CliError> {
    match command {
        Command::Exact { model, self_check, output } => exact(&model, self_check, output, stderr),
        Command::Oracle { model, output } => {
            let m = build_model(&model)?;
            let pmf = m.brute_force_pmf()?;
            Ok(Output::new(pmf_document(&ModelHeader::new("oracle", &model), &pmf, output.format), output.out))
        }
        Command::Marginals { model, method, output } => marginals(&model, method, output),
        Command::Approx { model, output } => approx(&model, output),
        Command::Converge { q_list, n_list, c, eta, dist, output } => {
            converge(q_list, n_list, c, eta, &dist, output)
        }
        Command::Simulate { model, samples, seed, output } => simulate(&model, samples, seed, output),
        Command::Validate { n, q, eps, dist, mode, output } => validate(n, q, eps, &dist, mode, output),
    }
}

fn exact(args: &ModelArgs, self_check: bool, output: OutputArgs, stderr: &mut dyn Write) -> Result<Output, CliError> {
    let m = build_model(args)?;
    let pmf = m.exact_pmf();
    if self_check {
        if m.n() <= SELF_CHECK_MAX_N {
            let diff = pmf.max_abs_diff(&m.brute_force_pmf()?);
            if diff > SELF_CHECK_TOLERANCE {
                return Err(CliError::SelfCheck(diff));
            }
        } else {
            let _ = writeln!(stderr, "note: --self-check skipped for n > {SELF_CHECK_MAX_N}");
        }
    }
    Ok(Output::new(pmf_document(&ModelHeader::new("exact", args), &pmf, output.format), output.out))
}

#[derive(Serialize)]
struct MarginalHeader<'a> {
    #[serde(flatten)]
    model: ModelHeader<'a>,
    method: Method,
}

#[derive(Serialize)]
struct MarginalRow {
    m: usize,
    probability: f64,
}

fn marginals(args: &ModelArgs, method: Method, output: OutputArgs) -> Result<Output, CliError> {
    if method == Method::Closed && args.dist != "uniform" {
        return Err(CliError::Usage("--method closed requires --dist uniform".into()));
    }
    let m = build_model(args)?;
    let values = match method {
        Method::Exact => m.exact_marginals(),
        Method::Mixture => MixtureLattice::build(&m)?.marginals(),
        Method::Theorem1 => {
            let lattice = MixtureLattice::build(&m)?;
            (1..=m.n()).map(|j| lattice.theorem1_marginal(j)).collect::<Result<_, _>>()?
        }
        Method::Closed => {
            (1..=m.n()).map(|j| uniform_marginal_closed(&m, j)).collect::<Result<_, _>>()?
        }
    };
    let doc = match output.format {
        Format::Csv => csv(
            &["m", "probability"],
            values.iter().enumerate().map(|(i, p)| vec![(i + 1).to_string(), fmt_f64(*p)]),
        ),
        Format::Json => {
            let rows: Vec<MarginalRow> =
                values.iter().enumerate().map(|(i, &probability)| MarginalRow { m: i + 1, probability }).collect();
            let header = MarginalHeader { model: ModelHeader::new("marginals", args), method };
            json::<_, _, ()>(&header, &rows, None)
        }
    };
    Ok(Output::new(doc, output.out))
}

#[derive(Serialize)]
struct ApproxRow {
    k: usize,
    exact: f64,
    binomial: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct ApproxHeader<'a> {
    #[serde(flatten)]
    model: ModelHeader<'a>,
    binomial_p: f64,
}

fn approx(args: &ModelArgs, output: OutputArgs) -> Result<Output, CliError> {
    let m = build_model(args)?;
    let (exact, reference, profile) = compare_to_binomial(&m);
    let rows: Vec<ApproxRow> = (0..=m.n())
        .map(|k| ApproxRow { k, exact: exact[k], binomial: reference[k], ratio: profile.ratios[k] })
        .collect();
    let doc = match output.format {
        Format::Csv => csv(
            &["k", "exact", "binomial", "ratio"],
            rows.iter().map(|r| {
                vec![r.k.to_string(), fmt_f64(r.exact), fmt_f64(r.binomial), fmt_f64(r.ratio)]
            }),
        ),
        Format::Json => {
            let header = ApproxHeader {
                model: ModelHeader::new("approx", args),
                binomial_p: m.dist().sf(1.0 - args.q),
            };
            json::<_, _, ()>(&header, &rows, None)
        }
    };
    Ok(Output::new(doc, output.out))
}

#[derive(Serialize)]
struct ConvergeHeader<'a> {
    command: &'a str,
    q: &'a [f64],
    n: &'a [usize],
    c: f64,
    eta: f64,
    dist: &'a str,
    central_tail_mass: f64,
}

#[derive(Serialize)]
struct ConvergeRow {
    n: usize,
    q: f64,
    eps: f64,
    min_ratio: Option<f64>,
    max_abs_log_ratio: Option<f64>,
    tv: Option<f64>,
    window_lo: Option<usize>,
    window_hi: Option<usize>,
    window_min_ratio: Option<f64>,
    window_max_abs_log_ratio: Option<f64>,
    valid: bool,
    violations: Option<String>,
}

fn converge(
    q_list: Vec<f64>,
    n_list: Vec<usize>,
    c: f64,
    eta: f64,
    dist_spec: &str,
    output: OutputArgs,
) -> Result<Output, CliError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(CliError::Usage(format!("--c must be positive, got {c}")));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(CliError::Usage(format!("--eta must be non-negative, got {eta}")));
    }
    if let Some(n) = n_list.iter().find(|&&n| n == 0) {
        return Err(CliError::Usage(format!("--n values must be at least 1, got {n}")));
    }
    let dist = load_dist(dist_spec)?;
    let report = convergence_study(&q_list, &n_list, EpsSchedule::new(c, eta), &dist);
    let rows: Vec<ConvergeRow> = report
        .rows
        .iter()
        .map(|r| ConvergeRow {
            n: r.n,
            q: r.q,
            eps: r.eps,
            min_ratio: r.min_ratio,
            max_abs_log_ratio: r.max_abs_log_ratio,
            tv: r.tv,
            window_lo: r.window_lo,
            window_hi: r.window_hi,
            window_min_ratio: r.window_min_ratio,
            window_max_abs_log_ratio: r.window_max_abs_log_ratio,
            valid: r.is_valid(),
            violations: r.invalid.as_ref().map(|v| v.to_string()),
        })
        .collect();
    let doc = match output.format {
        Format::Csv => csv(
            &[
                "n",
                "q",
                "eps",
                "min_ratio",
                "max_abs_log_ratio",
                "tv",
                "window_lo",
                "window_hi",
                "window_min_ratio",
                "window_max_abs_log_ratio",
                "valid",
            ],
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    fmt_f64(r.q),
                    fmt_f64(r.eps),
                    opt_f64(r.min_ratio),
                    opt_f64(r.max_abs_log_ratio),
                    opt_f64(r.tv),
                    r.window_lo.map(|v| v.to_string()).unwrap_or_default(),
                    r.window_hi.map(|v| v.to_string()).unwrap_or_default(),
                    opt_f64(r.window_min_ratio),
                    opt_f64(r.window_max_abs_log_ratio),
                    r.valid.to_string(),
                ]
            }),
        ),
        Format::Json => {
            let header = ConvergeHeader {
                command: "converge",
                q: &q_list,
                n: &n_list,
                c,
                eta,
                dist: dist_spec,
                central_tail_mass: CENTRAL_TAIL_MASS,
            };
            json::<_, _, ()>(&header, &rows, None)
        }
    };
    Ok(Output::new(doc, output.out))
}

#[derive(Serialize)]
struct SimulateHeader<'a> {
    #[serde(flatten)]
    model: ModelHeader<'a>,
    samples: u64,
    seed: u64,
}

#[derive(Serialize)]
struct SimulateRow {
    k: usize,
    count: u64,
    empirical: f64,
    exact: f64,
}

#[derive(Serialize)]
struct SimulateSummary {
    tv_to_exact: f64,
    mean: f64,
    standard_error: f64,
    exact_mean: f64,
}

fn simulate(args: &ModelArgs, samples: u64, seed: u64, output: OutputArgs) -> Result<Output, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let m = build_model(args)?;
    let exact = m.exact_pmf();
    let sim = sample_paths(&m, samples, seed).with_exact(&exact);
    let rows: Vec<SimulateRow> = (0..=m.n())
        .map(|k| SimulateRow { k, count: sim.counts[k], empirical: sim.empirical[k], exact: exact[k] })
        .collect();
    let doc = match output.format {
        Format::Csv => csv(
            &["k", "count", "empirical", "exact"],
            rows.iter().map(|r| {
                vec![r.k.to_string(), r.count.to_string(), fmt_f64(r.empirical), fmt_f64(r.exact)]
            }),
        ),
        Format::Json => {
            let header = SimulateHeader { model: ModelHeader::new("simulate", args), samples, seed };
            let summary = SimulateSummary {
                tv_to_exact: sim.tv_to_exact.unwrap_or(f64::NAN),
                mean: sim.mean(),
                standard_error: sim.standard_error(),
                exact_mean: exact.mean(),
            };
            json(&header, &rows, Some(&summary))
        }
    };
    Ok(Output::new(doc, output.out))
}

#[derive(Serialize)]
struct ValidateHeader<'a> {
    command: &'a str,
    n: usize,
    q: f64,
    eps: f64,
    dist: &'a str,
    mode: ValidationMode,
    passes: bool,
    clamps_thresholds: bool,
}

#[derive(Serialize)]
struct ValidateRow {
    #[serde(flatten)]
    violation: comprehend::Violation,
    detail: String,
}

fn validate(n: usize, q: f64, eps: f64, dist_spec: &str, mode: Mode, output: OutputArgs) -> Result<Output, CliError> {
    let dist = load_dist(dist_spec)?;
    let mode = match mode {
        Mode::Strict => ValidationMode::Strict,
        Mode::Hypothesis1 => ValidationMode::Hypothesis1,
        Mode::Relaxed => ValidationMode::Relaxed,
    };
    let report = Model::validate(&ModelParams::new(n, q, eps), &dist, mode);
    let mode_name = serde_json::to_value(mode).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
    let doc = match output.format {
        Format::Csv => {
            let lead = vec![mode_name, report.passes().to_string(), report.clamps_thresholds.to_string()];
            let rows: Vec<Vec<String>> = if report.passes() {
                vec![[lead, vec![String::new(), String::new()]].concat()]
            } else {
                report
                    .violations
                    .iter()
                    .map(|v| {
                        let name = serde_json::to_value(v)
                            .ok()
                            .and_then(|j| j["condition"].as_str().map(str::to_owned))
                            .unwrap_or_default();
                        [lead.clone(), vec![name, csv_field(&v.to_string())]].concat()
                    })
                    .collect()
            };
            csv(&["mode", "passes", "clamps_thresholds", "condition", "detail"], rows)
        }
        Format::Json => {
            let header = ValidateHeader {
                command: "validate",
                n,
                q,
                eps,
                dist: dist_spec,
                mode,
                passes: report.passes(),
                clamps_thresholds: report.clamps_thresholds,
            };
            let rows: Vec<ValidateRow> = report
                .violations
                .iter()
                .map(|v| ValidateRow { violation: v.clone(), detail: v.to_string() })
                .collect();
            json::<_, _, ()>(&header, &rows, None)
        }
    };
    let failure = (!report.passes()).then_some(CliError::Validation(report));
    Ok(Output { doc, out: output.out, failure })
}
