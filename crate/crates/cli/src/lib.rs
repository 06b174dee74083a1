//! Command-line front end for exact, asymptotic and Monte-Carlo marginal moments.
//!
//! Every run prints one JSON document `{"spec", "result", "runtime"}` (or CSV with
//! `--format csv`). `spec` and `result` depend only on the arguments and the seed; timings and
//! the worker count live in `runtime`.

mod input;
mod render;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use marginals::asymptotics::{self, convergence_diagnostic, lln_diagnostic, MomentVector, Regime, SpectrumSequence};
use marginals::checks::selfcheck;
use marginals::exact::{parse_exact, to_f64, to_fraction_string};
use marginals::mc::estimate_moment;
use marginals::moments::Engine;
use marginals::symgroup::CycleType;
use marginals::weingarten::WgTable;
use marginals::{Error, Execution};
use serde_json::{json, Value};

pub use input::SystemKind;
use render::Table;

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CAP: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::CapExceeded { .. }) { EXIT_CAP } else { EXIT_VALIDATION };
        CliError { code, message: e.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "marginals", version, about = "Mixed moments of quantum marginals of Haar-rotated spectra")]
struct Cli {
    /// Worker threads for σ-sums and sampling (1 = sequential; default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of Wg_{N,d} per cycle type.
    Wg(WgArgs),
    /// Exact mixed moment.
    Moment(MomentArgs),
    /// Leading-order asymptotics, optionally with a convergence sweep.
    Asymp(AsympArgs),
    /// Exact value against a Monte-Carlo estimate.
    Verify(VerifyArgs),
    /// Desk-scale invariant suite.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Args)]
struct WgArgs {
    #[arg(long = "N")]
    n: u64,
    #[arg(long)]
    d: usize,
    /// Single cycle type such as `2,1`.
    #[arg(long)]
    class: Option<String>,
}

#[derive(Debug, Args)]
struct SystemArgs {
    #[arg(long, value_enum)]
    system: Option<SystemKind>,
    /// `m n` (two), `n1 … nk` (multi), or `n k` (boson, fermion).
    #[arg(long, num_args = 1..)]
    dims: Vec<usize>,
    /// Eigenvalues as `a/b`, integers or decimals, or one builtin name.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    spectrum: Vec<String>,
    /// JSON `{dims, system, values: ["a/b", …]}`.
    #[arg(long)]
    spectrum_file: Option<PathBuf>,
    /// `key=v1,v2` tokens: `p i k q j l` (two), `i1 j1 i2 j2 …` (multi), `p i j` (boson, fermion).
    #[arg(long, num_args = 0..)]
    indices: Vec<String>,
}

#[derive(Debug, Args)]
struct MomentArgs {
    #[command(flatten)]
    system: SystemArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegimeKind {
    LargeM,
    Proportional,
    PhysicalM,
    PhysicalN,
}

#[derive(Debug, Args)]
struct AsympArgs {
    #[arg(long, value_enum)]
    regime: RegimeKind,
    /// Fixed `n` for the large-m regimes.
    #[arg(long)]
    n: Option<usize>,
    /// Ratio `c` in `m = ⌈cn⌉`, exact.
    #[arg(long)]
    c: Option<String>,
    #[arg(long, num_args = 0..)]
    indices: Vec<String>,
    /// Limit moments `M_1 M_2 …` (or `T_1 T_2 …` in the physical regimes).
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    limits: Vec<String>,
    /// Builtin spectrum sequence; supplies the limits and drives sweeps.
    #[arg(long)]
    sequence: Option<String>,
    /// Sizes (m, or n in the proportional regimes) at which to compare with the exact engine.
    #[arg(long, num_args = 1..)]
    sweep: Vec<usize>,
    /// Values of m at which to sample π₂ (law of large numbers check).
    #[arg(long, num_args = 1..)]
    lln: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Largest accepted |z|.
    #[arg(long, default_value_t = 4.0)]
    threshold: f64,
}

#[derive(Debug, Args)]
struct SelfcheckArgs {
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
}

/// Exit code and the text destined for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A finished command: resolved spec, result, and a CSV view of the result.
struct Report {
    spec: Value,
    result: Value,
    table: Table,
    code: i32,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: EXIT_VALIDATION, stdout: String::new(), stderr: text },
            };
        }
    };
    let exec = Execution::from_workers(cli.workers);
    let engine = Engine::from_env().with_execution(exec);
    let start = Instant::now();
    let report = match &cli.command {
        Command::Wg(a) => wg(a),
        Command::Moment(a) => moment(a, &engine),
        Command::Asymp(a) => asymp(a, &engine),
        Command::Verify(a) => verify(a, &engine),
        Command::Selfcheck(a) => run_selfcheck(a, &engine),
    };
    match report {
        Ok(report) => {
            let runtime = json!({
                "workers": cli.workers.map_or(Value::from("auto"), Value::from),
                "elapsed_ms": start.elapsed().as_millis() as u64,
            });
            let stdout = match cli.format {
                Format::Json => {
                    let doc = json!({ "spec": report.spec, "result": report.result, "runtime": runtime });
                    serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n"
                }
                Format::Csv => report.table.to_csv(),
            };
            let stderr = if report.code == EXIT_VERIFY { "verification failed\n".into() } else { String::new() };
            Outcome { code: report.code, stdout, stderr }
        }
        Err(e) => Outcome { code: e.code, stdout: String::new(), stderr: format!("error: {}\n", e.message) },
    }
}

fn exact_str(x: &marginals::Exact) -> Value {
    Value::String(to_fraction_string(x))
}

fn wg(a: &WgArgs) -> Result<Report, CliError> {
    if a.n == 0 {
        return Err(CliError::validation("N: must be at least 1"));
    }
    let table = WgTable::cached(a.n, a.d);
    let filter = match &a.class {
        Some(text) => {
            let parts = text
                .split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::validation(format!("class: not a list of cycle lengths: {text:?}")))?;
            let class = CycleType::from_parts(parts);
            if class.size() != a.d {
                return Err(CliError::validation(format!("class: {class} is not a cycle type of degree {}", a.d)));
            }
            Some(class)
        }
        None => None,
    };
    let mut rows = Vec::new();
    let mut csv = Table::new(&["class", "value"]);
    for (class, value) in table.entries() {
        if filter.as_ref().is_some_and(|f| f != class) {
            continue;
        }
        rows.push(json!({ "class": class.to_string(), "value": exact_str(value) }));
        csv.push(vec![class.to_string(), to_fraction_string(value)]);
    }
    Ok(Report {
        spec: json!({ "command": "wg", "N": a.n, "d": a.d, "class": a.class }),
        result: json!({ "classes": rows }),
        table: csv,
        code: 0,
    })
}

struct Resolved {
    spec: Value,
    query: marginals::moments::MomentQuery,
    spectrum: input::ResolvedSpectrum,
}

fn resolve(a: &SystemArgs, command: &str, engine: &Engine) -> Result<Resolved, CliError> {
    let (kind, system, spectrum) =
        input::resolve_system(a.system, &a.dims, &a.spectrum, a.spectrum_file.as_deref())?;
    let query = input::query(kind, &system, &a.indices)?;
    let dims: Vec<usize> = match &system {
        marginals::moments::System::TwoDistinguishable { m, n } => vec![*m, *n],
        marginals::moments::System::Distinguishable { dims } => dims.clone(),
        marginals::moments::System::Boson { n, k } | marginals::moments::System::Fermion { n, k } => vec![*n, *k],
    };
    let spec = json!({
        "command": command,
        "system": kind.name(),
        "dims": dims,
        "spectrum_source": spectrum.source,
        "spectrum": spectrum.to_json(),
        "blocks": input::query_json(&query),
        "cap": engine.cap,
    });
    Ok(Resolved { spec, query, spectrum })
}

fn moment(a: &MomentArgs, engine: &Engine) -> Result<Report, CliError> {
    let r = resolve(&a.system, "moment", engine)?;
    let result = engine.moment(&r.query, &r.spectrum.values)?;
    let mut table = Table::new(&["field", "value"]);
    table.push(vec!["value".into(), to_fraction_string(&result.value)]);
    table.push(vec!["term_count".into(), result.term_count.to_string()]);
    Ok(Report {
        spec: r.spec,
        result: json!({ "value": exact_str(&result.value), "term_count": result.term_count }),
        table,
        code: 0,
    })
}

fn parse_exact_field(field: &str, text: &str) -> Result<marginals::Exact, CliError> {
    parse_exact(text).map_err(|e| CliError::validation(format!("{field}: {e}")))
}

fn asymp(a: &AsympArgs, engine: &Engine) -> Result<Report, CliError> {
    let pattern = input::two_pattern(&a.indices)?;
    let need_n = || a.n.filter(|&n| n > 0).ok_or_else(|| CliError::validation("n: required for this regime"));
    let need_c = || -> Result<marginals::Exact, CliError> {
        let text = a.c.as_deref().ok_or_else(|| CliError::validation("c: required for this regime"))?;
        let c = parse_exact_field("c", text)?;
        if c <= marginals::Exact::from_integer(0.into()) {
            return Err(CliError::validation("c: must be positive"));
        }
        Ok(c)
    };
    let regime = match a.regime {
        RegimeKind::LargeM => Regime::LargeM { n: need_n()? },
        RegimeKind::Proportional => Regime::Proportional { c: need_c()? },
        RegimeKind::PhysicalM => Regime::PhysicalLargeM { n: need_n()? },
        RegimeKind::PhysicalN => Regime::PhysicalProportional { c: need_c()? },
    };
    let sequence = a
        .sequence
        .as_deref()
        .map(|s| s.parse::<SpectrumSequence>().map_err(|e| CliError::validation(format!("sequence: {e}"))))
        .transpose()?;
    let order = pattern.p().max(pattern.q()).max(1);
    let limits = match (&sequence, a.limits.is_empty()) {
        (_, false) => MomentVector::new(
            a.limits
                .iter()
                .enumerate()
                .map(|(idx, t)| parse_exact_field(&format!("limits[{idx}]"), t))
                .collect::<Result<_, _>>()?,
        ),
        (Some(seq), true) => seq.limits(order),
        (None, true) => return Err(CliError::validation("limits: give --limits or --sequence")),
    };
    let leading = asymptotics::asymptotic_moment(&pattern, &limits, &regime, engine.cap)?;
    let mut result = json!({
        "coefficient": exact_str(&leading.coefficient),
        "n_exponent": leading.n_exponent,
        "m_exponent": leading.m_exponent,
        "c_exponent": leading.c_exponent,
        "s_ik": leading.s_ik,
        "s_jl": leading.s_jl,
    });
    let mut table = Table::new(&["field", "value"]);
    table.push(vec!["coefficient".into(), to_fraction_string(&leading.coefficient)]);
    for (name, e) in [("n_exponent", leading.n_exponent), ("m_exponent", leading.m_exponent), ("c_exponent", leading.c_exponent)] {
        table.push(vec![name.into(), e.to_string()]);
    }

    if !a.sweep.is_empty() || !a.lln.is_empty() {
        let seq = sequence.ok_or_else(|| CliError::validation("sequence: sweeps need a builtin sequence"))?;
        if !a.sweep.is_empty() {
            let rows = convergence_diagnostic(&pattern, seq, &regime, &a.sweep, engine)?;
            table = Table::new(&["m", "n", "exact", "leading", "ratio", "relative_error"]);
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    table.push(vec![
                        r.m.to_string(),
                        r.n.to_string(),
                        to_fraction_string(&r.exact),
                        to_fraction_string(&r.leading),
                        r.ratio.as_ref().map(to_fraction_string).unwrap_or_default(),
                        r.relative_error.map(|e| format!("{e:e}")).unwrap_or_default(),
                    ]);
                    json!({
                        "m": r.m,
                        "n": r.n,
                        "exact": exact_str(&r.exact),
                        "leading": exact_str(&r.leading),
                        "ratio": r.ratio.as_ref().map(exact_str),
                        "relative_error": r.relative_error,
                    })
                })
                .collect();
            result["sweep"] = Value::Array(json_rows);
        }
        if !a.lln.is_empty() {
            let n = match regime {
                Regime::LargeM { n } | Regime::PhysicalLargeM { n } => n,
                _ => return Err(CliError::validation("lln: needs a fixed-n regime")),
            };
            if a.samples < 2 {
                return Err(CliError::validation("samples: need at least 2"));
            }
            let rows = lln_diagnostic(seq, n, &a.lln, a.samples, a.seed, engine.exec)?;
            let lln_table_needed = a.sweep.is_empty();
            if lln_table_needed {
                table = Table::new(&["m", "n", "row", "col", "mean_re", "mean_im", "variance", "standard_error", "predicted"]);
            }
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let s = &r.summary;
                    let size = s.mean.nrows();
                    let mut entries = Vec::new();
                    for row in 0..size {
                        for col in 0..size {
                            let predicted = if row == col { r.predicted_diagonal } else { 0.0 };
                            let z = s.mean[(row, col)];
                            if lln_table_needed {
                                table.push(vec![
                                    r.m.to_string(),
                                    r.n.to_string(),
                                    (row + 1).to_string(),
                                    (col + 1).to_string(),
                                    format!("{:e}", z.re),
                                    format!("{:e}", z.im),
                                    format!("{:e}", s.variance[(row, col)]),
                                    format!("{:e}", s.standard_error[(row, col)]),
                                    format!("{predicted:e}"),
                                ]);
                            }
                            entries.push(json!({
                                "row": row + 1,
                                "col": col + 1,
                                "mean": [z.re, z.im],
                                "variance": s.variance[(row, col)],
                                "standard_error": s.standard_error[(row, col)],
                                "predicted": predicted,
                            }));
                        }
                    }
                    json!({ "m": r.m, "n": r.n, "samples": s.samples, "entries": entries })
                })
                .collect();
            result["lln"] = Value::Array(json_rows);
        }
    }
    let spec = json!({
        "command": "asymp",
        "regime": regime.name(),
        "n": a.n,
        "c": a.c.as_deref().map(|t| parse_exact(t).map(|c| to_fraction_string(&c)).unwrap_or_default()),
        "indices": { "i": pattern.i, "k": pattern.k, "j": pattern.j, "l": pattern.l },
        "limits": limits.values().iter().map(to_fraction_string).collect::<Vec<_>>(),
        "sequence": sequence.map(|s| s.name()),
        "sweep": a.sweep,
        "lln": a.lln,
        "samples": a.samples,
        "seed": a.seed,
        "cap": engine.cap,
    });
    Ok(Report { spec, result, table, code: 0 })
}

fn verify(a: &VerifyArgs, engine: &Engine) -> Result<Report, CliError> {
    if a.samples < 2 {
        return Err(CliError::validation("samples: need at least 2"));
    }
    if a.threshold.is_nan() || a.threshold <= 0.0 {
        return Err(CliError::validation("threshold: must be positive"));
    }
    let r = resolve(&a.system, "verify", engine)?;
    let exact = engine.moment(&r.query, &r.spectrum.values)?;
    let est = estimate_moment(&r.query, &r.spectrum.to_f64(), a.samples, a.seed, engine.exec)?;
    let exact_f = to_f64(&exact.value);
    let z = est.z_score(exact_f);
    let passed = z.abs() < a.threshold;
    let mut spec = r.spec;
    spec["samples"] = a.samples.into();
    spec["seed"] = a.seed.into();
    spec["threshold"] = a.threshold.into();
    let mut table = Table::new(&["field", "value"]);
    for (k, v) in [
        ("exact", to_fraction_string(&exact.value)),
        ("estimate", format!("{:e}", est.mean.re)),
        ("estimate_imag", format!("{:e}", est.mean.im)),
        ("standard_error", format!("{:e}", est.standard_error)),
        ("z", format!("{z:e}")),
        ("passed", passed.to_string()),
    ] {
        table.push(vec![k.into(), v]);
    }
    Ok(Report {
        spec,
        result: json!({
            "exact": exact_str(&exact.value),
            "estimate": { "mean": [est.mean.re, est.mean.im], "standard_error": est.standard_error,
                          "imag_standard_error": est.imag_standard_error, "samples": est.samples, "seed": est.seed },
            "z": if z.is_finite() { Value::from(z) } else { Value::from(z.to_string()) },
            "passed": passed,
        }),
        table,
        code: if passed { 0 } else { EXIT_VERIFY },
    })
}

fn run_selfcheck(a: &SelfcheckArgs, engine: &Engine) -> Result<Report, CliError> {
    if a.samples < 2 {
        return Err(CliError::validation("samples: need at least 2"));
    }
    let checks = selfcheck(engine, a.seed, a.samples)?;
    let passed = checks.iter().all(|c| c.passed);
    let mut table = Table::new(&["check", "passed", "detail"]);
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| {
            table.push(vec![c.name.into(), c.passed.to_string(), c.detail.clone()]);
            json!({ "check": c.name, "passed": c.passed, "detail": c.detail })
        })
        .collect();
    Ok(Report {
        spec: json!({ "command": "selfcheck", "samples": a.samples, "seed": a.seed, "cap": engine.cap }),
        result: json!({ "passed": passed, "checks": rows }),
        table,
        code: if passed { 0 } else { EXIT_VERIFY },
    })
}
