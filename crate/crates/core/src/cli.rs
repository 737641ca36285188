//! Command-line front end. `run` parses arguments, dispatches, writes the
//! result to stdout and returns the process exit code.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error, 3 budget refused or
//! retries exhausted, 4 failed check.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::acceptance::{run_acceptance, AcceptanceConfig, DEFAULT_SEED};
use crate::analytic::verify::{run_suite, Suite};
use crate::analytic::DenseParams;
use crate::configmodel::{rejection_samples, simplicity_monte_carlo, simplicity_probability, EXHAUSTIVE_LIMIT};
use crate::estimate::{estimate_report, sweep, Formula};
use crate::exact::{count, Budget, Method};
use crate::hypergraph::{make_multigraph_params, make_params};
use crate::switching::switch_census;
use crate::{Error, Result, RngStream};

/// Exit code for argument errors.
pub const EXIT_USAGE: i32 = 1;

#[derive(Parser, Debug, Serialize)]
#[command(name = "hypercount", version, about = "Count and estimate regular r-partite hypergraphs")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GlobalOpts {
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output format; sweep and switch-census default to csv, others to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Work limit for the exact counters (overrides HYPERCOUNT_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Write a run manifest (arguments, seed, timing, output digest) here.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
enum Command {
    /// Exact or quadrature count of d-regular instances.
    Count {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// Asymptotic estimates, with the exact count when it fits the budget.
    Estimate {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum, default_value = "all")]
        formula: Formula,
    },
    /// Naive, dense and exact log counts over a range of degrees.
    Sweep {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d_from: u64,
        #[arg(long)]
        d_to: u64,
    },
    /// Uniform samples by configuration-model rejection, one JSON object per line.
    Sample {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_tries: u64,
    },
    /// Probability that a uniform configuration is simple.
    Psimple {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Skip exhaustive enumeration even when it would fit.
        #[arg(long)]
        monte_carlo: bool,
    },
    /// Exhaustive r = 3 switching census.
    SwitchCensus {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 3)]
        lmax: u64,
    },
    /// Numerical checks of the dense-case linear algebra and moments.
    Verify {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        m: u32,
        /// Density as p/q, integer or decimal.
        #[arg(long)]
        lambda: String,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Run the acceptance experiments from a JSON file (default: built-in set).
    Repro { config: Option<PathBuf> },
}

impl Command {
    fn default_format(&self) -> Format {
        match self {
            Command::Sweep { .. } | Command::SwitchCensus { .. } => Format::Csv,
            _ => Format::Json,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Count { .. } => "count",
            Command::Estimate { .. } => "estimate",
            Command::Sweep { .. } => "sweep",
            Command::Sample { .. } => "sample",
            Command::Psimple { .. } => "psimple",
            Command::SwitchCensus { .. } => "switch-census",
            Command::Verify { .. } => "verify",
            Command::Repro { .. } => "repro",
        }
    }
}

/// Provenance record written by `--manifest`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Value,
    pub seed: u64,
    pub workers: usize,
    pub format: String,
    pub started_unix_secs: u64,
    pub elapsed_secs: f64,
    pub exit_code: i32,
    pub output_sha256: String,
}

/// Rendered output plus a deferred error: failed checks still print their
/// report before the non-zero exit.
struct Outcome {
    text: String,
    failure: Option<Error>,
    /// Diagnostics for stderr.
    notes: Vec<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, failure: None, notes: Vec::new() }
    }
}

/// Parse `argv` (including the program name), run, print, return exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let workers =
        cli.global.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)).max(1);
    let format = cli.global.format.unwrap_or_else(|| cli.command.default_format());
    let budget = cli.global.budget.map(Budget::uniform).unwrap_or_else(Budget::from_env);

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_USAGE;
        }
    };
    let result = pool.install(|| dispatch(&cli, format, &budget));

    let (text, code) = match result {
        Ok(o) => {
            for n in &o.notes {
                let _ = writeln!(err, "{n}");
            }
            let code = o.failure.as_ref().map_or(0, Error::exit_code);
            if let Some(f) = &o.failure {
                let _ = writeln!(err, "error: {f}");
            }
            (o.text, code)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            (String::new(), e.exit_code())
        }
    };
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
    let elapsed = started.elapsed().as_secs_f64();
    let _ = writeln!(err, "{} finished in {elapsed:.3}s", cli.command.name());

    if let Some(path) = &cli.global.manifest {
        let manifest = RunManifest {
            tool: "hypercount",
            version: env!("CARGO_PKG_VERSION"),
            command: cli.command.name().to_string(),
            args: serde_json::to_value(&cli).unwrap_or(Value::Null),
            seed: seed_of(&cli.global),
            workers,
            format: match format {
                Format::Json => "json".into(),
                Format::Csv => "csv".into(),
            },
            started_unix_secs: started_unix,
            elapsed_secs: elapsed,
            exit_code: code,
            output_sha256: hex(&Sha256::digest(text.as_bytes())),
        };
        let body = serde_json::to_string_pretty(&manifest).unwrap_or_default() + "\n";
        if let Err(e) = std::fs::write(path, body) {
            let _ = writeln!(err, "error: cannot write manifest {}: {e}", path.display());
            return if code == 0 { EXIT_USAGE } else { code };
        }
    }
    code
}

fn seed_of(g: &GlobalOpts) -> u64 {
    g.seed.unwrap_or(DEFAULT_SEED)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn dispatch(cli: &Cli, format: Format, budget: &Budget) -> Result<Outcome> {
    let seed = seed_of(&cli.global);
    match &cli.command {
        Command::Count { r, m, d, method } => {
            let p = make_params(*r, *m, *d)?;
            render_one(&count(&p, *method, budget)?, format).map(Outcome::ok)
        }
        Command::Estimate { r, m, d, formula } => {
            let p = make_params(*r, *m, *d)?;
            render_one(&estimate_report(&p, *formula, Some(budget)), format).map(Outcome::ok)
        }
        Command::Sweep { r, m, d_from, d_to } => {
            let rows = sweep(*r, *m, *d_from, *d_to, Some(budget))?;
            render_rows(&rows, format).map(Outcome::ok)
        }
        Command::Sample { r, m, d, count, max_tries } => {
            let p = make_params(*r, *m, *d)?;
            let samples = rejection_samples(&p, *count, *max_tries, RngStream::new(seed, 0x7361_6d70))?;
            let graphs: Vec<_> = samples.iter().map(|(g, _)| g.to_json()).collect();
            match format {
                Format::Json => {
                    let mut s = String::new();
                    for g in &graphs {
                        s.push_str(&to_json_line(g)?);
                    }
                    Ok(Outcome::ok(s))
                }
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        sample: usize,
                        edge: usize,
                        coords: String,
                    }
                    let rows: Vec<Row> = graphs
                        .iter()
                        .enumerate()
                        .flat_map(|(i, g)| {
                            g.edges.iter().enumerate().map(move |(j, e)| Row {
                                sample: i,
                                edge: j,
                                coords: e.iter().map(u32::to_string).collect::<Vec<_>>().join(" "),
                            })
                        })
                        .collect();
                    render_rows(&rows, format).map(Outcome::ok)
                }
            }
        }
        Command::Psimple { r, m, d, samples, monte_carlo } => {
            let p = make_multigraph_params(*r, *m, *d)?;
            let rng = RngStream::new(seed, 0x7073_696d);
            let est = if *monte_carlo {
                simplicity_monte_carlo(&p, *samples, rng)
            } else {
                simplicity_probability(&p, *samples, rng)
            };
            render_one(&est, format).map(Outcome::ok)
        }
        Command::SwitchCensus { m, d, lmax } => {
            let p = make_params(3, *m, *d)?;
            let limit = cli.global.budget.unwrap_or(EXHAUSTIVE_LIMIT);
            render_rows(&switch_census(&p, *lmax, limit)?, format).map(Outcome::ok)
        }
        Command::Verify { r, m, lambda, suite } => {
            let p = DenseParams::parse(*r, *m, lambda)?;
            let report = run_suite(&p, *suite, seed)?;
            let failure =
                report.clauses.iter().find(|c| !c.passed).map(|c| Error::check(format!("clause {} failed", c.name)));
            let text = match format {
                Format::Json => to_json_pretty(&report)?,
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row<'a> {
                        name: &'a str,
                        passed: bool,
                        residual: f64,
                        tolerance: f64,
                        detail: &'a str,
                    }
                    let rows: Vec<Row> = report
                        .clauses
                        .iter()
                        .map(|c| Row {
                            name: &c.name,
                            passed: c.passed,
                            residual: c.residual,
                            tolerance: c.tolerance,
                            detail: c.detail.as_deref().unwrap_or(""),
                        })
                        .collect();
                    render_rows(&rows, format)?
                }
            };
            Ok(Outcome { text, failure, notes: Vec::new() })
        }
        Command::Repro { config } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::domain(format!("cannot read {}: {e}", path.display())))?;
                    AcceptanceConfig::from_json(&text)?
                }
                None => AcceptanceConfig::shipped(),
            };
            if let Some(s) = cli.global.seed {
                cfg.seed = Some(s);
            }
            let report = run_acceptance(&cfg);
            let mut notes: Vec<String> = report.warnings.iter().map(|w| format!("warning: {w}")).collect();
            notes.extend(report.criteria.iter().map(|c| format!("{c} [{:.1}s]", c.elapsed_secs)));
            let failed = report.failed_names();
            let failure = (!failed.is_empty()).then(|| Error::check(format!("criteria failed: {}", failed.join(", "))));
            let text = match format {
                Format::Json => to_json_pretty(&report)?,
                Format::Csv => render_rows(&report.criteria, format)?,
            };
            Ok(Outcome { text, failure, notes })
        }
    }
}

fn to_json_pretty<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::domain(format!("serialization failed: {e}")))
}

fn to_json_line<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map(|s| s + "\n").map_err(|e| Error::domain(format!("serialization failed: {e}")))
}

/// A single record: pretty JSON, or a two-column `field,value` CSV of the
/// flattened JSON tree.
fn render_one<T: Serialize>(v: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json_pretty(v),
        Format::Csv => {
            let value = serde_json::to_value(v).map_err(|e| Error::domain(format!("serialization failed: {e}")))?;
            let mut rows = Vec::new();
            flatten("", &value, &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::domain(format!("csv output failed: {e}"));
            w.write_record(["field", "value"]).map_err(csv_err)?;
            for (k, v) in rows {
                w.write_record([k, v]).map_err(csv_err)?;
            }
            finish_csv(w)
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// A table: CSV with a header row, or a pretty JSON array.
fn render_rows<T: Serialize>(rows: &[T], format: Format) -> Result<String> {
    match format {
        Format::Json => to_json_pretty(&rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| Error::domain(format!("csv output failed: {e}")))?;
            }
            finish_csv(w)
        }
    }
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::domain(format!("csv output failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::domain(format!("csv output failed: {e}")))
}
