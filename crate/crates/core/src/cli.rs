//! `vecbench` command line: `run`, `verify`, `advise`, `list`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error (including
//! unwritable output paths).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::advisor::{self, DeviceClass, Toolchain};
use crate::configmeta::{self, OptLevel};
use crate::datagen::{self, GeneratorInfo};
use crate::harness::{
    self, HarnessError, RunOptions, SchedulingScheme, SchemeKind, ToleranceOverride, Tolerances,
};
use crate::kernels::{self, parse_scenario_list, Backend, ScenarioId, ScenarioSpec, LANES};
use crate::report::{FailureRecord, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Lengths checked by `verify` when none are given.
pub const DEFAULT_VERIFY_LENGTHS: [usize; 7] = [1, 7, 8, 9, 64, 1000, 12345];
/// Number of consecutive seeds, starting at the default seed, checked by `verify`.
pub const DEFAULT_VERIFY_SEEDS: u64 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "vecbench",
    version,
    about = "Scalar versus explicit 8-lane SIMD kernel benchmark"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure plain and vector variants and write a report.
    Run(RunArgs),
    /// Check vector outputs against the plain kernels without timing.
    Verify(VerifyArgs),
    /// Recommend a toolchain and intrinsics policy for a device.
    Advise(AdviseArgs),
    /// Show the scenario catalogue, backends and protocol defaults.
    List(ListArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

/// A parsed `--scenario` argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection(pub Vec<ScenarioId>);

fn parse_scenarios(s: &str) -> Result<Selection, String> {
    parse_scenario_list(s)
        .map(Selection)
        .map_err(|e| e.to_string())
}

fn parse_length(s: &str) -> Result<usize, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a length"))?;
    if v.is_nan() || v < 1.0 || v.fract() != 0.0 || v > usize::MAX as f64 {
        return Err(format!("length must be a positive integer, got '{s}'"));
    }
    Ok(v as usize)
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenarios to run: `all`, an id, a list or ranges (e.g. `1,3-5`).
    #[arg(long, short = 's', default_value = "all", value_parser = parse_scenarios)]
    pub scenario: Selection,
    /// Elements per array (accepts `5e7`).
    #[arg(long, short = 'n', default_value_t = datagen::DEFAULT_LENGTH, value_parser = parse_length)]
    pub length: usize,
    /// Timed executions per variant.
    #[arg(long, short = 'r', default_value_t = harness::DEFAULT_REPEATS)]
    pub repeats: usize,
    #[arg(long, default_value = "interleaved")]
    pub scheme: SchemeKind,
    #[arg(long, default_value_t = datagen::DEFAULT_SEED)]
    pub seed: u64,
    /// Relative tolerance, `VALUE` for all scenarios or `ID=VALUE`; repeatable.
    #[arg(long, short = 't')]
    pub tolerance: Vec<ToleranceOverride>,
    /// Vector backend (default: widest supported).
    #[arg(long)]
    pub backend: Option<Backend>,
    /// Structured report path.
    #[arg(long, short = 'o', default_value = "vecbench-report.json")]
    pub out: PathBuf,
    /// Optional CSV export path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Record this optimisation level instead of the build's.
    #[arg(long)]
    pub opt_level: Option<OptLevel>,
    /// Record this toolchain name instead of `rustc`.
    #[arg(long)]
    pub toolchain: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, short = 's', default_value = "all", value_parser = parse_scenarios)]
    pub scenario: Selection,
    /// Lengths to check; repeatable or comma-separated.
    #[arg(long, short = 'n', value_delimiter = ',', value_parser = parse_length)]
    pub length: Vec<usize>,
    /// Seeds to check; repeatable or comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub seed: Vec<u64>,
    #[arg(long, short = 't')]
    pub tolerance: Vec<ToleranceOverride>,
    /// Restrict to one backend (default: every supported backend).
    #[arg(long)]
    pub backend: Option<Backend>,
}

#[derive(Debug, Args)]
pub struct AdviseArgs {
    /// windows, linux, macos or other.
    #[arg(long, short = 'd')]
    pub device: DeviceClass,
    /// Comma-separated toolchains available (icc, msvc, gcc, clang, aliases).
    #[arg(long, short = 'a', default_value = "")]
    pub available: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

/// Parses `args` (including the program name) without running anything.
pub fn parse<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match parse(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out, err),
        Command::Advise(a) => cmd_advise(&a, out, err),
        Command::List(a) => cmd_list(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn flatten(ids: &[ScenarioId]) -> Vec<ScenarioId> {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn tolerances(overrides: &[ToleranceOverride]) -> Tolerances {
    let mut t = Tolerances::default();
    for o in overrides {
        t.apply(o);
    }
    t
}

fn resolve_backend(requested: Option<Backend>) -> Result<Backend, String> {
    match requested {
        Some(b) if !b.is_available() => {
            Err(format!("{b} backend is not supported on this machine"))
        }
        Some(b) => Ok(b),
        None => Ok(Backend::detect()),
    }
}

fn fmt_ns(ns: f64) -> String {
    if ns >= 1e6 {
        format!("{:.1} ms", ns / 1e6)
    } else if ns >= 1e3 {
        format!("{:.1} us", ns / 1e3)
    } else {
        format!("{ns:.0} ns")
    }
}

type CmdResult = Result<i32, Box<dyn std::error::Error>>;

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let scenarios = flatten(&args.scenario.0);
    if args.repeats < 2 {
        return Err(HarnessError::TooFewRepeats(args.repeats).into());
    }
    for id in &scenarios {
        id.spec().check_length(args.length)?;
    }
    let backend = resolve_backend(args.backend)?;
    let options = RunOptions {
        length: args.length,
        seed: args.seed,
        scheme: SchedulingScheme::new(args.scheme, args.repeats),
        tolerances: tolerances(&args.tolerance),
        backend,
    };

    let mut config = configmeta::detect();
    if let Some(name) = &args.toolchain {
        config = config.with_toolchain(name, None);
    }
    if let Some(level) = &args.opt_level {
        config = config.with_opt_level(level.clone());
    }
    let mut report = Report::new(config, GeneratorInfo::new(args.seed));
    writeln!(
        out,
        "{} | {} | backend {} | length {} | {} x {} repeats",
        report.config.config_name,
        report.config.opt_level,
        backend,
        args.length,
        args.scheme,
        args.repeats
    )?;

    let mut code = EXIT_OK;
    for id in scenarios {
        match harness::run_scenario(id.spec(), &options) {
            Ok(result) => {
                let (tau, sigma) = result.ratio.percent();
                writeln!(
                    out,
                    "scenario {}: plain {} +/- {}, vector {} +/- {}, tau {:.1} +/- {:.1} %{}",
                    id,
                    fmt_ns(result.plain_stats.mean_ns),
                    fmt_ns(result.plain_stats.std_dev_ns),
                    fmt_ns(result.vector_stats.mean_ns),
                    fmt_ns(result.vector_stats.std_dev_ns),
                    tau,
                    sigma,
                    if result.sequence_emulated {
                        format!(" (lane-emulated: {})", result.emulated_ops.join(", "))
                    } else {
                        String::new()
                    }
                )?;
                for w in &result.warnings {
                    writeln!(err, "warning: scenario {id}: {w}")?;
                }
                report.results.push(result);
            }
            Err(HarnessError::VerificationFailed {
                scenario,
                verification,
            }) => {
                let message = format!("scenario {scenario}: {verification}");
                writeln!(err, "verification failed: {message}")?;
                report.failure = Some(FailureRecord {
                    scenario_id: id,
                    message,
                    verification: *verification,
                });
                code = EXIT_VERIFICATION;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }

    report.write_json(&args.out)?;
    writeln!(out, "report written to {}", args.out.display())?;
    if let Some(csv) = &args.csv {
        report.write_table_file(csv)?;
        writeln!(out, "table written to {}", csv.display())?;
    }
    Ok(code)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let scenarios = flatten(&args.scenario.0);
    let lengths = if args.length.is_empty() {
        DEFAULT_VERIFY_LENGTHS.to_vec()
    } else {
        args.length.clone()
    };
    let seeds = if args.seed.is_empty() {
        (0..DEFAULT_VERIFY_SEEDS)
            .map(|k| datagen::DEFAULT_SEED.wrapping_add(k))
            .collect()
    } else {
        args.seed.clone()
    };
    let backends = match args.backend {
        Some(b) => vec![resolve_backend(Some(b))?],
        None => Backend::available(),
    };
    let tol = tolerances(&args.tolerance);

    let mut runnable = 0usize;
    let mut failures = 0usize;
    let mut skipped = Vec::new();
    for id in &scenarios {
        let spec = id.spec();
        for &backend in &backends {
            let mut checks = 0usize;
            let mut worst = 0.0f64;
            let mut failed = Vec::new();
            for &length in &lengths {
                if let Err(e) = spec.check_length(length) {
                    if backend == backends[0] {
                        skipped.push(e.to_string());
                    }
                    continue;
                }
                for &seed in &seeds {
                    let mut data = datagen::generate(length, seed)?;
                    kernels::run_plain(spec, &mut data)?;
                    kernels::run_vector_with(backend, spec, &mut data)?;
                    let v = harness::verify(spec, &data, tol.get(*id))?;
                    checks += 1;
                    worst = worst.max(v.max_rel_diff);
                    if !v.passed {
                        failed.push(format!("length {length} seed {seed}: {v}"));
                    }
                }
            }
            if checks == 0 {
                continue;
            }
            runnable += checks;
            let status = if failed.is_empty() { "PASS" } else { "FAIL" };
            writeln!(
                out,
                "scenario {id} [{backend}]: {status} {checks} checks, max relative difference {worst:e} (tolerance {:e})",
                tol.get(*id)
            )?;
            for f in &failed {
                writeln!(err, "  scenario {id} [{backend}] {f}")?;
            }
            failures += failed.len();
        }
    }
    for s in &skipped {
        writeln!(err, "skipped: {s}")?;
    }
    if runnable == 0 {
        return Err(match skipped.first() {
            Some(s) => s.clone().into(),
            None => "nothing to verify".into(),
        });
    }
    if failures > 0 {
        writeln!(out, "{failures} check(s) failed")?;
        Ok(EXIT_VERIFICATION)
    } else {
        writeln!(out, "all {runnable} checks passed")?;
        Ok(EXIT_OK)
    }
}

#[derive(Serialize)]
struct AdviceOutput<'a> {
    device: DeviceClass,
    available: Vec<Toolchain>,
    ignored: Vec<&'a str>,
    node: String,
    #[serde(flatten)]
    recommendation: advisor::Recommendation,
}

pub fn cmd_advise(args: &AdviseArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let mut available = std::collections::BTreeSet::new();
    let mut ignored = Vec::new();
    for name in args
        .available
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
    {
        match Toolchain::from_alias(name) {
            Some(t) => {
                available.insert(t);
            }
            None => ignored.push(name),
        }
    }
    for name in &ignored {
        writeln!(err, "warning: ignoring unrecognised toolchain '{name}'")?;
    }
    let rec = advisor::advise(args.device, &available);
    match args.format {
        OutputFormat::Text => {
            writeln!(out, "{}", rec.node_text())?;
            writeln!(out, "  {}", rec.rationale)?;
        }
        OutputFormat::Json => {
            let doc = AdviceOutput {
                device: args.device,
                available: available.into_iter().collect(),
                ignored,
                node: rec.node_text(),
                recommendation: rec,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(EXIT_OK)
}

/// Protocol defaults as exposed by `list`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Defaults {
    pub length: usize,
    pub repeats: usize,
    pub scheme: SchemeKind,
    pub pair_order: [kernels::Variant; 2],
    pub lanes: usize,
    pub seed: u64,
    pub generator: &'static str,
    pub tolerances: Tolerances,
}

pub fn defaults() -> Defaults {
    let scheme = SchedulingScheme::default();
    let order = scheme.order();
    Defaults {
        length: datagen::DEFAULT_LENGTH,
        repeats: scheme.repeats,
        scheme: scheme.kind,
        pair_order: [order[0], order[1]],
        lanes: LANES,
        seed: datagen::DEFAULT_SEED,
        generator: datagen::GENERATOR_NAME,
        tolerances: Tolerances::default(),
    }
}

#[derive(Serialize)]
struct ScenarioListing {
    id: ScenarioId,
    description: &'static str,
    uses_offsets: bool,
    uses_transcendentals: bool,
    conditional_kind: kernels::ConditionalKind,
    min_length: usize,
}

#[derive(Serialize)]
struct Listing {
    scenarios: Vec<ScenarioListing>,
    backends: Vec<&'static str>,
    selected_backend: &'static str,
    defaults: Defaults,
}

pub fn cmd_list(args: &ListArgs, out: &mut dyn Write) -> CmdResult {
    let listing = Listing {
        scenarios: ScenarioSpec::catalogue()
            .iter()
            .map(|s| ScenarioListing {
                id: s.id(),
                description: s.description,
                uses_offsets: s.uses_offsets,
                uses_transcendentals: s.uses_transcendentals,
                conditional_kind: s.conditional_kind,
                min_length: s.min_length(),
            })
            .collect(),
        backends: Backend::available()
            .into_iter()
            .map(Backend::name)
            .collect(),
        selected_backend: Backend::detect().name(),
        defaults: defaults(),
    };
    match args.format {
        OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&listing)?)?,
        OutputFormat::Text => {
            for s in &listing.scenarios {
                writeln!(out, "{:>2}  {}", s.id, s.description)?;
            }
            writeln!(
                out,
                "backends: {} (selected: {})",
                listing.backends.join(", "),
                listing.selected_backend
            )?;
            let d = &listing.defaults;
            writeln!(
                out,
                "defaults: length {}, repeats {}, scheme {} ({}, {}), lanes {}, seed {}",
                d.length, d.repeats, d.scheme, d.pair_order[0], d.pair_order[1], d.lanes, d.seed
            )?;
        }
    }
    Ok(EXIT_OK)
}
