//! Command implementations behind the `temporal-audit` binary.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, Context};
use chrono::{DateTime, FixedOffset};
use clap::{Parser, Subcommand, ValueEnum};
use temporal_audit::log::{read_log_file, write_entries};
use temporal_audit::report::{render_csv, render_text, write_outputs, AnalysisError, GridSpec};
use temporal_audit::{analyze, AnalysisConfig, AuditReport, DriftReference, Execution, Normalization, PeakRule};
use temporal_audit_probe::{run_schedule, LogSink, ProbeClient, ProbeConfig, ProbeError, SystemClock};

pub mod scenario;

use scenario::{Scenario, ScenarioError};

#[derive(Parser)]
#[command(name = "temporal-audit", version, about = "Audit a hosted model's score series for drift and periodicity")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the probe schedule from a JSON config.
    Probe {
        /// JSON probe config; the API key comes from TEMPORAL_AUDIT_API_KEY.
        #[arg(long)]
        config: PathBuf,
        /// Overrides `log_path` from the config.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Analyze a probe log and write the report and data files.
    Analyze(Box<AnalyzeArgs>),
    /// Write a synthetic scenario as a probe log.
    Simulate {
        /// JSON scenario.
        #[arg(long)]
        scenario: PathBuf,
        /// JSONL log to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Render an existing report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    RunMaximum,
    EveryBin,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Amplitude,
    Variance,
}

#[derive(Clone, Copy, ValueEnum)]
enum DriftRefArg {
    StudentT,
    FixedB,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// JSONL probe log.
    #[arg(long)]
    log: PathBuf,
    /// Output directory for report.json and the CSV sidecars.
    #[arg(long)]
    out: PathBuf,
    /// JSON analysis config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Welch segment length is N / this [default: 4].
    #[arg(long)]
    nperseg_div: Option<usize>,
    /// Permutation surrogates for the significance band [default: 1000].
    #[arg(long)]
    nperm: Option<usize>,
    /// Per-bin significance level [default: 0.05].
    #[arg(long)]
    alpha: Option<f64>,
    /// Newey-West truncation lag in days [default: 7].
    #[arg(long)]
    hac_days: Option<f64>,
    /// Seed for surrogates and simulated nulls [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Offset for calendar aggregations, e.g. +02:00 [default: +02:00].
    #[arg(long, allow_hyphen_values = true)]
    tz_offset: Option<String>,
    #[arg(long, value_enum)]
    peak_rule: Option<RuleArg>,
    #[arg(long, value_enum)]
    normalization: Option<NormArg>,
    #[arg(long, value_enum)]
    drift_reference: Option<DriftRefArg>,
    /// Simulated null draws for `--drift-reference fixed-b`.
    #[arg(long, default_value_t = 2000)]
    fixed_b_draws: usize,
    /// Peak classification tolerance, cycles/day (default: bin width).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Reconstruction horizon in days [default: 700].
    #[arg(long)]
    horizon_days: Option<f64>,
    /// Reconstruction samples per day (default: series rate).
    #[arg(long)]
    resolution: Option<f64>,
    /// First grid slot (RFC 3339); the grid is inferred from the log if absent.
    #[arg(long, requires_all = ["grid_end", "grid_interval_secs"])]
    grid_start: Option<DateTime<FixedOffset>>,
    /// Last grid slot (RFC 3339).
    #[arg(long, requires = "grid_start")]
    grid_end: Option<DateTime<FixedOffset>>,
    /// Grid spacing in seconds.
    #[arg(long, requires = "grid_start")]
    grid_interval_secs: Option<f64>,
    /// Run permutations on one thread.
    #[arg(long)]
    sequential: bool,
}

/// Exit statuses: 1 usage, 2 data, 3 transport.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    Transport(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Transport(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Data(e) | Failure::Transport(e) => e,
        }
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn data(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Data(e.into())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();

    let result = match cli.command {
        Command::Probe { config, log } => cmd_probe(&config, log),
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Simulate { scenario, out } => cmd_simulate(&scenario, &out),
        Command::Report { input, format } => cmd_report(&input, format),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", describe(f.error()));
            f.code()
        }
    }
}

/// Error chain joined by `: `, skipping causes already spelled out by the
/// message above them.
fn describe(e: &anyhow::Error) -> String {
    let mut out = e.to_string();
    let mut last = out.clone();
    for cause in e.chain().skip(1) {
        let msg = cause.to_string();
        if !last.contains(&msg) {
            out.push_str(": ");
            out.push_str(&msg);
        }
        last = msg;
    }
    out
}

fn cmd_probe(config: &Path, log: Option<PathBuf>) -> Result<(), Failure> {
    let mut cfg = ProbeConfig::from_file(config).map_err(usage)?;
    if let Some(l) = log {
        cfg.log_path = l;
    }
    let client = match ProbeClient::from_env(cfg.clone()) {
        Ok(c) => Arc::new(c),
        Err(e @ (ProbeError::MissingApiKey | ProbeError::Config(_))) => return Err(usage(e)),
        Err(e) => return Err(Failure::Transport(e.into())),
    };
    let mut sink = LogSink::open(&cfg.log_path).map_err(data)?;
    let runtime = tokio::runtime::Runtime::new().map_err(data)?;
    let clock = SystemClock::new(*cfg.start.offset());
    let summary = runtime
        .block_on(run_schedule(client, &mut sink, &clock))
        .map_err(|e| data(anyhow!(e).context("probe run aborted")))?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    if summary.all_transport_failed() {
        return Err(Failure::Transport(anyhow!(
            "no request reached {}; {} transport failures",
            cfg.completions_url(),
            summary.transport_failed
        )));
    }
    Ok(())
}

fn analysis_config(args: &AnalyzeArgs) -> Result<AnalysisConfig, Failure> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .map_err(usage)?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", p.display()))
                .map_err(usage)?
        }
        None => AnalysisConfig::default(),
    };
    if let Some(v) = args.nperseg_div {
        cfg.nperseg_div = v;
    }
    if let Some(v) = args.nperm {
        cfg.n_perm = v;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.hac_days {
        cfg.hac_days = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(tz) = &args.tz_offset {
        cfg.tz_offset = tz
            .parse()
            .map_err(|e| usage(anyhow!("--tz-offset {tz:?}: {e}")))?;
    }
    if let Some(r) = args.peak_rule {
        cfg.peak_rule = match r {
            RuleArg::RunMaximum => PeakRule::RunMaximum,
            RuleArg::EveryBin => PeakRule::EveryBin,
        };
    }
    if let Some(n) = args.normalization {
        cfg.normalization = match n {
            NormArg::Amplitude => Normalization::Amplitude,
            NormArg::Variance => Normalization::Variance,
        };
    }
    if let Some(d) = args.drift_reference {
        cfg.drift_reference = match d {
            DriftRefArg::StudentT => DriftReference::StudentT,
            DriftRefArg::FixedB => DriftReference::FixedB {
                draws: args.fixed_b_draws,
                seed: cfg.seed,
            },
        };
    }
    if args.tolerance.is_some() {
        cfg.tolerance = args.tolerance;
    }
    if let Some(h) = args.horizon_days {
        cfg.horizon_days = h;
    }
    if args.resolution.is_some() {
        cfg.resolution = args.resolution;
    }
    if let (Some(t0), Some(t_end), Some(dt)) = (args.grid_start, args.grid_end, args.grid_interval_secs) {
        cfg.grid = Some(GridSpec {
            t0,
            dt_seconds: dt,
            t_end,
        });
    }
    cfg.execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let cfg = analysis_config(args)?;
    let log = read_log_file(&args.log)
        .with_context(|| format!("reading {}", args.log.display()))
        .map_err(data)?;
    let analysis = analyze(&log, &cfg).map_err(|e| {
        if e.is_usage() {
            usage(e)
        } else {
            data(e)
        }
    })?;
    let files = write_outputs(&analysis, &args.out).map_err(|e: AnalysisError| data(e))?;
    print!("{}", render_text(&analysis.report));
    for f in files {
        log::info!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_simulate(scenario: &Path, out: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(scenario)
        .with_context(|| format!("reading {}", scenario.display()))
        .map_err(usage)?;
    let sc: Scenario = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", scenario.display()))
        .map_err(usage)?;
    let entries = sc.entries().map_err(|e| match e {
        ScenarioError::Invalid(_) => usage(e),
        ScenarioError::OutOfRange { .. } => data(e),
    })?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(data)?;
    }
    let file = File::create(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(data)?;
    write_entries(&entries, BufWriter::new(file)).map_err(data)?;
    Ok(())
}

fn cmd_report(input: &Path, format: Format) -> Result<(), Failure> {
    let text = std::fs::read_to_string(input)
        .with_context(|| format!("reading {}", input.display()))
        .map_err(usage)?;
    let report: AuditReport = serde_json::from_str(&text)
        .with_context(|| format!("{} is not an audit report", input.display()))
        .map_err(data)?;
    let rendered = match format {
        Format::Text => render_text(&report),
        Format::Csv => render_csv(&report).map_err(data)?,
    };
    print!("{rendered}");
    Ok(())
}
