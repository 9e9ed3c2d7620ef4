//! `nli`: estimate, generate, validate and max-reach from the command line.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage, 3 scenario schema or
//! validation error, 4 generation error, 5 oracle convergence failure,
//! 6 unreachable target.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use nli_core::budget::{
    default_target_osnr_db, max_reach, osnr_nl, terminated_prefix, ReachStatus,
};
use nli_core::cff::CffOptions;
use nli_core::egn::CorrectionCoefficients;
use nli_core::link_model::LinkScenario;
use nli_core::oracle::QuadratureSettings;
use nli_core::report::{
    validate_against_oracle, write_estimate_csv, write_trace_csv, write_validation_csv,
    ChannelSelection, ErrSummary, Histogram, ValidationRecord,
};
use nli_core::scenario_gen::{generate_scenario, testset_statistics, GenerationConfig};
use nli_core::schema::{
    scenario_from_json, scenario_to_json, scenario_to_json_line, ModeName, OptionsEntry,
};
use nli_core::Error;

const EXIT_CONVERGENCE: u8 = 5;
const EXIT_UNREACHABLE: u8 = 6;

#[derive(Parser)]
#[command(
    name = "nli",
    version,
    about = "Closed-form fiber nonlinear interference estimator"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-channel OSNR_NL report for one scenario file.
    Estimate(EstimateArgs),
    /// Random test-set scenarios.
    Generate(GenerateArgs),
    /// Closed form (GN and EGN) against the numerical GN oracle.
    Validate(ValidateArgs),
    /// Largest span count meeting a target OSNR_NL.
    MaxReach(MaxReachArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Gn,
    Egn,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args)]
struct EstimatorArgs {
    /// Correction mode; overrides the scenario file.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Span-to-span coherence term; overrides the scenario file.
    #[arg(long, value_enum)]
    coherence: Option<Switch>,
    /// JSON array of the 24 correction coefficients.
    #[arg(long)]
    coeffs: Option<PathBuf>,
}

impl EstimatorArgs {
    fn options(&self, file: &OptionsEntry) -> anyhow::Result<CffOptions> {
        let mut entry = file.clone();
        if let Some(m) = self.mode {
            entry.mode = Some(match m {
                Mode::Gn => ModeName::Gn,
                Mode::Egn => ModeName::Egn,
            });
        }
        if let Some(c) = self.coherence {
            entry.coherence = Some(c == Switch::On);
        }
        Ok(entry.to_options(load_coeffs(self.coeffs.as_deref())?))
    }
}

#[derive(Args)]
struct EstimateArgs {
    scenario: PathBuf,
    #[command(flatten)]
    estimator: EstimatorArgs,
    /// Report CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Generation config JSON; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    /// Fixed span count instead of cutting each link at its max-reach.
    #[arg(long)]
    spans: Option<usize>,
    #[arg(long)]
    max_spans: Option<usize>,
    /// Output directory (one file per scenario) or a `.jsonl` batch file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Scenario directory, `.jsonl` batch or single scenario file.
    batch: PathBuf,
    /// Relative tolerance of the oracle quadrature.
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    /// Histogram bin width, dB.
    #[arg(long, default_value_t = 0.025)]
    bins: f64,
    /// Coherent closed form and coherent oracle.
    #[arg(long, value_enum, default_value = "off")]
    coherence: Switch,
    /// JSON array of the 24 correction coefficients.
    #[arg(long)]
    coeffs: Option<PathBuf>,
    /// Validate every active channel, not only the CUT.
    #[arg(long)]
    all_channels: bool,
    /// Include multi-channel interference islands in the oracle.
    #[arg(long)]
    mci: bool,
    /// Output directory for validation.csv and the histograms.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MaxReachArgs {
    /// Scenario whose spans are repeated cyclically to build longer links.
    template: PathBuf,
    /// Target OSNR_NL in dB (default: the CUT format's table value).
    #[arg(long)]
    target: Option<f64>,
    #[arg(long, default_value_t = 100)]
    max_spans: usize,
    #[command(flatten)]
    estimator: EstimatorArgs,
    /// Trace CSV (N, OSNR_NL_dB).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_coeffs(path: Option<&Path>) -> anyhow::Result<CorrectionCoefficients> {
    match path {
        None => Ok(CorrectionCoefficients::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(CorrectionCoefficients::from_json(&text)
                .with_context(|| format!("in {}", p.display()))?)
        }
    }
}

fn read_scenario(path: &Path) -> anyhow::Result<(LinkScenario, OptionsEntry)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    scenario_from_json(&text).with_context(|| format!("in {}", path.display()))
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn estimate(args: EstimateArgs) -> anyhow::Result<u8> {
    let (scenario, file_opts) = read_scenario(&args.scenario)?;
    let opts = args.estimator.options(&file_opts)?;
    let start = Instant::now();
    let report = osnr_nl(&scenario, &opts)?;
    let elapsed = start.elapsed();
    write_estimate_csv(output(args.out.as_deref())?, &scenario, &report)?;
    for r in &report.channels {
        for w in r.warnings() {
            eprintln!("warning: channel {}: {w}", r.index);
        }
    }
    eprintln!(
        "evaluated {} channels in {:.3} ms",
        report.channels.len(),
        elapsed.as_secs_f64() * 1e3
    );
    Ok(0)
}

fn generate(args: GenerateArgs) -> anyhow::Result<u8> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            GenerationConfig::from_json(&text).with_context(|| format!("in {}", p.display()))?
        }
        None => GenerationConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(c) = args.count {
        cfg.system_count = c;
    }
    if args.spans.is_some() {
        cfg.span_count = args.spans;
    }
    if let Some(m) = args.max_spans {
        cfg.max_spans = m;
    }
    cfg.validate()?;

    let start = Instant::now();
    let scenarios: Vec<LinkScenario> = (0..cfg.system_count)
        .into_par_iter()
        .map(|i| generate_scenario(&cfg, i))
        .collect::<Result<_, _>>()?;
    eprintln!(
        "generated {} scenarios in {:.1} s",
        scenarios.len(),
        start.elapsed().as_secs_f64()
    );

    if args.out.extension().is_some_and(|e| e == "jsonl") {
        let mut w = output(Some(&args.out))?;
        for s in &scenarios {
            writeln!(w, "{}", scenario_to_json_line(s))?;
        }
        w.flush()?;
    } else {
        fs::create_dir_all(&args.out)
            .with_context(|| format!("creating {}", args.out.display()))?;
        for (i, s) in scenarios.iter().enumerate() {
            let path = args.out.join(format!("scenario_{i:05}.json"));
            fs::write(&path, scenario_to_json(s))
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }

    if scenarios.is_empty() {
        eprintln!("empty batch: no statistics");
    } else {
        println!("{}", testset_statistics(&scenarios)?);
    }
    Ok(0)
}

/// (id, scenario) pairs in a stable order.
fn read_batch(path: &Path) -> anyhow::Result<Vec<(String, LinkScenario)>> {
    let stem = |p: &Path| {
        p.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()?;
        files.retain(|p| p.extension().is_some_and(|e| e == "json"));
        files.sort();
        files
            .iter()
            .map(|p| Ok((stem(p), read_scenario(p)?.0)))
            .collect()
    } else if path.extension().is_some_and(|e| e == "jsonl") {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                let (s, _) = scenario_from_json(l)
                    .with_context(|| format!("{} line {}", path.display(), i + 1))?;
                Ok((format!("{}:{}", stem(path), i + 1), s))
            })
            .collect()
    } else {
        Ok(vec![(stem(path), read_scenario(path)?.0)])
    }
}

fn validate(args: ValidateArgs) -> anyhow::Result<u8> {
    let settings = QuadratureSettings {
        tolerance: args.tolerance,
        include_mci: args.mci,
        ..Default::default()
    };
    settings.validate()?;
    Histogram::new(args.bins)?;
    let coeffs = load_coeffs(args.coeffs.as_deref())?;
    let batch = read_batch(&args.batch)?;
    let selection = if args.all_channels {
        ChannelSelection::AllActive
    } else {
        ChannelSelection::Cut
    };

    let start = Instant::now();
    let results: Vec<Vec<ValidationRecord>> = batch
        .par_iter()
        .map(|(id, s)| {
            validate_against_oracle(
                id,
                s,
                selection,
                args.coherence == Switch::On,
                coeffs,
                &settings,
            )
        })
        .collect::<Result<_, _>>()?;
    let records: Vec<ValidationRecord> = results.into_iter().flatten().collect();
    let cff_ms: f64 = records.iter().map(|r| r.cff_time.as_secs_f64() * 1e3).sum();
    eprintln!(
        "validated {} scenarios in {:.1} s (closed form {:.3} ms total)",
        batch.len(),
        start.elapsed().as_secs_f64(),
        cff_ms
    );

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_validation_csv(output(Some(&args.out.join("validation.csv")))?, &records)?;
    for (mode, name) in [(ModeName::Gn, "gn"), (ModeName::Egn, "egn")] {
        let mut hist = Histogram::new(args.bins)?;
        let of_mode: Vec<&ValidationRecord> = records.iter().filter(|r| r.mode == mode).collect();
        for v in of_mode.iter().filter_map(|r| r.err_db) {
            hist.add(v);
        }
        hist.write_csv(output(Some(
            &args.out.join(format!("histogram_{name}.csv")),
        ))?)?;
        let flagged = of_mode.iter().filter(|r| r.low_dispersion).count();
        println!(
            "{name}: {} low_dispersion={flagged}",
            ErrSummary::from_records(of_mode.iter().copied())
        );
    }
    let failed = records.iter().any(|r| r.error.is_some());
    Ok(if failed { EXIT_CONVERGENCE } else { 0 })
}

fn cyclic(template: &LinkScenario, n: usize) -> LinkScenario {
    let k = template.span_count();
    let pick = |i: usize| i % k;
    let mut s = LinkScenario::new(
        (0..n).map(|i| template.spans[pick(i)].clone()).collect(),
        (0..n).map(|i| template.combs[pick(i)].clone()).collect(),
        (0..n).map(|i| template.noise_figures[pick(i)]).collect(),
    );
    s.metadata = template.metadata.clone();
    terminated_prefix(&s, n)
}

fn max_reach_cmd(args: MaxReachArgs) -> anyhow::Result<u8> {
    let (template, file_opts) = read_scenario(&args.template)?;
    let opts = args.estimator.options(&file_opts)?;
    let format = template.cut().format;
    let target = match args.target {
        Some(t) => t,
        None => match default_target_osnr_db(format) {
            Some(t) => t,
            None => bail!("no default target OSNR for {format}; pass --target"),
        },
    };
    let reach = max_reach(|n| Ok(cyclic(&template, n)), target, &opts, args.max_spans)?;
    if let Some(out) = &args.out {
        write_trace_csv(output(Some(out))?, &reach)?;
    }
    if !reach.monotone {
        eprintln!("warning: OSNR_NL trace is not monotone in the span count");
    }
    println!("{}", reach.spans);
    Ok(match reach.status {
        ReachStatus::Reached => 0,
        ReachStatus::Unbounded => {
            eprintln!("target still met at {} spans", args.max_spans);
            0
        }
        ReachStatus::Unreachable => {
            eprintln!("target {target:.3} dB not reached after one span");
            EXIT_UNREACHABLE
        }
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Schema { .. } | Error::Validation(_)) => 3,
        Some(Error::Generation { .. }) => 4,
        Some(Error::Convergence { .. }) => EXIT_CONVERGENCE,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Generate(a) => generate(a),
        Command::Validate(a) => validate(a),
        Command::MaxReach(a) => max_reach_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
