use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use momab::cover::{CoverMode, DEFAULT_EXACT_LIMIT};
use momab::error::{MomabError, Result};
use momab::harness::{
    export_front_scatter, loglog_slope, run_counterexample, run_scaling_sweep, run_table1, CsvTable,
    ScalingRequest, SweepConfig, SWEEP_EXACT_LIMIT,
};
use momab::instance::Instance;
use momab::momab::{run_algorithm, AlgoConfig, ExplorationLength, RunResult, Variant};
use momab::par::configure_threads_from_env;
use momab::regret::{build_report, RegretReport};

#[derive(Parser)]
#[command(name = "momab", version, about = "Multi-objective bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and print it as JSON.
    Gen(GenArgs),
    /// One run of the algorithm, emitting the run record and its regret report.
    Run(RunArgs),
    /// Average front and cover sizes over an (n, D) grid.
    Table1(Table1Args),
    /// Pareto-UCB1 against the algorithm on the three-arm instance.
    Counterexample(CounterexampleArgs),
    /// Regret metrics across a list of horizons.
    Sweep(SweepArgs),
    /// Per-arm scatter data for one run.
    ExportFront(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverArg {
    Exact,
    Greedy,
}

impl From<CoverArg> for CoverMode {
    fn from(c: CoverArg) -> Self {
        match c {
            CoverArg::Exact => CoverMode::Exact,
            CoverArg::Greedy => CoverMode::Greedy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Full,
    Epo,
    Single,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Full => Variant::FullB,
            VariantArg::Epo => Variant::EpoFiltered,
            VariantArg::Single => Variant::SingleRandom,
        }
    }
}

/// Accepts plain integers and scientific forms such as `1e8`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if f < 0.0 || f.fract() != 0.0 || f > u64::MAX as f64 {
        return Err(format!("not a non-negative integer: {s}"));
    }
    Ok(f as u64)
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "D")]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ExplorationArgs {
    /// Fixed exploration length.
    #[arg(long = "t-prime", value_parser = parse_count, conflicts_with = "target_r")]
    t_prime: Option<u64>,
    /// Choose the exploration length so the confidence radius is at most this.
    #[arg(long = "target-r")]
    target_r: Option<f64>,
}

impl ExplorationArgs {
    fn resolve(&self, default: ExplorationLength) -> ExplorationLength {
        match (self.t_prime, self.target_r) {
            (Some(tp), _) => ExplorationLength::Fixed(tp),
            (None, Some(r)) => ExplorationLength::TargetRadius(r),
            (None, None) => default,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Instance JSON produced by `gen`; otherwise one is generated from --n, --D and --seed.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, required_unless_present = "instance")]
    n: Option<usize>,
    #[arg(long = "D", required_unless_present = "instance")]
    d: Option<usize>,
    #[arg(long = "T", value_parser = parse_count)]
    horizon: u64,
    #[command(flatten)]
    exploration: ExplorationArgs,
    #[arg(long, value_enum, default_value = "greedy")]
    cover: CoverArg,
    #[arg(long, value_enum, default_value = "full")]
    variant: VariantArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "exact-limit", default_value_t = DEFAULT_EXACT_LIMIT)]
    exact_limit: usize,
    /// Keep dominated arms in the cover universe.
    #[arg(long = "no-prune")]
    no_prune: bool,
    /// Include wall-clock timings (the JSON is then no longer reproducible byte for byte).
    #[arg(long)]
    timings: bool,
    /// Output directory; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Table1Args {
    #[arg(long, value_parser = parse_count, value_delimiter = ',', default_value = "20,50,100")]
    n: Vec<u64>,
    #[arg(long = "D", value_parser = parse_count, value_delimiter = ',', default_value = "2,3,5")]
    d: Vec<u64>,
    #[arg(long = "T", value_parser = parse_count, default_value = "100000000")]
    horizon: u64,
    #[command(flatten)]
    exploration: ExplorationArgs,
    /// Restrict to one solver; both run by default.
    #[arg(long, value_enum)]
    cover: Option<CoverArg>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "exact-limit", default_value_t = SWEEP_EXACT_LIMIT)]
    exact_limit: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long = "T", value_parser = parse_count, default_value = "10000")]
    horizon: u64,
    /// Number of seeds, starting at --seed.
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long = "D", default_value_t = 2)]
    d: usize,
    /// Comma-separated ascending horizons.
    #[arg(long = "T", value_parser = parse_count, value_delimiter = ',', default_value = "1e4,1e5,1e6,1e7")]
    horizons: Vec<u64>,
    #[command(flatten)]
    exploration: ExplorationArgs,
    #[arg(long, value_enum, default_value = "exact")]
    cover: CoverArg,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "exact-limit", default_value_t = SWEEP_EXACT_LIMIT)]
    exact_limit: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn to_usize(values: &[u64]) -> Vec<usize> {
    values.iter().map(|&v| v as usize).collect()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| MomabError::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    std::fs::write(path, text).map_err(|e| MomabError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn stdout_text(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(MomabError::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn emit_csv(table: &CsvTable, out: Option<&Path>, file: &str) -> Result<()> {
    match out {
        Some(dir) => {
            let path = dir.join(file);
            table.write(&path)?;
            eprintln!("wrote {}", path.display());
        }
        None => stdout_text(&table.render())?,
    }
    Ok(())
}

fn load_or_generate(args: &RunArgs) -> Result<Instance> {
    match &args.instance {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| MomabError::Io {
                path: path.clone(),
                source: e,
            })?;
            Instance::from_json(&text)
        }
        None => Instance::generate(
            args.n.expect("clap enforces --n"),
            args.d.expect("clap enforces --D"),
            args.seed,
        ),
    }
}

fn single_run(args: &RunArgs) -> Result<(Instance, RunResult)> {
    let instance = load_or_generate(args)?;
    let mut config = AlgoConfig::new(args.horizon);
    config.exploration = args.exploration.resolve(ExplorationLength::Formula);
    config.cover_mode = args.cover.into();
    config.variant = args.variant.into();
    config.prune = !args.no_prune;
    config.exact_limit = args.exact_limit;
    let mut run = run_algorithm(&instance, &config, args.seed)?;
    if !args.timings {
        run.strip_timings();
    }
    Ok((instance, run))
}

#[derive(Serialize)]
struct RunOutput<'a> {
    run: &'a RunResult,
    report: &'a RegretReport,
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let json = Instance::generate(args.n, args.d, args.seed)?.to_json();
    match args.out {
        Some(path) => write_file(&path, &json),
        None => stdout_text(&format!("{json}\n")),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let (instance, run) = single_run(&args)?;
    let report = build_report(&run, &instance)?;
    match &args.out {
        Some(dir) => {
            write_file(&dir.join("run.json"), &run.to_json())?;
            write_file(&dir.join("report.json"), &report.to_json())?;
            eprintln!("wrote {} and {}", dir.join("run.json").display(), dir.join("report.json").display());
        }
        None => {
            let both = RunOutput {
                run: &run,
                report: &report,
            };
            stdout_text(&format!("{}\n", serde_json::to_string_pretty(&both)?))?;
        }
    }
    Ok(())
}

fn cmd_export_front(args: RunArgs) -> Result<()> {
    let (instance, run) = single_run(&args)?;
    let table = export_front_scatter(&instance, &run)?;
    emit_csv(&table, args.out.as_deref(), "front.csv")
}

fn cmd_table1(args: Table1Args) -> Result<()> {
    let defaults = SweepConfig::table1_default();
    let config = SweepConfig {
        n_values: to_usize(&args.n),
        d_values: to_usize(&args.d),
        horizon: args.horizon,
        replications: args.reps,
        base_seed: args.seed,
        cover_modes: match args.cover {
            Some(c) => vec![c.into()],
            None => defaults.cover_modes.clone(),
        },
        exploration: args.exploration.resolve(defaults.exploration),
        exact_limit: args.exact_limit,
        output_dir: args.out.clone(),
    };
    let out = run_table1(&config)?;
    match out.csv_path {
        Some(path) => eprintln!("wrote {}", path.display()),
        None => stdout_text(&out.csv_text)?,
    }
    Ok(())
}

fn cmd_counterexample(args: CounterexampleArgs) -> Result<()> {
    let seeds: Vec<u64> = (0..args.reps as u64).map(|k| args.seed.wrapping_add(k)).collect();
    let record = run_counterexample(args.horizon, &seeds)?;
    let mut table = record.to_csv();
    table.push_meta(format!(
        "T={},ucb_mean_dominated_pull_fraction={},algo_dominated_never_exploited={}",
        record.horizon, record.ucb_mean_pull_fraction[2], record.algo_dominated_never_exploited
    ));
    emit_csv(&table, args.out.as_deref(), "counterexample.csv")
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let req = ScalingRequest {
        n: args.n,
        d: args.d,
        horizons: args.horizons.clone(),
        replications: args.reps,
        base_seed: args.seed,
        cover_mode: args.cover.into(),
        exploration: args.exploration.resolve(ExplorationLength::Formula),
        exact_limit: args.exact_limit,
    };
    let (rows, mut table) = run_scaling_sweep(&req)?;
    let xs: Vec<f64> = rows.iter().map(|r| r.horizon as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.coverage_max).collect();
    if let Some(slope) = loglog_slope(&xs, &ys) {
        table.push_meta(format!("loglog_slope_coverage_max={slope}"));
    }
    emit_csv(&table, args.out.as_deref(), "sweep.csv")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads_from_env().and_then(|_| match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Table1(a) => cmd_table1(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::ExportFront(a) => cmd_export_front(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
