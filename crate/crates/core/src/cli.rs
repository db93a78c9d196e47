//! Command-line front end: `generate`, `preprocess`, `mine`, `report` and
//! `pipeline`.
//!
//! Values are resolved as: command-line flags, then the `TSARM_SEED`
//! environment variable (seeds only), then the configuration file, then
//! built-in defaults.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{env_seed, PipelineConfig};
use crate::datagen::{generate, write_csv};
use crate::encoding::ThresholdMode;
use crate::error::{Error, Result};
use crate::measures::Counting;
use crate::miner::{
    mine, read_rules_csv, report_table, write_report_csv, write_rules_csv, write_rules_text,
    ReportRow, RuleRecord,
};
use crate::optimizers::Algorithm;
use crate::preprocess::{
    build_database, parse_sensor_csv, read_database, write_database, TransactionDatabase,
};

const ALGORITHM_DEFAULTS: &str = "\
Algorithm defaults:
  DE      F = 0.5, CR = 0.9
  GA      pm = 0.01, pc = 0.8
  PSO     c1 = 0.1, c2 = 0.1, w = 0.8
  LSHADE  H = 5, p = 0.1, r_arc = 2, NP_init = 18·D, NP_min = 4
  jDE     F0 = 0.5, CR0 = 0.9, tau = 0.1
  All     MaxFEs = 10000, NP = 50, runs = 10";

#[derive(Debug, Parser)]
#[command(
    name = "tsarm",
    version,
    about = "Time-series numerical association rule mining"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic greenhouse sensor readings.
    Generate(GenerateArgs),
    /// Turn sensor readings into a transaction database.
    Preprocess(PreprocessArgs),
    /// Mine rules from a transaction database.
    #[command(after_help = ALGORITHM_DEFAULTS)]
    Mine(MineArgs),
    /// Summarize a rules file.
    Report(ReportArgs),
    /// Generate, preprocess and mine in one go.
    #[command(after_help = ALGORITHM_DEFAULTS)]
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 14)]
    days: u32,
    /// Seconds between readings.
    #[arg(long, default_value_t = 5.0)]
    cadence: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Probability of dropping a reading.
    #[arg(long, default_value_t = 0.0)]
    drop_rate: f64,
    #[arg(long, default_value = "2022-09-15")]
    start: NaiveDate,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Frame length in seconds.
    #[arg(long, default_value_t = 3600)]
    frame: u32,
    /// Number of time-of-day classes `K`.
    #[arg(long, default_value_t = 24)]
    classes: u32,
    /// Frames with fewer readings are dropped.
    #[arg(long, default_value_t = 1)]
    min_records: usize,
    /// Date given SEQUENCE 0; defaults to the first reading's date.
    #[arg(long)]
    start: Option<NaiveDate>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoChoice {
    De,
    Ga,
    Pso,
    Lshade,
    Jde,
    All,
}

impl AlgoChoice {
    fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgoChoice::De => vec![Algorithm::De],
            AlgoChoice::Ga => vec![Algorithm::Ga],
            AlgoChoice::Pso => vec![Algorithm::Pso],
            AlgoChoice::Lshade => vec![Algorithm::Lshade],
            AlgoChoice::Jde => vec![Algorithm::Jde],
            AlgoChoice::All => Algorithm::ALL.to_vec(),
        }
    }
}

/// Mining options shared by `mine` and `pipeline`; unset flags fall back to
/// the configuration file.
#[derive(Debug, Args)]
struct MiningFlags {
    #[arg(long, value_enum)]
    algo: Option<AlgoChoice>,
    /// Evaluation budget per run.
    #[arg(long)]
    fes: Option<usize>,
    /// Population size.
    #[arg(long)]
    np: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Minimum support (exclusive) for a rule to be archived.
    #[arg(long)]
    s_min: Option<f64>,
    /// Minimum confidence (exclusive) for a rule to be archived.
    #[arg(long)]
    c_min: Option<f64>,
    /// Maximum rule length `L`.
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long, value_enum)]
    threshold_mode: Option<ModeChoice>,
    #[arg(long, value_enum)]
    counting: Option<CountingChoice>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeChoice {
    Deterministic,
    Stochastic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CountingChoice {
    Days,
    Transactions,
}

#[derive(Debug, Args)]
struct MineArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    flags: MiningFlags,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// Output directory; overrides `output_dir` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    flags: MiningFlags,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli.command, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Generate(a) => cmd_generate(a, out),
        Command::Preprocess(a) => cmd_preprocess(a, out),
        Command::Mine(a) => cmd_mine(a, out),
        Command::Report(a) => cmd_report(a, out),
        Command::Pipeline(a) => cmd_pipeline(a, out),
    }
}

fn say(out: &mut dyn Write, text: impl std::fmt::Display) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

/// A `--seed` flag wins over the environment.
fn seed_override(flag: Option<u64>) -> Result<Option<u64>> {
    match flag {
        Some(seed) => Ok(Some(seed)),
        None => env_seed(),
    }
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = crate::datagen::GenConfig {
        days: a.days,
        cadence_seconds: a.cadence,
        drop_rate: a.drop_rate,
        start_date: a.start,
        ..Default::default()
    };
    if let Some(seed) = seed_override(a.seed)? {
        cfg.seed = seed;
    }
    let records = generate(&cfg)?;
    write_csv(&records, &a.out)?;
    say(
        out,
        format_args!("wrote {} readings to {}", records.len(), a.out.display()),
    )
}

fn cmd_preprocess(a: PreprocessArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = crate::preprocess::PreprocessConfig {
        frame_duration_seconds: a.frame,
        k: a.classes,
        min_records_per_frame: a.min_records,
        start_date: a.start,
    };
    let records = parse_sensor_csv(&a.input)?;
    let db = build_database(&records, &cfg)?;
    write_database(&db, &a.out)?;
    say(
        out,
        format_args!(
            "wrote {} transactions over {} days to {}",
            db.n_transactions(),
            db.n_sequences(),
            a.out.display()
        ),
    )
}

/// Loads the configuration (if any) and applies flags and the environment.
fn resolve(flags: &MiningFlags) -> Result<PipelineConfig> {
    let mut cfg = match &flags.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = seed_override(flags.seed)? {
        cfg.set_seed(seed);
    }
    if let Some(algo) = flags.algo {
        cfg.algorithms = algo.algorithms();
    }
    let m = &mut cfg.miner;
    if let Some(v) = flags.fes {
        m.optimizer.max_fes = v;
    }
    if let Some(v) = flags.np {
        m.optimizer.population = v;
    }
    if let Some(v) = flags.runs {
        m.runs = v;
    }
    for (flag, weight) in [
        (flags.alpha, &mut m.weights.alpha),
        (flags.beta, &mut m.weights.beta),
        (flags.gamma, &mut m.weights.gamma),
        (flags.delta, &mut m.weights.delta),
    ] {
        if let Some(v) = flag {
            *weight = v;
        }
    }
    if let Some(v) = flags.s_min {
        m.s_min = v;
    }
    if let Some(v) = flags.c_min {
        m.c_min = v;
    }
    if let Some(v) = flags.max_len {
        m.decode.max_len = v;
    }
    if let Some(v) = flags.threshold_mode {
        m.decode.threshold_mode = match v {
            ModeChoice::Deterministic => ThresholdMode::Deterministic,
            ModeChoice::Stochastic => ThresholdMode::Stochastic,
        };
    }
    if let Some(v) = flags.counting {
        m.counting = match v {
            CountingChoice::Days => Counting::Days,
            CountingChoice::Transactions => Counting::Transactions,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Mines with every configured algorithm and writes `rules.csv`,
/// `rules.txt`, `report.txt` and `report.csv` into `dir`.
fn mine_into(
    db: &TransactionDatabase,
    cfg: &PipelineConfig,
    dir: &Path,
    out: &mut dyn Write,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let names = db.feature_names().to_vec();
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut means = Vec::new();
    let mut tables = String::new();
    for algorithm in cfg.algorithm_list() {
        let mut miner = cfg.miner.clone();
        miner.optimizer.algorithm = algorithm;
        let outcome = mine(db, &miner)?;
        records.extend(RuleRecord::from_outcome(&outcome, &names, db.k()));
        let algo_rows = ReportRow::for_outcome(&outcome);
        tables.push_str(&report_table(&algo_rows));
        tables.push('\n');
        means.extend(algo_rows.last().cloned());
        rows.extend(algo_rows);
    }
    if means.len() > 1 {
        tables.push_str(&report_table(&means));
    }

    write_rules_csv(&dir.join("rules.csv"), &records)?;
    write_rules_text(&dir.join("rules.txt"), &records)?;
    write_report_csv(&dir.join("report.csv"), &rows)?;
    let report_path = dir.join("report.txt");
    fs::write(&report_path, &tables).map_err(|e| Error::io(&report_path, e))?;
    write!(out, "{tables}").map_err(|e| Error::io("<stdout>", e))?;
    say(
        out,
        format_args!("wrote {} rules to {}", records.len(), dir.display()),
    )
}

fn cmd_mine(a: MineArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = resolve(&a.flags)?;
    let db = read_database(&a.input)?;
    mine_into(&db, &cfg, &a.out, out)
}

fn cmd_report(a: ReportArgs, out: &mut dyn Write) -> Result<()> {
    let records = read_rules_csv(&a.input)?;
    let mut rows = ReportRow::from_records(&records);
    if rows.is_empty() {
        rows.push(ReportRow {
            algorithm: "(none)".into(),
            run: None,
            report: Default::default(),
        });
    }
    write!(out, "{}", report_table(&rows)).map_err(|e| Error::io("<stdout>", e))?;
    if let Some(path) = a.csv {
        write_report_csv(&path, &rows)?;
    }
    Ok(())
}

fn cmd_pipeline(a: PipelineArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = resolve(&a.flags)?;
    let dir = a.out.or_else(|| cfg.output_dir.clone()).ok_or_else(|| {
        Error::config(
            "output_dir",
            "give --out or set output_dir in the configuration",
        )
    })?;
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let readings = generate(&cfg.generate)?;
    write_csv(&readings, dir.join("sensors.csv"))?;
    let db = build_database(&readings, &cfg.preprocess)?;
    write_database(&db, dir.join("transactions.csv"))?;
    say(
        out,
        format_args!(
            "{} readings -> {} transactions over {} days",
            readings.len(),
            db.n_transactions(),
            db.n_sequences()
        ),
    )?;
    mine_into(&db, &cfg, &dir, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn help_lists_algorithm_defaults() {
        let help = Cli::command()
            .find_subcommand_mut("mine")
            .unwrap()
            .render_long_help()
            .to_string();
        assert!(help.contains("F = 0.5, CR = 0.9"));
        assert!(help.contains("pm = 0.01, pc = 0.8"));
        assert!(help.contains("NP_init = 18·D"));
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(
            &path,
            "[miner]\nruns = 3\n[miner.optimizer]\nmax_fes = 700\nseed = 4\n",
        )
        .unwrap();
        let cli = Cli::try_parse_from(
            [
                "tsarm", "mine", "--in", "x.csv", "--out", "o", "--fes", "900", "--seed", "11",
                "--config",
            ]
            .into_iter()
            .map(OsString::from)
            .chain([path.into_os_string()]),
        )
        .unwrap();
        let Command::Mine(a) = cli.command else {
            unreachable!()
        };
        let cfg = resolve(&a.flags).unwrap();
        assert_eq!(cfg.miner.runs, 3);
        assert_eq!(cfg.miner.optimizer.max_fes, 900);
        assert_eq!(cfg.miner.optimizer.seed, 11);
    }

    #[test]
    fn unknown_algorithm_is_a_usage_error() {
        let err =
            Cli::try_parse_from(["tsarm", "mine", "--in", "a", "--out", "b", "--algo", "abc"])
                .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let text = err.to_string();
        for name in ["de", "ga", "pso", "lshade", "jde"] {
            assert!(text.contains(name), "{text}");
        }
    }
}
