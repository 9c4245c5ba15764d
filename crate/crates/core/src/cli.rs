//! Command-line front end. [`run`] returns the process exit code:
//! 0 success, 1 usage error, 2 input/parse error, 3 internal invariant
//! violation.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dataset::{
    generate_synthetic, load_genotype_matrix, load_transactions, write_transactions, TwoClassDataset, VerticalData,
};
use crate::error::Error;
use crate::measures::{association_pvalue, ContingencyTable, Thresholds};
use crate::miner::{mine, validate_records, MineStats, MinerConfig, PatternRecord};
use crate::oracle::mine_oracle;
use crate::output;

pub const THREADS_ENV: &str = "SSDPS_THREADS";

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ssdps", version, about = "Statistically significant discriminative pattern mining")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine significant discriminative closed patterns.
    Mine(MineArgs),
    /// Brute-force reference miner for small inputs (same flags as `mine`).
    Oracle(MineArgs),
    /// Generate a random two-class dataset in transaction format.
    Gen(GenArgs),
    /// Screen genotype items by association p-value and control support.
    FilterGenotypes(FilterArgs),
    /// Run the two pruning setups (ORS only, ORS + LCI_ORS) on a generated dataset.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Tct,
    Genotype,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct MineArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "tct")]
    format: InputFormat,
    /// Labels CSV for `--format genotype`.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    min_sd: Option<f64>,
    #[arg(long)]
    min_gr: Option<f64>,
    #[arg(long)]
    min_ors: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    min_lci_gr: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    min_lci_ors: Option<f64>,
    #[arg(long)]
    no_prune: bool,
    /// Worker threads (falls back to $SSDPS_THREADS). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    output_format: OutputFormat,
    /// Write run statistics as JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    cases: usize,
    #[arg(long)]
    controls: usize,
    #[arg(long)]
    items: usize,
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    max_pvalue: f64,
    #[arg(long)]
    max_control_support: f64,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 50)]
    cases: usize,
    #[arg(long, default_value_t = 50)]
    controls: usize,
    #[arg(long, default_value_t = 262)]
    items: usize,
    #[arg(long, default_value_t = 0.33)]
    density: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    min_ors: f64,
    #[arg(long, default_value_t = 2.0)]
    min_lci_ors: f64,
    #[arg(long)]
    threads: Option<usize>,
    /// Defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// A failure tagged with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn input(err: impl std::fmt::Display) -> Self {
        Self { code: EXIT_INPUT, message: err.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::InvalidConfig(_) | Error::InvalidDensity(_) | Error::TooLarge(_) => EXIT_USAGE,
            Error::Invariant(_) => EXIT_INVARIANT,
            _ => EXIT_INPUT,
        };
        Self { code, message: err.to_string() }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parse `args` (including the program name) and execute the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Mine(args) => cmd_mine(&args, false),
        Command::Oracle(args) => cmd_mine(&args, true),
        Command::Gen(args) => cmd_gen(&args),
        Command::FilterGenotypes(args) => cmd_filter_genotypes(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn open(path: &Path) -> std::result::Result<BufReader<File>, Failure> {
    File::open(path).map(BufReader::new).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn create(path: Option<&Path>) -> std::result::Result<Box<dyn Write>, Failure> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
    }
}

fn resolve_threads(flag: Option<usize>) -> std::result::Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            v.trim().parse().map(Some).map_err(|_| Failure::usage(format!("{THREADS_ENV}={v:?} is not a thread count")))
        }
        _ => Ok(None),
    }
}

fn load_input(args: &MineArgs) -> std::result::Result<TwoClassDataset, Failure> {
    match args.format {
        InputFormat::Tct => {
            let (data, warnings) = load_transactions(open(&args.input)?)?;
            for w in warnings {
                eprintln!("warning: {}: {w}", args.input.display());
            }
            Ok(data)
        }
        InputFormat::Genotype => {
            let labels = args.labels.as_ref().ok_or_else(|| Failure::usage("--format genotype needs --labels"))?;
            Ok(load_genotype_matrix(open(&args.input)?, open(labels)?)?)
        }
    }
}

fn write_patterns(
    records: &[PatternRecord],
    data: &TwoClassDataset,
    path: Option<&Path>,
    format: OutputFormat,
) -> CmdResult {
    let rows = output::rows(records, data);
    let mut out = create(path)?;
    match format {
        OutputFormat::Csv => output::write_csv(&rows, &mut out)?,
        OutputFormat::Json => output::write_json(&rows, &mut out)?,
    }
    out.flush().map_err(Failure::input)
}

fn cmd_mine(args: &MineArgs, use_oracle: bool) -> CmdResult {
    let thresholds = Thresholds {
        min_sd: args.min_sd,
        min_gr: args.min_gr,
        min_ors: args.min_ors,
        min_lci_gr: args.min_lci_gr,
        min_lci_ors: args.min_lci_ors,
    };
    let cfg = MinerConfig { thresholds, prune: !args.no_prune, threads: resolve_threads(args.threads)? };
    cfg.validate()?;
    let data = load_input(args)?;

    let (records, stats) = if use_oracle {
        let start = std::time::Instant::now();
        let records = mine_oracle(&data, &cfg)?;
        let stats =
            MineStats { patterns_emitted: records.len() as u64, wall_time: start.elapsed(), ..Default::default() };
        (records, stats)
    } else {
        mine(&data, &cfg)?
    };
    validate_records(&data, &cfg.thresholds, &records)?;
    eprintln!(
        "{} patterns, {} nodes visited, {} pruned, {:.3}s",
        stats.patterns_emitted,
        stats.nodes_visited,
        stats.nodes_pruned,
        stats.wall_time.as_secs_f64()
    );

    write_patterns(&records, &data, args.output.as_deref(), args.output_format)?;
    if let Some(path) = &args.stats {
        let mut out = create(Some(path))?;
        serde_json::to_writer_pretty(&mut out, &stats).map_err(Failure::input)?;
        writeln!(out).and_then(|_| out.flush()).map_err(Failure::input)?;
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> CmdResult {
    let data = generate_synthetic(args.cases, args.controls, args.items, args.density, args.seed)?;
    let mut out = create(args.output.as_deref())?;
    write_transactions(&data, &mut out)?;
    out.flush().map_err(Failure::input)
}

/// Per-item outcome of the genotype screen.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenotypeFilterEntry {
    pub item: String,
    pub case_count: usize,
    pub control_count: usize,
    pub p_value: f64,
    pub control_support: f64,
    pub kept: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenotypeFilterReport {
    pub entries: Vec<GenotypeFilterEntry>,
}

impl GenotypeFilterReport {
    pub fn kept(&self) -> usize {
        self.entries.iter().filter(|e| e.kept).count()
    }

    pub fn dropped(&self) -> usize {
        self.entries.len() - self.kept()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> crate::error::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["item", "case_count", "control_count", "p_value", "control_support", "kept"])?;
        for e in &self.entries {
            w.write_record([
                e.item.clone(),
                e.case_count.to_string(),
                e.control_count.to_string(),
                output::format_number(e.p_value),
                output::format_number(e.control_support),
                e.kept.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Keep items with `p_value ≤ max_pvalue` and `control_support ≤
/// max_control_support`; returns the dataset restricted to those items.
pub fn filter_items(
    data: &TwoClassDataset,
    max_pvalue: f64,
    max_control_support: f64,
) -> crate::error::Result<(TwoClassDataset, GenotypeFilterReport)> {
    data.check_minable()?;
    let mut report = GenotypeFilterReport::default();
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for (i, name) in data.items().iter().enumerate() {
        let row = data.row(i);
        let a = row.count_in(data.case_tids());
        let c = row.count_in(data.control_tids());
        let table = ContingencyTable::from_presence(a, data.n_case(), c, data.n_control());
        let p_value = association_pvalue(&table);
        let control_support = c as f64 / data.n_control() as f64;
        let kept = p_value <= max_pvalue && control_support <= max_control_support;
        if kept {
            items.push(name.clone());
            rows.push(row.clone());
        }
        report.entries.push(GenotypeFilterEntry {
            item: name.clone(),
            case_count: a,
            control_count: c,
            p_value,
            control_support,
            kept,
        });
    }
    let filtered = TwoClassDataset::new(items, data.n_case(), data.n_control(), rows, data.external_ids().to_vec())?;
    Ok((filtered, report))
}

fn cmd_filter_genotypes(args: &FilterArgs) -> CmdResult {
    for (flag, v) in [("--max-pvalue", args.max_pvalue), ("--max-control-support", args.max_control_support)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Failure::usage(format!("{flag} must be in [0, 1], got {v}")));
        }
    }
    let data = load_genotype_matrix(open(&args.input)?, open(&args.labels)?)?;
    let (filtered, report) = filter_items(&data, args.max_pvalue, args.max_control_support)?;
    eprintln!("kept {} of {} genotype items ({} dropped)", report.kept(), report.entries.len(), report.dropped());

    let mut out = create(Some(&args.output))?;
    write_transactions(&filtered, &mut out)?;
    out.flush().map_err(Failure::input)?;
    let mut rep = create(Some(&args.report))?;
    report.write_csv(&mut rep)?;
    rep.flush().map_err(Failure::input)
}

#[derive(Debug, Serialize)]
struct BenchRun {
    setup: &'static str,
    thresholds: Thresholds,
    stats: MineStats,
}

fn cmd_bench(args: &BenchArgs) -> CmdResult {
    let data = generate_synthetic(args.cases, args.controls, args.items, args.density, args.seed)?;
    let threads = resolve_threads(args.threads)?;
    let setups = [
        ("ors", Thresholds { min_ors: Some(args.min_ors), ..Default::default() }),
        (
            "ors+lci_ors",
            Thresholds { min_ors: Some(args.min_ors), min_lci_ors: Some(args.min_lci_ors), ..Default::default() },
        ),
    ];
    let mut runs = Vec::new();
    for (setup, thresholds) in setups {
        let cfg = MinerConfig { thresholds, prune: true, threads };
        let (_, stats) = mine(&data, &cfg)?;
        eprintln!(
            "{setup}: {} patterns, {} nodes, {:.3}s",
            stats.patterns_emitted,
            stats.nodes_visited,
            stats.wall_time.as_secs_f64()
        );
        runs.push(BenchRun { setup, thresholds, stats });
    }
    let mut out = create(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &runs).map_err(Failure::input)?;
    writeln!(out).and_then(|_| out.flush()).map_err(Failure::input)
}
