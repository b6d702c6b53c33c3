//! Command-line front end.

mod convert;
mod pipeline;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use convert::{convert_official, Converted};
pub use pipeline::{
    analyze, borda_for, cover_for, load, oracle_row, run_pipeline, scenario_solvers, shapley_for, tradeoff_for,
    AnalysisConfig, DatasetSummary, PortfolioReport, Scenario, BOTH_UNSOLVED_NOTE,
};

use crate::error::{Error, Result, Stage};
use crate::mincover::DEFAULT_ENUMERATION_CAP;
use crate::numeric::{parse_decimal, Millis, Rational};
use crate::report::{self, Format, Rendered};
use crate::runstore::{self, Schema};
use crate::shapley::ShapleyMode;
use crate::tradeoff;

#[derive(Parser, Debug)]
#[command(name = "solverfolio", version, about = "Portfolio-based analysis of solver competition results")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a canonical dataset and optionally re-emit it
    Ingest(IngestArgs),
    /// Convert an external result table into the canonical layout
    Convert(ConvertArgs),
    /// Borda ranking under the pairwise scoring method
    Borda(CommonArgs),
    /// Participant-Oracle performance relative to the Oracle, per dataset
    Oracle(OracleArgs),
    /// Minimum portfolios reproducing the full portfolio's virtual best solver
    Mincover(MincoverArgs),
    /// Best portfolio for every size
    Tradeoff(TradeoffArgs),
    /// Shapley-value importance of each solver
    Shapley(ShapleyArgs),
    /// Full analysis bundle
    Report(ReportArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Canonical dataset file
    #[arg(long)]
    pub data: PathBuf,
    /// Output directory; results are printed when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Scenario::AllSolvers)]
    pub scenario: Scenario,
    /// Output formats: csv, text, json (repeatable or comma separated)
    #[arg(long, value_delimiter = ',')]
    pub format: Vec<Format>,
    /// Input field delimiter
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Args, Debug, Clone)]
pub struct IngestArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Directory receiving the canonical `dataset.csv`
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Args, Debug, Clone)]
pub struct ConvertArgs {
    /// External result table
    #[arg(long)]
    pub data: PathBuf,
    /// Column-mapping config (TOML)
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    /// Destination file for the canonical dataset; printed when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    /// One canonical dataset per competition track (repeatable)
    #[arg(long, required = true)]
    pub data: Vec<PathBuf>,
    /// Labels such as `2020_fd`, one per dataset; defaults to file stems
    #[arg(long)]
    pub label: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub format: Vec<Format>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Args, Debug, Clone)]
pub struct CoverArgs {
    /// Time tolerance in seconds when deciding ties with the best run
    #[arg(long, default_value = "0")]
    pub epsilon: String,
    /// Maximum number of optimal portfolios to enumerate
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
}

#[derive(Args, Debug, Clone)]
pub struct MincoverArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub cover: CoverArgs,
}

#[derive(Args, Debug, Clone)]
pub struct TradeoffArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub cover: CoverArgs,
    /// Search every scenario solver rather than the minimum portfolio
    #[arg(long)]
    pub search_all: bool,
    /// Performance levels for the threshold summary
    #[arg(long, value_delimiter = ',', default_value = "0.8,0.9,0.95")]
    pub levels: Vec<String>,
    /// Largest search space accepted
    #[arg(long, default_value_t = tradeoff::MAX_SEARCH_SPACE)]
    pub max_space: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    PaperSum,
    Sampled,
}

impl From<ModeArg> for ShapleyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => ShapleyMode::ExactWeighted,
            ModeArg::PaperSum => ShapleyMode::PaperUnweightedSum,
            ModeArg::Sampled => ShapleyMode::SampledPermutations,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ShapleyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub cover: CoverArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Attribute over every scenario solver rather than the minimum portfolio
    #[arg(long)]
    pub all_solvers: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ReportArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Scenario::AllSolvers)]
    pub scenario: Scenario,
    #[arg(long, value_delimiter = ',')]
    pub format: Vec<Format>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[command(flatten)]
    pub cover: CoverArgs,
    #[arg(long)]
    pub search_all: bool,
    #[arg(long, value_delimiter = ',', default_value = "0.8,0.9,0.95")]
    pub levels: Vec<String>,
    #[arg(long, default_value_t = tradeoff::MAX_SEARCH_SPACE)]
    pub max_space: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn formats(requested: &[Format], default: &[Format]) -> BTreeSet<Format> {
    if requested.is_empty() {
        default.iter().copied().collect()
    } else {
        requested.iter().copied().collect()
    }
}

fn epsilon(text: &str) -> Result<Millis> {
    Millis::parse_seconds(text).map_err(|e| Error::InvalidArgument(format!("epsilon `{text}`: {e}")))
}

fn levels(texts: &[String]) -> Result<Vec<Rational>> {
    let mut out: Vec<Rational> = texts
        .iter()
        .map(|t| {
            parse_decimal(t)
                .filter(|v| *v > Rational::from_integer(0.into()) && *v <= Rational::from_integer(1.into()))
                .ok_or_else(|| Error::InvalidArgument(format!("level `{t}` must lie in (0, 1]")))
        })
        .collect::<Result<_>>()?;
    out.sort();
    Ok(out)
}

/// Prints `rendered` or writes it to `out`.
fn emit(rendered: &Rendered, out: Option<&PathBuf>, formats: &BTreeSet<Format>) -> Result<()> {
    match out {
        Some(dir) => {
            let files = rendered.write_dir(dir, formats, b',').map_err(|e| e.at(Stage::Write))?;
            for f in files {
                eprintln!("wrote {}", f.display());
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(rendered.to_stdout_string(formats, b',').as_bytes())?;
        }
    }
    Ok(())
}

fn warn_all(warnings: &[runstore::IngestWarning]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let text_only = [Format::Text];
    match cli.command {
        Command::Ingest(args) => {
            let ingested = load(&args.data, args.delimiter)?;
            warn_all(&ingested.warnings);
            let summary = DatasetSummary::of(&ingested);
            println!(
                "{} solvers ({} participants), {} instances, {} runs ({} synthesized), {} warnings",
                summary.solvers,
                summary.participants,
                summary.instances,
                ingested.dataset.runs().len(),
                summary.synthesized_runs,
                summary.warnings.len()
            );
            if let Some(dir) = args.out {
                let text = runstore::canonical_string(&ingested.dataset);
                for f in report::write_files(&dir, &[("dataset.csv".into(), text)])? {
                    eprintln!("wrote {}", f.display());
                }
            }
        }
        Command::Convert(args) => {
            let mapping = match &args.mapping {
                Some(path) => Schema::from_path(path)?,
                None => Schema::default(),
            };
            let file = std::fs::File::open(&args.data)?;
            let converted = convert_official(std::io::BufReader::new(file), &mapping)?;
            warn_all(&converted.warnings);
            match args.out {
                Some(path) => std::fs::write(path, &converted.canonical)?,
                None => print!("{}", converted.canonical),
            }
        }
        Command::Borda(args) => {
            let ingested = load(&args.data, args.delimiter)?;
            warn_all(&ingested.warnings);
            let ds = &ingested.dataset;
            let solvers = scenario_solvers(ds, args.scenario)?;
            let matrix = borda_for(ds, &solvers)?;
            let section = report::borda_section(&matrix, ds, "borda", "Borda ranking");
            let rendered = Rendered::new("borda", vec![section], &matrix.ranking())?;
            emit(&rendered, args.out.as_ref(), &formats(&args.format, &text_only))?;
        }
        Command::Oracle(args) => {
            if !args.label.is_empty() && args.label.len() != args.data.len() {
                return Err(Error::InvalidArgument("give one --label per --data".into()));
            }
            let mut rows = Vec::new();
            for (k, path) in args.data.iter().enumerate() {
                let ingested = load(path, args.delimiter)?;
                warn_all(&ingested.warnings);
                let label = args.label.get(k).cloned().unwrap_or_else(|| {
                    path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset").to_string()
                });
                rows.push(oracle_row(&ingested.dataset, &label)?);
            }
            let rendered = Rendered::new("oracle", vec![report::oracle_section(&rows)], &rows)?;
            emit(&rendered, args.out.as_ref(), &formats(&args.format, &text_only))?;
        }
        Command::Mincover(args) => {
            let c = &args.common;
            let ingested = load(&c.data, c.delimiter)?;
            warn_all(&ingested.warnings);
            let ds = &ingested.dataset;
            let solvers = scenario_solvers(ds, c.scenario)?;
            let (coverage, solution) = cover_for(ds, &solvers, epsilon(&args.cover.epsilon)?, args.cover.cap)?;
            let sections = report::mincover_sections(&solution, ds, solvers.len());
            let exact = serde_json::json!({ "coverage": coverage, "solution": solution });
            let rendered = Rendered::new("mincover", sections, &exact)?;
            emit(&rendered, c.out.as_ref(), &formats(&c.format, &text_only))?;
        }
        Command::Tradeoff(args) => {
            let c = &args.common;
            let ingested = load(&c.data, c.delimiter)?;
            warn_all(&ingested.warnings);
            let ds = &ingested.dataset;
            let solvers = scenario_solvers(ds, c.scenario)?;
            let space = if args.search_all {
                solvers.clone()
            } else {
                cover_for(ds, &solvers, epsilon(&args.cover.epsilon)?, args.cover.cap)?.1.portfolios[0].clone()
            };
            let (curve, thresholds) = tradeoff_for(ds, &space, &solvers, args.max_space, &levels(&args.levels)?)?;
            let sections = report::tradeoff_sections(&curve, &thresholds);
            let exact = serde_json::json!({ "curve": curve, "thresholds": thresholds });
            let rendered = Rendered::new("tradeoff", sections, &exact)?;
            emit(&rendered, c.out.as_ref(), &formats(&c.format, &text_only))?;
        }
        Command::Shapley(args) => {
            let c = &args.common;
            let ingested = load(&c.data, c.delimiter)?;
            warn_all(&ingested.warnings);
            let ds = &ingested.dataset;
            let solvers = scenario_solvers(ds, c.scenario)?;
            let portfolio = if args.all_solvers {
                solvers.clone()
            } else {
                cover_for(ds, &solvers, epsilon(&args.cover.epsilon)?, args.cover.cap)?.1.portfolios[0].clone()
            };
            let attribution = shapley_for(ds, &portfolio, &solvers, args.mode.into(), args.samples, args.seed)?;
            let borda_all = borda_for(ds, &solvers)?;
            let borda_portfolio = borda_for(ds, &portfolio)?;
            let section = report::shapley_section(&attribution, Some(&borda_all), Some(&borda_portfolio));
            let rendered = Rendered::new("shapley", vec![section], &attribution)?;
            emit(&rendered, c.out.as_ref(), &formats(&c.format, &text_only))?;
        }
        Command::Report(args) => {
            let mut cfg = AnalysisConfig::new(&args.data, &args.out);
            cfg.delimiter = args.delimiter;
            cfg.scenario = args.scenario;
            cfg.epsilon = epsilon(&args.cover.epsilon)?;
            cfg.cover_cap = args.cover.cap;
            cfg.tradeoff_all = args.search_all;
            cfg.levels = levels(&args.levels)?;
            cfg.subset_guard = args.max_space;
            cfg.shapley_mode = args.mode.into();
            cfg.samples = args.samples;
            cfg.seed = args.seed;
            if !args.format.is_empty() {
                cfg.formats = args.format.iter().copied().collect();
            }
            let (report, files) = run_pipeline(&cfg)?;
            for w in &report.dataset.warnings {
                eprintln!("warning: {w}");
            }
            for f in files {
                eprintln!("wrote {}", f.display());
            }
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and maps the outcome to an exit code:
/// 0 on success, 1 on validation errors, 2 on internal errors.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
