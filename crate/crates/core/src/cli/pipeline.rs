//! The three-step analysis: minimum portfolios, size trade-offs, Shapley
//! importance, preceded by the Borda ranking and oracle comparison.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result, Stage};
use crate::mincover::{self, CoverSolution, CoverageMap};
use crate::numeric::{Millis, Rational};
use crate::pairscore::{self, RankEntry, ScoreMatrix};
use crate::portfolio;
use crate::report::{self, Format, OracleRow, Rendered, Section};
use crate::runstore::{self, Dataset, Ingested, Schema, SolverSet};
use crate::shapley::{self, AttributionReport, ShapleyMode};
use crate::tradeoff::{self, Threshold, TradeoffCurve};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum Scenario {
    /// Only solvers flagged as competition participants.
    #[value(name = "participants")]
    ParticipantsOnly,
    /// Participants and non-participants together.
    #[default]
    #[value(name = "all")]
    AllSolvers,
}

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub data: PathBuf,
    pub delimiter: char,
    pub scenario: Scenario,
    pub epsilon: Millis,
    pub cover_cap: usize,
    /// Largest trade-off search space accepted.
    pub subset_guard: usize,
    /// Search the whole scenario solver set instead of the minimum portfolio.
    pub tradeoff_all: bool,
    pub levels: Vec<Rational>,
    pub shapley_mode: ShapleyMode,
    pub samples: u64,
    pub seed: u64,
    pub out: PathBuf,
    pub formats: BTreeSet<Format>,
}

impl AnalysisConfig {
    pub fn new(data: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        AnalysisConfig {
            data: data.into(),
            delimiter: ',',
            scenario: Scenario::AllSolvers,
            epsilon: Millis::ZERO,
            cover_cap: mincover::DEFAULT_ENUMERATION_CAP,
            subset_guard: tradeoff::MAX_SEARCH_SPACE,
            tradeoff_all: false,
            levels: tradeoff::default_levels(),
            shapley_mode: ShapleyMode::ExactWeighted,
            samples: 10_000,
            seed: 0,
            out: out.into(),
            formats: [Format::Delimited, Format::Text, Format::Json].into_iter().collect(),
        }
    }
}

pub fn load(path: &Path, delimiter: char) -> Result<Ingested> {
    runstore::ingest_path(path, &Schema::canonical(delimiter)).map_err(|e| e.at(Stage::Ingest))
}

/// Solvers taking part in the analysis under `scenario`.
pub fn scenario_solvers(ds: &Dataset, scenario: Scenario) -> Result<SolverSet> {
    let solvers = match scenario {
        Scenario::ParticipantsOnly => ds.participants(),
        Scenario::AllSolvers => ds.solver_ids(),
    };
    if solvers.is_empty() && scenario == Scenario::ParticipantsOnly {
        return Err(Error::InvalidArgument("dataset has no participating solvers".into()).at(Stage::Filter));
    }
    Ok(solvers)
}

pub fn borda_for(ds: &Dataset, solvers: &SolverSet) -> Result<ScoreMatrix> {
    let restricted = ds.filter(solvers).map_err(|e| e.at(Stage::Filter))?;
    pairscore::borda(&restricted).map_err(|e| e.at(Stage::Borda))
}

/// Splits a label like `2020_fd` into year and track.
fn split_label(label: &str) -> (String, String) {
    match label.split_once(['_', '-', '/']) {
        Some((year, track)) if !year.is_empty() && year.bytes().all(|b| b.is_ascii_digit()) => {
            (year.to_string(), track.to_string())
        }
        _ => (String::new(), label.to_string()),
    }
}

/// Participant-Oracle performance relative to the Oracle.
pub fn oracle_row(ds: &Dataset, label: &str) -> Result<OracleRow> {
    let all = ds.solver_ids();
    let participants = ds.participants();
    let ratio = portfolio::perf(ds, &participants, &all).map_err(|e| e.at(Stage::Oracle))?;
    let (year, track) = split_label(label);
    Ok(OracleRow {
        label: label.to_string(),
        year,
        track,
        participants: participants.len(),
        solvers: all.len(),
        ratio,
    })
}

pub fn cover_for(ds: &Dataset, solvers: &SolverSet, epsilon: Millis, cap: usize) -> Result<(CoverageMap, CoverSolution)> {
    let coverage = mincover::build_coverage(ds, solvers, epsilon).map_err(|e| e.at(Stage::MinCover))?;
    let solution = mincover::min_cover(&coverage, cap).map_err(|e| e.at(Stage::MinCover))?;
    Ok((coverage, solution))
}

pub fn tradeoff_for(
    ds: &Dataset,
    space: &SolverSet,
    baseline: &SolverSet,
    guard: usize,
    levels: &[Rational],
) -> Result<(TradeoffCurve, Vec<Threshold>)> {
    if space.len() > guard {
        return Err(Error::TooLarge { what: "search space", size: space.len(), limit: guard }.at(Stage::Tradeoff));
    }
    let curve = tradeoff::best_subsets(ds, space, baseline).map_err(|e| e.at(Stage::Tradeoff))?;
    let levels = tradeoff::thresholds(&curve, levels);
    Ok((curve, levels))
}

pub fn shapley_for(
    ds: &Dataset,
    portfolio: &SolverSet,
    baseline: &SolverSet,
    mode: ShapleyMode,
    samples: u64,
    seed: u64,
) -> Result<AttributionReport> {
    let result = match mode {
        ShapleyMode::SampledPermutations => shapley::shapley_sampled(ds, portfolio, baseline, samples, seed),
        exact => shapley::shapley_exact(ds, portfolio, baseline, exact),
    };
    result.map_err(|e| e.at(Stage::Shapley))
}

#[derive(Clone, Debug, Serialize)]
pub struct DatasetSummary {
    pub solvers: usize,
    pub participants: usize,
    pub instances: usize,
    pub synthesized_runs: usize,
    pub warnings: Vec<String>,
}

impl DatasetSummary {
    pub fn of(ingested: &Ingested) -> Self {
        let ds = &ingested.dataset;
        DatasetSummary {
            solvers: ds.solvers().len(),
            participants: ds.participants().len(),
            instances: ds.instances().len(),
            synthesized_runs: ingested.synthesized,
            warnings: ingested.warnings.iter().map(ToString::to_string).collect(),
        }
    }
}

/// Everything the pipeline computes for one dataset.
#[derive(Clone, Debug, Serialize)]
pub struct PortfolioReport {
    pub scenario: Scenario,
    pub dataset: DatasetSummary,
    pub borda: Vec<RankEntry>,
    pub oracle: OracleRow,
    pub unsolved_instances: Vec<String>,
    pub mincover: CoverSolution,
    /// Minimum portfolio carried into the later steps (first optimum).
    pub chosen: SolverSet,
    pub scenario_solvers: SolverSet,
    pub tradeoff: TradeoffCurve,
    pub thresholds: Vec<Threshold>,
    pub shapley: AttributionReport,
    pub borda_chosen: Vec<RankEntry>,
    pub notes: Vec<String>,
}

pub const BOTH_UNSOLVED_NOTE: &str =
    "instances unsolved by both compared portfolios contribute 1/2 to each side of a performance ratio";

/// Runs every stage and writes the report bundle into `cfg.out`.
///
/// Nothing is written unless every stage succeeds.
pub fn run_pipeline(cfg: &AnalysisConfig) -> Result<(PortfolioReport, Vec<PathBuf>)> {
    let (report, rendered) = analyze(cfg)?;
    let files = rendered.write_dir(&cfg.out, &cfg.formats, b',').map_err(|e| e.at(Stage::Write))?;
    Ok((report, files))
}

/// Runs every stage in memory.
pub fn analyze(cfg: &AnalysisConfig) -> Result<(PortfolioReport, Rendered)> {
    let ingested = load(&cfg.data, cfg.delimiter)?;
    let ds = &ingested.dataset;
    let solvers = scenario_solvers(ds, cfg.scenario)?;
    let borda = borda_for(ds, &solvers)?;
    let label = cfg.data.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    let oracle = oracle_row(ds, label)?;
    let (coverage, cover) = cover_for(ds, &solvers, cfg.epsilon, cfg.cover_cap)?;
    let chosen = cover.portfolios[0].clone();

    let space = if cfg.tradeoff_all { solvers.clone() } else { chosen.clone() };
    let (curve, thresholds) = tradeoff_for(ds, &space, &solvers, cfg.subset_guard, &cfg.levels)?;
    let shapley = shapley_for(ds, &chosen, &solvers, cfg.shapley_mode, cfg.samples, cfg.seed)?;
    let borda_chosen = borda_for(ds, &chosen)?;

    let mut sections: Vec<Section> = Vec::new();
    sections.push(report::borda_section(&borda, ds, "borda", "Borda ranking"));
    sections.push(report::oracle_section(std::slice::from_ref(&oracle)));
    sections.extend(report::mincover_sections(&cover, ds, solvers.len()));
    sections.extend(report::tradeoff_sections(&curve, &thresholds));
    sections.push(report::shapley_section(&shapley, Some(&borda), Some(&borda_chosen)));

    let report = PortfolioReport {
        scenario: cfg.scenario,
        dataset: DatasetSummary::of(&ingested),
        borda: borda.ranking(),
        oracle,
        unsolved_instances: coverage.unsolved,
        mincover: cover,
        chosen,
        scenario_solvers: solvers,
        tradeoff: curve,
        thresholds,
        shapley,
        borda_chosen: borda_chosen.ranking(),
        notes: vec![BOTH_UNSOLVED_NOTE.to_string()],
    };
    let rendered = Rendered::new("report", sections, &report)?;
    Ok((report, rendered))
}
