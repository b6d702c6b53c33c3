//! Tables and output bundles.
//!
//! Every analysis renders into [`Section`]s. A section becomes a delimited
//! file, a block of aligned text, or both; the exact values travel in a JSON
//! sidecar alongside.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mincover::CoverSolution;
use crate::numeric::{format6, format_percent, int, Rational};
use crate::pairscore::ScoreMatrix;
use crate::portfolio::PerfRatio;
use crate::runstore::{Dataset, SolverSet};
use crate::shapley::AttributionReport;
use crate::tradeoff::{Threshold, TradeoffCurve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Format {
    Delimited,
    Text,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" | "delimited" => Ok(Format::Delimited),
            "text" | "txt" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv, text or json)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(headers: I) -> Self {
        Table { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = S>, S: Into<String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }

    pub fn to_delimited(&self, delimiter: u8) -> String {
        let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(Vec::new());
        writer.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory write")).expect("UTF-8")
    }

    /// Space-padded columns; numeric-looking cells are right-aligned.
    pub fn to_aligned(&self) -> String {
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|c| {
                self.rows
                    .iter()
                    .filter_map(|r| r.get(c))
                    .chain(std::iter::once(&self.headers[c]))
                    .map(|s| s.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let numeric = |s: &str| !s.is_empty() && s.trim_end_matches('%').parse::<f64>().is_ok();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(cell, &w)| if numeric(cell) { format!("{cell:>w$}") } else { format!("{cell:<w$}") })
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.headers);
        out.push('\n');
        out.push_str(&widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("  "));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    /// File stem for the delimited output.
    pub name: String,
    pub title: String,
    pub table: Table,
}

/// A set of sections plus the exact values behind them.
#[derive(Clone, Debug)]
pub struct Rendered {
    pub stem: String,
    pub sections: Vec<Section>,
    pub json: serde_json::Value,
}

impl Rendered {
    pub fn new(stem: &str, sections: Vec<Section>, exact: &impl Serialize) -> Result<Self> {
        Ok(Rendered { stem: stem.to_string(), sections, json: serde_json::to_value(exact)? })
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("{}\n\n{}", s.title, s.table.to_aligned()));
        }
        out
    }

    pub fn json_text(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
        text.push('\n');
        text
    }

    /// Everything in `formats`, for printing.
    pub fn to_stdout_string(&self, formats: &BTreeSet<Format>, delimiter: u8) -> String {
        let mut parts = Vec::new();
        if formats.contains(&Format::Text) {
            parts.push(self.text());
        }
        if formats.contains(&Format::Delimited) {
            for s in &self.sections {
                parts.push(format!("# {}\n{}", s.name, s.table.to_delimited(delimiter)));
            }
        }
        if formats.contains(&Format::Json) {
            parts.push(self.json_text());
        }
        parts.join("\n")
    }

    /// Files this bundle writes, with their contents.
    pub fn files(&self, formats: &BTreeSet<Format>, delimiter: u8) -> Vec<(String, String)> {
        let mut files = Vec::new();
        if formats.contains(&Format::Delimited) {
            for s in &self.sections {
                files.push((format!("{}.csv", s.name), s.table.to_delimited(delimiter)));
            }
        }
        if formats.contains(&Format::Text) {
            files.push((format!("{}.txt", self.stem), self.text()));
        }
        if formats.contains(&Format::Json) {
            files.push((format!("{}.json", self.stem), self.json_text()));
        }
        files
    }

    /// Writes the bundle into `dir`. On failure, files written so far are removed.
    pub fn write_dir(&self, dir: &Path, formats: &BTreeSet<Format>, delimiter: u8) -> Result<Vec<PathBuf>> {
        write_files(dir, &self.files(formats, delimiter))
    }
}

pub fn write_files(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, content) in files {
        let path = dir.join(name);
        let result = fs::File::create(&path).and_then(|mut f| f.write_all(content.as_bytes()));
        if let Err(e) = result {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            let _ = fs::remove_file(&path);
            return Err(Error::Io(e));
        }
        written.push(path);
    }
    Ok(written)
}

fn participant_tag(ds: &Dataset, solver: &str) -> &'static str {
    match ds.solver(solver) {
        Some(s) if s.participant => "participant",
        Some(_) => "non-participant",
        None => "",
    }
}

fn join_members(set: &SolverSet) -> String {
    set.iter().cloned().collect::<Vec<_>>().join(" ")
}

pub fn borda_section(matrix: &ScoreMatrix, ds: &Dataset, name: &str, title: &str) -> Section {
    let mut table = Table::new(["rank", "solver", "participant", "total", "average"]);
    for entry in matrix.ranking() {
        table.push([
            entry.rank.to_string(),
            entry.solver.clone(),
            participant_tag(ds, &entry.solver).to_string(),
            format6(&entry.total),
            format6(&entry.average),
        ]);
    }
    Section { name: name.to_string(), title: title.to_string(), table }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleRow {
    pub label: String,
    pub year: String,
    pub track: String,
    pub participants: usize,
    pub solvers: usize,
    pub ratio: PerfRatio,
}

pub fn oracle_section(rows: &[OracleRow]) -> Section {
    let mut table = Table::new(["year", "track", "participants", "solvers", "ratio", "percent"]);
    for row in rows {
        table.push([
            row.year.clone(),
            row.track.clone(),
            row.participants.to_string(),
            row.solvers.to_string(),
            format6(&row.ratio.value),
            format_percent(&row.ratio.value),
        ]);
    }
    Section {
        name: "oracle".into(),
        title: "Participant-Oracle performance relative to the Oracle".into(),
        table,
    }
}

pub fn mincover_sections(solution: &CoverSolution, ds: &Dataset, portfolio_size: usize) -> Vec<Section> {
    let size = solution.size();
    let mut summary = Table::new(["min_size", "portfolio_size", "proportion", "optima", "unique", "truncated"]);
    let proportion = if portfolio_size == 0 {
        Rational::from_integer(0.into())
    } else {
        Rational::new((size as i64).into(), (portfolio_size as i64).into())
    };
    summary.push([
        size.to_string(),
        portfolio_size.to_string(),
        format6(&proportion),
        solution.portfolios.len().to_string(),
        solution.is_unique.to_string(),
        solution.truncated.to_string(),
    ]);

    let mut members = Table::new(["optimum", "solver", "participant"]);
    let mut tags = Table::new(["optimum", "participants", "non_participants"]);
    for (i, portfolio) in solution.portfolios.iter().enumerate() {
        let mut counts = (0, 0);
        for solver in portfolio {
            let tag = participant_tag(ds, solver);
            if tag == "participant" {
                counts.0 += 1;
            } else {
                counts.1 += 1;
            }
            members.push([(i + 1).to_string(), solver.clone(), tag.to_string()]);
        }
        tags.push([(i + 1).to_string(), counts.0.to_string(), counts.1.to_string()]);
    }
    vec![
        Section { name: "mincover_summary".into(), title: "Minimum oracle-equivalent portfolio".into(), table: summary },
        Section { name: "mincover_composition".into(), title: "Participants per optimum".into(), table: tags },
        Section { name: "mincover".into(), title: "Members of each optimum".into(), table: members },
    ]
}

pub fn tradeoff_sections(curve: &TradeoffCurve, levels: &[Threshold]) -> Vec<Section> {
    let mut table = Table::new(["k", "perf", "percent", "subset"]);
    for e in &curve.entries {
        table.push([
            e.k.to_string(),
            format6(&e.perf.value),
            format_percent(&e.perf.value),
            join_members(&e.best_subset),
        ]);
    }
    let space = curve.search_space.len() as i64;
    let mut thresholds = Table::new(["level", "k", "proportion"]);
    for t in levels {
        let (k, proportion) = match t.k {
            Some(k) => (k.to_string(), format6(&Rational::new((k as i64).into(), space.max(1).into()))),
            None => (String::new(), String::new()),
        };
        thresholds.push([format_percent(&t.level), k, proportion]);
    }
    vec![
        Section { name: "tradeoff".into(), title: "Best portfolio per size".into(), table },
        Section { name: "thresholds".into(), title: "Smallest size reaching each level".into(), table: thresholds },
    ]
}

/// Shapley values beside Borda averages computed over two solver pools.
pub fn shapley_section(
    report: &AttributionReport,
    borda_all: Option<&ScoreMatrix>,
    borda_portfolio: Option<&ScoreMatrix>,
) -> Section {
    let mut headers = vec!["solver".to_string(), "shapley".to_string()];
    if borda_all.is_some() {
        headers.push("borda_avg_all".into());
    }
    if borda_portfolio.is_some() {
        headers.push("borda_avg_portfolio".into());
    }
    let mut table = Table { headers, rows: Vec::new() };
    let mut order: Vec<(&String, &Rational)> = report.values.iter().collect();
    order.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    for (solver, value) in order {
        let mut row = vec![solver.clone(), format6(value)];
        for m in [borda_all, borda_portfolio].into_iter().flatten() {
            row.push(m.average(solver).map(format6).unwrap_or_default());
        }
        table.rows.push(row);
    }
    let mut title = format!("Shapley values ({})", report.mode);
    if let Some(n) = report.sample_count {
        title.push_str(&format!(", {n} samples"));
    }
    Section { name: "shapley".into(), title, table }
}

/// Proportion `part / whole` as an exact rational, 0 when `whole` is 0.
pub fn proportion(part: usize, whole: usize) -> Rational {
    if whole == 0 {
        int(0)
    } else {
        Rational::new((part as i64).into(), (whole as i64).into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_table_layout() {
        let mut t = Table::new(["solver", "total"]);
        t.push(["a", "1.75"]);
        t.push(["bbbbbbb", "0"]);
        assert_eq!(t.to_aligned(), "solver   total\n-------  -----\na         1.75\nbbbbbbb      0\n");
    }

    #[test]
    fn delimited_quotes_when_needed() {
        let mut t = Table::new(["k", "subset"]);
        t.push(["2", "a,b"]);
        assert_eq!(t.to_delimited(b','), "k,subset\n2,\"a,b\"\n");
    }

    #[test]
    fn format_names() {
        assert_eq!("CSV".parse::<Format>(), Ok(Format::Delimited));
        assert!("xml".parse::<Format>().is_err());
    }
}
