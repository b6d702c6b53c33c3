//! Reading result tables into a [`Dataset`] and writing the canonical form.
//!
//! The canonical layout is a header-bearing delimited file with the columns
//! `solver,instance,kind,status,time,objective,participant,timeout`. A
//! [`Schema`] maps other layouts (published competition tables, for one) onto
//! those columns.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use super::model::{Dataset, DatasetBuilder, Ingested, ProblemKind, Status, WarningKind};
use crate::error::{Error, RecordError, Result};
use crate::numeric::{parse_decimal, to_exact_decimal, Millis, TimeParseError};

pub const CANONICAL_COLUMNS: [&str; 8] =
    ["solver", "instance", "kind", "status", "time", "objective", "participant", "timeout"];

/// A column reference: one source column, or several joined with `/`.
#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum ColumnSpec {
    Single(String),
    Joined(Vec<String>),
}

impl ColumnSpec {
    fn names(&self) -> Vec<&str> {
        match self {
            ColumnSpec::Single(name) => vec![name.as_str()],
            ColumnSpec::Joined(names) => names.iter().map(String::as_str).collect(),
        }
    }
}

fn col(name: &str) -> Option<ColumnSpec> {
    Some(ColumnSpec::Single(name.to_string()))
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(default, deny_unknown_fields)]
pub struct Columns {
    pub solver: Option<ColumnSpec>,
    pub instance: Option<ColumnSpec>,
    pub kind: Option<ColumnSpec>,
    pub status: Option<ColumnSpec>,
    pub time: Option<ColumnSpec>,
    pub objective: Option<ColumnSpec>,
    pub participant: Option<ColumnSpec>,
    pub timeout: Option<ColumnSpec>,
}

impl Default for Columns {
    fn default() -> Self {
        Columns {
            solver: col("solver"),
            instance: col("instance"),
            kind: col("kind"),
            status: col("status"),
            time: col("time"),
            objective: col("objective"),
            participant: col("participant"),
            timeout: col("timeout"),
        }
    }
}

/// Values used when the source table lacks a column.
#[derive(Clone, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(default, deny_unknown_fields)]
pub struct Defaults {
    pub kind: Option<String>,
    /// Seconds, as decimal text.
    pub timeout: Option<String>,
    pub participant: Option<bool>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    #[default]
    Seconds,
    Milliseconds,
}

/// Column mapping from an external table layout to the canonical schema.
///
/// ```toml
/// delimiter = ","
/// erroneous = ["ERR"]
/// [columns]
/// instance = ["problem", "data"]
/// [status_map]
/// SC = "COMPLETE"
/// S = "INCOMPLETE"
/// UNK = "UNSOLVED"
/// ```
#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(default, deny_unknown_fields)]
pub struct Schema {
    pub delimiter: char,
    pub columns: Columns,
    pub defaults: Defaults,
    /// Source status token to canonical token, matched case-insensitively.
    pub status_map: BTreeMap<String, String>,
    pub kind_map: BTreeMap<String, String>,
    /// Status tokens marking wrong answers; mapped to UNSOLVED with a warning.
    pub erroneous: Vec<String>,
    /// Treat INCOMPLETE on a decision instance as COMPLETE instead of failing.
    pub promote_decision_incomplete: bool,
    pub time_unit: TimeUnit,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            delimiter: ',',
            columns: Columns::default(),
            defaults: Defaults::default(),
            status_map: BTreeMap::new(),
            kind_map: BTreeMap::new(),
            erroneous: Vec::new(),
            promote_decision_incomplete: false,
            time_unit: TimeUnit::Seconds,
        }
    }
}

impl Schema {
    /// The canonical layout with a custom delimiter.
    pub fn canonical(delimiter: char) -> Self {
        Schema { delimiter, ..Schema::default() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let schema: Schema = toml::from_str(text).map_err(|e| Error::Mapping(e.to_string()))?;
        if !schema.delimiter.is_ascii() {
            return Err(Error::Mapping("delimiter must be a single ASCII character".into()));
        }
        Ok(schema)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Schema::from_toml(&std::fs::read_to_string(path)?)
    }

    fn lookup<'a>(map: &'a BTreeMap<String, String>, token: &str) -> Option<&'a str> {
        map.iter().find(|(k, _)| k.eq_ignore_ascii_case(token)).map(|(_, v)| v.as_str())
    }
}

/// Resolved column positions for one header row.
struct Layout {
    solver: Vec<usize>,
    instance: Vec<usize>,
    kind: Option<Vec<usize>>,
    status: Vec<usize>,
    time: Vec<usize>,
    objective: Option<Vec<usize>>,
    participant: Option<Vec<usize>>,
    timeout: Option<Vec<usize>>,
}

impl Layout {
    fn resolve(schema: &Schema, header: &csv::StringRecord) -> Result<Layout> {
        let positions: HashMap<&str, usize> =
            header.iter().enumerate().map(|(i, h)| (h.trim(), i)).collect();
        let find = |field: &str, spec: &Option<ColumnSpec>| -> Result<Option<Vec<usize>>> {
            let Some(spec) = spec else { return Ok(None) };
            spec.names()
                .into_iter()
                .map(|name| {
                    positions.get(name).copied().ok_or_else(|| {
                        Error::Mapping(format!("column `{name}` for `{field}` not found in header"))
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map(Some)
        };
        let required = |field: &str, spec: &Option<ColumnSpec>| -> Result<Vec<usize>> {
            find(field, spec)?
                .ok_or_else(|| Error::Mapping(format!("required column `{field}` is not mapped")))
        };
        let optional = |field: &str, spec: &Option<ColumnSpec>, has_default: bool| -> Result<Option<Vec<usize>>> {
            // a mapped column that is absent is fine when a default exists
            match find(field, spec) {
                Err(_) if has_default => Ok(None),
                other => other,
            }
        };

        let c = &schema.columns;
        let layout = Layout {
            solver: required("solver", &c.solver)?,
            instance: required("instance", &c.instance)?,
            kind: optional("kind", &c.kind, schema.defaults.kind.is_some())?,
            status: required("status", &c.status)?,
            time: required("time", &c.time)?,
            objective: optional("objective", &c.objective, true)?,
            participant: optional("participant", &c.participant, true)?,
            timeout: optional("timeout", &c.timeout, schema.defaults.timeout.is_some())?,
        };
        if layout.kind.is_none() && schema.defaults.kind.is_none() {
            return Err(Error::Mapping("required column `kind` is not mapped".into()));
        }
        if layout.timeout.is_none() && schema.defaults.timeout.is_none() {
            return Err(Error::Mapping("required column `timeout` is not mapped".into()));
        }
        Ok(layout)
    }
}

fn cell(record: &csv::StringRecord, cols: &[usize]) -> String {
    cols.iter()
        .map(|&i| record.get(i).unwrap_or("").trim())
        .collect::<Vec<_>>()
        .join("/")
}

fn parse_time(text: &str, unit: TimeUnit, column: &'static str) -> Result<Millis, RecordError> {
    let parsed = match unit {
        TimeUnit::Seconds => Millis::parse_seconds(text),
        TimeUnit::Milliseconds => Millis::parse_millis(text),
    };
    parsed.map_err(|e| match e {
        TimeParseError::Negative => RecordError::NegativeTime(text.to_string()),
        _ => RecordError::InvalidNumber { column, value: text.to_string() },
    })
}

fn parse_participant(text: &str) -> Result<bool, RecordError> {
    match text.to_ascii_lowercase().as_str() {
        "true" | "t" | "yes" | "y" | "1" => Ok(true),
        "false" | "f" | "no" | "n" | "0" => Ok(false),
        _ => Err(RecordError::InvalidParticipant(text.to_string())),
    }
}

/// Reads a delimited result table.
///
/// Missing (solver, instance) pairs are filled in as UNSOLVED; duplicate pairs,
/// unknown kinds or statuses, negative times and malformed rows fail with the
/// offending line number.
pub fn ingest<R: Read>(source: R, schema: &Schema) -> Result<Ingested> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter as u8)
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    let header = reader.headers()?.clone();
    let layout = Layout::resolve(schema, &header)?;

    let default_kind = schema.defaults.kind.as_deref();
    let default_timeout = match &schema.defaults.timeout {
        Some(t) => Some(
            Millis::parse_seconds(t).map_err(|_| Error::Mapping(format!("invalid default timeout `{t}`")))?,
        ),
        None => None,
    };

    let mut builder = DatasetBuilder::new();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                return Err(match e.kind() {
                    csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Malformed {
                        line,
                        message: format!("expected {expected_len} fields, found {len}"),
                    },
                    csv::ErrorKind::Utf8 { .. } => {
                        Error::Malformed { line, message: "invalid UTF-8".to_string() }
                    }
                    _ => Error::Csv(e),
                });
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        builder.set_line(Some(line));
        ingest_row(&mut builder, &record, &layout, schema, default_kind, default_timeout)
            .map_err(|source| Error::Row { line, source })?;
    }
    Ok(builder.build())
}

fn ingest_row(
    builder: &mut DatasetBuilder,
    record: &csv::StringRecord,
    layout: &Layout,
    schema: &Schema,
    default_kind: Option<&str>,
    default_timeout: Option<Millis>,
) -> Result<(), RecordError> {
    let solver = cell(record, &layout.solver);
    let instance = cell(record, &layout.instance);
    if solver.is_empty() {
        return Err(RecordError::MissingField("solver"));
    }
    if instance.is_empty() {
        return Err(RecordError::MissingField("instance"));
    }

    let kind_text = match &layout.kind {
        Some(cols) => cell(record, cols),
        None => default_kind.unwrap_or_default().to_string(),
    };
    let kind_text = Schema::lookup(&schema.kind_map, &kind_text).map(str::to_string).unwrap_or(kind_text);
    let kind: ProblemKind = kind_text.parse()?;

    let timeout = match &layout.timeout {
        Some(cols) => {
            let text = cell(record, cols);
            if text.is_empty() {
                default_timeout.ok_or(RecordError::MissingField("timeout"))?
            } else {
                parse_time(&text, schema.time_unit, "timeout")?
            }
        }
        None => default_timeout.ok_or(RecordError::MissingField("timeout"))?,
    };

    let participant = match &layout.participant {
        Some(cols) => {
            let text = cell(record, cols);
            if text.is_empty() {
                schema.defaults.participant.unwrap_or(true)
            } else {
                parse_participant(&text)?
            }
        }
        None => schema.defaults.participant.unwrap_or(true),
    };

    let raw_status = cell(record, &layout.status);
    let mut erroneous = false;
    let mut status: Status = if schema.erroneous.iter().any(|t| t.eq_ignore_ascii_case(&raw_status)) {
        erroneous = true;
        Status::Unsolved
    } else {
        Schema::lookup(&schema.status_map, &raw_status).unwrap_or(&raw_status).parse()?
    };
    if status == Status::SolvedIncomplete && kind == ProblemKind::Decision && schema.promote_decision_incomplete {
        status = Status::SolvedComplete;
        builder.warn(WarningKind::IncompletePromoted { solver: solver.clone(), instance: instance.clone() });
    }

    let time_text = cell(record, &layout.time);
    let time = if time_text.is_empty() {
        if status.is_solved() {
            return Err(RecordError::MissingField("time"));
        }
        timeout
    } else {
        parse_time(&time_text, schema.time_unit, "time")?
    };

    let objective = match &layout.objective {
        Some(cols) => {
            let text = cell(record, cols);
            if text.is_empty() {
                None
            } else {
                Some(parse_decimal(&text).ok_or(RecordError::InvalidNumber { column: "objective", value: text })?)
            }
        }
        None => None,
    };
    // wrong answers carry no trustworthy objective
    let objective = if erroneous { None } else { objective };

    builder.instance(&instance, kind, timeout)?;
    builder.solver(&solver, participant)?;
    if erroneous {
        builder.warn(WarningKind::MappedToUnsolved {
            solver: solver.clone(),
            instance: instance.clone(),
            token: raw_status,
        });
    }
    builder.run(&solver, &instance, status, time, objective)?;
    Ok(())
}

/// Reads the canonical layout from a file.
pub fn ingest_path(path: &Path, schema: &Schema) -> Result<Ingested> {
    let file = std::fs::File::open(path)?;
    ingest(std::io::BufReader::new(file), schema)
}

/// Writes `ds` in canonical form: every run, ordered by solver then instance.
pub fn write_canonical<W: Write>(ds: &Dataset, sink: W, delimiter: u8) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(sink);
    writer.write_record(CANONICAL_COLUMNS)?;
    let n = ds.instances().len();
    for (s, solver) in ds.solvers().iter().enumerate() {
        for (i, inst) in ds.instances().iter().enumerate() {
            let run = &ds.runs()[s * n + i];
            let objective = run.objective.as_ref().map(to_exact_decimal).unwrap_or_default();
            writer.write_record([
                solver.id.as_str(),
                inst.id.as_str(),
                inst.kind.token(),
                run.status.token(),
                &run.time.to_string(),
                &objective,
                if solver.participant { "true" } else { "false" },
                &inst.timeout.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Canonical form as a string.
pub fn canonical_string(ds: &Dataset) -> String {
    let mut buf = Vec::new();
    write_canonical(ds, &mut buf, b',').expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("canonical output is UTF-8")
}
