use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, RecordError, Result};
use crate::numeric::{Millis, Rational};

/// Set of solver identifiers. Ordered so every traversal is canonical.
pub type SolverSet = BTreeSet<String>;

/// Convenience for building a [`SolverSet`] from string slices.
pub fn solver_set<I, S>(ids: I) -> SolverSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    ids.into_iter().map(Into::into).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ProblemKind {
    Decision,
    Minimize,
    Maximize,
}

impl ProblemKind {
    pub fn is_optimization(self) -> bool {
        !matches!(self, ProblemKind::Decision)
    }

    pub fn token(self) -> &'static str {
        match self {
            ProblemKind::Decision => "DECISION",
            ProblemKind::Minimize => "MINIMIZE",
            ProblemKind::Maximize => "MAXIMIZE",
        }
    }
}

impl FromStr for ProblemKind {
    type Err = RecordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "DECISION" => Ok(ProblemKind::Decision),
            "MINIMIZE" => Ok(ProblemKind::Minimize),
            "MAXIMIZE" => Ok(ProblemKind::Maximize),
            _ => Err(RecordError::UnknownKind(s.to_string())),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Status {
    /// Decision instance answered, or optimization instance solved to proven optimality.
    SolvedComplete,
    /// Optimization instance with a feasible but unproven solution.
    SolvedIncomplete,
    Unsolved,
}

impl Status {
    pub fn is_solved(self) -> bool {
        !matches!(self, Status::Unsolved)
    }

    pub fn token(self) -> &'static str {
        match self {
            Status::SolvedComplete => "COMPLETE",
            Status::SolvedIncomplete => "INCOMPLETE",
            Status::Unsolved => "UNSOLVED",
        }
    }
}

impl FromStr for Status {
    type Err = RecordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "COMPLETE" => Ok(Status::SolvedComplete),
            "INCOMPLETE" => Ok(Status::SolvedIncomplete),
            "UNSOLVED" => Ok(Status::Unsolved),
            _ => Err(RecordError::UnknownStatus(s.to_string())),
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceMeta {
    pub id: String,
    pub kind: ProblemKind,
    pub timeout: Millis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverMeta {
    pub id: String,
    pub participant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunRecord {
    pub solver_id: String,
    pub instance_id: String,
    pub status: Status,
    pub time: Millis,
    pub objective: Option<Rational>,
}

/// Something worth telling the user about that did not stop ingestion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IngestWarning {
    pub line: Option<u64>,
    pub kind: WarningKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WarningKind {
    TimeClamped { solver: String, instance: String, time: Millis, timeout: Millis },
    ObjectiveDropped { solver: String, instance: String, reason: &'static str },
    MappedToUnsolved { solver: String, instance: String, token: String },
    IncompletePromoted { solver: String, instance: String },
    InconsistentObjective { solver: String, instance: String },
}

impl fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        match &self.kind {
            WarningKind::TimeClamped { solver, instance, time, timeout } => write!(
                f,
                "time {time}s of `{solver}` on `{instance}` exceeds timeout {timeout}s, clamped"
            ),
            WarningKind::ObjectiveDropped { solver, instance, reason } => {
                write!(f, "objective of `{solver}` on `{instance}` dropped ({reason})")
            }
            WarningKind::MappedToUnsolved { solver, instance, token } => write!(
                f,
                "erroneous result `{token}` of `{solver}` on `{instance}` treated as UNSOLVED"
            ),
            WarningKind::IncompletePromoted { solver, instance } => write!(
                f,
                "INCOMPLETE result of `{solver}` on decision instance `{instance}` treated as COMPLETE"
            ),
            WarningKind::InconsistentObjective { solver, instance } => write!(
                f,
                "incomplete objective of `{solver}` on `{instance}` beats a proven optimum; record is inconsistent"
            ),
        }
    }
}

/// Validated, complete competition results: one run per (solver, instance).
///
/// Solvers and instances are kept sorted by id; runs are stored densely in
/// solver-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    instances: Vec<InstanceMeta>,
    solvers: Vec<SolverMeta>,
    runs: Vec<RunRecord>,
    instance_index: HashMap<String, usize>,
    solver_index: HashMap<String, usize>,
}

impl Dataset {
    pub fn instances(&self) -> &[InstanceMeta] {
        &self.instances
    }

    pub fn solvers(&self) -> &[SolverMeta] {
        &self.solvers
    }

    pub fn runs(&self) -> &[RunRecord] {
        &self.runs
    }

    pub fn solver_ids(&self) -> SolverSet {
        self.solvers.iter().map(|s| s.id.clone()).collect()
    }

    pub fn participants(&self) -> SolverSet {
        self.solvers.iter().filter(|s| s.participant).map(|s| s.id.clone()).collect()
    }

    pub fn solver(&self, id: &str) -> Option<&SolverMeta> {
        self.solver_index.get(id).map(|&i| &self.solvers[i])
    }

    pub fn solver_pos(&self, id: &str) -> Result<usize> {
        self.solver_index.get(id).copied().ok_or_else(|| Error::UnknownSolver(id.to_string()))
    }

    pub fn instance_pos(&self, id: &str) -> Result<usize> {
        self.instance_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownInstance(id.to_string()))
    }

    /// Positions of the given solvers, in canonical (sorted) order.
    pub fn resolve(&self, ids: &SolverSet) -> Result<Vec<usize>> {
        ids.iter().map(|id| self.solver_pos(id)).collect()
    }

    pub fn run_at(&self, solver: usize, instance: usize) -> &RunRecord {
        &self.runs[solver * self.instances.len() + instance]
    }

    pub fn run(&self, solver: &str, instance: &str) -> Result<&RunRecord> {
        Ok(self.run_at(self.solver_pos(solver)?, self.instance_pos(instance)?))
    }

    /// Restricts the dataset to `keep`; instances are retained as-is.
    pub fn filter(&self, keep: &SolverSet) -> Result<Dataset> {
        let positions = self.resolve(keep)?;
        let solvers: Vec<SolverMeta> = positions.iter().map(|&p| self.solvers[p].clone()).collect();
        let n = self.instances.len();
        let runs = positions
            .iter()
            .flat_map(|&p| self.runs[p * n..(p + 1) * n].iter().cloned())
            .collect();
        Ok(Dataset::assemble(self.instances.clone(), solvers, runs))
    }

    fn assemble(instances: Vec<InstanceMeta>, solvers: Vec<SolverMeta>, runs: Vec<RunRecord>) -> Dataset {
        let instance_index = instances.iter().enumerate().map(|(i, m)| (m.id.clone(), i)).collect();
        let solver_index = solvers.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect();
        Dataset { instances, solvers, runs, instance_index, solver_index }
    }
}

/// Output of ingestion: the dataset plus anything noteworthy seen on the way.
#[derive(Clone, Debug)]
pub struct Ingested {
    pub dataset: Dataset,
    pub warnings: Vec<IngestWarning>,
    /// Number of (solver, instance) pairs filled in as UNSOLVED.
    pub synthesized: usize,
}

/// Incrementally assembles a [`Dataset`], enforcing record invariants.
#[derive(Debug, Default)]
pub struct DatasetBuilder {
    instances: BTreeMap<String, InstanceMeta>,
    solvers: BTreeMap<String, SolverMeta>,
    runs: BTreeMap<(String, String), RunRecord>,
    warnings: Vec<IngestWarning>,
    line: Option<u64>,
}

impl DatasetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Line number attached to warnings raised by subsequent calls.
    pub fn set_line(&mut self, line: Option<u64>) {
        self.line = line;
    }

    pub fn warn(&mut self, kind: WarningKind) {
        self.warnings.push(IngestWarning { line: self.line, kind });
    }

    pub fn instance(&mut self, id: &str, kind: ProblemKind, timeout: Millis) -> Result<&mut Self, RecordError> {
        if timeout == Millis::ZERO {
            return Err(RecordError::NonPositiveTimeout(id.to_string()));
        }
        match self.instances.get(id) {
            Some(meta) if meta.kind != kind => {
                return Err(RecordError::InstanceConflict { instance: id.to_string(), what: "kinds" })
            }
            Some(meta) if meta.timeout != timeout => {
                return Err(RecordError::InstanceConflict { instance: id.to_string(), what: "timeouts" })
            }
            Some(_) => {}
            None => {
                self.instances
                    .insert(id.to_string(), InstanceMeta { id: id.to_string(), kind, timeout });
            }
        }
        Ok(self)
    }

    pub fn solver(&mut self, id: &str, participant: bool) -> Result<&mut Self, RecordError> {
        match self.solvers.get(id) {
            Some(meta) if meta.participant != participant => {
                return Err(RecordError::ParticipantConflict(id.to_string()))
            }
            Some(_) => {}
            None => {
                self.solvers.insert(id.to_string(), SolverMeta { id: id.to_string(), participant });
            }
        }
        Ok(self)
    }

    /// Adds one run. The instance and solver must already be declared.
    pub fn run(
        &mut self,
        solver: &str,
        instance: &str,
        status: Status,
        time: Millis,
        objective: Option<Rational>,
    ) -> Result<&mut Self, RecordError> {
        if !self.solvers.contains_key(solver) {
            return Err(RecordError::UndeclaredSolver(solver.to_string()));
        }
        let meta = self.instances.get(instance).cloned().ok_or_else(|| RecordError::UndeclaredInstance {
            solver: solver.to_string(),
            instance: instance.to_string(),
        })?;
        let key = (solver.to_string(), instance.to_string());
        if self.runs.contains_key(&key) {
            return Err(RecordError::DuplicateRun { solver: key.0, instance: key.1 });
        }

        let mut objective = objective;
        match (meta.kind.is_optimization(), status) {
            (false, Status::SolvedIncomplete) => {
                return Err(RecordError::IncompleteOnDecision(instance.to_string()));
            }
            (true, Status::SolvedComplete | Status::SolvedIncomplete) if objective.is_none() => {
                return Err(RecordError::MissingObjective {
                    solver: solver.to_string(),
                    instance: instance.to_string(),
                });
            }
            (false, _) if objective.is_some() => {
                objective = None;
                self.warn(WarningKind::ObjectiveDropped {
                    solver: solver.to_string(),
                    instance: instance.to_string(),
                    reason: "decision instance",
                });
            }
            (true, Status::Unsolved) if objective.is_some() => {
                objective = None;
                self.warn(WarningKind::ObjectiveDropped {
                    solver: solver.to_string(),
                    instance: instance.to_string(),
                    reason: "run is unsolved",
                });
            }
            _ => {}
        }

        let mut time = time;
        if time > meta.timeout {
            self.warn(WarningKind::TimeClamped {
                solver: solver.to_string(),
                instance: instance.to_string(),
                time,
                timeout: meta.timeout,
            });
            time = meta.timeout;
        }

        self.runs.insert(
            key,
            RunRecord {
                solver_id: solver.to_string(),
                instance_id: instance.to_string(),
                status,
                time,
                objective,
            },
        );
        Ok(self)
    }

    /// Finalizes the dataset, materializing missing runs as UNSOLVED at the
    /// instance timeout.
    pub fn build(mut self) -> Ingested {
        self.line = None;
        let instances: Vec<InstanceMeta> = self.instances.values().cloned().collect();
        let solvers: Vec<SolverMeta> = self.solvers.values().cloned().collect();

        let mut synthesized = 0;
        let mut runs = Vec::with_capacity(instances.len() * solvers.len());
        for solver in &solvers {
            for inst in &instances {
                let key = (solver.id.clone(), inst.id.clone());
                let record = self.runs.remove(&key).unwrap_or_else(|| {
                    synthesized += 1;
                    RunRecord {
                        solver_id: solver.id.clone(),
                        instance_id: inst.id.clone(),
                        status: Status::Unsolved,
                        time: inst.timeout,
                        objective: None,
                    }
                });
                runs.push(record);
            }
        }

        let dataset = Dataset::assemble(instances, solvers, runs);
        let mut warnings = self.warnings;
        warnings.extend(inconsistent_objectives(&dataset));
        Ingested { dataset, warnings, synthesized }
    }
}

/// Incomplete runs whose objective is strictly better than a proven optimum
/// on the same instance.
fn inconsistent_objectives(ds: &Dataset) -> Vec<IngestWarning> {
    let mut out = Vec::new();
    for (i, inst) in ds.instances().iter().enumerate() {
        if !inst.kind.is_optimization() {
            continue;
        }
        let optima: Vec<&Rational> = (0..ds.solvers().len())
            .map(|s| ds.run_at(s, i))
            .filter(|r| r.status == Status::SolvedComplete)
            .filter_map(|r| r.objective.as_ref())
            .collect();
        if optima.is_empty() {
            continue;
        }
        for s in 0..ds.solvers().len() {
            let run = ds.run_at(s, i);
            let Some(obj) = run.objective.as_ref().filter(|_| run.status == Status::SolvedIncomplete) else {
                continue;
            };
            let beats = optima.iter().any(|opt| match inst.kind {
                ProblemKind::Minimize => obj < *opt,
                ProblemKind::Maximize => obj > *opt,
                ProblemKind::Decision => false,
            });
            if beats {
                out.push(IngestWarning {
                    line: None,
                    kind: WarningKind::InconsistentObjective {
                        solver: run.solver_id.clone(),
                        instance: inst.id.clone(),
                    },
                });
            }
        }
    }
    out
}
