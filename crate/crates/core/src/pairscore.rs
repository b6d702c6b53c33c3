//! Pairwise MiniZinc-style scoring and the Borda count built on it.
//!
//! Two runs on the same instance share one point. Better quality takes the
//! whole point; equal quality splits it in proportion to the other side's
//! running time. When both runs fail, the first of the ordered pair gets the
//! point, so that counting the pair in both directions gives each side 1.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{self, Millis, Rational};
use crate::runstore::{Dataset, ProblemKind, RunRecord, Status};

/// One side of a pairwise comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparable {
    pub kind: ProblemKind,
    pub status: Status,
    pub time: Millis,
    #[serde(with = "numeric::opt_rational_str")]
    pub objective: Option<Rational>,
}

impl Comparable {
    pub fn new(kind: ProblemKind, status: Status, time: Millis, objective: Option<Rational>) -> Self {
        Comparable { kind, status, time, objective }
    }

    pub fn from_run(run: &RunRecord, kind: ProblemKind) -> Self {
        Comparable { kind, status: run.status, time: run.time, objective: run.objective.clone() }
    }

    pub fn unsolved(kind: ProblemKind) -> Self {
        Comparable { kind, status: Status::Unsolved, time: Millis::ZERO, objective: None }
    }

    fn status_rank(&self) -> u8 {
        match self.status {
            Status::SolvedComplete => 2,
            Status::SolvedIncomplete => 1,
            Status::Unsolved => 0,
        }
    }

    /// Orders solution quality only; `Greater` means `self` is better.
    ///
    /// A proven optimum beats any incomplete answer. Between two incomplete
    /// answers the objective decides.
    pub fn quality_cmp(&self, other: &Comparable) -> Ordering {
        let by_status = self.status_rank().cmp(&other.status_rank());
        if by_status != Ordering::Equal || self.status != Status::SolvedIncomplete {
            return by_status;
        }
        match (&self.objective, &other.objective, self.kind) {
            (Some(a), Some(b), ProblemKind::Minimize) => b.cmp(a),
            (Some(a), Some(b), ProblemKind::Maximize) => a.cmp(b),
            _ => Ordering::Equal,
        }
    }

    /// Full performance order: quality first, then the faster run. Unsolved
    /// runs are all equal regardless of time.
    pub fn performance_cmp(&self, other: &Comparable) -> Ordering {
        match self.quality_cmp(other) {
            Ordering::Equal if self.status.is_solved() => other.time.cmp(&self.time),
            ord => ord,
        }
    }
}

/// Scores an ordered pair; the two scores always sum to 1.
pub fn score_ordered(first: &Comparable, second: &Comparable) -> Result<(Rational, Rational)> {
    if first.kind != second.kind {
        return Err(Error::KindMismatch);
    }
    let one = Rational::one;
    let zero = Rational::zero;
    Ok(match first.quality_cmp(second) {
        Ordering::Greater => (one(), zero()),
        Ordering::Less => (zero(), one()),
        Ordering::Equal if !first.status.is_solved() => (one(), zero()),
        Ordering::Equal => time_split(first.time, second.time),
    })
}

/// Shares of one point proportional to the other side's time.
pub(crate) fn time_split(first: Millis, second: Millis) -> (Rational, Rational) {
    let (a, b) = (first.as_millis() as i64, second.as_millis() as i64);
    if a + b == 0 {
        return (numeric::ratio(1, 2), numeric::ratio(1, 2));
    }
    (numeric::ratio(b, a + b), numeric::ratio(a, a + b))
}

/// Borda scores of every solver on every instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreMatrix {
    pub solvers: Vec<String>,
    pub instances: Vec<String>,
    /// Indexed `[solver][instance]`.
    pub per_instance: Vec<Vec<Rational>>,
    pub totals: Vec<Rational>,
    pub averages: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankEntry {
    pub rank: usize,
    pub solver: String,
    #[serde(with = "numeric::rational_str")]
    pub total: Rational,
    #[serde(with = "numeric::rational_str")]
    pub average: Rational,
}

impl ScoreMatrix {
    fn solver_pos(&self, solver: &str) -> Result<usize> {
        self.solvers
            .iter()
            .position(|s| s == solver)
            .ok_or_else(|| Error::UnknownSolver(solver.to_string()))
    }

    pub fn score(&self, solver: &str, instance: &str) -> Result<&Rational> {
        let s = self.solver_pos(solver)?;
        let i = self
            .instances
            .iter()
            .position(|x| x == instance)
            .ok_or_else(|| Error::UnknownInstance(instance.to_string()))?;
        Ok(&self.per_instance[s][i])
    }

    pub fn total(&self, solver: &str) -> Result<&Rational> {
        Ok(&self.totals[self.solver_pos(solver)?])
    }

    pub fn average(&self, solver: &str) -> Result<&Rational> {
        Ok(&self.averages[self.solver_pos(solver)?])
    }

    /// Solvers by descending total; equal totals ordered by solver id.
    pub fn ranking(&self) -> Vec<RankEntry> {
        let mut order: Vec<usize> = (0..self.solvers.len()).collect();
        order.sort_by(|&a, &b| self.totals[b].cmp(&self.totals[a]).then_with(|| self.solvers[a].cmp(&self.solvers[b])));
        order
            .into_iter()
            .enumerate()
            .map(|(rank, s)| RankEntry {
                rank: rank + 1,
                solver: self.solvers[s].clone(),
                total: self.totals[s].clone(),
                average: self.averages[s].clone(),
            })
            .collect()
    }
}

/// Applies [`score_ordered`] to every ordered pair of solvers on every
/// instance and accumulates each solver's first-position scores.
pub fn borda(ds: &Dataset) -> Result<ScoreMatrix> {
    let n_solvers = ds.solvers().len();
    let n_instances = ds.instances().len();
    if n_solvers == 0 || n_instances == 0 {
        return Err(Error::EmptyDataset);
    }

    let columns: Vec<Vec<Rational>> = ds
        .instances()
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let runs: Vec<Comparable> =
                (0..n_solvers).map(|s| Comparable::from_run(ds.run_at(s, i), inst.kind)).collect();
            (0..n_solvers)
                .map(|a| {
                    (0..n_solvers).filter(|&b| b != a).fold(Rational::zero(), |acc, b| {
                        let (first, _) = score_ordered(&runs[a], &runs[b]).expect("same instance kind");
                        acc + first
                    })
                })
                .collect()
        })
        .collect();

    let mut per_instance = vec![Vec::with_capacity(n_instances); n_solvers];
    for column in columns {
        for (s, score) in column.into_iter().enumerate() {
            per_instance[s].push(score);
        }
    }
    let count = numeric::int(n_instances as i64);
    let totals: Vec<Rational> =
        per_instance.iter().map(|row| row.iter().fold(Rational::zero(), |acc, x| acc + x)).collect();
    let averages = totals.iter().map(|t| t / &count).collect();

    Ok(ScoreMatrix {
        solvers: ds.solvers().iter().map(|s| s.id.clone()).collect(),
        instances: ds.instances().iter().map(|i| i.id.clone()).collect(),
        per_instance,
        totals,
        averages,
    })
}
