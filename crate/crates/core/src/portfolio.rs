//! Virtual best solvers and portfolio performance ratios.
//!
//! The virtual best solver (VBS) of a portfolio takes, on each instance, the
//! best run of any member: best quality first, then the shortest time among
//! runs of that quality. A portfolio is measured against a baseline portfolio
//! by scoring the two VBSs against each other on every instance and taking
//! the ratio of their totals.

use std::cmp::Ordering;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{self, Rational};
use crate::pairscore::{score_ordered, Comparable};
use crate::runstore::{Dataset, SolverSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VirtualRun {
    pub performance: Comparable,
    /// Members whose run attains the VBS performance.
    pub contributing_solvers: SolverSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerfRatio {
    #[serde(with = "numeric::rational_str")]
    pub numerator: Rational,
    #[serde(with = "numeric::rational_str")]
    pub denominator: Rational,
    #[serde(with = "numeric::rational_str")]
    pub value: Rational,
}

impl PerfRatio {
    fn from_parts(numerator: Rational, denominator: Rational) -> Self {
        let value = &numerator / &denominator;
        PerfRatio { numerator, denominator, value }
    }
}

fn best_run(ds: &Dataset, positions: &[usize], instance: usize) -> VirtualRun {
    let kind = ds.instances()[instance].kind;
    let mut best: Option<Comparable> = None;
    let mut contributors = SolverSet::new();
    for &s in positions {
        let run = ds.run_at(s, instance);
        let candidate = Comparable::from_run(run, kind);
        let ord = best.as_ref().map_or(Ordering::Greater, |b| candidate.performance_cmp(b));
        match ord {
            Ordering::Greater => {
                best = Some(candidate);
                contributors.clear();
                contributors.insert(run.solver_id.clone());
            }
            Ordering::Equal => {
                contributors.insert(run.solver_id.clone());
            }
            Ordering::Less => {}
        }
    }
    let performance = match best {
        Some(b) if b.status.is_solved() => b,
        _ => Comparable::unsolved(kind),
    };
    VirtualRun { performance, contributing_solvers: contributors }
}

/// The VBS of `portfolio` on one instance. An empty portfolio is unsolved.
pub fn vbs_run(ds: &Dataset, portfolio: &SolverSet, instance: &str) -> Result<VirtualRun> {
    let i = ds.instance_pos(instance)?;
    let positions = ds.resolve(portfolio)?;
    Ok(best_run(ds, &positions, i))
}

/// Per-instance score pair of two virtual runs. Both unsolved splits evenly,
/// so a portfolio compared with itself scores exactly 1.
fn vbs_pair_score(first: &Comparable, second: &Comparable) -> (Rational, Rational) {
    if !first.status.is_solved() && !second.status.is_solved() {
        let half = numeric::ratio(1, 2);
        return (half.clone(), half);
    }
    score_ordered(first, second).expect("virtual runs on the same instance share a kind")
}

fn check_subset(portfolio: &SolverSet, baseline: &SolverSet) -> Result<()> {
    match portfolio.iter().find(|s| !baseline.contains(*s)) {
        Some(s) => Err(Error::NotInBaseline(s.clone())),
        None => Ok(()),
    }
}

fn check_baseline(ds: &Dataset, baseline: &[usize]) -> Result<()> {
    if ds.instances().is_empty() {
        return Err(Error::EmptyDataset);
    }
    let solves_any = (0..ds.instances().len())
        .any(|i| baseline.iter().any(|&s| ds.run_at(s, i).status.is_solved()));
    if solves_any {
        Ok(())
    } else {
        Err(Error::BaselineSolvesNothing)
    }
}

/// Performance of `portfolio` relative to `baseline`: the VBS of each is
/// scored against the other on every instance and the totals are divided.
pub fn perf(ds: &Dataset, portfolio: &SolverSet, baseline: &SolverSet) -> Result<PerfRatio> {
    let base = ds.resolve(baseline)?;
    let members = ds.resolve(portfolio)?;
    check_subset(portfolio, baseline)?;
    check_baseline(ds, &base)?;

    let mut numerator = Rational::zero();
    let mut denominator = Rational::zero();
    for i in 0..ds.instances().len() {
        let ours = best_run(ds, &members, i);
        let theirs = best_run(ds, &base, i);
        let (a, b) = vbs_pair_score(&ours.performance, &theirs.performance);
        numerator += a;
        denominator += b;
    }
    if denominator.is_zero() {
        return Err(Error::BaselineSolvesNothing);
    }
    Ok(PerfRatio::from_parts(numerator, denominator))
}

/// Evaluates [`perf`] for many subsets of a fixed member list.
///
/// Each member's score against the baseline VBS is computed once per
/// instance, together with the members' performance order there. A subset is
/// then scored by taking, per instance, the score of its best member, which is
/// exactly the score its VBS would get.
#[derive(Clone, Debug)]
pub struct SubsetEvaluator {
    members: Vec<String>,
    /// Per instance: solving members, best first, with their score.
    ladders: Vec<Vec<(usize, Rational)>>,
    /// Per instance: score of a portfolio that does not solve it.
    unsolved_scores: Vec<Rational>,
    instance_count: Rational,
}

/// Bitmask over [`SubsetEvaluator::members`].
pub type Mask = u64;

impl SubsetEvaluator {
    pub const MAX_MEMBERS: usize = 63;

    pub fn new(ds: &Dataset, members: &SolverSet, baseline: &SolverSet) -> Result<Self> {
        let base = ds.resolve(baseline)?;
        let positions = ds.resolve(members)?;
        check_subset(members, baseline)?;
        check_baseline(ds, &base)?;
        if positions.len() > Self::MAX_MEMBERS {
            return Err(Error::TooLarge { what: "portfolio", size: positions.len(), limit: Self::MAX_MEMBERS });
        }

        let mut ladders = Vec::with_capacity(ds.instances().len());
        let mut unsolved_scores = Vec::with_capacity(ds.instances().len());
        for (i, inst) in ds.instances().iter().enumerate() {
            let target = best_run(ds, &base, i).performance;
            let runs: Vec<Comparable> =
                positions.iter().map(|&s| Comparable::from_run(ds.run_at(s, i), inst.kind)).collect();
            let mut order: Vec<usize> = (0..runs.len()).filter(|&m| runs[m].status.is_solved()).collect();
            order.sort_by(|&a, &b| runs[b].performance_cmp(&runs[a]).then(a.cmp(&b)));
            ladders.push(order.into_iter().map(|m| (m, vbs_pair_score(&runs[m], &target).0)).collect());
            unsolved_scores.push(vbs_pair_score(&Comparable::unsolved(inst.kind), &target).0);
        }

        Ok(SubsetEvaluator {
            members: members.iter().cloned().collect(),
            ladders,
            unsolved_scores,
            instance_count: numeric::int(ds.instances().len() as i64),
        })
    }

    /// Members in canonical order; bit `k` of a mask selects `members()[k]`.
    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn full_mask(&self) -> Mask {
        if self.members.len() == 64 {
            Mask::MAX
        } else {
            (1 << self.members.len()) - 1
        }
    }

    pub fn mask_of(&self, set: &SolverSet) -> Result<Mask> {
        set.iter().try_fold(0, |mask, id| {
            let bit = self
                .members
                .binary_search(id)
                .map_err(|_| Error::UnknownSolver(id.clone()))?;
            Ok(mask | (1 << bit))
        })
    }

    pub fn set_of(&self, mask: Mask) -> SolverSet {
        self.members
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, id)| id.clone())
            .collect()
    }

    /// Total score of the subset's VBS against the baseline VBS.
    pub fn numerator(&self, mask: Mask) -> Rational {
        let mut total = Rational::zero();
        for (ladder, fallback) in self.ladders.iter().zip(&self.unsolved_scores) {
            let score = ladder.iter().find(|(m, _)| mask >> m & 1 == 1).map_or(fallback, |(_, s)| s);
            total += score;
        }
        total
    }

    pub fn perf(&self, mask: Mask) -> PerfRatio {
        let numerator = self.numerator(mask);
        // every instance distributes exactly one point between the two sides
        let denominator = &self.instance_count - &numerator;
        PerfRatio::from_parts(numerator, denominator)
    }
}
