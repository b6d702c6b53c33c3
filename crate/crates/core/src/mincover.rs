//! Smallest portfolios that reproduce the full portfolio's VBS.
//!
//! Each solver covers the instances where its run ties the per-instance best.
//! A portfolio whose members cover every solvable instance matches the VBS of
//! the whole set, so the smallest such portfolio is a minimum set cover. The
//! cover is found by exhaustive branch-and-bound, enumerating every optimum.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::Millis;
use crate::pairscore::Comparable;
use crate::runstore::{Dataset, SolverSet};

pub const DEFAULT_ENUMERATION_CAP: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverageMap {
    /// Instances each solver ties the per-instance best on.
    pub best_sets: BTreeMap<String, BTreeSet<String>>,
    /// Instances solved by at least one solver.
    pub universe: BTreeSet<String>,
    /// Instances no solver solves; left out of the universe.
    pub unsolved: Vec<String>,
}

/// Builds the coverage sets for portfolio `portfolio`.
///
/// A run ties the best when its quality equals the best quality and its time
/// is within `epsilon` of the fastest run of that quality.
pub fn build_coverage(ds: &Dataset, portfolio: &SolverSet, epsilon: Millis) -> Result<CoverageMap> {
    let positions = ds.resolve(portfolio)?;
    let mut best_sets: BTreeMap<String, BTreeSet<String>> =
        portfolio.iter().map(|s| (s.clone(), BTreeSet::new())).collect();
    let mut universe = BTreeSet::new();
    let mut unsolved = Vec::new();

    for (i, inst) in ds.instances().iter().enumerate() {
        let runs: Vec<Comparable> =
            positions.iter().map(|&s| Comparable::from_run(ds.run_at(s, i), inst.kind)).collect();
        let Some(best) = runs
            .iter()
            .filter(|r| r.status.is_solved())
            .max_by(|a, b| a.performance_cmp(b))
        else {
            unsolved.push(inst.id.clone());
            continue;
        };
        universe.insert(inst.id.clone());
        let limit = best.time.saturating_add(epsilon);
        for (run, &s) in runs.iter().zip(&positions) {
            if run.status.is_solved() && run.quality_cmp(best) == Ordering::Equal && run.time <= limit {
                best_sets
                    .get_mut(&ds.solvers()[s].id)
                    .expect("portfolio member")
                    .insert(inst.id.clone());
            }
        }
    }
    Ok(CoverageMap { best_sets, universe, unsolved })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverSolution {
    /// Every minimum cover found, each sorted, in lexicographic order.
    pub portfolios: Vec<SolverSet>,
    pub is_unique: bool,
    /// More optima exist than the enumeration cap allowed to list.
    pub truncated: bool,
}

impl CoverSolution {
    pub fn size(&self) -> usize {
        self.portfolios.first().map_or(0, |p| p.len())
    }
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn count_new(&self, covered: &Bits) -> u32 {
        self.0.iter().zip(&covered.0).map(|(a, c)| (a & !c).count_ones()).sum()
    }
}

struct Search {
    /// Per candidate set: the elements it covers.
    sets: Vec<Bits>,
    /// Per element: the candidate sets containing it.
    containing: Vec<Vec<usize>>,
    element_count: usize,
    full: Bits,
    best_size: usize,
    found: Vec<Vec<usize>>,
    cap: usize,
    truncated: bool,
}

impl Search {
    /// Largest cover size still worth exploring.
    fn limit(&self) -> usize {
        if self.truncated {
            self.best_size - 1
        } else {
            self.best_size
        }
    }

    fn record(&mut self, chosen: &[usize]) {
        let size = chosen.len();
        if size < self.best_size {
            self.best_size = size;
            self.found.clear();
            self.truncated = false;
        }
        if self.found.len() < self.cap {
            let mut cover = chosen.to_vec();
            cover.sort_unstable();
            self.found.push(cover);
        } else {
            self.truncated = true;
        }
    }

    /// Number of uncovered elements with pairwise disjoint candidate lists;
    /// each needs its own set. `None` when some element cannot be covered.
    fn lower_bound(&self, covered: &Bits, excluded: &[bool]) -> Option<usize> {
        let mut used = vec![false; self.sets.len()];
        let mut bound = 0;
        for e in 0..self.element_count {
            if covered.get(e) {
                continue;
            }
            let mut any = false;
            let mut clash = false;
            for &s in &self.containing[e] {
                if !excluded[s] {
                    any = true;
                    clash |= used[s];
                }
            }
            if !any {
                return None;
            }
            if !clash {
                bound += 1;
                for &s in &self.containing[e] {
                    used[s] = true;
                }
            }
        }
        Some(bound)
    }

    fn explore(&mut self, covered: &Bits, chosen: &mut Vec<usize>, excluded: &mut Vec<bool>) {
        if *covered == self.full {
            self.record(chosen);
            return;
        }
        let Some(bound) = self.lower_bound(covered, excluded) else { return };
        if chosen.len() + bound.max(1) > self.limit() {
            return;
        }

        // branch on the uncovered element with the fewest remaining candidates
        let element = (0..self.element_count)
            .filter(|&e| !covered.get(e))
            .min_by_key(|&e| self.containing[e].iter().filter(|&&s| !excluded[s]).count())
            .expect("an element is uncovered");
        let mut candidates: Vec<usize> =
            self.containing[element].iter().copied().filter(|&s| !excluded[s]).collect();
        candidates.sort_by_key(|&s| (std::cmp::Reverse(self.sets[s].count_new(covered)), s));

        // sets tried in earlier branches are excluded from later ones, so each
        // cover is reached exactly once
        let mut newly_excluded = Vec::with_capacity(candidates.len());
        for s in candidates {
            let mut next = covered.clone();
            next.union_with(&self.sets[s]);
            chosen.push(s);
            self.explore(&next, chosen, excluded);
            chosen.pop();
            excluded[s] = true;
            newly_excluded.push(s);
        }
        for s in newly_excluded {
            excluded[s] = false;
        }
    }
}

fn greedy_size(sets: &[Bits], full: &Bits) -> usize {
    let mut covered = Bits::new(full.0.len() * 64);
    let mut size = 0;
    while covered != *full {
        let pick = (0..sets.len())
            .max_by_key(|&s| (sets[s].count_new(&covered), std::cmp::Reverse(s)))
            .expect("coverage sets exist");
        covered.union_with(&sets[pick]);
        size += 1;
    }
    size
}

/// Every minimum cover of `coverage.universe`, up to `cap` of them.
pub fn min_cover(coverage: &CoverageMap, cap: usize) -> Result<CoverSolution> {
    if coverage.universe.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    if cap == 0 {
        return Err(Error::InvalidArgument("enumeration cap must be at least 1".into()));
    }
    let elements: Vec<&String> = coverage.universe.iter().collect();
    let element_pos = |id: &String| elements.binary_search(&id).ok();

    // solvers with nothing to offer never appear in a minimum cover
    let names: Vec<&String> =
        coverage.best_sets.iter().filter(|(_, s)| !s.is_empty()).map(|(k, _)| k).collect();
    let sets: Vec<Bits> = names
        .iter()
        .map(|name| {
            let mut bits = Bits::new(elements.len());
            for inst in &coverage.best_sets[*name] {
                if let Some(e) = element_pos(inst) {
                    bits.set(e);
                }
            }
            bits
        })
        .collect();
    let mut containing = vec![Vec::new(); elements.len()];
    for (s, bits) in sets.iter().enumerate() {
        for (e, list) in containing.iter_mut().enumerate() {
            if bits.get(e) {
                list.push(s);
            }
        }
    }
    if containing.iter().any(Vec::is_empty) {
        return Err(Error::InvalidArgument("coverage sets do not cover the universe".into()));
    }

    let mut full = Bits::new(elements.len());
    (0..elements.len()).for_each(|e| full.set(e));
    let upper = greedy_size(&sets, &full);

    let mut search = Search {
        sets,
        containing,
        element_count: elements.len(),
        full: full.clone(),
        best_size: upper,
        found: Vec::new(),
        cap,
        truncated: false,
    };
    let mut excluded = vec![false; search.sets.len()];
    search.explore(&Bits::new(elements.len()), &mut Vec::new(), &mut excluded);

    let mut portfolios: Vec<SolverSet> = search
        .found
        .iter()
        .map(|cover| cover.iter().map(|&s| names[s].clone()).collect())
        .collect();
    portfolios.sort();
    let is_unique = portfolios.len() == 1 && !search.truncated;
    Ok(CoverSolution { portfolios, is_unique, truncated: search.truncated })
}
