//! Best portfolio of each size, by exhaustive search.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{self, Rational};
use crate::portfolio::{Mask, PerfRatio, SubsetEvaluator};
use crate::runstore::{Dataset, SolverSet};

/// Largest search space accepted; every subset is visited.
pub const MAX_SEARCH_SPACE: usize = 25;

const PROGRESS_INTERVAL: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TradeoffEntry {
    pub k: usize,
    pub best_subset: SolverSet,
    pub perf: PerfRatio,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TradeoffCurve {
    pub entries: Vec<TradeoffEntry>,
    pub search_space: SolverSet,
    pub baseline: SolverSet,
}

/// Advances `combo` (strictly increasing indices below `n`) to the next
/// combination in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let Some(pivot) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
        return false;
    };
    combo[pivot] += 1;
    for i in pivot + 1..k {
        combo[i] = combo[i - 1] + 1;
    }
    true
}

/// For each size `k` from 1 to `|space|`, the size-`k` subset of `space` with
/// the highest performance against `baseline`. Ties go to the
/// lexicographically smallest sorted list of solver ids.
pub fn best_subsets(ds: &Dataset, space: &SolverSet, baseline: &SolverSet) -> Result<TradeoffCurve> {
    if space.is_empty() {
        return Err(Error::EmptySpace);
    }
    if space.len() > MAX_SEARCH_SPACE {
        return Err(Error::TooLarge { what: "search space", size: space.len(), limit: MAX_SEARCH_SPACE });
    }
    let evaluator = SubsetEvaluator::new(ds, space, baseline)?;
    let n = evaluator.members().len();

    let mut visited: u64 = 0;
    let mut entries = Vec::with_capacity(n);
    for k in 1..=n {
        let mut combo: Vec<usize> = (0..k).collect();
        let mut best: Option<(Rational, Mask)> = None;
        loop {
            let mask = combo.iter().fold(0, |m, &i| m | (1 << i));
            let score = evaluator.numerator(mask);
            // the ratio increases with the numerator; strict comparison keeps
            // the first, lexicographically smallest, subset on ties
            if best.as_ref().is_none_or(|(top, _)| score > *top) {
                best = Some((score, mask));
            }
            visited += 1;
            if visited.is_multiple_of(PROGRESS_INTERVAL) {
                log::debug!("tradeoff: {visited} subsets evaluated (k = {k})");
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
        let (_, mask) = best.expect("at least one subset per size");
        entries.push(TradeoffEntry { k, best_subset: evaluator.set_of(mask), perf: evaluator.perf(mask) });
    }

    Ok(TradeoffCurve { entries, search_space: space.clone(), baseline: baseline.clone() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Threshold {
    #[serde(with = "numeric::rational_str")]
    pub level: Rational,
    /// Smallest size reaching the level, if any does.
    pub k: Option<usize>,
}

/// Smallest portfolio size whose best performance reaches each level.
pub fn thresholds(curve: &TradeoffCurve, levels: &[Rational]) -> Vec<Threshold> {
    levels
        .iter()
        .map(|level| Threshold {
            level: level.clone(),
            k: curve.entries.iter().find(|e| e.perf.value >= *level).map(|e| e.k),
        })
        .collect()
}

/// The levels reported by default: 80%, 90% and 95%.
pub fn default_levels() -> Vec<Rational> {
    vec![numeric::ratio(4, 5), numeric::ratio(9, 10), numeric::ratio(19, 20)]
}
