//! Shapley-value attribution of portfolio performance to its members.
//!
//! The coalition value of a subset `K` is its performance against the
//! baseline, with the empty coalition worth 0.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{self, Rational};
use crate::portfolio::{Mask, SubsetEvaluator};
use crate::runstore::{Dataset, SolverSet};

/// Largest portfolio for the exact modes; all 2^n coalitions are evaluated.
pub const MAX_EXACT_PORTFOLIO: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ShapleyMode {
    /// Standard Shapley value: marginal contributions weighted by `s!(n-s-1)!/n!`.
    ExactWeighted,
    /// Plain, unweighted sum of marginal contributions over all coalitions.
    PaperUnweightedSum,
    /// Monte-Carlo mean over random permutations.
    SampledPermutations,
}

impl fmt::Display for ShapleyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapleyMode::ExactWeighted => "exact-weighted",
            ShapleyMode::PaperUnweightedSum => "unweighted-sum",
            ShapleyMode::SampledPermutations => "sampled-permutations",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttributionReport {
    #[serde(serialize_with = "serialize_values")]
    pub values: BTreeMap<String, Rational>,
    pub mode: ShapleyMode,
    pub sample_count: Option<u64>,
    pub portfolio: SolverSet,
    pub baseline: SolverSet,
}

fn serialize_values<S: serde::Serializer>(values: &BTreeMap<String, Rational>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(values.iter().map(|(k, v)| (k, numeric::to_fraction(v))))
}

/// Coalition values over a fixed portfolio.
struct Game {
    evaluator: SubsetEvaluator,
}

impl Game {
    fn new(ds: &Dataset, portfolio: &SolverSet, baseline: &SolverSet) -> Result<Self> {
        Ok(Game { evaluator: SubsetEvaluator::new(ds, portfolio, baseline)? })
    }

    fn size(&self) -> usize {
        self.evaluator.members().len()
    }

    fn value(&self, mask: Mask) -> Rational {
        if mask == 0 {
            Rational::zero()
        } else {
            self.evaluator.perf(mask).value
        }
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Weight of a coalition of size `s` not containing the player, among `n` players.
pub fn shapley_weight(s: usize, n: usize) -> Rational {
    Rational::new(factorial(s) * factorial(n - s - 1), factorial(n))
}

/// Per-size sums of coalition values: overall, and restricted to coalitions
/// containing each player.
struct SizeSums {
    total: Vec<Rational>,
    containing: Vec<Vec<Rational>>,
}

impl SizeSums {
    fn zero(n: usize) -> Self {
        SizeSums { total: vec![Rational::zero(); n + 1], containing: vec![vec![Rational::zero(); n + 1]; n] }
    }

    fn merge(mut self, other: SizeSums) -> Self {
        for (a, b) in self.total.iter_mut().zip(other.total) {
            *a += b;
        }
        for (row, other_row) in self.containing.iter_mut().zip(other.containing) {
            for (a, b) in row.iter_mut().zip(other_row) {
                *a += b;
            }
        }
        self
    }
}

const CHUNK: u64 = 1 << 10;

/// Exact attribution over all coalitions of `portfolio`.
///
/// `mode` must be [`ShapleyMode::ExactWeighted`] or
/// [`ShapleyMode::PaperUnweightedSum`].
pub fn shapley_exact(
    ds: &Dataset,
    portfolio: &SolverSet,
    baseline: &SolverSet,
    mode: ShapleyMode,
) -> Result<AttributionReport> {
    if mode == ShapleyMode::SampledPermutations {
        return Err(Error::InvalidArgument("sampled mode needs a sample count; use shapley_sampled".into()));
    }
    if portfolio.len() > MAX_EXACT_PORTFOLIO {
        return Err(Error::TooLarge { what: "portfolio", size: portfolio.len(), limit: MAX_EXACT_PORTFOLIO });
    }
    let game = Game::new(ds, portfolio, baseline)?;
    let n = game.size();
    let coalitions: u64 = 1 << n;

    // each coalition value is computed once and credited to every size bucket
    // it participates in
    let sums = (0..coalitions.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = SizeSums::zero(n);
            for mask in chunk * CHUNK..((chunk + 1) * CHUNK).min(coalitions) {
                let value = game.value(mask);
                if value.is_zero() {
                    continue;
                }
                let size = mask.count_ones() as usize;
                acc.total[size] += &value;
                for (player, row) in acc.containing.iter_mut().enumerate() {
                    if mask >> player & 1 == 1 {
                        row[size] += &value;
                    }
                }
            }
            acc
        })
        .reduce(|| SizeSums::zero(n), SizeSums::merge);

    let weight = |s: usize| match mode {
        ShapleyMode::ExactWeighted => shapley_weight(s, n),
        _ => Rational::one(),
    };
    let values = game
        .evaluator
        .members()
        .iter()
        .enumerate()
        .map(|(player, id)| {
            let mut phi = Rational::zero();
            for size in 0..=n {
                let with = &sums.containing[player][size];
                // coalitions K ∪ {player} with |K| = size - 1
                if size >= 1 {
                    phi += weight(size - 1) * with;
                }
                // coalitions K without the player, |K| = size
                if size < n {
                    phi -= weight(size) * (&sums.total[size] - with);
                }
            }
            (id.clone(), phi)
        })
        .collect();

    Ok(AttributionReport {
        values,
        mode,
        sample_count: None,
        portfolio: portfolio.clone(),
        baseline: baseline.clone(),
    })
}

/// Monte-Carlo Shapley estimate from `samples` uniformly random permutations,
/// deterministic for a given `seed`.
pub fn shapley_sampled(
    ds: &Dataset,
    portfolio: &SolverSet,
    baseline: &SolverSet,
    samples: u64,
    seed: u64,
) -> Result<AttributionReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let game = Game::new(ds, portfolio, baseline)?;
    let n = game.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Count how often each player joins each coalition; the rational
    // arithmetic then runs once per distinct pair instead of once per sample.
    let mut joins: HashMap<(usize, Mask), u64> = HashMap::new();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..samples {
        order.shuffle(&mut rng);
        let mut mask: Mask = 0;
        for &player in &order {
            *joins.entry((player, mask)).or_insert(0) += 1;
            mask |= 1 << player;
        }
    }

    let mut cache: HashMap<Mask, Rational> = HashMap::new();
    let mut value = |mask: Mask| cache.entry(mask).or_insert_with(|| game.value(mask)).clone();
    let mut joins: Vec<((usize, Mask), u64)> = joins.into_iter().collect();
    joins.sort_unstable();
    let mut sums = vec![Rational::zero(); n];
    for ((player, before), times) in joins {
        let marginal = value(before | 1 << player) - value(before);
        sums[player] += marginal * Rational::from_integer(BigInt::from(times));
    }

    let count = Rational::from_integer(BigInt::from(samples));
    let values = game
        .evaluator
        .members()
        .iter()
        .zip(sums)
        .map(|(id, total)| (id.clone(), total / &count))
        .collect();
    Ok(AttributionReport {
        values,
        mode: ShapleyMode::SampledPermutations,
        sample_count: Some(samples),
        portfolio: portfolio.clone(),
        baseline: baseline.clone(),
    })
}
