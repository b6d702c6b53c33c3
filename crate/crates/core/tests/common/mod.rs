//! Shared helpers for the integration tests: random dataset generators and
//! reference implementations written straight from the definitions.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use solverfolio::numeric::{int, ratio};
use solverfolio::pairscore::Comparable;
use solverfolio::runstore::{Dataset, DatasetBuilder, ProblemKind, SolverSet, Status};
use solverfolio::{Millis, Rational};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn set(ids: &[&str]) -> SolverSet {
    ids.iter().map(|s| s.to_string()).collect()
}

pub fn q(text: &str) -> Rational {
    solverfolio::numeric::parse_decimal(text).unwrap_or_else(|| panic!("bad rational {text}"))
}

/// Plain description of a dataset, easy to mutate before building.
#[derive(Clone, Debug)]
pub struct Raw {
    pub instances: Vec<(String, ProblemKind, u64)>,
    pub solvers: Vec<(String, bool)>,
    pub runs: Vec<(String, String, Status, u64, Option<i64>)>,
}

impl Raw {
    pub fn new() -> Self {
        Raw { instances: vec![], solvers: vec![], runs: vec![] }
    }

    pub fn instance(&mut self, id: &str, kind: ProblemKind, timeout_ms: u64) -> &mut Self {
        self.instances.push((id.into(), kind, timeout_ms));
        self
    }

    pub fn solver(&mut self, id: &str, participant: bool) -> &mut Self {
        self.solvers.push((id.into(), participant));
        self
    }

    pub fn run(&mut self, solver: &str, instance: &str, status: Status, ms: u64, obj: Option<i64>) -> &mut Self {
        self.runs.push((solver.into(), instance.into(), status, ms, obj));
        self
    }

    /// Adds `copy` with exactly the runs of `original`.
    pub fn twin(&mut self, original: &str, copy: &str) -> &mut Self {
        let participant = self.solvers.iter().find(|s| s.0 == original).is_none_or(|s| s.1);
        self.solvers.push((copy.into(), participant));
        let cloned: Vec<_> = self
            .runs
            .iter()
            .filter(|r| r.0 == original)
            .map(|r| (copy.to_string(), r.1.clone(), r.2, r.3, r.4))
            .collect();
        self.runs.extend(cloned);
        self
    }

    pub fn build(&self) -> Dataset {
        let mut b = DatasetBuilder::new();
        for (id, kind, timeout) in &self.instances {
            b.instance(id, *kind, Millis::from_millis(*timeout)).unwrap();
        }
        for (id, participant) in &self.solvers {
            b.solver(id, *participant).unwrap();
        }
        for (s, i, status, ms, obj) in &self.runs {
            b.run(s, i, *status, Millis::from_millis(*ms), obj.map(int)).unwrap();
        }
        b.build().dataset
    }

    /// Canonical CSV text; rows in insertion order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("solver,instance,kind,status,time,objective,participant,timeout\n");
        let meta: BTreeMap<&str, (ProblemKind, u64)> =
            self.instances.iter().map(|(id, k, t)| (id.as_str(), (*k, *t))).collect();
        let part: BTreeMap<&str, bool> = self.solvers.iter().map(|(id, p)| (id.as_str(), *p)).collect();
        for (s, i, status, ms, obj) in &self.runs {
            let (kind, timeout) = meta[i.as_str()];
            out.push_str(&format!(
                "{s},{i},{},{},{},{},{},{}\n",
                kind.token(),
                status.token(),
                Millis::from_millis(*ms),
                obj.map(|o| o.to_string()).unwrap_or_default(),
                part[s.as_str()],
                Millis::from_millis(timeout),
            ));
        }
        out
    }
}

pub fn solver_name(k: usize) -> String {
    format!("s{k:02}")
}

const TIMES_MS: [u64; 7] = [0, 500, 1000, 2000, 3000, 5000, 8000];
const TIMEOUT_MS: u64 = 10_000;

/// Random dataset with `solvers` solvers and `instances` instances.
///
/// Times and objectives come from small pools so ties are common. About one
/// run in ten is left out so that ingestion has to synthesize it.
pub fn random_raw<R: Rng>(rng: &mut R, solvers: usize, instances: usize) -> Raw {
    let mut raw = Raw::new();
    for k in 0..solvers {
        raw.solver(&solver_name(k), rng.gen_bool(0.6));
    }
    for i in 0..instances {
        let kind = [ProblemKind::Decision, ProblemKind::Minimize, ProblemKind::Maximize][rng.gen_range(0..3)];
        let id = format!("i{i:02}");
        raw.instance(&id, kind, TIMEOUT_MS);
        let optimum: i64 = rng.gen_range(-2..=3);
        for k in 0..solvers {
            if rng.gen_bool(0.1) {
                continue;
            }
            let roll: f64 = rng.gen();
            let status = if roll < 0.3 {
                Status::Unsolved
            } else if roll < 0.65 || kind == ProblemKind::Decision {
                Status::SolvedComplete
            } else {
                Status::SolvedIncomplete
            };
            let ms = if status == Status::Unsolved { TIMEOUT_MS } else { *TIMES_MS.choose(rng).unwrap() };
            let gap: i64 = rng.gen_range(0..=3);
            let obj = match (kind, status) {
                (ProblemKind::Decision, _) | (_, Status::Unsolved) => None,
                (_, Status::SolvedComplete) => Some(optimum),
                (ProblemKind::Minimize, _) => Some(optimum + gap),
                (ProblemKind::Maximize, _) => Some(optimum - gap),
            };
            raw.run(&solver_name(k), &id, status, ms, obj);
        }
    }
    raw
}

/// Like [`random_raw`] but the first solver solves everything, so no
/// instance is left unsolved by the whole set.
pub fn random_raw_all_solved<R: Rng>(rng: &mut R, solvers: usize, instances: usize) -> Raw {
    let mut raw = random_raw(rng, solvers, instances);
    let first = solver_name(0);
    let kinds: BTreeMap<String, ProblemKind> = raw.instances.iter().map(|(id, k, _)| (id.clone(), *k)).collect();
    raw.runs.retain(|r| r.0 != first);
    for (id, kind) in kinds {
        match kind {
            ProblemKind::Decision => raw.run(&first, &id, Status::SolvedComplete, 9000, None),
            ProblemKind::Minimize => raw.run(&first, &id, Status::SolvedIncomplete, 9000, Some(50)),
            ProblemKind::Maximize => raw.run(&first, &id, Status::SolvedIncomplete, 9000, Some(-50)),
        };
    }
    raw
}

/// Renames solvers through `map`; unmapped names are kept.
pub fn rename(raw: &Raw, map: &BTreeMap<String, String>) -> Raw {
    let name = |s: &String| map.get(s).cloned().unwrap_or_else(|| s.clone());
    Raw {
        instances: raw.instances.clone(),
        solvers: raw.solvers.iter().map(|(s, p)| (name(s), *p)).collect(),
        runs: raw.runs.iter().map(|(s, i, st, t, o)| (name(s), i.clone(), *st, *t, *o)).collect(),
    }
}

/// Every subset of `items`, as sorted sets.
pub fn all_subsets(items: &[String]) -> Vec<SolverSet> {
    (0u64..1 << items.len())
        .map(|mask| (0..items.len()).filter(|k| mask >> k & 1 == 1).map(|k| items[k].clone()).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// Reference implementations
// ---------------------------------------------------------------------------

/// Quality as a tuple that sorts better-last: (class, signed objective).
fn quality_key(c: &Comparable) -> (u8, Rational) {
    match c.status {
        Status::Unsolved => (0, Rational::zero()),
        Status::SolvedComplete => (2, Rational::zero()),
        Status::SolvedIncomplete => {
            let obj = c.objective.clone().expect("incomplete run without objective");
            match c.kind {
                ProblemKind::Maximize => (1, obj),
                _ => (1, -obj),
            }
        }
    }
}

pub fn ref_quality_cmp(a: &Comparable, b: &Comparable) -> Ordering {
    quality_key(a).cmp(&quality_key(b))
}

/// The pairwise score written directly from its case analysis.
pub fn ref_score(first: &Comparable, second: &Comparable) -> (Rational, Rational) {
    let one = Rational::one();
    let zero = Rational::zero();
    if first.status == Status::Unsolved && second.status == Status::Unsolved {
        return (one, zero);
    }
    match ref_quality_cmp(first, second) {
        Ordering::Greater => (one, zero),
        Ordering::Less => (zero, one),
        Ordering::Equal => {
            let t1 = int(first.time.as_millis() as i64);
            let t2 = int(second.time.as_millis() as i64);
            if (&t1 + &t2).is_zero() {
                (ratio(1, 2), ratio(1, 2))
            } else {
                let s = &t2 / (&t1 + &t2);
                (s.clone(), one - s)
            }
        }
    }
}

/// Best run among `runs`: best quality, then fastest. `None` when empty.
pub fn ref_vbs(runs: &[Comparable], kind: ProblemKind) -> Comparable {
    let mut best: Option<&Comparable> = None;
    for r in runs {
        best = match best {
            None => Some(r),
            Some(b) => match ref_quality_cmp(r, b) {
                Ordering::Greater => Some(r),
                Ordering::Equal if r.status != Status::Unsolved && r.time < b.time => Some(r),
                _ => Some(b),
            },
        };
    }
    match best {
        Some(b) if b.status != Status::Unsolved => b.clone(),
        _ => Comparable::new(kind, Status::Unsolved, Millis::ZERO, None),
    }
}

fn runs_of(ds: &Dataset, portfolio: &SolverSet, instance: usize) -> Vec<Comparable> {
    let meta = &ds.instances()[instance];
    ds.runs()
        .iter()
        .filter(|r| r.instance_id == meta.id && portfolio.contains(&r.solver_id))
        .map(|r| Comparable::new(meta.kind, r.status, r.time, r.objective.clone()))
        .collect()
}

/// Performance ratio of `portfolio` against `baseline`, both-unsolved
/// instances counting half to each side. Returns (numerator, denominator).
pub fn ref_perf_parts(ds: &Dataset, portfolio: &SolverSet, baseline: &SolverSet) -> (Rational, Rational) {
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for (i, meta) in ds.instances().iter().enumerate() {
        let a = ref_vbs(&runs_of(ds, portfolio, i), meta.kind);
        let b = ref_vbs(&runs_of(ds, baseline, i), meta.kind);
        let (sa, sb) = if a.status == Status::Unsolved && b.status == Status::Unsolved {
            (ratio(1, 2), ratio(1, 2))
        } else {
            ref_score(&a, &b)
        };
        num += sa;
        den += sb;
    }
    (num, den)
}

pub fn ref_perf(ds: &Dataset, portfolio: &SolverSet, baseline: &SolverSet) -> Rational {
    let (num, den) = ref_perf_parts(ds, portfolio, baseline);
    num / den
}

/// Minimum covers by trying every subset of `solvers`.
///
/// A solver covers an instance when it matches the best quality there and is
/// within `epsilon_ms` of the fastest such run.
pub fn ref_min_covers(ds: &Dataset, solvers: &SolverSet, epsilon_ms: u64) -> Option<(usize, Vec<SolverSet>)> {
    let names: Vec<String> = solvers.iter().cloned().collect();
    let mut covers: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); names.len()];
    let mut universe = BTreeSet::new();
    for (i, meta) in ds.instances().iter().enumerate() {
        let runs: Vec<(usize, Comparable)> = names
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let r = ds.run(s, &meta.id).unwrap();
                (k, Comparable::new(meta.kind, r.status, r.time, r.objective.clone()))
            })
            .collect();
        let best = ref_vbs(&runs.iter().map(|r| r.1.clone()).collect::<Vec<_>>(), meta.kind);
        if best.status == Status::Unsolved {
            continue;
        }
        universe.insert(i);
        for (k, c) in &runs {
            if ref_quality_cmp(c, &best) == Ordering::Equal
                && c.time.as_millis() <= best.time.as_millis() + epsilon_ms
            {
                covers[*k].insert(i);
            }
        }
    }
    if universe.is_empty() {
        return None;
    }
    let mut best_size = usize::MAX;
    let mut optima = Vec::new();
    for subset in all_subsets(&names) {
        let covered: BTreeSet<usize> = names
            .iter()
            .enumerate()
            .filter(|(_, s)| subset.contains(*s))
            .flat_map(|(k, _)| covers[k].iter().copied())
            .collect();
        if covered != universe {
            continue;
        }
        match subset.len().cmp(&best_size) {
            Ordering::Less => {
                best_size = subset.len();
                optima = vec![subset];
            }
            Ordering::Equal => optima.push(subset),
            Ordering::Greater => {}
        }
    }
    optima.sort();
    Some((best_size, optima))
}

fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * int(k))
}

/// Shapley values from the textbook double loop: every player, every
/// coalition of the others, weighted marginal contribution.
pub fn ref_shapley<F>(players: &[String], value: F) -> BTreeMap<String, Rational>
where
    F: Fn(&SolverSet) -> Rational,
{
    let n = players.len();
    let mut out = BTreeMap::new();
    for a in players {
        let others: Vec<String> = players.iter().filter(|p| *p != a).cloned().collect();
        let mut phi = Rational::zero();
        for coalition in all_subsets(&others) {
            let s = coalition.len();
            let weight = factorial(s) * factorial(n - s - 1) / factorial(n);
            let mut with = coalition.clone();
            with.insert(a.clone());
            phi += weight * (value(&with) - value(&coalition));
        }
        out.insert(a.clone(), phi);
    }
    out
}

/// Characteristic function used for attribution: zero for the empty set,
/// otherwise the performance ratio.
pub fn ref_game<'a>(ds: &'a Dataset, baseline: &SolverSet) -> impl Fn(&SolverSet) -> Rational + 'a {
    let baseline = baseline.clone();
    move |k: &SolverSet| if k.is_empty() { Rational::zero() } else { ref_perf(ds, k, &baseline) }
}

/// Decision dataset with perf({a}) = 1/2, perf({b}) = 3/10 and
/// perf({a, b}) = 1 against {a, b}.
///
/// 21 instances only `a` solves, 13 only `b` solves, 5 both solve equally
/// fast: numerator 13 of 39 for `a`, 9 of 39 for `b`.
pub fn two_solver_example() -> Raw {
    let mut raw = Raw::new();
    raw.solver("a", true).solver("b", true);
    let mut n = 0;
    let mut add = |raw: &mut Raw, a: bool, b: bool| {
        let id = format!("i{n:02}");
        n += 1;
        raw.instance(&id, ProblemKind::Decision, 60_000);
        for (s, solved) in [("a", a), ("b", b)] {
            let status = if solved { Status::SolvedComplete } else { Status::Unsolved };
            raw.run(s, &id, status, if solved { 7_000 } else { 60_000 }, None);
        }
    };
    for _ in 0..21 {
        add(&mut raw, true, false);
    }
    for _ in 0..13 {
        add(&mut raw, false, true);
    }
    for _ in 0..5 {
        add(&mut raw, true, true);
    }
    raw
}
