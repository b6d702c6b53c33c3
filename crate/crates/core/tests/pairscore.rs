mod common;

use common::{random_raw, ref_score, Raw};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use solverfolio::numeric::{int, ratio};
use solverfolio::pairscore::{borda, score_ordered, Comparable};
use solverfolio::runstore::{ProblemKind, Status};
use solverfolio::{Error, Millis, Rational};

fn arb_kind() -> impl Strategy<Value = ProblemKind> {
    prop_oneof![Just(ProblemKind::Decision), Just(ProblemKind::Minimize), Just(ProblemKind::Maximize)]
}

fn arb_comparable(kind: ProblemKind) -> impl Strategy<Value = Comparable> {
    let statuses = if kind == ProblemKind::Decision {
        vec![Status::SolvedComplete, Status::Unsolved]
    } else {
        vec![Status::SolvedComplete, Status::SolvedIncomplete, Status::Unsolved]
    };
    (prop::sample::select(statuses), 0u64..5_000, -3i64..4).prop_map(move |(status, ms, obj)| {
        let objective = match status {
            Status::Unsolved => None,
            _ if kind == ProblemKind::Decision => None,
            _ => Some(int(obj)),
        };
        Comparable::new(kind, status, Millis::from_millis(ms), objective)
    })
}

fn arb_pair() -> impl Strategy<Value = (Comparable, Comparable)> {
    arb_kind().prop_flat_map(|k| (arb_comparable(k), arb_comparable(k)))
}

fn c(kind: ProblemKind, status: Status, secs: u64, obj: Option<i64>) -> Comparable {
    Comparable::new(kind, status, Millis::from_secs(secs), obj.map(int))
}

#[test]
fn worked_examples() {
    use ProblemKind::*;
    use Status::*;
    let cases = [
        (c(Decision, SolvedComplete, 10, None), c(Decision, Unsolved, 0, None), (1, 1), (0, 1)),
        (c(Decision, SolvedComplete, 10, None), c(Decision, SolvedComplete, 30, None), (3, 4), (1, 4)),
        (c(Decision, Unsolved, 0, None), c(Decision, Unsolved, 0, None), (1, 1), (0, 1)),
        (c(Minimize, SolvedIncomplete, 5, Some(10)), c(Minimize, SolvedIncomplete, 5, Some(12)), (1, 1), (0, 1)),
        (c(Minimize, SolvedComplete, 20, Some(3)), c(Minimize, SolvedComplete, 60, Some(3)), (3, 4), (1, 4)),
    ];
    for (first, second, (n1, d1), (n2, d2)) in cases {
        let got = score_ordered(&first, &second).unwrap();
        assert_eq!(got, (ratio(n1, d1), ratio(n2, d2)), "{first:?} vs {second:?}");
    }
}

#[test]
fn zero_times_split_evenly() {
    let a = c(ProblemKind::Decision, Status::SolvedComplete, 0, None);
    assert_eq!(score_ordered(&a, &a).unwrap(), (ratio(1, 2), ratio(1, 2)));
}

#[test]
fn equal_incomplete_runs_split_evenly() {
    let a = c(ProblemKind::Maximize, Status::SolvedIncomplete, 4, Some(9));
    assert_eq!(score_ordered(&a, &a.clone()).unwrap(), (ratio(1, 2), ratio(1, 2)));
}

#[test]
fn complete_beats_incomplete_with_better_objective() {
    let complete = c(ProblemKind::Minimize, Status::SolvedComplete, 50, Some(10));
    let incomplete = c(ProblemKind::Minimize, Status::SolvedIncomplete, 1, Some(2));
    assert_eq!(score_ordered(&complete, &incomplete).unwrap(), (int(1), int(0)));
}

#[test]
fn mismatched_kinds_are_rejected() {
    let a = c(ProblemKind::Minimize, Status::SolvedComplete, 1, Some(1));
    let b = c(ProblemKind::Maximize, Status::SolvedComplete, 1, Some(1));
    assert!(matches!(score_ordered(&a, &b), Err(Error::KindMismatch)));
}

#[test]
fn borda_three_solvers_one_instance() {
    let mut raw = Raw::new();
    raw.solver("a", true).solver("b", true).solver("c", true);
    raw.instance("i", ProblemKind::Decision, 100_000);
    raw.run("a", "i", Status::SolvedComplete, 10_000, None)
        .run("b", "i", Status::SolvedComplete, 30_000, None)
        .run("c", "i", Status::Unsolved, 100_000, None);
    let m = borda(&raw.build()).unwrap();
    assert_eq!(m.total("a").unwrap(), &ratio(7, 4));
    assert_eq!(m.total("b").unwrap(), &ratio(5, 4));
    assert_eq!(m.total("c").unwrap(), &int(0));
    let order: Vec<String> = m.ranking().into_iter().map(|r| r.solver).collect();
    assert_eq!(order, ["a", "b", "c"]);
}

#[test]
fn borda_both_fail_gives_each_one() {
    let mut raw = Raw::new();
    raw.solver("a", true).solver("b", true);
    raw.instance("i", ProblemKind::Minimize, 5_000);
    raw.run("a", "i", Status::Unsolved, 5_000, None).run("b", "i", Status::Unsolved, 5_000, None);
    let m = borda(&raw.build()).unwrap();
    assert_eq!(m.total("a").unwrap(), &int(1));
    assert_eq!(m.total("b").unwrap(), &int(1));
}

#[test]
fn borda_single_solver_scores_zero() {
    let mut raw = Raw::new();
    raw.solver("solo", true);
    raw.instance("i1", ProblemKind::Decision, 5_000).instance("i2", ProblemKind::Decision, 5_000);
    raw.run("solo", "i1", Status::SolvedComplete, 100, None);
    let m = borda(&raw.build()).unwrap();
    assert_eq!(m.total("solo").unwrap(), &int(0));
}

#[test]
fn borda_ties_rank_by_solver_id() {
    let mut raw = Raw::new();
    raw.solver("zeta", true).solver("alpha", true);
    raw.instance("i", ProblemKind::Decision, 5_000);
    raw.run("zeta", "i", Status::SolvedComplete, 100, None).run("alpha", "i", Status::SolvedComplete, 100, None);
    let order: Vec<String> = borda(&raw.build()).unwrap().ranking().into_iter().map(|r| r.solver).collect();
    assert_eq!(order, ["alpha", "zeta"]);
}

#[test]
fn borda_rejects_empty_dataset() {
    let mut raw = Raw::new();
    raw.instance("i", ProblemKind::Decision, 5_000);
    assert!(matches!(borda(&raw.build()), Err(Error::EmptyDataset)));
}

proptest! {
    #[test]
    fn scores_sum_to_one_and_match_reference((a, b) in arb_pair()) {
        let (s1, s2) = score_ordered(&a, &b).unwrap();
        prop_assert_eq!(&s1 + &s2, Rational::one());
        prop_assert!(s1 >= Rational::zero() && s1 <= Rational::one());
        prop_assert_eq!((s1, s2), ref_score(&a, &b));
    }

    #[test]
    fn swapping_is_complementary_unless_both_fail((a, b) in arb_pair()) {
        let ab = score_ordered(&a, &b).unwrap();
        let ba = score_ordered(&b, &a).unwrap();
        if a.status == Status::Unsolved && b.status == Status::Unsolved {
            prop_assert_eq!(&ab, &(int(1), int(0)));
            prop_assert_eq!(ab, ba);
        } else {
            prop_assert_eq!(ab.0 + ba.0, Rational::one());
        }
    }

    #[test]
    fn scaling_times_leaves_scores_unchanged((a, b) in arb_pair(), factor in 1u64..50) {
        let scale = |x: &Comparable| {
            Comparable::new(x.kind, x.status, Millis::from_millis(x.time.as_millis() * factor), x.objective.clone())
        };
        prop_assert_eq!(score_ordered(&a, &b).unwrap(), score_ordered(&scale(&a), &scale(&b)).unwrap());
    }

    #[test]
    fn instance_totals_count_pairs(seed in any::<u64>(), solvers in 1usize..7, instances in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ds = random_raw(&mut rng, solvers, instances).build();
        prop_assume!(!ds.solvers().is_empty() && !ds.instances().is_empty());
        let m = borda(&ds).unwrap();
        let n = ds.solvers().len() as i64;
        for (i, inst) in ds.instances().iter().enumerate() {
            let unsolved = ds.solvers().iter().filter(|s| ds.run(&s.id, &inst.id).unwrap().status == Status::Unsolved).count() as i64;
            let both_fail_pairs = unsolved * (unsolved - 1) / 2;
            let sum: Rational = m.per_instance.iter().map(|row| row[i].clone()).sum();
            prop_assert_eq!(sum, int(n * (n - 1) / 2 + both_fail_pairs));
        }
        for (k, total) in m.totals.iter().enumerate() {
            let avg = total / int(ds.instances().len() as i64);
            prop_assert_eq!(&m.averages[k], &avg);
        }
    }
}
