use std::collections::HashMap;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geom::{Color, LabeledPoint, LineR2, Orientation, PointR2};
use crate::levels::{chain_decomposition, Direction};
use crate::oracle::{oracle_leftmost_valid, oracle_min_violations};
use crate::rat::{frac, int};
use crate::workload::line_sequence;

fn l(m: i64, c: i64) -> LineR2 {
    LineR2::ints(m, c)
}

fn ds3() -> ConstraintSet {
    let pts = [
        LabeledPoint::ints(0, 0, Color::Red, 0),
        LabeledPoint::ints(2, 2, Color::Red, 1),
        LabeledPoint::ints(0, 2, Color::Blue, 2),
        LabeledPoint::ints(2, 0, Color::Blue, 3),
    ];
    ConstraintSet::from_points(&pts, Orientation::BlueAbove)
}

#[test]
fn static_examples() {
    let cs = ConstraintSet::new(vec![l(1, 0)], vec![l(-1, 0)]);
    assert_eq!(static_leftmost_valid(&cs, 0), LPResult::Feasible { point: PointR2::ints(0, 0), violations: 0 });
    let cs = ConstraintSet::new(vec![l(0, 0)], vec![l(0, 1)]);
    assert_eq!(static_leftmost_valid(&cs, 0), LPResult::Infeasible);
    assert_eq!(static_leftmost_valid(&cs, 1), LPResult::Unbounded(UnboundedReason::LeftRay));
    assert_eq!(static_leftmost_valid(&ds3(), 1), LPResult::Unbounded(UnboundedReason::LeftRay));
    let cs = ConstraintSet::new(vec![], vec![l(0, 1)]);
    assert_eq!(static_leftmost_valid(&cs, 0), LPResult::Unbounded(UnboundedReason::EmptySide));
}

#[test]
fn min_violation_examples() {
    assert_eq!(static_min_violations(&ds3()).0, 1);
    assert_eq!(static_min_violations(&ds3()), oracle_min_violations(&ds3()));
    let cs = ConstraintSet::new(vec![l(0, 1)], vec![l(0, 0)]);
    assert_eq!(static_min_violations(&cs).0, 0);
    let cs = ConstraintSet::new(vec![l(0, 0), l(0, 1)], vec![LineR2::new(int(0), frac(1, 2))]);
    let got = static_min_violations(&cs);
    assert_eq!(got, oracle_min_violations(&cs));
    assert_eq!(got.0, 1);
}

#[test]
fn dynamic_examples() {
    let mut st = dyn_build(&ds3(), &HashMap::new(), 1).unwrap();
    let before = dyn_query(&st, 1).unwrap();
    // a red line above every candidate is satisfied by all of them
    dyn_update(&mut st, DynOp::Insert { color: Color::Red, line: l(0, 1000), delete_at: None }).unwrap();
    assert_eq!(dyn_query(&st, 1).unwrap(), before);

    let cs = ConstraintSet::new(vec![l(1, 0)], vec![l(-1, 0)]);
    let mut st = dyn_build(&cs, &HashMap::new(), 0).unwrap();
    let id = dyn_update(&mut st, DynOp::Insert { color: Color::Blue, line: l(-1, 10), delete_at: Some(3) }).unwrap().unwrap();
    assert_eq!(dyn_query(&st, 0).unwrap(), static_leftmost_valid(&st.live_set(), 0));
    dyn_update(&mut st, DynOp::Insert { color: Color::Red, line: l(2, 1), delete_at: None }).unwrap();
    assert_eq!(dyn_query(&st, 0).unwrap(), static_leftmost_valid(&st.live_set(), 0));
    dyn_update(&mut st, DynOp::Delete { id }).unwrap();
    assert_eq!(dyn_query(&st, 0).unwrap(), static_leftmost_valid(&st.live_set(), 0));

    let mut sched = HashMap::new();
    sched.insert(1, 1);
    let mut st = dyn_build(&cs, &sched, 0).unwrap();
    dyn_update(&mut st, DynOp::Delete { id: 1 }).unwrap();
    assert_eq!(dyn_query(&st, 0).unwrap(), LPResult::Unbounded(UnboundedReason::EmptySide));
}

#[test]
fn schedule_errors() {
    let cs = ConstraintSet::new(vec![l(1, 0)], vec![l(-1, 0)]);
    let mut sched = HashMap::new();
    sched.insert(0, 5);
    let mut st = dyn_build(&cs, &sched, 0).unwrap();
    assert!(matches!(dyn_update(&mut st, DynOp::Delete { id: 0 }), Err(crate::Error::ScheduleViolation(_))));
    assert!(matches!(dyn_update(&mut st, DynOp::Delete { id: 1 }), Err(crate::Error::ScheduleViolation(_))));
    assert!(matches!(dyn_update(&mut st, DynOp::Delete { id: 9 }), Err(crate::Error::UnknownId(9))));
    assert_eq!(st.updates(), 0);
}

#[test]
fn kmin_examples() {
    let st = DynState::build(&ds3(), &HashMap::new(), DynMode::Kmin).unwrap();
    assert_eq!(dyn_query_kmin(&st).unwrap(), (1, LPResult::Unbounded(UnboundedReason::LeftRay)));
    let cs = ConstraintSet::new(vec![l(0, 1)], vec![]);
    let mut st = DynState::build(&cs, &HashMap::new(), DynMode::Kmin).unwrap();
    dyn_update(&mut st, DynOp::Insert { color: Color::Blue, line: l(0, 0), delete_at: None }).unwrap();
    assert_eq!(dyn_query_kmin(&st).unwrap().0, 0);
}

fn run_sequence(seed: u64, n0: usize, ops: usize, mode: DynMode, skew: bool, audit_every: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq = line_sequence(&mut rng, n0, ops, 40, 3 * n0.max(8));
    let part: Arc<dyn Partitioner> = if skew { Arc::new(SkewPartitioner) } else { Arc::new(KdPartitioner) };
    let mut st = DynState::build_with(&seq.initial, &seq.schedule, mode, part).unwrap();
    let mut prev_kmin = None;
    for (i, op) in seq.ops.into_iter().enumerate() {
        let inserting = matches!(op, DynOp::Insert { .. });
        st.update(op).unwrap();
        let live = st.live_set();
        match mode {
            DynMode::Fixed(k) => {
                for kk in [0, k / 2, k] {
                    assert_eq!(st.query(kk).unwrap(), static_leftmost_valid(&live, kk), "seed {seed} op {i} k {kk}");
                }
            }
            DynMode::Kmin => {
                let got = st.query_kmin().unwrap();
                assert_eq!(got, static_min_violations(&live), "seed {seed} op {i}");
                if let (Some(p), true) = (prev_kmin, inserting) {
                    assert!(got.0 <= p + 1);
                }
                prev_kmin = Some(got.0);
            }
        }
        if audit_every > 0 && i % audit_every == 0 {
            st.audit().unwrap_or_else(|e| panic!("seed {seed} op {i}: {e}"));
        }
    }
}

#[test]
fn dynamic_matches_static_fixed() {
    for seed in 0..4 {
        run_sequence(seed, 12, 120, DynMode::Fixed(3), false, 1);
    }
    run_sequence(10, 20, 150, DynMode::Fixed(0), false, 5);
}

#[test]
fn dynamic_matches_static_skewed_partitions() {
    for seed in 20..22 {
        run_sequence(seed, 12, 100, DynMode::Fixed(2), true, 1);
    }
}

#[test]
fn dynamic_kmin_matches_static() {
    for seed in 30..33 {
        run_sequence(seed, 10, 100, DynMode::Kmin, false, 3);
    }
}

fn arb_cs() -> impl Strategy<Value = ConstraintSet> {
    // duals of distinct points, so no red line coincides with a blue one
    proptest::collection::btree_set((-6i64..=6, -8i64..=8), 1..16).prop_flat_map(|pts| {
        let pts: Vec<(i64, i64)> = pts.into_iter().collect();
        let n = pts.len();
        (Just(pts), proptest::collection::vec(any::<bool>(), n))
    })
    .prop_map(|(pts, colors)| {
        let (mut red, mut blue) = (Vec::new(), Vec::new());
        for ((a, b), r) in pts.into_iter().zip(colors) {
            if r { red.push(l(a, -b)) } else { blue.push(l(a, -b)) }
        }
        ConstraintSet::new(red, blue)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn static_matches_oracle(cs in arb_cs(), k in 0usize..6) {
        prop_assert_eq!(static_leftmost_valid(&cs, k), oracle_leftmost_valid(&cs, k));
        prop_assert_eq!(static_min_violations(&cs), oracle_min_violations(&cs));
    }

    #[test]
    fn ply_counts_chains(cs in arb_cs(), k in 0usize..4, probes in proptest::collection::vec((-20i64..20, any::<bool>()), 1..10)) {
        prop_assume!(!cs.red.is_empty() && !cs.blue.is_empty());
        let red = chain_decomposition(&cs.red_lines(), k, Direction::Lower).unwrap().chains;
        let blue = chain_decomposition(&cs.blue_lines(), k, Direction::Upper).unwrap().chains;
        let (rp, bp, _) = chain_candidates(&red, &blue);
        for (x2, on_red) in probes {
            let x = frac(x2, 2);
            if on_red {
                for (i, r) in red.iter().enumerate() {
                    let y = r.eval(&x).unwrap();
                    let direct = blue.iter().filter(|b| b.eval(&x).unwrap() > y).count();
                    prop_assert_eq!(rp[i].ply(&x), direct);
                }
            } else {
                for (j, b) in blue.iter().enumerate() {
                    let y = b.eval(&x).unwrap();
                    let direct = red.iter().filter(|r| r.eval(&x).unwrap() < y).count();
                    prop_assert_eq!(bp[j].ply(&x), direct);
                }
            }
        }
    }
}
