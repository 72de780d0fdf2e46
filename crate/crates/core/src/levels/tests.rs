use super::*;
use crate::rat::{frac, int};
use num_traits::Zero;
use proptest::prelude::*;

fn l(m: i64, c: i64) -> LineR2 {
    LineR2::ints(m, c)
}

fn fin(v: i64) -> XB {
    XB::Fin(int(v))
}

fn spans(c: &Chain) -> Vec<(usize, XB, XB)> {
    c.pieces.iter().map(|p| (p.line_id, p.lo.clone(), p.hi.clone())).collect()
}

#[test]
fn envelope_examples() {
    let e = envelope(&[l(0, 0), l(2, -2)], Direction::Lower).unwrap();
    assert_eq!(spans(&e), vec![(1, XB::NegInf, fin(1)), (0, fin(1), XB::PosInf)]);
    assert_eq!(e.kind, ChainKind::Concave);
    let e = envelope(&[l(0, -2), l(2, 0)], Direction::Upper).unwrap();
    assert_eq!(spans(&e), vec![(0, XB::NegInf, fin(-1)), (1, fin(-1), XB::PosInf)]);
    assert_eq!(e.kind, ChainKind::Convex);
    assert!(e.is_well_formed());
    let e = envelope(&[l(3, 1)], Direction::Lower).unwrap();
    assert_eq!(spans(&e), vec![(0, XB::NegInf, XB::PosInf)]);
    assert!(matches!(envelope(&[], Direction::Lower), Err(Error::EmptyInput)));
}

#[test]
fn parallel_lines() {
    let lines = [l(0, 0), l(0, 1), l(0, 2)];
    let s = build_leq_k(&lines, 0, Direction::Lower).unwrap();
    assert!(s.vertices.is_empty());
    let cs = chain_decomposition(&lines, 0, Direction::Lower).unwrap();
    assert_eq!(cs.chains.len(), 1);
    assert_eq!(spans(&cs.chains[0]), vec![(0, XB::NegInf, XB::PosInf)]);
    for k in 0..5 {
        let cs = chain_decomposition(&lines, k, Direction::Lower).unwrap();
        assert_eq!(cs.chains.len(), (k + 1).min(3));
        assert!(cs.chains.iter().all(|c| c.pieces.len() == 1));
    }
}

#[test]
fn two_red_duals() {
    let lines = [l(0, 0), l(2, -2)];
    let s = build_leq_k(&lines, 1, Direction::Lower).unwrap();
    assert_eq!(s.vertices.len(), 1);
    assert_eq!(s.vertices[0].point, PointR2::ints(1, 0));
    assert_eq!(s.vertices[0].level, 0);
    let cs = chain_decomposition(&lines, 1, Direction::Lower).unwrap();
    assert_eq!(cs.chains.len(), 2);
    for id in 0..2 {
        let mut covered: Vec<(XB, XB)> = cs
            .chains
            .iter()
            .flat_map(|c| c.pieces.iter())
            .filter(|p| p.line_id == id)
            .map(|p| (p.lo.clone(), p.hi.clone()))
            .collect();
        covered.sort();
        assert_eq!(covered, vec![(XB::NegInf, XB::PosInf)]);
    }
}

#[test]
fn concurrent_lines() {
    let lines = [l(1, 0), l(-1, 0), l(0, 0)];
    let s = build_leq_k(&lines, 0, Direction::Lower).unwrap();
    // three lines through one point: exactly one distinct vertex
    assert_eq!(s.vertices.len(), 1);
    assert_eq!(s.vertices[0].point, PointR2::ints(0, 0));
    // pulling the middle line down separates it into two envelope vertices
    let lines = [l(1, 0), l(-1, 0), LineR2::new(int(0), frac(-1, 1000))];
    let e = envelope(&lines, Direction::Lower).unwrap();
    assert_eq!(e.vertices().len(), 2);
    let brute = build_leq_k_with(&lines, 0, Direction::Lower, LevelMethod::Brute).unwrap();
    assert_eq!(brute.vertices.len(), 2);
}

#[test]
fn ds3_overlay() {
    let red = [l(0, 0), l(2, -2)];
    let blue = [l(0, -2), l(2, 0)];
    let m = overlay_and_label(&red, &blue, 1).unwrap();
    let f = m.face_at(&PointR2::new(int(1), frac(-1, 2))).unwrap();
    assert_eq!((m.faces[f].mis, m.faces[f].valid), (1, true));
    let f = m.face_at(&PointR2::ints(1, 1)).unwrap();
    assert_eq!((m.faces[f].mis, m.faces[f].valid), (3, false));
    assert_eq!(m.face_at(&PointR2::ints(1, 0)), None);
}

#[test]
fn band_overlays() {
    let m = overlay_and_label(&[l(0, 0)], &[l(0, 1)], 0).unwrap();
    assert_eq!(m.valid_faces().count(), 0);
    let m = overlay_and_label(&[l(0, 1)], &[l(0, 0)], 0).unwrap();
    let valid: Vec<_> = m.valid_faces().collect();
    assert_eq!(valid.len(), 1);
    assert!(valid[0].unbounded);
    assert_eq!(valid[0].sample.y, frac(1, 2));
    assert!(overlay_and_label(&[], &[l(0, 0)], 0).is_err());
}

fn arb_lines(max: usize) -> impl Strategy<Value = Vec<LineR2>> {
    proptest::collection::vec((-6i64..=6, -8i64..=8), 1..max).prop_map(|v| {
        let mut seen = std::collections::HashSet::new();
        v.into_iter().filter(|p| seen.insert(*p)).map(|(m, c)| l(m, c)).collect()
    })
}

fn piece_covers(cs: &ChainSet, e: &LevelEdge) -> bool {
    let mut pieces: Vec<(XB, XB)> = cs
        .chains
        .iter()
        .flat_map(|c| c.pieces.iter())
        .filter(|p| p.line_id == e.line)
        .map(|p| (p.lo.clone(), p.hi.clone()))
        .collect();
    pieces.sort();
    let mut reach = e.lo.clone();
    for (lo, hi) in pieces {
        if lo <= reach && hi > reach {
            reach = hi;
        }
    }
    reach >= e.hi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn sweep_matches_brute(lines in arb_lines(14), k in 0usize..5, upper in any::<bool>()) {
        let dir = if upper { Direction::Upper } else { Direction::Lower };
        let fast = build_leq_k(&lines, k, dir).unwrap();
        let slow = build_leq_k_with(&lines, k, dir, LevelMethod::Brute).unwrap();
        let pts = |s: &LevelSubdivision| s.vertices.iter().map(|v| v.point.clone()).collect::<Vec<_>>();
        let mut a = pts(&fast);
        let mut b = pts(&slow);
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        let work = oriented(&lines, dir);
        for v in &fast.vertices {
            // level soundness, counted on the original side
            let p = match dir { Direction::Lower => v.point.clone(), Direction::Upper => PointR2::new(v.point.x.clone(), -&v.point.y) };
            prop_assert!(count_strict(&work, &p) <= k);
        }
        let cs = chain_decomposition(&lines, k, dir).unwrap();
        prop_assert_eq!(cs.chains.len(), (k + 1).min(lines.len()));
        for c in &cs.chains {
            prop_assert!(c.is_well_formed());
            prop_assert_eq!(c.kind, if upper { ChainKind::Convex } else { ChainKind::Concave });
        }
        for e in &slow.edges {
            prop_assert!(piece_covers(&cs, e), "edge {:?} not covered", e);
        }
        // every piece lies inside the level: test its midpoint
        for c in &cs.chains {
            for p in &c.pieces {
                let x = match (&p.lo, &p.hi) {
                    (XB::Fin(a), XB::Fin(b)) => (a + b) / int(2),
                    (XB::Fin(a), _) => a + int(1),
                    (_, XB::Fin(b)) => b - int(1),
                    _ => Rat::zero(),
                };
                let q = PointR2::new(x.clone(), work[p.line_id].eval(&x));
                prop_assert!(count_strict(&work, &q) <= k);
            }
        }
    }

    #[test]
    fn saturated_counts(lines in arb_lines(14), k in 0usize..4, qs in proptest::collection::vec((-10i64..10, -20i64..20), 1..30)) {
        let queries: Vec<PointR2> = qs.iter().map(|&(x, y)| PointR2::new(frac(x, 2), int(y))).collect();
        let got = count_saturated(&lines, k, &queries);
        for (q, g) in queries.iter().zip(got) {
            prop_assert_eq!(g, count_strict(&lines, q).min(k + 1));
        }
    }

    #[test]
    fn overlay_labels(red in arb_lines(6), blue in arb_lines(6), k in 0usize..4) {
        // duals of distinct points never coincide
        let blue: Vec<LineR2> = blue.into_iter().filter(|b| !red.contains(b)).collect();
        prop_assume!(!blue.is_empty());
        let m = overlay_and_label(&red, &blue, k).unwrap();
        for f in &m.faces {
            let p = &f.sample;
            let rb = count_strict(&red, p);
            let ba = blue.iter().filter(|l| l.eval(&p.x) > p.y).count();
            prop_assert_eq!((f.red_below, f.blue_above), (rb, ba));
            prop_assert_eq!(f.valid, f.mis <= k);
            prop_assert_eq!(m.face_at(p), Some(f.id));
        }
        for &(a, b) in &m.adjacency {
            prop_assert_eq!(m.faces[a].mis.abs_diff(m.faces[b].mis), 1);
        }
    }
}
