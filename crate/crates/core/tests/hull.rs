use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sepkit::geom::classify_mis;
use sepkit::hull::{margin_delete, margin_insert, max_margin_static, strip_is_empty, MarginState, StripSeparator, StripStatus};
use sepkit::rat::{frac, int};
use sepkit::workload::random_points;
use sepkit::{Color, LabeledPoint, PointR2, Rat};

fn dist_sq(p: &PointR2, a: &PointR2, b: &PointR2) -> Rat {
    let (abx, aby) = (&b.x - &a.x, &b.y - &a.y);
    let (apx, apy) = (&p.x - &a.x, &p.y - &a.y);
    let len = &abx * &abx + &aby * &aby;
    let s = if len == int(0) { int(0) } else { ((&apx * &abx + &apy * &aby) / &len).clamp(int(0), int(1)) };
    let (dx, dy) = (apx - &s * abx, apy - &s * aby);
    &dx * &dx + &dy * &dy
}

/// Least distance between a point of one color and a segment of the other.
fn gap_sq(pts: &[LabeledPoint]) -> Rat {
    let mut best: Option<Rat> = None;
    for p in pts {
        let others: Vec<&LabeledPoint> = pts.iter().filter(|q| q.color != p.color).collect();
        for (i, a) in others.iter().enumerate() {
            for b in &others[i..] {
                let d = dist_sq(&p.point, &a.point, &b.point);
                if best.as_ref().map_or(true, |x| &d < x) {
                    best = Some(d);
                }
            }
        }
    }
    best.unwrap()
}

/// Random points relabelled by side of `y = (num/den)·x + c`, dropping points on it.
fn arb_separable() -> impl Strategy<Value = Vec<LabeledPoint>> {
    (any::<u64>(), 2usize..24, -5i64..=5, 1i64..=3, -8i64..=8).prop_map(|(seed, n, num, den, c)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, c) = (frac(num, den), int(c));
        random_points(&mut rng, n, 30, false)
            .into_iter()
            .filter_map(|p| {
                let v = &p.point.y - (&m * &p.point.x + &c);
                if v == int(0) {
                    return None;
                }
                let color = if v > int(0) { Color::Blue } else { Color::Red };
                Some(LabeledPoint { color, ..p })
            })
            .collect()
    })
}

fn both(pts: &[LabeledPoint]) -> bool {
    pts.iter().any(|p| p.color == Color::Red) && pts.iter().any(|p| p.color == Color::Blue)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn width_is_hull_distance(pts in arb_separable()) {
        prop_assume!(both(&pts));
        let res = max_margin_static(&pts);
        prop_assert_eq!(res.status, StripStatus::Separable);
        prop_assert_eq!(res.width_sq.clone().unwrap(), gap_sq(&pts));
        prop_assert!(strip_is_empty(&res, &pts));
        let w = res.witness.clone().unwrap();
        let (dx, dy) = (&w.blue_point.x - &w.red_point.x, &w.blue_point.y - &w.red_point.y);
        match res.separator.clone().unwrap() {
            StripSeparator::Line(s) => {
                prop_assert_eq!(&dx + &s.line.m * &dy, int(0));
                let mx = (&w.red_point.x + &w.blue_point.x) / int(2);
                let my = (&w.red_point.y + &w.blue_point.y) / int(2);
                prop_assert_eq!(s.line.eval(&mx), my);
                prop_assert_eq!(classify_mis(&s, &pts).mis, 0);
            }
            StripSeparator::Vertical { x, blue_on_right } => {
                prop_assert_eq!(dy, int(0));
                prop_assert_eq!(x * int(2), &w.red_point.x + &w.blue_point.x);
                prop_assert_eq!(blue_on_right, dx > int(0));
            }
        }
    }

    #[test]
    fn dynamic_matches_static(pts in arb_separable(), order in proptest::collection::vec(any::<prop::sample::Index>(), 0..16)) {
        let mut st = MarginState::build(&[]).unwrap();
        for p in &pts {
            prop_assert_eq!(margin_insert(&mut st, p).unwrap(), max_margin_static(&st.points()));
        }
        for ix in order {
            let live = st.points();
            if live.is_empty() {
                break;
            }
            let id = live[ix.index(live.len())].id;
            let got = margin_delete(&mut st, id).unwrap();
            prop_assert_eq!(&got, &max_margin_static(&st.points()));
            prop_assert!(strip_is_empty(&got, &st.points()));
        }
    }

    #[test]
    fn random_colors_never_cross(seed in any::<u64>(), n in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = random_points(&mut rng, n, 10, false);
        let res = max_margin_static(&pts);
        match res.status {
            StripStatus::Separable => {
                prop_assert!(strip_is_empty(&res, &pts));
                prop_assert_eq!(res.width_sq.unwrap(), gap_sq(&pts));
            }
            StripStatus::NotSeparable => prop_assert!(res.width_sq.is_none()),
            StripStatus::EmptySide => prop_assert!(!both(&pts)),
        }
    }
}
