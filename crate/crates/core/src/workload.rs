//! Seeded random instances and semi-online update sequences.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::Rng;

use crate::geom::{dualize_point, Color, LabeledPoint, LineR2, PointR2};
use crate::lpviol::{ConstraintSet, DynOp};
use crate::rat::int;

/// Distinct integer points with coordinates in `-range..=range`, colors at random.
/// With `general` no two share an x-coordinate and no three are collinear.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, range: i64, general: bool) -> Vec<LabeledPoint> {
    let mut out: Vec<(i64, i64)> = Vec::with_capacity(n);
    let mut seen = HashSet::new();
    let mut tries = 0;
    while out.len() < n && tries < 200 * n + 1000 {
        tries += 1;
        let p = (rng.gen_range(-range..=range), rng.gen_range(-range..=range));
        if seen.contains(&p) || (general && !fits_general(&out, p)) {
            continue;
        }
        seen.insert(p);
        out.push(p);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, (x, y))| LabeledPoint::ints(x, y, if rng.gen() { Color::Red } else { Color::Blue }, i))
        .collect()
}

fn fits_general(pts: &[(i64, i64)], p: (i64, i64)) -> bool {
    if pts.iter().any(|q| q.0 == p.0) {
        return false;
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (a, b) = (pts[i], pts[j]);
            if (b.0 - a.0) * (p.1 - a.1) == (b.1 - a.1) * (p.0 - a.0) {
                return false;
            }
        }
    }
    true
}

/// Abstract update: ids of inserted items continue after the initial ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Insert { delete_at: Option<u64> },
    Delete { id: usize },
}

/// Deletion times for `n0` initial items and `ops` events, all deletions
/// happening exactly at their promised update index (numbered from 1).
pub fn schedule_events<R: Rng>(rng: &mut R, n0: usize, ops: usize, never: f64, max_live: usize) -> (Vec<Option<u64>>, Vec<Event>) {
    let horizon = ops as u64;
    let mut free: BTreeSet<u64> = (1..=horizon).collect();
    let mut due: HashMap<u64, usize> = HashMap::new();
    let pick = |rng: &mut R, free: &mut BTreeSet<u64>, after: u64| -> Option<u64> {
        if rng.gen_bool(never) {
            return None;
        }
        let cands: Vec<u64> = free.range(after + 1..).copied().collect();
        if cands.is_empty() {
            return None;
        }
        let t = cands[rng.gen_range(0..cands.len())];
        free.remove(&t);
        Some(t)
    };
    let mut initial = Vec::with_capacity(n0);
    for id in 0..n0 {
        let d = pick(rng, &mut free, 0);
        if let Some(t) = d {
            due.insert(t, id);
        }
        initial.push(d);
    }
    let mut live = n0;
    let mut next = n0;
    let mut events = Vec::with_capacity(ops);
    for t in 1..=horizon {
        if let Some(id) = due.remove(&t) {
            events.push(Event::Delete { id });
            live -= 1;
            continue;
        }
        free.remove(&t);
        let d = if live >= max_live {
            // keep the live set bounded: this one dies at the next free slot
            free.range(t + 1..).next().copied().inspect(|s| {
                free.remove(s);
            })
        } else {
            pick(rng, &mut free, t)
        };
        if let Some(s) = d {
            due.insert(s, next);
        }
        events.push(Event::Insert { delete_at: d });
        next += 1;
        live += 1;
    }
    (initial, events)
}

/// A semi-online line sequence for the dynamic LP.
#[derive(Clone, Debug)]
pub struct LineSequence {
    pub initial: ConstraintSet,
    pub schedule: HashMap<usize, u64>,
    pub ops: Vec<DynOp>,
}

/// Lines are duals of distinct integer points, so no red line equals a blue one.
pub fn line_sequence<R: Rng>(rng: &mut R, n0: usize, ops: usize, range: i64, max_live: usize) -> LineSequence {
    let (initial, events) = schedule_events(rng, n0, ops, 0.15, max_live);
    let mut used = HashSet::new();
    let mut fresh = |rng: &mut R| loop {
        let p = (rng.gen_range(-range..=range), rng.gen_range(-range..=range));
        if used.insert(p) {
            return (if rng.gen() { Color::Red } else { Color::Blue }, dualize_point(&PointR2::ints(p.0, p.1)));
        }
    };
    let mut cs = ConstraintSet { red: Vec::new(), blue: Vec::new() };
    let mut schedule = HashMap::new();
    for (id, d) in initial.into_iter().enumerate() {
        let (c, l) = fresh(rng);
        match c {
            Color::Red => cs.red.push((id, l)),
            Color::Blue => cs.blue.push((id, l)),
        }
        if let Some(t) = d {
            schedule.insert(id, t);
        }
    }
    let ops = events
        .into_iter()
        .map(|e| match e {
            Event::Insert { delete_at } => {
                let (color, line) = fresh(rng);
                DynOp::Insert { color, line, delete_at }
            }
            Event::Delete { id } => DynOp::Delete { id },
        })
        .collect();
    LineSequence { initial: cs, schedule, ops }
}

/// Point update for the dynamic separator structures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointOp {
    Insert { point: LabeledPoint, delete_at: Option<u64> },
    Delete { id: usize },
}

#[derive(Clone, Debug)]
pub struct PointSequence {
    pub initial: Vec<LabeledPoint>,
    pub schedule: HashMap<usize, u64>,
    pub ops: Vec<PointOp>,
}

/// Distinct integer points inserted and deleted on a semi-online schedule.
pub fn point_sequence<R: Rng>(rng: &mut R, n0: usize, ops: usize, range: i64, max_live: usize) -> PointSequence {
    let (initial, events) = schedule_events(rng, n0, ops, 0.15, max_live);
    let mut used = HashSet::new();
    let mut fresh = |rng: &mut R, id: usize| loop {
        let p = (rng.gen_range(-range..=range), rng.gen_range(-range..=range));
        if used.insert(p) {
            let c = if rng.gen() { Color::Red } else { Color::Blue };
            return LabeledPoint::new(int(p.0), int(p.1), c, id);
        }
    };
    let mut pts = Vec::new();
    let mut schedule = HashMap::new();
    for (id, d) in initial.into_iter().enumerate() {
        pts.push(fresh(rng, id));
        if let Some(t) = d {
            schedule.insert(id, t);
        }
    }
    let mut next = pts.len();
    let ops = events
        .into_iter()
        .map(|e| match e {
            Event::Insert { delete_at } => {
                next += 1;
                PointOp::Insert { point: fresh(rng, next - 1), delete_at }
            }
            Event::Delete { id } => PointOp::Delete { id },
        })
        .collect();
    PointSequence { initial: pts, schedule, ops }
}

/// Red lines above the blue ones with a few swapped: an LP instance with a small optimum.
pub fn planted_lines<R: Rng>(rng: &mut R, n: usize, flips: usize) -> ConstraintSet {
    let mut red = Vec::new();
    let mut blue = Vec::new();
    let mut used = HashSet::new();
    while red.len() + blue.len() < n {
        let m = rng.gen_range(-8i64..=8);
        let c = rng.gen_range(1i64..=30);
        let is_red = rng.gen::<bool>();
        let c = if is_red { c } else { -c };
        if !used.insert((m, c)) {
            continue;
        }
        let l = LineR2::new(int(m), int(c));
        if is_red { red.push(l) } else { blue.push(l) }
    }
    for _ in 0..flips.min(red.len().min(blue.len())) {
        let i = rng.gen_range(0..red.len());
        let j = rng.gen_range(0..blue.len());
        std::mem::swap(&mut red[i], &mut blue[j]);
    }
    ConstraintSet::new(red, blue)
}
