//! Static leftmost-valid-point solver over chain decompositions.

use num_traits::Zero;

use super::ply::PlyStructure;
use super::{ConstraintSet, LPResult, UnboundedReason};
use crate::geom::{LineR2, PointR2};
use crate::levels::{chain_decomposition, ge_interval, Chain, Direction, XB};
use crate::rat::Rat;
use crate::treap::{Dir, Treap};

/// Order of lines far to the left: bottom to top.
pub(crate) fn far_key(l: &LineR2) -> (Rat, Rat) {
    (-&l.m, l.c.clone())
}

/// Fewest violations achievable by points with arbitrarily small x.
pub fn far_left_min(cs: &ConstraintSet) -> usize {
    let mut t = Treap::new();
    for (_, l) in &cs.red {
        t.add(far_key(l), 1, 0);
    }
    for (_, l) in &cs.blue {
        t.add(far_key(l), 0, 1);
    }
    t.min_mis(Dir::AB)
}

/// A red-blue chain intersection with its saturated violation count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidatePoint {
    pub point: PointR2,
    pub red_chain: usize,
    pub blue_chain: usize,
    /// Exact when at most the decomposition level.
    pub count: usize,
}

/// Intervals, ply lists and evaluated intersections of red chains against blue chains.
pub fn chain_candidates(red: &[Chain], blue: &[Chain]) -> (Vec<PlyStructure>, Vec<PlyStructure>, Vec<CandidatePoint>) {
    let zero = Rat::zero();
    let mut rp = vec![PlyStructure::new(); red.len()];
    let mut bp = vec![PlyStructure::new(); blue.len()];
    let mut raw = Vec::new();
    for (i, r) in red.iter().enumerate() {
        for (j, b) in blue.iter().enumerate() {
            let iv = ge_interval(r, &zero, b, &zero);
            if let Some((lo, hi)) = &iv {
                for e in [lo, hi] {
                    if let XB::Fin(x) = e {
                        raw.push((i, j, x.clone()));
                    }
                }
                if lo == hi {
                    raw.pop();
                }
            }
            rp[i].add(&iv);
            bp[j].add(&iv);
        }
    }
    let cands = raw
        .into_iter()
        .map(|(i, j, x)| {
            let y = red[i].eval(&x).expect("chains span the line");
            let count = rp[i].ply(&x) + bp[j].ply(&x);
            CandidatePoint { point: PointR2::new(x, y), red_chain: i, blue_chain: j, count }
        })
        .collect();
    (rp, bp, cands)
}

/// Far-left minimum and all candidates, with chains at level `level`.
fn candidates_at(cs: &ConstraintSet, level: usize) -> (usize, Vec<CandidatePoint>) {
    let red = chain_decomposition(&cs.red_lines(), level, Direction::Lower).expect("nonempty").chains;
    let blue = chain_decomposition(&cs.blue_lines(), level, Direction::Upper).expect("nonempty").chains;
    (far_left_min(cs), chain_candidates(&red, &blue).2)
}

fn pick(far: usize, cands: &[CandidatePoint], k: usize) -> LPResult {
    if far <= k {
        return LPResult::Unbounded(UnboundedReason::LeftRay);
    }
    cands
        .iter()
        .filter(|c| c.count <= k)
        .min_by(|a, b| a.point.cmp(&b.point))
        .map_or(LPResult::Infeasible, |c| LPResult::Feasible { point: c.point.clone(), violations: c.count })
}

/// Leftmost point violating at most `k` constraints.
pub fn static_leftmost_valid(cs: &ConstraintSet, k: usize) -> LPResult {
    if cs.red.is_empty() || cs.blue.is_empty() {
        return LPResult::Unbounded(UnboundedReason::EmptySide);
    }
    let (far, cands) = candidates_at(cs, k);
    pick(far, &cands, k)
}

/// Smallest feasible budget and the leftmost point for it. The level is
/// doubled until some candidate or the far left fits inside it.
pub fn static_min_violations(cs: &ConstraintSet) -> (usize, LPResult) {
    if cs.red.is_empty() || cs.blue.is_empty() {
        return (0, LPResult::Unbounded(UnboundedReason::EmptySide));
    }
    let mut level = 0;
    loop {
        let (far, cands) = candidates_at(cs, level);
        let best = cands.iter().map(|c| c.count).min().map_or(far, |m| m.min(far));
        if best <= level {
            return (best, pick(far, &cands, best));
        }
        level = if level == 0 { 1 } else { level * 2 };
    }
}

/// Smaller k_min of two constraint sets (the two orientations of one point
/// set). Both are searched level by level together, so the cost follows the
/// smaller value instead of the larger.
pub fn static_min_violations_pair(a: &ConstraintSet, b: &ConstraintSet) -> usize {
    let empty = |cs: &ConstraintSet| cs.red.is_empty() || cs.blue.is_empty();
    if empty(a) || empty(b) {
        return 0;
    }
    let mut level = 0;
    loop {
        let best = [a, b]
            .into_iter()
            .map(|cs| {
                let (far, cands) = candidates_at(cs, level);
                cands.iter().map(|c| c.count).min().map_or(far, |m| m.min(far))
            })
            .min()
            .expect("two sets");
        if best <= level {
            return best;
        }
        level = if level == 0 { 1 } else { level * 2 };
    }
}
