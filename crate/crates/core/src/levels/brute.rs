//! Quadratic baseline: every pairwise intersection, filtered by level.

use std::collections::BTreeMap;

use super::{LevelEdge, LevelVertex, XB};
use crate::geom::{LineR2, PointR2};
use crate::rat::{int, Rat};

/// Lines strictly below `p`.
pub fn count_strict(lines: &[LineR2], p: &PointR2) -> usize {
    lines.iter().filter(|l| l.eval(&p.x) < p.y).count()
}

/// Arrangement vertices with at most `k` lines strictly below.
pub fn level_vertices_brute(lines: &[LineR2], k: usize) -> Vec<LevelVertex> {
    let mut at: BTreeMap<PointR2, Vec<usize>> = BTreeMap::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Some(p) = lines[i].meet(&lines[j]) {
                at.entry(p).or_default().extend([i, j]);
            }
        }
    }
    at.into_iter()
        .filter_map(|(point, mut ls)| {
            let level = count_strict(lines, &point);
            ls.sort_unstable();
            ls.dedup();
            (level <= k).then_some(LevelVertex { point, lines: ls, level })
        })
        .collect()
}

/// Vertices and edges of the lower `≤k`-level.
pub fn brute_leq_k(lines: &[LineR2], k: usize) -> (Vec<LevelVertex>, Vec<LevelEdge>) {
    let vertices = level_vertices_brute(lines, k);
    let mut edges = Vec::new();
    for (i, l) in lines.iter().enumerate() {
        let mut xs: Vec<Rat> = lines.iter().filter_map(|o| l.meet_x(o)).collect();
        xs.sort();
        xs.dedup();
        let mut bounds = vec![XB::NegInf];
        bounds.extend(xs.iter().cloned().map(XB::Fin));
        bounds.push(XB::PosInf);
        for w in bounds.windows(2) {
            let sx = match (&w[0], &w[1]) {
                (XB::NegInf, XB::PosInf) => int(0),
                (XB::NegInf, XB::Fin(b)) => b - int(1),
                (XB::Fin(a), XB::PosInf) => a + int(1),
                (XB::Fin(a), XB::Fin(b)) => (a + b) / int(2),
                _ => unreachable!(),
            };
            let p = PointR2::new(sx.clone(), l.eval(&sx));
            let level = count_strict(lines, &p);
            if level <= k {
                edges.push(LevelEdge { line: i, lo: w[0].clone(), hi: w[1].clone(), level });
            }
        }
    }
    (vertices, edges)
}
