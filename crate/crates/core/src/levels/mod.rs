//! ≤k-levels of line arrangements, envelopes, chain decompositions and the
//! red/blue overlay with per-face misclassification labels.
//!
//! `Lower` levels count lines strictly below a point, `Upper` levels count
//! lines strictly above. Upper structures are computed on negated lines.

mod brute;
mod chain;
mod overlay;
mod sweep;

use crate::geom::{LineR2, PointR2};
use crate::rat::Rat;
use crate::Error;

pub use brute::{brute_leq_k, count_strict, level_vertices_brute};
pub use chain::{ge_interval, Chain, ChainKind, Piece};
pub use overlay::{overlay_and_label, OverlayCell, OverlayFace, OverlayFaceMap};
pub use sweep::{count_saturated, sweep_lower, SweepOutput};

/// Extended x-coordinate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum XB {
    NegInf,
    Fin(Rat),
    PosInf,
}

impl XB {
    pub fn fin(&self) -> Option<&Rat> {
        match self {
            XB::Fin(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, XB::Fin(_))
    }

    pub fn neg(&self) -> XB {
        match self {
            XB::NegInf => XB::PosInf,
            XB::PosInf => XB::NegInf,
            XB::Fin(x) => XB::Fin(-x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelMethod {
    /// Kinetic sweep over the bottom `k+1` lines.
    Sweep,
    /// All pairwise intersections with level filtering.
    Brute,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelVertex {
    pub point: PointR2,
    /// Lines swapped at the vertex, sorted. With concurrent lines this may
    /// be a subset of the lines through it.
    pub lines: Vec<usize>,
    pub level: usize,
}

/// A maximal segment of one input line between consecutive vertices on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelEdge {
    pub line: usize,
    pub lo: XB,
    pub hi: XB,
    pub level: usize,
}

#[derive(Clone, Debug)]
pub struct LevelSubdivision {
    pub direction: Direction,
    pub k: usize,
    pub lines: Vec<LineR2>,
    pub vertices: Vec<LevelVertex>,
    pub edges: Vec<LevelEdge>,
}

impl LevelSubdivision {
    /// Edge count, recorded against the `O(nk)` regime.
    pub fn complexity(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainSource {
    Static,
    Layer(usize),
    Leftover,
}

#[derive(Clone, Debug)]
pub struct ChainSet {
    pub direction: Direction,
    pub k: usize,
    pub source: ChainSource,
    pub chains: Vec<Chain>,
}

impl ChainSet {
    pub fn piece_count(&self) -> usize {
        self.chains.iter().map(|c| c.pieces.len()).sum()
    }
}

fn oriented(lines: &[LineR2], dir: Direction) -> Vec<LineR2> {
    match dir {
        Direction::Lower => lines.to_vec(),
        Direction::Upper => lines.iter().map(LineR2::negated).collect(),
    }
}

/// Lower or upper envelope as a single chain.
pub fn envelope(lines: &[LineR2], dir: Direction) -> Result<Chain, Error> {
    let mut cs = chain_decomposition(lines, 0, dir)?;
    Ok(cs.chains.swap_remove(0))
}

/// `min(k+1, n)` concave (Lower) or convex (Upper) chains whose values at each x
/// are the `k+1` lowest (highest) line values there.
pub fn chain_decomposition(lines: &[LineR2], k: usize, dir: Direction) -> Result<ChainSet, Error> {
    if lines.is_empty() {
        return Err(Error::EmptyInput);
    }
    let out = sweep_lower(&oriented(lines, dir), k, &[], false);
    let chains = match dir {
        Direction::Lower => out.chains,
        Direction::Upper => out.chains.iter().map(|c| c.negated(lines)).collect(),
    };
    Ok(ChainSet { direction: dir, k, source: ChainSource::Static, chains })
}

pub fn build_leq_k(lines: &[LineR2], k: usize, dir: Direction) -> Result<LevelSubdivision, Error> {
    build_leq_k_with(lines, k, dir, LevelMethod::Sweep)
}

pub fn build_leq_k_with(lines: &[LineR2], k: usize, dir: Direction, method: LevelMethod) -> Result<LevelSubdivision, Error> {
    if lines.is_empty() {
        return Err(Error::EmptyInput);
    }
    let work = oriented(lines, dir);
    let (vertices, edges) = match method {
        LevelMethod::Sweep => {
            let out = sweep_lower(&work, k, &[], true);
            (merge_vertices(out.vertices), out.edges)
        }
        LevelMethod::Brute => brute_leq_k(&work, k),
    };
    let (vertices, edges) = match dir {
        Direction::Lower => (vertices, edges),
        Direction::Upper => (
            vertices
                .into_iter()
                .map(|v| LevelVertex { point: PointR2::new(v.point.x, -v.point.y), ..v })
                .collect(),
            edges,
        ),
    };
    Ok(LevelSubdivision { direction: dir, k, lines: lines.to_vec(), vertices, edges })
}

/// Collapses coincident sweep vertices (concurrent lines) into one.
fn merge_vertices(mut vs: Vec<LevelVertex>) -> Vec<LevelVertex> {
    vs.sort_by(|a, b| a.point.cmp(&b.point));
    let mut out: Vec<LevelVertex> = Vec::with_capacity(vs.len());
    for v in vs {
        match out.last_mut() {
            Some(last) if last.point == v.point => {
                last.lines.extend(v.lines);
                last.lines.sort_unstable();
                last.lines.dedup();
                last.level = last.level.min(v.level);
            }
            _ => out.push(v),
        }
    }
    out
}

#[cfg(test)]
mod tests;
