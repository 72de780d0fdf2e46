//! Linear programming with at most `k` violated constraints, objective "leftmost point".
//!
//! Red lines bound lower halfplanes and blue lines bound upper halfplanes: a
//! point violates a red line lying strictly below it and a blue line lying
//! strictly above it. In the dual of a separation problem with blue above,
//! red points become red lines and violations are misclassifications.

mod dynamic;
mod ply;
pub mod ptree;
mod solve;

use crate::geom::{dualize_point, Color, LabeledPoint, LineR2, Orientation, PointR2};

pub use dynamic::{dyn_build, dyn_query, dyn_query_kmin, dyn_update, DynMode, DynOp, DynState, DynStats};
pub use ply::PlyStructure;
pub use ptree::{KdPartitioner, Partitioner, PtForest, Side, SkewPartitioner};
pub use solve::{chain_candidates, far_left_min, static_leftmost_valid, static_min_violations, static_min_violations_pair, CandidatePoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSet {
    pub red: Vec<(usize, LineR2)>,
    pub blue: Vec<(usize, LineR2)>,
}

impl ConstraintSet {
    /// Reds get ids `0..r`, blues continue from `r`.
    pub fn new(red: Vec<LineR2>, blue: Vec<LineR2>) -> Self {
        let nr = red.len();
        ConstraintSet {
            red: red.into_iter().enumerate().collect(),
            blue: blue.into_iter().enumerate().map(|(i, l)| (nr + i, l)).collect(),
        }
    }

    /// Dual constraints of a point set. For `RedAbove` the colors trade roles.
    pub fn from_points(pts: &[LabeledPoint], o: Orientation) -> Self {
        let lower_color = match o {
            Orientation::BlueAbove => Color::Red,
            Orientation::RedAbove => Color::Blue,
        };
        let mut cs = ConstraintSet { red: Vec::new(), blue: Vec::new() };
        for p in pts {
            let l = dualize_point(&p.point);
            if p.color == lower_color {
                cs.red.push((p.id, l));
            } else {
                cs.blue.push((p.id, l));
            }
        }
        cs
    }

    pub fn len(&self) -> usize {
        self.red.len() + self.blue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.red.is_empty() && self.blue.is_empty()
    }

    pub fn red_lines(&self) -> Vec<LineR2> {
        self.red.iter().map(|(_, l)| l.clone()).collect()
    }

    pub fn blue_lines(&self) -> Vec<LineR2> {
        self.blue.iter().map(|(_, l)| l.clone()).collect()
    }

    /// Exact violation count at `p`.
    pub fn violations(&self, p: &PointR2) -> usize {
        self.red.iter().filter(|(_, l)| l.eval(&p.x) < p.y).count()
            + self.blue.iter().filter(|(_, l)| l.eval(&p.x) > p.y).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnboundedReason {
    /// Some leftward ray stays within the violation budget.
    LeftRay,
    /// One color has no constraints at all.
    EmptySide,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LPResult {
    Feasible { point: PointR2, violations: usize },
    Unbounded(UnboundedReason),
    Infeasible,
}

impl LPResult {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, LPResult::Infeasible)
    }
}

#[cfg(test)]
mod tests;
