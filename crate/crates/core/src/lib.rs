//! Robust linear separators for red/blue point sets in the plane and on the line.
//!
//! Everything is computed with exact rationals. The main entry points are
//! [`exact::solve_exact`], [`approx::solve_approx`], [`lpviol::static_leftmost_valid`],
//! [`lpviol::DynState`], [`sep1d::Tree1D`] and [`hull::max_margin_static`].

pub mod approx;
pub mod exact;
pub mod geom;
pub mod hull;
pub mod io;
pub mod levels;
pub mod lpviol;
pub mod oracle;
pub mod rat;
pub mod report;
pub mod sep1d;
pub mod svg;
pub mod treap;
pub mod workload;

pub use geom::{Color, LabeledPoint, LineR2, MisReport, Orientation, PointR2, Separator};
pub use rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("duplicate coordinate: {0}")]
    DuplicateCoordinate(String),
    #[error("duplicate id {0}")]
    DuplicateId(usize),
    #[error("unknown id {0}")]
    UnknownId(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("one color class is empty")]
    EmptyColor,
    #[error("eps must be positive")]
    NonPositiveEps,
    #[error("no valid separator in this wedge")]
    InfeasibleWedge,
    #[error("no separator with at most {k} misclassifications (k_min = {k_min})")]
    Infeasible { k: usize, k_min: usize },
    #[error("schedule violation: {0}")]
    ScheduleViolation(String),
    #[error("input size {n} exceeds oracle cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("internal invariant failed: {0}")]
    Internal(String),
}
