//! Planar primitives, point-line duality and misclassification evaluation.
//!
//! Duality: the point `(a, b)` maps to the line `y = a·x − b`, and the line
//! `y = m·x + c` maps to the point `(m, −c)`. Vertical distances and
//! above/below relations are preserved (with the roles swapped).

use std::cmp::Ordering;
use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::{int, Rat};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointR2 {
    pub x: Rat,
    pub y: Rat,
}

impl PointR2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        PointR2 { x, y }
    }

    pub fn ints(x: i64, y: i64) -> Self {
        PointR2 { x: int(x), y: int(y) }
    }
}

/// Non-vertical line `y = m·x + c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineR2 {
    pub m: Rat,
    pub c: Rat,
}

impl LineR2 {
    pub fn new(m: Rat, c: Rat) -> Self {
        LineR2 { m, c }
    }

    pub fn ints(m: i64, c: i64) -> Self {
        LineR2 { m: int(m), c: int(c) }
    }

    #[inline]
    pub fn eval(&self, x: &Rat) -> Rat {
        &self.m * x + &self.c
    }

    /// Line through two points with distinct x.
    pub fn through(p: &PointR2, q: &PointR2) -> Option<LineR2> {
        let dx = &q.x - &p.x;
        if dx.is_zero() {
            return None;
        }
        let m = (&q.y - &p.y) / dx;
        let c = &p.y - &m * &p.x;
        Some(LineR2 { m, c })
    }

    /// x-coordinate where the two lines meet; `None` for parallel lines.
    pub fn meet_x(&self, other: &LineR2) -> Option<Rat> {
        let dm = &self.m - &other.m;
        if dm.is_zero() {
            None
        } else {
            Some((&other.c - &self.c) / dm)
        }
    }

    pub fn meet(&self, other: &LineR2) -> Option<PointR2> {
        let x = self.meet_x(other)?;
        let y = self.eval(&x);
        Some(PointR2 { x, y })
    }

    pub fn shifted(&self, dy: &Rat) -> LineR2 {
        LineR2 { m: self.m.clone(), c: &self.c + dy }
    }

    /// Mirror through the x-axis: `y = m x + c` becomes `y = −m x − c`.
    pub fn negated(&self) -> LineR2 {
        LineR2 { m: -&self.m, c: -&self.c }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    pub fn letter(self) -> &'static str {
        match self {
            Color::Red => "R",
            Color::Blue => "B",
        }
    }

    pub fn from_letter(s: &str) -> Result<Color, Error> {
        match s.trim() {
            "R" | "r" => Ok(Color::Red),
            "B" | "b" => Ok(Color::Blue),
            other => Err(Error::Parse(format!("unknown color {other:?} (expected R or B)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledPoint {
    pub point: PointR2,
    pub color: Color,
    pub id: usize,
}

impl LabeledPoint {
    pub fn new(x: Rat, y: Rat, color: Color, id: usize) -> Self {
        LabeledPoint { point: PointR2 { x, y }, color, id }
    }

    pub fn ints(x: i64, y: i64, color: Color, id: usize) -> Self {
        LabeledPoint { point: PointR2::ints(x, y), color, id }
    }
}

/// Which side of a separator is supposed to hold the blue points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    BlueAbove,
    RedAbove,
}

impl Orientation {
    pub const BOTH: [Orientation; 2] = [Orientation::BlueAbove, Orientation::RedAbove];

    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::BlueAbove => Orientation::RedAbove,
            Orientation::RedAbove => Orientation::BlueAbove,
        }
    }

    /// The color expected strictly above the line.
    pub fn above_color(self) -> Color {
        match self {
            Orientation::BlueAbove => Color::Blue,
            Orientation::RedAbove => Color::Red,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Separator {
    pub line: LineR2,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisReport {
    pub mis: usize,
    pub max_sq: Rat,
    pub misclassified_ids: Vec<usize>,
}

pub fn dualize_point(p: &PointR2) -> LineR2 {
    LineR2 { m: p.x.clone(), c: -&p.y }
}

pub fn dualize_line(l: &LineR2) -> PointR2 {
    PointR2 { x: l.m.clone(), y: -&l.c }
}

/// Signed vertical offset of `p` from `l`, positive above.
pub fn vertical_distance(p: &PointR2, l: &LineR2) -> Rat {
    &p.y - l.eval(&p.x)
}

pub fn euclid_dist_sq(p: &PointR2, l: &LineR2) -> Rat {
    let v = vertical_distance(p, l);
    &v * &v / (&l.m * &l.m + Rat::one())
}

/// True when `p` lies strictly on the wrong side of `sep` for its color.
pub fn is_misclassified(sep: &Separator, p: &LabeledPoint) -> bool {
    let v = vertical_distance(&p.point, &sep.line);
    match v.cmp(&Rat::zero()) {
        Ordering::Equal => false,
        Ordering::Greater => p.color != sep.orientation.above_color(),
        Ordering::Less => p.color == sep.orientation.above_color(),
    }
}

pub fn classify_mis(sep: &Separator, pts: &[LabeledPoint]) -> MisReport {
    let mut ids = Vec::new();
    let mut max_sq = Rat::zero();
    for p in pts {
        if is_misclassified(sep, p) {
            ids.push(p.id);
            let d = euclid_dist_sq(&p.point, &sep.line);
            if d > max_sq {
                max_sq = d;
            }
        }
    }
    ids.sort_unstable();
    MisReport { mis: ids.len(), max_sq, misclassified_ids: ids }
}

/// Rational rotation: maps `(cos, sin)` to `(1, 0)`. Requires `cos² + sin² = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rotation {
    pub cos: Rat,
    pub sin: Rat,
}

impl Rotation {
    pub fn identity() -> Self {
        Rotation { cos: Rat::one(), sin: Rat::zero() }
    }

    /// Unit vector `((1−u²)/(1+u²), 2u/(1+u²))` from a rational half-angle tangent.
    pub fn from_half_tan(u: &Rat) -> Self {
        let u2 = u * u;
        let den = Rat::one() + &u2;
        Rotation { cos: (Rat::one() - &u2) / &den, sin: (u * int(2)) / den }
    }

    /// Image of `p` under the rotation that sends the direction `(cos, sin)` to `+x`.
    pub fn apply(&self, p: &PointR2) -> PointR2 {
        PointR2 {
            x: &self.cos * &p.x + &self.sin * &p.y,
            y: &self.cos * &p.y - &self.sin * &p.x,
        }
    }

    pub fn apply_dir(&self, dx: &Rat, dy: &Rat) -> (Rat, Rat) {
        (&self.cos * dx + &self.sin * dy, &self.cos * dy - &self.sin * dx)
    }

    /// Pulls a separator given in the rotated frame back to the original frame.
    /// Returns `None` if the preimage is vertical.
    pub fn unapply_separator(&self, sep: &Separator) -> Option<Separator> {
        // q = R p; frame line: q.y = m q.x + c.
        let (a, b) = (&self.cos, &self.sin);
        let m = &sep.line.m;
        let den = a - m * b;
        if den.is_zero() {
            return None;
        }
        let slope = (m * a + b) / &den;
        let icpt = &sep.line.c / &den;
        let orientation = if den.is_positive() { sep.orientation } else { sep.orientation.flipped() };
        Some(Separator { line: LineR2 { m: slope, c: icpt }, orientation })
    }
}

/// Ingestion check for the general-position assumption on distinct x.
pub fn check_general_position(pts: &[LabeledPoint]) -> Result<(), Error> {
    let mut ids = HashSet::new();
    let mut xs = HashSet::new();
    for p in pts {
        if !ids.insert(p.id) {
            return Err(Error::DuplicateId(p.id));
        }
        if !xs.insert(p.point.x.clone()) {
            return Err(Error::DuplicateCoordinate(format!("x = {} (point id {})", p.point.x, p.id)));
        }
    }
    Ok(())
}

/// Deterministic tie-breaking perturbation: point `i` (by position) is moved by `(i·η, i²·η)`.
pub fn perturb(pts: &[LabeledPoint], eta: &Rat) -> Vec<LabeledPoint> {
    pts.iter()
        .enumerate()
        .map(|(i, p)| {
            let i = int(i as i64 + 1);
            let mut q = p.clone();
            q.point.x += &i * eta;
            q.point.y += &i * &i * eta;
            q
        })
        .collect()
}

pub fn split_colors(pts: &[LabeledPoint]) -> (Vec<LabeledPoint>, Vec<LabeledPoint>) {
    pts.iter().cloned().partition(|p| p.color == Color::Red)
}

/// Color swap; turns a `RedAbove` problem into a `BlueAbove` one.
pub fn swap_colors(pts: &[LabeledPoint]) -> Vec<LabeledPoint> {
    pts.iter()
        .map(|p| LabeledPoint { color: p.color.other(), ..p.clone() })
        .collect()
}
