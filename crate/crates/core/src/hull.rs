//! Maximum-margin strip between red and blue, static and under updates.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::geom::{Color, LabeledPoint, LineR2, Orientation, PointR2, Separator};
use crate::rat::{int, Rat};
use crate::Error;

fn cross(o: &PointR2, a: &PointR2, b: &PointR2) -> Rat {
    (&a.x - &o.x) * (&b.y - &o.y) - (&a.y - &o.y) * (&b.x - &o.x)
}

fn dot(ax: &Rat, ay: &Rat, bx: &Rat, by: &Rat) -> Rat {
    ax * bx + ay * by
}

/// Convex hull vertex ids in counterclockwise order, starting from the
/// lowest-leftmost point. Collinear boundary points are dropped.
pub fn convex_hull(pts: &[(usize, PointR2)]) -> Vec<usize> {
    let mut v: Vec<&(usize, PointR2)> = pts.iter().collect();
    v.sort_by(|a, b| a.1.cmp(&b.1));
    v.dedup_by(|a, b| a.1 == b.1);
    if v.len() <= 2 {
        return v.iter().map(|p| p.0).collect();
    }
    let mut lower: Vec<&(usize, PointR2)> = Vec::new();
    for p in &v {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2].1, &lower[lower.len() - 1].1, &p.1).is_positive() {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<&(usize, PointR2)> = Vec::new();
    for p in v.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2].1, &upper[upper.len() - 1].1, &p.1).is_positive() {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.into_iter().chain(upper).map(|p| p.0).collect()
}

/// Upper hull left to right: the points whose dual lines form the lower envelope.
pub fn upper_hull(pts: &[(usize, PointR2)]) -> Vec<usize> {
    monotone_half(pts, true)
}

/// Lower hull left to right.
pub fn lower_hull(pts: &[(usize, PointR2)]) -> Vec<usize> {
    monotone_half(pts, false)
}

fn monotone_half(pts: &[(usize, PointR2)], upper: bool) -> Vec<usize> {
    let mut v: Vec<&(usize, PointR2)> = pts.iter().collect();
    // for equal x only the extreme y can be on this half
    v.sort_by(|a, b| a.1.x.cmp(&b.1.x).then(if upper { b.1.y.cmp(&a.1.y) } else { a.1.y.cmp(&b.1.y) }));
    v.dedup_by(|a, b| a.1.x == b.1.x);
    let mut h: Vec<&(usize, PointR2)> = Vec::new();
    for p in v {
        while h.len() >= 2 {
            let c = cross(&h[h.len() - 2].1, &h[h.len() - 1].1, &p.1);
            let keep = if upper { c.is_negative() } else { c.is_positive() };
            if keep {
                break;
            }
            h.pop();
        }
        h.push(p);
    }
    h.into_iter().map(|p| p.0).collect()
}

/// Point set with a lazily recomputed hull.
#[derive(Clone, Debug, Default)]
pub struct DynHull {
    pts: BTreeMap<usize, PointR2>,
    cache: std::cell::RefCell<Option<Vec<usize>>>,
}

impl DynHull {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn insert(&mut self, id: usize, p: PointR2) -> Result<(), Error> {
        if self.pts.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.pts.insert(id, p);
        self.cache.replace(None);
        Ok(())
    }

    pub fn remove(&mut self, id: usize) -> Result<PointR2, Error> {
        let p = self.pts.remove(&id).ok_or(Error::UnknownId(id))?;
        self.cache.replace(None);
        Ok(p)
    }

    pub fn point(&self, id: usize) -> Option<&PointR2> {
        self.pts.get(&id)
    }

    pub fn points(&self) -> Vec<(usize, PointR2)> {
        self.pts.iter().map(|(&i, p)| (i, p.clone())).collect()
    }

    /// Counterclockwise hull vertex ids.
    pub fn hull(&self) -> Vec<usize> {
        if let Some(h) = self.cache.borrow().as_ref() {
            return h.clone();
        }
        let h = convex_hull(&self.points());
        self.cache.replace(Some(h.clone()));
        h
    }

    pub fn upper(&self) -> Vec<usize> {
        upper_hull(&self.points())
    }

    pub fn lower(&self) -> Vec<usize> {
        lower_hull(&self.points())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripStatus {
    Separable,
    NotSeparable,
    /// One color has no points; the strip is unbounded.
    EmptySide,
}

/// Closest feature of one hull.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feature {
    Vertex(usize),
    Edge(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StripSeparator {
    Line(Separator),
    /// Perpendicular bisector of a horizontal witness segment.
    Vertical { x: Rat, blue_on_right: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub red: Feature,
    pub blue: Feature,
    pub red_point: PointR2,
    pub blue_point: PointR2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripResult {
    pub status: StripStatus,
    pub separator: Option<StripSeparator>,
    pub width_sq: Option<Rat>,
    pub witness: Option<Witness>,
}

impl StripResult {
    fn plain(status: StripStatus) -> Self {
        StripResult { status, separator: None, width_sq: None, witness: None }
    }

    /// Id pair of the nearest input points when both features are vertices.
    pub fn witness_ids(&self) -> Option<(usize, usize)> {
        match self.witness.as_ref()? {
            Witness { red: Feature::Vertex(r), blue: Feature::Vertex(b), .. } => Some((*r, *b)),
            _ => None,
        }
    }
}

fn on_segment(p: &PointR2, a: &PointR2, b: &PointR2) -> bool {
    cross(a, b, p).is_zero()
        && p.x >= a.x.clone().min(b.x.clone())
        && p.x <= a.x.clone().max(b.x.clone())
        && p.y >= a.y.clone().min(b.y.clone())
        && p.y <= a.y.clone().max(b.y.clone())
}

fn segments_meet(a: &PointR2, b: &PointR2, c: &PointR2, d: &PointR2) -> bool {
    let d1 = cross(c, d, a).signum();
    let d2 = cross(c, d, b).signum();
    let d3 = cross(a, b, c).signum();
    let d4 = cross(a, b, d).signum();
    if d1 * &d2 < Rat::zero() && d3 * &d4 < Rat::zero() {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

/// Closed convex polygon (counterclockwise) contains `p`.
fn polygon_contains(poly: &[PointR2], p: &PointR2) -> bool {
    match poly.len() {
        0 => false,
        1 => &poly[0] == p,
        2 => on_segment(p, &poly[0], &poly[1]),
        n => (0..n).all(|i| !cross(&poly[i], &poly[(i + 1) % n], p).is_negative()),
    }
}

fn edges(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => vec![],
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

/// Nearest point of segment `ab` to `p`, and whether it is interior.
fn project(p: &PointR2, a: &PointR2, b: &PointR2) -> (PointR2, bool) {
    let (dx, dy) = (&b.x - &a.x, &b.y - &a.y);
    let len2 = dot(&dx, &dy, &dx, &dy);
    let t = dot(&(&p.x - &a.x), &(&p.y - &a.y), &dx, &dy) / &len2;
    if !t.is_positive() {
        (a.clone(), false)
    } else if t >= Rat::from_integer(1.into()) {
        (b.clone(), false)
    } else {
        (PointR2::new(&a.x + &t * &dx, &a.y + &t * &dy), true)
    }
}

fn dist_sq(a: &PointR2, b: &PointR2) -> Rat {
    let (dx, dy) = (&a.x - &b.x, &a.y - &b.y);
    dot(&dx, &dy, &dx, &dy)
}

/// Strip between two disjoint hulls given as counterclockwise vertex lists.
fn strip_between(red: &[(usize, PointR2)], blue: &[(usize, PointR2)]) -> StripResult {
    let rp: Vec<PointR2> = red.iter().map(|p| p.1.clone()).collect();
    let bp: Vec<PointR2> = blue.iter().map(|p| p.1.clone()).collect();
    let (re, be) = (edges(rp.len()), edges(bp.len()));
    for &(i, j) in &re {
        for &(u, v) in &be {
            if segments_meet(&rp[i], &rp[j], &bp[u], &bp[v]) {
                return StripResult::plain(StripStatus::NotSeparable);
            }
        }
    }
    if rp.iter().any(|p| polygon_contains(&bp, p)) || bp.iter().any(|p| polygon_contains(&rp, p)) {
        return StripResult::plain(StripStatus::NotSeparable);
    }
    // closest features: vertex-vertex and vertex-edge in both directions
    let mut best: Option<(Rat, Witness)> = None;
    let mut offer = |d: Rat, w: Witness| {
        if best.as_ref().map_or(true, |b| d < b.0) {
            best = Some((d, w));
        }
    };
    for (a, pa) in red {
        for (b, pb) in blue {
            offer(dist_sq(pa, pb), Witness { red: Feature::Vertex(*a), blue: Feature::Vertex(*b), red_point: pa.clone(), blue_point: pb.clone() });
        }
    }
    for (a, pa) in red {
        for &(u, v) in &be {
            let (q, interior) = project(pa, &bp[u], &bp[v]);
            if interior {
                let w = Witness { red: Feature::Vertex(*a), blue: Feature::Edge(blue[u].0, blue[v].0), red_point: pa.clone(), blue_point: q.clone() };
                offer(dist_sq(pa, &q), w);
            }
        }
    }
    for (b, pb) in blue {
        for &(i, j) in &re {
            let (q, interior) = project(pb, &rp[i], &rp[j]);
            if interior {
                let w = Witness { red: Feature::Edge(red[i].0, red[j].0), blue: Feature::Vertex(*b), red_point: q.clone(), blue_point: pb.clone() };
                offer(dist_sq(pb, &q), w);
            }
        }
    }
    let (width_sq, w) = best.expect("both hulls non-empty");
    let (r, b) = (&w.red_point, &w.blue_point);
    let (dx, dy) = (&b.x - &r.x, &b.y - &r.y);
    let mx = (&r.x + &b.x) / int(2);
    let my = (&r.y + &b.y) / int(2);
    let separator = if dy.is_zero() {
        StripSeparator::Vertical { x: mx, blue_on_right: dx.is_positive() }
    } else {
        let m = -&dx / &dy;
        let c = &my - &m * &mx;
        let orientation = if dy.is_positive() { Orientation::BlueAbove } else { Orientation::RedAbove };
        StripSeparator::Line(Separator { line: LineR2::new(m, c), orientation })
    };
    StripResult { status: StripStatus::Separable, separator: Some(separator), width_sq: Some(width_sq), witness: Some(w) }
}

fn result_for(red: &DynHull, blue: &DynHull) -> StripResult {
    if red.is_empty() || blue.is_empty() {
        return StripResult::plain(StripStatus::EmptySide);
    }
    let pick = |h: &DynHull| -> Vec<(usize, PointR2)> { h.hull().into_iter().map(|i| (i, h.point(i).unwrap().clone())).collect() };
    strip_between(&pick(red), &pick(blue))
}

pub fn max_margin_static(pts: &[LabeledPoint]) -> StripResult {
    let mut st = MarginState::default();
    for p in pts {
        let side = if p.color == Color::Red { &mut st.red } else { &mut st.blue };
        // ids are unique per dataset; a repeat would be a caller bug
        let _ = side.insert(p.id, p.point.clone());
    }
    st.result()
}

/// Red and blue hulls maintained under insertions and deletions.
#[derive(Clone, Debug, Default)]
pub struct MarginState {
    pub red: DynHull,
    pub blue: DynHull,
}

impl MarginState {
    pub fn build(pts: &[LabeledPoint]) -> Result<Self, Error> {
        let mut st = MarginState::default();
        for p in pts {
            st.insert_only(p)?;
        }
        Ok(st)
    }

    fn insert_only(&mut self, p: &LabeledPoint) -> Result<(), Error> {
        if self.red.point(p.id).is_some() || self.blue.point(p.id).is_some() {
            return Err(Error::DuplicateId(p.id));
        }
        match p.color {
            Color::Red => self.red.insert(p.id, p.point.clone()),
            Color::Blue => self.blue.insert(p.id, p.point.clone()),
        }
    }

    pub fn result(&self) -> StripResult {
        result_for(&self.red, &self.blue)
    }

    pub fn points(&self) -> Vec<LabeledPoint> {
        let mut v: Vec<LabeledPoint> = self
            .red
            .points()
            .into_iter()
            .map(|(i, p)| LabeledPoint { point: p, color: Color::Red, id: i })
            .chain(self.blue.points().into_iter().map(|(i, p)| LabeledPoint { point: p, color: Color::Blue, id: i }))
            .collect();
        v.sort_by_key(|p| p.id);
        v
    }
}

pub fn margin_insert(st: &mut MarginState, p: &LabeledPoint) -> Result<StripResult, Error> {
    st.insert_only(p)?;
    Ok(st.result())
}

pub fn margin_delete(st: &mut MarginState, id: usize) -> Result<StripResult, Error> {
    if st.red.remove(id).is_err() {
        st.blue.remove(id)?;
    }
    Ok(st.result())
}

/// No point lies strictly between the two bounding lines of the strip.
pub fn strip_is_empty(res: &StripResult, pts: &[LabeledPoint]) -> bool {
    let Some(w) = &res.witness else { return true };
    let (r, b) = (&w.red_point, &w.blue_point);
    let (nx, ny) = (&b.x - &r.x, &b.y - &r.y);
    let lo = dot(&nx, &ny, &r.x, &r.y);
    let hi = dot(&nx, &ny, &b.x, &b.y);
    pts.iter().all(|p| {
        let t = dot(&nx, &ny, &p.point.x, &p.point.y);
        !(t > lo && t < hi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::frac;

    fn lp(x: i64, y: i64, c: Color, id: usize) -> LabeledPoint {
        LabeledPoint::ints(x, y, c, id)
    }

    fn ds2() -> Vec<LabeledPoint> {
        vec![lp(0, 0, Color::Red, 0), lp(1, 0, Color::Red, 1), lp(0, 3, Color::Blue, 2), lp(1, 3, Color::Blue, 3)]
    }

    fn line_of(r: &StripResult) -> &Separator {
        match r.separator.as_ref().unwrap() {
            StripSeparator::Line(s) => s,
            other => panic!("expected a line, got {other:?}"),
        }
    }

    #[test]
    fn ds2_strip() {
        let r = max_margin_static(&ds2());
        assert_eq!(r.status, StripStatus::Separable);
        assert_eq!(r.width_sq, Some(int(9)));
        let s = line_of(&r);
        assert_eq!(s.line, LineR2::new(int(0), frac(3, 2)));
        assert_eq!(s.orientation, Orientation::BlueAbove);
        assert!(strip_is_empty(&r, &ds2()));
    }

    #[test]
    fn ds3_is_not_separable() {
        let ds3 = vec![lp(0, 0, Color::Red, 0), lp(2, 2, Color::Red, 1), lp(0, 2, Color::Blue, 2), lp(2, 0, Color::Blue, 3)];
        assert_eq!(max_margin_static(&ds3).status, StripStatus::NotSeparable);
    }

    #[test]
    fn single_points() {
        let r = max_margin_static(&[lp(0, 0, Color::Red, 0), lp(3, 4, Color::Blue, 1)]);
        assert_eq!(r.width_sq, Some(int(25)));
        let s = line_of(&r);
        assert_eq!(s.line.m, frac(-3, 4));
        assert_eq!(s.line.eval(&frac(3, 2)), int(2));
        assert_eq!(r.witness_ids(), Some((0, 1)));
    }

    #[test]
    fn dynamic_examples() {
        let mut st = MarginState::build(&ds2()).unwrap();
        let before = st.result();
        let r = margin_insert(&mut st, &LabeledPoint::new(frac(1, 2), int(1), Color::Blue, 4)).unwrap();
        assert_eq!(r.width_sq, Some(int(1)));
        assert_eq!(line_of(&r).line, LineR2::new(int(0), frac(1, 2)));
        assert_eq!(margin_delete(&mut st, 4).unwrap(), before);
        let r = margin_insert(&mut st, &LabeledPoint::new(frac(1, 2), int(-1), Color::Blue, 5)).unwrap();
        assert_eq!(r.status, StripStatus::NotSeparable);
        assert!(matches!(margin_delete(&mut st, 99), Err(Error::UnknownId(99))));
    }

    #[test]
    fn touching_hulls_and_empty_sides() {
        let r = max_margin_static(&[lp(0, 0, Color::Red, 0), lp(2, 0, Color::Red, 1), lp(1, 0, Color::Blue, 2)]);
        assert_eq!(r.status, StripStatus::NotSeparable);
        assert_eq!(max_margin_static(&[lp(0, 0, Color::Red, 0)]).status, StripStatus::EmptySide);
        let r = max_margin_static(&[lp(0, 0, Color::Red, 0), lp(2, 0, Color::Blue, 1)]);
        assert_eq!(r.separator, Some(StripSeparator::Vertical { x: int(1), blue_on_right: true }));
    }

    #[test]
    fn half_hulls() {
        let pts: Vec<(usize, PointR2)> = [(0, 0), (1, 2), (2, 1), (3, 3), (4, 0), (2, -2)]
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| (i, PointR2::ints(x, y)))
            .collect();
        assert_eq!(upper_hull(&pts), vec![0, 1, 3, 4]);
        assert_eq!(lower_hull(&pts), vec![0, 5, 4]);
        assert_eq!(convex_hull(&pts), vec![0, 5, 4, 3, 1]);
    }
}
