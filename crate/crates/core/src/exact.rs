//! Exact k-mis MinMax: among separators misclassifying at most `k` points,
//! one minimizing the largest distance of a misclassified point.
//!
//! Works in the dual of each orientation. A dual point `p = (m, y)` is the
//! separator of slope `m` and intercept `-y`; it misclassifies the points whose
//! dual lines it violates, and its error is
//! `max(p.y − L0(m), U0(m) − p.y, 0)² / (1 + m²)` with `L0` the lower envelope
//! of the lower-color lines and `U0` the upper envelope of the other color.
//! The MinMax curve `(L0 + U0) / 2` is the best intercept per slope.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::geom::{split_colors, LabeledPoint, LineR2, Orientation, PointR2, Separator};
use crate::levels::{build_leq_k, chain_decomposition, envelope, overlay_and_label, Chain, Direction, XB};
use crate::lpviol::{chain_candidates, static_min_violations_pair, ConstraintSet};
use crate::rat::{int, Rat};
use crate::Error;

/// Overlay faces are only counted up to this many points (the overlay is cubic).
pub const REGION_COUNT_CAP: usize = 60;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvePiece {
    pub lo: XB,
    pub hi: XB,
    pub line: LineR2,
    /// Defining lower-envelope and upper-envelope lines.
    pub lower: LineR2,
    pub upper: LineR2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinMaxCurve {
    pub pieces: Vec<CurvePiece>,
}

impl MinMaxCurve {
    pub fn eval(&self, x: &Rat) -> Rat {
        let xb = XB::Fin(x.clone());
        let i = self.pieces.partition_point(|p| p.hi < xb).min(self.pieces.len() - 1);
        self.pieces[i].line.eval(x)
    }

    pub fn vertices(&self) -> Vec<PointR2> {
        self.pieces[1..]
            .iter()
            .map(|p| {
                let x = p.lo.fin().expect("interior breakpoint").clone();
                let y = p.line.eval(&x);
                PointR2::new(x, y)
            })
            .collect()
    }
}

fn curve_of(lower: &Chain, upper: &Chain) -> MinMaxCurve {
    let mut xs: Vec<Rat> = lower.vertices().into_iter().chain(upper.vertices()).map(|p| p.x).collect();
    xs.sort();
    xs.dedup();
    let mut bounds = vec![XB::NegInf];
    bounds.extend(xs.into_iter().map(XB::Fin));
    bounds.push(XB::PosInf);
    let pieces = bounds
        .windows(2)
        .map(|w| {
            let probe = match (&w[0], &w[1]) {
                (XB::Fin(a), XB::Fin(b)) => (a + b) / int(2),
                (XB::Fin(a), _) => a + int(1),
                (_, XB::Fin(b)) => b - int(1),
                _ => Rat::zero(),
            };
            let pick = |c: &Chain| c.pieces[c.piece_index(&probe).expect("chains span the line")].line.clone();
            let (l, u) = (pick(lower), pick(upper));
            let line = LineR2::new((&l.m + &u.m) / int(2), (&l.c + &u.c) / int(2));
            CurvePiece { lo: w[0].clone(), hi: w[1].clone(), line, lower: l, upper: u }
        })
        .collect();
    MinMaxCurve { pieces }
}

/// MinMax curve of the BlueAbove dual: midway between the lower envelope of
/// the red dual lines and the upper envelope of the blue ones.
pub fn minmax_curve(red: &[LabeledPoint], blue: &[LabeledPoint]) -> Result<MinMaxCurve, Error> {
    if red.is_empty() || blue.is_empty() {
        return Err(Error::EmptyColor);
    }
    let dual = |ps: &[LabeledPoint]| ps.iter().map(|p| crate::geom::dualize_point(&p.point)).collect::<Vec<_>>();
    Ok(curve_of(&envelope(&dual(red), Direction::Lower)?, &envelope(&dual(blue), Direction::Upper)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CandidateKind {
    /// Valid arrangement vertex.
    A,
    /// Valid MinMax vertex.
    B,
    /// Nearest valid point straight above or below a MinMax vertex.
    C,
    /// MinMax curve meeting an arrangement line.
    D,
    /// A curve point used when the curve has no vertex at all.
    Probe,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidatePoint {
    pub location: PointR2,
    pub kind: CandidateKind,
    pub mis: usize,
    pub max_sq: Rat,
    pub orientation: Orientation,
}

impl CandidatePoint {
    pub fn separator(&self) -> Separator {
        Separator { line: LineR2::new(self.location.x.clone(), -&self.location.y), orientation: self.orientation }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KindCounts {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub probe: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSolveReport {
    pub k: usize,
    pub best: Option<CandidatePoint>,
    pub k_min: usize,
    pub counts: KindCounts,
    /// Faces of the valid overlay per orientation, when small enough to build.
    pub valid_regions: Option<usize>,
    /// Squared error approached by near-vertical separators, when below the optimum.
    pub escape_sq: Option<Rat>,
}

impl ExactSolveReport {
    pub fn separator(&self) -> Option<Separator> {
        self.best.as_ref().map(CandidatePoint::separator)
    }

    pub fn max_sq(&self) -> Option<&Rat> {
        self.best.as_ref().map(|b| &b.max_sq)
    }
}

/// Dual arrangement of one orientation: `lower` lines are violated from above.
struct Dual {
    lines: Vec<(LineR2, bool)>,
    lower_env: Chain,
    upper_env: Chain,
    curve: MinMaxCurve,
    orientation: Orientation,
}

impl Dual {
    fn new(pts: &[LabeledPoint], o: Orientation) -> Result<Dual, Error> {
        let cs = ConstraintSet::from_points(pts, o);
        if cs.red.is_empty() || cs.blue.is_empty() {
            return Err(Error::EmptyColor);
        }
        let lower_env = envelope(&cs.red_lines(), Direction::Lower)?;
        let upper_env = envelope(&cs.blue_lines(), Direction::Upper)?;
        let curve = curve_of(&lower_env, &upper_env);
        let lines = cs.red.into_iter().map(|(_, l)| (l, true)).chain(cs.blue.into_iter().map(|(_, l)| (l, false))).collect();
        Ok(Dual { lines, lower_env, upper_env, curve, orientation: o })
    }

    fn violations(&self, p: &PointR2) -> usize {
        self.lines
            .iter()
            .filter(|(l, low)| {
                let v = l.eval(&p.x);
                if *low {
                    v < p.y
                } else {
                    v > p.y
                }
            })
            .count()
    }

    fn max_sq(&self, p: &PointR2) -> Rat {
        let lo = self.lower_env.eval(&p.x).expect("envelope spans the line");
        let hi = self.upper_env.eval(&p.x).expect("envelope spans the line");
        let gap = (&p.y - lo).max(hi - &p.y).max(Rat::zero());
        &gap * &gap / (Rat::one() + &p.x * &p.x)
    }

    fn candidate(&self, location: PointR2, kind: CandidateKind, mis: usize) -> CandidatePoint {
        let max_sq = self.max_sq(&location);
        CandidatePoint { location, kind, mis, max_sq, orientation: self.orientation }
    }

    /// Violation counts at the points of `w` where it meets arrangement lines,
    /// restricted to the closed x-range `[lo, hi]`. Lines equal to `w` never count.
    fn walk(&self, w: &LineR2, lo: &XB, hi: &XB) -> Vec<(Rat, usize)> {
        let mut base = 0usize;
        let mut events: Vec<(Rat, bool)> = Vec::new();
        for (l, low) in &self.lines {
            if l == w {
                continue;
            }
            if l.m == w.m {
                base += usize::from(if *low { l.c < w.c } else { l.c > w.c });
                continue;
            }
            let x0 = l.meet_x(w).expect("not parallel");
            // left of the crossing a steeper line is below w
            let left = if *low { l.m > w.m } else { l.m < w.m };
            events.push((x0, left));
        }
        events.sort_by(|a, b| a.0.cmp(&b.0));
        let mut f_left = base + events.iter().filter(|e| e.1).count();
        let mut out = Vec::new();
        let mut i = 0;
        while i < events.len() {
            let mut j = i;
            let (mut vl, mut vr) = (0, 0);
            while j < events.len() && events[j].0 == events[i].0 {
                if events[j].1 {
                    vl += 1;
                } else {
                    vr += 1;
                }
                j += 1;
            }
            let at = f_left - vl;
            let xb = XB::Fin(events[i].0.clone());
            if *lo <= xb && xb <= *hi {
                out.push((events[i].0.clone(), at));
            }
            f_left = at + vr;
            i = j;
        }
        out
    }

    fn color_lines(&self, low: bool) -> Vec<LineR2> {
        self.lines.iter().filter(|l| l.1 == low).map(|l| l.0.clone()).collect()
    }

    /// Arrangement vertices violating at most `k` lines, with their counts.
    ///
    /// Such a vertex has at most `k` lower-color lines strictly below it and
    /// at most `k` other lines strictly above, so it is a vertex of one
    /// color's ≤k-level or a crossing of a lower chain with an upper chain.
    /// Counting against the `k+1` chains of each color is exact up to `k`.
    fn valid_vertices(&self, k: usize) -> BTreeMap<PointR2, usize> {
        let (lows, ups) = (self.color_lines(true), self.color_lines(false));
        let low_chains = chain_decomposition(&lows, k, Direction::Lower).expect("nonempty color").chains;
        let up_chains = chain_decomposition(&ups, k, Direction::Upper).expect("nonempty color").chains;
        let mut pts: Vec<PointR2> = Vec::new();
        for (ls, dir) in [(&lows, Direction::Lower), (&ups, Direction::Upper)] {
            if ls.len() > 1 {
                pts.extend(build_leq_k(ls, k, dir).expect("nonempty color").vertices.into_iter().map(|v| v.point));
            }
        }
        pts.extend(chain_candidates(&low_chains, &up_chains).2.into_iter().map(|c| c.point));
        let mut out = BTreeMap::new();
        for p in pts {
            if out.contains_key(&p) {
                continue;
            }
            let below = low_chains.iter().filter(|c| c.eval(&p.x).expect("chains span the line") < p.y).count();
            let above = up_chains.iter().filter(|c| c.eval(&p.x).expect("chains span the line") > p.y).count();
            if below + above <= k {
                out.insert(p, below + above);
            }
        }
        out
    }

    /// Reference for [`Dual::valid_vertices`]: walks every line across the whole arrangement.
    #[cfg(test)]
    fn valid_vertices_by_walk(&self, k: usize) -> BTreeMap<PointR2, usize> {
        let mut verts = BTreeMap::new();
        for (l, _) in &self.lines {
            for (x, f) in self.walk(l, &XB::NegInf, &XB::PosInf) {
                if f <= k {
                    let y = l.eval(&x);
                    verts.entry(PointR2::new(x, y)).or_insert(f);
                }
            }
        }
        verts
    }

    /// Nearest valid points strictly below and strictly above `y` on the vertical line `x`.
    fn vertical_neighbors(&self, x: &Rat, y: &Rat, k: usize) -> (Option<PointR2>, Option<PointR2>) {
        let mut low_vals: Vec<Rat> = self.lines.iter().filter(|l| l.1).map(|(l, _)| l.eval(x)).collect();
        let mut up_vals: Vec<Rat> = self.lines.iter().filter(|l| !l.1).map(|(l, _)| l.eval(x)).collect();
        low_vals.sort();
        up_vals.sort();
        let f = |v: &Rat| low_vals.partition_point(|a| a < v) + (up_vals.len() - up_vals.partition_point(|a| a <= v));
        let mut vals: Vec<&Rat> = low_vals.iter().chain(&up_vals).collect();
        vals.sort();
        vals.dedup();
        let above = vals.iter().filter(|v| **v > y).find(|v| f(v) <= k).map(|v| PointR2::new(x.clone(), (*v).clone()));
        let below = vals.iter().rev().filter(|v| **v < y).find(|v| f(v) <= k).map(|v| PointR2::new(x.clone(), (*v).clone()));
        (below, above)
    }

    fn candidates(&self, k: usize) -> Vec<CandidatePoint> {
        let mut out = Vec::new();
        // (a) valid arrangement vertices
        out.extend(self.valid_vertices(k).into_iter().map(|(p, f)| self.candidate(p, CandidateKind::A, f)));
        // (b) and (c) at each curve vertex
        let cv = self.curve.vertices();
        for v in &cv {
            let f = self.violations(v);
            if f <= k {
                out.push(self.candidate(v.clone(), CandidateKind::B, f));
            } else {
                let (below, above) = self.vertical_neighbors(&v.x, &v.y, k);
                for p in below.into_iter().chain(above) {
                    let f = self.violations(&p);
                    out.push(self.candidate(p, CandidateKind::C, f));
                }
            }
        }
        // (d) curve pieces meeting arrangement lines
        for piece in &self.curve.pieces {
            for (x, f) in self.walk(&piece.line, &piece.lo, &piece.hi) {
                if f <= k {
                    let y = piece.line.eval(&x);
                    out.push(self.candidate(PointR2::new(x, y), CandidateKind::D, f));
                }
            }
        }
        if cv.is_empty() {
            let p = PointR2::new(Rat::zero(), self.curve.eval(&Rat::zero()));
            let f = self.violations(&p);
            if f <= k {
                out.push(self.candidate(p, CandidateKind::Probe, f));
            }
        }
        out
    }

    /// Best squared error approached as the slope tends to ±∞ among separators
    /// with at most `k` misclassifications.
    fn escape_sq(&self, k: usize) -> Option<Rat> {
        [false, true].into_iter().filter_map(|neg| self.escape_one(k, neg)).min()
    }

    fn escape_one(&self, k: usize, neg: bool) -> Option<Rat> {
        // mirror x for the −∞ end; slopes flip sign
        let sl = |l: &LineR2| if neg { -&l.m } else { l.m.clone() };
        let mut order: Vec<(Rat, Rat, bool)> =
            self.lines.iter().map(|(l, low)| (sl(l), l.c.clone(), *low)).collect();
        order.sort();
        // far right the lower envelope follows the smallest lower-color slope,
        // the upper envelope the largest other-color slope
        let ar = order.iter().filter(|o| o.2).map(|o| o.0.clone()).min()?;
        let ab = order.iter().filter(|o| !o.2).map(|o| o.0.clone()).max()?;
        let n = order.len();
        let total_up = order.iter().filter(|o| !o.2).count();
        let h = |lo: Option<&Rat>, hi: Option<&Rat>| -> Rat {
            let mut s = (&ar + &ab) / int(2);
            if let Some(lo) = lo {
                s = s.max(lo.clone());
            }
            if let Some(hi) = hi {
                s = s.min(hi.clone());
            }
            (&s - &ar).max(&ab - &s).max(Rat::zero())
        };
        let mut best: Option<Rat> = None;
        let mut low_below = 0;
        let mut up_below = 0;
        for g in 0..=n {
            // gap below line g
            if low_below + (total_up - up_below) <= k {
                let v = h(g.checked_sub(1).map(|i| &order[i].0), order.get(g).map(|o| &o.0));
                best = Some(best.map_or(v.clone(), |b: Rat| b.min(v)));
            }
            if g == n {
                break;
            }
            // on line g: lines identical in the limit order are the same line here
            let f_on = low_below + (total_up - up_below - usize::from(!order[g].2));
            if f_on <= k {
                let v = h(Some(&order[g].0), Some(&order[g].0));
                best = Some(best.map_or(v.clone(), |b: Rat| b.min(v)));
            }
            if order[g].2 {
                low_below += 1;
            } else {
                up_below += 1;
            }
        }
        best.map(|b| &b * &b)
    }
}

/// Candidate set of one orientation.
pub fn candidates(pts: &[LabeledPoint], k: usize, o: Orientation) -> Result<Vec<CandidatePoint>, Error> {
    Ok(Dual::new(pts, o)?.candidates(k.min(pts.len())))
}

/// Valid point on the vertical line `x = m` nearest to the MinMax curve, in the given orientation.
pub fn best_at_slope(pts: &[LabeledPoint], k: usize, o: Orientation, m: &Rat) -> Result<Option<CandidatePoint>, Error> {
    let d = Dual::new(pts, o)?;
    let y = d.curve.eval(m);
    let c = PointR2::new(m.clone(), y.clone());
    let f = d.violations(&c);
    if f <= k {
        return Ok(Some(d.candidate(c, CandidateKind::B, f)));
    }
    let (below, above) = d.vertical_neighbors(m, &y, k);
    Ok(below
        .into_iter()
        .chain(above)
        .map(|p| {
            let f = d.violations(&p);
            d.candidate(p, CandidateKind::C, f)
        })
        .min_by(|a, b| a.max_sq.cmp(&b.max_sq).then(a.location.cmp(&b.location))))
}

fn rank(c: &CandidatePoint) -> (Rat, PointR2, CandidateKind, usize) {
    let oi = Orientation::BOTH.iter().position(|o| *o == c.orientation).unwrap_or(0);
    (c.max_sq.clone(), c.location.clone(), c.kind, oi)
}

fn valid_regions(pts: &[LabeledPoint], k: usize) -> Option<usize> {
    if pts.len() > REGION_COUNT_CAP {
        return None;
    }
    let mut total = 0;
    for o in Orientation::BOTH {
        let cs = ConstraintSet::from_points(pts, o);
        let map = overlay_and_label(&cs.red_lines(), &cs.blue_lines(), k).ok()?;
        total += map.valid_faces().count();
    }
    Some(total)
}

/// Exact optimum over both orientations.
pub fn solve_exact(pts: &[LabeledPoint], k: usize) -> Result<ExactSolveReport, Error> {
    let (red, blue) = split_colors(pts);
    if red.is_empty() || blue.is_empty() {
        return Err(Error::EmptyColor);
    }
    let k = k.min(pts.len());
    let mut counts = KindCounts::default();
    let mut best: Option<CandidatePoint> = None;
    let mut escape: Option<Rat> = None;
    let k_min = static_min_violations_pair(&ConstraintSet::from_points(pts, Orientation::BOTH[0]), &ConstraintSet::from_points(pts, Orientation::BOTH[1]));
    for o in Orientation::BOTH {
        let d = Dual::new(pts, o)?;
        for c in d.candidates(k) {
            match c.kind {
                CandidateKind::A => counts.a += 1,
                CandidateKind::B => counts.b += 1,
                CandidateKind::C => counts.c += 1,
                CandidateKind::D => counts.d += 1,
                CandidateKind::Probe => counts.probe += 1,
            }
            if best.as_ref().map_or(true, |b| rank(&c) < rank(b)) {
                best = Some(c);
            }
        }
        if let Some(e) = d.escape_sq(k) {
            escape = Some(escape.map_or(e.clone(), |x: Rat| x.min(e)));
        }
    }
    let escape_sq = match (&best, escape) {
        (Some(b), Some(e)) if e < b.max_sq => Some(e),
        (None, Some(e)) => Some(e),
        _ => None,
    };
    Ok(ExactSolveReport { k, best, k_min, counts, valid_regions: None, escape_sq })
}

/// As [`solve_exact`], also counting valid overlay faces when the input is small enough.
pub fn solve_exact_with_regions(pts: &[LabeledPoint], k: usize) -> Result<ExactSolveReport, Error> {
    let mut r = solve_exact(pts, k)?;
    r.valid_regions = valid_regions(pts, r.k);
    Ok(r)
}

/// Midpoint identity residual `curve(x) − (L0(x) + U0(x)) / 2` for tests and audits.
pub fn midpoint_residual(pts: &[LabeledPoint], o: Orientation, x: &Rat) -> Result<Rat, Error> {
    let d = Dual::new(pts, o)?;
    let l = d.lower_env.eval(x).expect("envelope spans the line");
    let u = d.upper_env.eval(x).expect("envelope spans the line");
    Ok(d.curve.eval(x) - (l + u) / int(2))
}

/// Squared error of the curve point at `x` in one orientation.
pub fn curve_error_sq(pts: &[LabeledPoint], o: Orientation, x: &Rat) -> Result<Rat, Error> {
    let d = Dual::new(pts, o)?;
    let p = PointR2::new(x.clone(), d.curve.eval(x));
    Ok(d.max_sq(&p))
}

/// Curve of one orientation.
pub fn orientation_curve(pts: &[LabeledPoint], o: Orientation) -> Result<MinMaxCurve, Error> {
    Ok(Dual::new(pts, o)?.curve)
}
