//! Brute-force reference solvers. They share no code with the fast paths
//! beyond the primitive types.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::geom::{Color, LabeledPoint, LineR2, Orientation, PointR2, Separator};
use crate::lpviol::{ConstraintSet, LPResult, UnboundedReason};
use crate::rat::{int, Rat};
use crate::sep1d::{Point1D, Result1D};
use crate::Error;

pub const DEFAULT_CAP: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleProblem {
    OneD,
    MinMis,
    LeftmostValid,
    Kmm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    None,
    Threshold { x: Rat, orientation: Orientation },
    Line(Separator),
    Lp { orientation: Orientation, result: LPResult },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub problem: OracleProblem,
    pub feasible: bool,
    /// Misclassifications of the witness, or `k_min` when infeasible.
    pub mis: usize,
    /// `max_dist` in 1D, `max_sq` for k-mis MinMax, `k_min` for MinMis.
    pub value: Rat,
    pub witness: Witness,
    pub k_min: usize,
    pub candidates: usize,
    pub skipped: usize,
}

impl OracleReport {
    pub fn result_1d(&self) -> Result1D {
        match &self.witness {
            Witness::Threshold { x, orientation } if self.feasible => Result1D {
                separator_x: Some(x.clone()),
                mis: self.mis,
                max_dist: self.value.clone(),
                orientation: *orientation,
            },
            _ => Result1D {
                separator_x: None,
                mis: self.k_min,
                max_dist: Rat::zero(),
                orientation: Orientation::BlueAbove,
            },
        }
    }

    pub fn separator(&self) -> Option<&Separator> {
        match &self.witness {
            Witness::Line(s) => Some(s),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------- 1D

/// Scan of every point coordinate, every gap midpoint and the unconstrained
/// optimum, for both orientations.
pub fn oracle_1d(pts: &[Point1D], k: usize) -> OracleReport {
    let mut xs: Vec<Rat> = pts.iter().map(|p| p.x.clone()).collect();
    xs.sort();
    let reds: Vec<Rat> = sorted_of(pts, Color::Red);
    let blues: Vec<Rat> = sorted_of(pts, Color::Blue);
    let mut cands = xs.clone();
    cands.extend(xs.windows(2).map(|w| (&w[0] + &w[1]) / int(2)));
    let mut best: Option<(Rat, Rat, Orientation, usize)> = None;
    let mut k_min = usize::MAX;
    let mut count = 0;
    for o in Orientation::BOTH {
        // (left class, right class)
        let (left, right) = match o {
            Orientation::BlueAbove => (&reds, &blues),
            Orientation::RedAbove => (&blues, &reds),
        };
        let s_max = match (left.last(), right.first()) {
            (Some(l), Some(r)) => (l + r) / int(2),
            (Some(l), None) => l.clone(),
            (None, Some(r)) => r.clone(),
            (None, None) => Rat::zero(),
        };
        let mut local: Option<(Rat, Rat, Rat, usize)> = None;
        for s in cands.iter().chain(std::iter::once(&s_max)) {
            count += 1;
            let mis = left.len() - left.partition_point(|v| v <= s) + right.partition_point(|v| v < s);
            k_min = k_min.min(mis);
            if mis > k {
                continue;
            }
            let mut d = Rat::zero();
            if let Some(l) = left.last() {
                if l > s {
                    d = l - s;
                }
            }
            if let Some(r) = right.first() {
                if r < s && s - r > d {
                    d = s - r;
                }
            }
            let off = (s - &s_max).abs();
            let key = (d, off, s.clone(), mis);
            if local.as_ref().map_or(true, |b| (&key.0, &key.1, &key.2) < (&b.0, &b.1, &b.2)) {
                local = Some(key);
            }
        }
        if let Some((d, _, s, mis)) = local {
            if best.as_ref().map_or(true, |b| (&d, &s) < (&b.0, &b.1)) {
                best = Some((d, s, o, mis));
            }
        }
    }
    let k_min = if pts.is_empty() { 0 } else { k_min };
    match best {
        Some((d, s, o, mis)) => OracleReport {
            problem: OracleProblem::OneD,
            feasible: true,
            mis,
            value: d,
            witness: Witness::Threshold { x: s, orientation: o },
            k_min,
            candidates: count,
            skipped: 0,
        },
        None => OracleReport {
            problem: OracleProblem::OneD,
            feasible: false,
            mis: k_min,
            value: Rat::zero(),
            witness: Witness::None,
            k_min,
            candidates: count,
            skipped: 0,
        },
    }
}

fn sorted_of(pts: &[Point1D], c: Color) -> Vec<Rat> {
    let mut v: Vec<Rat> = pts.iter().filter(|p| p.color == c).map(|p| p.x.clone()).collect();
    v.sort();
    v
}

// ---------------------------------------------------------------- LP

fn all_lines(cs: &ConstraintSet) -> Vec<LineR2> {
    cs.red.iter().chain(&cs.blue).map(|(_, l)| l.clone()).collect()
}

/// Every arrangement vertex plus a column of probes left of all of them.
fn lp_probes(cs: &ConstraintSet) -> (Vec<PointR2>, Vec<PointR2>) {
    let lines = all_lines(cs);
    let mut verts = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Some(p) = lines[i].meet(&lines[j]) {
                verts.push(p);
            }
        }
    }
    verts.sort();
    verts.dedup();
    let px = match (verts.first(), verts.iter().map(|v| &v.x).max()) {
        (Some(lo), Some(hi)) => &lo.x - (hi - &lo.x).max(Rat::one()),
        _ => Rat::zero(),
    };
    let mut ys: Vec<Rat> = lines.iter().map(|l| l.eval(&px)).collect();
    ys.sort();
    ys.dedup();
    let mut far = Vec::new();
    if let (Some(lo), Some(hi)) = (ys.first(), ys.last()) {
        far.push(PointR2::new(px.clone(), lo - int(1)));
        far.push(PointR2::new(px.clone(), hi + int(1)));
    } else {
        far.push(PointR2::new(px.clone(), Rat::zero()));
    }
    for w in ys.windows(2) {
        far.push(PointR2::new(px.clone(), (&w[0] + &w[1]) / int(2)));
    }
    for y in ys {
        far.push(PointR2::new(px.clone(), y));
    }
    (verts, far)
}

/// Leftmost point (then lowest) with at most `k` violations.
pub fn oracle_leftmost_valid(cs: &ConstraintSet, k: usize) -> LPResult {
    if cs.red.is_empty() || cs.blue.is_empty() {
        return LPResult::Unbounded(UnboundedReason::EmptySide);
    }
    let (verts, far) = lp_probes(cs);
    if far.iter().any(|p| cs.violations(p) <= k) {
        return LPResult::Unbounded(UnboundedReason::LeftRay);
    }
    // vertices are sorted by (x, y)
    for v in verts {
        let f = cs.violations(&v);
        if f <= k {
            return LPResult::Feasible { point: v, violations: f };
        }
    }
    LPResult::Infeasible
}

/// Fewest violations over the plane, and the leftmost point achieving it.
pub fn oracle_min_violations(cs: &ConstraintSet) -> (usize, LPResult) {
    if cs.red.is_empty() || cs.blue.is_empty() {
        return (0, LPResult::Unbounded(UnboundedReason::EmptySide));
    }
    let (verts, far) = lp_probes(cs);
    let k_min = verts.iter().chain(&far).map(|p| cs.violations(p)).min().unwrap_or(0);
    (k_min, oracle_leftmost_valid(cs, k_min))
}

/// Fewest misclassifications of any separator, over both orientations.
pub fn oracle_minmis(pts: &[LabeledPoint]) -> OracleReport {
    let mut best: Option<(usize, Orientation, LPResult)> = None;
    for o in Orientation::BOTH {
        let (km, res) = oracle_min_violations(&ConstraintSet::from_points(pts, o));
        if best.as_ref().map_or(true, |b| km < b.0) {
            best = Some((km, o, res));
        }
    }
    let (k_min, orientation, result) = best.expect("two orientations");
    OracleReport {
        problem: OracleProblem::MinMis,
        feasible: true,
        mis: k_min,
        value: int(k_min as i64),
        witness: Witness::Lp { orientation, result },
        k_min,
        candidates: 0,
        skipped: 0,
    }
}

// ---------------------------------------------------------------- k-mis MinMax

/// Integer arithmetic used by the candidate enumeration. `i128` is used when
/// the scaled coordinates are small enough that no product can overflow.
trait Num: Clone + Ord + Signed {
    fn from_big(b: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
}

impl Num for i128 {
    fn from_big(b: &BigInt) -> Self {
        b.to_i128().expect("range checked")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Num for BigInt {
    fn from_big(b: &BigInt) -> Self {
        b.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// `a·X + b·Y + c = 0` in scaled integer coordinates, with `b > 0`.
#[derive(Clone)]
struct ILine<T> {
    a: T,
    b: T,
    c: T,
}

struct Best<T> {
    num: T,
    den: T,
    line: ILine<T>,
    orientation: Orientation,
}

/// Best squared distance for each exact misclassification count, plus counters.
struct KmmTable<T> {
    by_mis: Vec<Option<Best<T>>>,
    candidates: usize,
    skipped: usize,
}

fn through<T: Num>(x1: &T, y1: &T, x2: &T, y2: &T) -> (T, T, T) {
    let a = y2.clone() - y1.clone();
    let b = x1.clone() - x2.clone();
    let c = -(a.clone() * x1.clone() + b.clone() * y1.clone());
    (a, b, c)
}

fn enumerate<T: Num>(pts: &[(T, T, Color)]) -> KmmTable<T> {
    let n = pts.len();
    let mut table = KmmTable { by_mis: (0..=n).map(|_| None).collect(), candidates: 0, skipped: 0 };
    let two = T::one() + T::one();
    let consider = |a: T, b: T, c: T, table: &mut KmmTable<T>| {
        table.candidates += 1;
        if b.is_zero() {
            table.skipped += 1;
            return;
        }
        let (a, b, c) = if b.is_negative() { (-a, -b, -c) } else { (a, b, c) };
        // (mis, max s²) for BlueAbove then RedAbove
        let mut mis = [0usize; 2];
        let mut mx = [T::zero(), T::zero()];
        for (x, y, col) in pts {
            let s = a.clone() * x.clone() + b.clone() * y.clone() + c.clone();
            if s.is_zero() {
                continue;
            }
            let above = s.is_positive();
            // BlueAbove misclassifies reds above and blues below
            let wrong_ba = above == (*col == Color::Red);
            let idx = if wrong_ba { 0 } else { 1 };
            mis[idx] += 1;
            let s2 = s.clone() * s;
            if s2 > mx[idx] {
                mx[idx] = s2;
            }
        }
        let den = a.clone() * a.clone() + b.clone() * b.clone();
        for (idx, o) in Orientation::BOTH.iter().enumerate() {
            let slot = &mut table.by_mis[mis[idx]];
            let better = match slot {
                None => true,
                Some(cur) => mx[idx].clone() * cur.den.clone() < cur.num.clone() * den.clone(),
            };
            if better {
                *slot = Some(Best {
                    num: mx[idx].clone(),
                    den: den.clone(),
                    line: ILine { a: a.clone(), b: b.clone(), c: c.clone() },
                    orientation: *o,
                });
            }
        }
    };
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    for &(i, j) in &pairs {
        let (x1, y1, c1) = &pts[i];
        let (x2, y2, c2) = &pts[j];
        let (a, b, c) = through(x1, y1, x2, y2);
        // (a) through both points
        consider(a.clone(), b.clone(), c.clone(), &mut table);
        if c1 == c2 {
            for (q, (xq, yq, _)) in pts.iter().enumerate() {
                if q == i || q == j {
                    continue;
                }
                let sq = a.clone() * xq.clone() + b.clone() * yq.clone() + c.clone();
                // (b) parallel, halfway between the pair and q
                consider(two.clone() * a.clone(), two.clone() * b.clone(), two.clone() * c.clone() - sq, &mut table);
                // (c) parallel through q
                consider(a.clone(), b.clone(), -(a.clone() * xq.clone() + b.clone() * yq.clone()), &mut table);
            }
        } else {
            // (d) through q and the midpoint of the red/blue pair
            let (mx, my) = (x1.clone() + x2.clone(), y1.clone() + y2.clone());
            for (q, (xq, yq, _)) in pts.iter().enumerate() {
                if q == i || q == j {
                    continue;
                }
                let (xq2, yq2) = (two.clone() * xq.clone(), two.clone() * yq.clone());
                if xq2 == mx && yq2 == my {
                    continue;
                }
                let (a, b, c) = through(&xq2, &yq2, &mx, &my);
                // the line is in doubled coordinates; halve back
                consider(two.clone() * a, two.clone() * b, c, &mut table);
            }
        }
    }
    table
}

/// Exact optimum for every budget `k = 0..=n`: entry `k` is the least squared
/// distance with at most `k` misclassifications, with its separator.
pub fn oracle_kmm_all(pts: &[LabeledPoint], cap: usize) -> Result<(Vec<Option<(Rat, Separator, usize)>>, usize, usize), Error> {
    let n = pts.len();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut d = BigInt::one();
    for p in pts {
        d = d.lcm(p.point.x.denom()).lcm(p.point.y.denom());
    }
    let scaled: Vec<(BigInt, BigInt, Color)> = pts
        .iter()
        .map(|p| {
            let x = (&p.point.x * Rat::from_integer(d.clone())).to_integer();
            let y = (&p.point.y * Rat::from_integer(d.clone())).to_integer();
            (x, y, p.color)
        })
        .collect();
    let bound = BigInt::from(1u64 << 16);
    let small = scaled.iter().all(|(x, y, _)| x.abs() < bound && y.abs() < bound);
    if small {
        let v: Vec<(i128, i128, Color)> = scaled.iter().map(|(x, y, c)| (i128::from_big(x), i128::from_big(y), *c)).collect();
        Ok(finish(enumerate(&v), n, &d))
    } else {
        Ok(finish(enumerate(&scaled), n, &d))
    }
}

fn finish<T: Num>(t: KmmTable<T>, n: usize, d: &BigInt) -> (Vec<Option<(Rat, Separator, usize)>>, usize, usize) {
    let d = Rat::from_integer(d.clone());
    let mut out = Vec::with_capacity(n + 1);
    let mut run: Option<(Rat, Separator, usize)> = None;
    for (mis, slot) in t.by_mis.iter().enumerate() {
        if let Some(b) = slot {
            let val = Rat::new(b.num.to_big(), b.den.to_big()) / (&d * &d);
            if run.as_ref().map_or(true, |r| val < r.0) {
                let (a, bb, c) = (Rat::from_integer(b.line.a.to_big()), Rat::from_integer(b.line.b.to_big()), Rat::from_integer(b.line.c.to_big()));
                let line = LineR2::new(-&a / &bb, -c / (bb * &d));
                run = Some((val, Separator { line, orientation: b.orientation }, mis));
            }
        }
        out.push(run.clone());
    }
    (out, t.candidates, t.skipped)
}

/// Exact k-mis MinMax optimum over the candidate families, with the default cap.
pub fn oracle_kmm(pts: &[LabeledPoint], k: usize) -> Result<OracleReport, Error> {
    oracle_kmm_capped(pts, k, DEFAULT_CAP)
}

pub fn oracle_kmm_capped(pts: &[LabeledPoint], k: usize, cap: usize) -> Result<OracleReport, Error> {
    let (table, candidates, skipped) = oracle_kmm_all(pts, cap)?;
    let k_min = table.iter().position(Option::is_some).unwrap_or(0);
    let entry = table.get(k.min(pts.len())).cloned().flatten();
    Ok(match entry {
        Some((value, sep, mis)) => OracleReport {
            problem: OracleProblem::Kmm,
            feasible: true,
            mis,
            value,
            witness: Witness::Line(sep),
            k_min,
            candidates,
            skipped,
        },
        None => OracleReport {
            problem: OracleProblem::Kmm,
            feasible: false,
            mis: k_min,
            value: Rat::zero(),
            witness: Witness::None,
            k_min,
            candidates,
            skipped,
        },
    })
}
