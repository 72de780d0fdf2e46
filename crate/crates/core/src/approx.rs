//! (1+ε)-approximate k-mis MinMax.
//!
//! Separator directions are cut into wedges. Each wedge has an exact rational
//! rotation under which its separators get slopes in `[-a, a]`, where the
//! vertical distance from a point to a separator is `sqrt(1 + m²) ≤ 1 + ε`
//! times the Euclidean one. Within a wedge the problem becomes: in the dual
//! slab `|x| ≤ a`, find a valid point minimizing the vertical error
//! `V(p) = max(U0(x) − y, y − L0(x), 0)`.
//!
//! `decide_delta` answers "is there a valid point with `V ≤ δ`" from the chain
//! decompositions, the envelopes shifted by `δ` and the best red-blue chain
//! intersection. `solve_wedge` either bisects on `δ` with it, or computes the
//! optimum directly: `V` is convex, so the optimum is the global minimizer of
//! `V`, a point on a slab edge, or a point on the boundary of the valid region,
//! and every boundary point lies on a chain piece.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::geom::{classify_mis, dualize_point, split_colors, Color, LabeledPoint, LineR2, Orientation, PointR2, Rotation, Separator};
use crate::hull::DynHull;
use crate::levels::{chain_decomposition, envelope, ge_interval, Chain, ChainKind, Direction, Piece, XB};
use crate::lpviol::{chain_candidates, static_min_violations, ConstraintSet, DynMode, DynOp, DynState};
use crate::rat::{int, to_f64, Rat};
use crate::workload::PointOp;
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct Wedge {
    pub index: usize,
    /// Sends the wedge's central separator direction to the x-axis.
    pub rotation: Rotation,
    /// Central direction angle in radians, in `(0, π)`.
    pub center: f64,
    /// Directions `[lo, hi)` assigned to this wedge; the slab reaches a bit beyond.
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TGon {
    /// Smallest `t ≥ 3` with `1/cos(π/t) ≤ 1 + eps`.
    pub t: usize,
    pub eps: Rat,
    /// Slab half-width `a` in every rotated dual; `a² ≤ (1+eps)² − 1`.
    pub slope_bound: Rat,
    pub wedges: Vec<Wedge>,
}

impl TGon {
    /// Wedge index whose slab contains the direction `(dx, dy)`, with its frame slope.
    pub fn wedge_of(&self, dx: &Rat, dy: &Rat) -> Option<(usize, Rat)> {
        self.wedges.iter().find_map(|w| {
            let (fx, fy) = w.rotation.apply_dir(dx, dy);
            if fx.is_zero() {
                return None;
            }
            let m = fy / fx;
            (m.abs() <= self.slope_bound).then_some((w.index, m))
        })
    }
}

pub fn nominal_t(eps: &Rat) -> Result<usize, Error> {
    if !eps.is_positive() {
        return Err(Error::NonPositiveEps);
    }
    let e = to_f64(eps);
    let mut t = 3usize;
    // the slack only matters at exact ties such as eps = 1, t = 3
    while 1.0 / (PI / t as f64).cos() > (1.0 + e) * (1.0 + 1e-12) {
        t += 1;
    }
    Ok(t)
}

/// Wedges and rotations for `eps`. Coverage of all directions is checked
/// exactly; the wedge count grows until the rational rotations achieve it.
pub fn make_tgon(eps: &Rat) -> Result<TGon, Error> {
    let t = nominal_t(eps)?;
    let bound = eps * (int(2) + eps);
    let amax = to_f64(&bound).sqrt();
    let mut w = t.div_ceil(2).max(2);
    loop {
        if let Some(wedges) = try_wedges(w, amax) {
            let (a, wedges) = wedges;
            if a.clone() * &a <= bound && covers(&wedges, &a) {
                return Ok(TGon { t, eps: eps.clone(), slope_bound: a, wedges });
            }
        }
        w += 1;
    }
}

fn try_wedges(w: usize, amax: f64) -> Option<(Rat, Vec<Wedge>)> {
    let step = PI / w as f64;
    let half = step / 2.0;
    let margin = amax.atan().min(PI / 2.0 - 1e-9) - half;
    if margin <= 1e-12 {
        return None;
    }
    let a = simplest_between((half + margin / 3.0).tan(), (half + 2.0 * margin / 3.0).tan());
    let wedges = (0..w)
        .map(|j| {
            // off-grid centers keep the axis directions away from slab centers
            let center = (j as f64 + 0.25) * step;
            let u = simplest_between(((center - margin / 6.0) / 2.0).tan(), ((center + margin / 6.0) / 2.0).tan());
            Wedge { index: j, rotation: Rotation::from_half_tan(&u), center, lo: center - half, hi: center + half }
        })
        .collect();
    Some((a, wedges))
}

/// Preimage of frame direction `(1, m)`.
fn preimage(r: &Rotation, m: &Rat) -> (Rat, Rat) {
    (&r.cos - &r.sin * m, &r.sin + &r.cos * m)
}

/// Consecutive slabs overlap, the last one wrapping around to the first.
fn covers(wedges: &[Wedge], a: &Rat) -> bool {
    let na = -a;
    (0..wedges.len()).all(|j| {
        let (ux, uy) = preimage(&wedges[j].rotation, a);
        let (lx, ly) = match wedges.get(j + 1) {
            Some(n) => preimage(&n.rotation, &na),
            None => {
                let (x, y) = preimage(&wedges[0].rotation, &na);
                (-x, -y)
            }
        };
        let cross = &ux * &ly - &uy * &lx;
        let dot = ux * lx + uy * ly;
        !cross.is_positive() && dot.is_positive()
    })
}

/// Rational with the smallest denominator in `[lo, hi]`, `0 ≤ lo ≤ hi`.
fn simplest_between(lo: f64, hi: f64) -> Rat {
    fn go(lo: f64, hi: f64, depth: u32) -> (i128, i128) {
        let f = lo.floor();
        if f == lo || depth > 40 {
            return (f as i128 + i128::from(f != lo), 1);
        }
        if f + 1.0 <= hi {
            return (f as i128 + 1, 1);
        }
        let (p, q) = go(1.0 / (hi - f), 1.0 / (lo - f), depth + 1);
        (f as i128 * p + q, p)
    }
    let (n, d) = go(lo.max(0.0), hi.max(lo.max(0.0)), 0);
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Which color's dual lines are violated from above in orientation `o`.
fn lower_color(o: Orientation) -> Color {
    match o {
        Orientation::BlueAbove => Color::Red,
        Orientation::RedAbove => Color::Blue,
    }
}

/// Per-wedge decision data in the rotated dual of one orientation.
#[derive(Clone, Debug)]
pub struct DeltaContext {
    pub orientation: Orientation,
    pub slope_bound: Rat,
    /// Frame slope whose separator is vertical in the original plane.
    pub forbidden: Option<Rat>,
    pub cs: ConstraintSet,
    /// Chains covering the `≤k` levels, clipped to the slab.
    pub red_chains: Vec<Chain>,
    pub blue_chains: Vec<Chain>,
    /// `L0` of the red lines and `U0` of the blue lines, clipped to the slab.
    pub lower_env: Chain,
    pub upper_env: Chain,
    /// Valid red-blue chain intersection in the slab with the least error.
    pub p_min: Option<(PointR2, Rat)>,
    lines: Vec<(LineR2, bool)>,
}

fn slab(a: &Rat) -> (XB, XB) {
    (XB::Fin(-a), XB::Fin(a.clone()))
}

impl DeltaContext {
    /// Static build over points already in the wedge's frame.
    pub fn build(frame_pts: &[LabeledPoint], k: usize, o: Orientation, a: &Rat, forbidden: Option<Rat>) -> Result<Self, Error> {
        let cs = ConstraintSet::from_points(frame_pts, o);
        if cs.red.is_empty() || cs.blue.is_empty() {
            return Err(Error::EmptyColor);
        }
        let (rl, bl) = (cs.red_lines(), cs.blue_lines());
        let red = chain_decomposition(&rl, k, Direction::Lower)?.chains;
        let blue = chain_decomposition(&bl, k, Direction::Upper)?.chains;
        let lower = envelope(&rl, Direction::Lower)?;
        let upper = envelope(&bl, Direction::Upper)?;
        Ok(Self::from_parts(cs, &red, &blue, &lower, &upper, k, o, a, forbidden))
    }

    /// Assembles a context from chains covering the `≤k` levels and the two envelopes.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        cs: ConstraintSet,
        red: &[Chain],
        blue: &[Chain],
        lower: &Chain,
        upper: &Chain,
        k: usize,
        o: Orientation,
        a: &Rat,
        forbidden: Option<Rat>,
    ) -> Self {
        let (lo, hi) = slab(a);
        let clip = |cs: &[Chain]| cs.iter().filter_map(|c| c.clipped(&lo, &hi)).collect::<Vec<_>>();
        let lines = cs.red.iter().map(|(_, l)| (l.clone(), true)).chain(cs.blue.iter().map(|(_, l)| (l.clone(), false))).collect();
        let mut ctx = DeltaContext {
            orientation: o,
            slope_bound: a.clone(),
            forbidden,
            red_chains: clip(red),
            blue_chains: clip(blue),
            lower_env: lower.clipped(&lo, &hi).expect("envelopes span the line"),
            upper_env: upper.clipped(&lo, &hi).expect("envelopes span the line"),
            cs,
            p_min: None,
            lines,
        };
        let (_, _, cands) = chain_candidates(red, blue);
        let mut best: Option<(Rat, PointR2)> = None;
        for c in cands {
            if c.count <= k && ctx.in_slab(&c.point) {
                let v = ctx.error(&c.point);
                if best.as_ref().map_or(true, |b| (&v, &c.point) < (&b.0, &b.1)) {
                    best = Some((v, c.point));
                }
            }
        }
        ctx.p_min = best.map(|(v, p)| (p, v));
        ctx
    }

    pub fn in_slab(&self, p: &PointR2) -> bool {
        p.x.abs() <= self.slope_bound && self.forbidden.as_ref() != Some(&p.x)
    }

    fn env_at(&self, x: &Rat) -> (Rat, Rat) {
        (self.lower_env.eval(x).expect("x in slab"), self.upper_env.eval(x).expect("x in slab"))
    }

    /// Vertical error `V(p)`; `p.x` must lie in the slab.
    pub fn error(&self, p: &PointR2) -> Rat {
        let (l, u) = self.env_at(&p.x);
        (&p.y - l).max(u - &p.y).max(Rat::zero())
    }

    pub fn violations(&self, p: &PointR2) -> usize {
        self.cs.violations(p)
    }

    /// `V` restricted to the line `w` over `[x1, x2]`: least value, then leftmost place.
    fn min_on_line(&self, w: &LineR2, x1: &Rat, x2: &Rat) -> (Rat, Rat) {
        let mut xs: Vec<Rat> = vec![x1.clone(), x2.clone()];
        for env in [&self.lower_env, &self.upper_env] {
            xs.extend(env.pieces.iter().skip(1).filter_map(|p| p.lo.fin()).filter(|x| *x > x1 && *x < x2).cloned());
        }
        xs.sort();
        xs.dedup();
        let mut best: Option<(Rat, Rat)> = None;
        let mut take = |v: Rat, x: Rat| {
            if best.as_ref().map_or(true, |b| (&v, &x) < (&b.0, &b.1)) {
                best = Some((v, x));
            }
        };
        if xs.len() == 1 {
            let x = xs.pop().expect("one");
            let v = self.error(&PointR2::new(x.clone(), w.eval(&x)));
            take(v, x);
        }
        for s in xs.windows(2) {
            let (p, q) = (&s[0], &s[1]);
            let probe = (p + q) / int(2);
            let l = piece_line(&self.lower_env, &probe);
            let u = piece_line(&self.upper_env, &probe);
            // A = u − w, B = w − l, both linear here
            let a = LineR2::new(&u.m - &w.m, &u.c - &w.c);
            let b = LineR2::new(&w.m - &l.m, &w.c - &l.c);
            let h = |x: &Rat| a.eval(x).max(b.eval(x)).max(Rat::zero());
            let mut cand = vec![p.clone(), q.clone()];
            let zero_line = LineR2::new(Rat::zero(), Rat::zero());
            for (f, g) in [(&a, &b), (&a, &zero_line), (&b, &zero_line)] {
                if let Some(x) = f.meet_x(g) {
                    if &x > p && &x < q {
                        cand.push(x);
                    }
                }
            }
            for x in cand {
                take(h(&x), x);
            }
        }
        best.expect("nonempty range")
    }

    /// Least-error valid point on the vertical line `x`.
    fn vertical_best(&self, x: &Rat, k: usize) -> Option<(Rat, PointR2)> {
        let (l, u) = self.env_at(x);
        let (tlo, thi) = if u <= l { (u, l) } else {
            let m = (&l + &u) / int(2);
            (m.clone(), m)
        };
        let mut vals: Vec<(Rat, bool)> = self.lines.iter().map(|(ln, low)| (ln.eval(x), *low)).collect();
        vals.sort();
        let start = vals.iter().filter(|v| !v.1).count();
        let events = group_events(vals.into_iter().map(|(y, low)| (y, !low, low)));
        let mut best: Option<(Rat, PointR2)> = None;
        for (y1, y2) in valid_runs(start, &events, k) {
            let y = if y2.as_ref().map_or(false, |b| b < &tlo) {
                y2.expect("bounded")
            } else if y1.as_ref().map_or(false, |a| a > &thi) {
                y1.expect("bounded")
            } else {
                y1.map_or(tlo.clone(), |a| a.max(tlo.clone()))
            };
            let p = PointR2::new(x.clone(), y);
            let v = self.error(&p);
            if best.as_ref().map_or(true, |b| (&v, &p) < (&b.0, &b.1)) {
                best = Some((v, p));
            }
        }
        best
    }

    /// Closed x-ranges within `[lo, hi]` where the point of `w` violates at most `k` lines.
    fn valid_on_line(&self, w: &LineR2, lo: &Rat, hi: &Rat, k: usize) -> Vec<(Rat, Rat)> {
        let mut base = 0usize;
        let mut ev: Vec<(Rat, bool, bool)> = Vec::with_capacity(self.lines.len());
        for (l, low) in &self.lines {
            if l == w {
                continue;
            }
            if l.m == w.m {
                base += usize::from(if *low { l.c < w.c } else { l.c > w.c });
                continue;
            }
            let x0 = l.meet_x(w).expect("not parallel");
            // violated left of the crossing iff a steeper lower line (or a flatter upper one)
            let left = if *low { l.m > w.m } else { l.m < w.m };
            ev.push((x0, left, !left));
        }
        ev.sort();
        let start = base + ev.iter().filter(|e| e.1).count();
        let events = group_events(ev.into_iter());
        let (flo, fhi) = (XB::Fin(lo.clone()), XB::Fin(hi.clone()));
        valid_runs(start, &events, k)
            .into_iter()
            .filter_map(|(a, b)| {
                let a = a.map_or(flo.clone(), XB::Fin).max(flo.clone());
                let b = b.map_or(fhi.clone(), XB::Fin).min(fhi.clone());
                match (a, b) {
                    (XB::Fin(a), XB::Fin(b)) if a <= b => Some((a, b)),
                    _ => None,
                }
            })
            .collect()
    }
}

fn piece_line(c: &Chain, x: &Rat) -> LineR2 {
    c.pieces[c.piece_index(x).expect("x in slab")].line.clone()
}

/// Groups sorted `(pos, stops_here, starts_after)` flags into `(pos, stops, starts)` counts.
fn group_events(sorted: impl Iterator<Item = (Rat, bool, bool)>) -> Vec<(Rat, usize, usize)> {
    let mut out: Vec<(Rat, usize, usize)> = Vec::new();
    for (x, stop, start) in sorted {
        match out.last_mut() {
            Some(last) if last.0 == x => {
                last.1 += usize::from(stop);
                last.2 += usize::from(start);
            }
            _ => out.push((x, usize::from(stop), usize::from(start))),
        }
    }
    out
}

/// Maximal closed runs with count `≤ k` along a sweep. `start` is the count
/// before the first event; at an event `stops` constraints are satisfied on
/// the event itself and `starts` become violated after it.
fn valid_runs(start: usize, events: &[(Rat, usize, usize)], k: usize) -> Vec<(Option<Rat>, Option<Rat>)> {
    let mut out = Vec::new();
    let mut cur = start;
    let mut open: Option<Option<Rat>> = (cur <= k).then_some(None);
    for (x, stops, starts) in events {
        let at = cur - stops;
        let after = at + starts;
        if open.is_none() && at <= k {
            open = Some(Some(x.clone()));
        }
        if after > k {
            if let Some(s) = open.take() {
                out.push((s, Some(x.clone())));
            }
        }
        cur = after;
    }
    if let Some(s) = open {
        out.push((s, None));
    }
    out
}

/// A valid point in the `δ`-region of the slab, if there is one.
pub fn decide_delta(ctx: &DeltaContext, k: usize, delta: &Rat) -> Option<PointR2> {
    if let Some((p, v)) = &ctx.p_min {
        if v <= delta {
            return Some(p.clone());
        }
    }
    let zero = Rat::zero();
    let nd = -delta;
    let mut cands: Vec<PointR2> = Vec::new();
    let mut ends = |iv: Option<(XB, XB)>, on: &dyn Fn(&Rat) -> Rat| {
        if let Some((a, b)) = iv {
            for e in [a, b] {
                if let XB::Fin(x) = e {
                    let y = on(&x);
                    cands.push(PointR2::new(x, y));
                }
            }
        }
    };
    for b in &ctx.blue_chains {
        ends(ge_interval(&ctx.lower_env, delta, b, &zero), &|x| b.eval(x).expect("clipped alike"));
    }
    for r in &ctx.red_chains {
        ends(ge_interval(r, &zero, &ctx.upper_env, &nd), &|x| r.eval(x).expect("clipped alike"));
    }
    ends(ge_interval(&ctx.lower_env, delta, &ctx.upper_env, &nd), &|x| ctx.lower_env.eval(x).expect("in slab") + delta);
    let a = &ctx.slope_bound;
    for x in [-a, a.clone()] {
        let (l, u) = ctx.env_at(&x);
        let (bot, top) = (u - delta, l + delta);
        let mut ys = vec![bot.clone(), top.clone()];
        for c in ctx.red_chains.iter().chain(&ctx.blue_chains) {
            if let Some(y) = c.eval(&x) {
                if y >= bot && y <= top {
                    ys.push(y);
                }
            }
        }
        cands.extend(ys.into_iter().map(|y| PointR2::new(x.clone(), y)));
    }
    cands
        .into_iter()
        .filter(|p| ctx.in_slab(p))
        .map(|p| (ctx.error(&p), p))
        .filter(|(v, p)| v <= delta && ctx.violations(p) <= k)
        .min()
        .map(|(_, p)| p)
}

/// Search strategy for the least `δ` of a wedge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Search {
    /// Exact optimum from the boundary candidates.
    #[default]
    Critical,
    /// Bisection on `δ` with `decide_delta`, to relative tolerance `tol`.
    Bisect,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxOptions {
    pub search: Search,
    pub tol: Rat,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions { search: Search::Critical, tol: Rat::new(BigInt::one(), BigInt::from(10u64).pow(12)) }
    }
}

/// Outcome of the exact wedge search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPoint {
    /// Infimum of the vertical error over valid slab points.
    pub infimum: Rat,
    /// Best valid point whose separator is not vertical, and its error.
    pub error: Rat,
    pub point: PointR2,
}

/// Offset used to step off the forbidden slope.
fn nudge() -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << 40)
}

/// Exact infimum of the vertical error over valid points in the slab.
///
/// When the infimum sits on the forbidden slope it is only approached by
/// separators tending to vertical; the witness is then a valid point a tiny
/// step away from it.
pub fn critical_delta(ctx: &DeltaContext, k: usize) -> Option<CriticalPoint> {
    let mut inf: Option<Rat> = None;
    let mut best: Option<(Rat, PointR2)> = None;
    let eta = nudge();
    let a = &ctx.slope_bound;
    let in_range = |x: &Rat| x.abs() <= *a && ctx.forbidden.as_ref() != Some(x);
    // `near` lists valid stand-ins for a candidate on the forbidden slope
    let mut take = |v: Rat, p: PointR2, near: &dyn Fn() -> Vec<PointR2>| {
        let subs = if ctx.in_slab(&p) { vec![p] } else { near() };
        let subs: Vec<(Rat, PointR2)> = subs.into_iter().map(|q| (ctx.error(&q), q)).collect();
        if subs.is_empty() {
            return;
        }
        if inf.as_ref().map_or(true, |i| v < *i) {
            inf = Some(v);
        }
        for (e, q) in subs {
            if best.as_ref().map_or(true, |b| (&e, &q) < (&b.0, &b.1)) {
                best = Some((e, q));
            }
        }
    };
    for c in ctx.red_chains.iter().chain(&ctx.blue_chains) {
        for piece in &c.pieces {
            let (Some(lo), Some(hi)) = (piece.lo.fin(), piece.hi.fin()) else { continue };
            let w = &piece.line;
            for (x1, x2) in ctx.valid_on_line(w, lo, hi, k) {
                let (v, x) = ctx.min_on_line(w, &x1, &x2);
                let near = || {
                    [&x + &eta, &x - &eta]
                        .into_iter()
                        .filter(|z| *z >= x1 && *z <= x2 && in_range(z))
                        .map(|z| PointR2::new(z.clone(), w.eval(&z)))
                        .collect()
                };
                let y = w.eval(&x);
                take(v, PointR2::new(x.clone(), y), &near);
            }
        }
    }
    // global minimizer of V: on the MinMax curve at a breakpoint or a slab edge
    let mut xs = vec![-a, a.clone()];
    for env in [&ctx.lower_env, &ctx.upper_env] {
        xs.extend(env.pieces.iter().skip(1).filter_map(|p| p.lo.fin()).cloned());
    }
    let mid = |x: &Rat| {
        let (l, u) = ctx.env_at(x);
        (((&u - &l) / int(2)).max(Rat::zero()), PointR2::new(x.clone(), (l + u) / int(2)))
    };
    if let Some((v, p)) = xs.iter().map(mid).min() {
        if ctx.violations(&p) <= k {
            let near = || {
                [&p.x + &eta, &p.x - &eta]
                    .into_iter()
                    .filter(|z| in_range(z))
                    .map(|z| mid(&z).1)
                    .filter(|q| ctx.violations(q) <= k)
                    .collect()
            };
            take(v, p.clone(), &near);
        }
    }
    for (x, inward) in [(-a, eta.clone()), (a.clone(), -&eta)] {
        if let Some((v, p)) = ctx.vertical_best(&x, k) {
            let near = || ctx.vertical_best(&(&x + &inward), k).map(|(_, q)| q).into_iter().collect();
            take(v, p, &near);
        }
    }
    let (error, point) = best?;
    Some(CriticalPoint { infimum: inf.expect("set with best"), error, point })
}

/// Least `δ` for the wedge and a witness with error at most `δ`.
pub fn solve_wedge(ctx: &DeltaContext, k: usize, tol: &Rat, search: Search) -> Result<(Rat, PointR2), Error> {
    match search {
        Search::Critical => critical_delta(ctx, k).map(|c| (c.error, c.point)).ok_or(Error::InfeasibleWedge),
        Search::Bisect => bisect(ctx, k, tol),
    }
}

fn bisect(ctx: &DeltaContext, k: usize, tol: &Rat) -> Result<(Rat, PointR2), Error> {
    if !tol.is_positive() {
        return Err(Error::Internal("tolerance must be positive".into()));
    }
    let zero = Rat::zero();
    if let Some(p) = decide_delta(ctx, k, &zero) {
        return Ok((zero, p));
    }
    // a valid point in the slab shows up as a red-blue intersection or on a slab edge
    let a = &ctx.slope_bound;
    let mut hi = ctx.p_min.as_ref().map(|(_, v)| v.clone());
    for x in [-a, a.clone()] {
        if let Some((v, _)) = ctx.vertical_best(&x, k) {
            hi = Some(hi.map_or(v.clone(), |h: Rat| h.min(v)));
        }
    }
    let mut hi = hi.ok_or(Error::InfeasibleWedge)?;
    let mut witness = decide_delta(ctx, k, &hi).ok_or_else(|| Error::Internal("upper bracket rejected".into()))?;
    let mut lo = zero;
    let grow = Rat::one() + tol;
    while hi > &lo * &grow {
        let mid = if lo.is_zero() { &hi / int(2) } else { (&lo + &hi) / int(2) };
        match decide_delta(ctx, k, &mid) {
            Some(p) => {
                hi = mid;
                witness = p;
            }
            None => lo = mid,
        }
    }
    Ok((hi, witness))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxReport {
    pub k: usize,
    pub separator: Separator,
    pub mis: usize,
    pub misclassified_ids: Vec<usize>,
    /// Vertical error in the winning wedge's frame: the approximate metric value.
    pub approx_err: Rat,
    pub euclid_max_sq: Rat,
    pub eps: Rat,
    pub t: usize,
    pub wedges: usize,
    pub wedge: usize,
    /// Orientation within the wedge frame.
    pub frame_orientation: Orientation,
    /// `δ` returned by the wedge search; equals `approx_err` for the exact search.
    pub delta: Rat,
    pub search: Search,
}

/// Winner of one wedge and orientation, ranked by `(error, wedge, orientation)`.
#[derive(Clone, Debug)]
struct WedgeBest {
    err: Rat,
    wedge: usize,
    oi: usize,
    point: PointR2,
    delta: Rat,
}

impl WedgeBest {
    fn key(&self) -> (&Rat, usize, usize) {
        (&self.err, self.wedge, self.oi)
    }
}

/// Frame slope that maps back to a vertical separator under `r`.
pub fn forbidden_slope(r: &Rotation) -> Option<Rat> {
    (!r.sin.is_zero()).then(|| &r.cos / &r.sin)
}

fn wedge_best(ctx: &DeltaContext, k: usize, wedge: usize, opts: &ApproxOptions) -> Result<Option<WedgeBest>, Error> {
    match solve_wedge(ctx, k, &opts.tol, opts.search) {
        Ok((delta, point)) => {
            let oi = Orientation::BOTH.iter().position(|o| *o == ctx.orientation).expect("known");
            Ok(Some(WedgeBest { err: ctx.error(&point), wedge, oi, point, delta }))
        }
        Err(Error::InfeasibleWedge) => Ok(None),
        Err(e) => Err(e),
    }
}

fn finish(best: WedgeBest, tg: &TGon, pts: &[LabeledPoint], k: usize, opts: &ApproxOptions) -> Result<ApproxReport, Error> {
    let o = Orientation::BOTH[best.oi];
    let frame = Separator { line: LineR2::new(best.point.x.clone(), -&best.point.y), orientation: o };
    let separator = tg.wedges[best.wedge]
        .rotation
        .unapply_separator(&frame)
        .ok_or_else(|| Error::Internal("winning separator is vertical".into()))?;
    let rep = classify_mis(&separator, pts);
    if rep.mis > k {
        return Err(Error::Internal(format!("reported separator misclassifies {} > {k}", rep.mis)));
    }
    Ok(ApproxReport {
        k,
        separator,
        mis: rep.mis,
        misclassified_ids: rep.misclassified_ids,
        approx_err: best.err,
        euclid_max_sq: rep.max_sq,
        eps: tg.eps.clone(),
        t: tg.t,
        wedges: tg.wedges.len(),
        wedge: best.wedge,
        frame_orientation: o,
        delta: best.delta,
        search: opts.search,
    })
}

fn pick(acc: &mut Option<WedgeBest>, c: Option<WedgeBest>) {
    if let Some(c) = c {
        if acc.as_ref().map_or(true, |b| c.key() < b.key()) {
            *acc = Some(c);
        }
    }
}

/// Maps `f` over `items` on scoped worker threads, keeping order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len()).max(1);
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("wedge worker panicked")).collect()
    })
}

pub fn solve_approx(pts: &[LabeledPoint], k: usize, eps: &Rat) -> Result<ApproxReport, Error> {
    solve_approx_with(pts, k, eps, &ApproxOptions::default())
}

pub fn solve_approx_with(pts: &[LabeledPoint], k: usize, eps: &Rat, opts: &ApproxOptions) -> Result<ApproxReport, Error> {
    let tg = make_tgon(eps)?;
    solve_approx_tgon(pts, k, &tg, opts)
}

/// As [`solve_approx_with`] with a prepared wedge set.
pub fn solve_approx_tgon(pts: &[LabeledPoint], k: usize, tg: &TGon, opts: &ApproxOptions) -> Result<ApproxReport, Error> {
    let (red, blue) = split_colors(pts);
    if red.is_empty() || blue.is_empty() {
        return Err(Error::EmptyColor);
    }
    let k = k.min(pts.len());
    let per_wedge = par_map(&tg.wedges, |w| -> Result<Option<WedgeBest>, Error> {
        let frame: Vec<LabeledPoint> = pts.iter().map(|p| LabeledPoint { point: w.rotation.apply(&p.point), ..p.clone() }).collect();
        let mut acc = None;
        for o in Orientation::BOTH {
            let ctx = DeltaContext::build(&frame, k, o, &tg.slope_bound, forbidden_slope(&w.rotation))?;
            pick(&mut acc, wedge_best(&ctx, k, w.index, opts)?);
        }
        Ok(acc)
    });
    let mut best = None;
    for r in per_wedge {
        pick(&mut best, r?);
    }
    match best {
        Some(b) => finish(b, tg, pts, k, opts),
        None => {
            let k_min = Orientation::BOTH.iter().map(|o| static_min_violations(&ConstraintSet::from_points(pts, *o)).0).min().unwrap_or(0);
            Err(Error::Infeasible { k, k_min })
        }
    }
}

/// Envelope of the dual lines of hull vertices given in envelope order.
fn envelope_from(ids: &[usize], hull: &DynHull, kind: ChainKind) -> Option<Chain> {
    let mut lines: Vec<(usize, LineR2)> = Vec::with_capacity(ids.len());
    for id in ids {
        let l = dualize_point(hull.point(*id).expect("hull vertex"));
        // a vertical hull edge gives parallel duals; only the extreme one is on the envelope
        if let Some(last) = lines.last_mut() {
            if last.1.m == l.m {
                let better = if kind == ChainKind::Concave { l.c < last.1.c } else { l.c > last.1.c };
                if better {
                    *last = (*id, l);
                }
                continue;
            }
        }
        lines.push((*id, l));
    }
    if lines.is_empty() {
        return None;
    }
    let mut pieces = Vec::with_capacity(lines.len());
    let mut lo = XB::NegInf;
    for (i, (id, l)) in lines.iter().enumerate() {
        let hi = match lines.get(i + 1) {
            Some((_, n)) => XB::Fin(l.meet_x(n).expect("hull vertices have distinct x")),
            None => XB::PosInf,
        };
        pieces.push(Piece { line_id: *id, line: l.clone(), lo: lo.clone(), hi: hi.clone() });
        lo = hi;
    }
    Some(Chain { kind, pieces })
}

/// Lower envelope of the duals (concave): upper hull right to left.
pub fn lower_envelope_of(hull: &DynHull) -> Option<Chain> {
    let mut ids = hull.upper();
    ids.reverse();
    envelope_from(&ids, hull, ChainKind::Concave)
}

/// Upper envelope of the duals (convex): lower hull left to right.
pub fn upper_envelope_of(hull: &DynHull) -> Option<Chain> {
    envelope_from(&hull.lower(), hull, ChainKind::Convex)
}

/// One wedge and orientation of the dynamic structure.
#[derive(Clone, Debug)]
struct Frame {
    wedge: usize,
    orientation: Orientation,
    lp: DynState,
    /// Frame points whose duals are violated from above, and the others.
    low: DynHull,
    high: DynHull,
}

/// Semi-online approximate separator.
#[derive(Clone, Debug)]
pub struct DynApproxState {
    k: usize,
    tgon: TGon,
    opts: ApproxOptions,
    points: BTreeMap<usize, LabeledPoint>,
    line_ids: HashMap<usize, usize>,
    frames: Vec<Frame>,
}

impl DynApproxState {
    pub fn build(pts: &[LabeledPoint], k: usize, eps: &Rat, schedule: &HashMap<usize, u64>, opts: ApproxOptions) -> Result<Self, Error> {
        let tgon = make_tgon(eps)?;
        let mut points = BTreeMap::new();
        for p in pts {
            if points.insert(p.id, p.clone()).is_some() {
                return Err(Error::DuplicateId(p.id));
            }
        }
        let mut frames = Vec::with_capacity(2 * tgon.wedges.len());
        for w in &tgon.wedges {
            let fp: Vec<LabeledPoint> = pts.iter().map(|p| LabeledPoint { point: w.rotation.apply(&p.point), ..p.clone() }).collect();
            for o in Orientation::BOTH {
                let cs = ConstraintSet::from_points(&fp, o);
                let lp = DynState::build(&cs, schedule, DynMode::Fixed(k))?;
                let (mut low, mut high) = (DynHull::new(), DynHull::new());
                for p in &fp {
                    let h = if p.color == lower_color(o) { &mut low } else { &mut high };
                    h.insert(p.id, p.point.clone())?;
                }
                frames.push(Frame { wedge: w.index, orientation: o, lp, low, high });
            }
        }
        let line_ids = pts.iter().map(|p| (p.id, p.id)).collect();
        Ok(DynApproxState { k, tgon, opts, points, line_ids, frames })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tgon(&self) -> &TGon {
        &self.tgon
    }

    pub fn live_points(&self) -> Vec<LabeledPoint> {
        self.points.values().cloned().collect()
    }

    /// Applies one update; fails without changes on schedule violations or unknown ids.
    pub fn update(&mut self, op: &PointOp) -> Result<(), Error> {
        match op {
            PointOp::Insert { point, delete_at } => {
                if self.points.contains_key(&point.id) {
                    return Err(Error::DuplicateId(point.id));
                }
                let mut lid = None;
                for f in &mut self.frames {
                    let rot = &self.tgon.wedges[f.wedge].rotation;
                    let fp = rot.apply(&point.point);
                    let role = if point.color == lower_color(f.orientation) { Color::Red } else { Color::Blue };
                    let id = f.lp.update(DynOp::Insert { color: role, line: dualize_point(&fp), delete_at: *delete_at })?.expect("insert id");
                    if *lid.get_or_insert(id) != id {
                        return Err(Error::Internal("frames disagree on line ids".into()));
                    }
                    let h = if role == Color::Red { &mut f.low } else { &mut f.high };
                    h.insert(id, fp)?;
                }
                if let Some(id) = lid {
                    self.line_ids.insert(point.id, id);
                }
                self.points.insert(point.id, point.clone());
            }
            PointOp::Delete { id } => {
                let lid = *self.line_ids.get(id).ok_or(Error::UnknownId(*id))?;
                for f in &mut self.frames {
                    f.lp.update(DynOp::Delete { id: lid })?;
                    if f.low.remove(lid).is_err() {
                        f.high.remove(lid)?;
                    }
                }
                self.line_ids.remove(id);
                self.points.remove(id);
            }
        }
        Ok(())
    }

    /// Current approximate separator; `None` if no separator fits the budget
    /// or a color is missing.
    pub fn report(&self) -> Result<Option<ApproxReport>, Error> {
        let pts = self.live_points();
        let (red, blue) = split_colors(&pts);
        if red.is_empty() || blue.is_empty() {
            return Ok(None);
        }
        let k = self.k.min(pts.len());
        // frames hold unshareable caches, so their parts are read before fanning out
        let parts: Vec<_> = self
            .frames
            .iter()
            .filter_map(|f| {
                let (lower, upper) = (lower_envelope_of(&f.low)?, upper_envelope_of(&f.high)?);
                Some((f.wedge, f.orientation, f.lp.live_set(), f.lp.chains(Color::Red), f.lp.chains(Color::Blue), lower, upper))
            })
            .collect();
        let (tg, opts) = (&self.tgon, &self.opts);
        let per_frame = par_map(&parts, |(w, o, cs, red, blue, lower, upper)| -> Result<Option<WedgeBest>, Error> {
            let forbidden = forbidden_slope(&tg.wedges[*w].rotation);
            let ctx = DeltaContext::from_parts(cs.clone(), red, blue, lower, upper, k, *o, &tg.slope_bound, forbidden);
            wedge_best(&ctx, k, *w, opts)
        });
        let mut best = None;
        for r in per_frame {
            pick(&mut best, r?);
        }
        best.map(|b| finish(b, &self.tgon, &pts, k, &self.opts)).transpose()
    }
}

pub fn dyn_approx_build(pts: &[LabeledPoint], k: usize, eps: &Rat, schedule: &HashMap<usize, u64>) -> Result<DynApproxState, Error> {
    DynApproxState::build(pts, k, eps, schedule, ApproxOptions::default())
}

pub fn dyn_approx_update(st: &mut DynApproxState, op: &PointOp) -> Result<Option<ApproxReport>, Error> {
    st.update(op)?;
    st.report()
}
