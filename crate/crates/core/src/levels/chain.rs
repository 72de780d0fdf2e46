use num_traits::{Signed, Zero};

use super::XB;
use crate::geom::{LineR2, PointR2};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainKind {
    Concave,
    Convex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub line_id: usize,
    pub line: LineR2,
    pub lo: XB,
    pub hi: XB,
}

/// x-monotone polyline made of pieces of input lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub kind: ChainKind,
    pub pieces: Vec<Piece>,
}

impl Chain {
    /// A single line over the whole x-axis; it is both concave and convex.
    pub fn from_line(line_id: usize, line: LineR2, kind: ChainKind) -> Chain {
        Chain { kind, pieces: vec![Piece { line_id, line, lo: XB::NegInf, hi: XB::PosInf }] }
    }

    pub fn lo(&self) -> &XB {
        &self.pieces[0].lo
    }

    pub fn hi(&self) -> &XB {
        &self.pieces[self.pieces.len() - 1].hi
    }

    pub fn contains_x(&self, x: &Rat) -> bool {
        let x = XB::Fin(x.clone());
        !self.pieces.is_empty() && self.lo() <= &x && &x <= self.hi()
    }

    /// Index of a piece whose closed x-range contains `x`.
    pub fn piece_index(&self, x: &Rat) -> Option<usize> {
        let xb = XB::Fin(x.clone());
        let i = self.pieces.partition_point(|p| p.hi < xb);
        (i < self.pieces.len() && self.pieces[i].lo <= xb).then_some(i)
    }

    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        self.piece_index(x).map(|i| self.pieces[i].line.eval(x))
    }

    /// Finite breakpoints, left to right.
    pub fn vertices(&self) -> Vec<PointR2> {
        self.pieces
            .iter()
            .skip(1)
            .filter_map(|p| p.lo.fin().map(|x| PointR2::new(x.clone(), p.line.eval(x))))
            .collect()
    }

    /// Mirror through the x-axis. `originals` supplies the un-negated lines by id.
    pub fn negated(&self, originals: &[LineR2]) -> Chain {
        Chain {
            kind: match self.kind {
                ChainKind::Concave => ChainKind::Convex,
                ChainKind::Convex => ChainKind::Concave,
            },
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece { line: originals[p.line_id].clone(), ..p.clone() })
                .collect(),
        }
    }

    /// Restriction to the closed range `[lo, hi]`; `None` if they do not meet.
    pub fn clipped(&self, lo: &XB, hi: &XB) -> Option<Chain> {
        let pieces: Vec<Piece> = self
            .pieces
            .iter()
            .filter(|p| &p.hi >= lo && &p.lo <= hi)
            .map(|p| Piece {
                lo: p.lo.clone().max(lo.clone()),
                hi: p.hi.clone().min(hi.clone()),
                ..p.clone()
            })
            .filter(|p| p.lo <= p.hi)
            .collect();
        (!pieces.is_empty()).then_some(Chain { kind: self.kind, pieces })
    }

    /// Pieces abut, and slopes are monotone as the kind requires.
    pub fn is_well_formed(&self) -> bool {
        if self.pieces.is_empty() || self.pieces.iter().any(|p| p.lo > p.hi) {
            return false;
        }
        self.pieces.windows(2).all(|w| {
            let (a, b) = (&w[0], &w[1]);
            let abut = a.hi == b.lo;
            let on = match a.hi.fin() {
                Some(x) => a.line.eval(x) == b.line.eval(x),
                None => false,
            };
            let mono = match self.kind {
                ChainKind::Concave => b.line.m <= a.line.m,
                ChainKind::Convex => b.line.m >= a.line.m,
            };
            abut && on && mono
        })
    }
}

/// `{x : f(x) + df ≥ g(x) + dg}` over the common domain of `f` and `g`.
/// Requires `f − g` concave (e.g. `f` concave and `g` convex), so the set is a
/// single closed interval or empty.
pub fn ge_interval(f: &Chain, df: &Rat, g: &Chain, dg: &Rat) -> Option<(XB, XB)> {
    let shift = df - dg;
    let (mut i, mut j) = (0usize, 0usize);
    let mut res: Option<(XB, XB)> = None;
    while i < f.pieces.len() && j < g.pieces.len() {
        let (pf, pg) = (&f.pieces[i], &g.pieces[j]);
        let lo = pf.lo.clone().max(pg.lo.clone());
        let hi = pf.hi.clone().min(pg.hi.clone());
        if lo <= hi {
            if let Some((a, b)) = linear_ge(&(&pf.line.m - &pg.line.m), &(&pf.line.c - &pg.line.c + &shift), &lo, &hi) {
                res = Some(match res {
                    None => (a, b),
                    Some((ra, rb)) => (ra.min(a), rb.max(b)),
                });
            }
        }
        if pf.hi < pg.hi {
            i += 1;
        } else if pg.hi < pf.hi {
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    res
}

/// `{x ∈ [lo, hi] : s·x + t ≥ 0}`.
fn linear_ge(s: &Rat, t: &Rat, lo: &XB, hi: &XB) -> Option<(XB, XB)> {
    if s.is_zero() {
        return (!t.is_negative()).then(|| (lo.clone(), hi.clone()));
    }
    let r = XB::Fin(-t / s);
    if s.is_positive() {
        (r <= *hi).then(|| (r.max(lo.clone()), hi.clone()))
    } else {
        (r >= *lo).then(|| (lo.clone(), r.min(hi.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;

    fn vee() -> Chain {
        // concave: y = x up to 0, then y = -x
        Chain {
            kind: ChainKind::Concave,
            pieces: vec![
                Piece { line_id: 0, line: LineR2::ints(1, 0), lo: XB::NegInf, hi: XB::Fin(int(0)) },
                Piece { line_id: 1, line: LineR2::ints(-1, 0), lo: XB::Fin(int(0)), hi: XB::PosInf },
            ],
        }
    }

    #[test]
    fn eval_and_vertices() {
        let c = vee();
        assert!(c.is_well_formed());
        assert_eq!(c.eval(&int(-3)), Some(int(-3)));
        assert_eq!(c.eval(&int(5)), Some(int(-5)));
        assert_eq!(c.vertices(), vec![PointR2::ints(0, 0)]);
    }

    #[test]
    fn interval_against_horizontal_line() {
        let c = vee();
        let h = Chain::from_line(2, LineR2::ints(0, -2), ChainKind::Convex);
        let z = Rat::zero();
        assert_eq!(ge_interval(&c, &z, &h, &z), Some((XB::Fin(int(-2)), XB::Fin(int(2)))));
        assert_eq!(ge_interval(&c, &z, &h, &int(3)), None);
        // f − g = const ≥ 0 everywhere
        let l = Chain::from_line(4, LineR2::ints(2, 1), ChainKind::Concave);
        let m = Chain::from_line(5, LineR2::ints(2, 0), ChainKind::Convex);
        assert_eq!(ge_interval(&l, &z, &m, &z), Some((XB::NegInf, XB::PosInf)));
    }

    #[test]
    fn clipping() {
        let c = vee().clipped(&XB::Fin(int(1)), &XB::Fin(int(4))).unwrap();
        assert_eq!(c.pieces.len(), 1);
        assert_eq!(c.pieces[0].line_id, 1);
        assert!(vee().clipped(&XB::Fin(int(1)), &XB::Fin(int(0))).is_none());
    }
}
