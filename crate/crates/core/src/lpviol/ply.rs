//! Chromatic ply along one chain.
//!
//! For a red chain `r` and a blue chain `b`, `J = {x : r(x) ≥ b(x)}` is an
//! interval. A point of `r` at `x ∉ J` has `b` strictly above it, and a point
//! of `b` at `x ∉ J` has `r` strictly below it, so the same interval feeds the
//! ply lists of both chains.

use crate::levels::XB;
use crate::rat::Rat;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlyStructure {
    starts: Vec<XB>,
    ends: Vec<XB>,
    /// Opposing chains whose interval is empty (always strictly across).
    empty: usize,
}

fn insert_sorted(v: &mut Vec<XB>, x: XB) {
    let i = v.partition_point(|y| *y < x);
    v.insert(i, x);
}

fn remove_sorted(v: &mut Vec<XB>, x: &XB) -> bool {
    let i = v.partition_point(|y| y < x);
    if i < v.len() && v[i] == *x {
        v.remove(i);
        true
    } else {
        false
    }
}

impl PlyStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, j: &Option<(XB, XB)>) {
        match j {
            None => self.empty += 1,
            Some((s, e)) => {
                insert_sorted(&mut self.starts, s.clone());
                insert_sorted(&mut self.ends, e.clone());
            }
        }
    }

    pub fn remove(&mut self, j: &Option<(XB, XB)>) -> bool {
        match j {
            None if self.empty > 0 => {
                self.empty -= 1;
                true
            }
            None => false,
            Some((s, e)) => {
                let ok = remove_sorted(&mut self.starts, s);
                ok && remove_sorted(&mut self.ends, e)
            }
        }
    }

    /// Number of nonempty intervals held.
    pub fn intervals(&self) -> usize {
        self.starts.len()
    }

    pub fn opposing(&self) -> usize {
        self.starts.len() + self.empty
    }

    /// Opposing chains strictly across the chain at `x`: intervals ending
    /// before `x`, starting after `x`, or empty.
    pub fn ply(&self, x: &Rat) -> usize {
        let fx = XB::Fin(x.clone());
        let ended = self.ends.partition_point(|e| *e < fx);
        let started = self.starts.partition_point(|s| *s <= fx);
        ended + (self.starts.len() - started) + self.empty
    }

    pub fn is_consistent(&self) -> bool {
        self.starts.len() == self.ends.len() && self.starts.windows(2).all(|w| w[0] <= w[1]) && self.ends.windows(2).all(|w| w[0] <= w[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;

    #[test]
    fn counts() {
        let mut p = PlyStructure::new();
        p.add(&Some((XB::Fin(int(0)), XB::Fin(int(2)))));
        p.add(&Some((XB::NegInf, XB::Fin(int(1)))));
        p.add(&None);
        assert_eq!(p.ply(&int(-1)), 2);
        assert_eq!(p.ply(&int(0)), 1);
        assert_eq!(p.ply(&int(1)), 1);
        assert_eq!(p.ply(&int(3)), 3);
        assert!(p.remove(&Some((XB::NegInf, XB::Fin(int(1))))));
        assert!(!p.remove(&Some((XB::NegInf, XB::Fin(int(1))))));
        assert_eq!(p.ply(&int(3)), 2);
        assert_eq!(p.intervals(), 1);
        assert!(p.is_consistent());
    }
}
