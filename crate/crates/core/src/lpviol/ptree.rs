//! Buffered partition trees over a point set with integer counts.
//!
//! A node buffer `b(u)` is added lazily to every point below `u`. A node stores
//! `minv(u)`, the minimum over live points below it of the count with the
//! buffers of `u` and its ancestors left out, so the true subtree minimum is
//! `minv(u) + Σ b(a)` over `a` on the root path including `u`.
//! Trees are grouped in a logarithmic-method forest to absorb insertions.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::geom::{LineR2, PointR2};
use crate::rat::Rat;

/// Splits a set of point indices into at most four groups.
pub trait Partitioner: Send + Sync + std::fmt::Debug {
    fn split(&self, pts: &[PointR2], idx: Vec<usize>) -> Vec<Vec<usize>>;
}

/// Median cut on x, then a median cut on y inside each half.
#[derive(Clone, Copy, Debug, Default)]
pub struct KdPartitioner;

impl Partitioner for KdPartitioner {
    fn split(&self, pts: &[PointR2], mut idx: Vec<usize>) -> Vec<Vec<usize>> {
        idx.sort_by(|&a, &b| pts[a].cmp(&pts[b]));
        let right = idx.split_off(idx.len() / 2);
        let mut out = Vec::with_capacity(4);
        for mut half in [idx, right] {
            half.sort_by(|&a, &b| pts[a].y.cmp(&pts[b].y).then(pts[a].x.cmp(&pts[b].x)));
            let top = half.split_off(half.len() / 2);
            out.push(half);
            out.push(top);
        }
        out.retain(|g| !g.is_empty());
        out
    }
}

/// Peels off a single point per level. Only useful for testing that results
/// do not depend on partition quality.
#[derive(Clone, Copy, Debug, Default)]
pub struct SkewPartitioner;

impl Partitioner for SkewPartitioner {
    fn split(&self, _pts: &[PointR2], mut idx: Vec<usize>) -> Vec<Vec<usize>> {
        let rest = idx.split_off(1);
        vec![idx, rest]
    }
}

const LEAF: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Points strictly above the line.
    Above,
    /// Points strictly below the line.
    Below,
}

fn strictly(side: Side, l: &LineR2, p: &PointR2) -> bool {
    let v = l.eval(&p.x);
    match side {
        Side::Above => p.y > v,
        Side::Below => p.y < v,
    }
}

#[derive(Clone, Debug)]
struct Node {
    lo: PointR2,
    hi: PointR2,
    buf: i64,
    minv: Option<i64>,
    children: Vec<usize>,
    pts: Vec<usize>,
    parent: Option<usize>,
}

impl Node {
    fn corners(&self) -> [PointR2; 4] {
        [
            self.lo.clone(),
            PointR2::new(self.hi.x.clone(), self.lo.y.clone()),
            self.hi.clone(),
            PointR2::new(self.lo.x.clone(), self.hi.y.clone()),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Region {
    Inside,
    Outside,
    Crossing,
}

#[derive(Clone, Debug)]
pub struct PartitionTree {
    pts: Vec<PointR2>,
    base: Vec<i64>,
    dead: Vec<bool>,
    handles: Vec<u64>,
    leaf_of: Vec<usize>,
    nodes: Vec<Node>,
    live: usize,
}

impl PartitionTree {
    pub fn build(items: Vec<(u64, PointR2, i64)>, part: &dyn Partitioner) -> PartitionTree {
        let n = items.len();
        let mut t = PartitionTree {
            pts: Vec::with_capacity(n),
            base: Vec::with_capacity(n),
            dead: vec![false; n],
            handles: Vec::with_capacity(n),
            leaf_of: vec![0; n],
            nodes: Vec::new(),
            live: n,
        };
        for (h, p, c) in items {
            t.handles.push(h);
            t.pts.push(p);
            t.base.push(c);
        }
        if n > 0 {
            t.build_node((0..n).collect(), None, part);
        }
        t
    }

    fn build_node(&mut self, idx: Vec<usize>, parent: Option<usize>, part: &dyn Partitioner) -> usize {
        let mut lo = self.pts[idx[0]].clone();
        let mut hi = lo.clone();
        for &i in &idx[1..] {
            let p = &self.pts[i];
            lo.x = lo.x.clone().min(p.x.clone());
            lo.y = lo.y.clone().min(p.y.clone());
            hi.x = hi.x.clone().max(p.x.clone());
            hi.y = hi.y.clone().max(p.y.clone());
        }
        let id = self.nodes.len();
        self.nodes.push(Node { lo, hi, buf: 0, minv: None, children: Vec::new(), pts: Vec::new(), parent });
        if idx.len() <= LEAF {
            for &i in &idx {
                self.leaf_of[i] = id;
            }
            self.nodes[id].minv = idx.iter().map(|&i| self.base[i]).min();
            self.nodes[id].pts = idx;
        } else {
            let groups = part.split(&self.pts, idx);
            let children: Vec<usize> = groups.into_iter().map(|g| self.build_node(g, Some(id), part)).collect();
            self.nodes[id].children = children;
            self.refresh(id);
        }
        id
    }

    fn refresh(&mut self, u: usize) {
        let node = &self.nodes[u];
        let m = if node.children.is_empty() {
            node.pts.iter().filter(|&&i| !self.dead[i]).map(|&i| self.base[i]).min()
        } else {
            node.children.iter().filter_map(|&c| self.nodes[c].minv.map(|v| v + self.nodes[c].buf)).min()
        };
        self.nodes[u].minv = m;
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn dead_count(&self) -> usize {
        self.pts.len() - self.live
    }

    fn region(&self, u: usize, side: Side, l: &LineR2) -> Region {
        let inside = self.nodes[u].corners().iter().filter(|c| strictly(side, l, c)).count();
        match inside {
            4 => Region::Inside,
            0 if self.nodes[u].corners().iter().all(|c| !strictly(side, l, c)) => Region::Outside,
            _ => Region::Crossing,
        }
    }

    /// Adds `delta` to every point strictly on `side` of `l`. Returns the
    /// number of crossing nodes visited.
    pub fn halfplane_update(&mut self, l: &LineR2, side: Side, delta: i64) -> usize {
        if self.nodes.is_empty() {
            return 0;
        }
        self.update_rec(0, l, side, delta)
    }

    fn update_rec(&mut self, u: usize, l: &LineR2, side: Side, delta: i64) -> usize {
        match self.region(u, side, l) {
            Region::Inside => {
                self.nodes[u].buf += delta;
                0
            }
            Region::Outside => 0,
            Region::Crossing => {
                let mut crossings = 1;
                if self.nodes[u].children.is_empty() {
                    for j in 0..self.nodes[u].pts.len() {
                        let i = self.nodes[u].pts[j];
                        if strictly(side, l, &self.pts[i]) {
                            self.base[i] += delta;
                        }
                    }
                } else {
                    for j in 0..self.nodes[u].children.len() {
                        let c = self.nodes[u].children[j];
                        crossings += self.update_rec(c, l, side, delta);
                    }
                }
                self.refresh(u);
                crossings
            }
        }
    }

    fn path_sum(&self, mut u: usize) -> i64 {
        let mut s = self.nodes[u].buf;
        while let Some(p) = self.nodes[u].parent {
            s += self.nodes[p].buf;
            u = p;
        }
        s
    }

    fn count_of(&self, i: usize) -> i64 {
        self.base[i] + self.path_sum(self.leaf_of[i])
    }

    /// Marks point `i` deleted; it is never reported again.
    fn kill(&mut self, i: usize) {
        if self.dead[i] {
            return;
        }
        self.dead[i] = true;
        self.live -= 1;
        let mut u = Some(self.leaf_of[i]);
        while let Some(v) = u {
            self.refresh(v);
            u = self.nodes[v].parent;
        }
    }

    pub fn global_min(&self) -> Option<i64> {
        let root = self.nodes.first()?;
        root.minv.map(|m| m + root.buf)
    }

    /// Minimum count over live points with `x ≤ bound`.
    fn min_left_of(&self, bound: &Rat) -> Option<i64> {
        if self.nodes.is_empty() {
            return None;
        }
        self.min_left_rec(0, 0, bound)
    }

    fn min_left_rec(&self, u: usize, acc: i64, bound: &Rat) -> Option<i64> {
        let node = &self.nodes[u];
        let acc = acc + node.buf;
        let m = node.minv?;
        if node.lo.x > *bound {
            return None;
        }
        if node.hi.x <= *bound {
            return Some(m + acc);
        }
        if node.children.is_empty() {
            node.pts.iter().filter(|&&i| !self.dead[i] && self.pts[i].x <= *bound).map(|&i| self.base[i] + acc).min()
        } else {
            node.children.iter().filter_map(|&c| self.min_left_rec(c, acc, bound)).min()
        }
    }

    /// Lowest live point on the vertical line `x` with count at most `k`.
    fn lowest_at(&self, x: &Rat, k: i64) -> Option<(PointR2, i64, u64)> {
        let mut best = None;
        if !self.nodes.is_empty() {
            self.lowest_rec(0, 0, x, k, &mut best);
        }
        best.map(|(i, c)| (self.pts[i].clone(), c, self.handles[i]))
    }

    fn lowest_rec(&self, u: usize, acc: i64, x: &Rat, k: i64, best: &mut Option<(usize, i64)>) {
        let node = &self.nodes[u];
        let acc = acc + node.buf;
        let Some(m) = node.minv else { return };
        if m + acc > k || node.lo.x > *x || node.hi.x < *x {
            return;
        }
        if let Some((b, _)) = best {
            if node.lo.y >= self.pts[*b].y {
                return;
            }
        }
        if node.children.is_empty() {
            for &i in &node.pts {
                let c = self.base[i] + acc;
                if !self.dead[i] && self.pts[i].x == *x && c <= k && best.map_or(true, |(b, _)| self.pts[i].y < self.pts[b].y) {
                    *best = Some((i, c));
                }
            }
        } else {
            for &c in &node.children {
                self.lowest_rec(c, acc, x, k, best);
            }
        }
    }

    fn live_items(&self) -> Vec<(u64, PointR2, i64)> {
        (0..self.pts.len()).filter(|&i| !self.dead[i]).map(|i| (self.handles[i], self.pts[i].clone(), self.count_of(i))).collect()
    }

    /// Recomputes every `minv` from scratch and compares.
    pub fn audit(&self) -> Result<(), String> {
        for u in (0..self.nodes.len()).rev() {
            let node = &self.nodes[u];
            let expect = if node.children.is_empty() {
                node.pts.iter().filter(|&&i| !self.dead[i]).map(|&i| self.base[i]).min()
            } else {
                node.children.iter().filter_map(|&c| self.nodes[c].minv.map(|v| v + self.nodes[c].buf)).min()
            };
            if expect != node.minv {
                return Err(format!("node {u}: stored minimum {:?}, recomputed {:?}", node.minv, expect));
            }
            for p in node.pts.iter().map(|&i| &self.pts[i]) {
                if p.x < node.lo.x || p.x > node.hi.x || p.y < node.lo.y || p.y > node.hi.y {
                    return Err(format!("node {u}: point outside its box"));
                }
            }
        }
        if self.dead.iter().filter(|d| !**d).count() != self.live {
            return Err("live count mismatch".into());
        }
        Ok(())
    }
}

/// Metrics collected by a forest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ForestStats {
    pub halfplane_updates: u64,
    pub crossings: u64,
    pub rebuilds: u64,
}

/// Logarithmic-method forest: slot `i` holds a tree built from at most `2^i` points.
#[derive(Clone, Debug)]
pub struct PtForest {
    slots: Vec<Option<PartitionTree>>,
    loc: HashMap<u64, (usize, usize)>,
    xs: BTreeMap<Rat, usize>,
    part: Arc<dyn Partitioner>,
    next_handle: u64,
    pub stats: ForestStats,
}

impl Default for PtForest {
    fn default() -> Self {
        PtForest::new(Arc::new(KdPartitioner))
    }
}

impl PtForest {
    pub fn new(part: Arc<dyn Partitioner>) -> PtForest {
        PtForest { slots: Vec::new(), loc: HashMap::new(), xs: BTreeMap::new(), part, next_handle: 0, stats: ForestStats::default() }
    }

    pub fn len(&self) -> usize {
        self.loc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loc.is_empty()
    }

    /// Points held including deleted ones not yet rebuilt away.
    pub fn stored(&self) -> usize {
        self.slots.iter().flatten().map(|t| t.pts.len()).sum()
    }

    /// Replaces the contents with `items`, all in one tree.
    pub fn rebuild(&mut self, items: Vec<(PointR2, i64)>) -> Vec<u64> {
        self.slots.clear();
        self.loc.clear();
        self.xs.clear();
        let handles: Vec<u64> = items.iter().map(|_| self.fresh()).collect();
        let with_h: Vec<(u64, PointR2, i64)> = handles.iter().zip(items).map(|(&h, (p, c))| (h, p, c)).collect();
        if !with_h.is_empty() {
            let slot = usize::BITS as usize - (with_h.len() - 1).leading_zeros() as usize;
            self.place(slot, with_h);
        }
        self.stats.rebuilds += 1;
        handles
    }

    fn fresh(&mut self) -> u64 {
        self.next_handle += 1;
        self.next_handle
    }

    fn place(&mut self, slot: usize, items: Vec<(u64, PointR2, i64)>) {
        if self.slots.len() <= slot {
            self.slots.resize(slot + 1, None);
        }
        for (j, (h, p, _)) in items.iter().enumerate() {
            self.loc.insert(*h, (slot, j));
            *self.xs.entry(p.x.clone()).or_insert(0) += 1;
        }
        self.slots[slot] = Some(PartitionTree::build(items, self.part.as_ref()));
    }

    fn take_slot(&mut self, slot: usize) -> Vec<(u64, PointR2, i64)> {
        let Some(t) = self.slots[slot].take() else { return Vec::new() };
        let items = t.live_items();
        for (h, p, _) in &items {
            self.loc.remove(h);
            self.forget_x(&p.x);
        }
        items
    }

    fn forget_x(&mut self, x: &Rat) {
        if let Some(c) = self.xs.get_mut(x) {
            *c -= 1;
            if *c == 0 {
                self.xs.remove(x);
            }
        }
    }

    pub fn insert(&mut self, p: PointR2, count: i64) -> u64 {
        let h = self.fresh();
        let mut carry = vec![(h, p, count)];
        let mut slot = 0;
        while slot < self.slots.len() && self.slots[slot].is_some() {
            carry.extend(self.take_slot(slot));
            slot += 1;
        }
        self.place(slot, carry);
        h
    }

    /// Sentinel deletion; a tree is rebuilt once half its points are dead.
    pub fn delete(&mut self, h: u64) -> bool {
        let Some((slot, i)) = self.loc.remove(&h) else { return false };
        let tree = self.slots[slot].as_mut().expect("slot of a live handle");
        let x = tree.pts[i].x.clone();
        tree.kill(i);
        let sparse = tree.dead_count() > tree.len();
        self.forget_x(&x);
        if sparse {
            let items = self.take_slot(slot);
            if !items.is_empty() {
                self.place(slot, items);
            }
            self.stats.rebuilds += 1;
        }
        true
    }

    pub fn count(&self, h: u64) -> Option<i64> {
        let &(slot, i) = self.loc.get(&h)?;
        Some(self.slots[slot].as_ref()?.count_of(i))
    }

    pub fn point(&self, h: u64) -> Option<&PointR2> {
        let &(slot, i) = self.loc.get(&h)?;
        Some(&self.slots[slot].as_ref()?.pts[i])
    }

    pub fn halfplane_update(&mut self, l: &LineR2, side: Side, delta: i64) {
        self.stats.halfplane_updates += 1;
        for t in self.slots.iter_mut().flatten() {
            self.stats.crossings += t.halfplane_update(l, side, delta) as u64;
        }
    }

    pub fn global_min(&self) -> Option<i64> {
        self.slots.iter().flatten().filter_map(PartitionTree::global_min).min()
    }

    fn min_left_of(&self, x: &Rat) -> Option<i64> {
        self.slots.iter().flatten().filter_map(|t| t.min_left_of(x)).min()
    }

    /// Leftmost (then lowest) live point with count at most `k`: binary search
    /// over the stored x-coordinates with left-halfplane minimum probes.
    pub fn query(&self, k: i64) -> Option<(PointR2, i64)> {
        if self.global_min()? > k {
            return None;
        }
        let xs: Vec<&Rat> = self.xs.keys().collect();
        let (mut lo, mut hi) = (0usize, xs.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.min_left_of(xs[mid]).is_some_and(|m| m <= k) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let x = xs[lo];
        self.slots
            .iter()
            .flatten()
            .filter_map(|t| t.lowest_at(x, k))
            .min_by(|a, b| a.0.y.cmp(&b.0.y))
            .map(|(p, c, _)| (p, c))
    }

    pub fn audit(&self) -> Result<(), String> {
        for (slot, t) in self.slots.iter().enumerate() {
            if let Some(t) = t {
                t.audit().map_err(|e| format!("slot {slot}: {e}"))?;
                if t.pts.len() > 1 << slot {
                    return Err(format!("slot {slot} holds {} points", t.pts.len()));
                }
            }
        }
        let live: usize = self.slots.iter().flatten().map(|t| t.len()).sum();
        if live != self.loc.len() || self.xs.values().sum::<usize>() != live {
            return Err("handle index out of sync".into());
        }
        Ok(())
    }
}
