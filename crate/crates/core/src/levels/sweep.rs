//! Kinetic sweep of the bottom `k+1` lines.
//!
//! The block holds the `k+1` lowest lines in order. Swaps inside the block are
//! level vertices where chains pass straight through; a swap at the top slot
//! with the lowest line outside the block is where a chain turns. The lines
//! outside the block sit in a kinetic tournament so that swap can be
//! predicted.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{Chain, ChainKind, LevelEdge, LevelVertex, Piece, XB};
use crate::geom::{LineR2, PointR2};
use crate::rat::Rat;

#[derive(Clone, Debug, Default)]
pub struct SweepOutput {
    /// Concave chains, one per block slot, numbered by slot at x = −∞.
    pub chains: Vec<Chain>,
    /// One entry per adjacent swap; concurrent lines give several at one point.
    pub vertices: Vec<LevelVertex>,
    pub edges: Vec<LevelEdge>,
    /// For each query point, lines strictly below it, saturated at `k+1`.
    pub counts: Vec<usize>,
    pub events: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Ev {
    Node(usize, u32),
    Pair(usize, u32),
    Boundary(u32),
}

struct Sweep<'a> {
    lines: &'a [LineR2],
    /// `None` is x = −∞.
    cur: Option<Rat>,
    block: Vec<usize>,
    full: bool,
    chain_of_pos: Vec<usize>,
    chain_line: Vec<usize>,
    chain_start: Vec<XB>,
    chain_pieces: Vec<Vec<Piece>>,
    edge_start: Vec<XB>,
    size: usize,
    win: Vec<Option<usize>>,
    node_ver: Vec<u32>,
    pair_ver: Vec<u32>,
    bound_ver: u32,
    heap: BinaryHeap<Reverse<(Rat, u64, Ev)>>,
    seq: u64,
    record: bool,
    out: SweepOutput,
}

impl<'a> Sweep<'a> {
    /// Order just to the right of the current sweep position.
    fn cmp(&self, i: usize, j: usize) -> Ordering {
        let (a, b) = (&self.lines[i], &self.lines[j]);
        let by_value = match &self.cur {
            None => Ordering::Equal,
            Some(x) => a.eval(x).cmp(&b.eval(x)),
        };
        let by_slope = match &self.cur {
            None => b.m.cmp(&a.m),
            Some(_) => a.m.cmp(&b.m),
        };
        by_value.then(by_slope).then_with(|| a.c.cmp(&b.c)).then(i.cmp(&j))
    }

    fn push(&mut self, t: Rat, ev: Ev) {
        debug_assert!(self.cur.as_ref().map_or(true, |c| &t >= c));
        self.seq += 1;
        self.heap.push(Reverse((t, self.seq, ev)));
    }

    /// Time at which `lower` stops being below `upper`, if ever.
    fn crossing(&self, lower: usize, upper: usize) -> Option<Rat> {
        let (l, u) = (&self.lines[lower], &self.lines[upper]);
        if l.m > u.m {
            l.meet_x(u)
        } else {
            None
        }
    }

    fn recompute(&mut self, v: usize) {
        let w = match (self.win[2 * v], self.win[2 * v + 1]) {
            (Some(a), Some(b)) => {
                let (w, o) = if self.cmp(a, b) == Ordering::Less { (a, b) } else { (b, a) };
                self.node_ver[v] += 1;
                if let Some(t) = self.crossing(w, o) {
                    self.push(t, Ev::Node(v, self.node_ver[v]));
                }
                Some(w)
            }
            (a, None) => a,
            (None, b) => b,
        };
        self.win[v] = w;
    }

    /// Recomputes from `v` upward, stopping once a winner is unchanged.
    fn climb(&mut self, mut v: usize) {
        while v >= 1 {
            let before = self.win[v];
            self.recompute(v);
            if before == self.win[v] && v != 1 {
                // ancestors only see this node's winner
                return;
            }
            v /= 2;
        }
        self.reschedule_boundary();
    }

    fn set_leaf(&mut self, line: usize, on: bool) {
        self.win[self.size + line] = on.then_some(line);
        self.climb((self.size + line) / 2);
    }

    fn reschedule_pair(&mut self, j: usize) {
        if j + 1 >= self.block.len() {
            return;
        }
        self.pair_ver[j] += 1;
        if let Some(t) = self.crossing(self.block[j], self.block[j + 1]) {
            self.push(t, Ev::Pair(j, self.pair_ver[j]));
        }
    }

    fn reschedule_boundary(&mut self) {
        self.bound_ver += 1;
        if !self.full {
            return;
        }
        if let Some(w) = self.win[1] {
            let a = *self.block.last().unwrap();
            if let Some(t) = self.crossing(a, w) {
                self.push(t, Ev::Boundary(self.bound_ver));
            }
        }
    }

    fn close_edge(&mut self, line: usize, t: &Rat, level: usize) {
        if !self.record {
            return;
        }
        let lo = std::mem::replace(&mut self.edge_start[line], XB::Fin(t.clone()));
        let hi = XB::Fin(t.clone());
        if lo != hi {
            self.out.edges.push(LevelEdge { line, lo, hi, level });
        }
    }

    fn vertex(&mut self, t: &Rat, a: usize, b: usize, level: usize) {
        if self.record {
            let mut ls = vec![a, b];
            ls.sort_unstable();
            self.out.vertices.push(LevelVertex { point: PointR2::new(t.clone(), self.lines[a].eval(t)), lines: ls, level });
        }
    }

    fn swap_pair(&mut self, j: usize, t: &Rat) {
        let (a, b) = (self.block[j], self.block[j + 1]);
        self.vertex(t, a, b, j);
        self.close_edge(a, t, j);
        self.close_edge(b, t, j + 1);
        self.block.swap(j, j + 1);
        self.chain_of_pos.swap(j, j + 1);
        if j > 0 {
            self.reschedule_pair(j - 1);
        }
        self.reschedule_pair(j);
        self.reschedule_pair(j + 1);
        if j + 2 == self.block.len() {
            self.reschedule_boundary();
        }
    }

    fn swap_boundary(&mut self, t: &Rat) {
        let p = self.block.len() - 1;
        let (a, w) = (self.block[p], self.win[1].expect("boundary event needs a challenger"));
        self.vertex(t, a, w, p);
        self.close_edge(a, t, p);
        if self.record {
            self.edge_start[w] = XB::Fin(t.clone());
        }
        let c = self.chain_of_pos[p];
        let start = std::mem::replace(&mut self.chain_start[c], XB::Fin(t.clone()));
        if start != XB::Fin(t.clone()) {
            self.chain_pieces[c].push(Piece { line_id: a, line: self.lines[a].clone(), lo: start, hi: XB::Fin(t.clone()) });
        }
        self.chain_line[c] = w;
        self.block[p] = w;
        if p > 0 {
            self.reschedule_pair(p - 1);
        }
        self.win[self.size + w] = None;
        self.climb((self.size + w) / 2);
        self.set_leaf(a, true);
    }

    fn answer(&self, q: &PointR2) -> usize {
        self.block.partition_point(|&l| self.lines[l].eval(&q.x) < q.y)
    }
}

/// Sweeps the lower `≤k`-level of `lines` from left to right.
///
/// With `record` set, level vertices and edges are collected. Query points are
/// answered in passing with the number of lines strictly below them, capped at
/// `k+1`.
pub fn sweep_lower(lines: &[LineR2], k: usize, queries: &[PointR2], record: bool) -> SweepOutput {
    let n = lines.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut sw = Sweep {
        lines,
        cur: None,
        block: Vec::new(),
        full: false,
        chain_of_pos: Vec::new(),
        chain_line: Vec::new(),
        chain_start: Vec::new(),
        chain_pieces: Vec::new(),
        edge_start: vec![XB::NegInf; n],
        size: n.max(1).next_power_of_two(),
        win: Vec::new(),
        node_ver: Vec::new(),
        pair_ver: Vec::new(),
        bound_ver: 0,
        heap: BinaryHeap::new(),
        seq: 0,
        record,
        out: SweepOutput::default(),
    };
    order.sort_by(|&i, &j| sw.cmp(i, j));
    let b = n.min(k + 1);
    sw.block = order[..b].to_vec();
    sw.full = n > b;
    sw.chain_of_pos = (0..b).collect();
    sw.chain_line = sw.block.clone();
    sw.chain_start = vec![XB::NegInf; b];
    sw.chain_pieces = vec![Vec::new(); b];
    sw.pair_ver = vec![0; b];
    sw.win = vec![None; 2 * sw.size];
    sw.node_ver = vec![0; sw.size];
    for &l in &order[b..] {
        sw.win[sw.size + l] = Some(l);
    }
    for v in (1..sw.size).rev() {
        sw.recompute(v);
    }
    for j in 0..b.saturating_sub(1) {
        sw.reschedule_pair(j);
    }
    sw.reschedule_boundary();

    let mut qorder: Vec<usize> = (0..queries.len()).collect();
    qorder.sort_by(|&a, &b| queries[a].x.cmp(&queries[b].x));
    let mut counts = vec![0usize; queries.len()];
    let mut qi = 0;

    while let Some(Reverse((t, _, ev))) = sw.heap.pop() {
        let live = match ev {
            Ev::Node(v, ver) => sw.node_ver[v] == ver,
            Ev::Pair(j, ver) => sw.pair_ver[j] == ver,
            Ev::Boundary(ver) => sw.bound_ver == ver,
        };
        if !live {
            continue;
        }
        while qi < qorder.len() && queries[qorder[qi]].x < t {
            counts[qorder[qi]] = sw.answer(&queries[qorder[qi]]);
            qi += 1;
        }
        sw.cur = Some(t.clone());
        sw.out.events += 1;
        match ev {
            Ev::Node(v, _) => sw.climb(v),
            Ev::Pair(j, _) => sw.swap_pair(j, &t),
            Ev::Boundary(_) => sw.swap_boundary(&t),
        }
    }
    while qi < qorder.len() {
        counts[qorder[qi]] = sw.answer(&queries[qorder[qi]]);
        qi += 1;
    }

    for c in 0..b {
        let l = sw.chain_line[c];
        let lo = std::mem::replace(&mut sw.chain_start[c], XB::PosInf);
        sw.chain_pieces[c].push(Piece { line_id: l, line: lines[l].clone(), lo, hi: XB::PosInf });
    }
    if record {
        for (p, &l) in sw.block.clone().iter().enumerate() {
            let lo = sw.edge_start[l].clone();
            sw.out.edges.push(LevelEdge { line: l, lo, hi: XB::PosInf, level: p });
        }
    }
    let mut out = std::mem::take(&mut sw.out);
    out.chains = std::mem::take(&mut sw.chain_pieces)
        .into_iter()
        .map(|pieces| Chain { kind: ChainKind::Concave, pieces })
        .collect();
    out.counts = counts;
    out
}

/// Lines strictly below each query point, saturated at `k+1`.
pub fn count_saturated(lines: &[LineR2], k: usize, queries: &[PointR2]) -> Vec<usize> {
    sweep_lower(lines, k, queries, false).counts
}
