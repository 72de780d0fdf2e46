//! Semi-online leftmost valid point under insertions and scheduled deletions.
//!
//! Lines live in layers `0..=z` or in a leftover list. Every `2^x` updates an
//! expensive update rebuilds layers `0..=i'` (where `2^i'` is the largest power
//! of two dividing the local update counter) and recomputes all chain
//! intersections; other updates only touch the leftover list. A line goes to
//! layer `i` when its remaining lifetime `d` satisfies `2^i ≤ d < 2^(i+1)`
//! (capped at `i'`), or to the leftover list when `d < 2^x`.
//!
//! Each layer contributes the chains of its lower (red) or upper (blue)
//! `≤K`-level; each leftover line is a chain by itself. Counts of chains across
//! a point saturate per layer at `K+1`, so counts up to `K` are exact.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;

use super::ply::PlyStructure;
use super::ptree::{ForestStats, KdPartitioner, Partitioner, PtForest, Side};
use super::solve::{far_key, static_min_violations};
use super::{ConstraintSet, LPResult, UnboundedReason};
use crate::geom::{Color, LineR2, PointR2};
use crate::levels::{chain_decomposition, ge_interval, Chain, ChainKind, Direction, XB};
use crate::rat::Rat;
use crate::treap::{Dir, Treap};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DynOp {
    Insert { color: Color, line: LineR2, delete_at: Option<u64> },
    Delete { id: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynMode {
    /// Answers queries for every budget up to this one.
    Fixed(usize),
    /// Tracks the minimum achievable violation count.
    Kmin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Layer(usize),
    Leftover,
}

#[derive(Clone, Debug)]
struct LineRec {
    color: Color,
    line: LineR2,
    delete_at: Option<u64>,
    slot: Slot,
}

#[derive(Clone, Debug, Default)]
struct Layer {
    red: Vec<usize>,
    blue: Vec<usize>,
    built_at: u64,
    /// Chain decompositions per level, computed on demand.
    cache: HashMap<usize, (Vec<Chain>, Vec<Chain>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Owner {
    Layer(usize),
    Line(usize),
}

#[derive(Clone, Debug)]
struct ChainRec {
    color: Color,
    chain: Chain,
    owner: Owner,
    ply: PlyStructure,
    /// Forest handles of intersections on this chain; may hold stale entries.
    points: Vec<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DynStats {
    pub cheap_updates: u64,
    pub expensive_updates: u64,
    pub full_rebuilds: u64,
    pub max_leftover: usize,
    pub max_intersections: usize,
    pub forest: ForestStats,
}

#[derive(Clone, Debug)]
pub struct DynState {
    mode: DynMode,
    level: usize,
    x: u32,
    z: u32,
    u: u64,
    u_local: u64,
    next_id: usize,
    lines: BTreeMap<usize, LineRec>,
    layers: Vec<Layer>,
    chains: BTreeMap<usize, ChainRec>,
    next_chain: usize,
    leftover_chain: HashMap<usize, usize>,
    pairs: HashMap<(usize, usize), Option<(XB, XB)>>,
    ipts: HashMap<u64, (usize, usize)>,
    forest: PtForest,
    far: Treap<(Rat, Rat)>,
    stats: DynStats,
}

fn ceil_log2(n: usize) -> u32 {
    usize::BITS - n.max(1).saturating_sub(1).leading_zeros()
}

fn floor_log2(d: u64) -> u32 {
    63 - d.max(1).leading_zeros()
}

impl DynState {
    /// Builds over `cs`; `schedule` maps constraint ids to deletion update
    /// indices (updates are numbered from 1), absent ids are never deleted.
    pub fn build(cs: &ConstraintSet, schedule: &HashMap<usize, u64>, mode: DynMode) -> Result<DynState, Error> {
        Self::build_with(cs, schedule, mode, Arc::new(KdPartitioner))
    }

    pub fn build_with(cs: &ConstraintSet, schedule: &HashMap<usize, u64>, mode: DynMode, part: Arc<dyn Partitioner>) -> Result<DynState, Error> {
        let mut st = DynState {
            mode,
            level: 0,
            x: 0,
            z: 1,
            u: 0,
            u_local: 0,
            next_id: 0,
            lines: BTreeMap::new(),
            layers: Vec::new(),
            chains: BTreeMap::new(),
            next_chain: 0,
            leftover_chain: HashMap::new(),
            pairs: HashMap::new(),
            ipts: HashMap::new(),
            forest: PtForest::new(part),
            far: Treap::new(),
            stats: DynStats::default(),
        };
        for (color, set) in [(Color::Red, &cs.red), (Color::Blue, &cs.blue)] {
            for (id, line) in set {
                if st.lines.contains_key(id) {
                    return Err(Error::DuplicateId(*id));
                }
                let delete_at = schedule.get(id).copied();
                if delete_at == Some(0) {
                    return Err(Error::ScheduleViolation(format!("line {id} scheduled for deletion at update 0")));
                }
                st.far.add(far_key(line), (color == Color::Red) as isize, (color == Color::Blue) as isize);
                st.lines.insert(*id, LineRec { color, line: line.clone(), delete_at, slot: Slot::Leftover });
                st.next_id = st.next_id.max(id + 1);
            }
        }
        st.full_rebuild();
        Ok(st)
    }

    pub fn live_set(&self) -> ConstraintSet {
        let mut cs = ConstraintSet { red: Vec::new(), blue: Vec::new() };
        for (id, r) in &self.lines {
            match r.color {
                Color::Red => cs.red.push((*id, r.line.clone())),
                Color::Blue => cs.blue.push((*id, r.line.clone())),
            }
        }
        cs
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Updates applied so far.
    pub fn updates(&self) -> u64 {
        self.u
    }

    /// Decomposition level currently backing the counts.
    pub fn level(&self) -> usize {
        self.level
    }

    /// Expensive-update period `2^x`.
    pub fn cadence(&self) -> u64 {
        1 << self.x
    }

    pub fn intersections(&self) -> usize {
        self.forest.len()
    }

    pub fn stats(&self) -> DynStats {
        DynStats { forest: self.forest.stats, ..self.stats }
    }

    /// Current chains of one color: layer decompositions plus one chain per leftover line.
    /// Together they cover every edge of the live `≤level` level of that color.
    pub fn chains(&self, color: Color) -> Vec<Chain> {
        self.chains.values().filter(|c| c.color == color).map(|c| c.chain.clone()).collect()
    }

    fn has_both_colors(&self) -> bool {
        let (r, b) = self.far.total();
        r > 0 && b > 0
    }

    /// Leftmost point violating at most `k` live constraints.
    pub fn query(&self, k: usize) -> Result<LPResult, Error> {
        if k > self.level {
            return Err(Error::Internal(format!("query budget {k} exceeds maintained level {}", self.level)));
        }
        if !self.has_both_colors() {
            return Ok(LPResult::Unbounded(UnboundedReason::EmptySide));
        }
        if self.far.min_mis(Dir::AB) <= k {
            return Ok(LPResult::Unbounded(UnboundedReason::LeftRay));
        }
        Ok(match self.forest.query(k as i64) {
            Some((point, c)) => LPResult::Feasible { point, violations: c as usize },
            None => LPResult::Infeasible,
        })
    }

    fn current_kmin(&self) -> Result<usize, Error> {
        let far = self.far.min_mis(Dir::AB);
        let best = self.forest.global_min().map_or(far, |m| (m as usize).min(far));
        if best > self.level {
            return Err(Error::Internal(format!("minimum {best} above maintained level {}", self.level)));
        }
        Ok(best)
    }

    /// Minimum violation count and the leftmost point attaining it.
    pub fn query_kmin(&self) -> Result<(usize, LPResult), Error> {
        if !self.has_both_colors() {
            return Ok((0, LPResult::Unbounded(UnboundedReason::EmptySide)));
        }
        let k = self.current_kmin()?;
        Ok((k, self.query(k)?))
    }

    /// Applies one update. Returns the id assigned to an inserted line.
    pub fn update(&mut self, op: DynOp) -> Result<Option<usize>, Error> {
        let t = self.u + 1;
        match &op {
            DynOp::Delete { id } => {
                let rec = self.lines.get(id).ok_or(Error::UnknownId(*id))?;
                match rec.delete_at {
                    None => return Err(Error::ScheduleViolation(format!("line {id} was scheduled never to be deleted"))),
                    Some(d) if t < d => {
                        return Err(Error::ScheduleViolation(format!("line {id} deleted at update {t}, promised {d}")))
                    }
                    _ => {}
                }
            }
            DynOp::Insert { delete_at: Some(d), .. } if *d <= t => {
                return Err(Error::ScheduleViolation(format!("insertion at update {t} scheduled for deletion at {d}")));
            }
            DynOp::Insert { .. } => {}
        }

        if self.u_local >= 1 << self.z {
            self.full_rebuild();
        } else if self.u_local > 0 && self.u_local % (1 << self.x) == 0 {
            let top = self.u_local.trailing_zeros();
            self.expensive(top as usize)?;
        }

        let out = match op {
            DynOp::Insert { color, line, delete_at } => {
                let id = self.next_id;
                self.next_id += 1;
                self.insert_leftover(id, color, line, delete_at);
                Some(id)
            }
            DynOp::Delete { id } => {
                if self.lines[&id].slot != Slot::Leftover {
                    // only reachable if layer bookkeeping went wrong; recover
                    self.full_rebuild();
                }
                self.delete_leftover(id);
                None
            }
        };
        self.stats.cheap_updates += 1;
        self.u += 1;
        self.u_local += 1;
        let left = self.leftover_chain.len();
        self.stats.max_leftover = self.stats.max_leftover.max(left);
        self.stats.max_intersections = self.stats.max_intersections.max(self.forest.len());
        Ok(out)
    }

    fn choose_params(&mut self) {
        let n = self.lines.len();
        let lg = ceil_log2(n.max(2)) as usize;
        match self.mode {
            DynMode::Fixed(k) => {
                self.level = k;
                self.x = ceil_log2((k * lg).max(1));
            }
            DynMode::Kmin => {
                let kmin = static_min_violations(&self.live_set()).0;
                self.x = ceil_log2(kmin.max(1));
                self.level = Self::kmin_level(kmin, self.x);
            }
        }
        self.z = (lg as u32 + 1).max(self.x);
    }

    /// Smallest power of two covering `kmin` plus one full expensive period.
    fn kmin_level(kmin: usize, x: u32) -> usize {
        (kmin + (1usize << x)).next_power_of_two().max(2)
    }

    fn full_rebuild(&mut self) {
        self.choose_params();
        self.layers = vec![Layer::default(); self.z as usize + 1];
        for r in self.lines.values_mut() {
            r.slot = Slot::Leftover;
        }
        self.u_local = 0;
        self.stats.full_rebuilds += 1;
        self.reassign(self.z as usize);
    }

    fn expensive(&mut self, top: usize) -> Result<(), Error> {
        if self.mode == DynMode::Kmin {
            let kmin = self.current_kmin()?;
            self.level = Self::kmin_level(kmin, self.x);
        }
        self.stats.expensive_updates += 1;
        self.reassign(top);
        Ok(())
    }

    /// Redistributes leftover lines and lines of layers `0..=top`, then
    /// recomputes every intersection.
    fn reassign(&mut self, top: usize) {
        let t = self.u + 1;
        let top = top.min(self.layers.len() - 1);
        for l in &mut self.layers[..=top] {
            *l = Layer { built_at: t, ..Layer::default() };
        }
        for (id, r) in self.lines.iter_mut() {
            if matches!(r.slot, Slot::Layer(i) if i > top) {
                continue;
            }
            let d = r.delete_at.map_or(u64::MAX, |dd| dd.saturating_sub(t));
            r.slot = if d < 1 << self.x {
                Slot::Leftover
            } else {
                Slot::Layer((floor_log2(d) as usize).min(top))
            };
            if let Slot::Layer(i) = r.slot {
                match r.color {
                    Color::Red => self.layers[i].red.push(*id),
                    Color::Blue => self.layers[i].blue.push(*id),
                }
            }
        }
        self.recompute_all();
    }

    fn layer_chains(&mut self, i: usize) -> (Vec<Chain>, Vec<Chain>) {
        let level = self.level;
        if let Some(c) = self.layers[i].cache.get(&level) {
            return c.clone();
        }
        let lines_of = |ids: &[usize]| ids.iter().map(|id| self.lines[id].line.clone()).collect::<Vec<_>>();
        let (rl, bl) = (lines_of(&self.layers[i].red), lines_of(&self.layers[i].blue));
        let red = if rl.is_empty() { Vec::new() } else { chain_decomposition(&rl, level, Direction::Lower).expect("nonempty").chains };
        let blue = if bl.is_empty() { Vec::new() } else { chain_decomposition(&bl, level, Direction::Upper).expect("nonempty").chains };
        self.layers[i].cache.insert(level, (red.clone(), blue.clone()));
        (red, blue)
    }

    fn add_chain(&mut self, color: Color, chain: Chain, owner: Owner) -> usize {
        let id = self.next_chain;
        self.next_chain += 1;
        self.chains.insert(id, ChainRec { color, chain, owner, ply: PlyStructure::new(), points: Vec::new() });
        id
    }

    fn recompute_all(&mut self) {
        self.chains.clear();
        self.pairs.clear();
        self.ipts.clear();
        self.leftover_chain.clear();
        for i in 0..self.layers.len() {
            let (red, blue) = self.layer_chains(i);
            for c in red {
                self.add_chain(Color::Red, c, Owner::Layer(i));
            }
            for c in blue {
                self.add_chain(Color::Blue, c, Owner::Layer(i));
            }
        }
        let left: Vec<(usize, Color, LineR2)> =
            self.lines.iter().filter(|(_, r)| r.slot == Slot::Leftover).map(|(id, r)| (*id, r.color, r.line.clone())).collect();
        for (id, color, line) in left {
            let kind = if color == Color::Red { ChainKind::Concave } else { ChainKind::Convex };
            let cid = self.add_chain(color, Chain::from_line(id, line, kind), Owner::Line(id));
            self.leftover_chain.insert(id, cid);
        }

        let reds: Vec<usize> = self.chains.iter().filter(|(_, c)| c.color == Color::Red).map(|(i, _)| *i).collect();
        let blues: Vec<usize> = self.chains.iter().filter(|(_, c)| c.color == Color::Blue).map(|(i, _)| *i).collect();
        let mut raw = Vec::new();
        for &r in &reds {
            for &b in &blues {
                raw.extend(self.pair(r, b));
            }
        }
        let items: Vec<(PointR2, i64)> = raw.iter().map(|(p, r, b)| (p.clone(), self.count_at(*r, *b, &p.x))).collect();
        let handles = self.forest.rebuild(items);
        for (h, (_, r, b)) in handles.into_iter().zip(raw) {
            self.register_point(h, r, b);
        }
    }

    fn register_point(&mut self, h: u64, r: usize, b: usize) {
        self.ipts.insert(h, (r, b));
        self.chains.get_mut(&r).expect("red chain").points.push(h);
        self.chains.get_mut(&b).expect("blue chain").points.push(h);
    }

    /// Interval of one red/blue chain pair, recorded in both ply lists.
    /// Returns the intersection points it contributes.
    fn pair(&mut self, r: usize, b: usize) -> Vec<(PointR2, usize, usize)> {
        let zero = Rat::zero();
        let iv = ge_interval(&self.chains[&r].chain, &zero, &self.chains[&b].chain, &zero);
        self.chains.get_mut(&r).expect("red chain").ply.add(&iv);
        self.chains.get_mut(&b).expect("blue chain").ply.add(&iv);
        let mut xs: Vec<Rat> = Vec::new();
        if let Some((lo, hi)) = &iv {
            xs.extend(lo.fin().cloned());
            if hi != lo {
                xs.extend(hi.fin().cloned());
            }
        }
        self.pairs.insert((r, b), iv);
        xs.into_iter()
            .map(|x| {
                let y = self.chains[&r].chain.eval(&x).expect("chains span the line");
                (PointR2::new(x, y), r, b)
            })
            .collect()
    }

    fn count_at(&self, r: usize, b: usize, x: &Rat) -> i64 {
        (self.chains[&r].ply.ply(x) + self.chains[&b].ply.ply(x)) as i64
    }

    fn insert_leftover(&mut self, id: usize, color: Color, line: LineR2, delete_at: Option<u64>) {
        let (da, db) = if color == Color::Red { (1, 0) } else { (0, 1) };
        self.far.add(far_key(&line), da, db);
        self.lines.insert(id, LineRec { color, line: line.clone(), delete_at, slot: Slot::Leftover });
        // a new red line lies strictly below the points above it, a blue one above those below
        let side = if color == Color::Red { Side::Above } else { Side::Below };
        self.forest.halfplane_update(&line, side, 1);
        let kind = if color == Color::Red { ChainKind::Concave } else { ChainKind::Convex };
        let cid = self.add_chain(color, Chain::from_line(id, line, kind), Owner::Line(id));
        self.leftover_chain.insert(id, cid);
        let others: Vec<usize> = self.chains.iter().filter(|(_, c)| c.color != color).map(|(i, _)| *i).collect();
        let mut raw = Vec::new();
        for o in others {
            let (r, b) = if color == Color::Red { (cid, o) } else { (o, cid) };
            raw.extend(self.pair(r, b));
        }
        for (p, r, b) in raw {
            let c = self.count_at(r, b, &p.x);
            let h = self.forest.insert(p, c);
            self.register_point(h, r, b);
        }
    }

    fn delete_leftover(&mut self, id: usize) {
        let rec = self.lines.remove(&id).expect("validated id");
        let (da, db) = if rec.color == Color::Red { (-1, 0) } else { (0, -1) };
        self.far.add(far_key(&rec.line), da, db);
        let side = if rec.color == Color::Red { Side::Above } else { Side::Below };
        self.forest.halfplane_update(&rec.line, side, -1);
        let cid = self.leftover_chain.remove(&id).expect("leftover chain");
        let ch = self.chains.remove(&cid).expect("chain record");
        for h in ch.points {
            if self.ipts.remove(&h).is_some() {
                self.forest.delete(h);
            }
        }
        let others: Vec<usize> = self.chains.iter().filter(|(_, c)| c.color != rec.color).map(|(i, _)| *i).collect();
        for o in others {
            let key = if rec.color == Color::Red { (cid, o) } else { (o, cid) };
            let iv = self.pairs.remove(&key).expect("pair interval");
            let oc = self.chains.get_mut(&o).expect("opposing chain");
            oc.ply.remove(&iv);
            oc.points.retain(|h| self.ipts.contains_key(h));
        }
        // m ≫ n: the forest holds far more points than a fresh rebuild would
        if self.forest.stored() > 2 * self.forest.len().max(self.lines.len()).max(16) {
            self.rebuild_forest();
        }
    }

    fn rebuild_forest(&mut self) {
        let entries: Vec<(u64, usize, usize)> = self.ipts.iter().map(|(h, (r, b))| (*h, *r, *b)).collect();
        let items: Vec<(PointR2, i64)> =
            entries.iter().map(|(h, _, _)| (self.forest.point(*h).expect("live").clone(), self.forest.count(*h).expect("live"))).collect();
        let handles = self.forest.rebuild(items);
        self.ipts.clear();
        for c in self.chains.values_mut() {
            c.points.clear();
        }
        for (h, (_, r, b)) in handles.into_iter().zip(entries) {
            self.register_point(h, r, b);
        }
    }

    /// Checks layer conditions, ply lists, stored counts and the tree buffers.
    pub fn audit(&self) -> Result<(), String> {
        self.forest.audit()?;
        let full_at = self.u - self.u_local + (1u64 << self.z) + 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let size = layer.red.len() + layer.blue.len();
            if size > 2 << i {
                return Err(format!("layer {i} holds {size} lines"));
            }
            let expires = (layer.built_at + (1u64 << i)).min(full_at);
            for id in layer.red.iter().chain(&layer.blue) {
                let r = self.lines.get(id).ok_or_else(|| format!("layer {i} holds dead line {id}"))?;
                if r.slot != Slot::Layer(i) {
                    return Err(format!("line {id} slot mismatch"));
                }
                if let Some(d) = r.delete_at {
                    if d < expires {
                        return Err(format!("line {id} in layer {i} is due at {d}, before its layer is rebuilt at {expires}"));
                    }
                }
            }
            if size > 0 && i < self.x as usize {
                return Err(format!("layer {i} below the cadence is populated"));
            }
        }
        let left = self.lines.values().filter(|r| r.slot == Slot::Leftover).count();
        if left != self.leftover_chain.len() {
            return Err("leftover chains out of sync".into());
        }
        if left > 2 << self.x {
            return Err(format!("leftover list holds {left} lines"));
        }
        for (id, c) in &self.chains {
            let opp = self.chains.values().filter(|o| o.color != c.color).count();
            if c.ply.opposing() != opp || !c.ply.is_consistent() {
                return Err(format!("chain {id}: ply lists cover {} of {opp} opposing chains", c.ply.opposing()));
            }
            if let Owner::Line(l) = c.owner {
                if !self.lines.contains_key(&l) {
                    return Err(format!("chain {id} owned by dead line {l}"));
                }
            }
        }
        for (h, (r, b)) in &self.ipts {
            let p = self.forest.point(*h).ok_or("dangling handle")?;
            let below = self.chains.values().filter(|c| c.color == Color::Red && c.chain.eval(&p.x).is_some_and(|v| v < p.y)).count();
            let above = self.chains.values().filter(|c| c.color == Color::Blue && c.chain.eval(&p.x).is_some_and(|v| v > p.y)).count();
            let stored = self.forest.count(*h).ok_or("dangling handle")?;
            if stored != (below + above) as i64 {
                return Err(format!("point {h} of chains {r}/{b}: stored {stored}, direct {}", below + above));
            }
        }
        Ok(())
    }
}

pub fn dyn_build(cs: &ConstraintSet, schedule: &HashMap<usize, u64>, k: usize) -> Result<DynState, Error> {
    DynState::build(cs, schedule, DynMode::Fixed(k))
}

pub fn dyn_update(st: &mut DynState, op: DynOp) -> Result<Option<usize>, Error> {
    st.update(op)
}

pub fn dyn_query(st: &DynState, k: usize) -> Result<LPResult, Error> {
    st.query(k)
}

pub fn dyn_query_kmin(st: &DynState) -> Result<(usize, LPResult), Error> {
    st.query_kmin()
}
