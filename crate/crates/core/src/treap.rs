//! Augmented treap over ordered keys, each carrying two class counts `a` and `b`.
//!
//! Every subtree keeps, for both class orders, the minimum over separator
//! positions of "class-1 items strictly before + class-2 items strictly after".
//! Positions are gaps between keys or a key itself (items on the separator count
//! for neither side). The 1D separator structure and the far-left level of the
//! dynamic LP are both instances of this.

const NIL: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    /// Minimize `a` before plus `b` after.
    AB,
    /// Minimize `b` before plus `a` after.
    BA,
}

#[derive(Clone, Debug)]
struct Node<K> {
    key: K,
    a: usize,
    b: usize,
    prio: u64,
    left: usize,
    right: usize,
    size: usize,
    sum_a: usize,
    sum_b: usize,
    // min over all positions (gaps and keys) inside the subtree
    gap_ab: usize,
    gap_ba: usize,
    // min over key positions only
    on_ab: usize,
    on_ba: usize,
    min_a: Option<K>,
    max_a: Option<K>,
    min_b: Option<K>,
    max_b: Option<K>,
}

#[derive(Clone, Debug)]
pub struct Treap<K> {
    nodes: Vec<Node<K>>,
    free: Vec<usize>,
    root: usize,
    rng: u64,
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl<K: Ord + Clone> Default for Treap<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone> Treap<K> {
    pub fn new() -> Self {
        Treap { nodes: Vec::new(), free: Vec::new(), root: NIL, rng: 0x5eed }
    }

    pub fn len(&self) -> usize {
        self.size(self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    pub fn total(&self) -> (usize, usize) {
        if self.root == NIL {
            (0, 0)
        } else {
            (self.nodes[self.root].sum_a, self.nodes[self.root].sum_b)
        }
    }

    /// Minimum over all separator positions for the given class order.
    pub fn min_mis(&self, dir: Dir) -> usize {
        if self.root == NIL {
            return 0;
        }
        let n = &self.nodes[self.root];
        match dir {
            Dir::AB => n.gap_ab,
            Dir::BA => n.gap_ba,
        }
    }

    pub fn min_key_a(&self) -> Option<&K> {
        self.get(self.root).and_then(|n| n.min_a.as_ref())
    }
    pub fn max_key_a(&self) -> Option<&K> {
        self.get(self.root).and_then(|n| n.max_a.as_ref())
    }
    pub fn min_key_b(&self) -> Option<&K> {
        self.get(self.root).and_then(|n| n.min_b.as_ref())
    }
    pub fn max_key_b(&self) -> Option<&K> {
        self.get(self.root).and_then(|n| n.max_b.as_ref())
    }

    pub fn height(&self) -> usize {
        fn h<K>(t: &[Node<K>], u: usize) -> usize {
            if u == NIL {
                0
            } else {
                1 + h(t, t[u].left).max(h(t, t[u].right))
            }
        }
        h(&self.nodes, self.root)
    }

    /// Adds `(da, db)` to the counts at `key`, creating or removing the node as needed.
    pub fn add(&mut self, key: K, da: isize, db: isize) {
        let (l, r) = self.split_lt(self.root, &key);
        let (mid, r) = self.split_le(r, &key);
        let mid = if mid == NIL {
            assert!(da >= 0 && db >= 0, "removing from an absent key");
            if da == 0 && db == 0 {
                NIL
            } else {
                self.alloc(key, da as usize, db as usize)
            }
        } else {
            let n = &mut self.nodes[mid];
            n.a = (n.a as isize + da).try_into().expect("negative count");
            n.b = (n.b as isize + db).try_into().expect("negative count");
            if n.a == 0 && n.b == 0 {
                self.free.push(mid);
                NIL
            } else {
                self.pull(mid);
                mid
            }
        };
        let lm = self.merge(l, mid);
        self.root = self.merge(lm, r);
    }

    pub fn counts_at(&self, key: &K) -> (usize, usize) {
        let mut u = self.root;
        while u != NIL {
            let n = &self.nodes[u];
            match key.cmp(&n.key) {
                std::cmp::Ordering::Less => u = n.left,
                std::cmp::Ordering::Greater => u = n.right,
                std::cmp::Ordering::Equal => return (n.a, n.b),
            }
        }
        (0, 0)
    }

    /// Class totals over keys strictly below `key`.
    pub fn before(&self, key: &K) -> (usize, usize) {
        let (mut sa, mut sb) = (0, 0);
        let mut u = self.root;
        while u != NIL {
            let n = &self.nodes[u];
            if n.key < *key {
                let (la, lb) = self.sums(n.left);
                sa += la + n.a;
                sb += lb + n.b;
                u = n.right;
            } else {
                u = n.left;
            }
        }
        (sa, sb)
    }

    /// Class totals over keys strictly above `key`.
    pub fn after(&self, key: &K) -> (usize, usize) {
        let (ta, tb) = self.total();
        let (ba, bb) = self.before(key);
        let (ca, cb) = self.counts_at(key);
        (ta - ba - ca, tb - bb - cb)
    }

    /// Misclassification count of a separator located at `key` (on it if present).
    pub fn mis_at(&self, key: &K, dir: Dir) -> usize {
        let (ba, bb) = self.before(key);
        let (aa, ab) = self.after(key);
        match dir {
            Dir::AB => ba + ab,
            Dir::BA => bb + aa,
        }
    }

    /// Largest key `< bound` whose on-key count is at most `k`.
    pub fn rightmost_valid_below(&self, bound: &K, k: usize, dir: Dir) -> Option<K> {
        self.rightmost_below(self.root, 0, 0, bound, k, dir)
    }

    /// Smallest key `> bound` whose on-key count is at most `k`.
    pub fn leftmost_valid_above(&self, bound: &K, k: usize, dir: Dir) -> Option<K> {
        self.leftmost_above(self.root, 0, 0, bound, k, dir)
    }

    /// In-order `(key, a, b)` triples.
    pub fn items(&self) -> Vec<(K, usize, usize)> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut u = self.root;
        while u != NIL || !stack.is_empty() {
            while u != NIL {
                stack.push(u);
                u = self.nodes[u].left;
            }
            let v = stack.pop().unwrap();
            let n = &self.nodes[v];
            out.push((n.key.clone(), n.a, n.b));
            u = n.right;
        }
        out
    }

    /// Recomputes every annotation bottom-up and compares with the stored ones.
    pub fn audit(&self) -> bool {
        fn rec<K: Ord + Clone>(t: &Treap<K>, u: usize) -> Option<[usize; 8]> {
            if u == NIL {
                return Some([0, 0, 0, 0, 0, usize::MAX, usize::MAX, 0]);
            }
            let n = &t.nodes[u];
            let l = rec(t, n.left)?;
            let r = rec(t, n.right)?;
            if n.left != NIL && (t.nodes[n.left].key >= n.key || t.nodes[n.left].prio > n.prio) {
                return None;
            }
            if n.right != NIL && (t.nodes[n.right].key <= n.key || t.nodes[n.right].prio > n.prio) {
                return None;
            }
            let sa = l[0] + n.a + r[0];
            let sb = l[1] + n.b + r[1];
            let gab = (l[2] + n.b + r[1]).min(l[0] + r[1]).min(l[0] + n.a + r[2]);
            let gba = (l[3] + n.a + r[0]).min(l[1] + r[0]).min(l[1] + n.b + r[3]);
            let oab = l[5].saturating_add(n.b + r[1]).min(l[0] + r[1]).min((l[0] + n.a).saturating_add(r[5]));
            let oba = l[6].saturating_add(n.a + r[0]).min(l[1] + r[0]).min((l[1] + n.b).saturating_add(r[6]));
            let size = l[7] + 1 + r[7];
            let ok = n.sum_a == sa
                && n.sum_b == sb
                && n.gap_ab == gab
                && n.gap_ba == gba
                && n.on_ab == oab
                && n.on_ba == oba
                && n.size == size;
            ok.then_some([sa, sb, gab, gba, 0, oab, oba, size])
        }
        rec(self, self.root).is_some()
    }

    fn get(&self, u: usize) -> Option<&Node<K>> {
        (u != NIL).then(|| &self.nodes[u])
    }

    fn size(&self, u: usize) -> usize {
        if u == NIL {
            0
        } else {
            self.nodes[u].size
        }
    }

    fn sums(&self, u: usize) -> (usize, usize) {
        if u == NIL {
            (0, 0)
        } else {
            (self.nodes[u].sum_a, self.nodes[u].sum_b)
        }
    }

    fn on(&self, u: usize, dir: Dir) -> usize {
        if u == NIL {
            usize::MAX
        } else {
            match dir {
                Dir::AB => self.nodes[u].on_ab,
                Dir::BA => self.nodes[u].on_ba,
            }
        }
    }

    fn alloc(&mut self, key: K, a: usize, b: usize) -> usize {
        let prio = splitmix(&mut self.rng);
        let node = Node {
            key,
            a,
            b,
            prio,
            left: NIL,
            right: NIL,
            size: 1,
            sum_a: 0,
            sum_b: 0,
            gap_ab: 0,
            gap_ba: 0,
            on_ab: 0,
            on_ba: 0,
            min_a: None,
            max_a: None,
            min_b: None,
            max_b: None,
        };
        let id = if let Some(id) = self.free.pop() {
            self.nodes[id] = node;
            id
        } else {
            self.nodes.push(node);
            self.nodes.len() - 1
        };
        self.pull(id);
        id
    }

    fn pull(&mut self, u: usize) {
        let (l, r) = (self.nodes[u].left, self.nodes[u].right);
        let zero = (0usize, 0usize, 0usize, 0usize, usize::MAX, usize::MAX, 0usize);
        let pick = |t: &Self, v: usize| {
            if v == NIL {
                zero
            } else {
                let n = &t.nodes[v];
                (n.sum_a, n.sum_b, n.gap_ab, n.gap_ba, n.on_ab, n.on_ba, n.size)
            }
        };
        let (la, lb, lgab, lgba, loab, loba, ls) = pick(self, l);
        let (ra, rb, rgab, rgba, roab, roba, rs) = pick(self, r);
        let ext = |t: &Self, v: usize| {
            if v == NIL {
                (None, None, None, None)
            } else {
                let n = &t.nodes[v];
                (n.min_a.clone(), n.max_a.clone(), n.min_b.clone(), n.max_b.clone())
            }
        };
        let (lmina, _, lminb, _) = ext(self, l);
        let (_, rmaxa, _, rmaxb) = ext(self, r);
        let n = &self.nodes[u];
        let (a, b) = (n.a, n.b);
        let own = |c: usize| (c > 0).then(|| n.key.clone());
        let min_a = lmina.or_else(|| own(a)).or_else(|| self.get(r).and_then(|x| x.min_a.clone()));
        let max_a = rmaxa.or_else(|| own(a)).or_else(|| self.get(l).and_then(|x| x.max_a.clone()));
        let min_b = lminb.or_else(|| own(b)).or_else(|| self.get(r).and_then(|x| x.min_b.clone()));
        let max_b = rmaxb.or_else(|| own(b)).or_else(|| self.get(l).and_then(|x| x.max_b.clone()));
        let n = &mut self.nodes[u];
        n.size = ls + 1 + rs;
        n.sum_a = la + a + ra;
        n.sum_b = lb + b + rb;
        n.gap_ab = (lgab + b + rb).min(la + rb).min(la + a + rgab);
        n.gap_ba = (lgba + a + ra).min(lb + ra).min(lb + b + rgba);
        n.on_ab = loab.saturating_add(b + rb).min(la + rb).min((la + a).saturating_add(roab));
        n.on_ba = loba.saturating_add(a + ra).min(lb + ra).min((lb + b).saturating_add(roba));
        n.min_a = min_a;
        n.max_a = max_a;
        n.min_b = min_b;
        n.max_b = max_b;
    }

    /// Splits into (keys < key, keys >= key).
    fn split_lt(&mut self, u: usize, key: &K) -> (usize, usize) {
        if u == NIL {
            return (NIL, NIL);
        }
        if self.nodes[u].key < *key {
            let (l, r) = self.split_lt(self.nodes[u].right, key);
            self.nodes[u].right = l;
            self.pull(u);
            (u, r)
        } else {
            let (l, r) = self.split_lt(self.nodes[u].left, key);
            self.nodes[u].left = r;
            self.pull(u);
            (l, u)
        }
    }

    /// Splits into (keys <= key, keys > key).
    fn split_le(&mut self, u: usize, key: &K) -> (usize, usize) {
        if u == NIL {
            return (NIL, NIL);
        }
        if self.nodes[u].key <= *key {
            let (l, r) = self.split_le(self.nodes[u].right, key);
            self.nodes[u].right = l;
            self.pull(u);
            (u, r)
        } else {
            let (l, r) = self.split_le(self.nodes[u].left, key);
            self.nodes[u].left = r;
            self.pull(u);
            (l, u)
        }
    }

    fn merge(&mut self, l: usize, r: usize) -> usize {
        if l == NIL {
            return r;
        }
        if r == NIL {
            return l;
        }
        if self.nodes[l].prio > self.nodes[r].prio {
            let m = self.merge(self.nodes[l].right, r);
            self.nodes[l].right = m;
            self.pull(l);
            l
        } else {
            let m = self.merge(l, self.nodes[r].left);
            self.nodes[r].left = m;
            self.pull(r);
            r
        }
    }

    /// `off_before` / `off_after` hold the class counts contributed by keys
    /// outside the current subtree (first class before, second class after).
    fn rightmost_below(&self, u: usize, off_before: usize, off_after: usize, bound: &K, k: usize, dir: Dir) -> Option<K> {
        if u == NIL {
            return None;
        }
        let n = &self.nodes[u];
        let (first, second) = self.split_classes(n, dir);
        let (lf, _) = self.class_sums(n.left, dir);
        let (_, rs) = self.class_sums(n.right, dir);
        if n.key >= *bound {
            return self.rightmost_below(n.left, off_before, off_after + second + rs, bound, k, dir);
        }
        if let Some(g) = self.rightmost_below(n.right, off_before + lf + first, off_after, bound, k, dir) {
            return Some(g);
        }
        if off_before + lf + rs + off_after <= k {
            return Some(n.key.clone());
        }
        self.rightmost_full(n.left, off_before, off_after + second + rs, k, dir)
    }

    fn rightmost_full(&self, u: usize, off_before: usize, off_after: usize, k: usize, dir: Dir) -> Option<K> {
        if u == NIL || self.on(u, dir).saturating_add(off_before + off_after) > k {
            return None;
        }
        let n = &self.nodes[u];
        let (first, second) = self.split_classes(n, dir);
        let (lf, _) = self.class_sums(n.left, dir);
        let (_, rs) = self.class_sums(n.right, dir);
        if let Some(g) = self.rightmost_full(n.right, off_before + lf + first, off_after, k, dir) {
            return Some(g);
        }
        if off_before + lf + rs + off_after <= k {
            return Some(n.key.clone());
        }
        self.rightmost_full(n.left, off_before, off_after + second + rs, k, dir)
    }

    fn leftmost_above(&self, u: usize, off_before: usize, off_after: usize, bound: &K, k: usize, dir: Dir) -> Option<K> {
        if u == NIL {
            return None;
        }
        let n = &self.nodes[u];
        let (first, second) = self.split_classes(n, dir);
        let (lf, _) = self.class_sums(n.left, dir);
        let (_, rs) = self.class_sums(n.right, dir);
        if n.key <= *bound {
            return self.leftmost_above(n.right, off_before + lf + first, off_after, bound, k, dir);
        }
        if let Some(g) = self.leftmost_above(n.left, off_before, off_after + second + rs, bound, k, dir) {
            return Some(g);
        }
        if off_before + lf + rs + off_after <= k {
            return Some(n.key.clone());
        }
        self.leftmost_full(n.right, off_before + lf + first, off_after, k, dir)
    }

    fn leftmost_full(&self, u: usize, off_before: usize, off_after: usize, k: usize, dir: Dir) -> Option<K> {
        if u == NIL || self.on(u, dir).saturating_add(off_before + off_after) > k {
            return None;
        }
        let n = &self.nodes[u];
        let (first, second) = self.split_classes(n, dir);
        let (lf, _) = self.class_sums(n.left, dir);
        let (_, rs) = self.class_sums(n.right, dir);
        if let Some(g) = self.leftmost_full(n.left, off_before, off_after + second + rs, k, dir) {
            return Some(g);
        }
        if off_before + lf + rs + off_after <= k {
            return Some(n.key.clone());
        }
        self.leftmost_full(n.right, off_before + lf + first, off_after, k, dir)
    }

    /// (counted-before class, counted-after class) at a node.
    fn split_classes(&self, n: &Node<K>, dir: Dir) -> (usize, usize) {
        match dir {
            Dir::AB => (n.a, n.b),
            Dir::BA => (n.b, n.a),
        }
    }

    fn class_sums(&self, u: usize, dir: Dir) -> (usize, usize) {
        let (a, b) = self.sums(u);
        match dir {
            Dir::AB => (a, b),
            Dir::BA => (b, a),
        }
    }
}
