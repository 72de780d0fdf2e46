//! Slab decomposition of the red/blue dual arrangement, clipped to a box,
//! with faces glued across slab walls and labelled by misclassification count.

use num_traits::{One, Zero};

use crate::geom::{LineR2, PointR2};
use crate::rat::{int, Rat};
use crate::Error;

/// Trapezoid of one slab between two consecutive lines.
#[derive(Clone, Debug)]
pub struct OverlayCell {
    pub face: usize,
    pub x0: Rat,
    pub x1: Rat,
    /// Index into `red ++ blue`; `None` means the box bottom.
    pub below: Option<usize>,
    /// `None` means the box top.
    pub above: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct OverlayFace {
    pub id: usize,
    pub red_below: usize,
    pub blue_above: usize,
    pub mis: usize,
    pub valid: bool,
    /// Inside both the red lower and the blue upper `≤k`-level.
    pub in_levels: bool,
    pub unbounded: bool,
    pub sample: PointR2,
    pub cells: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Slab {
    x1: Rat,
    order: Vec<usize>,
    cell_of_gap: Vec<Option<usize>>,
}

#[derive(Clone, Debug)]
pub struct OverlayFaceMap {
    pub k: usize,
    pub red: Vec<LineR2>,
    pub blue: Vec<LineR2>,
    pub box_lo: PointR2,
    pub box_hi: PointR2,
    pub faces: Vec<OverlayFace>,
    pub cells: Vec<OverlayCell>,
    /// Face pairs sharing an edge, each listed once with the smaller id first.
    pub adjacency: Vec<(usize, usize)>,
    slabs: Vec<Slab>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let nx = self.0[x];
            self.0[x] = r;
            x = nx;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

impl OverlayFaceMap {
    fn line(&self, i: usize) -> &LineR2 {
        if i < self.red.len() {
            &self.red[i]
        } else {
            &self.blue[i - self.red.len()]
        }
    }

    fn lower_y(&self, c: &OverlayCell, x: &Rat) -> Rat {
        c.below.map_or_else(|| self.box_lo.y.clone(), |l| self.line(l).eval(x))
    }

    fn upper_y(&self, c: &OverlayCell, x: &Rat) -> Rat {
        c.above.map_or_else(|| self.box_hi.y.clone(), |l| self.line(l).eval(x))
    }

    /// Counterclockwise corners of a cell.
    pub fn cell_polygon(&self, c: &OverlayCell) -> Vec<PointR2> {
        vec![
            PointR2::new(c.x0.clone(), self.lower_y(c, &c.x0)),
            PointR2::new(c.x1.clone(), self.lower_y(c, &c.x1)),
            PointR2::new(c.x1.clone(), self.upper_y(c, &c.x1)),
            PointR2::new(c.x0.clone(), self.upper_y(c, &c.x0)),
        ]
    }

    pub fn valid_faces(&self) -> impl Iterator<Item = &OverlayFace> {
        self.faces.iter().filter(|f| f.valid)
    }

    /// Face whose interior contains `p`; `None` on a line or outside the box.
    pub fn face_at(&self, p: &PointR2) -> Option<usize> {
        if p.x < self.box_lo.x || p.x > self.box_hi.x || p.y <= self.box_lo.y || p.y >= self.box_hi.y {
            return None;
        }
        let si = self.slabs.partition_point(|s| s.x1 <= p.x).min(self.slabs.len() - 1);
        let slab = &self.slabs[si];
        let mut g = 0;
        for &l in &slab.order {
            let v = self.line(l).eval(&p.x);
            if v == p.y {
                return None;
            }
            if v < p.y {
                g += 1;
            }
        }
        slab.cell_of_gap[g].map(|c| self.cells[c].face)
    }
}

/// Overlay of the red and blue dual lines with each face labelled by
/// `#red strictly below + #blue strictly above`.
pub fn overlay_and_label(red: &[LineR2], blue: &[LineR2], k: usize) -> Result<OverlayFaceMap, Error> {
    if red.is_empty() || blue.is_empty() {
        return Err(Error::EmptyInput);
    }
    let all: Vec<LineR2> = red.iter().chain(blue).cloned().collect();
    let nr = red.len();
    let n = all.len();

    let mut xs: Vec<Rat> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if let Some(x) = all[i].meet_x(&all[j]) {
                xs.push(x);
            }
        }
    }
    xs.sort();
    xs.dedup();
    let (xmin, xmax) = match (xs.first(), xs.last()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => (Rat::zero(), Rat::zero()),
    };
    let span = (&xmax - &xmin).max(Rat::one());
    let bx0 = &xmin - &span;
    let bx1 = &xmax + &span;
    let mut ys: Vec<Rat> = all.iter().flat_map(|l| [l.eval(&bx0), l.eval(&bx1)]).collect();
    ys.sort();
    let yspan = (ys.last().unwrap() - ys.first().unwrap()).max(Rat::one());
    let by0 = ys.first().unwrap() - &yspan;
    let by1 = ys.last().unwrap() + &yspan;

    let mut walls = vec![bx0.clone()];
    walls.extend(xs);
    walls.push(bx1.clone());

    let mut map = OverlayFaceMap {
        k,
        red: red.to_vec(),
        blue: blue.to_vec(),
        box_lo: PointR2::new(bx0, by0),
        box_hi: PointR2::new(bx1, by1),
        faces: Vec::new(),
        cells: Vec::new(),
        adjacency: Vec::new(),
        slabs: Vec::new(),
    };
    let nb_total = blue.len();
    let mut labels: Vec<(usize, usize)> = Vec::new();
    for w in walls.windows(2) {
        let mid = (&w[0] + &w[1]) / int(2);
        let vals: Vec<Rat> = all.iter().map(|l| l.eval(&mid)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vals[a].cmp(&vals[b]).then(a.cmp(&b)));
        let mut cell_of_gap = Vec::with_capacity(n + 1);
        let (mut rb, mut bb) = (0usize, 0usize);
        for g in 0..=n {
            let below = g.checked_sub(1).map(|i| order[i]);
            let above = (g < n).then(|| order[g]);
            let empty = matches!((below, above), (Some(a), Some(b)) if vals[a] == vals[b]);
            if empty {
                cell_of_gap.push(None);
            } else {
                let id = map.cells.len();
                map.cells.push(OverlayCell { face: id, x0: w[0].clone(), x1: w[1].clone(), below, above });
                labels.push((rb, nb_total - bb));
                cell_of_gap.push(Some(id));
            }
            if g < n {
                if order[g] < nr {
                    rb += 1;
                } else {
                    bb += 1;
                }
            }
        }
        map.slabs.push(Slab { x1: w[1].clone(), order, cell_of_gap });
    }

    // glue cells across each interior wall where their wall segments overlap
    let mut dsu = Dsu((0..map.cells.len()).collect());
    for s in 0..map.slabs.len().saturating_sub(1) {
        let x = map.slabs[s].x1.clone();
        let ranges = |slab: &Slab| -> Vec<(Rat, Rat, usize)> {
            slab.cell_of_gap
                .iter()
                .flatten()
                .map(|&c| {
                    let cell = &map.cells[c];
                    (map.lower_y(cell, &x), map.upper_y(cell, &x), c)
                })
                .collect()
        };
        let (left, right) = (ranges(&map.slabs[s]), ranges(&map.slabs[s + 1]));
        let (mut i, mut j) = (0, 0);
        while i < left.len() && j < right.len() {
            let lo = (&left[i].0).max(&right[j].0);
            let hi = (&left[i].1).min(&right[j].1);
            if lo < hi {
                dsu.union(left[i].2, right[j].2);
            }
            if left[i].1 < right[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let mut face_of_root = std::collections::HashMap::new();
    for c in 0..map.cells.len() {
        let r = dsu.find(c);
        let fid = *face_of_root.entry(r).or_insert_with(|| {
            let (red_below, blue_above) = labels[c];
            let cell = &map.cells[c];
            let sx = (&cell.x0 + &cell.x1) / int(2);
            let sy = (map.lower_y(cell, &sx) + map.upper_y(cell, &sx)) / int(2);
            map.faces.push(OverlayFace {
                id: map.faces.len(),
                red_below,
                blue_above,
                mis: red_below + blue_above,
                valid: red_below + blue_above <= k,
                in_levels: red_below <= k && blue_above <= k,
                unbounded: false,
                sample: PointR2::new(sx, sy),
                cells: Vec::new(),
            });
            map.faces.len() - 1
        });
        map.cells[c].face = fid;
        map.faces[fid].cells.push(c);
    }
    let last = map.slabs.len() - 1;
    for (si, slab) in map.slabs.iter().enumerate() {
        for &c in slab.cell_of_gap.iter().flatten() {
            let cell = &map.cells[c];
            if si == 0 || si == last || cell.below.is_none() || cell.above.is_none() {
                map.faces[cell.face].unbounded = true;
            }
        }
        let faces: Vec<usize> = slab.cell_of_gap.iter().flatten().map(|&c| map.cells[c].face).collect();
        for w in faces.windows(2) {
            map.adjacency.push((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    map.adjacency.sort_unstable();
    map.adjacency.dedup();
    Ok(map)
}
