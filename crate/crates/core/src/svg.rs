//! Layered SVG plots: the primal point set with a separator, and per
//! orientation the dual arrangement with its valid faces and MinMax curve.

use std::fmt::Write;

use crate::exact::orientation_curve;
use crate::geom::{Color, LabeledPoint, LineR2, Orientation, PointR2, Separator};
use crate::levels::{overlay_and_label, OverlayFaceMap};
use crate::lpviol::ConstraintSet;
use crate::rat::{to_f64, Rat};
use crate::report::orientation_str;
use crate::Error;

const PANEL: f64 = 420.0;
const PAD: f64 = 16.0;

/// Maps a data box onto one square panel, y pointing up.
#[derive(Clone, Copy, Debug)]
struct View {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
}

impl View {
    fn new(lo: (f64, f64), hi: (f64, f64)) -> Self {
        let w = (hi.0 - lo.0).max(1e-9);
        let h = (hi.1 - lo.1).max(1e-9);
        View { x0: lo.0, y0: lo.1, sx: (PANEL - 2.0 * PAD) / w, sy: (PANEL - 2.0 * PAD) / h }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (PAD + (x - self.x0) * self.sx, PANEL - PAD - (y - self.y0) * self.sy)
    }

    fn pt(&self, p: &PointR2) -> (f64, f64) {
        self.map(to_f64(&p.x), to_f64(&p.y))
    }

    fn hi(&self) -> (f64, f64) {
        (self.x0 + (PANEL - 2.0 * PAD) / self.sx, self.y0 + (PANEL - 2.0 * PAD) / self.sy)
    }

    /// `y = m x + c` across the panel's x range.
    fn line(&self, l: &LineR2) -> String {
        let (m, c) = (to_f64(&l.m), to_f64(&l.c));
        let x1 = self.hi().0;
        let (a, b) = (self.map(self.x0, m * self.x0 + c), self.map(x1, m * x1 + c));
        format!(r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, a.0, a.1, b.0, b.1)
    }
}

fn color_of(c: Color) -> &'static str {
    match c {
        Color::Red => "#c0392b",
        Color::Blue => "#2c6fbb",
    }
}

fn polygon(view: &View, pts: &[PointR2]) -> String {
    let coords: Vec<String> = pts.iter().map(|p| view.pt(p)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    format!(r#"<polygon points="{}"/>"#, coords.join(" "))
}

fn primal_panel(out: &mut String, pts: &[LabeledPoint], sep: Option<&Separator>) {
    let xs: Vec<f64> = pts.iter().map(|p| to_f64(&p.point.x)).collect();
    let ys: Vec<f64> = pts.iter().map(|p| to_f64(&p.point.y)).collect();
    let (lo, hi) = bounds(&xs, &ys);
    let view = View::new(lo, hi);
    let _ = writeln!(out, r##"<g id="primal"><rect width="{PANEL}" height="{PANEL}" fill="white" stroke="#999"/>"##);
    if let Some(s) = sep {
        let _ = writeln!(
            out,
            r#"<g id="separator" stroke="black" stroke-width="1.5" data-orientation="{}">{}</g>"#,
            orientation_str(s.orientation),
            view.line(&s.line)
        );
    }
    let _ = writeln!(out, r#"<g id="points">"#);
    for p in pts {
        let (x, y) = view.pt(&p.point);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{}" data-id="{}"/>"#, color_of(p.color), p.id);
    }
    let _ = writeln!(out, "</g></g>");
}

fn bounds(xs: &[f64], ys: &[f64]) -> ((f64, f64), (f64, f64)) {
    let f = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let m = ((hi - lo) * 0.1).max(1.0);
        (lo - m, hi + m)
    };
    let ((x0, x1), (y0, y1)) = (f(xs), f(ys));
    ((x0, y0), (x1, y1))
}

fn dual_panel(out: &mut String, pts: &[LabeledPoint], k: usize, o: Orientation, sep: Option<&Separator>, map: &OverlayFaceMap) -> Result<(), Error> {
    let view = View::new((to_f64(&map.box_lo.x), to_f64(&map.box_lo.y)), (to_f64(&map.box_hi.x), to_f64(&map.box_hi.y)));
    let name = orientation_str(o);
    let _ = writeln!(out, r##"<g id="dual-{name}" data-k="{k}"><rect width="{PANEL}" height="{PANEL}" fill="white" stroke="#999"/>"##);
    let _ = writeln!(out, r##"<g id="levels-{name}" class="levels" fill="#eeeeee" stroke="none">"##);
    for f in map.faces.iter().filter(|f| f.in_levels && !f.valid) {
        for c in &f.cells {
            let _ = writeln!(out, "{}", polygon(&view, &map.cell_polygon(&map.cells[*c])));
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r##"<g id="valid-{name}" class="valid-regions" fill="#7bc67b" fill-opacity="0.55" stroke="none">"##);
    for f in map.valid_faces() {
        let _ = writeln!(out, r#"<g class="valid-face" data-face="{}" data-mis="{}">"#, f.id, f.mis);
        for c in &f.cells {
            let _ = writeln!(out, "{}", polygon(&view, &map.cell_polygon(&map.cells[*c])));
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="arrangement-{name}" class="arrangement" stroke-width="0.8">"#);
    for (lines, color) in [(&map.red, Color::Red), (&map.blue, Color::Blue)] {
        for l in lines {
            let _ = writeln!(out, r#"<g stroke="{}">{}</g>"#, color_of(color), view.line(l));
        }
    }
    let _ = writeln!(out, "</g>");
    let curve = orientation_curve(pts, o)?;
    let (xa, xb) = (&map.box_lo.x, &map.box_hi.x);
    let mut xs: Vec<Rat> = vec![xa.clone(), xb.clone()];
    xs.extend(curve.vertices().into_iter().map(|v| v.x).filter(|x| x > xa && x < xb));
    xs.sort();
    let coords: Vec<String> = xs
        .iter()
        .map(|x| view.pt(&PointR2::new(x.clone(), curve.eval(x))))
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    let _ = writeln!(
        out,
        r#"<g id="minmax-{name}" class="minmax-curve" fill="none" stroke="black" stroke-dasharray="4 2"><polyline points="{}"/></g>"#,
        coords.join(" ")
    );
    if let Some(s) = sep.filter(|s| s.orientation == o) {
        let (x, y) = view.pt(&PointR2::new(s.line.m.clone(), -&s.line.c));
        let _ = writeln!(out, r#"<g id="dual-separator" class="separator"><circle cx="{x:.2}" cy="{y:.2}" r="4" fill="black"/></g>"#);
    }
    let _ = writeln!(out, "</g>");
    Ok(())
}

/// Full plot; dual panels are drawn only when both colors are present.
pub fn plot_svg(pts: &[LabeledPoint], k: usize, sep: Option<&Separator>) -> Result<String, Error> {
    if pts.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut maps = Vec::new();
    for o in Orientation::BOTH {
        let cs = ConstraintSet::from_points(pts, o);
        if cs.red.is_empty() || cs.blue.is_empty() {
            break;
        }
        maps.push((o, overlay_and_label(&cs.red_lines(), &cs.blue_lines(), k)?));
    }
    let width = PANEL * (1 + maps.len()) as f64;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL}" viewBox="0 0 {width} {PANEL}">"#);
    primal_panel(&mut out, pts, sep);
    for (i, (o, map)) in maps.iter().enumerate() {
        let _ = writeln!(out, r#"<g transform="translate({},0)">"#, PANEL * (i + 1) as f64);
        dual_panel(&mut out, pts, k, *o, sep, map)?;
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layers_present() {
        let pts = vec![
            LabeledPoint::ints(0, 0, Color::Red, 0),
            LabeledPoint::ints(2, 2, Color::Red, 1),
            LabeledPoint::ints(0, 2, Color::Blue, 2),
            LabeledPoint::ints(2, 0, Color::Blue, 3),
        ];
        let r = crate::exact::solve_exact_with_regions(&pts, 1).unwrap();
        let svg = plot_svg(&pts, 1, r.separator().as_ref()).unwrap();
        for id in ["points", "separator", "valid-BlueAbove", "minmax-RedAbove", "arrangement-BlueAbove"] {
            assert!(svg.contains(&format!(r#"id="{id}""#)), "{id}");
        }
        assert_eq!(svg.matches(r#"class="valid-face""#).count(), r.valid_regions.unwrap());
        assert!(matches!(plot_svg(&[], 1, None), Err(Error::EmptyInput)));
    }
}
