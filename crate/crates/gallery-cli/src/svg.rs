//! Deterministic SVG rendering of polygons and solutions: fixed canvas,
//! fixed element order, fixed number formatting. Identical inputs produce
//! identical bytes.

use gallery_core::geom::{sees, Polygon};
use gallery_core::rational::to_f64;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 48.0;

struct Frame {
    scale: f64,
    min_x: f64,
    max_y: f64,
}

impl Frame {
    fn of(poly: &Polygon) -> Frame {
        let xs: Vec<f64> = poly.points().iter().map(|p| to_f64(&p.x)).collect();
        let ys: Vec<f64> = poly.points().iter().map(|p| to_f64(&p.y)).collect();
        let (min_x, max_x) = bounds(&xs);
        let (min_y, max_y) = bounds(&ys);
        let width = (max_x - min_x).max(1e-9);
        let height = (max_y - min_y).max(1e-9);
        let scale = ((CANVAS - 2.0 * MARGIN) / width).min((CANVAS - 2.0 * MARGIN) / height);
        Frame {
            scale,
            min_x,
            max_y,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            MARGIN + (x - self.min_x) * self.scale,
            MARGIN + (self.max_y - y) * self.scale,
        )
    }

    fn map_vertex(&self, poly: &Polygon, id: usize) -> (f64, f64) {
        let p = poly.point(id);
        self.map(to_f64(&p.x), to_f64(&p.y))
    }
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    (min, max)
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Renders the polygon with reflex vertices marked, guards highlighted, and
/// optional visibility segments from each guard to every vertex it sees.
pub fn render(poly: &Polygon, guards: &[usize], rays: bool) -> String {
    let frame = Frame::of(poly);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{c}\" height=\"{c}\" viewBox=\"0 0 {c} {c}\">\n",
        c = CANVAS as u32
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    let mut path = String::new();
    for id in 1..=poly.n() {
        let (x, y) = frame.map_vertex(poly, id);
        path.push_str(if id == 1 { "M" } else { "L" });
        path.push_str(&format!("{} {} ", fmt(x), fmt(y)));
    }
    path.push('Z');
    out.push_str(&format!(
        "<path d=\"{path}\" fill=\"#f3f6fb\" stroke=\"#1f2430\" stroke-width=\"2\"/>\n"
    ));

    let mut sorted_guards: Vec<usize> = guards.to_vec();
    sorted_guards.sort_unstable();
    sorted_guards.dedup();

    if rays {
        for &g in &sorted_guards {
            for v in 1..=poly.n() {
                if v == g || !sees(poly, poly.point(g), poly.point(v)) {
                    continue;
                }
                let (x1, y1) = frame.map_vertex(poly, g);
                let (x2, y2) = frame.map_vertex(poly, v);
                out.push_str(&format!(
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#74c69d\" stroke-width=\"1\"/>\n",
                    fmt(x1), fmt(y1), fmt(x2), fmt(y2)
                ));
            }
        }
    }

    for id in 1..=poly.n() {
        let (x, y) = frame.map_vertex(poly, id);
        if poly.is_reflex(id) {
            out.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"#d64550\"/>\n",
                fmt(x - 5.0),
                fmt(y - 5.0)
            ));
        } else {
            out.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#4a5568\"/>\n",
                fmt(x),
                fmt(y)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#1f2430\">{}</text>\n",
            fmt(x + 7.0),
            fmt(y - 7.0),
            id
        ));
    }

    for &g in &sorted_guards {
        let (x, y) = frame.map_vertex(poly, g);
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"9\" fill=\"none\" stroke=\"#2d6a4f\" stroke-width=\"3\"/>\n",
            fmt(x),
            fmt(y)
        ));
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"#2d6a4f\"/>\n",
            fmt(x),
            fmt(y)
        ));
    }

    out.push_str("</svg>\n");
    out
}
