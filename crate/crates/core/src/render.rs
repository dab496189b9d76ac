//! SVG diagrams of cyclic configurations.

use std::fmt::Write;

use crate::catalog::CatalogEntry;
use crate::config::{vertices, Vec2};

/// Vertices closer than this (in model units) share one dot.
const MERGE_TOL: f64 = 1e-9;
const MARGIN: f64 = 1.1;

#[derive(Clone, Debug)]
pub struct RenderSpec<'a> {
    pub entry: &'a CatalogEntry,
    pub canvas_px: u32,
    pub show_circle: bool,
    pub show_labels: bool,
}

impl<'a> RenderSpec<'a> {
    pub fn new(entry: &'a CatalogEntry) -> Self {
        Self {
            entry,
            canvas_px: 480,
            show_circle: true,
            show_labels: true,
        }
    }
}

/// Distinct vertex locations in first-visit order, each with the 1-based
/// labels of the vertices sitting there.
pub fn vertex_dots(entry: &CatalogEntry) -> Vec<(Vec2, Vec<usize>)> {
    let mut dots: Vec<(Vec2, Vec<usize>)> = Vec::new();
    for (i, p) in vertices(&entry.config).iter().enumerate() {
        let q = p.xy();
        match dots.iter_mut().find(|(d, _)| (d - q).norm() <= MERGE_TOL) {
            Some((_, labels)) => labels.push(i + 1),
            None => dots.push((q, vec![i + 1])),
        }
    }
    dots
}

pub fn caption(entry: &CatalogEntry) -> String {
    format!(
        "ω={}, e={}, index={}",
        entry.ctype.omega(),
        entry.ctype.e(),
        entry.index_combinatorial
    )
}

pub fn render_svg(spec: &RenderSpec) -> String {
    let entry = spec.entry;
    let px = spec.canvas_px.max(1) as f64;
    let caption_h = 28.0;
    let half = px / 2.0;
    let scale = half / (MARGIN * entry.radius);
    let c = entry.center.xy();
    // model -> canvas, y axis pointing up
    let map = |p: Vec2| ((p.x - c.x) * scale + half, half - (p.y - c.y) * scale);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = px,
        h = px + caption_h
    );
    out.push_str(
        "  <defs>\n    <marker id=\"arrow\" markerWidth=\"10\" markerHeight=\"8\" refX=\"9\" refY=\"4\" orient=\"auto\">\n      <polygon points=\"0 0, 10 4, 0 8\" fill=\"black\"/>\n    </marker>\n  </defs>\n",
    );
    let _ = writeln!(
        out,
        r#"  <rect width="{px}" height="{}" fill="white"/>"#,
        px + caption_h
    );

    if spec.show_circle {
        let _ = writeln!(
            out,
            r#"  <circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="gray" stroke-dasharray="6 4"/>"#,
            half,
            half,
            entry.radius * scale
        );
    }

    let pts: Vec<(f64, f64)> = vertices(&entry.config).iter().map(|p| map(p.xy())).collect();
    let mut d = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        let _ = write!(d, "{}{:.3} {:.3} ", if i == 0 { "M" } else { "L" }, x, y);
    }
    d.push('Z');
    let _ = writeln!(
        out,
        r#"  <path d="{d}" fill="none" stroke="black" stroke-width="2" stroke-linejoin="round"/>"#
    );

    // orientation: half of edge 1, ending in an arrowhead at its midpoint
    let (a, b) = (pts[0], pts[1]);
    let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
    let _ = writeln!(
        out,
        r#"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="2" marker-end="url(#arrow)"/>"#,
        a.0, a.1, mid.0, mid.1
    );

    for (q, labels) in vertex_dots(entry) {
        let (x, y) = map(q);
        let _ = writeln!(
            out,
            r#"  <circle class="vertex" cx="{x:.3}" cy="{y:.3}" r="4" fill="black"/>"#
        );
        if spec.show_labels {
            let text: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(
                out,
                r#"  <text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="12">{}</text>"#,
                x + 6.0,
                y - 6.0,
                text.join(",")
            );
        }
    }

    let _ = writeln!(
        out,
        r#"  <text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        half,
        px + caption_h - 8.0,
        caption(entry)
    );
    out.push_str("</svg>\n");
    out
}

pub fn svg_filename(n: usize, entry: &CatalogEntry) -> String {
    format!("n{}_s{}_w{}.svg", n, entry.ctype.sign_word(), entry.ctype.omega())
}
