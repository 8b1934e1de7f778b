//! SVG drawings of indexed curves.

use std::fmt::Write;

use crate::geom::{Aabb, Vec2};
use crate::halfint::HalfInt;
use crate::indexing::{winding_number, IndexedCurve};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderOptions {
    /// Width and height of the picture in pixels.
    pub size: u32,
    pub labels: bool,
    /// Print winding numbers inside the regions.
    pub regions: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            size: 600,
            labels: true,
            regions: false,
        }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const SAMPLES_PER_ARC: usize = 96;

fn color(index: HalfInt) -> &'static str {
    PALETTE[index.doubled().rem_euclid(PALETTE.len() as i64) as usize]
}

struct Frame {
    origin: Vec2,
    scale: f64,
    size: f64,
    margin: f64,
}

impl Frame {
    fn new(bounds: Aabb, size: u32) -> Self {
        let size = size as f64;
        let margin = 0.08 * size;
        let extent = (bounds.max.x - bounds.min.x).max(bounds.max.y - bounds.min.y).max(1e-9);
        let scale = (size - 2.0 * margin) / extent;
        let center = (bounds.min + bounds.max) * 0.5;
        Frame {
            origin: center,
            scale,
            size,
            margin,
        }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        let q = (p - self.origin) * self.scale;
        (0.5 * self.size + q.x, 0.5 * self.size - q.y)
    }
}

/// Draws the curve with arcs colored by index, an arrow showing the
/// orientation of each component, and the double points with their index
/// and crossing angle.
pub fn render_svg(ic: &IndexedCurve, opts: &RenderOptions) -> String {
    let bounds = ic.curve.bounds();
    let frame = Frame::new(bounds, opts.size);
    let diagonal = bounds.diagonal();
    let mut svg = String::new();
    let s = frame.size;
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<g font-family="sans-serif" font-size="{:.0}">"#,
        (frame.margin * 0.3).max(9.0)
    );

    for (i, a) in ic.arcs.iter().enumerate() {
        let path = &ic.curve.components()[a.arc.component];
        let mut d = String::new();
        for k in 0..=SAMPLES_PER_ARC {
            let t = a.arc.start + a.arc.length() * k as f64 / SAMPLES_PER_ARC as f64;
            let (x, y) = frame.map(path.point(t));
            let _ = write!(d, "{}{x:.2},{y:.2} ", if k == 0 { 'M' } else { 'L' });
        }
        let _ = writeln!(
            svg,
            r#"<path id="arc{i}" d="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            d.trim_end(),
            color(a.index)
        );
        if opts.labels {
            let t = a.arc.start + 0.5 * a.arc.length();
            let p = path.point(t) + path.derivative(t).normalized().perp() * (0.03 * diagonal);
            let (x, y) = frame.map(p);
            let _ = writeln!(
                svg,
                r#"<text class="arc-index" x="{x:.2}" y="{y:.2}" fill="{}" text-anchor="middle">{}</text>"#,
                color(a.index),
                a.index
            );
        }
    }

    for (c, path) in ic.curve.components().iter().enumerate() {
        let t = 0.0;
        let p = path.point(t);
        let dir = path.derivative(t).normalized();
        let len = 0.04 * diagonal;
        let tip = p + dir * len;
        let back = p - dir * (0.5 * len);
        let left = back + dir.perp() * (0.35 * len);
        let right = back - dir.perp() * (0.35 * len);
        let pts: Vec<String> = [tip, left, right]
            .iter()
            .map(|&q| {
                let (x, y) = frame.map(q);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polygon class="orientation" data-component="{c}" points="{}" fill="black"/>"#,
            pts.join(" ")
        );
    }

    for d in &ic.double_points {
        let (x, y) = frame.map(d.point.position);
        let _ = writeln!(svg, r#"<circle class="double-point" cx="{x:.2}" cy="{y:.2}" r="4" fill="black"/>"#);
        if opts.labels {
            let _ = writeln!(
                svg,
                r#"<text class="double-point-label" x="{:.2}" y="{:.2}">{} (θ={:.1}°)</text>"#,
                x + 6.0,
                y - 6.0,
                d.index,
                d.point.theta.to_degrees()
            );
        }
    }

    if opts.regions {
        for (p, w) in region_samples(ic) {
            let (x, y) = frame.map(p);
            let _ = writeln!(
                svg,
                r#"<text class="region" x="{x:.2}" y="{y:.2}" fill="gray" text-anchor="middle">{w}</text>"#
            );
        }
    }

    svg.push_str("</g>\n</svg>\n");
    svg
}

/// One sample point with its winding number per region touching an arc,
/// found by stepping off the middle of each arc to both sides.
fn region_samples(ic: &IndexedCurve) -> Vec<(Vec2, i64)> {
    let diagonal = ic.curve.bounds().diagonal();
    let mut out: Vec<(Vec2, i64)> = Vec::new();
    for a in &ic.arcs {
        let path = &ic.curve.components()[a.arc.component];
        let t = a.arc.start + 0.5 * a.arc.length();
        let normal = path.derivative(t).normalized().perp();
        for side in [1.0, -1.0] {
            let p = path.point(t) + normal * (side * 0.07 * diagonal);
            if let Ok(w) = winding_number(&ic.curve, p) {
                if !out.iter().any(|&(q, v)| v == w && q.distance(p) < 0.15 * diagonal) {
                    out.push((p, w));
                }
            }
        }
    }
    out
}
