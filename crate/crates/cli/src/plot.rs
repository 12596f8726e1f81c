//! SVG rendering of a trained 2D classifier.

use std::fmt::Write as _;
use std::path::Path;

use zonosvm::{hull_extreme, Label, LabeledDataset, ReducedHull, TrainedClassifier};

use crate::report::Failure;

const SIZE: f64 = 600.0;
const DIRECTIONS: usize = 360;
const POSITIVE: &str = "#1f77b4";
const NEGATIVE: &str = "#d62728";

pub fn emit_plot_data(
    clf: &TrainedClassifier,
    ds: &LabeledDataset,
    path: &Path,
) -> Result<(), Failure> {
    let svg = render_svg(clf, ds)?;
    std::fs::write(path, svg).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
}

/// Outline of `H_μ` from its extreme points in evenly spaced directions,
/// with repeated vertices dropped.
pub fn hull_outline(h: &ReducedHull) -> Result<Vec<[f64; 2]>, Failure> {
    let mut out: Vec<[f64; 2]> = Vec::new();
    for k in 0..DIRECTIONS {
        let t = std::f64::consts::TAU * k as f64 / DIRECTIONS as f64;
        let p = hull_extreme(h, &[t.cos(), t.sin()])?.point;
        let p = [p[0], p[1]];
        if out.last().is_none_or(|q| !close(q, &p)) {
            out.push(p);
        }
    }
    while out.len() > 1 && close(&out[0], out.last().unwrap()) {
        out.pop();
    }
    Ok(out)
}

fn close(a: &[f64; 2], b: &[f64; 2]) -> bool {
    let scale = 1.0 + a[0].abs().max(a[1].abs());
    (a[0] - b[0]).abs() <= 1e-12 * scale && (a[1] - b[1]).abs() <= 1e-12 * scale
}

struct Frame {
    lo: [f64; 2],
    hi: [f64; 2],
}

impl Frame {
    fn around(points: impl Iterator<Item = [f64; 2]>) -> Frame {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        // Square frame with a margin so lines and markers stay visible.
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let pad = 0.1 * span;
        let half = 0.5 * span + pad;
        let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        Frame {
            lo: [mid[0] - half, mid[1] - half],
            hi: [mid[0] + half, mid[1] + half],
        }
    }

    fn to_px(&self, p: [f64; 2]) -> (f64, f64) {
        let sx = SIZE / (self.hi[0] - self.lo[0]);
        let sy = SIZE / (self.hi[1] - self.lo[1]);
        ((p[0] - self.lo[0]) * sx, SIZE - (p[1] - self.lo[1]) * sy)
    }

    /// Endpoints of `{x : w·x = c}` clipped to the frame.
    fn clip_line(&self, w: [f64; 2], c: f64) -> Option<([f64; 2], [f64; 2])> {
        let mut hits: Vec<[f64; 2]> = Vec::new();
        for &x in &[self.lo[0], self.hi[0]] {
            if w[1] != 0.0 {
                let y = (c - w[0] * x) / w[1];
                if y >= self.lo[1] && y <= self.hi[1] {
                    hits.push([x, y]);
                }
            }
        }
        for &y in &[self.lo[1], self.hi[1]] {
            if w[0] != 0.0 {
                let x = (c - w[1] * y) / w[0];
                if x >= self.lo[0] && x <= self.hi[0] {
                    hits.push([x, y]);
                }
            }
        }
        let dir = [-w[1], w[0]];
        let along = |p: &[f64; 2]| p[0] * dir[0] + p[1] * dir[1];
        let a = *hits.iter().min_by(|p, q| along(p).total_cmp(&along(q)))?;
        let b = *hits.iter().max_by(|p, q| along(p).total_cmp(&along(q)))?;
        Some((a, b))
    }
}

pub fn render_svg(clf: &TrainedClassifier, ds: &LabeledDataset) -> Result<String, Failure> {
    if ds.dim() != 2 {
        return Err(Failure::Usage(format!(
            "plots need 2-dimensional data, got dimension {}",
            ds.dim()
        )));
    }
    let outlines = if clf.mu < 1.0 {
        let mut v = Vec::new();
        for label in [Label::Positive, Label::Negative] {
            let h = ReducedHull::new(ds.class_points(label), clf.mu)?;
            v.push((label, hull_outline(&h)?));
        }
        v
    } else {
        Vec::new()
    };
    let frame = Frame::around((0..ds.len()).map(|i| {
        let p = ds.point(i);
        [p[0], p[1]]
    }));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">
<rect width="100%" height="100%" fill="white"/>"#
    );

    for (label, outline) in &outlines {
        let (class, color) = class_style(*label);
        if outline.len() == 1 {
            let (x, y) = frame.to_px(outline[0]);
            let _ = writeln!(
                s,
                r#"<circle class="hull {class}" cx="{x:.3}" cy="{y:.3}" r="3" fill="{color}" fill-opacity="0.4"/>"#
            );
            continue;
        }
        let pts: Vec<String> = outline
            .iter()
            .map(|&p| {
                let (x, y) = frame.to_px(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon class="hull {class}" points="{}" fill="{color}" fill-opacity="0.12" stroke="{color}" stroke-width="1"/>"#,
            pts.join(" ")
        );
    }

    if !clf.is_degenerate() {
        let w = [clf.w[0], clf.w[1]];
        let lines = [
            ("slab-plus", clf.b_plus, "4 3"),
            ("slab-minus", clf.b_minus, "4 3"),
            ("decision", clf.b, "none"),
        ];
        for (class, c, dash) in lines {
            if let Some((a, b)) = frame.clip_line(w, c) {
                let (x1, y1) = frame.to_px(a);
                let (x2, y2) = frame.to_px(b);
                let _ = writeln!(
                    s,
                    r#"<line class="{class}" data-level="{c}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="black" stroke-width="1.5" stroke-dasharray="{dash}"/>"#
                );
            }
        }
    }

    for i in 0..ds.len() {
        let (class, color) = class_style(ds.label(i));
        let p = ds.point(i);
        let (x, y) = frame.to_px([p[0], p[1]]);
        let _ = writeln!(
            s,
            r#"<circle class="point {class}" data-x="{}" data-y="{}" cx="{x:.3}" cy="{y:.3}" r="4" fill="{color}"/>"#,
            p[0], p[1]
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn class_style(label: Label) -> (&'static str, &'static str) {
    match label {
        Label::Positive => ("positive", POSITIVE),
        Label::Negative => ("negative", NEGATIVE),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use zonosvm::PointSet;

    #[test]
    fn vertical_line_clipped_to_frame() {
        let f = Frame {
            lo: [-1.0, -1.0],
            hi: [3.0, 3.0],
        };
        let (a, b) = f.clip_line([2.0, 0.0], 4.0).unwrap();
        assert_eq!(a[0], 2.0);
        assert_eq!(b[0], 2.0);
        assert_eq!((a[1].min(b[1]), a[1].max(b[1])), (-1.0, 3.0));
        assert!(f.clip_line([1.0, 0.0], 10.0).is_none());
    }

    #[test]
    fn square_outline_at_full_mass() {
        let pts = PointSet::from_rows(
            2,
            &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]],
        );
        let h = ReducedHull::new(pts, 1.0).unwrap();
        let o = hull_outline(&h).unwrap();
        assert_eq!(o.len(), 4);
    }

    #[test]
    fn smallest_mass_outline_is_the_centroid() {
        let pts = PointSet::from_rows(2, &[[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]]);
        let h = ReducedHull::new(pts, 1.0 / 3.0).unwrap();
        let o = hull_outline(&h).unwrap();
        assert_eq!(o.len(), 1);
        assert!((o[0][0] - 1.0).abs() < 1e-12 && (o[0][1] - 1.0).abs() < 1e-12);
    }
}
