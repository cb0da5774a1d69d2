//! SVG diagrams of displacements.
//!
//! One filled circle per point with radius proportional to `|m|^{1/3}` and
//! one arrow per nonzero displacement vector, scaled so the longest arrow is
//! 15% of the radius of the circle bounding the configuration. The view box
//! is the bounding box of everything drawn plus a 10% margin. Elements are
//! written in point order so output is deterministic.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;
use ringfactor_core::{Error as CoreError, RingSystem, SymBasis};

use crate::error::CliError;

const ARROW_FRACTION: f64 = 0.15;
const MARGIN: f64 = 0.10;
const DOT_FRACTION: f64 = 0.04;
/// Vectors shorter than this fraction of the longest are treated as zero.
const ZERO_FRACTION: f64 = 1e-9;

struct Bounds {
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
}

impl Bounds {
    fn new() -> Self {
        Self { min_x: f64::INFINITY, min_y: f64::INFINITY, max_x: f64::NEG_INFINITY, max_y: f64::NEG_INFINITY }
    }

    fn add(&mut self, x: f64, y: f64, pad: f64) {
        self.min_x = self.min_x.min(x - pad);
        self.min_y = self.min_y.min(y - pad);
        self.max_x = self.max_x.max(x + pad);
        self.max_y = self.max_y.max(y + pad);
    }
}

/// SVG source for `displacement` drawn on `sys`. `title` goes into a
/// `<title>` element.
pub fn svg_string(sys: &RingSystem, displacement: &DVector<f64>, title: &str) -> Result<String, CoreError> {
    if displacement.len() != sys.dim() {
        return Err(CoreError::SizeMismatch { expected: sys.dim(), found: displacement.len() });
    }
    let pts = sys.positions();
    let bound = pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let bound = if bound > 0.0 { bound } else { 1.0 };
    let max_mass = sys.masses().iter().map(|m| m.abs().cbrt()).fold(0.0, f64::max);
    let vec_at = |p: usize| (displacement[2 * p], displacement[2 * p + 1]);
    let longest = (0..pts.len()).map(|p| vec_at(p).0.hypot(vec_at(p).1)).fold(0.0, f64::max);
    let scale = if longest > 0.0 { ARROW_FRACTION * bound / longest } else { 0.0 };

    // Drawing coordinates have y pointing down.
    let mut dots = Vec::new();
    let mut arrows = Vec::new();
    let mut bounds = Bounds::new();
    for (p, x) in pts.iter().enumerate() {
        let r = DOT_FRACTION * bound * sys.masses()[p].abs().cbrt() / max_mass;
        bounds.add(x.x, -x.y, r);
        dots.push((x.x, -x.y, r, sys.masses()[p] < 0.0));
        let (vx, vy) = vec_at(p);
        let len = vx.hypot(vy);
        if longest > 0.0 && len > ZERO_FRACTION * longest {
            let (ex, ey) = (x.x + vx * scale, -(x.y + vy * scale));
            let head = 0.25 * len * scale;
            let (ux, uy) = ((ex - x.x) / (len * scale), (ey + x.y) / (len * scale));
            let (bx, by) = (ex - ux * head, ey - uy * head);
            let (px, py) = (-uy * head * 0.5, ux * head * 0.5);
            let tips = [(ex, ey), (bx + px, by + py), (bx - px, by - py)];
            for &(tx, ty) in &tips {
                bounds.add(tx, ty, 0.0);
            }
            arrows.push(((x.x, -x.y), (bx, by), tips));
        }
    }

    let (w, h) = (bounds.max_x - bounds.min_x, bounds.max_y - bounds.min_y);
    let margin = MARGIN * w.max(h);
    let (vx, vy, vw, vh) = (bounds.min_x - margin, bounds.min_y - margin, w + 2.0 * margin, h + 2.0 * margin);
    let stroke = 0.006 * bound;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="480" height="{:.0}">"#,
        num(vx),
        num(vy),
        num(vw),
        num(vh),
        480.0 * vh / vw
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    for (x, y, r, negative) in &dots {
        let fill = if *negative { "#b03a2e" } else { "#1f4e79" };
        let _ =
            writeln!(s, r#"<circle class="point" cx="{}" cy="{}" r="{}" fill="{fill}"/>"#, num(*x), num(*y), num(*r));
    }
    for ((x1, y1), (x2, y2), tips) in &arrows {
        let _ = writeln!(
            s,
            r##"<line class="arrow" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c47f00" stroke-width="{}"/>"##,
            num(*x1),
            num(*y1),
            num(*x2),
            num(*y2),
            num(stroke)
        );
        let pts: Vec<String> = tips.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect();
        let _ = writeln!(s, r##"<polygon class="head" points="{}" fill="#c47f00"/>"##, pts.join(" "));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Fixed six decimals without a negative zero.
fn num(x: f64) -> String {
    let r = (x * 1e6).round() / 1e6;
    format!("{:.6}", if r == 0.0 { 0.0 } else { r })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_svg(sys: &RingSystem, displacement: &DVector<f64>, title: &str, path: &Path) -> Result<(), CliError> {
    let svg = svg_string(sys, displacement, title).map_err(|e| CliError::core("diagram", e))?;
    std::fs::write(path, svg).map_err(|e| CliError::io(path, e))
}

/// Writes basis column `index` to `path`.
pub fn emit_basis_column(sys: &RingSystem, basis: &SymBasis, index: usize, path: &Path) -> Result<(), CliError> {
    let column = basis.columns.get(index).ok_or_else(|| {
        CliError::core("diagram", CoreError::InvalidIndex(format!("column {index} of {}", basis.len())))
    })?;
    emit_svg(sys, &column.values, &column.label, path)
}

/// File name for a basis column: index plus the label with anything but
/// letters, digits and `+-` replaced.
pub fn column_file_name(index: usize, label: &str) -> String {
    let slug: String =
        label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '+' || c == '-' { c } else { '_' }).collect();
    format!("{index:03}_{slug}.svg")
}
