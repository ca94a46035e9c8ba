//! Deterministic SVG drawings of matchings and flip sequences.

use std::fmt::Write as _;

use crate::flipseq::FlipSequence;
use crate::geometry::{PointSet, Segment};
use crate::matching::Matching;

pub const CANVAS: f64 = 600.0;
const MARGIN: f64 = 0.05;
const RADIUS: f64 = 3.0;
const STROKE: f64 = 1.5;

struct Viewport {
    min_x: f64,
    max_y: f64,
    scale: f64,
    pad: f64,
}

impl Viewport {
    fn new(ps: &PointSet) -> Viewport {
        let xs = ps.points().iter().map(|p| p.x);
        let ys = ps.points().iter().map(|p| p.y);
        let (min_x, max_x) = (xs.clone().min().unwrap_or(0), xs.max().unwrap_or(0));
        let (min_y, max_y) = (ys.clone().min().unwrap_or(0), ys.max().unwrap_or(0));
        let span = ((max_x - min_x).max(max_y - min_y)).max(1) as f64;
        let pad = CANVAS * MARGIN;
        Viewport { min_x: min_x as f64, max_y: max_y as f64, scale: (CANVAS - 2.0 * pad) / span, pad }
    }

    fn map(&self, ps: &PointSet, v: usize) -> (f64, f64) {
        let p = ps[v];
        (self.pad + (p.x as f64 - self.min_x) * self.scale, self.pad + (self.max_y - p.y as f64) * self.scale)
    }
}

fn line(out: &mut String, vp: &Viewport, ps: &PointSet, s: Segment, attrs: &str) {
    let (x1, y1) = vp.map(ps, s.a());
    let (x2, y2) = vp.map(ps, s.b());
    writeln!(out, r#"  <line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {attrs}/>"#).unwrap();
}

/// One picture: matching edges solid, optional dashed removed edge and
/// emphasized added edge, unmatched point highlighted.
pub fn render_frame(
    ps: &PointSet,
    m: &Matching,
    removed: Option<Segment>,
    added: Option<Segment>,
    caption: &str,
) -> String {
    let vp = Viewport::new(ps);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    )
    .unwrap();
    writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#).unwrap();
    if !caption.is_empty() {
        writeln!(out, r#"  <text x="8" y="16" font-family="monospace" font-size="12">{caption}</text>"#).unwrap();
    }
    if let Some(s) = removed {
        line(&mut out, &vp, ps, s, &format!(r##"stroke="#999999" stroke-width="{STROKE}" stroke-dasharray="6 4""##));
    }
    for s in m.edges() {
        if Some(s) != added {
            line(&mut out, &vp, ps, s, &format!(r#"stroke="black" stroke-width="{STROKE}""#));
        }
    }
    if let Some(s) = added {
        line(&mut out, &vp, ps, s, &format!(r##"stroke="#d62728" stroke-width="{}""##, 2.0 * STROKE));
    }
    for v in 0..ps.len() {
        let (x, y) = vp.map(ps, v);
        let fill = if v == m.unmatched() { "#d62728" } else { "black" };
        writeln!(out, r#"  <circle cx="{x:.2}" cy="{y:.2}" r="{RADIUS}" fill="{fill}"/>"#).unwrap();
        writeln!(
            out,
            r#"  <text x="{:.2}" y="{:.2}" font-family="monospace" font-size="10">{v}</text>"#,
            x + 4.0,
            y - 4.0
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_matching(ps: &PointSet, m: &Matching) -> String {
    render_frame(ps, m, None, None, "")
}

/// One frame for the start and one after each flip.
pub fn render_sequence(ps: &PointSet, s: &FlipSequence) -> Vec<String> {
    let states = s.matchings();
    let mut frames = vec![render_frame(ps, &states[0], None, None, "step 0")];
    for (i, f) in s.flips.iter().enumerate() {
        let caption = format!("step {}: flip {} {} {}", i + 1, f.p, f.q, f.r);
        frames.push(render_frame(ps, &states[i + 1], Some(f.removed()), Some(f.added()), &caption));
    }
    frames
}
