//! Deterministic SVG drawings of instances and embeddings.

use std::fmt::Write;

use thiserror::Error;

use crate::geometry::Point;
use crate::model::{Embedding, EmbeddingInstance};
use crate::reduction::ReductionMeta;

/// Fixed styling; every value is written verbatim so output is byte-stable.
pub struct SvgStyle {
    pub padding: i64,
    pub pixels_per_unit: i64,
    pub point_radius: &'static str,
    pub apex_radius: &'static str,
    pub boundary_stroke_width: &'static str,
    pub edge_stroke_width: &'static str,
    pub boundary_fill: &'static str,
    pub boundary_stroke: &'static str,
    pub edge_stroke: &'static str,
    pub point_fill: &'static str,
    pub apex_fill: &'static str,
}

pub const STYLE: SvgStyle = SvgStyle {
    padding: 2,
    pixels_per_unit: 20,
    point_radius: "0.3",
    apex_radius: "0.45",
    boundary_stroke_width: "0.1",
    edge_stroke_width: "0.12",
    boundary_fill: "#f2f2f2",
    boundary_stroke: "#000000",
    edge_stroke: "#1f77b4",
    point_fill: "#000000",
    apex_fill: "#d62728",
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("embedding has {got} entries, instance has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("embedding refers to point {0}, which does not exist")]
    PointOutOfRange(usize),
    #[error("meta marks point {0} as the apex, which does not exist")]
    ApexOutOfRange(usize),
}

pub fn render_svg(
    inst: &EmbeddingInstance,
    emb: Option<&Embedding>,
    meta: Option<&ReductionMeta>,
) -> Result<String, RenderError> {
    let pts = inst.points().points();
    if let Some(e) = emb {
        if e.len() != inst.tree().node_count() {
            return Err(RenderError::LengthMismatch {
                expected: inst.tree().node_count(),
                got: e.len(),
            });
        }
        if let Some(&bad) = e.mapping.iter().find(|&&p| p >= pts.len()) {
            return Err(RenderError::PointOutOfRange(bad));
        }
    }
    let apex = meta.map(|m| m.p0_point);
    if let Some(a) = apex.filter(|&a| a >= pts.len()) {
        return Err(RenderError::ApexOutOfRange(a));
    }

    let all = inst.polygon().vertices().iter().chain(pts);
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for p in all {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let pad = STYLE.padding;
    let width = max_x - min_x + 2 * pad;
    let height = max_y - min_y + 2 * pad;
    // SVG y grows downward.
    let tx = |p: Point| (p.x - min_x + pad, max_y - p.y + pad);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        width * STYLE.pixels_per_unit,
        height * STYLE.pixels_per_unit,
        width,
        height
    );

    let mut d = String::new();
    for (i, &v) in inst.polygon().vertices().iter().enumerate() {
        let (x, y) = tx(v);
        let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, x, y);
    }
    d.push('Z');
    let _ = writeln!(
        out,
        r#"  <path class="boundary" d="{}" fill="{}" stroke="{}" stroke-width="{}"/>"#,
        d, STYLE.boundary_fill, STYLE.boundary_stroke, STYLE.boundary_stroke_width
    );

    if let Some(e) = emb {
        let _ = writeln!(out, r#"  <g class="edges" stroke="{}" stroke-width="{}">"#, STYLE.edge_stroke, STYLE.edge_stroke_width);
        for &(u, v) in inst.tree().edges() {
            let (x1, y1) = tx(pts[e.mapping[u]]);
            let (x2, y2) = tx(pts[e.mapping[v]]);
            let _ = writeln!(out, r#"    <line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
        }
        let _ = writeln!(out, "  </g>");
    }

    let _ = writeln!(out, r#"  <g class="points">"#);
    for (i, &p) in pts.iter().enumerate() {
        let (cx, cy) = tx(p);
        if Some(i) == apex {
            let _ = writeln!(
                out,
                r#"    <circle class="apex" cx="{cx}" cy="{cy}" r="{}" fill="{}"/>"#,
                STYLE.apex_radius, STYLE.apex_fill
            );
        } else {
            let _ = writeln!(
                out,
                r#"    <circle cx="{cx}" cy="{cy}" r="{}" fill="{}"/>"#,
                STYLE.point_radius, STYLE.point_fill
            );
        }
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
