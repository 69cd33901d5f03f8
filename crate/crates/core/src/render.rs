//! SVG figures of polygon presentations.
//!
//! Output is plain SVG 1.1 built by string formatting, with every coordinate
//! rounded to three decimals, so identical inputs give identical documents.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::constructions::{build, FamilySpec};
use crate::convex::find_copies;
use crate::error::Result;
use crate::geom::{PlanarPolygon, Vec2};
use crate::surface::TranslationSurface;
use crate::tracing::GeodesicSegment;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Overlay {
    Copies,
    Segments,
    Centroids,
}

#[derive(Clone, Debug, Default)]
pub struct RenderOptions {
    pub overlays: Vec<Overlay>,
    /// Polygon searched for by the copies and centroids overlays. Defaults to
    /// the family square when the surface comes from a construction.
    pub copy_polygon: Option<PlanarPolygon>,
    /// Target width of the drawing in pixels.
    pub width: f64,
}

impl RenderOptions {
    pub fn with_overlays(overlays: &[Overlay]) -> Self {
        Self {
            overlays: overlays.to_vec(),
            ..Self::default()
        }
    }

    fn has(&self, o: Overlay) -> bool {
        self.overlays.contains(&o)
    }
}

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939",
];

/// Spreadsheet-style label for the `k`-th edge pair: `a`, `b`, ..., `z`, `aa`, ...
pub fn pair_label(mut k: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (k % 26) as u8);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// `A1..A4` labels (numbered `A{i + 4k}` in sector `k`) for the split square
/// sides of odd builds.
fn split_segment_label(family: Option<&FamilySpec>, edge: usize) -> Option<String> {
    let f = family?;
    if f.n % 2 == 0 {
        return None;
    }
    let (k, i) = (edge / 7, edge % 7);
    let a = match i {
        1 => 1,
        2 => 2,
        4 => 3,
        5 => 4,
        _ => return None,
    };
    Some(format!("A{}", a + 4 * k))
}

struct Frame {
    offsets: Vec<Vec2>,
    min: Vec2,
    max: Vec2,
    scale: f64,
    margin: f64,
}

impl Frame {
    fn new(polygons: &[PlanarPolygon], width: f64) -> Self {
        let mut offsets = Vec::with_capacity(polygons.len());
        let mut cursor = 0.0;
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let gap = polygons.iter().map(|p| p.diameter()).fold(0.0, f64::max) * 0.15;
        for p in polygons {
            let (lo, hi) = bounds(p.vertices());
            let off = Vec2::new(cursor - lo.x, 0.0);
            offsets.push(off);
            min = Vec2::new(min.x.min(lo.x + off.x), min.y.min(lo.y));
            max = Vec2::new(max.x.max(hi.x + off.x), max.y.max(hi.y));
            cursor += hi.x - lo.x + gap;
        }
        let span = (max.x - min.x).max(max.y - min.y).max(1e-12);
        let width = if width > 0.0 { width } else { 800.0 };
        let margin = 40.0;
        Self {
            offsets,
            min,
            max,
            scale: (width - 2.0 * margin) / span,
            margin,
        }
    }

    fn size(&self) -> (f64, f64) {
        (
            (self.max.x - self.min.x) * self.scale + 2.0 * self.margin,
            (self.max.y - self.min.y) * self.scale + 2.0 * self.margin,
        )
    }

    fn map(&self, polygon: usize, p: Vec2) -> (f64, f64) {
        let q = p + self.offsets[polygon];
        (
            (q.x - self.min.x) * self.scale + self.margin,
            (self.max.y - q.y) * self.scale + self.margin,
        )
    }
}

fn bounds(pts: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

fn num(x: f64) -> String {
    let r = (x * 1000.0).round() / 1000.0;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.3}")
}

fn points_attr(frame: &Frame, polygon: usize, pts: &[Vec2]) -> String {
    pts.iter()
        .map(|p| {
            let (x, y) = frame.map(polygon, *p);
            format!("{},{}", num(x), num(y))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn label(out: &mut String, frame: &Frame, polygon: usize, at: Vec2, text: &str, class: &str) {
    let (x, y) = frame.map(polygon, at);
    let _ = writeln!(
        out,
        r#"<text class="{class}" x="{}" y="{}">{text}</text>"#,
        num(x + 4.0),
        num(y - 4.0)
    );
}

fn dot(out: &mut String, frame: &Frame, polygon: usize, at: Vec2, r: f64, class: &str) {
    let (x, y) = frame.map(polygon, at);
    let _ = writeln!(
        out,
        r#"<circle class="{class}" cx="{}" cy="{}" r="{}"/>"#,
        num(x),
        num(y),
        num(r)
    );
}

fn segment(out: &mut String, frame: &Frame, seg: &GeodesicSegment, name: &str, class: &str) {
    for (k, piece) in seg.pieces.iter().enumerate() {
        let (x1, y1) = frame.map(piece.polygon, piece.start);
        let (x2, y2) = frame.map(piece.polygon, piece.end);
        let _ = writeln!(
            out,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        );
        if k == seg.pieces.len() - 1 {
            label(
                out,
                frame,
                piece.polygon,
                (piece.start + piece.end) * 0.5,
                name,
                class,
            );
        }
    }
}

/// Renders the surface as an SVG document.
pub fn render_svg(
    surface: &TranslationSurface,
    family: Option<&FamilySpec>,
    options: &RenderOptions,
) -> Result<String> {
    let polygons = surface.polygons();
    let frame = Frame::new(polygons, options.width);
    let (w, h) = frame.size();
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(w),
        num(h),
        num(w),
        num(h)
    );
    out.push_str(concat!(
        "<style>\n",
        "polygon.face{fill:#f4f4f4;stroke:none}\n",
        "line.edge{stroke-width:2.5}\n",
        "text{font-family:sans-serif;font-size:12px}\n",
        "text.edge{font-size:11px}\n",
        "circle.cone{fill:#000}\n",
        "circle.marked{fill:#c00}\n",
        "circle.centroid{fill:#060;stroke:#fff;stroke-width:1}\n",
        "polygon.copy{fill:#2ca02c;fill-opacity:0.3;stroke:none}\n",
        "line.seg-s{stroke:#c00;stroke-width:1.2;stroke-dasharray:5,3}\n",
        "line.seg-t{stroke:#00c;stroke-width:1.2;stroke-dasharray:2,2}\n",
        "text.seg-s{fill:#c00}\ntext.seg-t{fill:#00c}\n",
        "</style>\n"
    ));

    for (i, p) in polygons.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<polygon class="face" points="{}"/>"#,
            points_attr(&frame, i, p.vertices())
        );
    }

    for (k, (a, b)) in surface.pairing().pairs.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        for e in [a, b] {
            let name = split_segment_label(family, e.edge).unwrap_or_else(|| pair_label(k));
            let (s, t) = polygons[e.polygon].edge_points(e.edge);
            let (x1, y1) = frame.map(e.polygon, s);
            let (x2, y2) = frame.map(e.polygon, t);
            let _ = writeln!(
                out,
                r#"<line class="edge" stroke="{colour}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                num(x1),
                num(y1),
                num(x2),
                num(y2)
            );
            let mid = (s + t) * 0.5;
            let d = t - s;
            let inward = Vec2::new(-d.y, d.x).normalized() * (10.0 / frame.scale);
            let (lx, ly) = frame.map(e.polygon, mid + inward);
            let _ = writeln!(
                out,
                r#"<text class="edge" fill="{colour}" x="{}" y="{}" text-anchor="middle">{name}</text>"#,
                num(lx),
                num(ly + 4.0)
            );
        }
    }

    if options.has(Overlay::Copies) || options.has(Overlay::Centroids) {
        let target = match (&options.copy_polygon, family) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(f)) => Some(f.square()?),
            (None, None) => None,
        };
        if let Some(target) = target {
            let copies = find_copies(surface, &target)?;
            if options.has(Overlay::Copies) {
                for c in &copies {
                    for frag in &c.region {
                        let _ = writeln!(
                            out,
                            r#"<polygon class="copy" points="{}"/>"#,
                            points_attr(&frame, frag.polygon, &frag.vertices)
                        );
                    }
                }
            }
            if options.has(Overlay::Centroids) {
                for c in &copies {
                    dot(
                        &mut out,
                        &frame,
                        c.centroid.polygon,
                        c.centroid.position,
                        4.0,
                        "centroid",
                    );
                }
            }
        }
    }

    if options.has(Overlay::Segments) {
        if let Some(spec) = family {
            let c = build(*spec)?;
            for (i, s) in c.s.iter().enumerate() {
                segment(&mut out, &frame, s, &format!("S{}", i + 1), "seg-s");
            }
            for (i, t) in c.t_segs.iter().enumerate() {
                segment(&mut out, &frame, t, &format!("T{}", i + 1), "seg-t");
            }
        }
    }

    for class in surface.vertex_classes().iter().filter(|c| c.singular) {
        for &(p, v) in &class.corners {
            dot(&mut out, &frame, p, polygons[p].vertex(v), 3.5, "cone");
        }
    }
    for m in surface.marked_points() {
        dot(
            &mut out,
            &frame,
            m.point.polygon,
            m.point.position,
            3.5,
            "marked",
        );
        label(
            &mut out,
            &frame,
            m.point.polygon,
            m.point.position,
            &m.name,
            "marked",
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
