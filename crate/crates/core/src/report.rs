//! Full analysis of a surface, as text or JSON.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::constructions::FamilySpec;
use crate::convex::find_copies;
use crate::delaunay::delaunay_triangulation;
use crate::error::Result;
use crate::geom::{epsilon, PlanarMatrix, PlanarPolygon};
use crate::saddle::{enumerate_saddle_connections, shortest_saddle_length};
use crate::surface::TranslationSurface;
use crate::veech::compute_veech_group;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub polygon: usize,
    pub x: f64,
    pub y: f64,
    /// Total angle divided by `2pi`.
    pub angle_turns: f64,
    pub corners: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopiesReport {
    pub polygon: String,
    pub count: usize,
    /// `(polygon, x, y)` for each centroid.
    pub centroids: Vec<(usize, f64, f64)>,
    /// Names of marked points coinciding with a centroid.
    pub centroid_marks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementReport {
    pub kind: String,
    /// Rotation angle, or the angle of the reflection axis, in degrees.
    pub angle_degrees: f64,
    pub matrix: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub group_type: String,
    pub order: usize,
    pub elements: Vec<ElementReport>,
    pub translation_automorphisms: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub saddle_ms: f64,
    pub copies_ms: f64,
    pub veech_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub family: Option<FamilySpec>,
    pub genus: usize,
    pub area: f64,
    pub cones: Vec<ConeReport>,
    pub shortest_saddle_length: f64,
    pub saddle_bound: f64,
    /// Unoriented saddle connections of length at most `saddle_bound`.
    pub saddle_count: usize,
    pub copies: Vec<CopiesReport>,
    pub veech: Option<GroupReport>,
    pub invariants: Vec<InvariantCheck>,
    pub timing: Timing,
}

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    /// Saddle connection bound; defaults to three times the shortest length.
    pub bound: Option<f64>,
    pub veech: bool,
    /// Polygons to search for; defaults to the family's square and central
    /// polygon for constructed surfaces.
    pub polygons: Vec<(String, PlanarPolygon)>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            bound: None,
            veech: true,
            polygons: Vec::new(),
        }
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub fn describe_element(m: &PlanarMatrix) -> ElementReport {
    let deg = |r: f64| {
        let d = r.to_degrees().rem_euclid(360.0);
        let d = (d * 1e6).round() / 1e6;
        if d >= 360.0 {
            0.0
        } else {
            d
        }
    };
    let (kind, angle) = if m.det() > 0.0 {
        ("rotation", deg(m.c.atan2(m.a)))
    } else {
        ("reflection", deg(m.c.atan2(m.a) / 2.0).rem_euclid(180.0))
    };
    ElementReport {
        kind: kind.into(),
        angle_degrees: angle,
        matrix: [m.a, m.b, m.c, m.d],
    }
}

pub fn analyze(
    surface: &TranslationSurface,
    family: Option<FamilySpec>,
    options: &AnalysisOptions,
) -> Result<AnalysisReport> {
    let start = Instant::now();
    let tol = epsilon();
    let cones = surface
        .vertex_classes()
        .iter()
        .filter(|c| c.singular)
        .map(|c| {
            let (p, v) = c.corners[0];
            let at = surface.polygons()[p].vertex(v);
            ConeReport {
                polygon: p,
                x: at.x,
                y: at.y,
                angle_turns: c.angle / (2.0 * PI),
                corners: c.corners.len(),
            }
        })
        .collect();

    let t = Instant::now();
    let shortest = shortest_saddle_length(surface)?;
    let bound = options.bound.unwrap_or(3.0 * shortest);
    let saddles = enumerate_saddle_connections(surface, bound)?;
    let saddle_ms = ms(t);

    let mut invariants = Vec::new();
    let (lhs, rhs) = surface.gauss_bonnet();
    invariants.push(InvariantCheck {
        name: "gauss-bonnet".into(),
        passed: (lhs - rhs).abs() <= 1e3 * tol * (1.0 + rhs.abs()),
        detail: format!("sum of angle excesses {lhs:.12}, 2pi(2g-2) = {rhs:.12}"),
    });
    let shortest_found = saddles.first().map(|s| s.length());
    invariants.push(InvariantCheck {
        name: "shortest-saddle".into(),
        passed: bound < shortest * (1.0 - 1e-9)
            || shortest_found
                .is_some_and(|l| (l - shortest).abs() <= 1e3 * tol * shortest.max(1.0)),
        detail: match shortest_found {
            Some(l) => format!("shortest {shortest:.12}, first enumerated {l:.12}"),
            None => format!("shortest {shortest:.12}, none enumerated below the bound"),
        },
    });
    let tri = delaunay_triangulation(surface)?;
    invariants.push(InvariantCheck {
        name: "delaunay".into(),
        passed: tri.is_delaunay(),
        detail: format!(
            "{} vertices, {} edges, {} triangles, defect {:.3e}",
            tri.vertex_count(),
            tri.edge_count(),
            tri.triangle_count(),
            tri.delaunay_defect()
        ),
    });

    let t = Instant::now();
    let mut targets = options.polygons.clone();
    if targets.is_empty() {
        if let Some(f) = &family {
            targets.push(("square".into(), f.square()?));
            targets.push(("central".into(), f.central_polygon()?));
        }
    }
    let mut copies = Vec::new();
    for (name, poly) in &targets {
        let found = find_copies(surface, poly)?;
        let mut marks = Vec::new();
        for m in surface.marked_points() {
            if found
                .iter()
                .any(|c| surface.same_point(c.centroid, m.point, 1e3 * tol))
            {
                marks.push(m.name.clone());
            }
        }
        copies.push(CopiesReport {
            polygon: name.clone(),
            count: found.len(),
            centroids: found
                .iter()
                .map(|c| {
                    (
                        c.centroid.polygon,
                        c.centroid.position.x,
                        c.centroid.position.y,
                    )
                })
                .collect(),
            centroid_marks: marks,
        });
    }
    let copies_ms = ms(t);

    let t = Instant::now();
    let veech = if options.veech {
        let g = compute_veech_group(surface)?;
        invariants.push(InvariantCheck {
            name: "veech-closure".into(),
            passed: true,
            detail: format!(
                "{} elements closed under composition and inverse",
                g.order()
            ),
        });
        Some(GroupReport {
            group_type: g.group_type.to_string(),
            order: g.order(),
            elements: g.elements.iter().map(describe_element).collect(),
            translation_automorphisms: g.translation_automorphisms,
        })
    } else {
        None
    };
    let veech_ms = ms(t);

    Ok(AnalysisReport {
        family,
        genus: surface.genus(),
        area: surface.area(),
        cones,
        shortest_saddle_length: shortest,
        saddle_bound: bound,
        saddle_count: saddles.len(),
        copies,
        veech,
        invariants,
        timing: Timing {
            saddle_ms,
            copies_ms,
            veech_ms,
            total_ms: ms(start),
        },
    })
}

impl AnalysisReport {
    pub fn all_invariants_hold(&self) -> bool {
        self.invariants.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The report with timing fields zeroed.
    pub fn without_timing(&self) -> Self {
        Self {
            timing: Timing::default(),
            ..self.clone()
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(f) = &self.family {
            let _ = writeln!(
                out,
                "family: {} N={} l1={} l2={} l3={}",
                f.kind, f.n, f.l1, f.l2, f.l3
            );
        }
        let _ = writeln!(out, "genus: {}", self.genus);
        let _ = writeln!(out, "area: {:.12}", self.area);
        let _ = writeln!(out, "singular points: {}", self.cones.len());
        for (i, c) in self.cones.iter().enumerate() {
            let _ = writeln!(
                out,
                "  #{i}: angle {:.6} x 2pi at polygon {} ({:.6}, {:.6}), {} corners",
                c.angle_turns, c.polygon, c.x, c.y, c.corners
            );
        }
        let _ = writeln!(
            out,
            "shortest saddle connection: {:.12}",
            self.shortest_saddle_length
        );
        let _ = writeln!(
            out,
            "saddle connections up to {:.6}: {}",
            self.saddle_bound, self.saddle_count
        );
        for c in &self.copies {
            let _ = writeln!(out, "copies of {}: {}", c.polygon, c.count);
            if !c.centroid_marks.is_empty() {
                let _ = writeln!(
                    out,
                    "  centroids at marked points: {}",
                    c.centroid_marks.join(", ")
                );
            }
        }
        match &self.veech {
            Some(g) => {
                let _ = writeln!(
                    out,
                    "isometric Veech group: {}, order {}",
                    g.group_type, g.order
                );
                for e in &g.elements {
                    let _ = writeln!(out, "  {} {:.6} deg", e.kind, e.angle_degrees);
                }
                let _ = writeln!(
                    out,
                    "translation automorphisms: {}",
                    g.translation_automorphisms
                );
            }
            None => {
                let _ = writeln!(out, "isometric Veech group: skipped");
            }
        }
        for c in &self.invariants {
            let _ = writeln!(
                out,
                "invariant {}: {} ({})",
                c.name,
                if c.passed { "ok" } else { "FAILED" },
                c.detail
            );
        }
        let _ = writeln!(out, "time: {:.1} ms", self.timing.total_ms);
        out
    }
}
