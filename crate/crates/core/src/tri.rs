//! Flat triangulations: triangles given by edge vectors, glued along edges
//! by translations. This is the working representation behind tracing,
//! saddle-connection enumeration and the Delaunay canonical form.

use crate::geom::{epsilon, orient, PlanarPolygon, Vec2};

/// Reference to edge `edge` of triangle `tri`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub tri: usize,
    pub edge: usize,
}

impl HalfEdge {
    pub const fn new(tri: usize, edge: usize) -> Self {
        Self { tri, edge }
    }
}

#[derive(Clone, Debug)]
pub struct Triangle {
    /// Edge `k` runs from vertex `k` to vertex `k + 1`; the three sum to zero
    /// and the triangle is counterclockwise.
    pub edges: [Vec2; 3],
    pub glued: [HalfEdge; 3],
    /// Vertex class of each corner.
    pub class: [usize; 3],
}

impl Triangle {
    /// Vertex positions with vertex 0 at `origin`.
    pub fn points(&self, origin: Vec2) -> [Vec2; 3] {
        let p1 = origin + self.edges[0];
        let p2 = p1 + self.edges[1];
        [origin, p1, p2]
    }

    /// Vertex positions when vertex `k` sits at `at`.
    pub fn points_with(&self, k: usize, at: Vec2) -> [Vec2; 3] {
        let mut pts = [Vec2::ZERO; 3];
        pts[k] = at;
        pts[(k + 1) % 3] = at + self.edges[k];
        pts[(k + 2) % 3] = pts[(k + 1) % 3] + self.edges[(k + 1) % 3];
        pts
    }

    pub fn area(&self) -> f64 {
        0.5 * self.edges[0].cross(self.edges[1])
    }
}

/// Triangulated translation surface.
#[derive(Clone, Debug)]
pub struct FlatTriangulation {
    pub tris: Vec<Triangle>,
    /// Per vertex class: whether it belongs to the singular set.
    pub singular: Vec<bool>,
}

impl FlatTriangulation {
    #[inline]
    pub fn glued(&self, h: HalfEdge) -> HalfEdge {
        self.tris[h.tri].glued[h.edge]
    }

    #[inline]
    pub fn edge_vec(&self, h: HalfEdge) -> Vec2 {
        self.tris[h.tri].edges[h.edge]
    }

    #[inline]
    pub fn class_of(&self, tri: usize, corner: usize) -> usize {
        self.tris[tri].class[corner]
    }

    #[inline]
    pub fn is_singular_corner(&self, tri: usize, corner: usize) -> bool {
        self.singular[self.tris[tri].class[corner]]
    }

    /// The corner following `(tri, corner)` counterclockwise around its vertex.
    pub fn next_corner_ccw(&self, tri: usize, corner: usize) -> (usize, usize) {
        let h = self.glued(HalfEdge::new(tri, (corner + 2) % 3));
        (h.tri, h.edge)
    }

    /// Positions of the triangle across edge `k` of a triangle placed at `pts`.
    pub fn develop_across(&self, pts: &[Vec2; 3], k: usize, tri: usize) -> (usize, [Vec2; 3]) {
        let h = self.tris[tri].glued[k];
        let other = &self.tris[h.tri];
        (h.tri, other.points_with(h.edge, pts[(k + 1) % 3]))
    }

    /// Consistency of gluings and edge vectors.
    pub fn check(&self) -> Result<(), String> {
        let tol = 10.0 * epsilon();
        for (i, t) in self.tris.iter().enumerate() {
            let s = t.edges[0] + t.edges[1] + t.edges[2];
            if !s.approx_eq_tol(Vec2::ZERO, tol) {
                return Err(format!("triangle {i} does not close"));
            }
            if t.area() <= 0.0 {
                return Err(format!("triangle {i} is not counterclockwise"));
            }
            for k in 0..3 {
                let h = t.glued[k];
                let back = self.glued(h);
                if back != HalfEdge::new(i, k) {
                    return Err(format!("gluing of {i}:{k} is not an involution"));
                }
                if !(t.edges[k] + self.edge_vec(h)).approx_eq_tol(Vec2::ZERO, tol) {
                    return Err(format!("edge {i}:{k} is glued to a non-opposite edge"));
                }
                let cls_start = t.class[k];
                let cls_end = t.class[(k + 1) % 3];
                let o = &self.tris[h.tri];
                if o.class[(h.edge + 1) % 3] != cls_start || o.class[h.edge] != cls_end {
                    return Err(format!("vertex classes disagree across {i}:{k}"));
                }
            }
        }
        Ok(())
    }
}

/// Ear-clipping triangulation of a simple counterclockwise polygon.
///
/// Returns vertex index triples (counterclockwise). Among the available ears
/// the one with the largest minimum angle is cut first; ties go to the lowest
/// index, so the output is deterministic.
pub fn ear_clip(poly: &PlanarPolygon) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut out = Vec::with_capacity(poly.len().saturating_sub(2));
    let eps = epsilon();
    while idx.len() > 3 {
        let m = idx.len();
        let mut best: Option<(f64, usize)> = None;
        for i in 0..m {
            let a = poly.vertex(idx[(i + m - 1) % m]);
            let b = poly.vertex(idx[i]);
            let c = poly.vertex(idx[(i + 1) % m]);
            if orient(a, b, c) <= eps * (b - a).norm() * (c - b).norm() {
                continue;
            }
            let blocked = idx.iter().enumerate().any(|(j, &v)| {
                if j == (i + m - 1) % m || j == i || j == (i + 1) % m {
                    return false;
                }
                let p = poly.vertex(v);
                if p.approx_eq(a) || p.approx_eq(b) || p.approx_eq(c) {
                    return false;
                }
                orient(a, b, p) >= -eps && orient(b, c, p) >= -eps && orient(c, a, p) >= -eps
            });
            if blocked {
                continue;
            }
            let q = min_angle(a, b, c);
            if best.is_none_or(|(bq, _)| q > bq + 1e-12) {
                best = Some((q, i));
            }
        }
        // A simple polygon always has an ear; fall back to the first convex
        // corner if tolerance ate them all.
        let i = best.map(|(_, i)| i).unwrap_or_else(|| {
            (0..m)
                .find(|&i| {
                    let a = poly.vertex(idx[(i + m - 1) % m]);
                    let b = poly.vertex(idx[i]);
                    let c = poly.vertex(idx[(i + 1) % m]);
                    orient(a, b, c) > 0.0
                })
                .unwrap_or(0)
        });
        out.push([idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]]);
        idx.remove(i);
    }
    out.push([idx[0], idx[1], idx[2]]);
    out
}

fn min_angle(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    let ang = |p: Vec2, q: Vec2, r: Vec2| {
        let u = q - p;
        let v = r - p;
        u.cross(v).abs().atan2(u.dot(v))
    };
    ang(a, b, c).min(ang(b, c, a)).min(ang(c, a, b))
}
