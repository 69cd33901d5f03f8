//! Straight-line flow across the edge identifications, and flat distances to
//! the singular set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{epsilon, orient, Vec2};
use crate::surface::{SurfacePoint, TranslationSurface};
use crate::tri::HalfEdge;
use crate::unfold::{corner_seeds, unfold, Flow, Seed};

/// A straight chord inside one polygon, in that polygon's coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub polygon: usize,
    pub start: Vec2,
    pub end: Vec2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSegment {
    pub pieces: Vec<Piece>,
    pub holonomy: Vec2,
    pub length: f64,
}

impl GeodesicSegment {
    fn from_pieces(pieces: Vec<Piece>) -> Self {
        let mut holonomy = Vec2::ZERO;
        let mut length = 0.0;
        for p in &pieces {
            holonomy += p.end - p.start;
            length += p.start.dist(p.end);
        }
        Self {
            pieces,
            holonomy,
            length,
        }
    }

    pub fn start(&self) -> SurfacePoint {
        let p = self.pieces[0];
        SurfacePoint::new(p.polygon, p.start)
    }

    pub fn end(&self) -> SurfacePoint {
        let p = self.pieces[self.pieces.len() - 1];
        SurfacePoint::new(p.polygon, p.end)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceOutcome {
    Completed(GeodesicSegment),
    HitConePoint(GeodesicSegment, SurfacePoint),
}

impl TraceOutcome {
    pub fn segment(&self) -> &GeodesicSegment {
        match self {
            TraceOutcome::Completed(s) | TraceOutcome::HitConePoint(s, _) => s,
        }
    }

    pub fn hit_cone(&self) -> bool {
        matches!(self, TraceOutcome::HitConePoint(..))
    }
}

/// Position of the walker: a base triangle and a point in its polygon chart.
struct Walker<'a> {
    surface: &'a TranslationSurface,
    tri: usize,
    pos: Vec2,
    dir: Vec2,
    pieces: Vec<Piece>,
    piece_start: Vec2,
}

impl<'a> Walker<'a> {
    fn points(&self) -> [Vec2; 3] {
        self.surface.chart(self.tri).points
    }

    fn polygon(&self) -> usize {
        self.surface.chart(self.tri).polygon
    }

    fn close_piece(&mut self) {
        if !self.piece_start.approx_eq_tol(self.pos, 1e-15) {
            self.pieces.push(Piece {
                polygon: self.polygon(),
                start: self.piece_start,
                end: self.pos,
            });
        }
    }

    /// Moves to a new chart; a new piece starts unless coordinates continue
    /// inside the same polygon.
    fn jump(&mut self, tri: usize, pos: Vec2) {
        let same =
            self.surface.chart(tri).polygon == self.polygon() && pos.approx_eq_tol(self.pos, 1e-12);
        if !same {
            self.close_piece();
            self.piece_start = pos;
        }
        self.tri = tri;
        self.pos = pos;
    }
}

/// Corner `(tri, k)` of the base triangulation whose sector at its vertex
/// contains direction `dir` (half-open on the counterclockwise side).
pub(crate) fn sector_contains(
    surface: &TranslationSurface,
    tri: usize,
    k: usize,
    dir: Vec2,
) -> bool {
    let t = &surface.base().tris[tri];
    let out = t.edges[k];
    let back = -t.edges[(k + 2) % 3];
    let tol = 100.0 * epsilon();
    let s1 = out.cross(dir) / (out.norm() * dir.norm());
    let s2 = dir.cross(back) / (back.norm() * dir.norm());
    let right_ok = s1 > tol || (s1.abs() <= tol && out.dot(dir) > 0.0);
    right_ok && s2 > tol
}

/// All corners of the vertex class at base corner `(tri, k)`, counterclockwise.
fn corners_around(surface: &TranslationSurface, tri: usize, k: usize) -> Vec<(usize, usize)> {
    let base = surface.base();
    let mut out = vec![(tri, k)];
    let mut cur = base.next_corner_ccw(tri, k);
    while cur != (tri, k) {
        out.push(cur);
        cur = base.next_corner_ccw(cur.0, cur.1);
    }
    out
}

/// Start corner for a ray leaving a vertex at `p` in direction `dir`.
fn start_corner(
    surface: &TranslationSurface,
    p: SurfacePoint,
    dir: Vec2,
) -> Option<(usize, usize)> {
    let tol = 10.0 * epsilon();
    let base = surface.base();
    let mut first: Option<(usize, usize)> = None;
    for t in 0..base.tris.len() {
        let c = surface.chart(t);
        if c.polygon != p.polygon {
            continue;
        }
        for k in 0..3 {
            if c.points[k].approx_eq_tol(p.position, tol) {
                first = Some((t, k));
                if sector_contains(surface, t, k, dir) {
                    return Some((t, k));
                }
            }
        }
    }
    let (t, k) = first?;
    corners_around(surface, t, k)
        .into_iter()
        .find(|&(ct, ck)| sector_contains(surface, ct, ck, dir))
}

/// Traces the straight ray from `from` in direction `direction` for
/// `max_length`, stopping early at a singular vertex.
///
/// Rays may start at a vertex; the sector is taken from the given polygon
/// corner when it contains the direction, otherwise from the first corner of
/// the vertex class (walking counterclockwise) that does. Flat non-singular
/// vertices are passed straight through.
pub fn trace_ray(
    surface: &TranslationSurface,
    from: SurfacePoint,
    direction: Vec2,
    max_length: f64,
) -> Result<TraceOutcome> {
    if direction.norm() <= epsilon() || max_length <= 0.0 || !max_length.is_finite() {
        return Err(Error::BadRay);
    }
    let dir = direction.normalized();
    if surface.vertex_at(from).is_some() {
        let (t, k) = start_corner(surface, from, dir).ok_or(Error::CornerAmbiguity)?;
        return trace_from_corner(surface, t, k, dir, max_length);
    }
    let (tri, offset) = surface.locate(from)?;
    let pos = surface.chart(tri).points[0] + offset;
    let walker = Walker {
        surface,
        tri,
        pos,
        dir,
        pieces: Vec::new(),
        piece_start: pos,
    };
    walk(walker, max_length)
}

/// Traces from the vertex at corner `k` of base triangle `tri`; `dir` must lie
/// in that corner's sector.
pub(crate) fn trace_from_corner(
    surface: &TranslationSurface,
    tri: usize,
    k: usize,
    dir: Vec2,
    max_length: f64,
) -> Result<TraceOutcome> {
    let dir = dir.normalized();
    let pos = surface.chart(tri).points[k];
    let walker = Walker {
        surface,
        tri,
        pos,
        dir,
        pieces: Vec::new(),
        piece_start: pos,
    };
    walk(walker, max_length)
}

fn walk(mut w: Walker<'_>, max_length: f64) -> Result<TraceOutcome> {
    let eps = epsilon();
    let base = w.surface.base();
    let mut remaining = max_length;
    let vtol = 100.0 * eps * (1.0 + max_length);
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 10_000_000 {
            return Err(Error::CornerAmbiguity);
        }
        let pts = w.points();
        // Nearest outward crossing.
        let mut best: Option<(f64, usize)> = None;
        for k in 0..3 {
            let a = pts[k];
            let b = pts[(k + 1) % 3];
            let e = b - a;
            let speed = -e.cross(w.dir) / e.norm();
            if speed <= 1e-14 {
                continue;
            }
            let dist = (orient(a, b, w.pos) / e.norm()).max(0.0);
            let s = dist / speed;
            if best.is_none_or(|(bs, _)| s < bs) {
                best = Some((s, k));
            }
        }
        let (s, k) = best.ok_or(Error::CornerAmbiguity)?;

        if remaining <= s + vtol {
            // The endpoint lies in this triangle; check for a vertex there.
            let end = w.pos + w.dir * remaining;
            if let Some(v) = (0..3).find(|&v| pts[v].approx_eq_tol(end, vtol)) {
                if base.is_singular_corner(w.tri, v) {
                    w.pos = pts[v];
                    w.close_piece();
                    let seg = GeodesicSegment::from_pieces(w.pieces);
                    let hit = w.surface.canonical_point(SurfacePoint::new(
                        w.surface.chart(w.tri).polygon,
                        pts[v],
                    ))?;
                    return Ok(TraceOutcome::HitConePoint(seg, hit));
                }
            }
            if remaining <= s - vtol || !(0..3).any(|v| pts[v].approx_eq_tol(end, vtol)) {
                w.pos = end;
                w.close_piece();
                return Ok(TraceOutcome::Completed(GeodesicSegment::from_pieces(
                    w.pieces,
                )));
            }
        }

        let exit = w.pos + w.dir * s;
        let a = pts[k];
        let b = pts[(k + 1) % 3];
        let corner = if exit.approx_eq_tol(a, vtol) {
            Some(k)
        } else if exit.approx_eq_tol(b, vtol) {
            Some((k + 1) % 3)
        } else {
            None
        };
        if let Some(v) = corner {
            let travelled = w.pos.dist(pts[v]);
            w.pos = pts[v];
            remaining -= travelled;
            if base.is_singular_corner(w.tri, v) {
                w.close_piece();
                let polygon = w.polygon();
                let seg = GeodesicSegment::from_pieces(w.pieces);
                let hit = w
                    .surface
                    .canonical_point(SurfacePoint::new(polygon, pts[v]))?;
                return Ok(TraceOutcome::HitConePoint(seg, hit));
            }
            if remaining <= vtol {
                w.close_piece();
                return Ok(TraceOutcome::Completed(GeodesicSegment::from_pieces(
                    w.pieces,
                )));
            }
            // Flat vertex: continue straight out of the corner containing dir.
            let (nt, nk) = corners_around(w.surface, w.tri, v)
                .into_iter()
                .find(|&(ct, ck)| sector_contains(w.surface, ct, ck, w.dir))
                .ok_or(Error::CornerAmbiguity)?;
            let npos = w.surface.chart(nt).points[nk];
            w.jump(nt, npos);
            // Step into the corner's opposite edge directly.
            continue;
        }

        remaining -= s;
        w.pos = exit;
        let u = (exit - a).dot(b - a) / (b - a).norm2();
        let h = base.glued(HalfEdge::new(w.tri, k));
        let npts = w.surface.chart(h.tri).points;
        let np = npts[(h.edge + 1) % 3] + (npts[h.edge] - npts[(h.edge + 1) % 3]) * u;
        w.jump(h.tri, np);
    }
}

/// Flat distance from `p` to the nearest singular point within
/// `search_radius`, or `f64::INFINITY` if none is that close.
pub fn distance_to_cone_set(
    surface: &TranslationSurface,
    p: SurfacePoint,
    search_radius: f64,
) -> Result<f64> {
    let base = surface.base();
    if let Some(class) = surface.vertex_at(p) {
        if surface.vertex_classes()[class].singular {
            return Ok(0.0);
        }
    }
    let seeds = point_seeds(surface, p)?;
    let mut best = f64::INFINITY;
    unfold(base, &seeds, search_radius, |hit| {
        if base.singular[hit.class] {
            best = best.min(hit.position.norm());
        }
        Flow::Continue
    });
    Ok(best)
}

/// Seed triangles around an arbitrary surface point.
pub(crate) fn point_seeds(surface: &TranslationSurface, p: SurfacePoint) -> Result<Vec<Seed>> {
    let base = surface.base();
    let tol = 10.0 * epsilon();
    let (tri, offset) = surface.locate(p)?;
    let pts = base.tris[tri].points(-offset);
    if let Some(k) = (0..3).find(|&k| pts[k].norm() <= tol) {
        return Ok(corner_seeds(base, tri, k));
    }
    let mut seeds = vec![Seed { tri, points: pts }];
    for k in 0..3 {
        let a = pts[k];
        let b = pts[(k + 1) % 3];
        if orient(a, b, Vec2::ZERO).abs() <= tol * (b - a).norm() {
            let (nt, npts) = base.develop_across(&pts, k, tri);
            seeds.push(Seed {
                tri: nt,
                points: npts,
            });
        }
    }
    Ok(seeds)
}
