//! Maximal embedded convex polygons with a prescribed shape, and their
//! centroids.
//!
//! Every edge of an embedded copy starts with a saddle connection leaving one
//! of its corners, so candidates are produced by laying each vertex and edge
//! of the target polygon along each short saddle connection. A candidate is
//! then developed triangle by triangle: it survives if no singular point lies
//! in its interior, its corners are singular, and no base triangle is covered
//! twice.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{clip_convex, epsilon, points_area, PlanarMatrix, PlanarPolygon, Vec2};
use crate::saddle::{raw_connections, realize, RawConnection, SaddleConnection};
use crate::surface::{SurfacePoint, TranslationSurface};
use crate::tracing::sector_contains;

/// Part of a copy inside one polygon of the presentation, in that polygon's
/// coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionFragment {
    pub polygon: usize,
    pub vertices: Vec<Vec2>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexCopy {
    pub region: Vec<RegionFragment>,
    /// Saddle connections along the boundary, counterclockwise.
    pub boundary: Vec<SaddleConnection>,
    /// Developed image, translated so that its centroid is the origin.
    pub developed: PlanarPolygon,
    pub centroid: SurfacePoint,
    /// Base triangles with the developed position of their first vertex,
    /// relative to the developed centroid.
    #[serde(skip)]
    pub(crate) placement: Vec<(usize, Vec2)>,
}

impl ConvexCopy {
    pub fn area(&self) -> f64 {
        self.developed.area()
    }
}

struct Developed {
    /// (triangle, developed vertex positions, clipped piece)
    tris: Vec<(usize, [Vec2; 3], Vec<Vec2>)>,
}

fn tolerances(scale: f64) -> (f64, f64) {
    let eps = epsilon();
    let len = 1e3 * eps * (1.0 + scale);
    (len, len * (1.0 + scale))
}

/// Develops the base triangulation over `q`, starting from the corner
/// `(t, k)` placed at the origin. Returns `None` as soon as the candidate
/// fails to be an embedded copy.
fn develop(
    surface: &TranslationSurface,
    q: &PlanarPolygon,
    t: usize,
    k: usize,
) -> Option<Developed> {
    let base = surface.base();
    let scale = q.diameter();
    let (tol, area_tol) = tolerances(scale);
    let qv = q.vertices();
    let mut out: Vec<(usize, [Vec2; 3], Vec<Vec2>)> = Vec::new();
    let mut seen: Vec<Vec<Vec2>> = vec![Vec::new(); base.tris.len()];
    let mut stack: Vec<(usize, [Vec2; 3])> = vec![(t, base.tris[t].points_with(k, Vec2::ZERO))];
    seen[t].push(stack[0].1[0]);
    while let Some((tri, pts)) = stack.pop() {
        let piece = clip_convex(&pts, qv);
        if points_area(&piece) <= area_tol {
            continue;
        }
        for v in 0..3 {
            if base.is_singular_corner(tri, v) && q.strictly_contains_convex(pts[v], tol) {
                return None;
            }
        }
        for e in 0..3 {
            let (nt, npts) = base.develop_across(&pts, e, tri);
            if seen[nt].iter().any(|p| p.approx_eq_tol(npts[0], tol)) {
                continue;
            }
            if points_area(&clip_convex(&npts, qv)) <= area_tol {
                continue;
            }
            if (0..3)
                .any(|v| base.is_singular_corner(nt, v) && q.strictly_contains_convex(npts[v], tol))
            {
                return None;
            }
            seen[nt].push(npts[0]);
            stack.push((nt, npts));
        }
        out.push((tri, pts, piece));
    }
    // Corners of the copy must be singular points.
    for &c in qv {
        let ok = out.iter().any(|(tri, pts, _)| {
            (0..3).any(|v| pts[v].approx_eq_tol(c, tol) && base.is_singular_corner(*tri, v))
        });
        if !ok {
            return None;
        }
    }
    // Embedded: pieces of the same base triangle must not overlap.
    for i in 0..out.len() {
        for j in (i + 1)..out.len() {
            if out[i].0 != out[j].0 {
                continue;
            }
            let shift = out[i].1[0] - out[j].1[0];
            let moved: Vec<Vec2> = out[j].2.iter().map(|p| *p + shift).collect();
            if points_area(&clip_convex(&moved, &out[i].2)) > area_tol {
                return None;
            }
        }
    }
    let covered: f64 = out.iter().map(|(_, _, p)| points_area(p)).sum();
    if (covered - q.area()).abs() > 1e-6 * q.area() {
        return None;
    }
    Some(Developed { tris: out })
}

/// Splits the boundary of `q` at singular points and realizes each piece as
/// a saddle connection.
fn boundary_connections(
    surface: &TranslationSurface,
    q: &PlanarPolygon,
    dev: &Developed,
) -> Result<Vec<SaddleConnection>> {
    let base = surface.base();
    let (tol, _) = tolerances(q.diameter());
    let mut out = Vec::new();
    for i in 0..q.len() {
        let (a, b) = q.edge_points(i);
        let d = b - a;
        let mut cuts: Vec<f64> = vec![0.0, 1.0];
        for (tri, pts, _) in &dev.tris {
            for v in 0..3 {
                if !base.is_singular_corner(*tri, v) {
                    continue;
                }
                let p = pts[v];
                let u = (p - a).dot(d) / d.norm2();
                if u > 1e-9
                    && u < 1.0 - 1e-9
                    && crate::geom::point_segment_distance(p, a, b) <= tol
                    && !cuts.iter().any(|c| (c - u).abs() < 1e-9)
                {
                    cuts.push(u);
                }
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in cuts.windows(2) {
            let p0 = a + d * w[0];
            let p1 = a + d * w[1];
            let dir = p1 - p0;
            let corner = dev
                .tris
                .iter()
                .flat_map(|(tri, pts, _)| (0..3).map(move |v| (*tri, v, pts[v])))
                .find(|&(tri, v, p)| {
                    p.approx_eq_tol(p0, tol)
                        && base.is_singular_corner(tri, v)
                        && sector_contains(surface, tri, v, dir)
                })
                .ok_or_else(|| {
                    Error::Validation("boundary piece without a starting corner".into())
                })?;
            let end_class = dev
                .tris
                .iter()
                .flat_map(|(tri, pts, _)| (0..3).map(move |v| (*tri, v, pts[v])))
                .find(|&(_, _, p)| p.approx_eq_tol(p1, tol))
                .map(|(tri, v, _)| base.class_of(tri, v))
                .unwrap_or(usize::MAX);
            let raw = RawConnection {
                corner: (corner.0, corner.1),
                holonomy: dir,
                start_class: base.class_of(corner.0, corner.1),
                end_class,
            };
            out.push(realize(surface, &raw)?);
        }
    }
    Ok(out)
}

fn build_copy(
    surface: &TranslationSurface,
    q: &PlanarPolygon,
    dev: Developed,
) -> Result<ConvexCopy> {
    let (tol, _) = tolerances(q.diameter());
    let c = q.centroid()?;
    let boundary = boundary_connections(surface, q, &dev)?;
    let mut region = Vec::new();
    let mut placement = Vec::new();
    let mut centroid = None;
    for (tri, pts, piece) in &dev.tris {
        let chart = surface.chart(*tri);
        let to_chart = |p: Vec2| chart.points[0] + (p - pts[0]);
        region.push(RegionFragment {
            polygon: chart.polygon,
            vertices: piece.iter().map(|p| to_chart(*p)).collect(),
        });
        placement.push((*tri, pts[0] - c));
        if centroid.is_none()
            && PlanarPolygon::new(pts.to_vec()).is_ok_and(|t| t.contains_convex(c, tol))
        {
            centroid = Some(SurfacePoint::new(chart.polygon, to_chart(c)));
        }
    }
    let centroid =
        centroid.ok_or_else(|| Error::Validation("centroid outside developed copy".into()))?;
    region.sort_by(|a, b| {
        a.polygon.cmp(&b.polygon).then_with(|| {
            let ca = a.vertices.iter().fold(Vec2::ZERO, |s, p| s + *p);
            let cb = b.vertices.iter().fold(Vec2::ZERO, |s, p| s + *p);
            (ca.x, ca.y).partial_cmp(&(cb.x, cb.y)).unwrap()
        })
    });
    placement.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then((a.1.x, a.1.y).partial_cmp(&(b.1.x, b.1.y)).unwrap())
    });
    Ok(ConvexCopy {
        region,
        boundary,
        developed: q.translated(-c),
        centroid: surface.canonical_point(centroid)?,
        placement,
    })
}

fn same_region(a: &ConvexCopy, b: &ConvexCopy, tol: f64) -> bool {
    a.placement.len() == b.placement.len()
        && a.placement
            .iter()
            .zip(&b.placement)
            .all(|(x, y)| x.0 == y.0 && x.1.approx_eq_tol(y.1, tol))
}

/// All embedded copies of the convex polygon `p` whose boundary consists of
/// saddle connections, deduplicated and sorted by centroid.
pub fn find_copies(surface: &TranslationSurface, p: &PlanarPolygon) -> Result<Vec<ConvexCopy>> {
    if !surface.has_cone_points() {
        return Err(Error::NoConePoints);
    }
    if !p.is_convex() {
        return Err(Error::DegeneratePolygon(
            "target polygon is not convex".into(),
        ));
    }
    let (tol, _) = tolerances(p.diameter());
    if p.area() > surface.area() * (1.0 + 1e-9) {
        return Ok(Vec::new());
    }
    // Every copy contains an image of the anchor vertex and edge.
    let anchor = (0..p.len())
        .min_by(|&i, &j| p.edge(i).norm().partial_cmp(&p.edge(j).norm()).unwrap())
        .unwrap_or(0);
    let anchor_len = p.edge(anchor).norm();
    let raw = raw_connections(surface, anchor_len + tol)?;
    let mirror = p.transformed(&PlanarMatrix::reflection(0.0), Vec2::ZERO);
    // reflection reverses the vertex order; edge `anchor` of p becomes this one
    let mirror_anchor = (p.len() - 1 - anchor + p.len() - 1) % p.len();
    let shapes = [(p.clone(), anchor), (mirror, mirror_anchor)];

    let mut jobs: Vec<(RawConnection, usize)> = Vec::new();
    for c in &raw {
        for s in 0..shapes.len() {
            jobs.push((*c, s));
        }
    }
    let found: Vec<ConvexCopy> = jobs
        .par_iter()
        .filter_map(|&(c, s)| {
            let (shape, i) = (&shapes[s].0, shapes[s].1);
            let e = shape.edge(i);
            let rot = PlanarMatrix::rotation(c.holonomy.angle() - e.angle());
            let q = shape.transformed(&rot, -rot.apply(shape.vertex(i)));
            let dev = develop(surface, &q, c.corner.0, c.corner.1)?;
            Some(build_copy(surface, &q, dev))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut copies: Vec<ConvexCopy> = Vec::new();
    for c in found {
        if !copies.iter().any(|d| same_region(d, &c, tol)) {
            copies.push(c);
        }
    }
    copies.sort_by(|a, b| {
        point_order(&a.centroid, &b.centroid).then(a.placement.len().cmp(&b.placement.len()))
    });
    Ok(copies)
}

fn point_order(a: &SurfacePoint, b: &SurfacePoint) -> std::cmp::Ordering {
    let r = |x: f64| (x * 1e9).round();
    a.polygon
        .cmp(&b.polygon)
        .then(r(a.position.x).partial_cmp(&r(b.position.x)).unwrap())
        .then(r(a.position.y).partial_cmp(&r(b.position.y)).unwrap())
}

/// Distinct centroids of the copies of `p`, canonically ordered.
pub fn centroids(surface: &TranslationSurface, p: &PlanarPolygon) -> Result<Vec<SurfacePoint>> {
    let tol = 1e3 * epsilon() * (1.0 + p.diameter());
    let mut out: Vec<SurfacePoint> = Vec::new();
    for c in find_copies(surface, p)? {
        if !out.iter().any(|q| surface.same_point(*q, c.centroid, tol)) {
            out.push(c.centroid);
        }
    }
    out.sort_by(point_order);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_cyclic, build_dihedral};
    use crate::surface::examples::{regular_octagon, square_torus};
    use crate::tracing::distance_to_cone_set;

    fn contains_point(surface: &TranslationSurface, set: &[SurfacePoint], p: SurfacePoint) -> bool {
        set.iter().any(|q| surface.same_point(*q, p, 1e-7))
    }

    #[test]
    fn dihedral_four_squares() {
        let c = build_dihedral(4, 1.0, 0.27).unwrap();
        let sq = c.spec.square().unwrap();
        let copies = find_copies(&c.surface, &sq).unwrap();
        assert_eq!(copies.len(), 4);
        let cs = centroids(&c.surface, &sq).unwrap();
        assert_eq!(cs.len(), 4);
        for p in &c.p {
            assert!(contains_point(&c.surface, &cs, *p));
        }
        for copy in &copies {
            assert!((copy.area() - 0.27 * 0.27).abs() < 1e-12);
            let len: f64 = copy.boundary.iter().map(|s| s.length()).sum();
            assert!((len - 4.0 * 0.27).abs() < 1e-9);
        }
    }

    #[test]
    fn dihedral_four_central() {
        let c = build_dihedral(4, 1.0, 0.27).unwrap();
        let q1 = c.spec.central_polygon().unwrap();
        let cs = centroids(&c.surface, &q1).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(c.surface.same_point(cs[0], c.o, 1e-9));
    }

    #[test]
    fn odd_squares_split_at_midpoints() {
        let c = build_dihedral(3, 1.0, 0.27).unwrap();
        let sq = c.spec.square().unwrap();
        let cs = centroids(&c.surface, &sq).unwrap();
        assert_eq!(cs.len(), 6);
        for p in &c.p {
            assert!(contains_point(&c.surface, &cs, *p));
        }
        let copies = find_copies(&c.surface, &sq).unwrap();
        // crossed-glued squares carry singular midpoints on two sides
        assert!(copies.iter().any(|k| k.boundary.len() == 6));
        assert!(copies.iter().any(|k| k.boundary.len() == 4));
    }

    #[test]
    fn cyclic_squares() {
        let c = build_cyclic(4, 1.0, 0.27, 0.05).unwrap();
        let cs = centroids(&c.surface, &c.spec.square().unwrap()).unwrap();
        assert_eq!(cs.len(), 4);
        for p in &c.p {
            assert!(contains_point(&c.surface, &cs, *p));
        }
    }

    #[test]
    fn interiors_avoid_cone_points() {
        let c = build_dihedral(4, 1.0, 0.27).unwrap();
        for copy in find_copies(&c.surface, &c.spec.square().unwrap()).unwrap() {
            let d = distance_to_cone_set(&c.surface, copy.centroid, 1.0).unwrap();
            assert!((d - 0.27 / 2f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn octagon_single_copy() {
        let o = regular_octagon(1.0);
        let p = o.polygons()[0].clone();
        let copies = find_copies(&o, &p).unwrap();
        assert_eq!(copies.len(), 1);
        assert_eq!(copies[0].boundary.len(), 8);
    }

    #[test]
    fn oversized_and_errors() {
        let c = build_dihedral(4, 1.0, 0.27).unwrap();
        let big = PlanarPolygon::regular(3, 50.0, 0.0).unwrap();
        assert!(find_copies(&c.surface, &big).unwrap().is_empty());
        assert!(centroids(&c.surface, &big).unwrap().is_empty());
        let sq = PlanarPolygon::rectangle(0.5, 0.5).unwrap();
        assert!(matches!(
            find_copies(&square_torus(), &sq),
            Err(Error::NoConePoints)
        ));
    }
}
