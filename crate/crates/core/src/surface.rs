//! Translation surfaces presented as polygons with edges glued by translations.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{epsilon, orient, point_segment_distance, PlanarPolygon, Vec2};
use crate::tri::{ear_clip, FlatTriangulation, HalfEdge, Triangle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub polygon: usize,
    pub edge: usize,
}

impl EdgeRef {
    pub const fn new(polygon: usize, edge: usize) -> Self {
        Self { polygon, edge }
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.polygon, self.edge)
    }
}

/// Unordered pairs of glued edges.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EdgePairing {
    pub pairs: Vec<(EdgeRef, EdgeRef)>,
}

impl EdgePairing {
    pub fn new(pairs: Vec<(EdgeRef, EdgeRef)>) -> Self {
        Self { pairs }
    }

    pub fn push(&mut self, a: EdgeRef, b: EdgeRef) {
        self.pairs.push((a, b));
    }

    /// Pairs each edge of every polygon with the unique other edge that is
    /// parallel, opposite and congruent; `None` if some edge has zero or
    /// several such partners.
    pub fn by_unique_parallel(polygons: &[PlanarPolygon]) -> Option<Self> {
        let all: Vec<EdgeRef> = polygons
            .iter()
            .enumerate()
            .flat_map(|(p, poly)| (0..poly.len()).map(move |e| EdgeRef::new(p, e)))
            .collect();
        let vec = |r: &EdgeRef| polygons[r.polygon].edge(r.edge);
        let mut pairs = Vec::new();
        for (i, a) in all.iter().enumerate() {
            let partners: Vec<&EdgeRef> = all
                .iter()
                .filter(|b| *b != a && (vec(a) + vec(b)).is_zero())
                .collect();
            if partners.len() != 1 {
                return None;
            }
            let b = partners[0];
            if all[..i].contains(b) {
                continue;
            }
            pairs.push((*a, *b));
        }
        Some(Self { pairs })
    }
}

/// A point given in the chart of one polygon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub polygon: usize,
    pub position: Vec2,
}

impl SurfacePoint {
    pub const fn new(polygon: usize, position: Vec2) -> Self {
        Self { polygon, position }
    }
}

impl fmt::Display for SurfacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} {}", self.polygon, self.position)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub name: String,
    pub point: SurfacePoint,
}

/// Identified polygon corners with their total angle.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexClass {
    /// `(polygon, vertex)` pairs, sorted.
    pub corners: Vec<(usize, usize)>,
    pub angle: f64,
    /// Whether the class is a point of the singular set: cone angle other
    /// than `2pi`, or designated by the caller.
    pub singular: bool,
}

impl VertexClass {
    pub fn is_flat(&self) -> bool {
        (self.angle - 2.0 * PI).abs() <= epsilon() * self.corners.len() as f64 * 10.0
    }
}

/// Where the base triangulation's triangle sits inside its polygon.
#[derive(Clone, Debug)]
pub(crate) struct BaseChart {
    pub polygon: usize,
    pub points: [Vec2; 3],
}

#[derive(Clone, Debug)]
pub struct TranslationSurface {
    polygons: Vec<PlanarPolygon>,
    pairing: EdgePairing,
    partner: Vec<Vec<EdgeRef>>,
    classes: Vec<VertexClass>,
    vertex_class: Vec<Vec<usize>>,
    marked: Vec<MarkedPoint>,
    designated: Vec<(usize, usize)>,
    base: FlatTriangulation,
    charts: Vec<BaseChart>,
    /// Base triangles of each polygon.
    poly_tris: Vec<Vec<usize>>,
}

/// Validates and assembles a surface with no designated extra points.
pub fn build_surface(
    polygons: Vec<PlanarPolygon>,
    pairing: EdgePairing,
) -> Result<TranslationSurface> {
    TranslationSurface::new(polygons, pairing, &[], Vec::new())
}

impl TranslationSurface {
    /// Validates and assembles a surface.
    ///
    /// `designated` lists polygon corners whose vertex classes join the
    /// singular set even when their total angle is exactly `2pi`.
    pub fn new(
        polygons: Vec<PlanarPolygon>,
        pairing: EdgePairing,
        designated: &[(usize, usize)],
        marked: Vec<MarkedPoint>,
    ) -> Result<Self> {
        let partner = validate_pairing(&polygons, &pairing)?;
        let (classes, vertex_class) = vertex_classes(&polygons, &partner, designated)?;
        let mut surface = Self {
            polygons,
            pairing,
            partner,
            classes,
            vertex_class,
            marked: Vec::new(),
            designated: designated.to_vec(),
            base: FlatTriangulation {
                tris: Vec::new(),
                singular: Vec::new(),
            },
            charts: Vec::new(),
            poly_tris: Vec::new(),
        };
        surface.build_base();
        for m in marked {
            let p = surface.canonical_point(m.point)?;
            surface.marked.push(MarkedPoint {
                name: m.name,
                point: p,
            });
        }
        Ok(surface)
    }

    fn build_base(&mut self) {
        let mut tris: Vec<Triangle> = Vec::new();
        let mut charts = Vec::new();
        let mut poly_tris = vec![Vec::new(); self.polygons.len()];
        // (polygon, vertex a, vertex b) of each directed triangle edge, for
        // matching diagonals.
        let mut directed: BTreeMap<(usize, usize, usize), HalfEdge> = BTreeMap::new();
        let mut boundary: BTreeMap<EdgeRef, HalfEdge> = BTreeMap::new();
        for (p, poly) in self.polygons.iter().enumerate() {
            let n = poly.len();
            for t in ear_clip(poly) {
                let id = tris.len();
                let pts = [poly.vertex(t[0]), poly.vertex(t[1]), poly.vertex(t[2])];
                for k in 0..3 {
                    let a = t[k];
                    let b = t[(k + 1) % 3];
                    if b == (a + 1) % n {
                        boundary.insert(EdgeRef::new(p, a), HalfEdge::new(id, k));
                    } else {
                        directed.insert((p, a, b), HalfEdge::new(id, k));
                    }
                }
                tris.push(Triangle {
                    edges: [pts[1] - pts[0], pts[2] - pts[1], pts[0] - pts[2]],
                    glued: [HalfEdge::new(usize::MAX, 0); 3],
                    class: [
                        self.vertex_class[p][t[0]],
                        self.vertex_class[p][t[1]],
                        self.vertex_class[p][t[2]],
                    ],
                });
                charts.push(BaseChart {
                    polygon: p,
                    points: pts,
                });
                poly_tris[p].push(id);
            }
        }
        for (&(p, a, b), &h) in &directed {
            let other = directed[&(p, b, a)];
            tris[h.tri].glued[h.edge] = other;
        }
        for (&e, &h) in &boundary {
            let other = boundary[&self.partner[e.polygon][e.edge]];
            tris[h.tri].glued[h.edge] = other;
        }
        self.base = FlatTriangulation {
            tris,
            singular: self.classes.iter().map(|c| c.singular).collect(),
        };
        self.charts = charts;
        self.poly_tris = poly_tris;
    }

    pub fn polygons(&self) -> &[PlanarPolygon] {
        &self.polygons
    }

    pub fn pairing(&self) -> &EdgePairing {
        &self.pairing
    }

    /// The edge glued to `e`.
    pub fn partner(&self, e: EdgeRef) -> EdgeRef {
        self.partner[e.polygon][e.edge]
    }

    pub fn vertex_classes(&self) -> &[VertexClass] {
        &self.classes
    }

    pub fn vertex_class(&self, polygon: usize, vertex: usize) -> usize {
        self.vertex_class[polygon][vertex % self.polygons[polygon].len()]
    }

    /// Polygon corners designated as singular at construction.
    pub fn designated(&self) -> &[(usize, usize)] {
        &self.designated
    }

    pub fn marked_points(&self) -> &[MarkedPoint] {
        &self.marked
    }

    pub fn marked(&self, name: &str) -> Option<SurfacePoint> {
        self.marked.iter().find(|m| m.name == name).map(|m| m.point)
    }

    /// Indices of singular vertex classes.
    pub fn singular_classes(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&c| self.classes[c].singular)
            .collect()
    }

    pub fn has_cone_points(&self) -> bool {
        self.classes.iter().any(|c| c.singular)
    }

    pub fn edge_count(&self) -> usize {
        self.pairing.pairs.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.classes.len() as i64 - self.edge_count() as i64 + self.polygons.len() as i64
    }

    pub fn genus(&self) -> usize {
        ((2 - self.euler_characteristic()) / 2) as usize
    }

    pub fn area(&self) -> f64 {
        self.polygons.iter().map(PlanarPolygon::area).sum()
    }

    /// Sum over vertex classes of `angle - 2pi`, next to `2pi (2g - 2)`.
    pub fn gauss_bonnet(&self) -> (f64, f64) {
        let lhs = self.classes.iter().map(|c| c.angle - 2.0 * PI).sum();
        let rhs = 2.0 * PI * (2.0 * self.genus() as f64 - 2.0);
        (lhs, rhs)
    }

    /// One entry per singular class: canonical position and total angle.
    pub fn cone_points(&self) -> Vec<(SurfacePoint, f64)> {
        self.classes
            .iter()
            .filter(|c| c.singular)
            .map(|c| {
                let (p, v) = c.corners[0];
                (SurfacePoint::new(p, self.polygons[p].vertex(v)), c.angle)
            })
            .collect()
    }

    pub(crate) fn base(&self) -> &FlatTriangulation {
        &self.base
    }

    pub(crate) fn chart(&self, tri: usize) -> &BaseChart {
        &self.charts[tri]
    }

    /// Base triangle containing `p` and the offset of `p` from its vertex 0.
    pub(crate) fn locate(&self, p: SurfacePoint) -> Result<(usize, Vec2)> {
        let tris = self
            .poly_tris
            .get(p.polygon)
            .ok_or_else(|| Error::PointOffSurface(p.to_string()))?;
        let tol = 10.0 * epsilon();
        let mut best: Option<(f64, usize)> = None;
        for &t in tris {
            let pts = self.charts[t].points;
            let worst = (0..3)
                .map(|k| {
                    let a = pts[k];
                    let b = pts[(k + 1) % 3];
                    orient(a, b, p.position) / (b - a).norm()
                })
                .fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(w, _)| worst > w) {
                best = Some((worst, t));
            }
        }
        match best {
            Some((w, t)) if w >= -tol => Ok((t, p.position - self.charts[t].points[0])),
            _ => Err(Error::PointOffSurface(p.to_string())),
        }
    }

    /// Canonical representative: vertices map to the smallest corner of their
    /// class, edge points to the smallest `(polygon, edge, parameter)`.
    pub fn canonical_point(&self, p: SurfacePoint) -> Result<SurfacePoint> {
        let poly = self
            .polygons
            .get(p.polygon)
            .ok_or_else(|| Error::PointOffSurface(p.to_string()))?;
        let tol = 10.0 * epsilon();
        for v in 0..poly.len() {
            if poly.vertex(v).approx_eq_tol(p.position, tol) {
                let class = &self.classes[self.vertex_class[p.polygon][v]];
                let (cp, cv) = class.corners[0];
                return Ok(SurfacePoint::new(cp, self.polygons[cp].vertex(cv)));
            }
        }
        for e in 0..poly.len() {
            let (a, b) = poly.edge_points(e);
            if point_segment_distance(p.position, a, b) <= tol {
                let t = (p.position - a).dot(b - a) / (b - a).norm2();
                let other = self.partner[p.polygon][e];
                let candidates = [(p.polygon, e, t), (other.polygon, other.edge, 1.0 - t)];
                let (cp, ce, ct) = candidates
                    .into_iter()
                    .min_by(|x, y| {
                        (x.0, x.1)
                            .cmp(&(y.0, y.1))
                            .then(x.2.partial_cmp(&y.2).unwrap())
                    })
                    .unwrap();
                let (ca, cb) = self.polygons[cp].edge_points(ce);
                return Ok(SurfacePoint::new(cp, ca.lerp(cb, ct)));
            }
        }
        self.locate(p)?;
        Ok(p)
    }

    /// Equality of surface points up to the edge identifications.
    pub fn same_point(&self, a: SurfacePoint, b: SurfacePoint, tol: f64) -> bool {
        match (self.canonical_point(a), self.canonical_point(b)) {
            (Ok(x), Ok(y)) => x.polygon == y.polygon && x.position.approx_eq_tol(y.position, tol),
            _ => false,
        }
    }

    /// Vertex class at `p`, if `p` is a polygon vertex.
    pub fn vertex_at(&self, p: SurfacePoint) -> Option<usize> {
        let poly = self.polygons.get(p.polygon)?;
        let tol = 10.0 * epsilon();
        (0..poly.len())
            .find(|&v| poly.vertex(v).approx_eq_tol(p.position, tol))
            .map(|v| self.vertex_class[p.polygon][v])
    }
}

fn validate_pairing(
    polygons: &[PlanarPolygon],
    pairing: &EdgePairing,
) -> Result<Vec<Vec<EdgeRef>>> {
    let sentinel = EdgeRef::new(usize::MAX, usize::MAX);
    let mut partner: Vec<Vec<EdgeRef>> = polygons.iter().map(|p| vec![sentinel; p.len()]).collect();
    let eps = epsilon();
    for &(a, b) in &pairing.pairs {
        for r in [a, b] {
            let ok = polygons.get(r.polygon).is_some_and(|p| r.edge < p.len())
                && partner[r.polygon][r.edge] == sentinel;
            if !ok {
                return Err(Error::BadEdgeRef {
                    polygon: r.polygon,
                    edge: r.edge,
                });
            }
            if a == b {
                return Err(Error::BadEdgeRef {
                    polygon: a.polygon,
                    edge: a.edge,
                });
            }
        }
        let u = polygons[a.polygon].edge(a.edge);
        let v = polygons[b.polygon].edge(b.edge);
        let scale = u.norm().max(v.norm()).max(1.0);
        if (u.norm() - v.norm()).abs() > eps * scale {
            // Distinguish length mismatch from a direction mismatch.
            if u.normalized().dot(v.normalized()) < -1.0 + eps {
                return Err(Error::IncongruentPair(a.to_string(), b.to_string()));
            }
            return Err(Error::NonParallelPair(a.to_string(), b.to_string()));
        }
        if !(u + v).approx_eq_tol(Vec2::ZERO, eps * scale) {
            return Err(Error::NonParallelPair(a.to_string(), b.to_string()));
        }
        partner[a.polygon][a.edge] = b;
        partner[b.polygon][b.edge] = a;
    }
    for (p, row) in partner.iter().enumerate() {
        if let Some(e) = row.iter().position(|r| *r == sentinel) {
            return Err(Error::UnpairedEdge {
                polygon: p,
                edge: e,
            });
        }
    }
    Ok(partner)
}

fn vertex_classes(
    polygons: &[PlanarPolygon],
    partner: &[Vec<EdgeRef>],
    designated: &[(usize, usize)],
) -> Result<(Vec<VertexClass>, Vec<Vec<usize>>)> {
    let offsets: Vec<usize> = polygons
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.len();
            Some(o)
        })
        .collect();
    let total: usize = polygons.iter().map(PlanarPolygon::len).sum();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let corner = |p: usize, v: usize| offsets[p] + v % polygons[p].len();
    for (p, row) in partner.iter().enumerate() {
        for (e, other) in row.iter().enumerate() {
            // The translation sends the start of e to the end of its partner.
            let pairs = [
                (corner(p, e), corner(other.polygon, other.edge + 1)),
                (corner(p, e + 1), corner(other.polygon, other.edge)),
            ];
            for (x, y) in pairs {
                let rx = find(&mut parent, x);
                let ry = find(&mut parent, y);
                if rx != ry {
                    parent[rx.max(ry)] = rx.min(ry);
                }
            }
        }
    }
    let mut label: BTreeMap<usize, usize> = BTreeMap::new();
    let mut classes: Vec<VertexClass> = Vec::new();
    let mut vertex_class: Vec<Vec<usize>> = polygons.iter().map(|p| vec![0; p.len()]).collect();
    for (p, poly) in polygons.iter().enumerate() {
        for v in 0..poly.len() {
            let root = find(&mut parent, corner(p, v));
            let next = label.len();
            let id = *label.entry(root).or_insert(next);
            if id == classes.len() {
                classes.push(VertexClass {
                    corners: Vec::new(),
                    angle: 0.0,
                    singular: false,
                });
            }
            classes[id].corners.push((p, v));
            classes[id].angle += poly.interior_angle(v);
            vertex_class[p][v] = id;
        }
    }
    let eps = epsilon();
    for (i, c) in classes.iter_mut().enumerate() {
        let turns = c.angle / (2.0 * PI);
        let tol = 10.0 * eps * c.corners.len() as f64;
        if turns.round() < 1.0 || (c.angle - 2.0 * PI * turns.round()).abs() > tol {
            return Err(Error::BadConeAngle {
                class: i,
                angle: c.angle,
            });
        }
        c.singular = !c.is_flat();
    }
    for &(p, v) in designated {
        let id = vertex_class
            .get(p)
            .and_then(|row| row.get(v))
            .copied()
            .ok_or(Error::BadEdgeRef {
                polygon: p,
                edge: v,
            })?;
        classes[id].singular = true;
    }
    Ok((classes, vertex_class))
}

/// Standard examples used across tests, docs and the CLI.
pub mod examples {
    use super::*;

    /// Unit square with opposite sides glued.
    pub fn square_torus() -> TranslationSurface {
        let sq = PlanarPolygon::rectangle(1.0, 1.0).unwrap();
        build_surface(
            vec![sq],
            EdgePairing::new(vec![
                (EdgeRef::new(0, 0), EdgeRef::new(0, 2)),
                (EdgeRef::new(0, 1), EdgeRef::new(0, 3)),
            ]),
        )
        .unwrap()
    }

    /// Regular octagon with the given side, opposite sides glued, centred at
    /// the origin.
    pub fn regular_octagon(side: f64) -> TranslationSurface {
        let oct = PlanarPolygon::regular(8, side, PI / 8.0).unwrap();
        let pairs = (0..4)
            .map(|i| (EdgeRef::new(0, i), EdgeRef::new(0, i + 4)))
            .collect();
        TranslationSurface::new(
            vec![oct],
            EdgePairing::new(pairs),
            &[],
            vec![MarkedPoint {
                name: "O".into(),
                point: SurfacePoint::new(0, Vec2::ZERO),
            }],
        )
        .unwrap()
    }
}
