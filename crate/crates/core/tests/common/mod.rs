//! Independent reference implementations used by the integration tests.
//!
//! Nothing here reuses the library's triangulation or unfolding: each polygon
//! is ear-clipped afresh, the triangles are glued from the public edge
//! pairing, and straight segments are found by developing crossing strips.

#![allow(dead_code)]

use flatveech::{GeodesicSegment, SurfacePoint, TranslationSurface, Vec2};

/// A triangle of the test triangulation, vertices counterclockwise.
#[derive(Clone, Debug)]
pub struct Tri {
    pub pts: [Vec2; 3],
    pub singular: [bool; 3],
    /// `(triangle, edge)` glued to edge `k` (from vertex `k` to `k + 1`).
    pub nbr: [(usize, usize); 3],
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    cross(b - a, c - a)
}

fn inside_closed(p: Vec2, a: Vec2, b: Vec2, c: Vec2) -> bool {
    let tol = 1e-12;
    orient(a, b, p) >= -tol && orient(b, c, p) >= -tol && orient(c, a, p) >= -tol
}

/// Ear clipping that keeps every polygon edge as a triangle edge.
/// Returns index triples into the vertex list.
fn ear_clip(v: &[Vec2]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    let mut out = Vec::new();
    while idx.len() > 3 {
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let (a, b, c) = (idx[(i + n - 1) % n], idx[i], idx[(i + 1) % n]);
            if orient(v[a], v[b], v[c]) <= 1e-12 {
                continue;
            }
            let blocked = idx
                .iter()
                .any(|&j| j != a && j != b && j != c && inside_closed(v[j], v[a], v[b], v[c]));
            if !blocked {
                out.push([a, b, c]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        assert!(clipped, "no ear found");
    }
    out.push([idx[0], idx[1], idx[2]]);
    out
}

pub fn triangulate(surface: &TranslationSurface) -> Vec<Tri> {
    let mut tris: Vec<Tri> = Vec::new();
    // (polygon, from vertex, to vertex) -> (triangle, edge)
    let mut edge_of: std::collections::HashMap<(usize, usize, usize), (usize, usize)> =
        std::collections::HashMap::new();
    let classes = surface.vertex_classes();
    for (pi, poly) in surface.polygons().iter().enumerate() {
        let v = poly.vertices();
        for [a, b, c] in ear_clip(v) {
            let t = tris.len();
            let ids = [a, b, c];
            let singular = ids.map(|i| classes[surface.vertex_class(pi, i)].singular);
            tris.push(Tri {
                pts: ids.map(|i| v[i]),
                singular,
                nbr: [(usize::MAX, 0); 3],
            });
            for k in 0..3 {
                edge_of.insert((pi, ids[k], ids[(k + 1) % 3]), (t, k));
            }
        }
    }
    let keys: Vec<_> = edge_of.keys().copied().collect();
    for (p, a, b) in keys {
        let here = edge_of[&(p, a, b)];
        if let Some(&there) = edge_of.get(&(p, b, a)) {
            tris[here.0].nbr[here.1] = there;
        }
    }
    for (x, y) in &surface.pairing().pairs {
        let nx = surface.polygons()[x.polygon].len();
        let ny = surface.polygons()[y.polygon].len();
        let ex = edge_of[&(x.polygon, x.edge, (x.edge + 1) % nx)];
        let ey = edge_of[&(y.polygon, y.edge, (y.edge + 1) % ny)];
        tris[ex.0].nbr[ex.1] = ey;
        tris[ey.0].nbr[ey.1] = ex;
    }
    assert!(tris.iter().all(|t| t.nbr.iter().all(|n| n.0 != usize::MAX)));
    tris
}

/// Places triangle `t` so that the start of its edge `e` sits at `at`.
fn place(t: &Tri, e: usize, at: Vec2) -> [Vec2; 3] {
    let shift = at - t.pts[e];
    t.pts.map(|p| p + shift)
}

struct Search<'a> {
    tris: &'a [Tri],
    bound: f64,
    found: Vec<Vec2>,
    crossed: Vec<(Vec2, Vec2)>,
    blockers: Vec<Vec2>,
}

impl Search<'_> {
    /// `pts`: developed triangle; the segment from the origin enters through
    /// edge `edge` within the closed window `[lo, hi]`.
    fn dfs(&mut self, tri: usize, pts: [Vec2; 3], edge: usize, lo: Vec2, hi: Vec2, depth: usize) {
        if depth > 400 {
            return;
        }
        let a = pts[edge];
        let b = pts[(edge + 1) % 3];
        if segment_distance(a, b) > self.bound {
            return;
        }
        let (nt, ne) = self.tris[tri].nbr[edge];
        let t = &self.tris[nt];
        // the glued edge runs from b to a in the neighbour
        let npts = place(t, ne, b);
        let far = (ne + 2) % 3;
        let w = npts[far];
        self.crossed.push((a, b));
        if t.singular[far] && w.norm() <= self.bound && self.visible(w, lo, hi) {
            self.found.push(w);
        }
        if t.singular[far] {
            self.blockers.push(w);
        }
        for e in [(ne + 1) % 3, far] {
            let p = npts[e];
            let q = npts[(e + 1) % 3];
            let r = if cross(lo, p) > 0.0 { p } else { lo };
            let l = if cross(q, hi) > 0.0 { q } else { hi };
            if cross(r, l) >= -1e-12 * r.norm() * l.norm() && orient(p, q, Vec2::ZERO) > 0.0 {
                self.dfs(nt, npts, e, r, l, depth + 1);
            }
        }
        if t.singular[far] {
            self.blockers.pop();
        }
        self.crossed.pop();
    }

    fn visible(&self, w: Vec2, lo: Vec2, hi: Vec2) -> bool {
        let tol = 1e-9;
        let n = w.norm();
        if cross(lo, w) < -tol * n * lo.norm() || cross(w, hi) < -tol * n * hi.norm() {
            return false;
        }
        for (a, b) in &self.crossed {
            if cross(*a, w) < -tol * a.norm() * n || cross(w, *b) < -tol * b.norm() * n {
                return false;
            }
        }
        !self.blockers.iter().any(|u| {
            let along = (u.x * w.x + u.y * w.y) / n;
            along > tol && along < n - tol && cross(w, *u).abs() <= tol * n
        })
    }
}

fn segment_distance(a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let len2 = d.x * d.x + d.y * d.y;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (-(a.x * d.x + a.y * d.y) / len2).clamp(0.0, 1.0)
    };
    (a + d * t).norm()
}

/// Holonomies of all oriented saddle connections of length at most `bound`,
/// one entry per connection and orientation.
pub fn oracle_holonomies(surface: &TranslationSurface, bound: f64) -> Vec<Vec2> {
    let tris = triangulate(surface);
    let mut all = Vec::new();
    for (ti, t) in tris.iter().enumerate() {
        for k in 0..3 {
            if !t.singular[k] {
                continue;
            }
            let pts = place(t, k, Vec2::ZERO);
            let lo = pts[(k + 1) % 3];
            let hi = pts[(k + 2) % 3];
            let mut s = Search {
                tris: &tris,
                bound,
                found: Vec::new(),
                crossed: Vec::new(),
                blockers: Vec::new(),
            };
            if t.singular[(k + 1) % 3] {
                s.blockers.push(lo);
                if lo.norm() <= bound {
                    s.found.push(lo);
                }
            }
            if t.singular[(k + 2) % 3] {
                s.blockers.push(hi);
            }
            s.dfs(ti, pts, (k + 1) % 3, lo, hi, 0);
            // directions are half-open at `hi`, which belongs to the next corner
            let mut mine: Vec<Vec2> = Vec::new();
            for w in s.found {
                let on_hi = cross(w, hi).abs() <= 1e-9 * w.norm() * hi.norm()
                    && (w.x * hi.x + w.y * hi.y) > 0.0;
                if on_hi {
                    continue;
                }
                if !mine
                    .iter()
                    .any(|m| (*m - w).norm() <= 1e-7 * w.norm().max(1.0))
                {
                    mine.push(w);
                }
            }
            all.extend(mine);
        }
    }
    sort_vectors(&mut all);
    all
}

pub fn sort_vectors(v: &mut [Vec2]) {
    v.sort_by(|a, b| {
        let ka = (a.norm(), a.y.atan2(a.x));
        let kb = (b.norm(), b.y.atan2(b.x));
        ka.partial_cmp(&kb).unwrap()
    });
}

/// Multiset equality of two vector lists up to `tol`.
pub fn same_vectors(a: &[Vec2], b: &[Vec2], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(
        |x| match (0..b.len()).find(|&j| !used[j] && (b[j] - *x).norm() <= tol) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        },
    )
}

/// The surface point halfway along a traced segment.
pub fn midpoint(seg: &GeodesicSegment) -> SurfacePoint {
    let half = seg.length / 2.0;
    let mut walked = 0.0;
    for p in &seg.pieces {
        let l = (p.end - p.start).norm();
        if walked + l >= half {
            let t = if l == 0.0 { 0.0 } else { (half - walked) / l };
            return SurfacePoint::new(p.polygon, p.start + (p.end - p.start) * t);
        }
        walked += l;
    }
    let last = seg.pieces.last().expect("non-empty segment");
    SurfacePoint::new(last.polygon, last.end)
}

/// Index of the point of `set` equal to `p` on the surface, if any.
pub fn find_point(
    surface: &TranslationSurface,
    set: &[SurfacePoint],
    p: SurfacePoint,
    tol: f64,
) -> Option<usize> {
    set.iter().position(|q| surface.same_point(*q, p, tol))
}
