//! Delaunay triangulations of translation surfaces with vertices at the
//! singular set, and the canonical cell decomposition obtained by merging
//! co-circular triangles.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{epsilon, incircle, orient, PlanarMatrix, Vec2};
use crate::surface::{SurfacePoint, TranslationSurface};
use crate::tri::{FlatTriangulation, HalfEdge, Triangle};

/// A point carried through flips: triangle index and offset from the
/// triangle's first vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Tracked {
    pub tri: usize,
    pub offset: Vec2,
}

/// Delaunay triangulation of a translation surface.
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub(crate) mesh: FlatTriangulation,
    pub(crate) class_angles: Vec<f64>,
}

impl Triangulation {
    pub fn triangle_count(&self) -> usize {
        self.mesh.tris.len()
    }

    pub fn edge_count(&self) -> usize {
        3 * self.mesh.tris.len() / 2
    }

    /// Number of distinct vertex classes used by the triangles.
    pub fn vertex_count(&self) -> usize {
        let mut seen = vec![false; self.mesh.singular.len()];
        for t in &self.mesh.tris {
            for &c in &t.class {
                seen[c] = true;
            }
        }
        seen.iter().filter(|&&s| s).count()
    }

    /// Edge vectors of triangle `t` (edge `k` from vertex `k` to `k + 1`).
    pub fn triangle(&self, t: usize) -> [Vec2; 3] {
        self.mesh.tris[t].edges
    }

    /// Triangle and edge glued to edge `k` of triangle `t`.
    pub fn adjacent(&self, t: usize, k: usize) -> (usize, usize) {
        let h = self.mesh.tris[t].glued[k];
        (h.tri, h.edge)
    }

    /// Vertex classes (of the source surface) at the corners of `t`.
    pub fn vertex_classes(&self, t: usize) -> [usize; 3] {
        self.mesh.tris[t].class
    }

    pub fn cone_angle(&self, class: usize) -> f64 {
        self.class_angles[class]
    }

    /// Largest violation of the empty-circumdisk condition over all edges,
    /// scaled to be dimensionless.
    pub fn delaunay_defect(&self) -> f64 {
        let mut worst: f64 = f64::NEG_INFINITY;
        for t in 0..self.mesh.tris.len() {
            for k in 0..3 {
                let (v, scale) = edge_incircle(&self.mesh, t, k);
                worst = worst.max(v / scale.powi(4));
            }
        }
        worst
    }

    pub fn is_delaunay(&self) -> bool {
        self.delaunay_defect() <= tie_tol()
    }

    pub(crate) fn check(&self) -> Result<()> {
        self.mesh.check().map_err(Error::Validation)
    }
}

fn tie_tol() -> f64 {
    100.0 * epsilon()
}

/// Incircle value across edge `(t, k)` and the length scale of the quad.
fn edge_incircle(mesh: &FlatTriangulation, t: usize, k: usize) -> (f64, f64) {
    let pts = mesh.tris[t].points_with(k, Vec2::ZERO);
    let (_, opp) = mesh.develop_across(&pts, k, t);
    let h = mesh.tris[t].glued[k];
    let d = opp[(h.edge + 2) % 3];
    let (a, b, c) = (pts[k], pts[(k + 1) % 3], pts[(k + 2) % 3]);
    let scale = [b - a, c - b, a - c, d - a, d - b]
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    (incircle(a, b, c, d), scale)
}

struct Mesh {
    ft: FlatTriangulation,
    alive: Vec<bool>,
}

impl Mesh {
    fn glued(&self, h: HalfEdge) -> HalfEdge {
        self.ft.glued(h)
    }

    /// Flips edge `(t, k)` if the quad around it is strictly convex.
    fn flip(&mut self, t: usize, k: usize, points: &mut [Tracked]) -> bool {
        let h = self.glued(HalfEdge::new(t, k));
        let (t2, j) = (h.tri, h.edge);
        if t2 == t {
            return false;
        }
        let pts_t = self.ft.tris[t].points_with(k, Vec2::ZERO);
        let (_, pts_u) = self.ft.develop_across(&pts_t, k, t);
        let a = pts_t[k];
        let b = pts_t[(k + 1) % 3];
        let c = pts_t[(k + 2) % 3];
        let d = pts_u[(j + 2) % 3];
        let scale = (b - a).norm().max((d - c).norm());
        let tol = 10.0 * epsilon() * scale * scale;
        if orient(c, a, d) <= tol || orient(d, b, c) <= tol {
            return false;
        }
        let ta = &self.ft.tris[t];
        let tu = &self.ft.tris[t2];
        let (ca, cb, cc) = (ta.class[k], ta.class[(k + 1) % 3], ta.class[(k + 2) % 3]);
        let cd = tu.class[(j + 2) % 3];
        let old = [
            HalfEdge::new(t, (k + 2) % 3),
            HalfEdge::new(t2, (j + 1) % 3),
            HalfEdge::new(t2, (j + 2) % 3),
            HalfEdge::new(t, (k + 1) % 3),
        ];
        let new = [
            HalfEdge::new(t, 0),
            HalfEdge::new(t, 1),
            HalfEdge::new(t2, 0),
            HalfEdge::new(t2, 1),
        ];
        let partners: Vec<HalfEdge> = old.iter().map(|&o| self.glued(o)).collect();
        let remap = |x: HalfEdge| old.iter().position(|&o| o == x).map_or(x, |i| new[i]);

        self.ft.tris[t] = Triangle {
            edges: [a - c, d - a, c - d],
            glued: [HalfEdge::new(0, 0); 3],
            class: [cc, ca, cd],
        };
        self.ft.tris[t2] = Triangle {
            edges: [b - d, c - b, d - c],
            glued: [HalfEdge::new(0, 0); 3],
            class: [cd, cb, cc],
        };
        self.ft.tris[t].glued[2] = HalfEdge::new(t2, 2);
        self.ft.tris[t2].glued[2] = HalfEdge::new(t, 2);
        for i in 0..4 {
            let p = remap(partners[i]);
            self.ft.tris[new[i].tri].glued[new[i].edge] = p;
            self.ft.tris[p.tri].glued[p.edge] = new[i];
        }

        for p in points.iter_mut() {
            let pos = if p.tri == t {
                pts_t[0] + p.offset
            } else if p.tri == t2 {
                pts_u[0] + p.offset
            } else {
                continue;
            };
            if orient(d, c, pos) >= 0.0 {
                *p = Tracked {
                    tri: t,
                    offset: pos - c,
                };
            } else {
                *p = Tracked {
                    tri: t2,
                    offset: pos - d,
                };
            }
        }
        true
    }

    fn corners_around(&self, t: usize, k: usize) -> Vec<(usize, usize)> {
        let mut out = vec![(t, k)];
        let mut cur = self.ft.next_corner_ccw(t, k);
        while cur != (t, k) {
            out.push(cur);
            cur = self.ft.next_corner_ccw(cur.0, cur.1);
        }
        out
    }

    fn find_corner(&self, class: usize) -> Option<(usize, usize)> {
        (0..self.ft.tris.len())
            .filter(|&t| self.alive[t])
            .flat_map(|t| (0..3).map(move |k| (t, k)))
            .find(|&(t, k)| self.ft.tris[t].class[k] == class)
    }

    /// Removes a vertex of total angle `2pi`: once its star is an embedded
    /// disk the star is replaced by a triangulation of its link, otherwise
    /// edges at the vertex are flipped away first.
    fn remove_flat_vertex(&mut self, class: usize, points: &mut [Tracked]) -> Result<()> {
        let mut guard = 0;
        while let Some((t, k)) = self.find_corner(class) {
            guard += 1;
            if guard > 100_000 {
                return Err(Error::Validation(
                    "flat vertex removal did not terminate".into(),
                ));
            }
            let star = self.corners_around(t, k);
            let distinct = {
                let mut ts: Vec<usize> = star.iter().map(|c| c.0).collect();
                ts.sort_unstable();
                ts.dedup();
                ts.len() == star.len()
            };
            if distinct && self.retriangulate_link(&star, points) {
                continue;
            }
            // Only flips whose new diagonal avoids the vertex lower its degree.
            let flipped = star.iter().any(|&(ct, ck)| {
                let h = self.glued(HalfEdge::new(ct, ck));
                let c_cls = self.ft.tris[ct].class[(ck + 2) % 3];
                let d_cls = self.ft.tris[h.tri].class[(h.edge + 2) % 3];
                c_cls != class && d_cls != class && self.flip(ct, ck, points)
            });
            if !flipped {
                return Err(Error::Validation(
                    "no flippable edge at a flat vertex".into(),
                ));
            }
        }
        Ok(())
    }

    /// Replaces the star of a flat vertex by an ear-clipped triangulation of
    /// its link polygon. Returns `false` if the link cannot be triangulated.
    fn retriangulate_link(&mut self, star: &[(usize, usize)], points: &mut [Tracked]) -> bool {
        let d = star.len();
        let frames: Vec<[Vec2; 3]> = star
            .iter()
            .map(|&(t, k)| self.ft.tris[t].points_with(k, Vec2::ZERO))
            .collect();
        let link: Vec<Vec2> = star
            .iter()
            .zip(&frames)
            .map(|(&(_, k), f)| f[(k + 1) % 3])
            .collect();
        let classes: Vec<usize> = star
            .iter()
            .map(|&(t, k)| self.ft.tris[t].class[(k + 1) % 3])
            .collect();
        let opp: Vec<HalfEdge> = star
            .iter()
            .map(|&(t, k)| HalfEdge::new(t, (k + 1) % 3))
            .collect();
        let Some(ears) = clip_ears(&link) else {
            return false;
        };
        let slots: Vec<usize> = star.iter().map(|c| c.0).take(d - 2).collect();
        let partners: Vec<HalfEdge> = opp.iter().map(|&o| self.glued(o)).collect();

        let mut outer: Vec<HalfEdge> = vec![HalfEdge::new(0, 0); d];
        let mut diagonals: HashMap<(usize, usize), HalfEdge> = HashMap::new();
        let mut new_tris: Vec<Triangle> = Vec::with_capacity(d - 2);
        for (j, tri) in ears.iter().enumerate() {
            let mut t = Triangle {
                edges: [0, 1, 2].map(|e| link[tri[(e + 1) % 3]] - link[tri[e]]),
                glued: [HalfEdge::new(0, 0); 3],
                class: tri.map(|i| classes[i]),
            };
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                let here = HalfEdge::new(slots[j], e);
                if b == (a + 1) % d {
                    outer[a] = here;
                } else if let Some(&other) = diagonals.get(&(b, a)) {
                    t.glued[e] = other;
                    new_tris[other.tri_index(&slots)].glued[other.edge] = here;
                } else {
                    diagonals.insert((a, b), here);
                }
            }
            new_tris.push(t);
        }
        for p in points.iter_mut() {
            if let Some(i) = star.iter().position(|c| c.0 == p.tri) {
                let pos = frames[i][0] + p.offset;
                let j = (0..ears.len())
                    .max_by(|&x, &y| {
                        min_side(&link, &ears[x], pos)
                            .partial_cmp(&min_side(&link, &ears[y], pos))
                            .unwrap()
                    })
                    .unwrap();
                *p = Tracked {
                    tri: slots[j],
                    offset: pos - link[ears[j][0]],
                };
            }
        }
        for (j, t) in new_tris.into_iter().enumerate() {
            self.ft.tris[slots[j]] = t;
        }
        let remap = |x: HalfEdge| opp.iter().position(|&o| o == x).map_or(x, |i| outer[i]);
        for i in 0..d {
            let p = remap(partners[i]);
            let h = outer[i];
            self.ft.tris[h.tri].glued[h.edge] = p;
            self.ft.tris[p.tri].glued[p.edge] = h;
        }
        for &(t, _) in &star[d - 2..] {
            self.alive[t] = false;
        }
        true
    }

    fn make_delaunay(&mut self, points: &mut [Tracked]) -> Result<()> {
        let mut stack: Vec<HalfEdge> = (0..self.ft.tris.len())
            .filter(|&t| self.alive[t])
            .flat_map(|t| (0..3).map(move |k| HalfEdge::new(t, k)))
            .collect();
        let tol = tie_tol();
        let mut guard = 0usize;
        while let Some(h) = stack.pop() {
            guard += 1;
            if guard > 10_000_000 {
                return Err(Error::Validation("Delaunay flips did not terminate".into()));
            }
            if !self.alive[h.tri] {
                continue;
            }
            let (v, scale) = edge_incircle(&self.ft, h.tri, h.edge);
            if v <= tol * scale.powi(4) {
                continue;
            }
            let t2 = self.glued(h).tri;
            if self.flip(h.tri, h.edge, points) {
                for t in [h.tri, t2] {
                    for k in 0..2 {
                        stack.push(HalfEdge::new(t, k));
                    }
                }
            }
        }
        Ok(())
    }

    fn compact(mut self, points: &mut [Tracked]) -> FlatTriangulation {
        let mut index = vec![usize::MAX; self.ft.tris.len()];
        let mut n = 0;
        for (t, &a) in self.alive.iter().enumerate() {
            if a {
                index[t] = n;
                n += 1;
            }
        }
        let tris: Vec<Triangle> = std::mem::take(&mut self.ft.tris)
            .into_iter()
            .enumerate()
            .filter(|(t, _)| self.alive[*t])
            .map(|(_, mut tr)| {
                for g in tr.glued.iter_mut() {
                    g.tri = index[g.tri];
                }
                tr
            })
            .collect();
        for p in points.iter_mut() {
            p.tri = index[p.tri];
        }
        FlatTriangulation {
            tris,
            singular: self.ft.singular,
        }
    }
}

/// Delaunay triangulation with vertex set the singular set, carrying the
/// given points along.
pub(crate) fn delaunay_with_points(
    surface: &TranslationSurface,
    points: &[SurfacePoint],
) -> Result<(Triangulation, Vec<Tracked>)> {
    let base = surface.base().clone();
    let classes = surface.vertex_classes();
    if classes.is_empty() {
        return Err(Error::NoVertices);
    }
    let mut tracked: Vec<Tracked> = points
        .iter()
        .map(|&p| {
            surface
                .locate(p)
                .map(|(tri, offset)| Tracked { tri, offset })
        })
        .collect::<Result<_>>()?;
    let mut mesh = Mesh {
        alive: vec![true; base.tris.len()],
        ft: base,
    };
    let keep_one = !surface.has_cone_points();
    for (c, class) in classes.iter().enumerate() {
        if class.singular || (keep_one && c == 0) {
            continue;
        }
        mesh.remove_flat_vertex(c, &mut tracked)?;
    }
    mesh.make_delaunay(&mut tracked)?;
    let ft = mesh.compact(&mut tracked);
    let tri = Triangulation {
        mesh: ft,
        class_angles: classes.iter().map(|c| c.angle).collect(),
    };
    tri.check()?;
    Ok((tri, tracked))
}

/// Delaunay triangulation whose vertices are the singular points (or the
/// single vertex class of a surface without singular points).
pub fn delaunay_triangulation(surface: &TranslationSurface) -> Result<Triangulation> {
    delaunay_with_points(surface, &[]).map(|(t, _)| t)
}

/// Applies `m` to every triangle (reversing orientation when `det m < 0`),
/// then restores the Delaunay condition.
pub(crate) fn transform(
    tri: &Triangulation,
    m: &PlanarMatrix,
    points: &[Tracked],
) -> Result<(Triangulation, Vec<Tracked>)> {
    let flip = m.det() < 0.0;
    let tris: Vec<Triangle> = tri
        .mesh
        .tris
        .iter()
        .map(|t| {
            if !flip {
                Triangle {
                    edges: t.edges.map(|e| m.apply(e)),
                    glued: t.glued,
                    class: t.class,
                }
            } else {
                // vertex order (0, 2, 1); new edge i is old edge 2 - i reversed
                let re = |k: usize| 2 - k;
                Triangle {
                    edges: [0, 1, 2].map(|i| -m.apply(t.edges[re(i)])),
                    glued: [0, 1, 2].map(|i| {
                        let g = t.glued[re(i)];
                        HalfEdge::new(g.tri, re(g.edge))
                    }),
                    class: [t.class[0], t.class[2], t.class[1]],
                }
            }
        })
        .collect();
    let mut pts: Vec<Tracked> = points
        .iter()
        .map(|p| Tracked {
            tri: p.tri,
            offset: m.apply(p.offset),
        })
        .collect();
    let mut mesh = Mesh {
        alive: vec![true; tris.len()],
        ft: FlatTriangulation {
            tris,
            singular: tri.mesh.singular.clone(),
        },
    };
    mesh.make_delaunay(&mut pts)?;
    let ft = mesh.compact(&mut pts);
    let out = Triangulation {
        mesh: ft,
        class_angles: tri.class_angles.clone(),
    };
    out.check()?;
    Ok((out, pts))
}

/// A cell of the Delaunay decomposition: a convex polygon inscribed in a
/// circle, made of co-circular triangles.
#[derive(Clone, Debug)]
pub(crate) struct Cell {
    /// Vertex positions, counterclockwise, in the cell's frame.
    pub verts: Vec<Vec2>,
    pub classes: Vec<usize>,
    /// Cell and edge glued to each edge.
    pub glued: Vec<(usize, usize)>,
}

impl Cell {
    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn edge(&self, i: usize) -> Vec2 {
        self.verts[(i + 1) % self.len()] - self.verts[i]
    }
}

#[derive(Clone, Debug)]
pub(crate) struct CellComplex {
    pub cells: Vec<Cell>,
    /// For each triangle: its cell and the position of its first vertex in
    /// the cell's frame.
    pub tri_cell: Vec<(usize, Vec2)>,
}

impl CellComplex {
    pub fn build(tri: &Triangulation) -> Result<Self> {
        let mesh = &tri.mesh;
        let n = mesh.tris.len();
        let tol = tie_tol();
        let mut tri_cell: Vec<Option<(usize, Vec2)>> = vec![None; n];
        let mut tree: Vec<[bool; 3]> = vec![[false; 3]; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for root in 0..n {
            if tri_cell[root].is_some() {
                continue;
            }
            let cell = members.len();
            members.push(vec![root]);
            tri_cell[root] = Some((cell, Vec2::ZERO));
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(t) = queue.pop_front() {
                let pts = mesh.tris[t].points(tri_cell[t].unwrap().1);
                for k in 0..3 {
                    let (v, scale) = edge_incircle(mesh, t, k);
                    if v.abs() > tol * scale.powi(4) {
                        continue;
                    }
                    let h = mesh.tris[t].glued[k];
                    if tri_cell[h.tri].is_some() {
                        continue;
                    }
                    let (_, npts) = mesh.develop_across(&pts, k, t);
                    tri_cell[h.tri] = Some((cell, npts[0]));
                    tree[t][k] = true;
                    tree[h.tri][h.edge] = true;
                    members[cell].push(h.tri);
                    queue.push_back(h.tri);
                }
            }
        }
        let tri_cell: Vec<(usize, Vec2)> = tri_cell.into_iter().map(Option::unwrap).collect();

        // Boundary half-edges of each cell, ordered by the angle of their start
        // vertex around the common circumcentre.
        let mut cells: Vec<Cell> = Vec::with_capacity(members.len());
        let mut slot: HashMap<HalfEdge, (usize, usize)> = HashMap::new();
        let mut cell_edges: Vec<Vec<HalfEdge>> = Vec::new();
        for (ci, mem) in members.iter().enumerate() {
            let root_pts = mesh.tris[mem[0]].points(tri_cell[mem[0]].1);
            let centre = circumcentre(root_pts[0], root_pts[1], root_pts[2]);
            let mut bd: Vec<(f64, HalfEdge, Vec2, Vec2, usize)> = Vec::new();
            for &t in mem {
                let pts = mesh.tris[t].points(tri_cell[t].1);
                for k in 0..3 {
                    if !tree[t][k] {
                        let a = pts[k];
                        let b = pts[(k + 1) % 3];
                        bd.push((
                            (a - centre).angle(),
                            HalfEdge::new(t, k),
                            a,
                            b,
                            mesh.tris[t].class[k],
                        ));
                    }
                }
            }
            bd.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            let m = bd.len();
            let scale = bd.iter().map(|e| (e.3 - e.2).norm()).fold(0.0, f64::max);
            for i in 0..m {
                if !bd[i]
                    .3
                    .approx_eq_tol(bd[(i + 1) % m].2, 1e3 * epsilon() * (1.0 + scale))
                {
                    return Err(Error::Validation("Delaunay cell is not a disk".into()));
                }
            }
            for (i, e) in bd.iter().enumerate() {
                slot.insert(e.1, (ci, i));
            }
            cell_edges.push(bd.iter().map(|e| e.1).collect());
            cells.push(Cell {
                verts: bd.iter().map(|e| e.2).collect(),
                classes: bd.iter().map(|e| e.4).collect(),
                glued: Vec::new(),
            });
        }
        for (ci, edges) in cell_edges.iter().enumerate() {
            cells[ci].glued = edges.iter().map(|&h| slot[&mesh.glued(h)]).collect();
        }
        Ok(Self { cells, tri_cell })
    }

    /// Position of a tracked point in its cell's frame.
    pub fn locate(&self, p: &Tracked) -> (usize, Vec2) {
        let (c, base) = self.tri_cell[p.tri];
        (c, base + p.offset)
    }

    /// Whether two cell-frame points are the same point of the surface.
    pub fn same_point(&self, a: (usize, Vec2), b: (usize, Vec2), tol: f64) -> bool {
        let va = self.vertex_class_at(a, tol);
        let vb = self.vertex_class_at(b, tol);
        match (va, vb) {
            (Some(x), Some(y)) => return x == y,
            (Some(_), None) | (None, Some(_)) => return false,
            _ => {}
        }
        let reps_a = self.representations(a, tol);
        let reps_b = self.representations(b, tol);
        reps_a.iter().any(|x| {
            reps_b
                .iter()
                .any(|y| x.0 == y.0 && x.1.approx_eq_tol(y.1, tol))
        })
    }

    fn vertex_class_at(&self, p: (usize, Vec2), tol: f64) -> Option<usize> {
        let cell = &self.cells[p.0];
        cell.verts
            .iter()
            .position(|v| v.approx_eq_tol(p.1, tol))
            .map(|i| cell.classes[i])
    }

    /// The point itself plus its images across any cell edge it lies on.
    fn representations(&self, p: (usize, Vec2), tol: f64) -> Vec<(usize, Vec2)> {
        let mut out = vec![p];
        let cell = &self.cells[p.0];
        for i in 0..cell.len() {
            let a = cell.verts[i];
            let b = cell.verts[(i + 1) % cell.len()];
            if crate::geom::point_segment_distance(p.1, a, b) <= tol {
                let u = (p.1 - a).dot(b - a) / (b - a).norm2();
                let (oc, oe) = cell.glued[i];
                let other = &self.cells[oc];
                let qa = other.verts[oe];
                let qb = other.verts[(oe + 1) % other.len()];
                out.push((oc, qb + (qa - qb) * u));
            }
        }
        out
    }
}

trait SlotIndex {
    fn tri_index(&self, slots: &[usize]) -> usize;
}

impl SlotIndex for HalfEdge {
    fn tri_index(&self, slots: &[usize]) -> usize {
        slots.iter().position(|&s| s == self.tri).unwrap()
    }
}

/// Signed distance of `p` inside triangle `tri` of `pts` (minimum over edges).
fn min_side(pts: &[Vec2], tri: &[usize; 3], p: Vec2) -> f64 {
    (0..3)
        .map(|e| {
            let a = pts[tri[e]];
            let b = pts[tri[(e + 1) % 3]];
            orient(a, b, p) / (b - a).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Ear clipping of a simple counterclockwise polygon given as points;
/// collinear vertices are allowed but never used as ear tips.
fn clip_ears(pts: &[Vec2]) -> Option<Vec<[usize; 3]>> {
    let scale = pts.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
    let tol = 10.0 * epsilon() * scale * scale;
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut out = Vec::new();
    while idx.len() > 3 {
        let m = idx.len();
        let mut best: Option<(f64, usize)> = None;
        for i in 0..m {
            let (a, b, c) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            if orient(pts[a], pts[b], pts[c]) <= tol {
                continue;
            }
            let blocked = idx.iter().any(|&o| {
                o != a && o != b && o != c && {
                    let p = pts[o];
                    orient(pts[a], pts[b], p) >= -tol
                        && orient(pts[b], pts[c], p) >= -tol
                        && orient(pts[c], pts[a], p) >= -tol
                }
            });
            if blocked {
                continue;
            }
            let q = min_angle(pts[a], pts[b], pts[c]);
            if best.is_none_or(|(bq, _)| q > bq) {
                best = Some((q, i));
            }
        }
        let (_, i) = best?;
        out.push([idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]]);
        idx.remove(i);
    }
    if orient(pts[idx[0]], pts[idx[1]], pts[idx[2]]) <= tol {
        return None;
    }
    out.push([idx[0], idx[1], idx[2]]);
    Some(out)
}

fn min_angle(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    let ang = |p: Vec2, q: Vec2, r: Vec2| (q - p).cross(r - p).atan2((q - p).dot(r - p)).abs();
    ang(a, b, c).min(ang(b, c, a)).min(ang(c, a, b))
}

fn circumcentre(a: Vec2, b: Vec2, c: Vec2) -> Vec2 {
    let b = b - a;
    let c = c - a;
    let d = 2.0 * b.cross(c);
    let ux = (c.y * b.norm2() - b.y * c.norm2()) / d;
    let uy = (b.x * c.norm2() - c.x * b.norm2()) / d;
    a + Vec2::new(ux, uy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_cyclic, build_dihedral};
    use crate::surface::examples::{regular_octagon, square_torus};

    #[test]
    fn torus_two_triangles() {
        let t = delaunay_triangulation(&square_torus()).unwrap();
        assert_eq!(t.triangle_count(), 2);
        assert_eq!(t.vertex_count(), 1);
        assert!(t.is_delaunay());
        let cx = CellComplex::build(&t).unwrap();
        assert_eq!(cx.cells.len(), 1);
        assert_eq!(cx.cells[0].len(), 4);
    }

    #[test]
    fn octagon_euler_count() {
        let o = regular_octagon(1.0);
        let t = delaunay_triangulation(&o).unwrap();
        let g = o.genus() as i64;
        let (v, e, f) = (
            t.vertex_count() as i64,
            t.edge_count() as i64,
            t.triangle_count() as i64,
        );
        assert_eq!(v - e + f, 2 - 2 * g);
        assert_eq!((v, e, f), (1, 9, 6));
        assert!(t.is_delaunay());
    }

    #[test]
    fn constructions_are_delaunay() {
        for c in [
            build_dihedral(3, 1.0, 0.27).unwrap(),
            build_dihedral(4, 1.0, 0.27).unwrap(),
            build_cyclic(5, 1.0, 0.27, 0.1).unwrap(),
        ] {
            let t = delaunay_triangulation(&c.surface).unwrap();
            assert!(t.is_delaunay());
            let sing = c.surface.singular_classes().len() as i64;
            let g = c.surface.genus() as i64;
            assert_eq!(t.vertex_count() as i64, sing);
            assert_eq!(
                sing - t.edge_count() as i64 + t.triangle_count() as i64,
                2 - 2 * g
            );
            let area: f64 = t.mesh.tris.iter().map(|x| x.area()).sum();
            assert!((area - c.surface.area()).abs() < 1e-9);
            CellComplex::build(&t).unwrap();
        }
    }

    #[test]
    fn tracked_points_survive() {
        let c = build_dihedral(3, 1.0, 0.27).unwrap();
        let mut pts = vec![c.o];
        pts.extend(c.p.iter().copied());
        let (t, tracked) = delaunay_with_points(&c.surface, &pts).unwrap();
        let cx = CellComplex::build(&t).unwrap();
        let locs: Vec<(usize, Vec2)> = tracked.iter().map(|p| cx.locate(p)).collect();
        for i in 0..locs.len() {
            for j in 0..locs.len() {
                assert_eq!(cx.same_point(locs[i], locs[j], 1e-7), i == j);
            }
        }
    }
}
