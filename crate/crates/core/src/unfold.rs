//! Visibility unfolding: develop triangles around a base point inside
//! angular wedges, reporting every triangulation vertex that is visible in a
//! straight line. Wedges are expanded nearest-first.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geom::{epsilon, orient, Vec2};
use crate::tri::FlatTriangulation;

/// A developed triangle around the origin, used to seed the search.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Seed {
    pub tri: usize,
    /// Vertex positions relative to the base point.
    pub points: [Vec2; 3],
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Hit {
    /// Developed position of the vertex relative to the base point.
    pub position: Vec2,
    pub class: usize,
}

#[derive(Clone, Copy, Debug)]
struct Wedge {
    right: Vec2,
    left: Vec2,
    right_closed: bool,
    left_closed: bool,
}

#[derive(Clone, Copy, Debug)]
struct Task {
    dist: f64,
    seq: u64,
    wedge: Wedge,
    /// Triangle whose edge `edge` is crossed; its developed points.
    tri: usize,
    edge: usize,
    points: [Vec2; 3],
}

impl PartialEq for Task {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Task {}
impl PartialOrd for Task {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Task {
    // Min-heap on distance, FIFO on ties.
    fn cmp(&self, o: &Self) -> Ordering {
        o.dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then(o.seq.cmp(&self.seq))
    }
}

/// Control flow for the visitor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Stop,
}

fn angle_tol() -> f64 {
    100.0 * epsilon()
}

/// Normalised cross product: sine of the angle from `a` to `b`.
#[inline]
fn side(a: Vec2, b: Vec2) -> f64 {
    a.cross(b) / (a.norm() * b.norm())
}

impl Wedge {
    /// Whether direction `v` is inside, honouring boundary closure.
    fn contains(&self, v: Vec2) -> bool {
        let tol = angle_tol();
        let sr = side(self.right, v);
        let sl = side(v, self.left);
        // Wedges are narrower than pi, so the two sine tests suffice once we
        // know `v` is on the same side as the wedge's interior.
        if v.dot(self.right) < 0.0 && v.dot(self.left) < 0.0 {
            return false;
        }
        let right_ok = if sr.abs() <= tol {
            self.right_closed && v.dot(self.right) > 0.0
        } else {
            sr > 0.0
        };
        let left_ok = if sl.abs() <= tol {
            self.left_closed && v.dot(self.left) > 0.0
        } else {
            sl > 0.0
        };
        right_ok && left_ok
    }

    fn is_degenerate(&self) -> bool {
        side(self.right, self.left) <= angle_tol() && self.right.dot(self.left) > 0.0
    }

    /// Distance from the origin to the part of segment `p..q` inside the
    /// wedge, or `None` if the wedge misses the segment.
    fn clipped_distance(&self, p: Vec2, q: Vec2) -> Option<f64> {
        let d = q - p;
        // cross(right, p + u d) >= 0  and  cross(p + u d, left) >= 0
        let mut lo: f64 = 0.0;
        let mut hi: f64 = 1.0;
        let tol = 1e-12;
        for (c0, c1) in [
            (self.right.cross(p), self.right.cross(d)),
            (p.cross(self.left), d.cross(self.left)),
        ] {
            if c1.abs() < 1e-300 {
                if c0 < -tol * (p.norm() + 1.0) {
                    return None;
                }
            } else {
                let u = -c0 / c1;
                if c1 > 0.0 {
                    lo = lo.max(u);
                } else {
                    hi = hi.min(u);
                }
            }
        }
        let slack = 1e-9;
        if lo > hi + slack {
            return None;
        }
        let (lo, hi) = (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0));
        let a = p + d * lo.min(hi);
        let b = p + d * hi.max(lo);
        Some(crate::geom::point_segment_distance(Vec2::ZERO, a, b))
    }
}

/// Runs the unfolding from the given seeds, reporting visible vertices within
/// `radius` to `visit`. Every seed edge whose supporting line avoids the
/// origin spawns a wedge.
pub(crate) fn unfold(
    tri: &FlatTriangulation,
    seeds: &[Seed],
    radius: f64,
    mut visit: impl FnMut(&Hit) -> Flow,
) {
    let eps = epsilon();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for s in seeds {
        for k in 0..3 {
            let a = s.points[k];
            let b = s.points[(k + 1) % 3];
            let scale = (b - a).norm();
            if orient(a, b, Vec2::ZERO) <= 10.0 * eps * scale {
                continue;
            }
            let wedge = Wedge {
                right: a,
                left: b,
                right_closed: !tri.is_singular_corner(s.tri, k),
                left_closed: false,
            };
            // Report the right endpoint if it is not the base point itself.
            if a.norm() > 10.0 * eps && a.norm() <= radius + eps {
                let hit = Hit {
                    position: a,
                    class: tri.class_of(s.tri, k),
                };
                if visit(&hit) == Flow::Stop {
                    return;
                }
            }
            if let Some(dist) = wedge.clipped_distance(a, b) {
                if dist <= radius + eps {
                    heap.push(Task {
                        dist,
                        seq,
                        wedge,
                        tri: s.tri,
                        edge: k,
                        points: s.points,
                    });
                    seq += 1;
                }
            }
        }
    }

    while let Some(task) = heap.pop() {
        let (next, pts) = tri.develop_across(&task.points, task.edge, task.tri);
        let h = tri.glued(crate::tri::HalfEdge::new(task.tri, task.edge));
        let j = h.edge;
        let w = pts[(j + 2) % 3];
        let w_class = tri.class_of(next, (j + 2) % 3);
        let w_singular = tri.singular[w_class];
        let wg = task.wedge;

        let inside = wg.contains(w);
        if inside && w.norm() <= radius + eps {
            let hit = Hit {
                position: w,
                class: w_class,
            };
            if visit(&hit) == Flow::Stop {
                return;
            }
        }

        let tol = angle_tol();
        let sr = side(wg.right, w);
        let sl = side(w, wg.left);
        let mut children: Vec<(Wedge, usize)> = Vec::with_capacity(2);
        let closed_at_w = !w_singular;
        if sr > tol && sl > tol {
            // strictly inside: split
            children.push((
                Wedge {
                    right: wg.right,
                    left: w,
                    right_closed: wg.right_closed,
                    left_closed: closed_at_w,
                },
                (j + 1) % 3,
            ));
            children.push((
                Wedge {
                    right: w,
                    left: wg.left,
                    right_closed: closed_at_w,
                    left_closed: wg.left_closed,
                },
                (j + 2) % 3,
            ));
        } else if sr <= tol {
            // w at or right of the right boundary: everything passes w..b.
            let on_boundary = sr >= -tol;
            children.push((
                Wedge {
                    right: wg.right,
                    left: wg.left,
                    right_closed: wg.right_closed && !(on_boundary && w_singular),
                    left_closed: wg.left_closed,
                },
                (j + 2) % 3,
            ));
        } else {
            let on_boundary = sl >= -tol;
            children.push((
                Wedge {
                    right: wg.right,
                    left: wg.left,
                    right_closed: wg.right_closed,
                    left_closed: wg.left_closed && !(on_boundary && w_singular),
                },
                (j + 1) % 3,
            ));
        }
        for (wedge, edge) in children {
            if wedge.is_degenerate() && !(wedge.right_closed && wedge.left_closed) {
                continue;
            }
            let p = pts[edge];
            let q = pts[(edge + 1) % 3];
            if let Some(dist) = wedge.clipped_distance(p, q) {
                if dist <= radius + eps {
                    heap.push(Task {
                        dist,
                        seq,
                        wedge,
                        tri: next,
                        edge,
                        points: pts,
                    });
                    seq += 1;
                }
            }
        }
    }
}

/// Seeds for a base point at corner `corner` of triangle `tri`: every corner
/// of the same vertex, walked counterclockwise.
pub(crate) fn corner_seeds(tri: &FlatTriangulation, t: usize, k: usize) -> Vec<Seed> {
    let mut seeds = Vec::new();
    let (mut ct, mut ck) = (t, k);
    loop {
        seeds.push(Seed {
            tri: ct,
            points: tri.tris[ct].points_with(ck, Vec2::ZERO),
        });
        let (nt, nk) = tri.next_corner_ccw(ct, ck);
        if (nt, nk) == (t, k) {
            break;
        }
        ct = nt;
        ck = nk;
    }
    seeds
}
