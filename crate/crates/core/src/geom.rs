//! Planar primitives: tolerance-aware vectors, 2x2 matrices and polygons.
//!
//! Every comparison in the crate goes through [`epsilon`], a process-wide
//! tolerance that defaults to `1e-9` and can be overridden once at start-up
//! with [`set_epsilon`].

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default geometric tolerance.
pub const DEFAULT_EPSILON: f64 = 1e-9;

static EPSILON_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Current global tolerance.
#[inline]
pub fn epsilon() -> f64 {
    f64::from_bits(EPSILON_BITS.load(Ordering::Relaxed))
}

/// Overrides the global tolerance. Non-positive or non-finite values are ignored.
pub fn set_epsilon(eps: f64) {
    if eps.is_finite() && eps > 0.0 {
        EPSILON_BITS.store(eps.to_bits(), Ordering::Relaxed);
    }
}

#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= epsilon()
}

#[inline]
pub fn approx_zero(a: f64) -> bool {
    a.abs() <= epsilon()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at the given polar angle.
    #[inline]
    pub fn from_angle(angle: f64) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    /// Polar angle in `(-pi, pi]`.
    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    #[inline]
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn approx_eq(self, o: Vec2) -> bool {
        self.approx_eq_tol(o, epsilon())
    }

    #[inline]
    pub fn approx_eq_tol(self, o: Vec2, tol: f64) -> bool {
        (self.x - o.x).abs() <= tol && (self.y - o.y).abs() <= tol
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.norm() <= epsilon()
    }

    #[inline]
    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.x, self.y)
    }
}

/// Signed area test: positive when `a, b, c` turn counterclockwise.
#[inline]
pub fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

/// Positive when `d` lies strictly inside the circumcircle of the
/// counterclockwise triangle `a, b, c`.
pub fn incircle(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> f64 {
    let (ax, ay) = (a.x - d.x, a.y - d.y);
    let (bx, by) = (b.x - d.x, b.y - d.y);
    let (cx, cy) = (c.x - d.x, c.y - d.y);
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx)
}

/// Distance from `p` to the closed segment `a..b`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm2();
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// A real 2x2 matrix `[[a, b], [c, d]]` acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl PlanarMatrix {
    pub const IDENTITY: PlanarMatrix = PlanarMatrix::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, -s, s, c)
    }

    /// Reflection across the line through the origin at polar angle `axis`.
    pub fn reflection(axis: f64) -> Self {
        let (s, c) = (2.0 * axis).sin_cos();
        Self::new(c, s, s, -c)
    }

    /// Matrix whose columns are `u` and `v`.
    pub fn from_columns(u: Vec2, v: Vec2) -> Self {
        Self::new(u.x, v.x, u.y, v.y)
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    #[inline]
    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.abs() <= epsilon() {
            return None;
        }
        Some(Self::new(
            self.d / det,
            -self.b / det,
            -self.c / det,
            self.a / det,
        ))
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    pub fn approx_eq_tol(&self, o: &PlanarMatrix, tol: f64) -> bool {
        (self.a - o.a).abs() <= tol
            && (self.b - o.b).abs() <= tol
            && (self.c - o.c).abs() <= tol
            && (self.d - o.d).abs() <= tol
    }

    pub fn approx_eq(&self, o: &PlanarMatrix) -> bool {
        self.approx_eq_tol(o, epsilon())
    }

    /// Largest entry of `M^T M - I` in absolute value.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.transpose() * *self;
        (g.a - 1.0)
            .abs()
            .max(g.b.abs())
            .max(g.c.abs())
            .max((g.d - 1.0).abs())
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonality_defect() <= epsilon()
    }

    /// For an orthogonal matrix: rotation angle in `[0, 2pi)` when `det = 1`,
    /// twice the axis angle in `[0, 2pi)` when `det = -1`.
    pub fn orthogonal_angle(&self) -> f64 {
        let ang = self.c.atan2(self.a);
        if ang < 0.0 {
            ang + 2.0 * PI
        } else {
            ang
        }
    }
}

impl Mul for PlanarMatrix {
    type Output = PlanarMatrix;
    fn mul(self, o: PlanarMatrix) -> PlanarMatrix {
        PlanarMatrix::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl fmt::Display for PlanarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{:.6}, {:.6}], [{:.6}, {:.6}]]",
            self.a, self.b, self.c, self.d
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Elliptic / parabolic / hyperbolic trichotomy by trace.
///
/// `+-I` have finite order and are reported as elliptic. With `det = -1`
/// the class is read off `M^2 = tr(M) M + I`: trace zero gives an involution
/// (elliptic), any other trace makes `M^2` hyperbolic.
pub fn classify_matrix(m: &PlanarMatrix) -> Result<MatrixClass> {
    let eps = epsilon();
    let det = m.det();
    if (det.abs() - 1.0).abs() > eps {
        return Err(Error::NonUnitDeterminant(det));
    }
    if det < 0.0 {
        return Ok(if m.trace().abs() <= eps {
            MatrixClass::Elliptic
        } else {
            MatrixClass::Hyperbolic
        });
    }
    if m.approx_eq(&PlanarMatrix::IDENTITY) || m.approx_eq(&PlanarMatrix::new(-1.0, 0.0, 0.0, -1.0))
    {
        return Ok(MatrixClass::Elliptic);
    }
    let t = m.trace().abs();
    Ok(if t < 2.0 - eps {
        MatrixClass::Elliptic
    } else if t <= 2.0 + eps {
        MatrixClass::Parabolic
    } else {
        MatrixClass::Hyperbolic
    })
}

/// The matrix `M` with `M u1 = v1` and `M u2 = v2`, if it has `|det| = 1`.
pub fn solve_pair_map(u1: Vec2, u2: Vec2, v1: Vec2, v2: Vec2) -> Result<Option<PlanarMatrix>> {
    let scale = u1.norm() * u2.norm();
    let cross = u1.cross(u2);
    if scale == 0.0 || cross.abs() <= epsilon() * scale.max(1.0) {
        return Err(Error::DependentInput);
    }
    let source = PlanarMatrix::from_columns(u1, u2);
    let target = PlanarMatrix::from_columns(v1, v2);
    let inv = source.inverse().ok_or(Error::DependentInput)?;
    let m = target * inv;
    if (m.det().abs() - 1.0).abs() > epsilon() {
        return Ok(None);
    }
    Ok(Some(m))
}

/// Simple counterclockwise polygon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarPolygon {
    vertices: Vec<Vec2>,
}

impl PlanarPolygon {
    /// Validates orientation, vertex count and simplicity.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegeneratePolygon("fewer than three vertices".into()));
        }
        let p = Self { vertices };
        let eps = epsilon();
        if p.signed_area() <= eps * eps {
            return Err(Error::DegeneratePolygon(
                "non-positive signed area (vertices must be counterclockwise)".into(),
            ));
        }
        let n = p.len();
        for i in 0..n {
            if p.vertex(i).approx_eq(p.vertex(i + 1)) {
                return Err(Error::DegeneratePolygon(format!("repeated vertex {i}")));
            }
        }
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = p.edge_points(i);
                let (c, d) = p.edge_points(j);
                if segments_intersect(a, b, c, d) {
                    return Err(Error::DegeneratePolygon(format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(p)
    }

    /// Regular polygon with the given side, centred at the origin, first
    /// vertex at polar angle `phase`.
    pub fn regular(n: usize, side: f64, phase: f64) -> Result<Self> {
        let r = side / (2.0 * (PI / n as f64).sin());
        Self::new(
            (0..n)
                .map(|k| Vec2::from_angle(phase + 2.0 * PI * k as f64 / n as f64) * r)
                .collect(),
        )
    }

    pub fn rectangle(w: f64, h: f64) -> Result<Self> {
        Self::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(w, 0.0),
            Vec2::new(w, h),
            Vec2::new(0.0, h),
        ])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// Vertex `i mod n`.
    #[inline]
    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.vertices.len()]
    }

    #[inline]
    pub fn edge_points(&self, i: usize) -> (Vec2, Vec2) {
        (self.vertex(i), self.vertex(i + 1))
    }

    /// Edge `i` as a vector from vertex `i` to vertex `i + 1`.
    #[inline]
    pub fn edge(&self, i: usize) -> Vec2 {
        self.vertex(i + 1) - self.vertex(i)
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.len();
        0.5 * (0..n)
            .map(|i| self.vertex(i).cross(self.vertex(i + 1)))
            .sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Interior angle at vertex `i`, in `(0, 2pi)`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.len();
        let into = self.edge(i + n - 1);
        let out = self.edge(i);
        let turn = into.cross(out).atan2(into.dot(out));
        PI - turn
    }

    pub fn is_convex(&self) -> bool {
        let eps = epsilon();
        (0..self.len()).all(|i| self.interior_angle(i) <= PI + eps)
    }

    pub fn is_strictly_convex(&self) -> bool {
        let eps = epsilon();
        (0..self.len()).all(|i| self.interior_angle(i) < PI - eps)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    /// Area centroid of the enclosed region.
    pub fn centroid(&self) -> Result<Vec2> {
        let eps = epsilon();
        let area = self.signed_area();
        if area.abs() <= eps * eps {
            return Err(Error::DegeneratePolygon("zero area".into()));
        }
        // Shift to the first vertex to keep the sums well conditioned.
        let o = self.vertex(0);
        let mut acc = Vec2::ZERO;
        for i in 0..self.len() {
            let p = self.vertex(i) - o;
            let q = self.vertex(i + 1) - o;
            let w = p.cross(q);
            acc += (p + q) * w;
        }
        Ok(o + acc * (1.0 / (6.0 * area)))
    }

    /// Image under `x -> m x + t`; reverses vertex order when `det m < 0` so
    /// the result stays counterclockwise.
    pub fn transformed(&self, m: &PlanarMatrix, t: Vec2) -> PlanarPolygon {
        let mut vs: Vec<Vec2> = self.vertices.iter().map(|v| m.apply(*v) + t).collect();
        if m.det() < 0.0 {
            vs.reverse();
        }
        PlanarPolygon { vertices: vs }
    }

    pub fn translated(&self, t: Vec2) -> PlanarPolygon {
        PlanarPolygon {
            vertices: self.vertices.iter().map(|v| *v + t).collect(),
        }
    }

    /// Closed containment test with tolerance; valid for convex polygons.
    pub fn contains_convex(&self, p: Vec2, tol: f64) -> bool {
        (0..self.len()).all(|i| {
            let (a, b) = self.edge_points(i);
            orient(a, b, p) >= -tol * (b - a).norm()
        })
    }

    /// Strict interior test (at least `tol` from every edge); convex polygons.
    pub fn strictly_contains_convex(&self, p: Vec2, tol: f64) -> bool {
        (0..self.len()).all(|i| {
            let (a, b) = self.edge_points(i);
            orient(a, b, p) > tol * (b - a).norm()
        })
    }

    pub fn on_boundary(&self, p: Vec2, tol: f64) -> bool {
        (0..self.len()).any(|i| {
            let (a, b) = self.edge_points(i);
            point_segment_distance(p, a, b) <= tol
        })
    }
}

/// Proper or touching intersection of closed segments `a..b` and `c..d`.
pub fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let eps = epsilon();
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
    {
        return true;
    }
    point_segment_distance(a, c, d) <= eps
        || point_segment_distance(b, c, d) <= eps
        || point_segment_distance(c, a, b) <= eps
        || point_segment_distance(d, a, b) <= eps
}

/// An isometry `x -> linear x + translation` carrying `p` onto `q` with the
/// cyclic vertex structure respected, if one exists.
///
/// Orientation-preserving matches are tried before reflections, and vertex
/// offsets in increasing order; the first match wins.
pub fn congruence_map(p: &PlanarPolygon, q: &PlanarPolygon) -> Option<(PlanarMatrix, Vec2)> {
    congruence_maps(p, q).into_iter().next()
}

/// Every isometry carrying `p` onto `q`, in the canonical search order.
pub fn congruence_maps(p: &PlanarPolygon, q: &PlanarPolygon) -> Vec<(PlanarMatrix, Vec2)> {
    let n = p.len();
    let mut out = Vec::new();
    if n != q.len() {
        return out;
    }
    let tol = 10.0 * epsilon() * (1.0 + p.diameter());
    if (p.area() - q.area()).abs() > tol * (1.0 + p.diameter()) {
        return out;
    }
    for reflect in [false, true] {
        // With a reflection the image of p runs clockwise, so q is read
        // backwards: p_i maps to q_{(offset - i) mod n}.
        for offset in 0..n {
            let qi = |i: usize| {
                if reflect {
                    q.vertex((offset + n - (i % n)) % n)
                } else {
                    q.vertex(offset + i)
                }
            };
            let u = p.edge(0);
            let v = qi(1) - qi(0);
            if (u.norm() - v.norm()).abs() > tol {
                continue;
            }
            let ang = v.angle() - u.angle();
            let m = if reflect {
                PlanarMatrix::rotation(v.angle())
                    * PlanarMatrix::reflection(0.0)
                    * PlanarMatrix::rotation(-u.angle())
            } else {
                PlanarMatrix::rotation(ang)
            };
            let t = qi(0) - m.apply(p.vertex(0));
            if (0..n).all(|i| (m.apply(p.vertex(i)) + t).approx_eq_tol(qi(i), tol)) {
                out.push((m, t));
            }
        }
    }
    out
}

/// Sutherland-Hodgman clip of a convex polygon (given as points) by a convex
/// counterclockwise clip polygon. May return fewer than three points.
pub fn clip_convex(subject: &[Vec2], clip: &[Vec2]) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if out.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % n];
        let input = std::mem::take(&mut out);
        let m = input.len();
        for j in 0..m {
            let cur = input[j];
            let prev = input[(j + m - 1) % m];
            let cin = orient(a, b, cur) >= 0.0;
            let pin = orient(a, b, prev) >= 0.0;
            if cin {
                if !pin {
                    out.push(line_intersection(prev, cur, a, b));
                }
                out.push(cur);
            } else if pin {
                out.push(line_intersection(prev, cur, a, b));
            }
        }
    }
    out
}

fn line_intersection(p: Vec2, q: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let r = q - p;
    let s = b - a;
    let denom = r.cross(s);
    if denom == 0.0 {
        return p;
    }
    let t = (a - p).cross(s) / denom;
    p + r * t
}

/// Shoelace area of a point list (counterclockwise positive).
pub fn points_area(points: &[Vec2]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n)
        .map(|i| points[i].cross(points[(i + 1) % n]))
        .sum::<f64>()
}
