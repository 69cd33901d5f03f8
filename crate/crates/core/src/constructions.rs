//! The polygon families realising dihedral and cyclic Veech groups.
//!
//! Each surface is a single planar polygon: a regular polygon of side `l1`
//! centred at `O`, with a square of side `l2` standing on every side. The
//! even-`N` builds use `N` sectors of angle `2pi/N`; the odd-`N` builds use
//! `2N` sectors of angle `pi/N` and cut the squares' perpendicular sides at
//! their midpoints into four segments `A1..A4` (listed in boundary order:
//! out-lower, out-upper, back-upper, back-lower). The cyclic builds slide
//! every square along its base by `l3`.
//!
//! Pairing table (sector `k`, opposite sector `k + sectors/2`):
//!
//! | edge           | partner                          |
//! |----------------|----------------------------------|
//! | base segment 1 | base segment 1 of the opposite   |
//! | base segment 2 | base segment 2 of the opposite   |
//! | square top     | square top of the opposite       |
//! | out side       | out side of the opposite (even)  |
//! | back side      | back side of the opposite (even) |
//! | A1, A2 (odd)   | A3, A4 when `k` even; A4, A3 when `k` odd |

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{PlanarPolygon, Vec2};
use crate::surface::{EdgePairing, EdgeRef, MarkedPoint, SurfacePoint, TranslationSurface};
use crate::tracing::{trace_ray, GeodesicSegment, TraceOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Dihedral,
    Cyclic,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Dihedral => f.write_str("dihedral"),
            Family::Cyclic => f.write_str("cyclic"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dihedral" | "d" => Ok(Family::Dihedral),
            "cyclic" | "c" => Ok(Family::Cyclic),
            other => Err(Error::BadParameters(format!("unknown family '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: Family,
    pub n: usize,
    pub l1: f64,
    pub l2: f64,
    /// Square offset; zero for dihedral builds.
    pub l3: f64,
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::BadParameters(m));
        if self.n < 3 {
            return bad(format!("N >= 3 required, got {}", self.n));
        }
        if !(self.l1.is_finite() && self.l2.is_finite() && self.l3.is_finite()) {
            return bad("lengths must be finite".into());
        }
        if !(0.0 < self.l2) {
            return bad(format!("0 < l2 violated (l2 = {})", self.l2));
        }
        if !(self.l2 < self.l1 / 3.0) {
            return bad(format!(
                "l2 < l1/3 violated (l2 = {}, l1/3 = {})",
                self.l2,
                self.l1 / 3.0
            ));
        }
        match self.kind {
            Family::Dihedral => {
                if self.l3 != 0.0 {
                    return bad("dihedral builds take no l3".into());
                }
            }
            Family::Cyclic => {
                if !(0.0 < self.l3) {
                    return bad(format!("0 < l3 violated (l3 = {})", self.l3));
                }
                if !(self.l3 < self.l2 / 2.0) {
                    return bad(format!(
                        "l3 < l2/2 violated (l3 = {}, l2/2 = {})",
                        self.l3,
                        self.l2 / 2.0
                    ));
                }
            }
        }
        Ok(())
    }

    /// Number of sectors of the fan: `N` for even `N`, `2N` for odd `N`.
    pub fn sectors(&self) -> usize {
        if self.n.is_multiple_of(2) {
            self.n
        } else {
            2 * self.n
        }
    }

    /// Apex angle of each sector.
    pub fn theta(&self) -> f64 {
        2.0 * PI / self.sectors() as f64
    }

    /// Side of the central regular polygon: `l1` with `sectors()` sides.
    pub fn central_polygon(&self) -> Result<PlanarPolygon> {
        let s = self.sectors();
        PlanarPolygon::regular(s, self.l1, -PI / 2.0 - self.theta() / 2.0)
    }

    pub fn square(&self) -> Result<PlanarPolygon> {
        PlanarPolygon::rectangle(self.l2, self.l2)
    }

    /// Distance from `O` to the sides of the central polygon.
    pub fn apothem(&self) -> f64 {
        self.l1 / (2.0 * (self.theta() / 2.0).tan())
    }

    pub fn circumradius(&self) -> f64 {
        self.l1 / (2.0 * (self.theta() / 2.0).sin())
    }
}

/// Fixed default lengths: `l1 = 1`, `l2 = e/10`, `l3 = 0.1041592653`.
pub fn default_lengths(kind: Family, _n: usize) -> (f64, f64, f64) {
    let l2 = 0.271_828_182_8;
    match kind {
        Family::Dihedral => (1.0, l2, 0.0),
        Family::Cyclic => (1.0, l2, 0.104_159_265_3),
    }
}

#[derive(Clone, Debug)]
pub struct ConstructedSurface {
    pub spec: FamilySpec,
    pub surface: TranslationSurface,
    pub theta: f64,
    pub o: SurfacePoint,
    /// Square centres `P_1..`, one per sector.
    pub p: Vec<SurfacePoint>,
    /// Segments from `O` to each `P_i`.
    pub s: Vec<GeodesicSegment>,
    /// Segments from `O` to the central polygon's vertices (cyclic builds).
    pub t_segs: Vec<GeodesicSegment>,
}

impl ConstructedSurface {
    pub fn spec(&self) -> FamilySpec {
        self.spec
    }

    /// Whether the build uses the split-side odd scheme.
    pub fn is_odd(&self) -> bool {
        self.spec.n % 2 == 1
    }
}

pub fn build_dihedral(n: usize, l1: f64, l2: f64) -> Result<ConstructedSurface> {
    build(FamilySpec {
        kind: Family::Dihedral,
        n,
        l1,
        l2,
        l3: 0.0,
    })
}

pub fn build_cyclic(n: usize, l1: f64, l2: f64, l3: f64) -> Result<ConstructedSurface> {
    build(FamilySpec {
        kind: Family::Cyclic,
        n,
        l1,
        l2,
        l3,
    })
}

/// Builds with [`default_lengths`].
pub fn build_default(kind: Family, n: usize) -> Result<ConstructedSurface> {
    let (l1, l2, l3) = default_lengths(kind, n);
    build(FamilySpec {
        kind,
        n,
        l1,
        l2,
        l3,
    })
}

/// Geometry of one sector of the fan.
struct Sector {
    side_dir: Vec2,
    normal: Vec2,
    midpoint: Vec2,
}

fn sector(spec: &FamilySpec, k: usize) -> Sector {
    let theta = spec.theta();
    let side_dir = Vec2::from_angle(k as f64 * theta);
    let normal = Vec2::from_angle(k as f64 * theta - PI / 2.0);
    Sector {
        side_dir,
        normal,
        midpoint: normal * spec.apothem(),
    }
}

pub fn build(spec: FamilySpec) -> Result<ConstructedSurface> {
    spec.validate()?;
    let sectors = spec.sectors();
    let split = spec.n % 2 == 1;
    let per = if split { 7 } else { 5 };
    let (l1, l2, l3) = (spec.l1, spec.l2, spec.l3);

    let mut vertices = Vec::with_capacity(per * sectors);
    let mut designated = Vec::new();
    let mut centres = Vec::with_capacity(sectors);
    for k in 0..sectors {
        let Sector {
            side_dir: d,
            normal: nrm,
            midpoint: m,
        } = sector(&spec, k);
        let v = m - d * (l1 / 2.0);
        let ba = m + d * (l3 - l2 / 2.0);
        let bb = m + d * (l3 + l2 / 2.0);
        let ua = ba + nrm * l2;
        let ub = bb + nrm * l2;
        let base = vertices.len();
        vertices.push(v);
        vertices.push(ba);
        if split {
            vertices.push(ba + nrm * (l2 / 2.0));
        }
        vertices.push(ua);
        vertices.push(ub);
        if split {
            vertices.push(bb + nrm * (l2 / 2.0));
        }
        vertices.push(bb);
        // Vertices lying on the central polygon are singular by construction.
        designated.push((0, base));
        designated.push((0, base + 1));
        designated.push((0, base + per - 1));
        centres.push(m + d * l3 + nrm * (l2 / 2.0));
    }
    let polygon = PlanarPolygon::new(vertices)
        .map_err(|e| Error::PairingImpossible(format!("fan polygon is not simple: {e}")))?;

    let e = |k: usize, i: usize| EdgeRef::new(0, (k % sectors) * per + i);
    let half = sectors / 2;
    let mut pairing = EdgePairing::default();
    for k in 0..half {
        let o = k + half;
        if split {
            for i in [0, 3, 6] {
                pairing.push(e(k, i), e(o, i));
            }
        } else {
            for i in 0..5 {
                pairing.push(e(k, i), e(o, i));
            }
        }
    }
    if split {
        for k in 0..sectors {
            if k % 2 == 0 {
                pairing.push(e(k, 1), e(k, 4));
                pairing.push(e(k, 2), e(k, 5));
            } else {
                pairing.push(e(k, 1), e(k, 5));
                pairing.push(e(k, 2), e(k, 4));
            }
        }
    }

    let mut marked = vec![MarkedPoint {
        name: "O".into(),
        point: SurfacePoint::new(0, Vec2::ZERO),
    }];
    for (i, c) in centres.iter().enumerate() {
        marked.push(MarkedPoint {
            name: format!("P{}", i + 1),
            point: SurfacePoint::new(0, *c),
        });
    }
    let surface = TranslationSurface::new(vec![polygon.clone()], pairing, &designated, marked)
        .map_err(|e| Error::PairingImpossible(e.to_string()))?;

    let o = SurfacePoint::new(0, Vec2::ZERO);
    let p: Vec<SurfacePoint> = centres.iter().map(|c| SurfacePoint::new(0, *c)).collect();
    let mut s = Vec::with_capacity(sectors);
    for c in &centres {
        match trace_ray(&surface, o, *c, c.norm())? {
            TraceOutcome::Completed(seg) => s.push(seg),
            TraceOutcome::HitConePoint(..) => {
                return Err(Error::PairingImpossible(
                    "segment from O to a square centre meets a cone point".into(),
                ))
            }
        }
    }
    let mut t_segs = Vec::new();
    if spec.kind == Family::Cyclic {
        for k in 0..sectors {
            let v = polygon.vertex(k * per);
            match trace_ray(&surface, o, v, v.norm() * (1.0 + 1e-6))? {
                TraceOutcome::HitConePoint(seg, _) => t_segs.push(seg),
                TraceOutcome::Completed(_) => {
                    return Err(Error::PairingImpossible(
                        "segment from O to a polygon vertex misses the cone point".into(),
                    ))
                }
            }
        }
    }
    Ok(ConstructedSurface {
        spec,
        theta: spec.theta(),
        surface,
        o,
        p,
        s,
        t_segs,
    })
}
