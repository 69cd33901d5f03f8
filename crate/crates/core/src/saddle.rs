//! Saddle connections up to a length bound.
//!
//! From every corner at a singular vertex the surface is unfolded inside the
//! corner's sector; visible singular vertices within the bound are saddle
//! connections. Corners partition the directions at a cone point, so each
//! oriented connection is found exactly once.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{epsilon, PlanarMatrix, Vec2};
use crate::surface::{SurfacePoint, TranslationSurface};
use crate::tracing::{trace_from_corner, GeodesicSegment, TraceOutcome};
use crate::unfold::{unfold, Flow, Seed};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaddleConnection {
    pub segment: GeodesicSegment,
    pub start: SurfacePoint,
    pub end: SurfacePoint,
    pub start_class: usize,
    pub end_class: usize,
    /// Base-triangulation corner the connection leaves from.
    pub(crate) corner: (usize, usize),
}

impl SaddleConnection {
    pub fn holonomy(&self) -> Vec2 {
        self.segment.holonomy
    }

    pub fn length(&self) -> f64 {
        self.segment.length
    }
}

/// Oriented connection found by unfolding, before tracing.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RawConnection {
    pub corner: (usize, usize),
    pub holonomy: Vec2,
    pub start_class: usize,
    pub end_class: usize,
}

/// One representative of `{v, -v}`: upper half plane, or the positive x-axis.
pub(crate) fn is_canonical_direction(v: Vec2) -> bool {
    let tol = 10.0 * epsilon() * (1.0 + v.norm());
    v.y > tol || (v.y.abs() <= tol && v.x > 0.0)
}

fn direction_angle(v: Vec2) -> f64 {
    let a = v.angle();
    if a < -10.0 * epsilon() {
        a + 2.0 * PI
    } else {
        a.max(0.0)
    }
}

/// Every oriented saddle connection of length at most `bound`, as found from
/// each singular corner, in deterministic order.
pub(crate) fn raw_connections(
    surface: &TranslationSurface,
    bound: f64,
) -> Result<Vec<RawConnection>> {
    if !surface.has_cone_points() {
        return Err(Error::NoConePoints);
    }
    let base = surface.base();
    let corners: Vec<(usize, usize)> = (0..base.tris.len())
        .flat_map(|t| (0..3).map(move |k| (t, k)))
        .filter(|&(t, k)| base.is_singular_corner(t, k))
        .collect();
    let eps = epsilon();
    let per_corner: Vec<Vec<RawConnection>> = corners
        .par_iter()
        .map(|&(t, k)| {
            let seed = Seed {
                tri: t,
                points: base.tris[t].points_with(k, Vec2::ZERO),
            };
            let mut found: Vec<RawConnection> = Vec::new();
            unfold(base, &[seed], bound, |hit| {
                if base.singular[hit.class] {
                    let dup = found
                        .iter()
                        .any(|c| c.holonomy.approx_eq_tol(hit.position, 100.0 * eps));
                    if !dup {
                        found.push(RawConnection {
                            corner: (t, k),
                            holonomy: hit.position,
                            start_class: base.class_of(t, k),
                            end_class: hit.class,
                        });
                    }
                }
                Flow::Continue
            });
            found
        })
        .collect();
    let mut all: Vec<RawConnection> = per_corner.into_iter().flatten().collect();
    all.sort_by(|a, b| {
        a.holonomy
            .norm()
            .partial_cmp(&b.holonomy.norm())
            .unwrap()
            .then(
                direction_angle(a.holonomy)
                    .partial_cmp(&direction_angle(b.holonomy))
                    .unwrap(),
            )
            .then(a.corner.cmp(&b.corner))
    });
    Ok(all)
}

/// All saddle connections of length `<= bound`, each stored once (with its
/// holonomy in the upper half plane), sorted by length then direction.
pub fn enumerate_saddle_connections(
    surface: &TranslationSurface,
    bound: f64,
) -> Result<Vec<SaddleConnection>> {
    let raw = raw_connections(surface, bound)?;
    raw.into_par_iter()
        .filter(|c| is_canonical_direction(c.holonomy))
        .map(|c| realize(surface, &c))
        .collect()
}

pub(crate) fn realize(surface: &TranslationSurface, c: &RawConnection) -> Result<SaddleConnection> {
    let len = c.holonomy.norm();
    let (t, k) = c.corner;
    let out = trace_from_corner(surface, t, k, c.holonomy, len * (1.0 + 1e-9) + 1e-12)?;
    let (segment, end) = match out {
        TraceOutcome::HitConePoint(seg, end) => (seg, end),
        TraceOutcome::Completed(seg) => {
            return Err(Error::Validation(format!(
                "connection with holonomy {} did not end at a cone point (length {})",
                c.holonomy, seg.length
            )))
        }
    };
    if (segment.length - len).abs() > 1e3 * epsilon() * (1.0 + len) {
        return Err(Error::Validation(format!(
            "connection with holonomy {} stopped early at length {}",
            c.holonomy, segment.length
        )));
    }
    let start = segment.start();
    Ok(SaddleConnection {
        start: surface.canonical_point(start)?,
        end,
        start_class: c.start_class,
        end_class: c.end_class,
        corner: c.corner,
        segment,
    })
}

/// Minimal saddle-connection length.
pub fn shortest_saddle_length(surface: &TranslationSurface) -> Result<f64> {
    if !surface.has_cone_points() {
        return Err(Error::NoConePoints);
    }
    let base = surface.base();
    // Any triangle edge between singular vertices is itself a connection.
    let mut seed = f64::INFINITY;
    let mut any_edge = f64::INFINITY;
    for (t, tri) in base.tris.iter().enumerate() {
        for k in 0..3 {
            let l = tri.edges[k].norm();
            any_edge = any_edge.min(l);
            if base.is_singular_corner(t, k) && base.is_singular_corner(t, (k + 1) % 3) {
                seed = seed.min(l);
            }
        }
    }
    let mut bound = if seed.is_finite() { seed } else { any_edge };
    for _ in 0..64 {
        let raw = raw_connections(surface, bound * (1.0 + 1e-9))?;
        if let Some(c) = raw.first() {
            return Ok(c.holonomy.norm());
        }
        bound *= 2.0;
    }
    Err(Error::Validation("no saddle connection found".into()))
}

/// Holonomy vectors of saddle connections up to a bound, with multiplicity,
/// closed under negation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomySet {
    pub vectors: Vec<(Vec2, usize)>,
    pub bound: f64,
}

impl HolonomySet {
    pub(crate) fn from_raw(raw: &[RawConnection], bound: f64) -> Self {
        let tol = 100.0 * epsilon() * (1.0 + bound);
        let mut vectors: Vec<(Vec2, usize)> = Vec::new();
        for c in raw {
            // raw holds both orientations of every connection
            match vectors
                .iter_mut()
                .find(|(v, _)| v.approx_eq_tol(c.holonomy, tol))
            {
                Some((_, m)) => *m += 1,
                None => vectors.push((c.holonomy, 1)),
            }
        }
        vectors.sort_by(|a, b| {
            a.0.norm().partial_cmp(&b.0.norm()).unwrap().then(
                direction_angle(a.0)
                    .partial_cmp(&direction_angle(b.0))
                    .unwrap(),
            )
        });
        Self { vectors, bound }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn total_count(&self) -> usize {
        self.vectors.iter().map(|(_, m)| m).sum()
    }

    pub fn multiplicity(&self, v: Vec2) -> usize {
        let tol = 100.0 * epsilon() * (1.0 + self.bound);
        self.vectors
            .iter()
            .find(|(w, _)| w.approx_eq_tol(v, tol))
            .map_or(0, |(_, m)| *m)
    }

    pub fn contains(&self, v: Vec2) -> bool {
        self.multiplicity(v) > 0
    }

    /// Whether `m` permutes the multiset.
    pub fn is_stabilized_by(&self, m: &PlanarMatrix) -> bool {
        self.vectors
            .iter()
            .all(|(v, mult)| self.multiplicity(m.apply(*v)) == *mult)
    }

    /// Whether the vectors span the plane.
    pub fn spans_plane(&self) -> bool {
        self.spanning_pair().is_some()
    }

    /// First pair (in set order) of linearly independent vectors.
    pub fn spanning_pair(&self) -> Option<(Vec2, Vec2)> {
        let first = self.vectors.first()?.0;
        self.vectors
            .iter()
            .map(|(v, _)| *v)
            .find(|v| first.cross(*v).abs() > 1e-6 * first.norm() * v.norm())
            .map(|v| (first, v))
    }
}

/// Holonomies of all saddle connections of length `<= bound`.
pub fn holonomy_set(surface: &TranslationSurface, bound: f64) -> Result<HolonomySet> {
    let raw = raw_connections(surface, bound)?;
    Ok(HolonomySet::from_raw(&raw, bound))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_cyclic, build_dihedral};
    use crate::surface::examples::{regular_octagon, square_torus};

    #[test]
    fn torus_has_no_cone_points() {
        let t = square_torus();
        assert!(matches!(
            enumerate_saddle_connections(&t, 2.0),
            Err(Error::NoConePoints)
        ));
        assert!(matches!(
            shortest_saddle_length(&t),
            Err(Error::NoConePoints)
        ));
    }

    #[test]
    fn octagon_sides_are_shortest() {
        let o = regular_octagon(1.0);
        let conns = enumerate_saddle_connections(&o, 1.0 + 1e-6).unwrap();
        // 8 sides glued in 4 pairs
        assert_eq!(conns.len(), 4);
        assert!(conns.iter().all(|c| (c.length() - 1.0).abs() < 1e-9));
        assert!((shortest_saddle_length(&o).unwrap() - 1.0).abs() < 1e-12);
        let oracle = oracle::connections(&o, 1.0 + 1e-6, 40);
        assert_eq!(oracle.len(), 8);
    }

    #[test]
    fn octagon_matches_oracle_longer() {
        let o = regular_octagon(1.0);
        let bound = 2.5;
        let raw = raw_connections(&o, bound).unwrap();
        let oracle = oracle::connections(&o, bound, 60);
        assert_eq!(raw.len(), oracle.len());
        for c in &raw {
            assert!(oracle
                .iter()
                .any(|(corner, v)| *corner == c.corner && v.approx_eq_tol(c.holonomy, 1e-7)));
        }
    }

    #[test]
    fn dihedral_four_shortest_slice() {
        let c = build_dihedral(4, 1.0, 0.21).unwrap();
        assert!((shortest_saddle_length(&c.surface).unwrap() - 0.21).abs() < 1e-9);
        let set = holonomy_set(&c.surface, 0.22).unwrap();
        assert_eq!(set.len(), 4);
        for v in [Vec2::new(0.21, 0.0), Vec2::new(0.0, 0.21)] {
            assert!(set.contains(v) && set.contains(-v));
        }
        // 4 squares with 4 sides each; base sides are interior, the rest are
        // glued in pairs between opposite squares: 4 + 6 = 10 connections.
        let conns = enumerate_saddle_connections(&c.surface, 0.21 + 1e-9).unwrap();
        assert_eq!(set.total_count(), 2 * conns.len());
        assert!(holonomy_set(&c.surface, 0.2).unwrap().is_empty());
    }

    #[test]
    fn cyclic_shortest_is_square_side() {
        let c = build_cyclic(4, 1.0, 0.21, 0.05).unwrap();
        // oracle at a small bound
        let oracle = oracle::connections(&c.surface, 0.3, 60);
        let min = oracle
            .iter()
            .map(|(_, v)| v.norm())
            .fold(f64::INFINITY, f64::min);
        assert!((min - 0.21).abs() < 1e-9);
        assert!((shortest_saddle_length(&c.surface).unwrap() - min).abs() < 1e-12);
    }

    #[test]
    fn holonomy_closed_under_negation_and_monotone() {
        let c = build_dihedral(4, 1.0, 0.21).unwrap();
        let small = holonomy_set(&c.surface, 0.4).unwrap();
        let big = holonomy_set(&c.surface, 0.8).unwrap();
        for (v, m) in &small.vectors {
            assert_eq!(small.multiplicity(-*v), *m);
            assert!(big.multiplicity(*v) >= *m);
        }
    }

    fn assert_matches_oracle(surface: &TranslationSurface, bound: f64) {
        let raw = raw_connections(surface, bound).unwrap();
        let oracle = oracle::connections(surface, bound, 80);
        assert_eq!(raw.len(), oracle.len());
        for c in &raw {
            assert!(oracle
                .iter()
                .any(|(corner, v)| *corner == c.corner && v.approx_eq_tol(c.holonomy, 1e-7)));
        }
    }

    #[test]
    fn constructions_match_oracle() {
        assert_matches_oracle(&build_dihedral(3, 1.0, 0.27).unwrap().surface, 0.8);
        assert_matches_oracle(&build_dihedral(4, 1.0, 0.27).unwrap().surface, 0.8);
        assert_matches_oracle(&build_cyclic(5, 1.0, 0.27, 0.1).unwrap().surface, 0.7);
    }
}
