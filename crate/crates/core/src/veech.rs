//! The isometric part of the Veech group.
//!
//! Candidate derivatives come from the shortest saddle connections; each is
//! verified by transporting the Delaunay cell decomposition with the matrix
//! and searching for a translation-equivalent isomorphism back onto the
//! original decomposition.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::delaunay::{delaunay_with_points, transform, CellComplex, Tracked, Triangulation};
use crate::error::{Error, Result};
use crate::geom::{epsilon, solve_pair_map, PlanarMatrix, Vec2};
use crate::saddle::{holonomy_set, shortest_saddle_length, HolonomySet};
use crate::surface::{SurfacePoint, TranslationSurface};

/// Relative slack on the shortest length when collecting candidate data.
const SLICE_SLACK: f64 = 1e-6;

/// Image of one cell of the transported decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellImage {
    pub cell: usize,
    /// Edge `i` of the source cell goes to edge `i + rotation` of the target.
    pub rotation: usize,
}

/// A verified affine automorphism, identified by its derivative and the
/// cell map witnessing it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineAutomorphism {
    pub derivative: PlanarMatrix,
    /// For every cell of the transported Delaunay decomposition, its image.
    pub cell_map: Vec<CellImage>,
    /// Each marked point with the name of the marked point it is sent to,
    /// if any.
    pub marked_images: Vec<(String, Option<String>)>,
}

impl AffineAutomorphism {
    /// Whether the named marked point is sent to itself.
    pub fn fixes(&self, name: &str) -> bool {
        self.marked_images
            .iter()
            .any(|(a, b)| a == name && b.as_deref() == Some(name))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupType {
    Trivial,
    Cyclic(usize),
    Dihedral(usize),
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupType::Trivial => write!(f, "Trivial"),
            GroupType::Cyclic(n) => write!(f, "Cyclic({n})"),
            GroupType::Dihedral(n) => write!(f, "Dihedral({n})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VeechGroup {
    /// Sorted by rotation angle, then determinant.
    pub elements: Vec<PlanarMatrix>,
    pub group_type: GroupType,
    pub rotation_order: usize,
    pub reflection_count: usize,
    /// Always set: only derivatives preserving the shortest saddle
    /// connections are searched, so the result is the isometric subgroup.
    pub isometric_only: bool,
    /// Number of automorphisms with derivative `I` other than the identity.
    pub translation_automorphisms: usize,
}

impl VeechGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &PlanarMatrix) -> bool {
        self.elements
            .iter()
            .any(|e| e.approx_eq_tol(m, closure_tol()))
    }
}

fn closure_tol() -> f64 {
    10.0 * epsilon()
}

/// Holonomy slice used for candidate generation: connections no longer than
/// the shortest one (with a small slack), enlarged until it spans the plane.
fn candidate_slice(surface: &TranslationSurface) -> Result<HolonomySet> {
    let shortest = shortest_saddle_length(surface)?;
    let mut bound = shortest * (1.0 + SLICE_SLACK);
    for _ in 0..20 {
        let set = holonomy_set(surface, bound)?;
        if set.spans_plane() {
            return Ok(set);
        }
        bound *= 2.0;
    }
    Err(Error::DegenerateHolonomy(bound))
}

/// Matrices of determinant `+-1` mapping a fixed spanning pair of short
/// holonomy vectors to a pair of short holonomy vectors and preserving the
/// whole short holonomy multiset.
pub fn candidate_derivatives(surface: &TranslationSurface) -> Result<Vec<PlanarMatrix>> {
    let set = candidate_slice(surface)?;
    let (u1, u2) = set
        .spanning_pair()
        .ok_or(Error::DegenerateHolonomy(set.bound))?;
    let vs: Vec<Vec2> = set.vectors.iter().map(|(v, _)| *v).collect();
    let mut out: Vec<PlanarMatrix> = Vec::new();
    for &v1 in &vs {
        for &v2 in &vs {
            let Some(m) = solve_pair_map(u1, u2, v1, v2)? else {
                continue;
            };
            if (m.det().abs() - 1.0).abs() > 1e-6 {
                continue;
            }
            if !set.is_stabilized_by(&m) {
                continue;
            }
            if !out.iter().any(|e| e.approx_eq_tol(&m, 1e-7)) {
                out.push(m);
            }
        }
    }
    sort_elements(&mut out);
    Ok(out)
}

fn rotation_angle(m: &PlanarMatrix) -> f64 {
    let a = m.c.atan2(m.a);
    if a < -1e-9 {
        a + 2.0 * PI
    } else {
        a.max(0.0)
    }
}

fn sort_elements(v: &mut [PlanarMatrix]) {
    v.sort_by(|x, y| {
        let kx = ((rotation_angle(x) * 1e9).round(), x.det().signum());
        let ky = ((rotation_angle(y) * 1e9).round(), y.det().signum());
        kx.0.partial_cmp(&ky.0)
            .unwrap()
            .then(ky.1.partial_cmp(&kx.1).unwrap())
    });
}

/// A cell map together with the images of the tracked points.
pub(crate) type Witness = (Vec<CellImage>, Vec<Option<usize>>);

/// Precomputed data shared by every verification on one surface.
pub(crate) struct Verifier {
    tri: Triangulation,
    cells: CellComplex,
    tracked: Vec<Tracked>,
    tol: f64,
}

impl Verifier {
    pub fn new(surface: &TranslationSurface, points: &[SurfacePoint]) -> Result<Self> {
        let (tri, tracked) = delaunay_with_points(surface, points)?;
        let cells = CellComplex::build(&tri)?;
        let scale = cells
            .cells
            .iter()
            .flat_map(|c| (0..c.len()).map(move |i| c.edge(i).norm()))
            .fold(0.0, f64::max);
        Ok(Self {
            tri,
            cells,
            tracked,
            tol: 1e3 * epsilon() * (1.0 + scale),
        })
    }

    /// All cell isomorphisms realizing `m` (at most `limit`), each with the
    /// images of the tracked points as indices into the tracked list.
    pub fn witnesses(&self, m: &PlanarMatrix, limit: usize) -> Result<Vec<Witness>> {
        let (img, img_pts) = transform(&self.tri, m, &self.tracked)?;
        let src = CellComplex::build(&img)?;
        let maps = isomorphisms(&src, &self.cells, &self.tri.class_angles, self.tol, limit);
        let here: Vec<(usize, Vec2)> = self.tracked.iter().map(|p| self.cells.locate(p)).collect();
        Ok(maps
            .into_iter()
            .map(|map| {
                let images = img_pts
                    .iter()
                    .map(|p| {
                        let (c, pos) = src.locate(p);
                        let im = map[c];
                        let target = &self.cells.cells[im.cell];
                        let q = target.verts[im.rotation] + (pos - src.cells[c].verts[0]);
                        here.iter()
                            .position(|h| self.cells.same_point(*h, (im.cell, q), self.tol))
                    })
                    .collect();
                (map, images)
            })
            .collect())
    }
}

/// Label-preserving isomorphisms from `a` onto `b` whose cell maps are pure
/// translations, sending each vertex class to one of equal cone angle.
fn isomorphisms(
    a: &CellComplex,
    b: &CellComplex,
    angles: &[f64],
    tol: f64,
    limit: usize,
) -> Vec<Vec<CellImage>> {
    let mut out = Vec::new();
    if a.cells.len() != b.cells.len() || a.cells.is_empty() {
        return out;
    }
    let start = &a.cells[0];
    for (c, cell) in b.cells.iter().enumerate() {
        if cell.len() != start.len() {
            continue;
        }
        for r in 0..cell.len() {
            if let Some(map) = extend(a, b, angles, c, r, tol) {
                out.push(map);
                if out.len() >= limit {
                    return out;
                }
            }
        }
    }
    out
}

fn extend(
    a: &CellComplex,
    b: &CellComplex,
    angles: &[f64],
    c0: usize,
    r0: usize,
    tol: f64,
) -> Option<Vec<CellImage>> {
    let n = a.cells.len();
    let mut map: Vec<Option<CellImage>> = vec![None; n];
    let mut used = vec![false; n];
    let mut class_map: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    map[0] = Some(CellImage {
        cell: c0,
        rotation: r0,
    });
    used[c0] = true;
    let mut queue = vec![0usize];
    while let Some(x) = queue.pop() {
        let im = map[x].unwrap();
        let ca = &a.cells[x];
        let cb = &b.cells[im.cell];
        let len = ca.len();
        if cb.len() != len {
            return None;
        }
        for i in 0..len {
            let j = (i + im.rotation) % len;
            if !ca.edge(i).approx_eq_tol(cb.edge(j), tol) {
                return None;
            }
            let (ka, kb) = (ca.classes[i], cb.classes[j]);
            match class_map.get(&ka) {
                Some(&k) if k != kb => return None,
                Some(_) => {}
                None => {
                    class_map.insert(ka, kb);
                }
            }
            let (na, ea) = ca.glued[i];
            let (nb, eb) = cb.glued[j];
            let nlen = a.cells[na].len();
            if b.cells[nb].len() != nlen {
                return None;
            }
            let rot = (eb + nlen - ea) % nlen;
            match map[na] {
                Some(m) => {
                    if m.cell != nb || m.rotation != rot {
                        return None;
                    }
                }
                None => {
                    if used[nb] {
                        return None;
                    }
                    used[nb] = true;
                    map[na] = Some(CellImage {
                        cell: nb,
                        rotation: rot,
                    });
                    queue.push(na);
                }
            }
        }
    }
    if class_map
        .iter()
        .any(|(&x, &y)| (angles[x] - angles[y]).abs() > 1e-6)
    {
        return None;
    }
    map.into_iter().collect()
}

fn marked_names(surface: &TranslationSurface) -> (Vec<String>, Vec<SurfacePoint>) {
    surface
        .marked_points()
        .iter()
        .map(|m| (m.name.clone(), m.point))
        .unzip()
}

/// Verifies `m` as the derivative of an affine automorphism.
pub fn verify_affine(
    surface: &TranslationSurface,
    m: &PlanarMatrix,
) -> Result<Option<AffineAutomorphism>> {
    if (m.det().abs() - 1.0).abs() > 1e3 * epsilon() {
        return Err(Error::NonUnitDeterminant(m.det()));
    }
    let (names, points) = marked_names(surface);
    let v = Verifier::new(surface, &points)?;
    verify_with(&v, &names, m)
}

fn verify_with(
    v: &Verifier,
    names: &[String],
    m: &PlanarMatrix,
) -> Result<Option<AffineAutomorphism>> {
    let found = v.witnesses(m, 1)?;
    Ok(found
        .into_iter()
        .next()
        .map(|(cell_map, images)| AffineAutomorphism {
            derivative: *m,
            cell_map,
            marked_images: names
                .iter()
                .zip(images)
                .map(|(n, i)| (n.clone(), i.map(|k| names[k].clone())))
                .collect(),
        }))
}

/// Verified automorphisms for every candidate derivative, in canonical order.
/// Images of `points` under an affine automorphism with derivative `m`,
/// as indices into `points` (`None` when an image is not in the list).
/// Returns `Ok(None)` when no automorphism with that derivative exists.
pub fn point_images(
    surface: &TranslationSurface,
    m: &PlanarMatrix,
    points: &[SurfacePoint],
) -> Result<Option<Vec<Option<usize>>>> {
    if (m.det().abs() - 1.0).abs() > 1e3 * epsilon() {
        return Err(Error::NonUnitDeterminant(m.det()));
    }
    let v = Verifier::new(surface, points)?;
    Ok(v.witnesses(m, 1)?.into_iter().next().map(|(_, imgs)| imgs))
}

pub fn verified_automorphisms(surface: &TranslationSurface) -> Result<Vec<AffineAutomorphism>> {
    let candidates = candidate_derivatives(surface)?;
    let (names, points) = marked_names(surface);
    let v = Verifier::new(surface, &points)?;
    let found: Vec<Option<AffineAutomorphism>> = candidates
        .par_iter()
        .map(|m| verify_with(&v, &names, m))
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// The isometric Veech group of `surface`.
pub fn compute_veech_group(surface: &TranslationSurface) -> Result<VeechGroup> {
    let autos = verified_automorphisms(surface)?;
    let mut elements: Vec<PlanarMatrix> = autos.iter().map(|a| a.derivative).collect();
    sort_elements(&mut elements);
    check_closure(&elements).map_err(|_| Error::NotClosed)?;
    let group_type = classify_group(&elements)?;
    let (_, points) = marked_names(surface);
    let v = Verifier::new(surface, &points)?;
    let translations = v
        .witnesses(&PlanarMatrix::IDENTITY, usize::MAX)?
        .len()
        .saturating_sub(1);
    let reflection_count = elements.iter().filter(|m| m.det() < 0.0).count();
    Ok(VeechGroup {
        rotation_order: elements.len() - reflection_count,
        reflection_count,
        elements,
        group_type,
        isometric_only: true,
        translation_automorphisms: translations,
    })
}

fn check_closure(elements: &[PlanarMatrix]) -> Result<()> {
    let tol = closure_tol();
    let has = |m: &PlanarMatrix| elements.iter().any(|e| e.approx_eq_tol(m, tol));
    if !has(&PlanarMatrix::IDENTITY) {
        return Err(Error::NotAGroup("identity missing".into()));
    }
    for a in elements {
        let inv = a
            .inverse()
            .ok_or_else(|| Error::NotAGroup("singular element".into()))?;
        if !has(&inv) {
            return Err(Error::NotAGroup(format!("inverse of {a} missing")));
        }
        for b in elements {
            if !has(&(*a * *b)) {
                return Err(Error::NotAGroup(format!("product {a} * {b} missing")));
            }
        }
    }
    Ok(())
}

/// Cyclic or dihedral type of a finite group of orthogonal matrices.
pub fn classify_group(elements: &[PlanarMatrix]) -> Result<GroupType> {
    if elements.is_empty() {
        return Err(Error::NotAGroup("empty".into()));
    }
    if let Some(m) = elements.iter().find(|m| !m.is_orthogonal()) {
        return Err(Error::NotAGroup(format!("{m} is not orthogonal")));
    }
    check_closure(elements)?;
    let rotations: Vec<&PlanarMatrix> = elements.iter().filter(|m| m.det() > 0.0).collect();
    let r = rotations.len();
    let reflections = elements.len() - r;
    if reflections != 0 && reflections != r {
        return Err(Error::NotAGroup(
            "reflections and rotations do not match".into(),
        ));
    }
    if r > 1000 {
        return Err(Error::NotAGroup("rotation subgroup too large".into()));
    }
    // Every rotation angle must be a multiple of 2pi / r.
    let step = 2.0 * PI / r as f64;
    for m in &rotations {
        let q = rotation_angle(m) / step;
        if (q - q.round()).abs() > 1e-6 {
            return Err(Error::NotAGroup(format!(
                "rotation {m} is not of order dividing {r}"
            )));
        }
    }
    Ok(match (elements.len(), reflections) {
        (1, _) => GroupType::Trivial,
        (_, 0) => GroupType::Cyclic(r),
        _ => GroupType::Dihedral(r),
    })
}
