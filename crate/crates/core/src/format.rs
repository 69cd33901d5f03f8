//! Text interchange format for surfaces.
//!
//! Surfaces are stored as JSON. Every coordinate is written as a decimal
//! string with 17 significant digits, which makes `save(load(save(T)))`
//! byte-identical to `save(T)`.

use serde::{Deserialize, Serialize};

use crate::constructions::{Family, FamilySpec};
use crate::error::{Error, Result};
use crate::geom::{PlanarPolygon, Vec2};
use crate::surface::{EdgePairing, EdgeRef, MarkedPoint, SurfacePoint, TranslationSurface};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileMarkedPoint {
    pub name: String,
    pub polygon: usize,
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileFamily {
    pub kind: Family,
    pub n: usize,
    pub l1: String,
    pub l2: String,
    pub l3: String,
}

impl FileFamily {
    fn from_spec(f: &FamilySpec) -> Self {
        Self {
            kind: f.kind,
            n: f.n,
            l1: canonical_number(f.l1),
            l2: canonical_number(f.l2),
            l3: canonical_number(f.l3),
        }
    }

    fn to_spec(&self) -> Result<FamilySpec> {
        Ok(FamilySpec {
            kind: self.kind,
            n: self.n,
            l1: parse_number(&self.l1)?,
            l2: parse_number(&self.l2)?,
            l3: parse_number(&self.l3)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub version: u32,
    pub polygons: Vec<Vec<[String; 2]>>,
    pub pairing: Vec<[[usize; 2]; 2]>,
    #[serde(default)]
    pub designated: Vec<[usize; 2]>,
    #[serde(default)]
    pub marked: Vec<FileMarkedPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FileFamily>,
}

/// Canonical 17-significant-digit rendering of a float.
pub fn canonical_number(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn parse_number(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid number {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("non-finite number {s:?}")))
    }
}

impl SurfaceFile {
    pub fn from_surface(surface: &TranslationSurface, family: Option<FamilySpec>) -> Self {
        let polygons = surface
            .polygons()
            .iter()
            .map(|p| {
                p.vertices()
                    .iter()
                    .map(|v| [canonical_number(v.x), canonical_number(v.y)])
                    .collect()
            })
            .collect();
        let pairing = surface
            .pairing()
            .pairs
            .iter()
            .map(|(a, b)| [[a.polygon, a.edge], [b.polygon, b.edge]])
            .collect();
        let designated = surface.designated().iter().map(|&(p, v)| [p, v]).collect();
        let marked = surface
            .marked_points()
            .iter()
            .map(|m| FileMarkedPoint {
                name: m.name.clone(),
                polygon: m.point.polygon,
                x: canonical_number(m.point.position.x),
                y: canonical_number(m.point.position.y),
            })
            .collect();
        Self {
            version: FORMAT_VERSION,
            polygons,
            pairing,
            designated,
            marked,
            family: family.as_ref().map(FileFamily::from_spec),
        }
    }

    /// Rebuilds and validates the surface described by the file.
    pub fn to_surface(&self) -> Result<TranslationSurface> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                self.version
            )));
        }
        let mut polygons = Vec::with_capacity(self.polygons.len());
        for verts in &self.polygons {
            let pts = verts
                .iter()
                .map(|[x, y]| Ok(Vec2::new(parse_number(x)?, parse_number(y)?)))
                .collect::<Result<Vec<_>>>()?;
            polygons.push(PlanarPolygon::new(pts).map_err(|e| Error::Validation(e.to_string()))?);
        }
        let pairing = EdgePairing::new(
            self.pairing
                .iter()
                .map(|[a, b]| (EdgeRef::new(a[0], a[1]), EdgeRef::new(b[0], b[1])))
                .collect(),
        );
        let designated: Vec<(usize, usize)> =
            self.designated.iter().map(|&[p, v]| (p, v)).collect();
        let marked = self
            .marked
            .iter()
            .map(|m| {
                Ok(MarkedPoint {
                    name: m.name.clone(),
                    point: SurfacePoint::new(
                        m.polygon,
                        Vec2::new(parse_number(&m.x)?, parse_number(&m.y)?),
                    ),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TranslationSurface::new(polygons, pairing, &designated, marked)
            .map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("surface file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn save_string(surface: &TranslationSurface, family: Option<FamilySpec>) -> String {
    SurfaceFile::from_surface(surface, family).to_json()
}

pub fn load_string(text: &str) -> Result<(TranslationSurface, Option<FamilySpec>)> {
    let file = SurfaceFile::from_json(text)?;
    let surface = file.to_surface()?;
    let family = file.family.as_ref().map(FileFamily::to_spec).transpose()?;
    Ok((surface, family))
}
