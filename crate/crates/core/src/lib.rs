//! Translation surfaces built from glued planar polygons.
//!
//! The crate covers the pipeline from a polygon presentation to the finite
//! isometric Veech group: tracing straight lines through the edge
//! identifications, enumerating saddle connections, locating embedded convex
//! polygons and their centroids, and verifying candidate derivatives against
//! the Delaunay canonical form.

pub mod constructions;
pub mod convex;
pub mod delaunay;
pub mod error;
pub mod format;
pub mod geom;
pub mod render;
pub mod report;
pub mod saddle;
pub mod surface;
pub mod tracing;
pub(crate) mod tri;
pub(crate) mod unfold;
pub mod veech;

pub use constructions::{
    build_cyclic, build_default, build_dihedral, default_lengths, ConstructedSurface, Family,
    FamilySpec,
};
pub use convex::{centroids, find_copies, ConvexCopy, RegionFragment};
pub use delaunay::{delaunay_triangulation, Triangulation};
pub use error::{Error, Result};
pub use format::{load_string, save_string, SurfaceFile, FORMAT_VERSION};
pub use geom::{
    classify_matrix, congruence_map, epsilon, set_epsilon, solve_pair_map, MatrixClass,
    PlanarMatrix, PlanarPolygon, Vec2,
};
pub use render::{pair_label, render_svg, Overlay, RenderOptions};
pub use report::{analyze, AnalysisOptions, AnalysisReport};
pub use saddle::{
    enumerate_saddle_connections, holonomy_set, shortest_saddle_length, HolonomySet,
    SaddleConnection,
};
pub use surface::{
    build_surface, EdgePairing, EdgeRef, MarkedPoint, SurfacePoint, TranslationSurface, VertexClass,
};
pub use tracing::{distance_to_cone_set, trace_ray, GeodesicSegment, Piece, TraceOutcome};
pub use veech::{
    candidate_derivatives, classify_group, compute_veech_group, point_images,
    verified_automorphisms, verify_affine, AffineAutomorphism, CellImage, GroupType, VeechGroup,
};
