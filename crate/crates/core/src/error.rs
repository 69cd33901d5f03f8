use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("determinant {0} is not +-1 within tolerance")]
    NonUnitDeterminant(f64),
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("input vectors are linearly dependent")]
    DependentInput,

    #[error("edge {polygon}:{edge} is not paired")]
    UnpairedEdge { polygon: usize, edge: usize },
    #[error("edge reference {polygon}:{edge} is out of range or used twice")]
    BadEdgeRef { polygon: usize, edge: usize },
    #[error("paired edges {0} and {1} are not parallel with opposite orientation")]
    NonParallelPair(String, String),
    #[error("paired edges {0} and {1} have different lengths")]
    IncongruentPair(String, String),
    #[error("vertex class {class} has total angle {angle}, not a multiple of 2pi")]
    BadConeAngle { class: usize, angle: f64 },
    #[error("point {0} does not lie on the surface")]
    PointOffSurface(String),

    #[error("ray passes through a corner that could not be resolved")]
    CornerAmbiguity,
    #[error("direction must be non-zero and length positive")]
    BadRay,

    #[error("surface has no cone points")]
    NoConePoints,
    #[error("holonomy vectors do not span the plane up to length {0}")]
    DegenerateHolonomy(f64),
    #[error("triangulation has no vertices")]
    NoVertices,
    #[error("matrices do not form a group: {0}")]
    NotAGroup(String),
    #[error("verified elements are not closed under products")]
    NotClosed,

    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("internal pairing failure: {0}")]
    PairingImpossible(String),

    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
}
