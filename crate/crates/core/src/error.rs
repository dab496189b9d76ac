use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge count must be odd and at least 5, got {0}")]
    BadParity(usize),
    #[error("invalid length vector: {0}")]
    InvalidLengths(String),
    #[error("closure violated: |sum of edges| = {defect:e}")]
    ClosureViolation { defect: f64 },
    #[error("edge {edge} has relative length error {error:e}")]
    LengthViolation { edge: usize, error: f64 },
    #[error("decoration vector is not unit: |xi| = {norm}")]
    BadDecoration { norm: f64 },
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("points are not coplanar with the given center and normal (offset {0:e})")]
    NotCoplanar(f64),
    #[error("winding center coincides with vertex {0}")]
    CenterOnPolygonVertex(usize),
    #[error("inadmissible cyclic type: {0}")]
    Inadmissible(String),
    #[error("no circumradius root in bracket for {0}")]
    NoRoot(String),
    #[error("constraint and symmetry span has rank {rank}, expected {expected}")]
    RankDeficiency { rank: usize, expected: usize },
    #[error("projected gradient norm {0:e} too large for a Hessian evaluation")]
    NotNearCritical(f64),
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("Hessian stays degenerate at {0} under every perturbation seed")]
    PersistentDegeneracy(String),
    #[error("Betti routes disagree at degree {degree} for n = {n}")]
    FormulaMismatch { n: usize, degree: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
