use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("all components are zero")]
    AllZero,
    #[error("point is an indeterminacy point of the map")]
    OnIndeterminacy,
    #[error("no affine chart of the target contains the local image")]
    ChartOverflow,
    #[error("jet order {found} does not match the required order {expected}")]
    OrderMismatch { expected: usize, found: usize },
    #[error("map is degenerate at the base point")]
    Degenerate,
    #[error("Omega vanishes at this slope")]
    DegenerateSlope,
    #[error("image point off the computed hyperplane: {0}")]
    ContainmentFailed(String),
    #[error("eliminant vanishes identically; resample the target")]
    NonGenericTarget,
    #[error("map is degenerate at every sampled point")]
    EverywhereDegenerate,
    #[error("canonical line sections collapse; reseed them")]
    SectionCollapse,
    #[error("map is not a planarization: {0}")]
    NotAPlanarization(String),
    #[error("data is not rational of degree at most {0}")]
    DegreeTooLow(usize),
    #[error("several distinct fits agree with every sample; add nodes")]
    AmbiguousFit,
    #[error("no probe node keeps every accepted line finite")]
    NormalizationFailure,
    #[error("two-stage and direct fits disagree")]
    RouteMismatch,
    #[error("need at least {needed} samples, found {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("system basis is linearly dependent")]
    DependentBasis,
    #[error("map does not take the screened lines to system curves ({0})")]
    NotALinesToCurvesMap(String),
    #[error("net composite does not take lines to lines")]
    NotCollinear,
    #[error("projective fit failed: {0}")]
    ProjectiveFitFailed(String),
    #[error("sample off the unit sphere: |f|^2 = {0}")]
    NotOnSphere(String),
    #[error("fitted rational verdict has degree {0}, where at most two is expected")]
    DegreeAnomaly(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}
