use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown chart id {0:?}")]
    UnknownChart(String),
    #[error("chart tuple {0:?} has empty intersection")]
    EmptyIntersection(String),
    #[error("missing cocycle component for tuple {0:?}")]
    MissingComponent(String),
    #[error("degree/dimension mismatch: {0}")]
    DegreeMismatch(String),
    #[error("class failed cocycle check: max residual {0:.3e}")]
    InvalidClass(f64),
    #[error("form is not closed: max |dω| = {0:.3e}")]
    NotClosed(f64),
    #[error("value {value:.6e} does not round to a lattice element (residual {residual:.3e})")]
    LatticeRounding { value: f64, residual: f64 },
    #[error("lattice reduction inconclusive: bound {bound} exhausted, best residual {residual:.3e}")]
    ReductionInconclusive { bound: i64, residual: f64 },
    #[error("function has a zero or pole on the tube boundary (point {0})")]
    SingularOnTube(String),
    #[error("branch continuation step too large: |Δarg| = {0:.3} ≥ π")]
    BranchStep(f64),
    #[error("tube radius {eps} too large: nearest other divisor point at distance {dist}")]
    TubeOverlap { eps: f64, dist: f64 },
    #[error("evaluation on the singular locus (θ₃ ∈ {{0, 1/2}}): θ₃ = {0}")]
    SingularLocus(f64),
    #[error("degenerate model parameters: {0}")]
    DegenerateParameters(String),
    #[error("matrix is not Anosov: |trace| must exceed 2 and |det| = 1, got trace {trace}, det {det}")]
    NotAnosov { trace: i64, det: i64 },
    #[error("orbit not supported: {0}")]
    UnsupportedOrbit(String),
    #[error("expression parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
