use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("field of order {p}^{k} is not supported")]
    UnsupportedSize { p: u32, k: u32 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("x^2 - {r}x - {s} has a root in the basefield")]
    ReducibleQuadratic { r: u8, s: u8 },
    #[error("the zero element has no right factor")]
    ZeroDivisor,
    #[error("plane of order {0} exceeds the supported size")]
    PlaneTooLarge(usize),
    #[error("incidence structure is not a projective plane: {0}")]
    NotAPlane(String),
    #[error("points coincide")]
    CoincidentPoints,
    #[error("lines coincide")]
    CoincidentLines,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("operation requires a Hall plane")]
    NotHall,
    #[error("line pair involves the line at infinity")]
    InfinityLineUnsupported,
    #[error("point is not on the expected line: {0}")]
    NotIncident(String),
    #[error("degenerate sextuple: {0}")]
    DegenerateSextuple(String),
    #[error("no witness found")]
    NotFound,
    #[error("construction constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("formula disagrees with the plane engine: {0}")]
    FormulaMismatch(String),
    #[error("expression error: {0}")]
    Expr(String),
    #[error("malformed incidence data: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
