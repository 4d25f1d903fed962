use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("not a face of the cone")]
    NotAFace,
    #[error("parabolic {0} is not contained in {1}")]
    NotContained(String, String),
    #[error("decomposition is not a fan: {0}")]
    NotAFan(String),
    #[error("polynomial depends on lineality directions")]
    PolynomialOnLineality,
    #[error("polynomial degree {0} exceeds cap {1}")]
    DegreeCap(u32, u32),
    #[error("lambda lies on a pole: {0}")]
    Pole(String),
    #[error("lambda outside the convergence region")]
    Divergent,
    #[error("embedding is not isometric: {0}")]
    NotIsometric(String),
    #[error("empty fan: no ambient chamber meets the subgroup chamber")]
    EmptyFan,
    #[error("unknown cell '{0}'")]
    UnknownCell(String),
    #[error("form is not xi-regular at {0:?}")]
    Irregular(Vec<(String, usize)>),
    #[error("cell {0} is not maximal")]
    NotMaximal(String),
    #[error("missing c_Q value for {0}")]
    MissingCq(String),
    #[error("too many facets or rays ({0}) for face enumeration")]
    TooLarge(usize),
    #[error("figure needs a 1-D or 2-D scene, got dimension {0}")]
    FigureDim(usize),
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
