use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("relation table is not {expected}x{expected} (found a row or table of length {found})")]
    MalformedRelation { expected: usize, found: usize },
    #[error("order is not reflexive at {0}")]
    ReflexivityViolation(usize),
    #[error("order is not antisymmetric: {0} and {1} are distinct but mutually related")]
    AntisymmetryViolation(usize, usize),
    #[error("order is not transitive: {0} <= {1} <= {2} but not {0} <= {2}")]
    TransitivityViolation(usize, usize, usize),
    #[error("index {index} out of range for a carrier of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("sequence is not ascending at position {0}")]
    NotAscending(usize),
    #[error("chain prefix has not stabilized")]
    NotStabilized,
    #[error("family is not semidirected")]
    NotSemidirected,
    #[error("family is not directed")]
    NotDirected,
    #[error("poset has no least element")]
    NotPointed,
    #[error("{what} of size {size} exceeds the limit {limit}")]
    SizeLimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("enumeration budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("map is not monotone: {0} <= {1} but their images are unrelated")]
    NotMonotone(usize, usize),
    #[error("source of the outer map does not match target of the inner map")]
    SourceTargetMismatch,
    #[error("maps do not share a source")]
    SourceMismatch,
    #[error("map is not an endomap")]
    NotEndo,
    #[error("projection does not undo the embedding at {0}")]
    NotSection(usize),
    #[error("embedding after projection is not deflationary at {0}")]
    NotDeflation(usize),
    #[error("embedding-projection law fails between levels {level} and {upper} at element {witness}")]
    EpLawViolation {
        level: usize,
        upper: usize,
        witness: usize,
    },
    #[error("composites are incompatible for levels {0} <= {1} <= {2}")]
    CompatibilityViolation(usize, usize, usize),
    #[error("level {level} is beyond the tower depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("tower step {0} does not connect consecutive levels")]
    StepTypeMismatch(usize),
    #[error("cocone condition fails for levels {0} <= {1} at element {2}")]
    CoconeViolation(usize, usize, usize),
    #[error("cone condition fails for levels {0} <= {1} at element {2}")]
    ConeViolation(usize, usize, usize),
    #[error("depth {depth} exceeds the default cap {cap}; pass the deep override to attempt it")]
    DepthLimit { depth: usize, cap: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("syntax error at {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("invalid format: {0}")]
    Format(String),
}
