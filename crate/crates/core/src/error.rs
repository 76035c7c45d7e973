use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    ZeroDivision,
    #[error("expression `{0}` has a pole at the point")]
    PoleAtPoint(String),
    #[error("symbol `{0}` has no value at the point")]
    UnboundSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("d^2 {what} = {residual}, expected 0")]
    DSquaredNonzero { what: String, residual: String },
    #[error("degree error: {0}")]
    DegreeError(String),
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("generator `{0}` has degree 0; restrict the manifold to its zero locus instead")]
    DegreeZeroGenerator(String),
    #[error("bad independence condition: {0}")]
    BadIndependenceCondition(String),
    #[error("last character would be negative ({0}); the element is not maximal for this cutoff")]
    NegativeLastCharacter(i64),
    #[error("chart equation is not affine in the chart unknowns: {0}")]
    AffineOnly(String),
    #[error("cannot solve for `{0}`")]
    NotSolvable(String),
    #[error("operation requires a coordinate manifold")]
    NotCoordinateManifold,
    #[error("integral element is not a graph over the independence condition")]
    NotAGraph,
    #[error("no integral element at the point: {0}")]
    NoIntegralElement(String),
    #[error("not an integral element: {0}")]
    NotIntegral(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
