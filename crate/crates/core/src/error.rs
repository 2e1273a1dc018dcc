use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cell {cell} references vertex {index}, but the mesh has {count} vertices")]
    VertexIndex {
        cell: usize,
        index: usize,
        count: usize,
    },

    #[error("cell {cell} is not counter-clockwise (signed area {area:e})")]
    Orientation { cell: usize, area: f64 },

    #[error("cell {cell} is not a simple polygon: {reason}")]
    NotSimple { cell: usize, reason: String },

    #[error("edge ({a}, {b}) is shared by more than two cells")]
    NonManifold { a: usize, b: usize },

    #[error("edge ({a}, {b}) is traversed in the same direction by cells {first} and {second}")]
    InconsistentOrientation {
        a: usize,
        b: usize,
        first: usize,
        second: usize,
    },

    #[error("vertex {0} is not referenced by any cell")]
    UnusedVertex(usize),

    #[error("degenerate cell {cell}: {reason}")]
    DegenerateCell { cell: usize, reason: String },

    #[error("mesh file line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("quadrature exactness {requested} exceeds the supported maximum {max}")]
    QuadratureDegree { requested: usize, max: usize },

    #[error("singular {what} system on cell {cell}")]
    SingularLocalSystem { cell: usize, what: &'static str },

    #[error("ill-conditioned Gram matrix on cell {cell}: condition estimate {condition:e}")]
    IllConditioned { cell: usize, condition: f64 },

    #[error(
        "global matrix is not positive definite (non-positive pivot at {pivot}); \
         the penalty parameter lambda = {lambda} is too small, increase it"
    )]
    NotPositiveDefinite { pivot: usize, lambda: f64 },

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("iterative solver stalled at relative residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("boundary data is not finite at ({x}, {y})")]
    BoundaryData { x: f64, y: f64 },

    #[error("rate fit needs at least two levels with distinct mesh sizes")]
    RateFit,

    #[error("reference solution for `{0}` provides no derivatives")]
    MissingReference(String),

    #[error("level {level}: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attaches the index of the cell whose local computation failed, when
    /// the error did not already carry one.
    pub(crate) fn at_cell(self, cell: usize) -> Self {
        match self {
            Error::SingularLocalSystem { what, .. } => Error::SingularLocalSystem { cell, what },
            Error::IllConditioned { condition, .. } => Error::IllConditioned { cell, condition },
            Error::DegenerateCell { reason, .. } => Error::DegenerateCell { cell, reason },
            other => other,
        }
    }

    pub(crate) fn at_level(self, level: usize) -> Self {
        Error::Level {
            level,
            source: Box::new(self),
        }
    }
}
