use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the supported range of a special function or operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure (bracketing, refinement, linear solve) failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Grid too coarse for the requested computation.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// The boundary stopped being a graph or the gauge map degenerated.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Jacobian determinant dropped below the configured floor; run must abort.
    #[error("gauge degeneracy: {0}")]
    GaugeDegenerate(String),

    /// Initial temperature not strictly positive in the interior.
    #[error("phase error: {0}")]
    Phase(String),

    /// Taylor sign condition violated by the initial data.
    #[error("sign-condition error: {0}")]
    SignCondition(String),

    /// Field defined on a different grid than expected.
    #[error("shape error: {0}")]
    Shape(String),

    /// Coefficient matrix not symmetric positive definite.
    #[error("ellipticity error: {0}")]
    Ellipticity(String),

    /// Requested history not covered by the stored snapshots.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// A model assumption (e.g. nondecreasing front) was violated during a run.
    #[error("model violation: {0}")]
    ModelViolation(String),

    /// Operation precondition not met.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// Degenerate input where a nonzero quantity is required.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Config text could not be parsed.
    #[error("config error at line {line}, key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("time step failed at t = {t}: {source}")]
    StepFailure {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
