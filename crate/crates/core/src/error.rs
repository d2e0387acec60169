use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("curve is not regular at t = {t}: |X'| = {speed:e}")]
    Irregular { t: f64, speed: f64 },

    #[error("support function is not convex: radius of curvature {rho:e} at theta = {theta}")]
    NonConvexSupport { theta: f64, rho: f64 },

    #[error("jet order {0} outside 1..=4")]
    JetOrder(usize),

    #[error("grid size {0} is below the minimum of 64")]
    GridTooSmall(usize),

    #[error("branch linking failed: {0}")]
    BranchLinkFailure(String),

    #[error("pair ({s}, {t}) is not parallel (residual {residual:e})")]
    NotParallel { s: f64, t: f64, residual: f64 },

    #[error("pair ({s}, {t}) is not bitangent (residual {residual:e})")]
    NotBitangent { s: f64, t: f64, residual: f64 },

    #[error("contact order exceeds 3 at parameter {t}")]
    DegenerateContact { t: f64 },

    #[error("lambda = {0} is degenerate (must differ from 0 and 1)")]
    DegenerateLambda(f64),

    #[error("A2 condition fails: residual {residual:e} below tolerance {tol:e}")]
    A2ConditionFailed { residual: f64, tol: f64 },

    #[error("local graph condition fails within the fit window at parameter {t}")]
    FitWindowTooSmall { t: f64 },

    #[error("{label} is not realizable at m = {m}")]
    UnrealizableAtDimension { label: String, m: usize },

    #[error("invalid generating family: {0}")]
    InvalidFamily(String),

    #[error("scene has no layers")]
    EmptyScene,

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_)
            | Error::Json(_)
            | Error::InvalidCurve(_)
            | Error::NonConvexSupport { .. }
            | Error::InvalidFamily(_)
            | Error::UnrealizableAtDimension { .. }
            | Error::JetOrder(_)
            | Error::GridTooSmall(_) => 2,
            Error::DegenerateLambda(_) => 4,
            _ => 3,
        }
    }
}
