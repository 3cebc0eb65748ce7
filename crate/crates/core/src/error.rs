use thiserror::Error;

/// Errors surfaced by the numerical core. Positions and momenta are reported
/// in f64 regardless of the working precision.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("position {q:?} lies outside the configuration domain")]
    OutOfDomain { q: Vec<f64> },

    #[error("time {t} outside the protocol window [0, {tau}]")]
    TimeOutOfRange { t: f64, tau: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("numerical failure during {context} at t={t}: q={q:?}, p={p:?}")]
    NumericalFailure {
        context: &'static str,
        t: f64,
        q: Vec<f64>,
        p: Vec<f64>,
    },

    #[error("{failed} of {total} trajectories failed, over the {budget_per_mille}-per-mille budget")]
    FailureBudgetExceeded {
        failed: usize,
        total: usize,
        budget_per_mille: usize,
    },

    #[error("trajectory propagation failed at node {node}: {source}")]
    NodePropagation {
        node: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("characteristic function input is not conjugate-symmetric (max deviation {max_dev})")]
    AsymmetricCharFunc { max_dev: f64 },

    #[error("characteristic function grid is not uniform/symmetric around zero")]
    BadCharFuncGrid,

    #[error("inverse transform produced density below the ringing tolerance: min {min} vs floor {floor}")]
    ExcessiveRinging { min: f64, floor: f64 },

    #[error("imaginary residue {residue} of the inverted density exceeds {tol}")]
    ImaginaryResidue { residue: f64, tol: f64 },

    #[error("moment order {k} unsupported (max {max})")]
    UnsupportedMoment { k: usize, max: usize },

    #[error("distributions have incompatible kinds for this operation")]
    IncompatibleDistributions,

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("matrix is not Hermitian: max asymmetry {max_dev} exceeds {tol}")]
    NotHermitian { max_dev: f64, tol: f64 },

    #[error("amplitude norm drifted by {drift} (limit {limit}); increase n_steps")]
    NormDrift { drift: f64, limit: f64 },

    #[error("empty input for {context}")]
    EmptyInput { context: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
