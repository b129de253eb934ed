//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A model primitive or derived quantity is outside its admissible range.
    #[error("invalid {field}: {value} (expected {expected})")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The referral wage schedule is not strictly increasing; the parameter
    /// region does not support a dispersed-wage equilibrium.
    #[error("degenerate wage schedule: w(q) not strictly increasing near q = {q}")]
    DegenerateSchedule { q: f64 },

    /// Minority workers receive no referral offers, so the acceptance ratio
    /// gamma is undefined.
    #[error("minority escape probability is 1 (no minority referral offers); gamma undefined")]
    NoMinorityOffers,

    /// A respondent nominated no one, so send-network density has a zero
    /// denominator.
    #[error("send-network of {ego_id} has fewer than two nodes; density undefined")]
    UndefinedDensity { ego_id: String },

    /// A calibration group has no usable records for some statistic.
    #[error("no usable {group} records for {statistic}")]
    EmptyGroup {
        group: &'static str,
        statistic: &'static str,
    },

    #[error("malformed input at line {line}: {message}")]
    MalformedInput { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 validation, 3 numerical degeneracy,
    /// 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. }
            | Error::UndefinedDensity { .. }
            | Error::EmptyGroup { .. }
            | Error::MalformedInput { .. } => 2,
            Error::DegenerateSchedule { .. } | Error::NoMinorityOffers => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
