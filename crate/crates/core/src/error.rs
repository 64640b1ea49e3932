use thiserror::Error;

use crate::distributions::DistributionError;
use crate::maxima_store::StoreError;
use crate::qomax::QoMaxError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Distribution(#[from] DistributionError),

    #[error(transparent)]
    Store(#[from] StoreError),

    #[error(transparent)]
    QoMax(#[from] QoMaxError),

    #[error("horizon {horizon} cannot fit an exploration phase of {required} pulls")]
    HorizonTooSmall { horizon: u64, required: u64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unknown preset {0} (expected 1..=8)")]
    UnknownPreset(u32),

    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
