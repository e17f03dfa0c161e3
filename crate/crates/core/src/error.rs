use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alpha orders differ: n={left} vs n={right}")]
    MismatchedAlpha { left: usize, right: usize },

    #[error("truncation metadata differs: {0}")]
    MismatchedTruncation(String),

    #[error("element of Q[alpha]/alpha^(n+1) has zero constant term and is not invertible")]
    NonUnit,

    #[error("exponential needs a series with zero constant term")]
    NonZeroConstant,

    #[error("coefficient at alpha^{k} hbar^{j} lies above the window top {j_max}; raise --window-top")]
    WindowOverflow { k: usize, j: i32, j_max: i32 },

    #[error("hbar window too shallow: {0}; raise --hbar-depth")]
    WindowTooShallow(String),

    #[error("linear part of the coordinate map is singular")]
    SingularLinearPart,

    #[error("transversality fails: {0}")]
    Transversality(String),

    #[error("normalization step at t-degree {degree} is singular: {detail}")]
    SingularStep { degree: u32, detail: String },

    #[error("tensor is not integrable: {0}")]
    Integrability(String),

    #[error("WDVV reconstruction failed at degree {degree}: {detail}")]
    Oracle { degree: u32, detail: String },

    #[error("GW table has no entry for d={d}, m={m:?}")]
    MissingEntry { d: u32, m: Vec<u32> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for this error: 2 for configuration problems,
    /// 3 for window/resource limits, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::WindowOverflow { .. } | Error::WindowTooShallow(_) | Error::Io(_) => 3,
            _ => 1,
        }
    }
}
