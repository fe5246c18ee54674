use kdq_core::KdError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid scenario field `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("postselection impossible: probability {probability:e} is at or below the 1e-12 floor")]
    Postselection { probability: f64 },

    #[error("numerical invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Validation {
            field: field.into(),
            message: message.to_string(),
        }
    }

    /// Process exit status.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Validation { .. } => 2,
            CliError::Postselection { .. } => 3,
            CliError::Invariant(_) => 4,
            CliError::Write(_) => 1,
        }
    }

    /// Map a library error raised while evaluating `field`.
    pub fn from_core(field: &str, err: KdError) -> Self {
        match err {
            KdError::OrthogonalPostselection { probability } | KdError::ImpossiblePostselection { probability } => {
                CliError::Postselection { probability }
            }
            KdError::CorruptTable { residual } => {
                CliError::Invariant(format!("KD marginal imaginary residue {residual:e}"))
            }
            other => CliError::validation(field, other),
        }
    }
}
