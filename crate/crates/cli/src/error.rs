use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_SINGULAR: u8 = 4;
pub const EXIT_DIVERGENCE: u8 = 5;
pub const EXIT_DEGENERATE: u8 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// `row` is the 1-based line in the file, `column` the 1-based field.
    #[error("{path}: line {row}, column {column}: {message}")]
    Parse {
        path: String,
        row: u64,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Input { path: String, message: String },

    #[error("{context}: {source}")]
    Analysis {
        context: String,
        #[source]
        source: infoflow::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use infoflow::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse { .. } | CliError::Input { .. } => EXIT_PARSE,
            CliError::Io { .. } => EXIT_OTHER,
            CliError::Analysis { source, .. } => match source {
                E::SingularCovariance { .. } | E::SingularInformation { .. } => EXIT_SINGULAR,
                E::Divergence { .. } => EXIT_DIVERGENCE,
                E::DegenerateInput { .. } | E::DegenerateNormalizer { .. } => EXIT_DEGENERATE,
                E::InvalidArgument(_) => EXIT_USAGE,
                E::InvalidPanel(_) => EXIT_PARSE,
                E::Serialization(_) => EXIT_OTHER,
            },
        }
    }

    pub(crate) fn analysis(context: impl Into<String>, source: infoflow::Error) -> Self {
        CliError::Analysis {
            context: context.into(),
            source,
        }
    }
}
