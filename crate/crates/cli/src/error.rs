use std::path::PathBuf;

use swarmgc_core::Error as CoreError;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Schema violations; serde_yaml reports the line and the offending key.
    #[error("{}: {source}", .path.display())]
    Yaml {
        path: PathBuf,
        #[source]
        source: serde_yaml::Error,
    },

    #[error("{}:{line}: {msg}", .path.display())]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 4 for anything the user can fix in their input,
    /// 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Yaml { .. } | CliError::Parse { .. } | CliError::Validation(_) => 4,
            CliError::Core(
                CoreError::Validation(_)
                | CoreError::InvalidArgument(_)
                | CoreError::NoPrimitive { .. }
                | CoreError::RankDeficient { .. }
                | CoreError::DuplicateRadius { .. },
            ) => 4,
            CliError::Io { .. } | CliError::Csv(_) => 1,
        }
    }
}
