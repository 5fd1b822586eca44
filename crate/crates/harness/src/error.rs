use thiserror::Error;

/// Harness failures, grouped by the exit code the CLI reports.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// 2 for anything the user can fix in the config, 3 for runtime numerical
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numerical(_) => 3,
            HarnessError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<wdnoma::Error> for HarnessError {
    fn from(e: wdnoma::Error) -> Self {
        match e {
            wdnoma::Error::Config(m) | wdnoma::Error::Parse(m) => HarnessError::Config(m),
            wdnoma::Error::Numerical(m) => HarnessError::Numerical(m),
            wdnoma::Error::Io(source) => HarnessError::Io {
                path: "<toolkit>".into(),
                source,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(HarnessError::Config(msg.into()))
}
