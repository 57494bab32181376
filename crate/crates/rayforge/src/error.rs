use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {what}: {detail}")]
    Parse { what: String, detail: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{}: {source}", source.name())]
    Domain {
        #[from]
        source: rayforge_core::Error,
    },
    #[error("{0} certificate(s) failed")]
    CertificateFailed(usize),
}

impl CliError {
    pub fn parse(what: impl Into<String>, detail: impl ToString) -> Self {
        CliError::Parse { what: what.into(), detail: detail.to_string() }
    }

    /// 1 for domain failures, 2 for usage and input problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain { .. } | CliError::CertificateFailed(_) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
