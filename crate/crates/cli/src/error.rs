use std::path::{Path, PathBuf};

use pevgrid::charging::ChargingError;
use pevgrid::harness::HarnessError;

use crate::ingest::IngestError;
use crate::params::ParamError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{file}: {source}")]
    Params { file: String, source: ParamError },
    #[error(transparent)]
    Charging(#[from] ChargingError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 2 when the power flow failed to converge, 1 for every input or
    /// output problem.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Harness(e) if e.is_non_convergence() => 2,
            _ => 1,
        }
    }
}
