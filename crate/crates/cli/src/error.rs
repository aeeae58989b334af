use std::path::Path;

use qrgraph::charsum::CharSumError;
use qrgraph::extremal::ExtremalError;
use qrgraph::ff::FfError;
use qrgraph::graph::GraphError;
use qrgraph::poly::PolyError;
use qrgraph::quasirand::QuasiError;
use qrgraph::spectral::SpectralError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Quasi(#[from] QuasiError),
    #[error(transparent)]
    Extremal(#[from] ExtremalError),
    #[error(transparent)]
    CharSum(#[from] CharSumError),
    #[error("bad CSV input: {0}")]
    BadCsv(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> CliError {
        CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    }

    /// Stable machine-readable error kind.
    pub fn kind(&self) -> String {
        let debug = match self {
            CliError::Usage(_) => return "Usage".into(),
            CliError::BadCsv(_) => return "BadCsv".into(),
            CliError::Io(_) => return "IoError".into(),
            CliError::Internal(_) => return "Internal".into(),
            CliError::Field(e) => format!("{e:?}"),
            CliError::Poly(e) => format!("{e:?}"),
            CliError::Graph(GraphError::Io(_)) => return "IoError".into(),
            CliError::Graph(GraphError::Poly(e)) => format!("{e:?}"),
            CliError::Graph(GraphError::Field(e)) => format!("{e:?}"),
            CliError::Graph(e) => format!("{e:?}"),
            CliError::Spectral(e) => format!("{e:?}"),
            CliError::Quasi(e) => format!("{e:?}"),
            CliError::Extremal(ExtremalError::Graph(e)) => format!("{e:?}"),
            CliError::Extremal(e) => format!("{e:?}"),
            CliError::CharSum(CharSumError::Poly(e)) => format!("{e:?}"),
            CliError::CharSum(e) => format!("{e:?}"),
        };
        debug
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or("Error")
            .to_string()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"error": self.kind(), "message": self.to_string()})
    }
}
