use std::fmt;

use serde::Serialize;

/// Pipeline stage an error is attributed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Hdm,
    Pod,
    Interp,
    Rom,
    Evaluate,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Hdm => "hdm",
            Stage::Pod => "pod",
            Stage::Interp => "interp",
            Stage::Rom => "rom",
            Stage::Evaluate => "evaluate",
            Stage::Report => "report",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: grassmann_core::Error,
    },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::ConfigInvalid(msg.into())
    }

    /// `2` for numerical failures, `1` for everything the user can fix by
    /// changing the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Stage { source, .. } if source.is_numerical() => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::ConfigInvalid(_) => "config_invalid",
            CliError::Stage { source, .. } => source.kind(),
            CliError::Io(_) => "io",
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            CliError::Stage { stage, .. } => Some(*stage),
            CliError::ConfigInvalid(_) => Some(Stage::Config),
            CliError::Io(_) => None,
        }
    }

    /// Machine-readable form written to stderr under `--json-errors`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "error": self.kind(),
            "stage": self.stage(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
    }
}

/// Attaches a stage to core results.
pub trait AtStage<T> {
    fn at(self, stage: Stage) -> CliResult<T>;
}

impl<T> AtStage<T> for grassmann_core::Result<T> {
    fn at(self, stage: Stage) -> CliResult<T> {
        self.map_err(|source| CliError::Stage { stage, source })
    }
}
