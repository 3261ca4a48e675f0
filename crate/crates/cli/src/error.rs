use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Pipeline stage an error came from, used as the message prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Load,
    Prep,
    Mine,
    Postprocess,
    Report,
    Bench,
    Synth,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Load => "load",
            Stage::Prep => "prep",
            Stage::Mine => "mine",
            Stage::Postprocess => "postprocess",
            Stage::Report => "report",
            Stage::Bench => "bench",
            Stage::Synth => "synth",
        })
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Core {
        stage: Stage,
        #[source]
        source: sdtree_core::Error,
    },

    #[error("{stage}: {}: {source}", path.display())]
    Io {
        stage: Stage,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{stage}: invariant violated: {message}")]
    Invariant { stage: Stage, message: String },
}

impl CliError {
    pub fn core(stage: Stage) -> impl FnOnce(sdtree_core::Error) -> CliError {
        move |source| CliError::Core { stage, source }
    }

    pub fn io(stage: Stage, path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { stage, path, source }
    }

    /// 2 for configuration, 3 for data, 4 for broken internal invariants.
    pub fn exit_code(&self) -> i32 {
        use sdtree_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core { source, .. } => match source {
                E::Config(_) | E::Discretizer(_) => 2,
                E::Routing { .. } | E::UndefinedMeasure(_) | E::OracleGuard(_) => 4,
                _ => 3,
            },
            CliError::Io { .. } => 3,
            CliError::Invariant { .. } => 4,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
