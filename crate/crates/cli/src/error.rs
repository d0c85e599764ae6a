use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

/// Pipeline stage, used to tag errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Preprocess,
    Filtration,
    Write,
    Compare,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Preprocess => "preprocess",
            Stage::Filtration => "filtration",
            Stage::Write => "write",
            Stage::Compare => "compare",
        })
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}{}: {message}", .path.display(), page_suffix(*.page))]
    Decode {
        path: PathBuf,
        page: Option<usize>,
        message: String,
    },

    #[error("{}{}: {found:?} does not match the first slice {expected:?} (width, height)", .path.display(), page_suffix(*.page))]
    SliceMismatch {
        path: PathBuf,
        page: Option<usize>,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("{}{}: {found}-bit slice in a {expected}-bit stack", .path.display(), page_suffix(*.page))]
    MixedBitDepth {
        path: PathBuf,
        page: Option<usize>,
        expected: u32,
        found: u32,
    },

    #[error("no input images match {0}")]
    NoInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}: {message}", .path.display())]
    Schema { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] persistack_core::Error),

    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<CliError>,
    },
}

fn page_suffix(page: Option<usize>) -> String {
    page.map(|p| format!(" (page {p})")).unwrap_or_default()
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn decode(path: impl Into<PathBuf>, page: Option<usize>, message: impl fmt::Display) -> Self {
        CliError::Decode {
            path: path.into(),
            page,
            message: message.to_string(),
        }
    }

    pub fn in_stage(self, stage: Stage) -> Self {
        CliError::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            CliError::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T, E: Into<CliError>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.into().in_stage(stage))
    }
}
