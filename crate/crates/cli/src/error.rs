use std::fmt;
use std::path::PathBuf;

use serde_json::json;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_MISSING_ARTIFACT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or input data.
    Validation(String),
    /// An upstream stage has not been run in this output directory.
    MissingArtifact { stage: &'static str, path: PathBuf },
    /// Anything else (I/O failures, broken invariants).
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::MissingArtifact { .. } => EXIT_MISSING_ARTIFACT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::MissingArtifact { .. } => "missing_artifact",
            CliError::Internal(_) => "internal",
        }
    }

    /// One-line JSON description for stderr.
    pub fn to_json(&self) -> String {
        let mut v = json!({
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        });
        if let CliError::MissingArtifact { stage, path } = self {
            v["error"]["required_stage"] = json!(stage);
            v["error"]["path"] = json!(path.display().to_string());
        }
        v.to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Internal(m) => f.write_str(m),
            CliError::MissingArtifact { stage, path } => write!(
                f,
                "missing artifact {}; run the `{stage}` subcommand first",
                path.display()
            ),
        }
    }
}

impl std::error::Error for CliError {}

impl From<skillforge_core::Error> for CliError {
    fn from(e: skillforge_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn malformed(path: &std::path::Path, reason: impl fmt::Display) -> CliError {
    CliError::Validation(format!("{}: {reason}", path.display()))
}
