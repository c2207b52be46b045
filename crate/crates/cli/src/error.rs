use std::fmt;
use std::process::ExitCode;

/// Error category, mapped to a distinct exit code so scripts can branch on
/// the failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliErrorKind {
    /// Bad parameters, malformed config files, physics domain errors. Exit 2.
    Config,
    /// Filesystem and parsing trouble on inputs/outputs. Exit 3.
    Io,
    /// Statistically insufficient or empty results. Exit 4.
    Statistics,
}

impl CliErrorKind {
    pub fn exit_code(self) -> ExitCode {
        match self {
            CliErrorKind::Config => ExitCode::from(2),
            CliErrorKind::Io => ExitCode::from(3),
            CliErrorKind::Statistics => ExitCode::from(4),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CliErrorKind::Config => "config",
            CliErrorKind::Io => "io",
            CliErrorKind::Statistics => "statistics",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: CliErrorKind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: CliErrorKind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }

    /// Machine-readable form printed to stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind.label(), "message": self.message } })
            .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.label(), self.message)
    }
}

impl From<qtraj_core::Error> for CliError {
    fn from(err: qtraj_core::Error) -> Self {
        let kind = match err {
            qtraj_core::Error::InsufficientStatistics { .. } | qtraj_core::Error::EmptyEnsemble => {
                CliErrorKind::Statistics
            }
            _ => CliErrorKind::Config,
        };
        Self::new(kind, err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::new(CliErrorKind::Io, err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        Self::new(CliErrorKind::Config, format!("config parse error: {err}"))
    }
}
