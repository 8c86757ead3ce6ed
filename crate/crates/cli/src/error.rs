use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] casimir_slab::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Internal(String),
    #[error("{failed} of {total} report checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

#[derive(Serialize)]
struct Payload<'a> {
    error_kind: &'a str,
    message: String,
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "invalid_argument",
            CliError::Io { .. } => "io",
            CliError::Internal(_) => "internal",
            CliError::ChecksFailed { .. } => "check_failed",
        }
    }

    /// 2 for bad input, 3 for numeric failure, 1 for anything internal.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_invalid_input() => 2,
            CliError::Core(_) | CliError::ChecksFailed { .. } => 3,
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Internal(_) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let payload = Payload {
            error_kind: self.kind(),
            message: self.to_string(),
        };
        serde_json::to_string(&payload)
            .unwrap_or_else(|_| format!("{{\"error_kind\":\"{}\"}}", self.kind()))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
