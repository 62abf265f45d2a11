use std::path::PathBuf;

/// Errors raised anywhere in the toolkit.
///
/// Variants split into two families that the command line maps onto distinct
/// exit codes: data that fails validation, and failures to reach data
/// (filesystem, network).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed JSON at byte {offset}: {message}")]
    Json { offset: usize, message: String },

    #[error("schema error{}: {message}", location(.id, .field))]
    Schema {
        id: Option<String>,
        field: Option<String>,
        message: String,
    },

    #[error("instance {id}: {message}")]
    Labels { id: String, message: String },

    #[error("metric error: {0}")]
    Metric(String),

    #[error("missing predictions for {} id(s): {}", .0.len(), preview(.0))]
    MissingPredictions(Vec<String>),

    #[error("run error{}: {message}", location(.id, &None))]
    Run { id: Option<String>, message: String },

    #[error("prompt error: {0}")]
    Prompt(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn schema(id: Option<&str>, field: Option<&str>, message: impl Into<String>) -> Self {
        Error::Schema {
            id: id.map(str::to_owned),
            field: field.map(str::to_owned),
            message: message.into(),
        }
    }

    pub(crate) fn run(id: Option<&str>, message: impl Into<String>) -> Self {
        Error::Run {
            id: id.map(str::to_owned),
            message: message.into(),
        }
    }

    /// True for failures to read, write, or reach data, as opposed to data
    /// that was read and found invalid.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Transport(_))
    }

    /// Converts a `serde_json` error into [`Error::Json`], resolving the
    /// reported line/column into a byte offset within `raw`.
    pub(crate) fn from_json(err: &serde_json::Error, raw: &[u8]) -> Self {
        let offset = byte_offset(raw, err.line(), err.column());
        let mut message = err.to_string();
        // serde_json appends " at line X column Y"; the offset replaces it.
        if let Some(idx) = message.rfind(" at line ") {
            message.truncate(idx);
        }
        Error::Json { offset, message }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn location(id: &Option<String>, field: &Option<String>) -> String {
    match (id, field) {
        (Some(id), Some(field)) => format!(" in instance {id}, field {field}"),
        (Some(id), None) => format!(" in instance {id}"),
        (None, Some(field)) => format!(" in field {field}"),
        (None, None) => String::new(),
    }
}

fn preview(ids: &[String]) -> String {
    const SHOWN: usize = 10;
    let mut out = ids.iter().take(SHOWN).cloned().collect::<Vec<_>>().join(", ");
    if ids.len() > SHOWN {
        out.push_str(&format!(", ... ({} more)", ids.len() - SHOWN));
    }
    out
}

/// serde_json reports 1-based lines and 1-based byte columns; line 0 means
/// the error has no position (e.g. an I/O error).
fn byte_offset(raw: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut current = 1;
    let mut line_start = 0;
    for (i, b) in raw.iter().enumerate() {
        if current == line {
            break;
        }
        if *b == b'\n' {
            current += 1;
            line_start = i + 1;
        }
    }
    (line_start + column.saturating_sub(1)).min(raw.len())
}
