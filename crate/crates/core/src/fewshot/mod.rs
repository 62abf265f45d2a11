//! Few-shot LLM annotation.
//!
//! Every target tweet gets its own prompt with freshly sampled exemplars:
//! three English and three Spanish training tweets, each shown with its
//! annotator vote counts. The model answers with a single hard label.

mod annotate;
mod parse;
mod prompt;
mod sample;
mod transport;

pub use annotate::{annotate, Annotation, AnnotationStatus, Annotator};
pub use parse::parse_response;
pub use prompt::{build_prompt, vote_summary, PromptSpec, PromptTarget, DEFAULT_TEMPLATE, TEMPLATES};
pub use sample::{sample_exemplars, EXEMPLARS_PER_LANG};
pub use transport::{ChatMessage, ChatRequest, ChatTransport, HttpTransport, ScriptedResponder, TransportError};

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chat-completion endpoint settings, read from a JSON file.
///
/// The bearer token is never stored: `token_env` names the environment
/// variable that holds it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmEndpointConfig {
    /// Full URL of the chat-completions endpoint.
    pub base_url: String,
    pub model: String,
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_max_concurrent")]
    pub max_concurrent: usize,
    #[serde(default)]
    pub temperature: f64,
    /// Base delay before the first retry; doubles on each further retry.
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    #[serde(default = "default_template")]
    pub template_id: String,
}

fn default_timeout_secs() -> u64 {
    60
}

fn default_max_retries() -> u32 {
    3
}

fn default_max_concurrent() -> usize {
    4
}

fn default_backoff_ms() -> u64 {
    500
}

fn default_template() -> String {
    DEFAULT_TEMPLATE.to_owned()
}

const MAX_BACKOFF: Duration = Duration::from_secs(30);

impl LlmEndpointConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        LlmEndpointConfig {
            base_url: base_url.into(),
            model: model.into(),
            token_env: None,
            timeout_secs: default_timeout_secs(),
            max_retries: default_max_retries(),
            max_concurrent: default_max_concurrent(),
            temperature: 0.0,
            backoff_ms: default_backoff_ms(),
            template_id: default_template(),
        }
    }

    pub fn from_json(raw: &[u8]) -> Result<Self> {
        let cfg: LlmEndpointConfig = serde_json::from_slice(raw).map_err(|e| Error::from_json(&e, raw))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_concurrent == 0 {
            return Err(Error::Config("max_concurrent must be at least 1".into()));
        }
        if let Some(name) = &self.token_env {
            let valid = !name.is_empty()
                && !name.starts_with(|c: char| c.is_ascii_digit())
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::Config(format!(
                    "token_env must name an environment variable, not hold a token (got {} characters)",
                    name.len()
                )));
            }
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(Error::Config(format!(
                "temperature {} is outside [0, 2]",
                self.temperature
            )));
        }
        if !TEMPLATES.contains(&self.template_id.as_str()) {
            return Err(Error::Prompt(format!("unknown template {:?}", self.template_id)));
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    /// Delay before retry number `retry` (1-based).
    pub fn backoff(&self, retry: u32) -> Duration {
        let factor = 1u64 << retry.saturating_sub(1).min(20);
        Duration::from_millis(self.backoff_ms.saturating_mul(factor)).min(MAX_BACKOFF)
    }
}
