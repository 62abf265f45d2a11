use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::LlmEndpointConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

/// Body of an OpenAI-style chat-completions request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
}

impl ChatRequest {
    pub fn user(model: &str, prompt: String, temperature: f64) -> Self {
        ChatRequest {
            model: model.to_owned(),
            messages: vec![ChatMessage {
                role: "user".into(),
                content: prompt,
            }],
            temperature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    /// Worth another attempt: timeouts, connection failures, 429 and 5xx.
    #[error("{0}")]
    Retryable(String),
    #[error("{0}")]
    Fatal(String),
}

/// Sends one request and returns the text of the model's reply.
pub trait ChatTransport: Send + Sync {
    fn complete(&self, target_id: &str, request: &ChatRequest) -> Result<String, TransportError>;
}

/// Blocking HTTP client for a chat-completions endpoint.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
    url: String,
    token: Option<String>,
}

impl std::fmt::Debug for HttpTransport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpTransport")
            .field("url", &self.url)
            .field("token", &self.token.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

impl HttpTransport {
    /// Builds the client. When `token_env` is set, that variable must exist.
    pub fn new(cfg: &LlmEndpointConfig) -> Result<Self> {
        let token = match &cfg.token_env {
            Some(name) => Some(
                std::env::var(name).map_err(|_| Error::Config(format!("environment variable {name} is not set")))?,
            ),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(cfg.timeout())
            .build()
            .map_err(|e| Error::Transport(e.to_string()))?;
        Ok(HttpTransport {
            client,
            url: cfg.base_url.clone(),
            token,
        })
    }
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ReplyMessage,
}

#[derive(Deserialize)]
struct ReplyMessage {
    #[serde(default)]
    content: Option<String>,
}

impl ChatTransport for HttpTransport {
    fn complete(&self, _target_id: &str, request: &ChatRequest) -> Result<String, TransportError> {
        let mut req = self.client.post(&self.url).json(request);
        if let Some(token) = &self.token {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| TransportError::Retryable(e.to_string()))?;
        let status = resp.status();
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(TransportError::Retryable(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(TransportError::Fatal(format!("HTTP {status}")));
        }
        let body: CompletionResponse = resp
            .json()
            .map_err(|e| TransportError::Fatal(format!("unexpected response body: {e}")))?;
        body.choices
            .into_iter()
            .next()
            .map(|c| c.message.content.unwrap_or_default())
            .ok_or_else(|| TransportError::Fatal("response has no choices".into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Scripted {
    Reply(String),
    Fail(TransportError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptLine {
    id: String,
    #[serde(default)]
    response: Option<String>,
    #[serde(default)]
    error: Option<String>,
    #[serde(default)]
    fatal: bool,
}

/// Offline stand-in for an endpoint, replaying canned replies per target id.
///
/// Each id owns a queue of outcomes consumed one per call; once the queue is
/// down to its last entry, that entry repeats. The id `*` supplies replies
/// for targets without a queue of their own.
#[derive(Debug, Default)]
pub struct ScriptedResponder {
    scripts: HashMap<String, Vec<Scripted>>,
    calls: Mutex<HashMap<String, usize>>,
}

impl ScriptedResponder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads JSON lines of the form `{"id": .., "response": ..}` or
    /// `{"id": .., "error": .., "fatal": false}`. Blank lines are skipped.
    pub fn from_jsonl(raw: &str) -> Result<Self> {
        let mut out = Self::new();
        for (lineno, line) in raw.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: ScriptLine =
                serde_json::from_str(line).map_err(|e| Error::Config(format!("script line {}: {e}", lineno + 1)))?;
            out = match (entry.response, entry.error) {
                (Some(text), None) => out.reply(entry.id, text),
                (None, Some(msg)) if entry.fatal => out.fail_fatal(entry.id, msg),
                (None, Some(msg)) => out.fail(entry.id, msg),
                _ => {
                    return Err(Error::Config(format!(
                        "script line {}: exactly one of \"response\" and \"error\" is required",
                        lineno + 1
                    )))
                }
            };
        }
        Ok(out)
    }

    fn push(mut self, id: impl Into<String>, outcome: Scripted) -> Self {
        self.scripts.entry(id.into()).or_default().push(outcome);
        self
    }

    pub fn reply(self, id: impl Into<String>, text: impl Into<String>) -> Self {
        self.push(id, Scripted::Reply(text.into()))
    }

    pub fn fail(self, id: impl Into<String>, message: impl Into<String>) -> Self {
        self.push(id, Scripted::Fail(TransportError::Retryable(message.into())))
    }

    pub fn fail_fatal(self, id: impl Into<String>, message: impl Into<String>) -> Self {
        self.push(id, Scripted::Fail(TransportError::Fatal(message.into())))
    }

    /// Number of calls received for `target_id`.
    pub fn calls(&self, target_id: &str) -> usize {
        self.calls.lock().unwrap().get(target_id).copied().unwrap_or(0)
    }
}

impl ChatTransport for ScriptedResponder {
    fn complete(&self, target_id: &str, _request: &ChatRequest) -> Result<String, TransportError> {
        let queue = self
            .scripts
            .get(target_id)
            .or_else(|| self.scripts.get("*"))
            .ok_or_else(|| TransportError::Fatal(format!("no scripted reply for {target_id}")))?;
        let n = {
            let mut calls = self.calls.lock().unwrap();
            let n = calls.entry(target_id.to_owned()).or_insert(0);
            *n += 1;
            *n - 1
        };
        match &queue[n.min(queue.len() - 1)] {
            Scripted::Reply(text) => Ok(text.clone()),
            Scripted::Fail(e) => Err(e.clone()),
        }
    }
}
