use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::{json, Value};

use crate::corpus::{Corpus, SplitKind};
use crate::error::{Error, Result};
use crate::labels::{aggregate, Category, Task};
use crate::metrics::ItemPrediction;
use crate::runs::{majority_class, Run, RunKind};

use super::parse::parse_response;
use super::prompt::{build_prompt, PromptSpec, PromptTarget};
use super::sample::sample_exemplars;
use super::transport::{ChatRequest, ChatTransport, TransportError};
use super::LlmEndpointConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotationStatus {
    Ok,
    /// Every reply was received but none contained exactly one label.
    Unparseable,
    /// The last attempt failed to get a reply.
    TransportError,
}

impl AnnotationStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationStatus::Ok => "ok",
            AnnotationStatus::Unparseable => "unparseable",
            AnnotationStatus::TransportError => "transport_error",
        }
    }
}

/// Outcome for one target tweet.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub id: String,
    /// Last reply received, if any.
    pub raw_response: Option<String>,
    pub parsed: Option<Category>,
    /// Label written to the run: `parsed`, or the fallback class.
    pub label: Category,
    /// Number of requests sent.
    pub attempts: u32,
    pub status: AnnotationStatus,
    pub error: Option<String>,
}

impl Annotation {
    pub fn to_json(&self, task: Task) -> Value {
        let vocab = task.vocabulary();
        json!({
            "id": self.id,
            "status": self.status.as_str(),
            "attempts": self.attempts,
            "raw_response": self.raw_response,
            "parsed": self.parsed.map(|c| vocab.hard_token(c)),
            "label": vocab.hard_token(self.label),
            "error": self.error,
        })
    }
}

/// Few-shot annotation of a list of targets against one endpoint.
pub struct Annotator<'a> {
    corpus: &'a Corpus,
    cfg: &'a LlmEndpointConfig,
    task: Task,
    seed: u64,
    transport: &'a dyn ChatTransport,
    fallback: Category,
    done: AtomicUsize,
}

impl<'a> Annotator<'a> {
    pub fn new(
        corpus: &'a Corpus,
        cfg: &'a LlmEndpointConfig,
        task: Task,
        seed: u64,
        transport: &'a dyn ChatTransport,
    ) -> Result<Self> {
        cfg.validate()?;
        let train = corpus
            .annotated()
            .filter(|t| t.split.kind == SplitKind::Train)
            .map(|t| aggregate(t, task))
            .collect::<Result<Vec<_>>>()?;
        let fallback = majority_class(&train, &task.vocabulary())
            .ok_or_else(|| Error::Prompt(format!("no training tweets with a {task} hard label")))?;
        Ok(Annotator {
            corpus,
            cfg,
            task,
            seed,
            transport,
            fallback,
            done: AtomicUsize::new(0),
        })
    }

    /// Class used when no label can be obtained: the training-split majority.
    pub fn fallback(&self) -> Category {
        self.fallback
    }

    /// Number of targets finished so far.
    pub fn progress(&self) -> usize {
        self.done.load(Ordering::Relaxed)
    }

    /// The prompt sent for the target at position `index`.
    pub fn prompt_for(&self, index: usize, target: &PromptTarget) -> Result<String> {
        let seed = self.seed.wrapping_add(index as u64);
        let spec = PromptSpec {
            task: self.task,
            exemplars: sample_exemplars(self.corpus, self.task, seed, Some(&target.id))?,
            target: target.clone(),
            template_id: self.cfg.template_id.clone(),
            seed,
        };
        build_prompt(&spec)
    }

    pub fn annotate_one(&self, index: usize, target: &PromptTarget) -> Result<Annotation> {
        let prompt = self.prompt_for(index, target)?;
        let request = ChatRequest::user(&self.cfg.model, prompt, self.cfg.temperature);
        let mut out = Annotation {
            id: target.id.clone(),
            raw_response: None,
            parsed: None,
            label: self.fallback,
            attempts: 0,
            status: AnnotationStatus::TransportError,
            error: None,
        };
        for attempt in 0..=self.cfg.max_retries {
            if attempt > 0 {
                std::thread::sleep(self.cfg.backoff(attempt));
            }
            out.attempts += 1;
            match self.transport.complete(&target.id, &request) {
                Ok(text) => {
                    out.parsed = parse_response(&text, self.task);
                    out.raw_response = Some(text);
                    out.error = None;
                    if let Some(c) = out.parsed {
                        out.label = c;
                        out.status = AnnotationStatus::Ok;
                        break;
                    }
                    out.status = AnnotationStatus::Unparseable;
                }
                Err(e) => {
                    out.status = AnnotationStatus::TransportError;
                    out.error = Some(e.to_string());
                    if matches!(e, TransportError::Fatal(_)) {
                        break;
                    }
                }
            }
        }
        self.done.fetch_add(1, Ordering::Relaxed);
        Ok(out)
    }

    /// Annotates every target, at most `max_concurrent` at a time. Results
    /// are in target order regardless of completion order.
    pub fn run(&self, targets: &[PromptTarget]) -> Result<(Run, Vec<Annotation>)> {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<Result<Annotation>>>> = Mutex::new((0..targets.len()).map(|_| None).collect());
        let workers = self.cfg.max_concurrent.min(targets.len()).max(1);
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(target) = targets.get(i) else { break };
                    let result = self.annotate_one(i, target);
                    slots.lock().unwrap()[i] = Some(result);
                });
            }
        });
        let annotations = slots
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|slot| slot.expect("every target is processed"))
            .collect::<Result<Vec<_>>>()?;

        if !annotations.is_empty() && annotations.iter().all(|a| a.status == AnnotationStatus::TransportError) {
            return Err(Error::Transport(format!(
                "all {} requests failed; first error: {}",
                annotations.len(),
                annotations[0].error.as_deref().unwrap_or("unknown")
            )));
        }

        let predictions = annotations
            .iter()
            .map(|a| ItemPrediction {
                id: a.id.clone(),
                hard: Some(a.label),
                soft: None,
            })
            .collect();
        let run = Run::new(
            format!("fewshot-{}", self.cfg.model),
            self.task,
            RunKind::Hard,
            predictions,
        )?
        .with_source(format!("fewshot:{}:{}", self.cfg.model, self.cfg.template_id));
        Ok((run, annotations))
    }
}

/// Convenience wrapper around [`Annotator::run`].
pub fn annotate(
    corpus: &Corpus,
    targets: &[PromptTarget],
    cfg: &LlmEndpointConfig,
    task: Task,
    seed: u64,
    transport: &dyn ChatTransport,
) -> Result<(Run, Vec<Annotation>)> {
    Annotator::new(corpus, cfg, task, seed, transport)?.run(targets)
}
