use std::fmt::Write as _;

use crate::corpus::{AnnotatedTweet, Instance, Lang, SplitKind, Task2Vote};
use crate::error::{Error, Result};
use crate::labels::Task;

use super::sample::EXEMPLARS_PER_LANG;

pub const DEFAULT_TEMPLATE: &str = "v1";

/// Known template ids. The wording behind an id never changes.
pub const TEMPLATES: [&str; 2] = ["v1", "v1-terse"];

/// The tweet to be labelled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTarget {
    pub id: String,
    pub lang: Lang,
    pub text: String,
}

impl From<&Instance> for PromptTarget {
    fn from(i: &Instance) -> Self {
        PromptTarget {
            id: i.id().to_owned(),
            lang: i.lang(),
            text: i.text().to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PromptSpec {
    pub task: Task,
    /// Three English then three Spanish training tweets.
    pub exemplars: Vec<AnnotatedTweet>,
    pub target: PromptTarget,
    pub template_id: String,
    pub seed: u64,
}

impl PromptSpec {
    pub fn validate(&self) -> Result<()> {
        for lang in [Lang::En, Lang::Es] {
            let n = self.exemplars.iter().filter(|e| e.lang == lang).count();
            if n != EXEMPLARS_PER_LANG {
                return Err(Error::Prompt(format!(
                    "expected {EXEMPLARS_PER_LANG} {lang} exemplars, got {n}"
                )));
            }
        }
        if let Some(e) = self.exemplars.iter().find(|e| e.split.kind != SplitKind::Train) {
            return Err(Error::Prompt(format!(
                "exemplar {} is not from the training split",
                e.id
            )));
        }
        if self.exemplars.iter().any(|e| e.id == self.target.id) {
            return Err(Error::Prompt(format!(
                "target {} appears among its own exemplars",
                self.target.id
            )));
        }
        Ok(())
    }
}

/// Counts of each vote, most frequent first (ties in label order), e.g.
/// `"4 x YES, 2 x NO"`. Task 2 shows "-" votes as `NO`.
pub fn vote_summary(tweet: &AnnotatedTweet, task: Task) -> String {
    let labels: Vec<&'static str> = match task {
        Task::Task1 => tweet.votes_task1.iter().flatten().map(|v| v.as_str()).collect(),
        Task::Task2 => tweet
            .votes_task2
            .iter()
            .flatten()
            .map(|v| match v {
                Task2Vote::Dash => "NO",
                other => other.as_str(),
            })
            .collect(),
    };
    let order: &[&str] = match task {
        Task::Task1 => &["YES", "NO"],
        Task::Task2 => &["DIRECT", "REPORTED", "JUDGEMENTAL", "NO", "UNKNOWN"],
    };
    let mut counts: Vec<(usize, usize, &str)> = order
        .iter()
        .enumerate()
        .map(|(rank, label)| (labels.iter().filter(|l| *l == label).count(), rank, *label))
        .filter(|(n, _, _)| *n > 0)
        .collect();
    counts.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    counts
        .iter()
        .map(|(n, _, label)| format!("{n} x {label}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn answer_labels(task: Task) -> &'static str {
    match task {
        Task::Task1 => "YES, NO",
        Task::Task2 => "DIRECT, REPORTED, JUDGEMENTAL, NO",
    }
}

fn task_description(task: Task) -> &'static str {
    match task {
        Task::Task1 => {
            "You are annotating tweets written in English or Spanish. Decide whether the tweet is sexist: \
             answer YES if it contains sexist expressions or describes sexist behaviour or situations, \
             and NO otherwise. The possible labels are YES and NO."
        }
        Task::Task2 => {
            "You are annotating tweets written in English or Spanish. Decide the intention of the author. \
             The possible labels are:\n\
             - DIRECT: the message is sexist by itself or incites others to be sexist.\n\
             - REPORTED: the message reports a sexist situation suffered by a woman or women, in first or third person.\n\
             - JUDGEMENTAL: the message describes sexist situations or behaviour in order to condemn them.\n\
             - NO: the tweet is not sexist."
        }
    }
}

fn lang_name(lang: Lang) -> &'static str {
    match lang {
        Lang::En => "English",
        Lang::Es => "Spanish",
    }
}

/// Renders the prompt text for `spec`. Sections, in order: task description,
/// the six exemplars with their vote counts, the target tweet, and the
/// one-label answer instruction.
pub fn build_prompt(spec: &PromptSpec) -> Result<String> {
    spec.validate()?;
    let mut out = String::new();
    match spec.template_id.as_str() {
        "v1" => {
            out.push_str(task_description(spec.task));
            out.push_str(
                "\n\nBelow are example tweets, each labelled by several human annotators. The vote counts \
                 show how far the annotators agreed.\n",
            );
            for (i, e) in spec.exemplars.iter().enumerate() {
                let _ = write!(
                    out,
                    "\nExample {} ({})\nTweet: {}\nAnnotator votes: {}\n",
                    i + 1,
                    lang_name(e.lang),
                    e.text,
                    vote_summary(e, spec.task)
                );
            }
            let _ = write!(
                out,
                "\nNow label this tweet ({})\nTweet: {}\n\nAnswer with exactly one label from: {}. Do not write anything else.",
                lang_name(spec.target.lang),
                spec.target.text,
                answer_labels(spec.task)
            );
        }
        "v1-terse" => {
            let _ = writeln!(out, "Labels: {}", answer_labels(spec.task));
            for e in &spec.exemplars {
                let _ = write!(
                    out,
                    "\n[{}] {}\nvotes: {}\n",
                    e.lang,
                    e.text,
                    vote_summary(e, spec.task)
                );
            }
            let _ = write!(
                out,
                "\n[{}] {}\nReply with one label only ({}).",
                spec.target.lang,
                spec.target.text,
                answer_labels(spec.task)
            );
        }
        other => return Err(Error::Prompt(format!("unknown template {other:?}"))),
    }
    Ok(out)
}
