//! Prediction runs: the submission file format, the reference baselines and
//! multi-run comparison.
//!
//! A run file is a JSON array of `{"id": ..., "value": ...}` objects. A hard
//! value is a label token (`"YES"`, `"NO"`, `"DIRECT"`, `"REPORTED"`,
//! `"JUDGEMENTAL"`, `"-"`); a soft value is an object with one probability per
//! vocabulary category.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::corpus::Lang;
use crate::error::{Error, Result};
use crate::fmt_sum;
use crate::labels::{Category, LabelSummary, SoftLabel, Task, TaskVocabulary};
use crate::metrics::{score_run, ItemPrediction, MetricConfig, ScoreReport, SOFT_SUM_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Hard,
    Soft,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub name: String,
    pub task: Task,
    pub kind: RunKind,
    pub predictions: Vec<ItemPrediction>,
    /// Free-form provenance: model name, baseline kind, LLM endpoint.
    pub source: String,
}

impl Run {
    pub fn new(name: impl Into<String>, task: Task, kind: RunKind, predictions: Vec<ItemPrediction>) -> Result<Self> {
        let run = Run {
            name: name.into(),
            task,
            kind,
            predictions,
            source: String::new(),
        };
        run.validate()?;
        Ok(run)
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let vocab = self.task.vocabulary();
        let mut seen = HashSet::new();
        for p in &self.predictions {
            if !seen.insert(p.id.as_str()) {
                return Err(Error::run(Some(&p.id), "duplicate id"));
            }
            match (self.kind, &p.hard, &p.soft) {
                (RunKind::Hard, None, _) => return Err(Error::run(Some(&p.id), "hard run item has no label")),
                (RunKind::Soft, _, None) => return Err(Error::run(Some(&p.id), "soft run item has no probabilities")),
                _ => {}
            }
            if let Some(h) = p.hard {
                if !vocab.contains(h) {
                    return Err(Error::run(
                        Some(&p.id),
                        format!("label {h} is not a {} category", self.task),
                    ));
                }
            }
            if let Some(soft) = &p.soft {
                check_distribution(&p.id, soft, &vocab)?;
            }
        }
        Ok(())
    }
}

fn check_distribution(id: &str, soft: &SoftLabel, vocab: &TaskVocabulary) -> Result<()> {
    if let Some(c) = vocab.categories.iter().find(|c| !soft.contains_key(c)) {
        return Err(Error::run(Some(id), format!("missing probability for {c}")));
    }
    if let Some(c) = soft.keys().find(|c| !vocab.contains(**c)) {
        return Err(Error::run(
            Some(id),
            format!("category {c} is not in the {} vocabulary", vocab.task),
        ));
    }
    if let Some((c, w)) = soft.iter().find(|(_, w)| !w.is_finite() || **w < 0.0 || **w > 1.0) {
        return Err(Error::run(
            Some(id),
            format!("probability for {c} is out of range: {w}"),
        ));
    }
    let sum: f64 = soft.values().sum();
    if (sum - 1.0).abs() > SOFT_SUM_TOLERANCE {
        return Err(Error::run(Some(id), format!("probabilities sum to {}", fmt_sum(sum))));
    }
    Ok(())
}

/// Parses a run file for `task`. The run is named `"run"`; callers rename it.
pub fn load_run(raw: &[u8], task: Task) -> Result<Run> {
    let items: Vec<Value> = serde_json::from_slice(raw).map_err(|e| Error::from_json(&e, raw))?;
    let vocab = task.vocabulary();
    let mut predictions = Vec::with_capacity(items.len());
    let mut kind = None;

    for (i, item) in items.iter().enumerate() {
        let obj = item
            .as_object()
            .ok_or_else(|| Error::run(None, format!("entry {i} is not an object")))?;
        if let Some(k) = obj.keys().find(|k| *k != "id" && *k != "value") {
            return Err(Error::run(None, format!("entry {i} has unexpected key {k:?}")));
        }
        let id = obj
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::run(None, format!("entry {i} has no string id")))?;
        let value = obj.get("value").ok_or_else(|| Error::run(Some(id), "missing value"))?;

        let (item_kind, prediction) = match value {
            Value::String(token) => {
                let c = vocab
                    .parse_hard(token)
                    .ok_or_else(|| Error::run(Some(id), format!("unknown {task} label {token:?}")))?;
                (
                    RunKind::Hard,
                    ItemPrediction {
                        id: id.to_owned(),
                        hard: Some(c),
                        soft: None,
                    },
                )
            }
            Value::Object(map) => {
                let mut soft = SoftLabel::new();
                for (k, v) in map {
                    let c = vocab
                        .parse_soft_key(k)
                        .ok_or_else(|| Error::run(Some(id), format!("unknown {task} category {k:?}")))?;
                    let w = v
                        .as_f64()
                        .ok_or_else(|| Error::run(Some(id), format!("probability for {k} is not a number")))?;
                    if soft.insert(c, w).is_some() {
                        return Err(Error::run(Some(id), format!("category {c} given twice")));
                    }
                }
                check_distribution(id, &soft, &vocab)?;
                (
                    RunKind::Soft,
                    ItemPrediction {
                        id: id.to_owned(),
                        hard: None,
                        soft: Some(soft),
                    },
                )
            }
            other => {
                return Err(Error::run(
                    Some(id),
                    format!("value must be a label or a probability map, found {other}"),
                ))
            }
        };

        match kind {
            None => kind = Some(item_kind),
            Some(k) if k != item_kind => {
                return Err(Error::run(Some(id), "run mixes hard labels and probability maps"));
            }
            _ => {}
        }
        predictions.push(prediction);
    }

    let run = Run {
        name: "run".into(),
        task,
        kind: kind.unwrap_or(RunKind::Hard),
        predictions,
        source: String::new(),
    };
    run.validate()?;
    Ok(run)
}

/// Writes a run file: one object per line in run order, soft keys sorted.
/// A soft run writes its probabilities only.
pub fn emit_submission(run: &Run) -> Vec<u8> {
    let vocab = run.task.vocabulary();
    let lines: Vec<String> = run
        .predictions
        .iter()
        .map(|p| {
            let value = match run.kind {
                RunKind::Hard => Value::from(vocab.hard_token(p.hard.expect("validated hard run"))),
                RunKind::Soft => {
                    let soft: BTreeMap<&str, f64> = p
                        .soft
                        .as_ref()
                        .expect("validated soft run")
                        .iter()
                        .map(|(c, w)| (c.name(), *w))
                        .collect();
                    serde_json::to_value(soft).expect("finite probabilities")
                }
            };
            json!({ "id": p.id, "value": value }).to_string()
        })
        .collect();
    if lines.is_empty() {
        return b"[]\n".to_vec();
    }
    format!("[\n  {}\n]\n", lines.join(",\n  ")).into_bytes()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Gold,
    Majority,
    Minority,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 3] = [BaselineKind::Gold, BaselineKind::Majority, BaselineKind::Minority];

    pub fn run_name(self) -> &'static str {
        match self {
            BaselineKind::Gold => "gold",
            BaselineKind::Majority => "majority-class",
            BaselineKind::Minority => "minority-class",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.run_name())
    }
}

impl FromStr for BaselineKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gold" => Ok(BaselineKind::Gold),
            "majority" | "majority-class" => Ok(BaselineKind::Majority),
            "minority" | "minority-class" => Ok(BaselineKind::Minority),
            _ => Err(format!("unknown baseline {s:?} (expected gold, majority or minority)")),
        }
    }
}

/// Most frequent gold hard label; ties go to the earlier vocabulary category.
pub fn majority_class(gold: &[LabelSummary], vocab: &TaskVocabulary) -> Option<Category> {
    let counts = hard_counts(gold, vocab);
    let mut best: Option<(Category, usize)> = None;
    for (c, n) in counts.into_iter().filter(|(_, n)| *n > 0) {
        if best.is_none_or(|(_, b)| n > b) {
            best = Some((c, n));
        }
    }
    best.map(|(c, _)| c)
}

/// Least frequent gold hard label among those that occur; ties go to the
/// earlier vocabulary category.
pub fn minority_class(gold: &[LabelSummary], vocab: &TaskVocabulary) -> Option<Category> {
    let counts = hard_counts(gold, vocab);
    let mut best: Option<(Category, usize)> = None;
    for (c, n) in counts.into_iter().filter(|(_, n)| *n > 0) {
        if best.is_none_or(|(_, b)| n < b) {
            best = Some((c, n));
        }
    }
    best.map(|(c, _)| c)
}

fn hard_counts(gold: &[LabelSummary], vocab: &TaskVocabulary) -> Vec<(Category, usize)> {
    vocab
        .categories
        .iter()
        .map(|&c| (c, gold.iter().filter(|g| g.hard == Some(c)).count()))
        .collect()
}

/// Builds a reference run. The gold baseline copies every scorable gold
/// label; the class baselines predict one constant class for every item,
/// with all probability mass on it.
pub fn generate_baseline(kind: BaselineKind, gold: &[LabelSummary], task: Task) -> Result<Run> {
    if gold.is_empty() {
        return Err(Error::Metric("cannot build a baseline from an empty gold set".into()));
    }
    let vocab = task.vocabulary();
    let predictions = match kind {
        BaselineKind::Gold => gold
            .iter()
            .filter(|g| !g.is_excluded())
            .map(ItemPrediction::from_gold)
            .collect(),
        BaselineKind::Majority | BaselineKind::Minority => {
            let class = if kind == BaselineKind::Majority {
                majority_class(gold, &vocab)
            } else {
                minority_class(gold, &vocab)
            }
            .ok_or_else(|| Error::Metric("gold set has no hard labels".into()))?;
            let one_hot: SoftLabel = vocab
                .categories
                .iter()
                .map(|&c| (c, if c == class { 1.0 } else { 0.0 }))
                .collect();
            gold.iter()
                .map(|g| ItemPrediction {
                    id: g.id.clone(),
                    hard: Some(class),
                    soft: Some(one_hot.clone()),
                })
                .collect()
        }
    };
    Ok(Run::new(kind.run_name(), task, RunKind::Soft, predictions)?.with_source(format!("baseline:{kind}")))
}

/// Scores the three baselines followed by `runs`, in that order.
pub fn compare(
    runs: &[Run],
    gold: &[LabelSummary],
    task: Task,
    cfg: &MetricConfig,
    lang: Option<Lang>,
) -> Result<Vec<ScoreReport>> {
    if let Some(r) = runs.iter().find(|r| r.task != task) {
        return Err(Error::run(
            None,
            format!("run {} is for {} but the gold set is {task}", r.name, r.task),
        ));
    }
    let mut reports = Vec::with_capacity(runs.len() + 3);
    for kind in BaselineKind::ALL {
        let baseline = generate_baseline(kind, gold, task)?;
        reports.push(score_run(&baseline, gold, cfg, lang)?);
    }
    for run in runs {
        reports.push(score_run(run, gold, cfg, lang)?);
    }
    Ok(reports)
}
