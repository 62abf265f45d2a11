//! Evaluation metrics: information content, ICM over hard and soft
//! assignments, normalized ICM, cross-entropy and F1.
//!
//! ICM compares a system assignment `A` with a gold assignment `B` as
//!
//! ```text
//! ICM(A, B) = α₁·IC(A) + α₂·IC(B) − β·IC(A ∪ B)
//! ```
//!
//! with `IC(c) = −log₂ P̂(c)`. The defaults α₁ = α₂ = 2, β = 3 give
//! `ICM(A, A) = IC(A)`, so a perfect run scores the gold set's mean
//! information content.
//!
//! For hard labels the categories are flat and mutually exclusive:
//! `IC({s, g}) = IC(s) + IC(g)` when `s ≠ g`.
//!
//! For soft labels an assignment is a set of `(category, weight)` pairs with
//! positive weight. Its information content is
//! `Σ_c −log₂ P̂_c(v ≥ v_c)`, where `P̂_c` is the empirical exceedance of the
//! gold soft weights for `c`; a union keeps the larger weight per category.

use std::collections::HashMap;

use crate::corpus::Lang;
use crate::error::{Error, Result};
use crate::labels::{estimate_priors, Category, CategoryModel, LabelSummary, SoftLabel, Task, TaskVocabulary};
use crate::runs::{Run, RunKind};

/// Tolerance on the sum of a predicted probability vector.
pub const SOFT_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    /// Probability floor inside the cross-entropy logarithm.
    pub epsilon: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            alpha1: 2.0,
            alpha2: 2.0,
            beta: 3.0,
            epsilon: 1e-4,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha1 != self.alpha2 || self.alpha1.is_nan() || self.alpha1 <= 0.0 {
            return Err(Error::Config(format!(
                "alpha1 and alpha2 must be equal and positive (got {} and {})",
                self.alpha1, self.alpha2
            )));
        }
        if self.beta.is_nan() || self.beta <= 0.0 {
            return Err(Error::Config(format!("beta must be positive (got {})", self.beta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 0.5) (got {})",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// One system output for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemPrediction {
    pub id: String,
    pub hard: Option<Category>,
    pub soft: Option<SoftLabel>,
}

impl ItemPrediction {
    /// The explicit hard label, or the first-in-vocabulary argmax of the soft one.
    pub fn hard_label(&self, vocab: &TaskVocabulary) -> Option<Category> {
        self.hard.or_else(|| self.soft.as_ref().and_then(|s| vocab.argmax(s)))
    }

    pub fn from_gold(gold: &LabelSummary) -> Self {
        ItemPrediction {
            id: gold.id.clone(),
            hard: gold.hard,
            soft: (!gold.soft.is_empty()).then(|| gold.soft.clone()),
        }
    }
}

/// A dataset-level metric value and how many items it averaged over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue {
    pub value: f64,
    pub n_scored: usize,
}

/// Sum by recursive halving, so results do not depend on how a caller
/// partitions the work.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn mean(values: &[f64]) -> Result<MetricValue> {
    if values.is_empty() {
        return Err(Error::Metric("no items to score".into()));
    }
    Ok(MetricValue {
        value: pairwise_sum(values) / values.len() as f64,
        n_scored: values.len(),
    })
}

/// `−log₂ P̂(c)` in bits.
pub fn ic(category: Category, model: &CategoryModel) -> Result<f64> {
    let p = model.prior(category).ok_or_else(|| {
        Error::Metric(format!(
            "category {category} is not in the {} vocabulary",
            model.vocab.task
        ))
    })?;
    Ok(-p.log2())
}

fn index_predictions(pred: &[ItemPrediction]) -> HashMap<&str, &ItemPrediction> {
    pred.iter().map(|p| (p.id.as_str(), p)).collect()
}

fn check_soft(p: &ItemPrediction, soft: &SoftLabel, vocab: &TaskVocabulary) -> Result<()> {
    if let Some(c) = soft.keys().find(|c| !vocab.contains(**c)) {
        return Err(Error::run(
            Some(&p.id),
            format!("category {c} is not in the {} vocabulary", vocab.task),
        ));
    }
    let sum: f64 = soft.values().sum();
    if (sum - 1.0).abs() > SOFT_SUM_TOLERANCE || soft.values().any(|w| w.is_nan() || *w < 0.0) {
        return Err(Error::run(
            Some(&p.id),
            format!("probabilities sum to {}", crate::fmt_sum(sum)),
        ));
    }
    Ok(())
}

/// Per-item hard ICM: `α₁·IC(s) + α₂·IC(g) − β·IC(s ∪ g)`.
pub fn icm_hard_item(system: Category, gold: Category, model: &CategoryModel, cfg: &MetricConfig) -> Result<f64> {
    let ic_s = ic(system, model)?;
    let ic_g = ic(gold, model)?;
    let ic_union = if system == gold { ic_s } else { ic_s + ic_g };
    Ok(cfg.alpha1 * ic_s + cfg.alpha2 * ic_g - cfg.beta * ic_union)
}

/// Mean hard ICM over gold items that have a hard label.
pub fn icm_hard(
    pred: &[ItemPrediction],
    gold: &[LabelSummary],
    model: &CategoryModel,
    cfg: &MetricConfig,
) -> Result<MetricValue> {
    let by_id = index_predictions(pred);
    let mut missing = Vec::new();
    let mut scores = Vec::new();
    for g in gold {
        let Some(gh) = g.hard else { continue };
        match by_id.get(g.id.as_str()).and_then(|p| p.hard_label(&model.vocab)) {
            Some(sh) => scores.push(icm_hard_item(sh, gh, model, cfg)?),
            None => missing.push(g.id.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingPredictions(missing));
    }
    mean(&scores)
}

/// Information content of a weighted assignment: categories with zero
/// weight contribute nothing.
pub fn soft_ic(assignment: &SoftLabel, model: &CategoryModel) -> Result<f64> {
    let mut total = 0.0;
    for (&c, &v) in assignment {
        if v > 0.0 {
            let p = model
                .exceedance(c, v)
                .ok_or_else(|| Error::Metric(format!("no gold soft weights for category {c}")))?;
            total -= p.log2();
        }
    }
    Ok(total)
}

fn soft_union(a: &SoftLabel, b: &SoftLabel) -> SoftLabel {
    let mut out = a.clone();
    for (&c, &v) in b {
        let e = out.entry(c).or_insert(v);
        if v > *e {
            *e = v;
        }
    }
    out
}

pub fn icm_soft_item(system: &SoftLabel, gold: &SoftLabel, model: &CategoryModel, cfg: &MetricConfig) -> Result<f64> {
    let union = soft_union(system, gold);
    Ok(cfg.alpha1 * soft_ic(system, model)? + cfg.alpha2 * soft_ic(gold, model)? - cfg.beta * soft_ic(&union, model)?)
}

/// Mean soft ICM over gold items with a nonempty soft label.
pub fn icm_soft(
    pred: &[ItemPrediction],
    gold: &[LabelSummary],
    model: &CategoryModel,
    cfg: &MetricConfig,
) -> Result<MetricValue> {
    let by_id = index_predictions(pred);
    let mut missing = Vec::new();
    let mut scores = Vec::new();
    for g in gold.iter().filter(|g| !g.soft.is_empty()) {
        match by_id.get(g.id.as_str()).and_then(|p| p.soft.as_ref().map(|s| (p, s))) {
            Some((p, s)) => {
                check_soft(p, s, &model.vocab)?;
                scores.push(icm_soft_item(s, &g.soft, model, cfg)?);
            }
            None => missing.push(g.id.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingPredictions(missing));
    }
    mean(&scores)
}

/// Maps an ICM score onto [0, 1]: 0 bits goes to 0.5 and the gold self-score
/// to 1, clipped at both ends.
pub fn normalize_icm(score: f64, gold_self_score: f64) -> Result<f64> {
    if gold_self_score.is_nan() || gold_self_score <= 0.0 {
        return Err(Error::Metric(format!(
            "gold self-score must be positive to normalize (got {gold_self_score})"
        )));
    }
    Ok((0.5 + score / (2.0 * gold_self_score)).clamp(0.0, 1.0))
}

/// Mean of `−Σ_c g(c)·ln(max(s(c), ε))` over gold items with a soft label, in nats.
pub fn cross_entropy(
    pred: &[ItemPrediction],
    gold: &[LabelSummary],
    vocab: &TaskVocabulary,
    cfg: &MetricConfig,
) -> Result<MetricValue> {
    let by_id = index_predictions(pred);
    let mut missing = Vec::new();
    let mut losses = Vec::new();
    for g in gold.iter().filter(|g| !g.soft.is_empty()) {
        let Some((p, s)) = by_id.get(g.id.as_str()).and_then(|p| p.soft.as_ref().map(|s| (p, s))) else {
            missing.push(g.id.clone());
            continue;
        };
        check_soft(p, s, vocab)?;
        let loss: f64 = vocab
            .categories
            .iter()
            .map(|c| {
                let gw = g.soft.get(c).copied().unwrap_or(0.0);
                if gw == 0.0 {
                    0.0
                } else {
                    -gw * s.get(c).copied().unwrap_or(0.0).max(cfg.epsilon).ln()
                }
            })
            .sum();
        losses.push(loss);
    }
    if !missing.is_empty() {
        return Err(Error::MissingPredictions(missing));
    }
    mean(&losses)
}

fn class_f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        // class absent from both sides: nothing to get wrong
        1.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// Task 1: F1 of the YES class. Task 2: macro-F1 over the vocabulary classes
/// that occur in the gold or the predictions.
pub fn f1(pred: &[ItemPrediction], gold: &[LabelSummary], task: Task) -> Result<MetricValue> {
    let vocab = task.vocabulary();
    let by_id = index_predictions(pred);
    let mut pairs = Vec::new();
    let mut missing = Vec::new();
    for g in gold {
        let Some(gh) = g.hard else { continue };
        match by_id.get(g.id.as_str()).and_then(|p| p.hard_label(&vocab)) {
            Some(sh) => pairs.push((sh, gh)),
            None => missing.push(g.id.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingPredictions(missing));
    }
    if pairs.is_empty() {
        return Err(Error::Metric("no items to score".into()));
    }

    let confusion = |c: Category| {
        let tp = pairs.iter().filter(|(s, g)| *s == c && *g == c).count();
        let fp = pairs.iter().filter(|(s, g)| *s == c && *g != c).count();
        let fn_ = pairs.iter().filter(|(s, g)| *s != c && *g == c).count();
        (tp, fp, fn_)
    };

    let value = match task {
        Task::Task1 => {
            let (tp, fp, fn_) = confusion(Category::Yes);
            class_f1(tp, fp, fn_)
        }
        Task::Task2 => {
            let scores: Vec<f64> = vocab
                .categories
                .iter()
                .map(|&c| confusion(c))
                .filter(|(tp, fp, fn_)| tp + fp + fn_ > 0)
                .map(|(tp, fp, fn_)| class_f1(tp, fp, fn_))
                .collect();
            pairwise_sum(&scores) / scores.len() as f64
        }
    };
    Ok(MetricValue {
        value,
        n_scored: pairs.len(),
    })
}

/// All metric columns for one run over one language scope. Soft metrics are
/// `None` for hard-only runs; hard metrics are `None` when no gold item in
/// scope has a hard label. A normalized column is `None` when the gold
/// self-score of its scope is not positive, as in a single-category scope.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub run: String,
    pub scope: Option<Lang>,
    pub icm_soft: Option<f64>,
    pub icm_soft_norm: Option<f64>,
    pub cross_entropy: Option<f64>,
    pub icm_hard: Option<f64>,
    pub icm_hard_norm: Option<f64>,
    pub f1: Option<f64>,
    /// Items scored by the hard metrics.
    pub n_hard: usize,
    /// Items scored by the soft metrics.
    pub n_soft: usize,
}

impl ScoreReport {
    pub fn columns(&self) -> [Option<f64>; 6] {
        [
            self.icm_soft,
            self.icm_soft_norm,
            self.cross_entropy,
            self.icm_hard,
            self.icm_hard_norm,
            self.f1,
        ]
    }
}

pub fn filter_gold(gold: &[LabelSummary], lang: Option<Lang>) -> Vec<LabelSummary> {
    gold.iter()
        .filter(|g| lang.is_none() || g.lang == lang)
        .cloned()
        .collect()
}

/// Scores a run against the gold items of `lang` (all items when `None`).
///
/// Priors and the normalization reference are computed from the gold items
/// in scope. Every in-scope gold item the run's metrics need must have a
/// prediction; predictions for items out of scope are ignored.
pub fn score_run(run: &Run, gold: &[LabelSummary], cfg: &MetricConfig, lang: Option<Lang>) -> Result<ScoreReport> {
    cfg.validate()?;
    let gold = filter_gold(gold, lang);
    if gold.iter().all(LabelSummary::is_excluded) {
        return Err(Error::Metric(match lang {
            Some(l) => format!("no scorable gold items for language {l}"),
            None => "no scorable gold items".into(),
        }));
    }
    let vocab = run.task.vocabulary();
    let soft_run = run.kind == RunKind::Soft;

    let by_id = index_predictions(&run.predictions);
    let missing: Vec<String> = gold
        .iter()
        .filter(|g| {
            let Some(p) = by_id.get(g.id.as_str()) else {
                return !g.is_excluded();
            };
            (g.hard.is_some() && p.hard_label(&vocab).is_none()) || (soft_run && !g.soft.is_empty() && p.soft.is_none())
        })
        .map(|g| g.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingPredictions(missing));
    }

    let model = estimate_priors(&gold, vocab)?;
    let reference: Vec<ItemPrediction> = gold.iter().map(ItemPrediction::from_gold).collect();

    let mut report = ScoreReport {
        run: run.name.clone(),
        scope: lang,
        icm_soft: None,
        icm_soft_norm: None,
        cross_entropy: None,
        icm_hard: None,
        icm_hard_norm: None,
        f1: None,
        n_hard: 0,
        n_soft: 0,
    };

    if gold.iter().any(|g| g.hard.is_some()) {
        let score = icm_hard(&run.predictions, &gold, &model, cfg)?;
        let self_score = icm_hard(&reference, &gold, &model, cfg)?;
        report.icm_hard = Some(score.value);
        report.icm_hard_norm = normalize_icm(score.value, self_score.value).ok();
        report.f1 = Some(f1(&run.predictions, &gold, run.task)?.value);
        report.n_hard = score.n_scored;
    }

    if soft_run {
        let score = icm_soft(&run.predictions, &gold, &model, cfg)?;
        let self_score = icm_soft(&reference, &gold, &model, cfg)?;
        report.icm_soft = Some(score.value);
        report.icm_soft_norm = normalize_icm(score.value, self_score.value).ok();
        report.cross_entropy = Some(cross_entropy(&run.predictions, &gold, &vocab, cfg)?.value);
        report.n_soft = score.n_scored;
    }

    Ok(report)
}
