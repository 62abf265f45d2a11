//! Gold labels derived from annotator votes.
//!
//! Each annotated tweet yields a [`LabelSummary`] per task: a soft
//! distribution (vote fractions) and, when the votes decide it, a hard label.
//!
//! Task 1 hard labels need a strict majority; a 3-3 split has no hard label.
//! Task 2 counts "-" votes as mass on `NO`, drops `UNKNOWN` votes, and takes
//! the unique plurality among intent votes for tweets whose Task 1 label is
//! `YES`. Tweets whose Task 1 label is `NO` get the hard label `NO`, which is
//! written as "-" in files.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::corpus::{AnnotatedTweet, Corpus, Instance, Lang, Task1Vote, Task2Vote};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    Task1,
    Task2,
}

impl Task {
    pub fn vocabulary(self) -> TaskVocabulary {
        match self {
            Task::Task1 => TaskVocabulary {
                task: self,
                categories: &[Category::Yes, Category::No],
            },
            Task::Task2 => TaskVocabulary {
                task: self,
                categories: &[
                    Category::No,
                    Category::Direct,
                    Category::Reported,
                    Category::Judgemental,
                ],
            },
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Task::Task1 => 1,
            Task::Task2 => 2,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "task{}", self.number())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim_start_matches("task") {
            "1" => Ok(Task::Task1),
            "2" => Ok(Task::Task2),
            _ => Err(format!("unknown task {s:?} (expected 1 or 2)")),
        }
    }
}

/// A scored category. `No` is the non-sexist category in both tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Yes,
    No,
    Direct,
    Reported,
    Judgemental,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Yes => "YES",
            Category::No => "NO",
            Category::Direct => "DIRECT",
            Category::Reported => "REPORTED",
            Category::Judgemental => "JUDGEMENTAL",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The ordered category list of a task. The order fixes vector layouts and
/// every deterministic tie-break.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskVocabulary {
    pub task: Task,
    pub categories: &'static [Category],
}

impl TaskVocabulary {
    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn contains(&self, c: Category) -> bool {
        self.categories.contains(&c)
    }

    pub fn index_of(&self, c: Category) -> Option<usize> {
        self.categories.iter().position(|x| *x == c)
    }

    /// Hard-label token: Task 2 writes its `NO` category as "-".
    pub fn hard_token(&self, c: Category) -> &'static str {
        match (self.task, c) {
            (Task::Task2, Category::No) => "-",
            _ => c.name(),
        }
    }

    pub fn parse_hard(&self, token: &str) -> Option<Category> {
        let c = match (self.task, token) {
            (Task::Task2, "-" | "\u{2013}" | "NO") => Category::No,
            (_, "YES") => Category::Yes,
            (Task::Task1, "NO") => Category::No,
            (_, "DIRECT") => Category::Direct,
            (_, "REPORTED") => Category::Reported,
            (_, "JUDGEMENTAL") => Category::Judgemental,
            _ => return None,
        };
        self.contains(c).then_some(c)
    }

    /// Soft-map key; "-" is accepted as an alias of Task 2 `NO`.
    pub fn parse_soft_key(&self, key: &str) -> Option<Category> {
        self.parse_hard(key)
    }

    /// First category with the highest weight.
    pub fn argmax(&self, soft: &SoftLabel) -> Option<Category> {
        let mut best: Option<(Category, f64)> = None;
        for &c in self.categories {
            let w = soft.get(&c).copied().unwrap_or(0.0);
            if best.is_none_or(|(_, b)| w > b) {
                best = Some((c, w));
            }
        }
        best.map(|(c, _)| c)
    }
}

/// Category weights. Gold soft labels carry every vocabulary category.
pub type SoftLabel = BTreeMap<Category, f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct LabelSummary {
    pub id: String,
    pub lang: Option<Lang>,
    /// Empty when no vote was counted.
    pub soft: SoftLabel,
    pub hard: Option<Category>,
    /// Votes used after dropping `UNKNOWN`.
    pub n_counted: usize,
}

impl LabelSummary {
    /// No counted votes: the instance takes part in no metric.
    pub fn is_excluded(&self) -> bool {
        self.n_counted == 0
    }
}

fn missing_votes(tweet: &AnnotatedTweet, task: &str) -> Error {
    Error::Labels {
        id: tweet.id.clone(),
        message: format!("no {task} votes"),
    }
}

pub fn aggregate_task1(tweet: &AnnotatedTweet) -> Result<LabelSummary> {
    let votes = tweet
        .votes_task1
        .as_ref()
        .ok_or_else(|| missing_votes(tweet, "task-1"))?;
    let (soft, hard) = task1_outcome(votes);
    Ok(LabelSummary {
        id: tweet.id.clone(),
        lang: Some(tweet.lang),
        soft,
        hard,
        n_counted: votes.len(),
    })
}

fn task1_outcome(votes: &[Task1Vote]) -> (SoftLabel, Option<Category>) {
    let n = votes.len();
    if n == 0 {
        return (SoftLabel::new(), None);
    }
    let yes = votes.iter().filter(|v| **v == Task1Vote::Yes).count();
    let no = n - yes;
    let soft = SoftLabel::from([
        (Category::Yes, yes as f64 / n as f64),
        (Category::No, no as f64 / n as f64),
    ]);
    let hard = if 2 * yes > n {
        Some(Category::Yes)
    } else if 2 * no > n {
        Some(Category::No)
    } else {
        None
    };
    (soft, hard)
}

pub fn aggregate_task2(tweet: &AnnotatedTweet) -> Result<LabelSummary> {
    let t1 = tweet
        .votes_task1
        .as_ref()
        .ok_or_else(|| missing_votes(tweet, "task-1"))?;
    let t2 = tweet
        .votes_task2
        .as_ref()
        .ok_or_else(|| missing_votes(tweet, "task-2"))?;

    let mut counts = [0usize; 4]; // NO, DIRECT, REPORTED, JUDGEMENTAL
    for vote in t2 {
        match vote {
            Task2Vote::Dash => counts[0] += 1,
            Task2Vote::Direct => counts[1] += 1,
            Task2Vote::Reported => counts[2] += 1,
            Task2Vote::Judgemental => counts[3] += 1,
            Task2Vote::Unknown => {}
        }
    }
    let n_counted: usize = counts.iter().sum();
    let vocab = Task::Task2.vocabulary();

    if n_counted == 0 {
        return Ok(LabelSummary {
            id: tweet.id.clone(),
            lang: Some(tweet.lang),
            soft: SoftLabel::new(),
            hard: None,
            n_counted,
        });
    }

    let soft = vocab
        .categories
        .iter()
        .zip(counts)
        .map(|(&c, k)| (c, k as f64 / n_counted as f64))
        .collect();

    let hard = match task1_outcome(t1).1 {
        Some(Category::No) => Some(Category::No),
        Some(_) => {
            let intents = &counts[1..];
            let top = *intents.iter().max().unwrap_or(&0);
            let winners: Vec<usize> = (0..3).filter(|&i| intents[i] == top).collect();
            (top > 0 && winners.len() == 1).then(|| vocab.categories[winners[0] + 1])
        }
        None => None,
    };

    Ok(LabelSummary {
        id: tweet.id.clone(),
        lang: Some(tweet.lang),
        soft,
        hard,
        n_counted,
    })
}

pub fn aggregate(tweet: &AnnotatedTweet, task: Task) -> Result<LabelSummary> {
    match task {
        Task::Task1 => aggregate_task1(tweet),
        Task::Task2 => aggregate_task2(tweet),
    }
}

/// Gold summaries for every instance of the corpus, in corpus order.
/// Test-only instances have no votes and are an error.
pub fn aggregate_corpus(corpus: &Corpus, task: Task) -> Result<Vec<LabelSummary>> {
    corpus
        .instances
        .iter()
        .map(|instance| match instance {
            Instance::Annotated(t) => aggregate(t, task),
            Instance::Test(t) => Err(Error::Labels {
                id: t.id.clone(),
                message: "test instance carries no votes".into(),
            }),
        })
        .collect()
}

/// Empirical category statistics of a gold set.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryModel {
    pub vocab: TaskVocabulary,
    /// P̂(c) in vocabulary order.
    pub priors: Vec<f64>,
    /// Number of gold items with a hard label.
    pub n_items: usize,
    /// Per category (vocabulary order), the sorted gold soft weights of every
    /// item with a nonempty soft label.
    pub soft_marginals: Vec<Vec<f64>>,
}

impl CategoryModel {
    pub fn prior(&self, c: Category) -> Option<f64> {
        self.vocab.index_of(c).map(|i| self.priors[i])
    }

    pub fn n_soft_items(&self) -> usize {
        self.soft_marginals.first().map_or(0, Vec::len)
    }

    /// Fraction of gold soft weights for `c` that are at least `v`, floored
    /// at `1 / (2 · n_soft_items)`.
    pub fn exceedance(&self, c: Category, v: f64) -> Option<f64> {
        let i = self.vocab.index_of(c)?;
        let weights = &self.soft_marginals[i];
        let n = weights.len();
        if n == 0 {
            return None;
        }
        let below = weights.partition_point(|w| *w < v);
        let p = (n - below) as f64 / n as f64;
        Some(p.max(1.0 / (2.0 * n as f64)))
    }
}

/// Estimates category priors from gold hard labels and gathers soft marginals.
///
/// Priors are relative frequencies. Any category below `1 / (2·n)` is raised to
/// that floor and the remaining categories share the rest of the mass in
/// proportion to their counts. With fewer items than the floors can jointly
/// accommodate, every prior is floored and the vector renormalized instead.
pub fn estimate_priors(summaries: &[LabelSummary], vocab: TaskVocabulary) -> Result<CategoryModel> {
    let mut counts = vec![0usize; vocab.len()];
    for s in summaries {
        if let Some(i) = s.hard.and_then(|h| vocab.index_of(h)) {
            counts[i] += 1;
        }
    }
    let n_items: usize = counts.iter().sum();

    let mut soft_marginals = vec![Vec::new(); vocab.len()];
    for s in summaries.iter().filter(|s| !s.soft.is_empty()) {
        for (i, c) in vocab.categories.iter().enumerate() {
            soft_marginals[i].push(s.soft.get(c).copied().unwrap_or(0.0));
        }
    }
    for m in &mut soft_marginals {
        m.sort_by(f64::total_cmp);
    }

    if n_items == 0 && soft_marginals[0].is_empty() {
        return Err(Error::Metric("no usable gold labels to estimate priors from".into()));
    }

    let priors = if n_items == 0 {
        vec![1.0 / vocab.len() as f64; vocab.len()]
    } else {
        floored_frequencies(&counts)
    };

    Ok(CategoryModel {
        vocab,
        priors,
        n_items,
        soft_marginals,
    })
}

fn floored_frequencies(counts: &[usize]) -> Vec<f64> {
    let n: usize = counts.iter().sum();
    let floor = 1.0 / (2.0 * n as f64);
    let k = counts.len();
    let mut floored = vec![false; k];
    loop {
        let n_floored = floored.iter().filter(|f| **f).count();
        let remaining = 1.0 - floor * n_floored as f64;
        let free: usize = counts.iter().zip(&floored).filter(|(_, f)| !**f).map(|(c, _)| c).sum();
        if remaining <= 0.0 || free == 0 {
            let raw: Vec<f64> = counts.iter().map(|&c| (c as f64 / n as f64).max(floor)).collect();
            let total: f64 = raw.iter().sum();
            return raw.into_iter().map(|p| p / total).collect();
        }
        let priors: Vec<f64> = (0..k)
            .map(|i| {
                if floored[i] {
                    floor
                } else {
                    remaining * counts[i] as f64 / free as f64
                }
            })
            .collect();
        let newly: Vec<usize> = (0..k).filter(|&i| !floored[i] && priors[i] < floor).collect();
        if newly.is_empty() {
            return priors;
        }
        for i in newly {
            floored[i] = true;
        }
    }
}

/// Writes the gold-label file: an object mapping id to
/// `{"hard": <token or null>, "lang": <lang>, "soft": {<category>: weight}}`,
/// in summary order.
pub fn write_gold(summaries: &[LabelSummary], task: Task) -> Vec<u8> {
    let vocab = task.vocabulary();
    let mut root = Map::new();
    for s in summaries {
        let mut entry = Map::new();
        entry.insert(
            "hard".into(),
            s.hard.map_or(Value::Null, |h| vocab.hard_token(h).into()),
        );
        if let Some(lang) = s.lang {
            entry.insert("lang".into(), lang.as_str().into());
        }
        let soft: BTreeMap<&str, f64> = s.soft.iter().map(|(c, w)| (c.name(), *w)).collect();
        entry.insert("soft".into(), serde_json::to_value(soft).expect("finite weights"));
        root.insert(s.id.clone(), Value::Object(entry));
    }
    let mut out = serde_json::to_vec_pretty(&Value::Object(root)).expect("JSON values always serialize");
    out.push(b'\n');
    out
}

/// Reads a gold-label file. Without an explicit task, the task is inferred
/// from the labels present.
pub fn read_gold(raw: &[u8], task: Option<Task>) -> Result<(Task, Vec<LabelSummary>)> {
    let root: Map<String, Value> = serde_json::from_slice(raw).map_err(|e| Error::from_json(&e, raw))?;
    let task = match task {
        Some(t) => t,
        None => infer_task(&root)?,
    };
    let vocab = task.vocabulary();
    let bad = |id: &str, msg: String| Error::schema(Some(id), None, msg);

    let mut out = Vec::with_capacity(root.len());
    for (id, entry) in &root {
        let obj = entry
            .as_object()
            .ok_or_else(|| bad(id, "gold entry is not an object".into()))?;
        let hard = match obj.get("hard") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(
                vocab
                    .parse_hard(s)
                    .ok_or_else(|| bad(id, format!("unknown {task} label {s:?}")))?,
            ),
            Some(other) => return Err(bad(id, format!("hard label must be a string or null, found {other}"))),
        };
        let lang = match obj.get("lang") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.parse::<Lang>().map_err(|e| bad(id, e))?),
            Some(other) => return Err(bad(id, format!("lang must be a string, found {other}"))),
        };
        let mut soft = SoftLabel::new();
        if let Some(map) = obj.get("soft") {
            let map = map
                .as_object()
                .ok_or_else(|| bad(id, "soft label must be an object".into()))?;
            for (k, v) in map {
                let c = vocab
                    .parse_soft_key(k)
                    .ok_or_else(|| bad(id, format!("unknown {task} category {k:?}")))?;
                let w = v
                    .as_f64()
                    .ok_or_else(|| bad(id, format!("weight for {k} is not a number")))?;
                soft.insert(c, w);
            }
        }
        if !soft.is_empty() {
            let sum: f64 = soft.values().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(bad(id, format!("soft weights sum to {}", crate::fmt_sum(sum))));
            }
        }
        // The file keeps no vote counts; only the excluded/counted distinction is recoverable.
        let n_counted = usize::from(!soft.is_empty());
        out.push(LabelSummary {
            id: id.clone(),
            lang,
            soft,
            hard,
            n_counted,
        });
    }
    Ok((task, out))
}

fn infer_task(root: &Map<String, Value>) -> Result<Task> {
    const TASK2_ONLY: [&str; 4] = ["DIRECT", "REPORTED", "JUDGEMENTAL", "-"];
    let mut tokens = Vec::new();
    for entry in root.values() {
        if let Some(Value::String(h)) = entry.get("hard") {
            tokens.push(h.as_str());
        }
        if let Some(Value::Object(soft)) = entry.get("soft") {
            tokens.extend(soft.keys().map(String::as_str));
        }
    }
    if tokens.iter().any(|t| TASK2_ONLY.contains(t)) {
        Ok(Task::Task2)
    } else if tokens.contains(&"YES") {
        Ok(Task::Task1)
    } else {
        Err(Error::schema(
            None,
            None,
            "cannot infer the task of an empty gold file; pass it explicitly",
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_corpus, ParseMode};
    use crate::testutil::tweet_json;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn tweet(t1: &[&str], t2: &[&str]) -> AnnotatedTweet {
        let raw = serde_json::json!([tweet_json("t", "en", "TRAIN_EN", t1, t2)]).to_string();
        let corpus = parse_corpus(raw.as_bytes(), ParseMode::Lenient).unwrap();
        corpus.instances[0].as_annotated().unwrap().clone()
    }

    fn summary(hard: Option<Category>) -> LabelSummary {
        LabelSummary {
            id: "x".into(),
            lang: None,
            soft: SoftLabel::new(),
            hard,
            n_counted: 1,
        }
    }

    #[test]
    fn task1_majority() {
        let s = aggregate_task1(&tweet(&["YES", "YES", "YES", "YES", "NO", "NO"], &["DIRECT"; 6])).unwrap();
        assert_abs_diff_eq!(s.soft[&Category::Yes], 2.0 / 3.0);
        assert_abs_diff_eq!(s.soft[&Category::No], 1.0 / 3.0);
        assert_eq!(s.hard, Some(Category::Yes));
    }

    #[test]
    fn task1_tie_has_no_hard_label() {
        let s = aggregate_task1(&tweet(&["YES", "YES", "YES", "NO", "NO", "NO"], &["-"; 6])).unwrap();
        assert_eq!(s.soft[&Category::Yes], 0.5);
        assert_eq!(s.hard, None);
        assert!(!s.is_excluded());
    }

    #[test]
    fn task2_plurality() {
        let t = tweet(
            &["YES", "YES", "YES", "YES", "YES", "NO"],
            &["DIRECT", "DIRECT", "DIRECT", "JUDGEMENTAL", "REPORTED", "-"],
        );
        let s = aggregate_task2(&t).unwrap();
        assert_abs_diff_eq!(s.soft[&Category::No], 1.0 / 6.0);
        assert_abs_diff_eq!(s.soft[&Category::Direct], 0.5);
        assert_abs_diff_eq!(s.soft[&Category::Reported], 1.0 / 6.0);
        assert_abs_diff_eq!(s.soft[&Category::Judgemental], 1.0 / 6.0);
        assert_eq!(s.hard, Some(Category::Direct));
    }

    #[test]
    fn task2_all_unknown_is_excluded() {
        let s = aggregate_task2(&tweet(&["YES"; 6], &["UNKNOWN"; 6])).unwrap();
        assert_eq!(s.n_counted, 0);
        assert!(s.soft.is_empty());
        assert_eq!(s.hard, None);
        assert!(s.is_excluded());
    }

    #[test]
    fn task2_non_sexist_gets_dash() {
        let t = tweet(
            &["YES", "NO", "NO", "NO", "NO", "NO"],
            &["DIRECT", "-", "-", "-", "-", "-"],
        );
        let s = aggregate_task2(&t).unwrap();
        assert_eq!(s.hard, Some(Category::No));
        assert_eq!(Task::Task2.vocabulary().hard_token(s.hard.unwrap()), "-");
        assert_abs_diff_eq!(s.soft[&Category::No], 5.0 / 6.0);
        assert_abs_diff_eq!(s.soft[&Category::Direct], 1.0 / 6.0);
    }

    #[test]
    fn task2_intent_tie_has_no_hard_label() {
        let t = tweet(
            &["YES", "YES", "YES", "YES", "NO", "NO"],
            &["DIRECT", "DIRECT", "REPORTED", "REPORTED", "-", "-"],
        );
        assert_eq!(aggregate_task2(&t).unwrap().hard, None);
    }

    #[test]
    fn missing_votes_is_an_error() {
        let mut t = tweet(&["YES"; 6], &["DIRECT"; 6]);
        t.votes_task2 = None;
        assert!(aggregate_task2(&t).is_err());
        t.votes_task1 = None;
        assert!(aggregate_task1(&t).is_err());
    }

    #[test]
    fn priors_examples() {
        let v = Task::Task1.vocabulary();
        let m = estimate_priors(
            &[
                summary(Some(Category::Yes)),
                summary(Some(Category::Yes)),
                summary(Some(Category::No)),
                summary(Some(Category::No)),
            ],
            v,
        )
        .unwrap();
        assert_eq!(m.priors, vec![0.5, 0.5]);

        let hard = [Category::Yes, Category::No, Category::No, Category::No, Category::No];
        let m = estimate_priors(&hard.map(|c| summary(Some(c))), v).unwrap();
        assert_abs_diff_eq!(m.priors[0], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(m.priors[1], 0.8, epsilon = 1e-15);

        let m = estimate_priors(&[Category::Yes; 4].map(|c| summary(Some(c))), v).unwrap();
        assert_abs_diff_eq!(m.priors[1], 1.0 / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.priors[0], 7.0 / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn priors_with_infeasible_floor_still_sum_to_one() {
        let m = estimate_priors(&[summary(Some(Category::Direct))], Task::Task2.vocabulary()).unwrap();
        assert_abs_diff_eq!(m.priors.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(m.priors.iter().all(|p| *p > 0.0));
    }

    #[test]
    fn priors_need_usable_labels() {
        assert!(estimate_priors(&[summary(None)], Task::Task1.vocabulary()).is_err());
        assert!(estimate_priors(&[], Task::Task1.vocabulary()).is_err());
    }

    #[test]
    fn exceedance_counts_ties() {
        let mut a = summary(Some(Category::Yes));
        a.soft = SoftLabel::from([(Category::Yes, 1.0), (Category::No, 0.0)]);
        let mut b = summary(Some(Category::No));
        b.soft = SoftLabel::from([(Category::Yes, 0.0), (Category::No, 1.0)]);
        let m = estimate_priors(&[a, b], Task::Task1.vocabulary()).unwrap();
        assert_eq!(m.exceedance(Category::Yes, 1.0), Some(0.5));
        assert_eq!(m.exceedance(Category::Yes, 0.3), Some(0.5));
        assert_eq!(m.exceedance(Category::Yes, 0.0), Some(1.0));
        assert_eq!(m.exceedance(Category::Direct, 0.5), None);
    }

    #[test]
    fn gold_file_round_trip_and_inference() {
        let t2 = aggregate_task2(&tweet(&["YES", "NO"], &["DIRECT", "-"])).unwrap();
        let raw = write_gold(std::slice::from_ref(&t2), Task::Task2);
        let (task, back) = read_gold(&raw, None).unwrap();
        assert_eq!(task, Task::Task2);
        assert_eq!(back[0].soft, t2.soft);
        assert_eq!(back[0].hard, t2.hard);
        assert_eq!(back[0].lang, t2.lang);

        let t1 = aggregate_task1(&tweet(&["YES", "YES", "NO"], &["DIRECT", "REPORTED", "-"])).unwrap();
        let (task, back) = read_gold(&write_gold(std::slice::from_ref(&t1), Task::Task1), None).unwrap();
        assert_eq!(task, Task::Task1);
        assert_eq!(back[0].soft, t1.soft);
        assert_eq!(back[0].hard, Some(Category::Yes));
    }

    fn task1_votes() -> impl Strategy<Value = Vec<&'static str>> {
        prop::collection::vec(prop::sample::select(vec!["YES", "NO"]), 1..9)
    }

    fn task2_votes(n: usize) -> impl Strategy<Value = Vec<&'static str>> {
        prop::collection::vec(
            prop::sample::select(vec!["DIRECT", "REPORTED", "JUDGEMENTAL", "-", "UNKNOWN"]),
            n,
        )
    }

    proptest! {
        #[test]
        fn task2_soft_sums_to_one(
            (t1, t2) in task1_votes().prop_flat_map(|t1| { let n = t1.len(); (Just(t1), task2_votes(n)) })
        ) {
            let s = aggregate_task2(&tweet(&t1, &t2)).unwrap();
            if s.n_counted > 0 {
                prop_assert!((s.soft.values().sum::<f64>() - 1.0).abs() < 1e-9);
                prop_assert_eq!(s.soft.len(), 4);
            } else {
                prop_assert!(s.soft.is_empty() && s.hard.is_none());
            }
        }

        #[test]
        fn vote_permutation_is_irrelevant(
            (t1, t2, seed) in task1_votes().prop_flat_map(|t1| { let n = t1.len(); (Just(t1), task2_votes(n), any::<u64>()) })
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut order: Vec<usize> = (0..t1.len()).collect();
            order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let p1: Vec<_> = order.iter().map(|&i| t1[i]).collect();
            let p2: Vec<_> = order.iter().map(|&i| t2[i]).collect();
            for task in [Task::Task1, Task::Task2] {
                let a = aggregate(&tweet(&t1, &t2), task).unwrap();
                let b = aggregate(&tweet(&p1, &p2), task).unwrap();
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn task1_hard_is_strict_argmax(t1 in task1_votes()) {
            let s = aggregate_task1(&tweet(&t1, &vec!["-"; t1.len()])).unwrap();
            if let Some(h) = s.hard {
                prop_assert!(s.soft[&h] > 0.5);
                prop_assert_eq!(Task::Task1.vocabulary().argmax(&s.soft), Some(h));
            }
        }

        #[test]
        fn priors_sum_to_one_and_ignore_order(
            labels in prop::collection::vec(prop::sample::select(vec![Category::No, Category::Direct, Category::Reported, Category::Judgemental]), 1..30)
        ) {
            let vocab = Task::Task2.vocabulary();
            let fwd: Vec<_> = labels.iter().map(|c| summary(Some(*c))).collect();
            let mut rev = fwd.clone();
            rev.reverse();
            let a = estimate_priors(&fwd, vocab).unwrap();
            let b = estimate_priors(&rev, vocab).unwrap();
            prop_assert!((a.priors.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert_eq!(&a.priors, &b.priors);
            if labels.len() >= 2 {
                let floor = 1.0 / (2.0 * labels.len() as f64);
                prop_assert!(a.priors.iter().all(|p| *p >= floor - 1e-12));
            }
        }
    }
}
