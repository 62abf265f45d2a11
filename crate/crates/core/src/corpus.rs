//! Multi-annotator tweet corpus: parsing, validation, filtering and
//! canonical re-serialization.
//!
//! Files use the shared-task attribute names verbatim (`id_EXIST`, `lang`,
//! `tweet`, `number_annotators`, ...). The top-level container may be either
//! an object keyed by instance id or an array of instance objects; the shape
//! is remembered so that serialization writes the same container back.
//!
//! Attributes outside the known schema are kept in a passthrough bag and
//! written back after the known attributes, in their original order.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::de::{Deserializer, MapAccess, SeqAccess, Visitor};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

const F_ID: &str = "id_EXIST";
const F_LANG: &str = "lang";
const F_TEXT: &str = "tweet";
const F_N: &str = "number_annotators";
const F_ANNOTATORS: &str = "annotators";
const F_GENDER: &str = "gender_annotators";
const F_AGE: &str = "age_annotators";
const F_ETHNICITY: &str = "ethnicity_annotators";
const F_STUDY: &str = "study_level_annotators";
const F_COUNTRY: &str = "country_annotators";
const F_TASK1: &str = "labels_task1";
const F_TASK2: &str = "labels_task2";
const F_TASK3: &str = "labels_task3";
const F_SPLIT: &str = "split";

const KNOWN_FIELDS: [&str; 14] = [
    F_ID,
    F_LANG,
    F_TEXT,
    F_N,
    F_ANNOTATORS,
    F_GENDER,
    F_AGE,
    F_ETHNICITY,
    F_STUDY,
    F_COUNTRY,
    F_TASK1,
    F_TASK2,
    F_TASK3,
    F_SPLIT,
];

/// Fields whose presence marks an instance as annotated rather than test-only.
const ANNOTATION_FIELDS: [&str; 10] = [
    F_N,
    F_ANNOTATORS,
    F_GENDER,
    F_AGE,
    F_ETHNICITY,
    F_STUDY,
    F_COUNTRY,
    F_TASK1,
    F_TASK2,
    F_TASK3,
];

pub const ETHNICITIES: [&str; 7] = [
    "Black or African American",
    "Hispano or Latino",
    "White or Caucasian",
    "Multiracial",
    "Asian",
    "Asian Indian",
    "Middle Eastern",
];

pub const STUDY_LEVELS: [&str; 5] = [
    "Less than high school diploma",
    "High school degree or equivalent",
    "Bachelor's degree",
    "Master's degree",
    "Doctorate",
];

pub const TASK3_LABELS: [&str; 7] = [
    "IDEOLOGICAL-INEQUALITY",
    "STEREOTYPING-DOMINANCE",
    "OBJECTIFICATION",
    "SEXUAL-VIOLENCE",
    "MISOGYNY-NON-SEXUAL-VIOLENCE",
    "-",
    "UNKNOWN",
];

macro_rules! string_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal $(| $alias:literal)*),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text $(| $alias)* => Ok($name::$variant),)+
                    other => Err(format!("unknown {} value {other:?}", stringify!($name))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

string_enum!(
    /// Tweet language.
    Lang { En => "en" | "EN", Es => "es" | "ES" }
);

string_enum!(
    /// Corpus partition, without the language tag.
    SplitKind { Train => "TRAIN", Dev => "DEV", Test => "TEST" }
);

string_enum!(Gender { F => "F", M => "M" });

string_enum!(AgeGroup { From18To22 => "18-22", From23To45 => "23-45", From46 => "46+" });

string_enum!(
    /// A Task-1 vote: does the tweet contain or describe sexism.
    Task1Vote { Yes => "YES", No => "NO" }
);

string_enum!(
    /// A Task-2 vote on source intention. `Dash` is the "-" cell an annotator
    /// fills in after voting NO on Task 1; `Unknown` marks a missing answer.
    Task2Vote {
        Direct => "DIRECT",
        Reported => "REPORTED",
        Judgemental => "JUDGEMENTAL",
        Dash => "-" | "\u{2013}",
        Unknown => "UNKNOWN",
    }
);

/// A split value such as `TRAIN_EN`: partition plus language tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Split {
    pub kind: SplitKind,
    pub lang: Lang,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.kind, self.lang.as_str().to_ascii_uppercase())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, lang) = s
            .split_once('_')
            .ok_or_else(|| format!("split {s:?} is not of the form PART_LANG"))?;
        Ok(Split {
            kind: kind.parse()?,
            lang: lang.parse()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatorProfile {
    pub gender: Gender,
    pub age_group: AgeGroup,
    pub ethnicity: String,
    pub study_level: String,
    pub country: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedTweet {
    pub id: String,
    pub lang: Lang,
    pub text: String,
    pub split: Split,
    pub n_annotators: usize,
    pub annotator_ids: Vec<String>,
    pub profiles: Vec<AnnotatorProfile>,
    pub votes_task1: Option<Vec<Task1Vote>>,
    pub votes_task2: Option<Vec<Task2Vote>>,
    /// Task-3 label sets, kept verbatim and never interpreted.
    pub votes_task3: Option<Vec<Vec<String>>>,
    pub extra: Map<String, Value>,
}

/// A test-set instance: no annotation attributes at all.
#[derive(Debug, Clone, PartialEq)]
pub struct TestTweet {
    pub id: String,
    pub lang: Lang,
    pub text: String,
    pub split: Split,
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Annotated(AnnotatedTweet),
    Test(TestTweet),
}

impl Instance {
    pub fn id(&self) -> &str {
        match self {
            Instance::Annotated(t) => &t.id,
            Instance::Test(t) => &t.id,
        }
    }

    pub fn lang(&self) -> Lang {
        match self {
            Instance::Annotated(t) => t.lang,
            Instance::Test(t) => t.lang,
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Instance::Annotated(t) => &t.text,
            Instance::Test(t) => &t.text,
        }
    }

    pub fn split(&self) -> Split {
        match self {
            Instance::Annotated(t) => t.split,
            Instance::Test(t) => t.split,
        }
    }

    pub fn as_annotated(&self) -> Option<&AnnotatedTweet> {
        match self {
            Instance::Annotated(t) => Some(t),
            Instance::Test(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContainerShape {
    /// `{"<id>": {...}, ...}`
    #[default]
    Object,
    /// `[{...}, ...]`
    Array,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub source: Option<PathBuf>,
    pub mode: ParseMode,
    pub shape: ContainerShape,
}

/// A problem found while parsing in lenient mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    pub id: Option<String>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.id, &self.field) {
            (Some(id), Some(field)) => write!(f, "{id} [{field}]: {}", self.message),
            (Some(id), None) => write!(f, "{id}: {}", self.message),
            (None, _) => f.write_str(&self.message),
        }
    }
}

/// An instance set aside in lenient mode, together with its raw JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Quarantined {
    pub id: Option<String>,
    pub reason: String,
    pub raw: Value,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    pub instances: Vec<Instance>,
    pub provenance: Provenance,
    pub warnings: Vec<Warning>,
    pub quarantined: Vec<Quarantined>,
}

impl Corpus {
    pub fn new(instances: Vec<Instance>) -> Self {
        Corpus {
            instances,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Instance> {
        self.instances.iter().find(|i| i.id() == id)
    }

    pub fn annotated(&self) -> impl Iterator<Item = &AnnotatedTweet> {
        self.instances.iter().filter_map(Instance::as_annotated)
    }
}

/// How bad a violation is. Structural problems make an instance unusable;
/// vocabulary and consistency problems leave it usable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Severity {
    Structural,
    Advisory,
}

struct Violation {
    severity: Severity,
    field: Option<&'static str>,
    message: String,
}

impl Violation {
    fn structural(field: &'static str, message: impl Into<String>) -> Self {
        Violation {
            severity: Severity::Structural,
            field: Some(field),
            message: message.into(),
        }
    }

    fn advisory(field: Option<&'static str>, message: impl Into<String>) -> Self {
        Violation {
            severity: Severity::Advisory,
            field,
            message: message.into(),
        }
    }
}

/// Top-level container with entries kept in order and duplicate keys kept.
enum RawContainer {
    Object(Vec<(String, Value)>),
    Array(Vec<Value>),
}

impl<'de> Deserialize<'de> for RawContainer {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ContainerVisitor;

        impl<'de> Visitor<'de> for ContainerVisitor {
            type Value = RawContainer;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object keyed by instance id or an array of instances")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<RawContainer, A::Error> {
                let mut entries = Vec::new();
                while let Some((key, value)) = map.next_entry::<String, Value>()? {
                    entries.push((key, value));
                }
                Ok(RawContainer::Object(entries))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<RawContainer, A::Error> {
                let mut items = Vec::new();
                while let Some(value) = seq.next_element::<Value>()? {
                    items.push(value);
                }
                Ok(RawContainer::Array(items))
            }
        }

        deserializer.deserialize_any(ContainerVisitor)
    }
}

/// Parses a corpus file.
///
/// Strict mode fails on the first invariant violation. Lenient mode moves
/// structurally broken instances to [`Corpus::quarantined`] and records every
/// problem in [`Corpus::warnings`]. Duplicate ids are an error in both modes.
pub fn parse_corpus(raw: &[u8], mode: ParseMode) -> Result<Corpus> {
    let mut de = serde_json::Deserializer::from_slice(raw);
    let container = RawContainer::deserialize(&mut de).map_err(|e| Error::from_json(&e, raw))?;
    de.end().map_err(|e| Error::from_json(&e, raw))?;

    let (shape, entries): (_, Vec<(Option<String>, Value)>) = match container {
        RawContainer::Object(entries) => (
            ContainerShape::Object,
            entries.into_iter().map(|(k, v)| (Some(k), v)).collect(),
        ),
        RawContainer::Array(items) => (ContainerShape::Array, items.into_iter().map(|v| (None, v)).collect()),
    };

    let mut corpus = Corpus {
        provenance: Provenance {
            source: None,
            mode,
            shape,
        },
        ..Default::default()
    };
    let mut seen = std::collections::HashSet::new();

    for (key, value) in entries {
        let label = key
            .clone()
            .or_else(|| value.get(F_ID).and_then(Value::as_str).map(str::to_owned));
        if let Some(id) = key.as_deref().or_else(|| value.get(F_ID).and_then(Value::as_str)) {
            if !seen.insert(id.to_owned()) {
                return Err(Error::schema(Some(id), None, format!("duplicate id {id:?}")));
            }
        }

        let (parsed, violations) = parse_instance(key.as_deref(), &value);
        let structural = violations.iter().any(|v| v.severity == Severity::Structural);

        if mode == ParseMode::Strict {
            if let Some(v) = violations.first() {
                return Err(Error::schema(label.as_deref(), v.field, v.message.clone()));
            }
        }
        for v in &violations {
            corpus.warnings.push(Warning {
                id: label.clone(),
                field: v.field.map(str::to_owned),
                message: v.message.clone(),
            });
        }
        match parsed {
            Some(instance) if !structural => corpus.instances.push(instance),
            _ => {
                let reason = violations
                    .iter()
                    .find(|v| v.severity == Severity::Structural)
                    .map(|v| v.message.clone())
                    .unwrap_or_else(|| "unparseable instance".to_owned());
                corpus.quarantined.push(Quarantined {
                    id: label,
                    reason,
                    raw: value,
                });
            }
        }
    }

    Ok(corpus)
}

fn parse_instance(key: Option<&str>, value: &Value) -> (Option<Instance>, Vec<Violation>) {
    let mut violations = Vec::new();
    let Some(obj) = value.as_object() else {
        violations.push(Violation::structural(F_ID, "instance is not a JSON object"));
        return (None, violations);
    };

    let id = match obj.get(F_ID) {
        Some(Value::String(s)) if !s.is_empty() => Some(s.clone()),
        Some(Value::Number(n)) => Some(n.to_string()),
        Some(_) => {
            violations.push(Violation::structural(F_ID, "id must be a non-empty string"));
            None
        }
        None => {
            violations.push(Violation::structural(F_ID, "missing attribute"));
            None
        }
    };
    if let (Some(key), Some(id)) = (key, id.as_deref()) {
        if key != id {
            violations.push(Violation::advisory(
                Some(F_ID),
                format!("container key {key:?} differs from id {id:?}"),
            ));
        }
    }

    let lang = required_enum::<Lang>(obj, F_LANG, &mut violations);
    let text = match obj.get(F_TEXT) {
        Some(Value::String(s)) if !s.trim().is_empty() => Some(s.clone()),
        Some(Value::String(_)) => {
            violations.push(Violation::structural(F_TEXT, "tweet text is empty"));
            None
        }
        Some(_) => {
            violations.push(Violation::structural(F_TEXT, "expected a string"));
            None
        }
        None => {
            violations.push(Violation::structural(F_TEXT, "missing attribute"));
            None
        }
    };
    let split = required_enum::<Split>(obj, F_SPLIT, &mut violations);
    if let (Some(lang), Some(split)) = (lang, split) {
        if lang != split.lang {
            violations.push(Violation::advisory(
                Some(F_SPLIT),
                format!("split {split} disagrees with lang {lang}"),
            ));
        }
    }

    let extra: Map<String, Value> = obj
        .iter()
        .filter(|(k, _)| !KNOWN_FIELDS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();

    let annotated = ANNOTATION_FIELDS.iter().any(|f| obj.contains_key(*f));
    if !annotated {
        return match (id, lang, text, split) {
            (Some(id), Some(lang), Some(text), Some(split)) => (
                Some(Instance::Test(TestTweet {
                    id,
                    lang,
                    text,
                    split,
                    extra,
                })),
                violations,
            ),
            _ => (None, violations),
        };
    }

    let n_annotators = match obj.get(F_N) {
        Some(v) => match v.as_u64() {
            Some(n) => Some(n as usize),
            None => {
                violations.push(Violation::structural(F_N, "expected a non-negative integer"));
                None
            }
        },
        None => {
            violations.push(Violation::structural(F_N, "missing attribute"));
            None
        }
    };

    let annotator_ids = required_list(obj, F_ANNOTATORS, &mut violations, string_item);
    let genders = required_list(obj, F_GENDER, &mut violations, enum_item::<Gender>);
    let ages = required_list(obj, F_AGE, &mut violations, enum_item::<AgeGroup>);
    let ethnicities = required_list(obj, F_ETHNICITY, &mut violations, string_item);
    let studies = required_list(obj, F_STUDY, &mut violations, string_item);
    let countries = required_list(obj, F_COUNTRY, &mut violations, string_item);
    let votes_task1 = optional_list(obj, F_TASK1, &mut violations, enum_item::<Task1Vote>);
    let votes_task2 = optional_list(obj, F_TASK2, &mut violations, enum_item::<Task2Vote>);
    let votes_task3 = optional_list(obj, F_TASK3, &mut violations, label_set_item);

    if let Some(n) = n_annotators {
        let lengths: [(&'static str, Option<usize>); 9] = [
            (F_ANNOTATORS, annotator_ids.as_ref().map(Vec::len)),
            (F_GENDER, genders.as_ref().map(Vec::len)),
            (F_AGE, ages.as_ref().map(Vec::len)),
            (F_ETHNICITY, ethnicities.as_ref().map(Vec::len)),
            (F_STUDY, studies.as_ref().map(Vec::len)),
            (F_COUNTRY, countries.as_ref().map(Vec::len)),
            (F_TASK1, votes_task1.as_ref().map(Vec::len)),
            (F_TASK2, votes_task2.as_ref().map(Vec::len)),
            (F_TASK3, votes_task3.as_ref().map(Vec::len)),
        ];
        for (field, len) in lengths {
            if let Some(len) = len {
                if len != n {
                    violations.push(Violation::structural(
                        field,
                        format!("has {len} entries but number_annotators is {n}"),
                    ));
                }
            }
        }
    }

    for (i, e) in ethnicities.iter().flatten().enumerate() {
        if !known_value(&ETHNICITIES, e) {
            violations.push(Violation::advisory(
                Some(F_ETHNICITY),
                format!("annotator {i}: unknown ethnicity {e:?}"),
            ));
        }
    }
    for (i, s) in studies.iter().flatten().enumerate() {
        if !known_value(&STUDY_LEVELS, s) {
            violations.push(Violation::advisory(
                Some(F_STUDY),
                format!("annotator {i}: unknown study level {s:?}"),
            ));
        }
    }
    for (i, set) in votes_task3.iter().flatten().enumerate() {
        for label in set {
            if !TASK3_LABELS.contains(&label.as_str()) {
                violations.push(Violation::advisory(
                    Some(F_TASK3),
                    format!("annotator {i}: unknown label {label:?}"),
                ));
            }
        }
    }
    if let (Some(t1), Some(t2)) = (&votes_task1, &votes_task2) {
        for (i, (a, b)) in t1.iter().zip(t2).enumerate() {
            if (*a == Task1Vote::No) != (*b == Task2Vote::Dash) {
                violations.push(Violation::advisory(
                    Some(F_TASK2),
                    format!("annotator {i}: task-1 vote {a} inconsistent with task-2 vote {b}"),
                ));
            }
        }
    }

    let profiles = match (genders, ages, ethnicities, studies, countries) {
        (Some(g), Some(a), Some(e), Some(s), Some(c)) => Some(
            g.into_iter()
                .zip(a)
                .zip(e)
                .zip(s)
                .zip(c)
                .map(
                    |((((gender, age_group), ethnicity), study_level), country)| AnnotatorProfile {
                        gender,
                        age_group,
                        ethnicity,
                        study_level,
                        country,
                    },
                )
                .collect(),
        ),
        _ => None,
    };

    match (id, lang, text, split, n_annotators, annotator_ids, profiles) {
        (Some(id), Some(lang), Some(text), Some(split), Some(n_annotators), Some(annotator_ids), Some(profiles)) => (
            Some(Instance::Annotated(AnnotatedTweet {
                id,
                lang,
                text,
                split,
                n_annotators,
                annotator_ids,
                profiles,
                votes_task1,
                votes_task2,
                votes_task3,
                extra,
            })),
            violations,
        ),
        _ => (None, violations),
    }
}

/// Normalizes typographic apostrophes before comparing against a closed list.
fn known_value(list: &[&str], value: &str) -> bool {
    let value = value.replace('\u{2019}', "'");
    list.contains(&value.as_str()) || (value == "Black or African America")
}

fn required_enum<T: FromStr<Err = String>>(
    obj: &Map<String, Value>,
    field: &'static str,
    violations: &mut Vec<Violation>,
) -> Option<T> {
    match obj.get(field) {
        Some(Value::String(s)) => match s.parse() {
            Ok(v) => Some(v),
            Err(e) => {
                violations.push(Violation::structural(field, e));
                None
            }
        },
        Some(_) => {
            violations.push(Violation::structural(field, "expected a string"));
            None
        }
        None => {
            violations.push(Violation::structural(field, "missing attribute"));
            None
        }
    }
}

fn string_item(v: &Value) -> std::result::Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        other => Err(format!("expected a string, found {other}")),
    }
}

fn enum_item<T: FromStr<Err = String>>(v: &Value) -> std::result::Result<T, String> {
    match v {
        Value::String(s) => s.parse(),
        other => Err(format!("expected a string, found {other}")),
    }
}

fn label_set_item(v: &Value) -> std::result::Result<Vec<String>, String> {
    match v {
        Value::Array(items) => items.iter().map(string_item).collect(),
        other => Err(format!("expected an array of labels, found {other}")),
    }
}

fn optional_list<T>(
    obj: &Map<String, Value>,
    field: &'static str,
    violations: &mut Vec<Violation>,
    item: fn(&Value) -> std::result::Result<T, String>,
) -> Option<Vec<T>> {
    let value = obj.get(field)?;
    let Some(items) = value.as_array() else {
        violations.push(Violation::structural(field, "expected an array"));
        return None;
    };
    let mut out = Vec::with_capacity(items.len());
    for (i, v) in items.iter().enumerate() {
        match item(v) {
            Ok(x) => out.push(x),
            Err(e) => {
                violations.push(Violation::structural(field, format!("entry {i}: {e}")));
                return None;
            }
        }
    }
    Some(out)
}

fn required_list<T>(
    obj: &Map<String, Value>,
    field: &'static str,
    violations: &mut Vec<Violation>,
    item: fn(&Value) -> std::result::Result<T, String>,
) -> Option<Vec<T>> {
    if !obj.contains_key(field) {
        violations.push(Violation::structural(field, "missing attribute"));
        return None;
    }
    optional_list(obj, field, violations, item)
}

/// Returns the instances matching both filters, in corpus order.
pub fn filter(corpus: &Corpus, lang: Option<Lang>, split: Option<SplitKind>) -> Corpus {
    let instances = corpus
        .instances
        .iter()
        .filter(|i| lang.is_none_or(|l| i.lang() == l))
        .filter(|i| split.is_none_or(|s| i.split().kind == s))
        .cloned()
        .collect();
    Corpus {
        instances,
        provenance: corpus.provenance.clone(),
        warnings: Vec::new(),
        quarantined: Vec::new(),
    }
}

fn strings<I: IntoIterator<Item = S>, S: Into<String>>(items: I) -> Value {
    Value::Array(items.into_iter().map(|s| Value::String(s.into())).collect())
}

fn instance_to_json(instance: &Instance) -> Value {
    let mut obj = Map::new();
    match instance {
        Instance::Test(t) => {
            obj.insert(F_ID.into(), t.id.clone().into());
            obj.insert(F_LANG.into(), t.lang.as_str().into());
            obj.insert(F_TEXT.into(), t.text.clone().into());
            obj.insert(F_SPLIT.into(), t.split.to_string().into());
            obj.extend(t.extra.clone());
        }
        Instance::Annotated(t) => {
            obj.insert(F_ID.into(), t.id.clone().into());
            obj.insert(F_LANG.into(), t.lang.as_str().into());
            obj.insert(F_TEXT.into(), t.text.clone().into());
            obj.insert(F_N.into(), t.n_annotators.into());
            obj.insert(F_ANNOTATORS.into(), strings(t.annotator_ids.iter().cloned()));
            obj.insert(F_GENDER.into(), strings(t.profiles.iter().map(|p| p.gender.as_str())));
            obj.insert(F_AGE.into(), strings(t.profiles.iter().map(|p| p.age_group.as_str())));
            obj.insert(
                F_ETHNICITY.into(),
                strings(t.profiles.iter().map(|p| p.ethnicity.clone())),
            );
            obj.insert(
                F_STUDY.into(),
                strings(t.profiles.iter().map(|p| p.study_level.clone())),
            );
            obj.insert(F_COUNTRY.into(), strings(t.profiles.iter().map(|p| p.country.clone())));
            if let Some(votes) = &t.votes_task1 {
                obj.insert(F_TASK1.into(), strings(votes.iter().map(|v| v.as_str())));
            }
            if let Some(votes) = &t.votes_task2 {
                obj.insert(F_TASK2.into(), strings(votes.iter().map(|v| v.as_str())));
            }
            if let Some(sets) = &t.votes_task3 {
                obj.insert(
                    F_TASK3.into(),
                    Value::Array(sets.iter().map(|s| strings(s.iter().cloned())).collect()),
                );
            }
            obj.insert(F_SPLIT.into(), t.split.to_string().into());
            obj.extend(t.extra.clone());
        }
    }
    Value::Object(obj)
}

/// Writes the corpus in canonical form: known attributes in schema order,
/// passthrough attributes after them, two-space indentation, trailing newline.
pub fn serialize_corpus(corpus: &Corpus) -> Vec<u8> {
    let root = match corpus.provenance.shape {
        ContainerShape::Object => Value::Object(
            corpus
                .instances
                .iter()
                .map(|i| (i.id().to_owned(), instance_to_json(i)))
                .collect(),
        ),
        ContainerShape::Array => Value::Array(corpus.instances.iter().map(instance_to_json).collect()),
    };
    let mut out = serde_json::to_vec_pretty(&root).expect("JSON values always serialize");
    out.push(b'\n');
    out
}
