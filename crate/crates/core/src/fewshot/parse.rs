use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;

use crate::labels::{Category, Task};

static TASK1_LABELS: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(yes|no)\b").unwrap());
static TASK2_LABELS: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(direct|reported|judgemental|no)\b").unwrap());

/// Extracts the label from a model answer: the single distinct vocabulary
/// word (case-insensitive, word-bounded) it contains. Zero or several
/// distinct labels give `None`.
pub fn parse_response(raw: &str, task: Task) -> Option<Category> {
    let re = match task {
        Task::Task1 => &*TASK1_LABELS,
        Task::Task2 => &*TASK2_LABELS,
    };
    let found: BTreeSet<Category> = re
        .find_iter(raw)
        .map(|m| match m.as_str().to_ascii_uppercase().as_str() {
            "YES" => Category::Yes,
            "NO" => Category::No,
            "DIRECT" => Category::Direct,
            "REPORTED" => Category::Reported,
            _ => Category::Judgemental,
        })
        .collect();
    let mut it = found.into_iter();
    match (it.next(), it.next()) {
        (Some(c), None) => Some(c),
        _ => None,
    }
}
