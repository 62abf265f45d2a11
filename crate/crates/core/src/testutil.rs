//! Fixture builders shared by unit tests.

use serde_json::{json, Value};

pub(crate) fn tweet_json(id: &str, lang: &str, split: &str, t1: &[&str], t2: &[&str]) -> Value {
    let n = t1.len();
    json!({
        "id_EXIST": id,
        "lang": lang,
        "tweet": format!("tweet {id}"),
        "number_annotators": n,
        "annotators": (0..n).map(|i| format!("Annotator_{i}")).collect::<Vec<_>>(),
        "gender_annotators": (0..n).map(|i| if i % 2 == 0 { "F" } else { "M" }).collect::<Vec<_>>(),
        "age_annotators": vec!["23-45"; n],
        "ethnicity_annotators": vec!["White or Caucasian"; n],
        "study_level_annotators": vec!["Bachelor’s degree"; n],
        "country_annotators": vec!["Spain"; n],
        "labels_task1": t1,
        "labels_task2": t2,
        "labels_task3": t2.iter().map(|v| if *v == "-" { vec!["-"] } else { vec!["OBJECTIFICATION"] }).collect::<Vec<_>>(),
        "split": split,
    })
}
