//! Corpus fixtures shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

pub fn tweet(id: &str, lang: &str, split: &str, t1: &[&str], t2: &[&str]) -> Value {
    let n = t1.len();
    json!({
        "id_EXIST": id,
        "lang": lang,
        "tweet": format!("text of tweet {id}"),
        "number_annotators": n,
        "annotators": (0..n).map(|i| format!("Annotator_{i}")).collect::<Vec<_>>(),
        "gender_annotators": (0..n).map(|i| if i % 2 == 0 { "F" } else { "M" }).collect::<Vec<_>>(),
        "age_annotators": vec!["23-45"; n],
        "ethnicity_annotators": vec!["White or Caucasian"; n],
        "study_level_annotators": vec!["Bachelor's degree"; n],
        "country_annotators": vec!["Spain"; n],
        "labels_task1": t1,
        "labels_task2": t2,
        "labels_task3": t2.iter().map(|v| if *v == "-" { vec!["-"] } else { vec!["OBJECTIFICATION"] }).collect::<Vec<_>>(),
        "split": split,
    })
}

pub fn test_tweet(id: &str, lang: &str) -> Value {
    json!({
        "id_EXIST": id,
        "lang": lang,
        "tweet": format!("text of tweet {id}"),
        "split": format!("TEST_{}", lang.to_ascii_uppercase()),
    })
}

/// Six consistent random votes: each annotator says NO (task 2 "-") or YES
/// with a random intention.
pub fn random_votes(rng: &mut impl Rng) -> (Vec<&'static str>, Vec<&'static str>) {
    let p_yes: f64 = rng.random();
    let mut t1 = Vec::with_capacity(6);
    let mut t2 = Vec::with_capacity(6);
    for _ in 0..6 {
        if rng.random_bool(p_yes) {
            t1.push("YES");
            t2.push(["DIRECT", "REPORTED", "JUDGEMENTAL", "UNKNOWN"][rng.random_range(0..4)]);
        } else {
            t1.push("NO");
            t2.push("-");
        }
    }
    (t1, t2)
}

/// Object-shaped corpus with `train` training and `dev` development tweets
/// per language, plus one test tweet per language. EN ids start with 1, ES
/// with 2, DEV with 3, TEST with 4.
pub fn corpus_json(train: usize, dev: usize, seed: u64) -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut map = Map::new();
    for (lang, prefix) in [("en", '1'), ("es", '2')] {
        let up = lang.to_ascii_uppercase();
        for i in 0..train {
            let id = format!("{prefix}{i:05}");
            let (t1, t2) = random_votes(&mut rng);
            map.insert(id.clone(), tweet(&id, lang, &format!("TRAIN_{up}"), &t1, &t2));
        }
        for i in 0..dev {
            let id = format!("3{prefix}{i:04}");
            let (t1, t2) = random_votes(&mut rng);
            map.insert(id.clone(), tweet(&id, lang, &format!("DEV_{up}"), &t1, &t2));
        }
        let id = format!("4{prefix}0000");
        map.insert(id.clone(), test_tweet(&id, lang));
    }
    Value::Object(map)
}

pub fn corpus_bytes(train: usize, dev: usize, seed: u64) -> Vec<u8> {
    serde_json::to_vec_pretty(&corpus_json(train, dev, seed)).unwrap()
}
