use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{AnnotatedTweet, Corpus, Lang, SplitKind};
use crate::error::{Error, Result};
use crate::labels::Task;

pub const EXEMPLARS_PER_LANG: usize = 3;

fn has_votes(t: &AnnotatedTweet, task: Task) -> bool {
    match task {
        Task::Task1 => t.votes_task1.is_some(),
        Task::Task2 => t.votes_task1.is_some() && t.votes_task2.is_some(),
    }
}

/// Draws three English then three Spanish training tweets, uniformly without
/// replacement within each language. `exclude` keeps a target out of its own
/// prompt. The draw is a pure function of the corpus, task and seed.
pub fn sample_exemplars(corpus: &Corpus, task: Task, seed: u64, exclude: Option<&str>) -> Result<Vec<AnnotatedTweet>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * EXEMPLARS_PER_LANG);
    for lang in [Lang::En, Lang::Es] {
        let pool: Vec<&AnnotatedTweet> = corpus
            .annotated()
            .filter(|t| t.lang == lang && t.split.kind == SplitKind::Train && has_votes(t, task))
            .filter(|t| exclude != Some(t.id.as_str()))
            .collect();
        if pool.len() < EXEMPLARS_PER_LANG {
            return Err(Error::Prompt(format!(
                "need {EXEMPLARS_PER_LANG} {lang} training exemplars with {task} votes, found {}",
                pool.len()
            )));
        }
        out.extend(pool.choose_multiple(&mut rng, EXEMPLARS_PER_LANG).map(|t| (*t).clone()));
    }
    Ok(out)
}
