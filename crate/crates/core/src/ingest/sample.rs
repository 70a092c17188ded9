use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::entry::{Dataset, GoldEntry};

/// Samples are drawn with ChaCha8 seeded through `seed_from_u64`, which is
/// portable across platforms for a fixed `rand_chacha` version.
pub type SampleRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    /// Restrict the pool to one dataset; `None` samples from every entry.
    pub dataset: Option<Dataset>,
    pub n: usize,
    pub seed: u64,
    pub unique_paragraphs: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("sample size must be at least 1")]
    ZeroSize,
    #[error("no entries to sample from")]
    NoEntries,
    #[error("requested {requested} entries but only {eligible} are eligible")]
    Capacity { requested: usize, eligible: usize },
}

/// Draws `plan.n` entries uniformly without replacement, in draw order.
///
/// The draw is a seeded Fisher-Yates pass over the pool; with
/// `unique_paragraphs` an entry whose concatenated passage text was already
/// drawn is skipped and the pass continues.
pub fn sample(entries: &[GoldEntry], plan: &SamplePlan) -> Result<Vec<GoldEntry>, SampleError> {
    if plan.n == 0 {
        return Err(SampleError::ZeroSize);
    }
    let pool: Vec<&GoldEntry> =
        entries.iter().filter(|e| plan.dataset.is_none_or(|d| e.dataset == d)).collect();
    if pool.is_empty() {
        return Err(SampleError::NoEntries);
    }
    let eligible = if plan.unique_paragraphs {
        pool.iter().map(|e| e.paragraph_key()).collect::<HashSet<_>>().len()
    } else {
        pool.len()
    };
    if eligible < plan.n {
        return Err(SampleError::Capacity { requested: plan.n, eligible });
    }

    let mut rng = SampleRng::seed_from_u64(plan.seed);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(plan.n);
    for i in 0..order.len() {
        let j = rng.random_range(i..order.len());
        order.swap(i, j);
        let e = pool[order[i]];
        if plan.unique_paragraphs && !seen.insert(e.paragraph_key()) {
            continue;
        }
        out.push(e.clone());
        if out.len() == plan.n {
            break;
        }
    }
    Ok(out)
}
