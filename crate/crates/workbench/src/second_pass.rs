//! Choosing the subset of annotated entries shown to a second annotator.

use std::collections::BTreeMap;

use mrc_audit::ingest::Dataset;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetMode {
    /// Uniform over all candidates.
    #[default]
    Random,
    /// The same fraction drawn separately from each dataset.
    Stratified,
}

/// `round(fraction * n)` with halves rounded up, at least 1 when both are
/// positive, at most `n`.
pub fn subset_size(n: usize, fraction: f64) -> usize {
    if n == 0 || fraction <= 0.0 {
        return 0;
    }
    let k = (fraction * n as f64 + 0.5).floor() as usize;
    k.clamp(1, n)
}

fn draw(mut ids: Vec<String>, k: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    ids.sort();
    ids.shuffle(rng);
    ids.truncate(k);
    ids
}

/// Selects entry ids, sorted, from `candidates` (entry id with its dataset).
pub fn select(candidates: &[(String, Dataset)], fraction: f64, seed: u64, mode: SubsetMode) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = match mode {
        SubsetMode::Random => {
            let ids: Vec<String> = candidates.iter().map(|(id, _)| id.clone()).collect();
            let k = subset_size(ids.len(), fraction);
            draw(ids, k, &mut rng)
        }
        SubsetMode::Stratified => {
            let mut groups: BTreeMap<Dataset, Vec<String>> = BTreeMap::new();
            for (id, d) in candidates {
                groups.entry(*d).or_default().push(id.clone());
            }
            let mut out = Vec::new();
            for (_, ids) in groups {
                let k = subset_size(ids.len(), fraction);
                out.extend(draw(ids, k, &mut rng));
            }
            out
        }
    };
    out.sort();
    out
}
