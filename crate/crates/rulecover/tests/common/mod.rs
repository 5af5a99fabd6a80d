//! Shared fixtures for the integration suites.
#![allow(dead_code)] // each test binary uses a different subset

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rulecover::bitset::BitSet;
use rulecover::dataset::{resolve_consistency, BinaryDataset};
use rulecover::enumerator::Term;
use rulecover::setcover::CoverMatrix;

pub const DATE_CSV: &str = "\
Day,Venue,Weather,TV Show,Date
Weekday,Dinner,Warm,Bad,No
Weekend,Club,Warm,Bad,Yes
Weekend,Club,Warm,Bad,Yes
Weekend,Club,Cold,Good,No
";

/// Random perfectly-classifiable dataset: distinct vectors over up to
/// `max_features` Boolean features, two classes, both present.
pub fn random_dataset(
    rng: &mut ChaCha8Rng,
    max_features: usize,
    max_examples: usize,
) -> BinaryDataset {
    let k = rng.gen_range(2..=max_features);
    let space = 1usize << k;
    let m = rng.gen_range(2..=space.min(max_examples));
    let mut indices: Vec<usize> = (0..space).collect();
    indices.shuffle(rng);
    let mut examples: Vec<(Vec<bool>, usize)> = indices[..m]
        .iter()
        .map(|&i| {
            let bits = (0..k).map(|b| i & (1 << b) != 0).collect();
            (bits, rng.gen_range(0..2))
        })
        .collect();
    examples[0].1 = 0;
    examples[1].1 = 1;
    BinaryDataset {
        num_features: k,
        examples,
        class_count: 2,
    }
}

/// (positives, negatives) for the given class under merged duplicates.
pub fn class_split(ds: &BinaryDataset, class: usize) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
    let split = resolve_consistency(ds, class, false);
    (split.positives, split.negatives)
}

/// Canonical comparison key for a term: its literal list plus coverage.
pub fn term_key(t: &Term) -> (Vec<(usize, bool)>, Vec<usize>) {
    (
        t.literals()
            .iter()
            .map(|l| (l.feature, l.positive))
            .collect(),
        t.coverage().indices(),
    )
}

/// Random valid cover matrix with at most `max_cols` columns and
/// `max_rows` rows; weights in 1..=4 as if they were term sizes.
pub fn random_cover_matrix(rng: &mut ChaCha8Rng, max_cols: usize, max_rows: usize) -> CoverMatrix {
    let rows = rng.gen_range(1..=max_rows);
    let cols = rng.gen_range(1..=max_cols);
    let mut columns = Vec::with_capacity(cols);
    let mut weights = Vec::with_capacity(cols);
    for _ in 0..cols {
        let mut c = BitSet::new(rows);
        for r in 0..rows {
            if rng.gen_bool(0.35) {
                c.insert(r);
            }
        }
        columns.push(c);
        weights.push(rng.gen_range(1..=4));
    }
    for r in 0..rows {
        if !columns.iter().any(|c| c.contains(r)) {
            let j = rng.gen_range(0..cols);
            columns[j].insert(r);
        }
    }
    CoverMatrix::new(rows, columns, weights)
}
