//! Fixtures shared by the benchmarks.

use lsmds::dissimilarity::{pairwise_matrix, Metric, ObjectSet};
use lsmds::lsmds::random_init;
use lsmds::synth::{generate_names, NamePool};
use lsmds::{Configuration, DissimilarityMatrix, Matrix};

pub fn names(n: usize, seed: u64) -> Vec<String> {
    generate_names(
        n,
        seed,
        &NamePool::bundled_given(),
        &NamePool::bundled_surnames(),
    )
    .expect("bundled pools cover the request")
    .names
}

/// Levenshtein matrix over `n` generated names and a random `k`-dimensional start.
pub fn reference(n: usize, k: usize) -> (DissimilarityMatrix, Configuration) {
    let set = ObjectSet::strings(names(n, 7)).expect("non-empty");
    let delta = pairwise_matrix(&set, Metric::Levenshtein).expect("strings take levenshtein");
    let config = Configuration::new(random_init(n, k, 1)).expect("finite");
    (delta, config)
}

/// `l` random landmark coordinates in `k` dimensions and one query's dissimilarities.
pub fn point_query(l: usize, k: usize) -> (Matrix, Vec<f64>) {
    let landmarks = random_init(l, k, 3);
    let target = random_init(1, k, 4);
    let deltas = landmarks
        .row_iter()
        .map(|row| {
            row.iter()
                .zip(target.row(0))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    (landmarks, deltas)
}
