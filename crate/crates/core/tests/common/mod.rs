//! Brute-force oracles and instance generators shared by the integration tests.
//! Each oracle is written directly from the formula, without touching the
//! library's own kernels.
#![allow(dead_code, clippy::needless_range_loop)]

use lsmds::ose_neural::{loss_gradient, LossKind};
use lsmds::{Configuration, DissimilarityMatrix, Matrix, MlpModel, TrainingSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-6;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(lo..hi)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]).powi(2);
    }
    s.sqrt()
}

/// Random symmetric dissimilarities with zero diagonal.
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DissimilarityMatrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(lo..hi);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    DissimilarityMatrix::symmetric(m).unwrap()
}

/// Euclidean distances between the rows of `points`.
pub fn euclidean_matrix(points: &Matrix) -> DissimilarityMatrix {
    let n = points.rows();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m.set(i, j, dist(points.row(i), points.row(j)));
            }
        }
    }
    DissimilarityMatrix::symmetric(m).unwrap()
}

/// Full double sum over all ordered pairs `i != j`.
pub fn raw_stress_oracle(x: &Matrix, delta: &DissimilarityMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..x.rows() {
        for j in 0..x.rows() {
            if i != j {
                s += (dist(x.row(i), x.row(j)) - delta.get(i, j)).powi(2);
            }
        }
    }
    s
}

pub fn point_stress_oracle(y: &[f64], landmarks: &Matrix, deltas: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..landmarks.rows() {
        s += (dist(landmarks.row(i), y) - deltas[i]).powi(2);
    }
    s
}

pub fn point_error_oracle(x: &Matrix, y: &[f64], deltas: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.rows() {
        s += (deltas[i] - dist(x.row(i), y)).powi(2);
    }
    s
}

/// `cross` is `N x M`; zero dissimilarities are left out.
pub fn total_error_oracle(x: &Matrix, y: &Matrix, cross: &Matrix) -> (f64, usize) {
    let mut s = 0.0;
    let mut skipped = 0;
    for j in 0..y.rows() {
        for i in 0..x.rows() {
            let d = cross.get(i, j);
            if d < 1e-12 {
                skipped += 1;
            } else {
                s += (d - dist(x.row(i), y.row(j))).powi(2) / d;
            }
        }
    }
    (s, skipped)
}

/// Farthest point sampling by rescanning every candidate against every chosen
/// landmark at each step.
pub fn fps_oracle(delta: &DissimilarityMatrix, count: usize, first: usize) -> Vec<usize> {
    let n = delta.rows();
    let mut chosen = vec![first];
    while chosen.len() < count {
        let mut best = usize::MAX;
        let mut best_score = f64::NEG_INFINITY;
        for c in 0..n {
            if chosen.contains(&c) {
                continue;
            }
            let score = chosen
                .iter()
                .map(|&s| delta.get(c, s))
                .fold(f64::INFINITY, f64::min);
            if score > best_score {
                best = c;
                best_score = score;
            }
        }
        chosen.push(best);
    }
    chosen
}

/// Classic dynamic-programming edit distance over chars.
pub fn levenshtein_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

pub fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    const ALPHABET: &[char] = &['a', 'b', 'c', 'd', 'e', ' ', 'é', 'ß'];
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())])
        .collect()
}

/// Central difference of `f` at `x` along every coordinate.
pub fn central_differences(x: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut work = x.to_vec();
    (0..x.len())
        .map(|i| {
            work[i] = x[i] + FD_STEP;
            let up = f(&work);
            work[i] = x[i] - FD_STEP;
            let down = f(&work);
            work[i] = x[i];
            (up - down) / (2.0 * FD_STEP)
        })
        .collect()
}

/// Largest entrywise `|a - b| / max(|a|, |b|, floor)`.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64], floor: f64) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(floor))
        .fold(0.0, f64::max)
}

pub fn config(m: Matrix) -> Configuration {
    Configuration::new(m).unwrap()
}

fn params_mut(model: &mut MlpModel) -> Vec<&mut f64> {
    model
        .layers_mut()
        .iter_mut()
        .flat_map(|l| {
            l.weights
                .as_mut_slice()
                .iter_mut()
                .chain(l.biases.iter_mut())
        })
        .collect()
}

/// Central differences of the training loss with respect to every parameter,
/// in the order of `Gradients::flatten`.
pub fn network_fd(model: &MlpModel, batch: &TrainingSet, kind: LossKind) -> Vec<f64> {
    let count = model.parameter_count();
    let mut work = model.clone();
    let eval = |m: &MlpModel| loss_gradient(m, batch, kind).unwrap().0;
    (0..count)
        .map(|p| {
            let orig = *params_mut(&mut work)[p];
            *params_mut(&mut work)[p] = orig + FD_STEP;
            let up = eval(&work);
            *params_mut(&mut work)[p] = orig - FD_STEP;
            let down = eval(&work);
            *params_mut(&mut work)[p] = orig;
            (up - down) / (2.0 * FD_STEP)
        })
        .collect()
}
