//! Landmark selection: uniform random sampling and farthest point sampling.

use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandmarkMethod {
    Random,
    Fps,
}

impl std::str::FromStr for LandmarkMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(LandmarkMethod::Random),
            "fps" => Ok(LandmarkMethod::Fps),
            _ => Err(Error::InvalidParameter(format!(
                "unknown landmark method {s:?}"
            ))),
        }
    }
}

/// Ordered, duplicate-free indices into the reference set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LandmarkSet {
    pub method: LandmarkMethod,
    pub seed: u64,
    pub indices: Vec<usize>,
}

impl LandmarkSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Checks the set against a population of `n` objects.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.indices.is_empty() {
            return Err(Error::InvalidParameter("landmark set is empty".into()));
        }
        let mut seen = vec![false; n];
        for &i in &self.indices {
            if i >= n {
                return Err(Error::InvalidParameter(format!(
                    "landmark index {i} out of range for {n} objects"
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate landmark index {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("landmarks serialize");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::corrupt(path, e))
    }
}

fn check_count(count: usize, n: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "landmark count must be >= 1".into(),
        ));
    }
    if count > n {
        return Err(Error::TooMany {
            requested: count,
            available: n,
        });
    }
    Ok(())
}

/// `count` distinct indices drawn uniformly from `0..n`.
pub fn random_landmarks(n: usize, count: usize, seed: u64) -> Result<LandmarkSet> {
    check_count(count, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(LandmarkSet {
        method: LandmarkMethod::Random,
        seed,
        indices: index::sample(&mut rng, n, count).into_vec(),
    })
}

/// Greedy max-min selection over the full dissimilarity matrix.
///
/// The first landmark is drawn uniformly from the seed. Each later one
/// maximizes the smallest dissimilarity to the landmarks already chosen,
/// breaking ties by the lowest index.
pub fn farthest_point_sampling(
    delta: &DissimilarityMatrix,
    count: usize,
    seed: u64,
) -> Result<LandmarkSet> {
    if !delta.is_symmetric() {
        return Err(Error::shape(
            "farthest point sampling needs a symmetric matrix",
        ));
    }
    let n = delta.rows();
    check_count(count, n)?;
    let first = ChaCha8Rng::seed_from_u64(seed).gen_range(0..n);
    Ok(LandmarkSet {
        method: LandmarkMethod::Fps,
        seed,
        indices: fps_from(delta, count, first).0,
    })
}

/// Runs FPS from a fixed first index. Also returns, for every pick after the
/// first, its min-dissimilarity to the earlier picks.
pub fn fps_from(delta: &DissimilarityMatrix, count: usize, first: usize) -> (Vec<usize>, Vec<f64>) {
    let n = delta.rows();
    let mut selected = vec![false; n];
    let mut min_dist: Vec<f64> = delta.row(first).to_vec();
    let mut indices = Vec::with_capacity(count);
    let mut radii = Vec::with_capacity(count.saturating_sub(1));
    indices.push(first);
    selected[first] = true;

    while indices.len() < count {
        let mut best: Option<(usize, f64)> = None;
        for (i, &d) in min_dist.iter().enumerate() {
            if selected[i] {
                continue;
            }
            // strict comparison keeps the lowest index on ties
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        let (next, radius) = best.expect("count <= n leaves a candidate");
        indices.push(next);
        radii.push(radius);
        selected[next] = true;
        for (m, &d) in min_dist.iter_mut().zip(delta.row(next)) {
            if d < *m {
                *m = d;
            }
        }
    }
    (indices, radii)
}
