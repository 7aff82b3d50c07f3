//! Synthetic entity names of the form `"given surname"`.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GIVEN_NAMES: &str = include_str!("../data/given_names.txt");
const SURNAMES: &str = include_str!("../data/surnames.txt");

pub const BUNDLED_GIVEN_ID: &str = "bundled:given_names";
pub const BUNDLED_SURNAME_ID: &str = "bundled:surnames";

/// A named list of name parts.
#[derive(Debug, Clone, PartialEq)]
pub struct NamePool {
    pub id: String,
    pub entries: Vec<String>,
}

impl NamePool {
    pub fn new(id: impl Into<String>, entries: Vec<String>) -> Result<Self> {
        let id = id.into();
        let mut seen = HashSet::new();
        for e in &entries {
            if e.trim().is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "pool {id} has an empty entry"
                )));
            }
            if !seen.insert(e.as_str()) {
                return Err(Error::InvalidParameter(format!("pool {id} repeats {e:?}")));
            }
        }
        Ok(NamePool { id, entries })
    }

    pub fn bundled_given() -> Self {
        NamePool {
            id: BUNDLED_GIVEN_ID.into(),
            entries: GIVEN_NAMES.lines().map(str::to_owned).collect(),
        }
    }

    pub fn bundled_surnames() -> Self {
        NamePool {
            id: BUNDLED_SURNAME_ID.into(),
            entries: SURNAMES.lines().map(str::to_owned).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NameDataset {
    pub names: Vec<String>,
    pub seed: u64,
    pub source_lists: Vec<String>,
}

/// Samples `n` distinct `"given surname"` pairs uniformly without replacement.
pub fn generate_names(
    n: usize,
    seed: u64,
    given: &NamePool,
    surnames: &NamePool,
) -> Result<NameDataset> {
    let combos = given.len().saturating_mul(surnames.len());
    if n > combos {
        return Err(Error::PoolTooSmall {
            given: given.len(),
            surnames: surnames.len(),
            requested: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = index::sample(&mut rng, combos, n)
        .into_iter()
        .map(|c| {
            format!(
                "{} {}",
                given.entries[c / surnames.len()],
                surnames.entries[c % surnames.len()]
            )
        })
        .collect();
    Ok(NameDataset {
        names,
        seed,
        source_lists: vec![given.id.clone(), surnames.id.clone()],
    })
}

/// Disjoint reference and out-of-sample lists drawn by a seeded shuffle.
pub fn split_reference_holdout(
    names: &[String],
    n_ref: usize,
    n_out: usize,
    seed: u64,
) -> Result<(Vec<String>, Vec<String>)> {
    let needed = n_ref.saturating_add(n_out);
    if needed > names.len() {
        return Err(Error::TooMany {
            requested: needed,
            available: names.len(),
        });
    }
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let reference = order[..n_ref].iter().map(|&i| names[i].clone()).collect();
    let holdout = order[n_ref..needed]
        .iter()
        .map(|&i| names[i].clone())
        .collect();
    Ok((reference, holdout))
}

pub fn write_names(path: &Path, names: &[String]) -> Result<()> {
    let mut text = String::with_capacity(names.len() * 16);
    for name in names {
        text.push_str(name);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads one name per line, skipping blank lines.
pub fn read_names(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty())
        .map(str::to_owned)
        .collect())
}
