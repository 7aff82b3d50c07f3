//! Quality metrics and timing for out-of-sample embeddings.
//!
//! Both error metrics compare each new point against *all* reference points,
//! not only the landmarks used to place it.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::lsmds::Configuration;
use crate::matrix::{euclidean, format_f64, Matrix};

/// Dissimilarities below this are left out of the total error, which divides by them.
pub const ZERO_DISSIMILARITY_EPS: f64 = 1e-12;

/// `sum_i (delta_i - ||x_i - y||)^2` over every reference point `x_i`.
pub fn point_error(config: &Configuration, y: &[f64], deltas_full: &[f64]) -> Result<f64> {
    Error::check_dim(config.len(), deltas_full.len())?;
    Error::check_dim(config.dimension(), y.len())?;
    Ok(config
        .coords()
        .row_iter()
        .zip(deltas_full)
        .map(|(x, delta)| {
            let r = delta - euclidean(x, y);
            r * r
        })
        .sum())
}

/// Point error divided by the sum of the point's dissimilarities.
pub fn normalized_point_error(perr: f64, deltas_full: &[f64]) -> Result<f64> {
    let total: f64 = deltas_full.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::Degenerate(
            "cannot normalize a point error by a zero dissimilarity sum".into(),
        ));
    }
    Ok(perr / total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalError {
    pub value: f64,
    /// Terms left out because their dissimilarity was (near) zero.
    pub skipped_terms: usize,
}

/// `sum_{i,j} (delta_ij - ||x_i - y_j||)^2 / delta_ij` over reference points
/// `i` and new points `j`. `cross_delta` is `N x M`.
pub fn total_error(
    config: &Configuration,
    points: &Matrix,
    cross_delta: &DissimilarityMatrix,
) -> Result<TotalError> {
    if cross_delta.rows() != config.len() || cross_delta.cols() != points.rows() {
        return Err(Error::shape(format!(
            "cross dissimilarities are {}x{}, expected {}x{}",
            cross_delta.rows(),
            cross_delta.cols(),
            config.len(),
            points.rows()
        )));
    }
    if points.rows() > 0 {
        Error::check_dim(config.dimension(), points.cols())?;
    }
    let mut value = 0.0;
    let mut skipped_terms = 0;
    for (i, x) in config.coords().row_iter().enumerate() {
        for (j, delta) in cross_delta.row(i).iter().enumerate() {
            if *delta < ZERO_DISSIMILARITY_EPS {
                skipped_terms += 1;
                continue;
            }
            let r = delta - euclidean(x, points.row(j));
            value += r * r / delta;
        }
    }
    Ok(TotalError {
        value,
        skipped_terms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub samples: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl TimingStats {
    pub fn from_samples(samples: Vec<f64>) -> Self {
        let n = samples.len().max(1) as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        TimingStats {
            mean,
            min: if samples.is_empty() { 0.0 } else { min },
            max: if samples.is_empty() { 0.0 } else { max },
            samples,
        }
    }
}

/// Runs `f` once untimed, then `repeats` times on the monotonic clock.
/// Returns the last result with per-repeat wall time in seconds.
pub fn time_op<T>(repeats: usize, mut f: impl FnMut() -> T) -> (T, TimingStats) {
    let mut last = f();
    let mut samples = Vec::with_capacity(repeats);
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        last = std::hint::black_box(f());
        samples.push(start.elapsed().as_secs_f64());
    }
    (last, TimingStats::from_samples(samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum OseMethod {
    Optimize,
    Neural,
}

impl std::fmt::Display for OseMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OseMethod::Optimize => "optimize",
            OseMethod::Neural => "neural",
        })
    }
}

/// Everything measured for one out-of-sample run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OseReport {
    pub method: OseMethod,
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub k: usize,
    pub point_ids: Vec<usize>,
    pub per_point_errors: Vec<f64>,
    pub normalized_per_point_errors: Vec<f64>,
    pub total_error: f64,
    pub skipped_terms: usize,
    /// Mean seconds per point, one entry per point, with summary stats.
    pub timings: TimingStats,
    pub train_seconds: Option<f64>,
}

impl OseReport {
    /// Scores `points` (`M x K`) against the reference configuration.
    /// `cross_delta` is `N x M`; `timings.samples` must hold one entry per point.
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        method: OseMethod,
        config: &Configuration,
        l: usize,
        point_ids: Vec<usize>,
        points: &Matrix,
        cross_delta: &DissimilarityMatrix,
        timings: TimingStats,
        train_seconds: Option<f64>,
    ) -> Result<OseReport> {
        let m = points.rows();
        if point_ids.len() != m || timings.samples.len() != m {
            return Err(Error::shape(
                "one id and one timing sample per point are required",
            ));
        }
        let total = total_error(config, points, cross_delta)?;
        let by_point = cross_delta.values().transpose();
        let mut per_point_errors = Vec::with_capacity(m);
        let mut normalized = Vec::with_capacity(m);
        for j in 0..m {
            let perr = point_error(config, points.row(j), by_point.row(j))?;
            per_point_errors.push(perr);
            normalized.push(normalized_point_error(perr, by_point.row(j))?);
        }
        let report = OseReport {
            method,
            n: config.len(),
            m,
            l,
            k: config.dimension(),
            point_ids,
            per_point_errors,
            normalized_per_point_errors: normalized,
            total_error: total.value,
            skipped_terms: total.skipped_terms,
            timings,
            train_seconds,
        };
        if !report.total_error.is_finite() {
            return Err(Error::NumericalFailure("total error is not finite".into()));
        }
        Ok(report)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::corrupt(path, e))
    }

    /// Writes `point_id,perr,perr_norm,seconds`.
    pub fn write_point_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "point_id,perr,perr_norm,seconds").map_err(io)?;
        for j in 0..self.m {
            writeln!(
                out,
                "{},{},{},{}",
                self.point_ids[j],
                format_f64(self.per_point_errors[j]),
                format_f64(self.normalized_per_point_errors[j]),
                format_f64(self.timings.samples[j])
            )
            .map_err(io)?;
        }
        out.flush().map_err(io)
    }
}
