//! Out-of-sample embedding by per-point stress minimization.
//!
//! A new object is placed by minimizing
//! `sum_i (||l_i - y|| - delta_i)^2` over its `K` coordinates, where `l_i` are
//! the fixed landmark coordinates and `delta_i` the original-space
//! dissimilarities from the object to each landmark. Only the `L` landmark
//! dissimilarities are ever read.

use std::path::Path;

use rayon::prelude::*;

use crate::descent::{self, DescentOptions, COINCIDENCE_EPS};
use crate::error::{Error, Result};
use crate::lsmds::{read_coords_csv, write_coords_csv};
use crate::matrix::Matrix;

/// Dissimilarities from one new object to every landmark, plus the landmarks'
/// coordinates.
#[derive(Debug, Clone, Copy)]
pub struct PointQuery<'a> {
    deltas: &'a [f64],
    landmarks: &'a Matrix,
}

impl<'a> PointQuery<'a> {
    pub fn new(deltas: &'a [f64], landmarks: &'a Matrix) -> Result<Self> {
        Error::check_dim(landmarks.rows(), deltas.len())?;
        if deltas.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidParameter(
                "landmark dissimilarities must be finite and non-negative".into(),
            ));
        }
        if !landmarks.is_finite() {
            return Err(Error::InvalidParameter(
                "landmark coordinates must be finite".into(),
            ));
        }
        Ok(PointQuery { deltas, landmarks })
    }

    pub fn deltas(&self) -> &[f64] {
        self.deltas
    }

    pub fn landmarks(&self) -> &Matrix {
        self.landmarks
    }

    pub fn dimension(&self) -> usize {
        self.landmarks.cols()
    }

    fn stress(&self, y: &[f64]) -> f64 {
        self.landmarks
            .row_iter()
            .zip(self.deltas)
            .map(|(l, delta)| {
                let d = l
                    .iter()
                    .zip(y)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                (d - delta) * (d - delta)
            })
            .sum()
    }

    fn gradient(&self, y: &[f64], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (l, delta) in self.landmarks.row_iter().zip(self.deltas) {
            let d = l
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if d < COINCIDENCE_EPS {
                continue;
            }
            let scale = 2.0 * (d - delta) / d;
            for ((g, yc), lc) in grad.iter_mut().zip(y).zip(l) {
                *g += scale * (yc - lc);
            }
        }
    }
}

pub fn point_stress(y: &[f64], q: &PointQuery<'_>) -> Result<f64> {
    Error::check_dim(q.dimension(), y.len())?;
    Ok(q.stress(y))
}

/// `2 * sum_i (||l_i - y|| - delta_i) (y - l_i) / ||l_i - y||`, skipping
/// landmarks that coincide with `y`.
pub fn point_stress_gradient(y: &[f64], q: &PointQuery<'_>) -> Result<Vec<f64>> {
    Error::check_dim(q.dimension(), y.len())?;
    let mut grad = vec![0.0; y.len()];
    q.gradient(y, &mut grad);
    Ok(grad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointEmbedding {
    pub coords: Vec<f64>,
    pub iterations: usize,
    pub stress: f64,
}

/// Places one point, starting from the origin.
pub fn embed_point(q: &PointQuery<'_>, opts: &DescentOptions) -> Result<PointEmbedding> {
    embed_point_from(q, vec![0.0; q.dimension()], opts)
}

/// Places one point from a caller-chosen start.
pub fn embed_point_from(
    q: &PointQuery<'_>,
    start: Vec<f64>,
    opts: &DescentOptions,
) -> Result<PointEmbedding> {
    Error::check_dim(q.dimension(), start.len())?;
    if q.deltas.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one landmark is required".into(),
        ));
    }
    let result = descent::minimize(start, |y| q.stress(y), |y, g| q.gradient(y, g), opts)?;
    if result.x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("point embedding diverged".into()));
    }
    Ok(PointEmbedding {
        stress: *result.trace.last().expect("trace is never empty"),
        coords: result.x,
        iterations: result.iterations,
    })
}

/// Places every row of `deltas` (`M x L`) against the same landmarks.
///
/// Points are independent and run in parallel; row `i` of the output equals
/// `embed_point` on row `i` of the input.
pub fn embed_batch(deltas: &Matrix, landmarks: &Matrix, opts: &DescentOptions) -> Result<Matrix> {
    if deltas.rows() > 0 {
        Error::check_dim(landmarks.rows(), deltas.cols())?;
    }
    let k = landmarks.cols();
    let rows: Vec<Vec<f64>> = (0..deltas.rows())
        .into_par_iter()
        .map(|i| {
            PointQuery::new(deltas.row(i), landmarks)
                .and_then(|q| embed_point(&q, opts))
                .map(|p| p.coords)
                .map_err(|e| Error::PointFailure {
                    index: i,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;
    let data = rows.into_iter().flatten().collect();
    Matrix::from_vec(deltas.rows(), k, data)
}

/// Writes out-of-sample coordinates as `id,c1,...,cK`; `ids` index the source object set.
pub fn write_points_csv(path: &Path, ids: &[usize], coords: &Matrix) -> Result<()> {
    if ids.len() != coords.rows() {
        return Err(Error::shape("one id per coordinate row is required"));
    }
    write_coords_csv(path, ids, coords)
}

pub fn read_points_csv(path: &Path) -> Result<(Vec<usize>, Matrix)> {
    read_coords_csv(path)
}
