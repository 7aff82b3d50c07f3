//! Least-squares MDS of the reference set by gradient descent on raw stress.
//!
//! Raw stress sums `(d_ij - delta_ij)^2` over all ordered pairs `(i, j)`.
//! Every function here evaluates the `i < j` half and doubles it, and the
//! normalizer `sum delta_ij^2` follows the same convention.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::descent::{self, DescentOptions, InitKind, COINCIDENCE_EPS};
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::matrix::{euclidean, format_f64, Matrix};

/// `N x K` coordinates in the embedding space.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    coords: Matrix,
}

impl Configuration {
    pub fn new(coords: Matrix) -> Result<Self> {
        if coords.rows() > 0 && coords.cols() == 0 {
            return Err(Error::InvalidParameter(
                "embedding dimension must be >= 1".into(),
            ));
        }
        if !coords.is_finite() {
            return Err(Error::NumericalFailure(
                "configuration has non-finite coordinates".into(),
            ));
        }
        Ok(Configuration { coords })
    }

    pub fn coords(&self) -> &Matrix {
        &self.coords
    }

    pub fn into_coords(self) -> Matrix {
        self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.cols()
    }

    pub fn len(&self) -> usize {
        self.coords.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.rows() == 0
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.coords.row(i)
    }

    /// Writes `id,c1,...,cK` with ids `0..N`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let ids: Vec<usize> = (0..self.len()).collect();
        write_coords_csv(path, &ids, &self.coords)
    }

    /// Reads a configuration CSV. Rows must carry ids `0..N` in order.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let (ids, coords) = read_coords_csv(path)?;
        if ids.iter().enumerate().any(|(i, id)| i != *id) {
            return Err(Error::corrupt(path, "ids must be 0..N in order"));
        }
        Configuration::new(coords).map_err(|e| Error::corrupt(path, e))
    }
}

pub(crate) fn write_coords_csv(path: &Path, ids: &[usize], coords: &Matrix) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    let header: Vec<String> = std::iter::once("id".to_string())
        .chain((1..=coords.cols()).map(|k| format!("c{k}")))
        .collect();
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for (id, row) in ids.iter().zip(coords.row_iter()) {
        write!(out, "{id}").map_err(io)?;
        for v in row {
            write!(out, ",{}", format_f64(*v)).map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub(crate) fn read_coords_csv(path: &Path) -> Result<(Vec<usize>, Matrix)> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::corrupt(path, e))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::corrupt(path, e))?
        .clone();
    if headers.get(0) != Some("id") {
        return Err(Error::corrupt(path, "first column must be `id`"));
    }
    let k = headers.len() - 1;
    let mut ids = Vec::new();
    let mut data = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::corrupt(path, e))?;
        ids.push(
            record[0]
                .parse::<usize>()
                .map_err(|e| Error::corrupt(path, e))?,
        );
        for field in record.iter().skip(1) {
            data.push(field.parse::<f64>().map_err(|e| Error::corrupt(path, e))?);
        }
    }
    let coords = Matrix::from_vec(ids.len(), k, data).map_err(|e| Error::corrupt(path, e))?;
    Ok((ids, coords))
}

fn check_shapes(coords: &Matrix, delta: &DissimilarityMatrix) -> Result<()> {
    if !delta.is_symmetric() {
        return Err(Error::shape(
            "stress needs a symmetric dissimilarity matrix",
        ));
    }
    if delta.rows() != coords.rows() {
        return Err(Error::shape(format!(
            "configuration has {} points but the dissimilarity matrix is {}x{}",
            coords.rows(),
            delta.rows(),
            delta.cols()
        )));
    }
    Ok(())
}

fn raw_stress_flat(coords: &[f64], k: usize, delta: &DissimilarityMatrix) -> f64 {
    let n = delta.rows();
    let mut sum = 0.0;
    for i in 0..n {
        let xi = &coords[i * k..(i + 1) * k];
        let drow = delta.row(i);
        for j in i + 1..n {
            let r = euclidean(xi, &coords[j * k..(j + 1) * k]) - drow[j];
            sum += r * r;
        }
    }
    2.0 * sum
}

fn stress_gradient_flat(coords: &[f64], k: usize, delta: &DissimilarityMatrix, grad: &mut [f64]) {
    let n = delta.rows();
    grad.iter_mut().for_each(|g| *g = 0.0);
    let mut diff = vec![0.0; k];
    for i in 0..n {
        let drow = delta.row(i);
        for j in i + 1..n {
            let (xi, xj) = (&coords[i * k..(i + 1) * k], &coords[j * k..(j + 1) * k]);
            let mut d2 = 0.0;
            for c in 0..k {
                diff[c] = xi[c] - xj[c];
                d2 += diff[c] * diff[c];
            }
            let d = d2.sqrt();
            if d < COINCIDENCE_EPS {
                continue;
            }
            // each unordered pair appears twice in the full sum
            let scale = 4.0 * (d - drow[j]) / d;
            for c in 0..k {
                grad[i * k + c] += scale * diff[c];
                grad[j * k + c] -= scale * diff[c];
            }
        }
    }
}

fn squared_delta_sum(delta: &DissimilarityMatrix) -> f64 {
    let n = delta.rows();
    let mut sum = 0.0;
    for i in 0..n {
        sum += delta.row(i)[i + 1..].iter().map(|v| v * v).sum::<f64>();
    }
    2.0 * sum
}

/// Raw stress over all ordered pairs.
pub fn raw_stress(config: &Configuration, delta: &DissimilarityMatrix) -> Result<f64> {
    check_shapes(&config.coords, delta)?;
    Ok(raw_stress_flat(
        config.coords.as_slice(),
        config.dimension(),
        delta,
    ))
}

/// `sqrt(raw_stress / sum delta_ij^2)`.
pub fn normalized_stress(config: &Configuration, delta: &DissimilarityMatrix) -> Result<f64> {
    let raw = raw_stress(config, delta)?;
    let denom = squared_delta_sum(delta);
    if denom == 0.0 {
        return Err(Error::Degenerate("all dissimilarities are zero".into()));
    }
    Ok((raw / denom).sqrt())
}

/// Analytic gradient of [`raw_stress`] with respect to every coordinate.
///
/// `d/dx_i = 4 * sum_{j != i} (d_ij - delta_ij) (x_i - x_j) / d_ij`; pairs
/// closer than [`COINCIDENCE_EPS`] contribute nothing.
pub fn stress_gradient(config: &Configuration, delta: &DissimilarityMatrix) -> Result<Matrix> {
    check_shapes(&config.coords, delta)?;
    let mut grad = Matrix::zeros(config.len(), config.dimension());
    stress_gradient_flat(
        config.coords.as_slice(),
        config.dimension(),
        delta,
        grad.as_mut_slice(),
    );
    Ok(grad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub config: Configuration,
    /// Normalized stress at the start and after every accepted iteration.
    pub stress_trace: Vec<f64>,
    pub iterations: usize,
}

impl Embedding {
    pub fn final_stress(&self) -> f64 {
        *self.stress_trace.last().expect("trace is never empty")
    }

    /// Writes the trace as `iter,normalized_stress`.
    pub fn write_trace_csv(&self, path: &Path) -> Result<()> {
        write_trace_csv(path, &self.stress_trace)
    }
}

pub fn write_trace_csv(path: &Path, trace: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(out, "iter,normalized_stress").map_err(io)?;
    for (i, s) in trace.iter().enumerate() {
        writeln!(out, "{i},{}", format_f64(*s)).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::corrupt(path, e))?;
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| Error::corrupt(path, e))?;
            r.get(1)
                .ok_or_else(|| Error::corrupt(path, "missing stress column"))?
                .parse::<f64>()
                .map_err(|e| Error::corrupt(path, e))
        })
        .collect()
}

/// Uniform random start in `[-1, 1]^K`.
pub fn random_init(n: usize, k: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * k).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    Matrix::from_vec(n, k, data).expect("sized by construction")
}

/// Embeds the objects behind `delta` into `k` dimensions from a seeded random start.
pub fn embed(delta: &DissimilarityMatrix, k: usize, opts: &DescentOptions) -> Result<Embedding> {
    if opts.init == InitKind::Given {
        return Err(Error::InvalidParameter(
            "init = given requires starting coordinates; use embed_from".into(),
        ));
    }
    if k == 0 {
        return Err(Error::InvalidParameter(
            "embedding dimension must be >= 1".into(),
        ));
    }
    embed_from(delta, random_init(delta.rows(), k, opts.seed), opts)
}

/// Embeds starting from the supplied coordinates.
pub fn embed_from(
    delta: &DissimilarityMatrix,
    initial: Matrix,
    opts: &DescentOptions,
) -> Result<Embedding> {
    check_shapes(&initial, delta)?;
    opts.validate()?;
    let k = initial.cols();
    if k == 0 {
        return Err(Error::InvalidParameter(
            "embedding dimension must be >= 1".into(),
        ));
    }
    let n = initial.rows();
    if n <= 1 {
        return Ok(Embedding {
            config: Configuration::new(initial)?,
            stress_trace: vec![0.0],
            iterations: 0,
        });
    }
    let denom = squared_delta_sum(delta);
    if denom == 0.0 {
        return Err(Error::Degenerate("all dissimilarities are zero".into()));
    }

    let result = descent::minimize(
        initial.into_vec(),
        |x| raw_stress_flat(x, k, delta),
        |x, g| stress_gradient_flat(x, k, delta, g),
        opts,
    )?;
    let coords = Matrix::from_vec(n, k, result.x)?;
    if !coords.is_finite() {
        return Err(Error::NumericalFailure("embedding diverged".into()));
    }
    Ok(Embedding {
        config: Configuration::new(coords)?,
        stress_trace: result.trace.iter().map(|r| (r / denom).sqrt()).collect(),
        iterations: result.iterations,
    })
}
