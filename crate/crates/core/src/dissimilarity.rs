//! Dissimilarities between objects of the original space.
//!
//! Objects are either strings (compared character by character, where a
//! character is one Unicode scalar value) or real vectors of a fixed length.
//! Matrices are dense, row-major, and stored as `f64`.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Minimum number of single-character insertions, deletions and
/// substitutions turning `a` into `b`.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    // keep the DP row over the shorter string
    let (long, short) = if a.len() >= b.len() {
        (&a, &b)
    } else {
        (&b, &a)
    };
    if short.is_empty() {
        return long.len();
    }

    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut cur = vec![0usize; short.len() + 1];
    for (i, lc) in long.iter().enumerate() {
        cur[0] = i + 1;
        for (j, sc) in short.iter().enumerate() {
            let substitution = prev[j] + usize::from(lc != sc);
            let deletion = prev[j + 1] + 1;
            let insertion = cur[j] + 1;
            cur[j + 1] = substitution.min(deletion).min(insertion);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// Classic Jaro distance `1 - jaro_similarity`, without the Winkler prefix boost.
pub fn jaro(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }

    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut a_matched = vec![false; a.len()];
    let mut b_matched = vec![false; b.len()];
    let mut matches = 0usize;
    for (i, ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_matched[j] && b[j] == *ca {
                a_matched[i] = true;
                b_matched[j] = true;
                matches += 1;
                break;
            }
        }
    }
    if matches == 0 {
        return 1.0;
    }

    let a_seq = a
        .iter()
        .zip(&a_matched)
        .filter(|(_, m)| **m)
        .map(|(c, _)| c);
    let b_seq = b
        .iter()
        .zip(&b_matched)
        .filter(|(_, m)| **m)
        .map(|(c, _)| c);
    let half_transpositions = a_seq.zip(b_seq).filter(|(x, y)| x != y).count();

    let m = matches as f64;
    let t = (half_transpositions / 2) as f64;
    let similarity = (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0;
    1.0 - similarity
}

/// Ukkonen's q-gram distance: the L1 distance between q-gram count profiles.
///
/// Strings shorter than `q` have an empty profile.
pub fn qgram(a: &str, b: &str, q: usize) -> f64 {
    fn profile(s: &str, q: usize) -> HashMap<Vec<char>, i64> {
        let chars: Vec<char> = s.chars().collect();
        let mut counts = HashMap::new();
        if q > 0 && chars.len() >= q {
            for gram in chars.windows(q) {
                *counts.entry(gram.to_vec()).or_insert(0) += 1;
            }
        }
        counts
    }
    let pa = profile(a, q);
    let mut pb = profile(b, q);
    let mut total = 0i64;
    for (gram, count) in pa {
        let other = pb.remove(&gram).unwrap_or(0);
        total += (count - other).abs();
    }
    total += pb.values().sum::<i64>();
    total as f64
}

/// `(sum |x_i - y_i|^p)^(1/p)`; `p = 2` is the Euclidean distance.
pub fn minkowski(x: &[f64], y: &[f64], p: f64) -> Result<f64> {
    Error::check_dim(x.len(), y.len())?;
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "Minkowski order p must be >= 1, got {p}"
        )));
    }
    Ok(minkowski_unchecked(x, y, p))
}

fn minkowski_unchecked(x: &[f64], y: &[f64], p: f64) -> f64 {
    let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
    if p == 1.0 {
        diffs.sum()
    } else if p == 2.0 {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        diffs.fold(0.0, f64::max)
    } else {
        diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    String,
    Vector,
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectKind::String => f.write_str("string"),
            ObjectKind::Vector => f.write_str("vector"),
        }
    }
}

/// An ordered, non-empty collection of objects of a single kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectSet {
    Strings(Vec<String>),
    /// One object per row.
    Vectors(Matrix),
}

impl ObjectSet {
    pub fn strings<S: Into<String>>(items: impl IntoIterator<Item = S>) -> Result<Self> {
        let items: Vec<String> = items.into_iter().map(Into::into).collect();
        let set = ObjectSet::Strings(items);
        set.validate()?;
        Ok(set)
    }

    pub fn vectors<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let set = ObjectSet::Vectors(Matrix::from_rows(rows)?);
        set.validate()?;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        match self {
            ObjectSet::Strings(items) => items.len(),
            ObjectSet::Vectors(m) => m.rows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ObjectKind {
        match self {
            ObjectSet::Strings(_) => ObjectKind::String,
            ObjectSet::Vectors(_) => ObjectKind::Vector,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidParameter(
                "object set must not be empty".into(),
            ));
        }
        if let ObjectSet::Vectors(m) = self {
            if !m.is_finite() {
                return Err(Error::InvalidParameter(
                    "vector objects must be finite".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Dissimilarity function applied to pairs of objects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Metric {
    Levenshtein,
    Jaro,
    QGram { q: usize },
    Minkowski { p: f64 },
}

impl Metric {
    pub const EUCLIDEAN: Metric = Metric::Minkowski { p: 2.0 };

    pub fn applies_to(&self) -> ObjectKind {
        match self {
            Metric::Levenshtein | Metric::Jaro | Metric::QGram { .. } => ObjectKind::String,
            Metric::Minkowski { .. } => ObjectKind::Vector,
        }
    }

    fn check(&self, kind: ObjectKind) -> Result<()> {
        if let Metric::Minkowski { p } = self {
            if p.is_nan() || *p < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "Minkowski order p must be >= 1, got {p}"
                )));
            }
        }
        if let Metric::QGram { q: 0 } = self {
            return Err(Error::InvalidParameter("q-gram length must be >= 1".into()));
        }
        if self.applies_to() != kind {
            return Err(Error::MetricKindMismatch {
                metric: self.to_string(),
                kind: kind.to_string(),
            });
        }
        Ok(())
    }

    fn eval_strings(&self, a: &str, b: &str) -> f64 {
        match *self {
            Metric::Levenshtein => levenshtein(a, b) as f64,
            Metric::Jaro => jaro(a, b),
            Metric::QGram { q } => qgram(a, b, q),
            Metric::Minkowski { .. } => unreachable!("checked by Metric::check"),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Levenshtein => f.write_str("levenshtein"),
            Metric::Jaro => f.write_str("jaro"),
            Metric::QGram { q } => write!(f, "qgram:{q}"),
            Metric::Minkowski { p } => write!(f, "minkowski:{p}"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::InvalidParameter(format!("unknown metric {s:?}"));
        match (name, arg) {
            ("levenshtein", None) => Ok(Metric::Levenshtein),
            ("jaro", None) => Ok(Metric::Jaro),
            ("qgram", None) => Ok(Metric::QGram { q: 2 }),
            ("qgram", Some(q)) => Ok(Metric::QGram {
                q: q.parse().map_err(|_| bad())?,
            }),
            ("euclidean", None) => Ok(Metric::EUCLIDEAN),
            ("minkowski", Some(p)) => Ok(Metric::Minkowski {
                p: p.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Metric {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Metric> for String {
    fn from(m: Metric) -> String {
        m.to_string()
    }
}

/// Pairwise dissimilarities, either a symmetric `N x N` matrix over one set
/// or a rectangular cross matrix between two sets.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    values: Matrix,
    symmetric: bool,
    metric: Option<Metric>,
}

impl DissimilarityMatrix {
    /// Wraps a square matrix, checking symmetry, the zero diagonal and non-negativity.
    pub fn symmetric(values: Matrix) -> Result<Self> {
        let d = DissimilarityMatrix {
            values,
            symmetric: true,
            metric: None,
        };
        d.validate()?;
        Ok(d)
    }

    /// Wraps a rectangular matrix of non-negative entries.
    pub fn cross(values: Matrix) -> Result<Self> {
        let d = DissimilarityMatrix {
            values,
            symmetric: false,
            metric: None,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = Some(metric);
        self
    }

    fn validate(&self) -> Result<()> {
        let v = &self.values;
        if let Some(bad) = v.as_slice().iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "dissimilarities must be finite and non-negative, found {bad}"
            )));
        }
        if self.symmetric {
            if v.rows() != v.cols() {
                return Err(Error::shape(format!(
                    "symmetric dissimilarity matrix must be square, got {}x{}",
                    v.rows(),
                    v.cols()
                )));
            }
            for i in 0..v.rows() {
                if v.get(i, i) != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "diagonal entry {i} is {} (must be 0)",
                        v.get(i, i)
                    )));
                }
                for j in 0..i {
                    if v.get(i, j) != v.get(j, i) {
                        return Err(Error::InvalidParameter(format!(
                            "matrix is not symmetric at ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn metric(&self) -> Option<Metric> {
        self.metric
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn into_values(self) -> Matrix {
        self.values
    }

    /// Sidecar descriptor path: `dist.csv` -> `dist.json`.
    pub fn descriptor_path(csv_path: &Path) -> PathBuf {
        csv_path.with_extension("json")
    }

    /// Writes the values as headerless CSV plus the JSON descriptor sidecar.
    pub fn save(&self, csv_path: &Path) -> Result<()> {
        self.values.write_csv(csv_path)?;
        let descriptor = MatrixDescriptor {
            rows: self.rows(),
            cols: self.cols(),
            symmetric: self.symmetric,
            metric: self.metric,
        };
        let json_path = Self::descriptor_path(csv_path);
        let text = serde_json::to_string_pretty(&descriptor).expect("descriptor serializes");
        std::fs::write(&json_path, text + "\n").map_err(|e| Error::io(&json_path, e))
    }

    pub fn load(csv_path: &Path) -> Result<Self> {
        let json_path = Self::descriptor_path(csv_path);
        let text = std::fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
        let descriptor: MatrixDescriptor =
            serde_json::from_str(&text).map_err(|e| Error::corrupt(&json_path, e))?;
        let mut values = Matrix::read_csv(csv_path)?;
        if descriptor.rows == 0 || descriptor.cols == 0 {
            values = Matrix::zeros(descriptor.rows, descriptor.cols);
        }
        if values.shape() != (descriptor.rows, descriptor.cols) {
            return Err(Error::corrupt(
                csv_path,
                format!(
                    "descriptor declares {}x{}, file holds {}x{}",
                    descriptor.rows,
                    descriptor.cols,
                    values.rows(),
                    values.cols()
                ),
            ));
        }
        let d = if descriptor.symmetric {
            Self::symmetric(values)
        } else {
            Self::cross(values)
        }
        .map_err(|e| Error::corrupt(csv_path, e))?;
        Ok(match descriptor.metric {
            Some(m) => d.with_metric(m),
            None => d,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixDescriptor {
    rows: usize,
    cols: usize,
    symmetric: bool,
    metric: Option<Metric>,
}

fn pair_value(metric: Metric, a: &ObjectSet, i: usize, b: &ObjectSet, j: usize) -> f64 {
    match (a, b) {
        (ObjectSet::Strings(x), ObjectSet::Strings(y)) => metric.eval_strings(&x[i], &y[j]),
        (ObjectSet::Vectors(x), ObjectSet::Vectors(y)) => match metric {
            Metric::Minkowski { p } => minkowski_unchecked(x.row(i), y.row(j), p),
            _ => unreachable!("checked by Metric::check"),
        },
        _ => unreachable!("kinds checked by caller"),
    }
}

/// Symmetric `N x N` matrix with entry `(i, j) = metric(items[i], items[j])`.
///
/// Rows are evaluated in parallel; each entry is computed independently, so
/// the result does not depend on scheduling.
pub fn pairwise_matrix(objs: &ObjectSet, metric: Metric) -> Result<DissimilarityMatrix> {
    objs.validate()?;
    metric.check(objs.kind())?;
    let n = objs.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| pair_value(metric, objs, i, objs, j))
                .collect()
        })
        .collect();

    let mut values = Matrix::zeros(n, n);
    for (i, row) in upper.into_iter().enumerate() {
        for (offset, v) in row.into_iter().enumerate() {
            let j = i + 1 + offset;
            values.set(i, j, v);
            values.set(j, i, v);
        }
    }
    DissimilarityMatrix {
        values,
        symmetric: true,
        metric: Some(metric),
    }
    .validated()
}

/// Rectangular `rows x cols` matrix with entry `(i, j) = metric(rows[i], cols[j])`.
pub fn cross_matrix(
    rows: &ObjectSet,
    cols: &ObjectSet,
    metric: Metric,
) -> Result<DissimilarityMatrix> {
    rows.validate()?;
    cols.validate()?;
    if rows.kind() != cols.kind() {
        return Err(Error::MetricKindMismatch {
            metric: metric.to_string(),
            kind: format!("mixed {}/{}", rows.kind(), cols.kind()),
        });
    }
    if let (ObjectSet::Vectors(a), ObjectSet::Vectors(b)) = (rows, cols) {
        Error::check_dim(a.cols(), b.cols())?;
    }
    metric.check(rows.kind())?;
    let m = cols.len();
    let data: Vec<f64> = (0..rows.len())
        .into_par_iter()
        .flat_map_iter(|i| (0..m).map(move |j| pair_value(metric, rows, i, cols, j)))
        .collect();
    let values = Matrix::from_vec(rows.len(), m, data)?;
    DissimilarityMatrix {
        values,
        symmetric: false,
        metric: Some(metric),
    }
    .validated()
}

impl DissimilarityMatrix {
    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerates every edit script up to `max_ops` operations (breadth first)
    /// and reports the first depth at which `target` is reachable.
    fn brute_force_edit_distance(src: &str, target: &str, max_ops: usize) -> Option<usize> {
        let alphabet: Vec<char> = src.chars().chain(target.chars()).collect();
        let mut frontier = vec![src.chars().collect::<Vec<char>>()];
        let target: Vec<char> = target.chars().collect();
        let mut seen = std::collections::HashSet::new();
        for depth in 0..=max_ops {
            if frontier.contains(&target) {
                return Some(depth);
            }
            let mut next = Vec::new();
            for s in &frontier {
                let mut push = |c: Vec<char>| {
                    if seen.insert(c.clone()) {
                        next.push(c);
                    }
                };
                for i in 0..s.len() {
                    let mut d = s.clone();
                    d.remove(i);
                    push(d);
                    for &c in &alphabet {
                        let mut r = s.clone();
                        r[i] = c;
                        push(r);
                    }
                }
                for i in 0..=s.len() {
                    for &c in &alphabet {
                        let mut ins = s.clone();
                        ins.insert(i, c);
                        push(ins);
                    }
                }
            }
            frontier = next;
        }
        None
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("sitting", "kitten"), 3);
    }

    #[test]
    fn kitten_sitting_matches_enumeration() {
        assert_eq!(brute_force_edit_distance("kitten", "sitting", 4), Some(3));
    }

    #[test]
    fn levenshtein_counts_scalar_values_not_bytes() {
        assert_eq!(levenshtein("Zoë", "Zoe"), 1);
        assert_eq!(levenshtein("日本", "日"), 1);
    }

    #[test]
    fn minkowski_examples() {
        let x = [1.5, -2.0, 3.0];
        assert_eq!(minkowski(&x, &x, 2.0).unwrap(), 0.0);
        assert_eq!(minkowski(&[0.0, 0.0], &[3.0, 4.0], 2.0).unwrap(), 5.0);
        assert_eq!(minkowski(&[1.0, 2.0], &[4.0, 6.0], 1.0).unwrap(), 7.0);
        let p3 = minkowski(&[0.0, 0.0], &[1.0, 2.0], 3.0).unwrap();
        assert!((p3 - 9f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn minkowski_errors() {
        assert!(matches!(
            minkowski(&[1.0], &[1.0, 2.0], 2.0),
            Err(Error::DimensionMismatch {
                expected: 1,
                actual: 2
            })
        ));
        assert!(matches!(
            minkowski(&[1.0], &[2.0], 0.5),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn jaro_reference_values() {
        // textbook pairs
        assert!((1.0 - jaro("MARTHA", "MARHTA") - 0.944_444_444_444_444_4).abs() < 1e-12);
        assert!((1.0 - jaro("DIXON", "DICKSONX") - 0.766_666_666_666_666_7).abs() < 1e-12);
        assert_eq!(jaro("abc", "abc"), 0.0);
        assert_eq!(jaro("", ""), 0.0);
        assert_eq!(jaro("abc", "xyz"), 1.0);
    }

    #[test]
    fn qgram_counts_profile_differences() {
        assert_eq!(qgram("abc", "abc", 2), 0.0);
        // {ab, bc} vs {ab, bd}
        assert_eq!(qgram("abc", "abd", 2), 2.0);
        assert_eq!(qgram("a", "", 2), 0.0);
    }

    #[test]
    fn pairwise_examples() {
        let one = ObjectSet::strings(["solo"]).unwrap();
        assert_eq!(
            pairwise_matrix(&one, Metric::Levenshtein)
                .unwrap()
                .values()
                .as_slice(),
            &[0.0]
        );

        let strs = ObjectSet::strings(["ab", "ab", "b"]).unwrap();
        let d = pairwise_matrix(&strs, Metric::Levenshtein).unwrap();
        assert!(d.is_symmetric());
        assert_eq!(
            d.values().as_slice(),
            &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0]
        );

        let vecs = ObjectSet::vectors(&[[1.0, 2.0], [1.0, 2.0]]).unwrap();
        let d = pairwise_matrix(&vecs, Metric::EUCLIDEAN).unwrap();
        assert_eq!(d.values().as_slice(), &[0.0; 4]);
    }

    #[test]
    fn metric_kind_mismatch() {
        let strs = ObjectSet::strings(["a"]).unwrap();
        let vecs = ObjectSet::vectors(&[[0.0]]).unwrap();
        assert!(matches!(
            pairwise_matrix(&strs, Metric::EUCLIDEAN),
            Err(Error::MetricKindMismatch { .. })
        ));
        assert!(matches!(
            pairwise_matrix(&vecs, Metric::Levenshtein),
            Err(Error::MetricKindMismatch { .. })
        ));
        assert!(matches!(
            cross_matrix(&strs, &vecs, Metric::Levenshtein),
            Err(Error::MetricKindMismatch { .. })
        ));
    }

    #[test]
    fn empty_object_set_rejected() {
        assert!(ObjectSet::strings(Vec::<String>::new()).is_err());
    }

    #[test]
    fn cross_examples() {
        let x = ObjectSet::strings(["x"]).unwrap();
        let d = cross_matrix(&x, &x, Metric::Levenshtein).unwrap();
        assert!(!d.is_symmetric());
        assert_eq!(d.values().as_slice(), &[0.0]);

        let rows = ObjectSet::strings(["a"]).unwrap();
        let cols = ObjectSet::strings(["ab", "abc"]).unwrap();
        let d = cross_matrix(&rows, &cols, Metric::Levenshtein).unwrap();
        assert_eq!(d.values().shape(), (1, 2));
        assert_eq!(d.values().as_slice(), &[1.0, 2.0]);

        let a = [[0.0, 1.0, 2.0], [3.0, -1.0, 0.5]];
        let b = [[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [-2.0, 4.0, 0.25]];
        let d = cross_matrix(
            &ObjectSet::vectors(&a).unwrap(),
            &ObjectSet::vectors(&b).unwrap(),
            Metric::EUCLIDEAN,
        )
        .unwrap();
        assert_eq!(d.values().shape(), (2, 3));
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                assert_eq!(d.get(i, j), minkowski(x, y, 2.0).unwrap());
            }
        }
    }

    #[test]
    fn symmetric_constructor_rejects_bad_matrices() {
        let asym = Matrix::from_rows(&[[0.0, 1.0], [2.0, 0.0]]).unwrap();
        assert!(DissimilarityMatrix::symmetric(asym).is_err());
        let diag = Matrix::from_rows(&[[1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(DissimilarityMatrix::symmetric(diag).is_err());
        let neg = Matrix::from_rows(&[[0.0, -1.0]]).unwrap();
        assert!(DissimilarityMatrix::cross(neg).is_err());
        let rect = Matrix::zeros(2, 3);
        assert!(DissimilarityMatrix::symmetric(rect).is_err());
    }

    #[test]
    fn metric_tags_round_trip_through_text() {
        for m in [
            Metric::Levenshtein,
            Metric::Jaro,
            Metric::QGram { q: 3 },
            Metric::Minkowski { p: 1.5 },
        ] {
            assert_eq!(m.to_string().parse::<Metric>().unwrap(), m);
        }
        assert_eq!("euclidean".parse::<Metric>().unwrap(), Metric::EUCLIDEAN);
        assert!("cosine".parse::<Metric>().is_err());
    }

    #[test]
    fn save_and_load_with_descriptor() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dist.csv");
        let strs = ObjectSet::strings(["anna", "hannah", "ann"]).unwrap();
        let d = pairwise_matrix(&strs, Metric::Levenshtein).unwrap();
        d.save(&path).unwrap();
        let text = std::fs::read_to_string(dir.path().join("dist.json")).unwrap();
        assert!(text.contains("\"metric\": \"levenshtein\""));
        assert_eq!(DissimilarityMatrix::load(&path).unwrap(), d);
    }
}
