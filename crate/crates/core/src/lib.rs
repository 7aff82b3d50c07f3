//! Landmark-based least-squares multidimensional scaling.
//!
//! A reference set is embedded by minimizing raw stress. New objects are then
//! placed into that fixed configuration using only their dissimilarities to a
//! small set of landmarks, either by minimizing a per-point stress or with a
//! trained feed-forward network.
//!
//! Pipeline stages: [`synth`] names, [`dissimilarity`] matrices, [`lsmds`]
//! reference embedding, [`landmarks`] selection, [`ose_optimize`] and
//! [`ose_neural`] out-of-sample placement, [`evaluation`] metrics, and
//! [`pipeline`] to chain them from a config file.

pub mod descent;
pub mod dissimilarity;
pub mod error;
pub mod evaluation;
pub mod landmarks;
pub mod lsmds;
pub mod matrix;
pub mod ose_neural;
pub mod ose_optimize;
pub mod pipeline;
pub mod synth;

pub use descent::{DescentOptions, InitKind};
pub use dissimilarity::{DissimilarityMatrix, Metric, ObjectSet};
pub use error::{Error, Result};
pub use evaluation::{OseMethod, OseReport, TimingStats};
pub use landmarks::{LandmarkMethod, LandmarkSet};
pub use lsmds::{Configuration, Embedding};
pub use matrix::Matrix;
pub use ose_neural::{MlpModel, TrainOptions, TrainingSet};
pub use ose_optimize::PointQuery;
