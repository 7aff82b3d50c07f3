//! Out-of-sample embedding with a fully connected feed-forward network.
//!
//! The network maps the `L` landmark dissimilarities of an object straight to
//! its `K` coordinates. Hidden layers use ReLU and the output layer is linear.
//! Training minimizes the mean per-sample Euclidean error between predicted
//! and reference coordinates with Adam.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const MODEL_FORMAT_VERSION: u64 = 1;

/// Default hidden widths for `l` inputs: a funnel `[min(l, 128), 64, 32]`.
pub fn default_hidden(l: usize) -> [usize; 3] {
    [l.min(128), 64, 32]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(inputs: &Matrix) -> Self {
        let mut min = vec![f64::INFINITY; inputs.cols()];
        let mut max = vec![f64::NEG_INFINITY; inputs.cols()];
        for row in inputs.row_iter() {
            for (j, v) in row.iter().enumerate() {
                min[j] = min[j].min(*v);
                max[j] = max[j].max(*v);
            }
        }
        MinMaxScaler { min, max }
    }

    /// Maps each feature to `[0, 1]` over the fitted range; constant features map to 0.
    fn transform_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            x.iter()
                .zip(self.min.iter().zip(&self.max))
                .map(|(v, (lo, hi))| {
                    let range = hi - lo;
                    if range > 0.0 {
                        (v - lo) / range
                    } else {
                        0.0
                    }
                }),
        );
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    /// `out x in`, row-major.
    pub weights: Matrix,
    pub biases: Vec<f64>,
}

impl DenseLayer {
    fn inputs(&self) -> usize {
        self.weights.cols()
    }

    fn outputs(&self) -> usize {
        self.weights.rows()
    }

    fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weights
                .row_iter()
                .zip(&self.biases)
                .map(|(w, b)| b + w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>()),
        );
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layers: Vec<DenseLayer>,
    scaler: Option<MinMaxScaler>,
}

#[inline]
fn relu(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Fan-in scaled uniform weights `U(-sqrt(6 / fan_in), sqrt(6 / fan_in))`, zero biases.
pub fn init_model(l: usize, k: usize, hidden: &[usize], seed: u64) -> Result<MlpModel> {
    let sizes: Vec<usize> = std::iter::once(l)
        .chain(hidden.iter().copied())
        .chain(std::iter::once(k))
        .collect();
    if let Some(pos) = sizes.iter().position(|s| *s == 0) {
        return Err(Error::InvalidParameter(format!(
            "layer {pos} has zero width"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = sizes
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / fan_in as f64).sqrt();
            let data = (0..fan_in * fan_out)
                .map(|_| rng.gen_range(-limit..limit))
                .collect();
            DenseLayer {
                weights: Matrix::from_vec(fan_out, fan_in, data).expect("sized by construction"),
                biases: vec![0.0; fan_out],
            }
        })
        .collect();
    Ok(MlpModel {
        layers,
        scaler: None,
    })
}

impl MlpModel {
    /// Builds a model from explicit layers; adjacent shapes must chain.
    pub fn from_layers(layers: Vec<DenseLayer>, scaler: Option<MinMaxScaler>) -> Result<Self> {
        let model = MlpModel { layers, scaler };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidParameter("model has no layers".into()));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.biases.len() != layer.outputs() {
                return Err(Error::shape(format!(
                    "layer {i}: {} biases for {} outputs",
                    layer.biases.len(),
                    layer.outputs()
                )));
            }
            if i > 0 && self.layers[i - 1].outputs() != layer.inputs() {
                return Err(Error::shape(format!(
                    "layer {i} expects {} inputs but layer {} emits {}",
                    layer.inputs(),
                    i - 1,
                    self.layers[i - 1].outputs()
                )));
            }
            if !layer.weights.is_finite() || layer.biases.iter().any(|b| !b.is_finite()) {
                return Err(Error::NumericalFailure(format!(
                    "layer {i} has non-finite parameters"
                )));
            }
        }
        if let Some(s) = &self.scaler {
            if s.min.len() != self.input_size() || s.max.len() != self.input_size() {
                return Err(Error::shape("scaler width differs from the input layer"));
            }
        }
        Ok(())
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn scaler(&self) -> Option<&MinMaxScaler> {
        self.scaler.as_ref()
    }

    pub fn set_scaler(&mut self, scaler: Option<MinMaxScaler>) {
        self.scaler = scaler;
    }

    /// `[L, h1, ..., K]`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.input_size())
            .chain(self.layers.iter().map(DenseLayer::outputs))
            .collect()
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_size(&self) -> usize {
        self.layers.last().expect("validated non-empty").outputs()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.biases.len())
            .sum()
    }

    fn input_into(&self, x: &[f64], out: &mut Vec<f64>) {
        match &self.scaler {
            Some(s) => s.transform_into(x, out),
            None => {
                out.clear();
                out.extend_from_slice(x);
            }
        }
    }

    /// Runs the network, keeping every layer's activation for backprop.
    /// `acts[0]` is the (scaled) input and `acts[i + 1]` the output of layer `i`.
    fn forward_trace(&self, x: &[f64], acts: &mut Vec<Vec<f64>>) {
        acts.resize_with(self.layers.len() + 1, Vec::new);
        self.input_into(x, &mut acts[0]);
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let (before, after) = acts.split_at_mut(i + 1);
            layer.apply(&before[i], &mut after[0]);
            if i < last {
                after[0].iter_mut().for_each(|v| *v = relu(*v));
            }
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = ModelFile {
            version: MODEL_FORMAT_VERSION,
            layer_sizes: self.layer_sizes(),
            activation: ActivationTags {
                hidden: "relu".into(),
                output: "identity".into(),
            },
            scaler: self.scaler.clone(),
            weights: self
                .layers
                .iter()
                .map(|l| l.weights.as_slice().to_vec())
                .collect(),
            biases: self.layers.iter().map(|l| l.biases.clone()).collect(),
        };
        let text = serde_json::to_string(&file).expect("model serializes");
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::corrupt(path, e))?;
        let version = value
            .get("version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::corrupt(path, "missing integer `version`"))?;
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::Version {
                found: version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        let file: ModelFile = serde_json::from_value(value).map_err(|e| Error::corrupt(path, e))?;
        if file.activation.hidden != "relu" || file.activation.output != "identity" {
            return Err(Error::corrupt(path, "unsupported activation tags"));
        }
        let sizes = &file.layer_sizes;
        if sizes.len() < 2
            || file.weights.len() != sizes.len() - 1
            || file.biases.len() != sizes.len() - 1
        {
            return Err(Error::corrupt(
                path,
                "layer count does not match layer_sizes",
            ));
        }
        let layers = sizes
            .windows(2)
            .zip(file.weights.into_iter().zip(file.biases))
            .map(|(w, (weights, biases))| {
                Ok(DenseLayer {
                    weights: Matrix::from_vec(w[1], w[0], weights)
                        .map_err(|e| Error::corrupt(path, e))?,
                    biases,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MlpModel::from_layers(layers, file.scaler).map_err(|e| Error::corrupt(path, e))
    }
}

#[derive(Serialize, Deserialize)]
struct ActivationTags {
    hidden: String,
    output: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: u64,
    layer_sizes: Vec<usize>,
    activation: ActivationTags,
    scaler: Option<MinMaxScaler>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

pub fn forward(model: &MlpModel, x: &[f64]) -> Result<Vec<f64>> {
    Error::check_dim(model.input_size(), x.len())?;
    let mut acts = Vec::new();
    model.forward_trace(x, &mut acts);
    Ok(acts.pop().expect("output layer"))
}

/// Coordinates of a new object from its `L` landmark dissimilarities.
pub fn predict_point(model: &MlpModel, deltas: &[f64]) -> Result<Vec<f64>> {
    forward(model, deltas)
}

pub fn predict_batch(model: &MlpModel, inputs: &Matrix) -> Result<Matrix> {
    if inputs.rows() > 0 {
        Error::check_dim(model.input_size(), inputs.cols())?;
    }
    let mut acts = Vec::new();
    let mut data = Vec::with_capacity(inputs.rows() * model.output_size());
    for row in inputs.row_iter() {
        model.forward_trace(row, &mut acts);
        data.extend_from_slice(acts.last().expect("output layer"));
    }
    Matrix::from_vec(inputs.rows(), model.output_size(), data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Mean over samples of the Euclidean norm of the coordinate error.
    #[default]
    MeanEuclidean,
    /// Mean absolute error over every sample and component.
    ComponentMae,
}

fn check_pair(pred: &Matrix, labels: &Matrix) -> Result<()> {
    if pred.shape() != labels.shape() {
        return Err(Error::shape(format!(
            "predictions are {}x{} but labels are {}x{}",
            pred.rows(),
            pred.cols(),
            labels.rows(),
            labels.cols()
        )));
    }
    if pred.rows() == 0 {
        return Err(Error::InvalidParameter(
            "loss needs at least one sample".into(),
        ));
    }
    Ok(())
}

fn row_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Mean over rows of `||pred_i - label_i||_2`.
pub fn mae_loss(pred: &Matrix, labels: &Matrix) -> Result<f64> {
    loss(LossKind::MeanEuclidean, pred, labels)
}

pub fn loss(kind: LossKind, pred: &Matrix, labels: &Matrix) -> Result<f64> {
    check_pair(pred, labels)?;
    let m = pred.rows() as f64;
    Ok(match kind {
        LossKind::MeanEuclidean => {
            pred.row_iter()
                .zip(labels.row_iter())
                .map(|(p, l)| row_norm(p, l))
                .sum::<f64>()
                / m
        }
        LossKind::ComponentMae => {
            pred.as_slice()
                .iter()
                .zip(labels.as_slice())
                .map(|(p, l)| (p - l).abs())
                .sum::<f64>()
                / (m * pred.cols() as f64)
        }
    })
}

/// Paired inputs (`M x L` landmark dissimilarities) and labels (`M x K` coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    inputs: Matrix,
    labels: Matrix,
}

impl TrainingSet {
    pub fn new(inputs: Matrix, labels: Matrix) -> Result<Self> {
        if inputs.rows() != labels.rows() {
            return Err(Error::shape(format!(
                "{} input rows but {} label rows",
                inputs.rows(),
                labels.rows()
            )));
        }
        if !inputs.is_finite() || !labels.is_finite() {
            return Err(Error::InvalidParameter(
                "training data must be finite".into(),
            ));
        }
        Ok(TrainingSet { inputs, labels })
    }

    pub fn inputs(&self) -> &Matrix {
        &self.inputs
    }

    pub fn labels(&self) -> &Matrix {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.rows() == 0
    }

    fn check_model(&self, model: &MlpModel) -> Result<()> {
        Error::check_dim(model.input_size(), self.inputs.cols())?;
        Error::check_dim(model.output_size(), self.labels.cols())
    }
}

/// Gradients with the same layout as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            weights: model
                .layers
                .iter()
                .map(|l| Matrix::zeros(l.outputs(), l.inputs()))
                .collect(),
            biases: model
                .layers
                .iter()
                .map(|l| vec![0.0; l.outputs()])
                .collect(),
        }
    }

    fn clear(&mut self) {
        self.weights
            .iter_mut()
            .for_each(|w| w.as_mut_slice().fill(0.0));
        self.biases.iter_mut().for_each(|b| b.fill(0.0));
    }

    /// Every gradient entry, layer by layer: weights then biases.
    pub fn flatten(&self) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.as_slice().iter().chain(b.iter()).copied())
            .collect()
    }
}

struct Workspace {
    acts: Vec<Vec<f64>>,
    delta: Vec<f64>,
    prev_delta: Vec<f64>,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            acts: Vec::new(),
            delta: Vec::new(),
            prev_delta: Vec::new(),
        }
    }
}

/// Accumulates the gradient of the mean loss over `rows` into `grads` and
/// returns the mean loss of those rows.
fn accumulate_gradient(
    model: &MlpModel,
    data: &TrainingSet,
    rows: &[usize],
    kind: LossKind,
    grads: &mut Gradients,
    ws: &mut Workspace,
) -> f64 {
    grads.clear();
    let batch = rows.len() as f64;
    let k = model.output_size();
    let mut total = 0.0;
    for &r in rows {
        model.forward_trace(data.inputs.row(r), &mut ws.acts);
        let out = ws.acts.last().expect("output layer");
        let label = data.labels.row(r);

        ws.delta.clear();
        match kind {
            LossKind::MeanEuclidean => {
                let norm = row_norm(out, label);
                total += norm;
                if norm > 0.0 {
                    ws.delta
                        .extend(out.iter().zip(label).map(|(p, l)| (p - l) / (norm * batch)));
                } else {
                    ws.delta.resize(k, 0.0);
                }
            }
            LossKind::ComponentMae => {
                let scale = 1.0 / (batch * k as f64);
                for (p, l) in out.iter().zip(label) {
                    total += (p - l).abs();
                    let d = p - l;
                    ws.delta.push(if d > 0.0 {
                        scale
                    } else if d < 0.0 {
                        -scale
                    } else {
                        0.0
                    });
                }
            }
        }

        for li in (0..model.layers.len()).rev() {
            let layer = &model.layers[li];
            let input = &ws.acts[li];
            let gw = &mut grads.weights[li];
            for (o, d) in ws.delta.iter().enumerate() {
                if *d == 0.0 {
                    continue;
                }
                grads.biases[li][o] += d;
                for (g, a) in gw.row_mut(o).iter_mut().zip(input) {
                    *g += d * a;
                }
            }
            if li == 0 {
                break;
            }
            // back through the weights, then the ReLU of the layer below
            ws.prev_delta.clear();
            ws.prev_delta.resize(layer.inputs(), 0.0);
            for (o, d) in ws.delta.iter().enumerate() {
                if *d == 0.0 {
                    continue;
                }
                for (p, w) in ws.prev_delta.iter_mut().zip(layer.weights.row(o)) {
                    *p += d * w;
                }
            }
            for (p, a) in ws.prev_delta.iter_mut().zip(input) {
                if *a <= 0.0 {
                    *p = 0.0;
                }
            }
            std::mem::swap(&mut ws.delta, &mut ws.prev_delta);
        }
    }
    match kind {
        LossKind::MeanEuclidean => total / batch,
        LossKind::ComponentMae => total / (batch * k as f64),
    }
}

/// Exact gradient of the batch loss with respect to every weight and bias.
///
/// A row whose prediction equals its label contributes zero.
pub fn loss_gradient(
    model: &MlpModel,
    batch: &TrainingSet,
    kind: LossKind,
) -> Result<(f64, Gradients)> {
    if batch.is_empty() {
        return Err(Error::InvalidParameter(
            "gradient needs a non-empty batch".into(),
        ));
    }
    batch.check_model(model)?;
    let rows: Vec<usize> = (0..batch.len()).collect();
    let mut grads = Gradients::zeros_like(model);
    let loss = accumulate_gradient(model, batch, &rows, kind, &mut grads, &mut Workspace::new());
    Ok((loss, grads))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainOptions {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub seed: u64,
    pub shuffle: bool,
    pub loss: LossKind,
    /// Fit a per-feature min-max scaler on the training inputs and store it in the model.
    pub scale_inputs: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            epochs: 200,
            batch_size: 32,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            seed: 0,
            shuffle: true,
            loss: LossKind::MeanEuclidean,
            scale_inputs: false,
        }
    }
}

impl TrainOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.epochs == 0 {
            return bad("epochs must be >= 1".into());
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            ));
        }
        for (name, beta) in [
            ("adam_beta1", self.adam_beta1),
            ("adam_beta2", self.adam_beta2),
        ] {
            if !(beta > 0.0 && beta < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {beta}"));
            }
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return bad(format!(
                "adam_epsilon must be positive, got {}",
                self.adam_epsilon
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub model: MlpModel,
    /// Full-data loss before training, then after every epoch.
    pub loss_trace: Vec<f64>,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl Adam {
    fn update(&mut self, model: &mut MlpModel, grads: &Gradients, opts: &TrainOptions) {
        self.step += 1;
        let b1 = opts.adam_beta1;
        let b2 = opts.adam_beta2;
        let lr_m = opts.learning_rate / (1.0 - b1.powi(self.step));
        let v_corr = 1.0 - b2.powi(self.step);
        let mut offset = 0;
        for (layer, (gw, gb)) in model
            .layers
            .iter_mut()
            .zip(grads.weights.iter().zip(&grads.biases))
        {
            let params = layer
                .weights
                .as_mut_slice()
                .iter_mut()
                .zip(gw.as_slice())
                .chain(layer.biases.iter_mut().zip(gb));
            for (p, g) in params {
                let m = &mut self.m[offset];
                let v = &mut self.v[offset];
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                *p -= lr_m * *m / ((*v / v_corr).sqrt() + opts.adam_epsilon);
                offset += 1;
            }
        }
    }
}

fn full_loss(model: &MlpModel, data: &TrainingSet, kind: LossKind) -> Result<f64> {
    let pred = predict_batch(model, &data.inputs)?;
    loss(kind, &pred, &data.labels)
}

/// Mini-batch Adam with bias-corrected moments. The batch order is drawn
/// from `opts.seed`, so the result is a pure function of its inputs.
pub fn train(mut model: MlpModel, data: &TrainingSet, opts: &TrainOptions) -> Result<TrainResult> {
    opts.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidParameter("training set is empty".into()));
    }
    data.check_model(&model)?;
    if opts.scale_inputs && model.scaler.is_none() {
        model.scaler = Some(MinMaxScaler::fit(&data.inputs));
    }

    let initial = full_loss(&model, data, opts.loss)?;
    if !initial.is_finite() {
        return Err(Error::NumericalFailure("initial loss is not finite".into()));
    }
    let mut loss_trace = vec![initial];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut grads = Gradients::zeros_like(&model);
    let mut ws = Workspace::new();
    let n_params = model.parameter_count();
    let mut adam = Adam {
        m: vec![0.0; n_params],
        v: vec![0.0; n_params],
        step: 0,
    };

    for epoch in 1..=opts.epochs {
        if opts.shuffle {
            order.shuffle(&mut rng);
        }
        for batch in order.chunks(opts.batch_size) {
            accumulate_gradient(&model, data, batch, opts.loss, &mut grads, &mut ws);
            adam.update(&mut model, &grads, opts);
        }
        let epoch_loss = full_loss(&model, data, opts.loss)?;
        if !epoch_loss.is_finite() {
            return Err(Error::NumericalFailure(format!(
                "training loss became {epoch_loss} at epoch {epoch}"
            )));
        }
        loss_trace.push(epoch_loss);
    }
    Ok(TrainResult { model, loss_trace })
}
