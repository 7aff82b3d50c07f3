//! Config-driven pipeline: names -> distances -> reference embedding ->
//! landmarks -> out-of-sample embedding -> evaluation, plus the landmark-count
//! benchmark sweep.
//!
//! Every stage reads its inputs from and writes its outputs to the artifact
//! directory, so stages can be rerun independently. All randomness comes from
//! the `seeds` block.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::descent::DescentOptions;
use crate::dissimilarity::{cross_matrix, pairwise_matrix, DissimilarityMatrix, Metric, ObjectSet};
use crate::error::{Error, Result};
use crate::evaluation::{time_op, OseMethod, OseReport, TimingStats};
use crate::landmarks::{farthest_point_sampling, random_landmarks, LandmarkMethod, LandmarkSet};
use crate::lsmds::{self, Configuration, Embedding};
use crate::matrix::{format_f64, Matrix};
use crate::ose_neural::{self, default_hidden, MlpModel, TrainOptions, TrainingSet};
use crate::ose_optimize::{self, PointQuery};
use crate::synth::{self, NamePool};

/// Overrides [`PipelineConfig::output_dir`] when set.
pub const OUTPUT_DIR_ENV: &str = "LSMDS_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MethodSet {
    Optimize,
    Neural,
    #[default]
    Both,
}

impl MethodSet {
    pub fn methods(self) -> Vec<OseMethod> {
        match self {
            MethodSet::Optimize => vec![OseMethod::Optimize],
            MethodSet::Neural => vec![OseMethod::Neural],
            MethodSet::Both => vec![OseMethod::Optimize, OseMethod::Neural],
        }
    }
}

impl std::str::FromStr for MethodSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimize" => Ok(MethodSet::Optimize),
            "neural" => Ok(MethodSet::Neural),
            "both" => Ok(MethodSet::Both),
            _ => Err(Error::InvalidParameter(format!("unknown method set {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub data: u64,
    pub split: u64,
    pub lsmds: u64,
    pub landmarks: u64,
    pub nn: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds {
            data: 1,
            split: 2,
            lsmds: 3,
            landmarks: 4,
            nn: 5,
        }
    }
}

/// File names of every artifact, relative to the output directory unless absolute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArtifactPaths {
    pub names: PathBuf,
    pub reference_names: PathBuf,
    pub holdout_names: PathBuf,
    pub distance_matrix: PathBuf,
    pub configuration: PathBuf,
    pub stress_trace: PathBuf,
    pub landmarks: PathBuf,
    /// Method-specific files get `_optimize` / `_neural` before the extension.
    pub model: PathBuf,
    pub coordinates: PathBuf,
    pub report: PathBuf,
    pub point_errors: PathBuf,
    pub benchmark: PathBuf,
    pub benchmark_points: PathBuf,
}

impl Default for ArtifactPaths {
    fn default() -> Self {
        ArtifactPaths {
            names: "names.txt".into(),
            reference_names: "reference_names.txt".into(),
            holdout_names: "holdout_names.txt".into(),
            distance_matrix: "reference_dist.csv".into(),
            configuration: "configuration.csv".into(),
            stress_trace: "stress_trace.csv".into(),
            landmarks: "landmarks.json".into(),
            model: "model.json".into(),
            coordinates: "ose.csv".into(),
            report: "report.json".into(),
            point_errors: "point_errors.csv".into(),
            benchmark: "benchmark.csv".into(),
            benchmark_points: "benchmark_points.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    pub paths: ArtifactPaths,
    /// Read names from this file instead of generating them.
    pub import_names: Option<PathBuf>,
    /// Names to generate; defaults to `n_reference + n_holdout`.
    pub n_names: Option<usize>,
    pub n_reference: usize,
    pub n_holdout: usize,
    pub metric: Metric,
    pub k: usize,
    pub landmark_method: LandmarkMethod,
    /// Landmark count used by the `landmarks` and `ose` stages.
    pub landmark_count: usize,
    /// Landmark counts swept by `benchmark`.
    pub l_grid: Vec<usize>,
    pub method: MethodSet,
    pub seeds: Seeds,
    /// Reference embedding options. `seed` is replaced by `seeds.lsmds`.
    pub descent: DescentOptions,
    /// Per-point optimizer options.
    pub ose_descent: DescentOptions,
    /// Network training options. `seed` is replaced by `seeds.nn`.
    pub train: TrainOptions,
    /// Hidden widths; defaults to `[min(L, 128), 64, 32]`.
    pub hidden: Option<Vec<usize>>,
    /// Load the saved model instead of training when it exists.
    pub reuse_model: bool,
    /// Timed repeats per point (after one untimed warm-up).
    pub timing_repeats: usize,
}

impl Default for PipelineConfig {
    /// The desk-scale profile.
    fn default() -> Self {
        PipelineConfig {
            output_dir: "lsmds-out".into(),
            paths: ArtifactPaths::default(),
            import_names: None,
            n_names: None,
            n_reference: 1000,
            n_holdout: 100,
            metric: Metric::Levenshtein,
            k: 7,
            landmark_method: LandmarkMethod::Fps,
            landmark_count: 100,
            l_grid: vec![25, 50, 100, 200, 400],
            method: MethodSet::Both,
            seeds: Seeds::default(),
            descent: DescentOptions::default(),
            ose_descent: DescentOptions::point_defaults(),
            train: TrainOptions::default(),
            hidden: None,
            reuse_model: false,
            timing_repeats: 3,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("config serializes");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    /// Applies the output-directory environment override, if present.
    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            self.output_dir = dir.into();
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.k == 0 {
            return bad("k must be >= 1".into());
        }
        if self.n_reference < 2 {
            return bad("n_reference must be >= 2".into());
        }
        if let Some(n) = self.n_names {
            if n < self.n_reference + self.n_holdout {
                return bad(format!(
                    "n_names = {n} cannot cover {} reference + {} holdout names",
                    self.n_reference, self.n_holdout
                ));
            }
        }
        for &l in self
            .l_grid
            .iter()
            .chain(std::iter::once(&self.landmark_count))
        {
            if l == 0 || l > self.n_reference {
                return Err(Error::TooMany {
                    requested: l,
                    available: self.n_reference,
                })
                .or_else(|e| {
                    if l == 0 {
                        bad("landmark counts must be >= 1".into())
                    } else {
                        Err(e)
                    }
                });
            }
        }
        if self.timing_repeats == 0 {
            return bad("timing_repeats must be >= 1".into());
        }
        if let Some(h) = &self.hidden {
            if h.is_empty() || h.contains(&0) {
                return bad("hidden widths must be non-empty and positive".into());
            }
        }
        self.descent.validate()?;
        self.ose_descent.validate()?;
        self.train.validate()
    }

    pub fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.output_dir.join(p)
        }
    }

    pub fn method_path(&self, p: &Path, method: OseMethod) -> PathBuf {
        self.path(&suffixed(p, &method.to_string()))
    }

    fn lsmds_options(&self) -> DescentOptions {
        DescentOptions {
            seed: self.seeds.lsmds,
            ..self.descent.clone()
        }
    }

    fn train_options(&self) -> TrainOptions {
        TrainOptions {
            seed: self.seeds.nn,
            ..self.train.clone()
        }
    }

    fn hidden_for(&self, l: usize) -> Vec<usize> {
        self.hidden
            .clone()
            .unwrap_or_else(|| default_hidden(l).to_vec())
    }

    fn ensure_output_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.output_dir).map_err(|e| Error::io(&self.output_dir, e))
    }
}

/// `dir/name.ext` -> `dir/name_<tag>.ext`.
pub fn suffixed(p: &Path, tag: &str) -> PathBuf {
    let stem = p
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match p.extension() {
        Some(ext) => format!("{stem}_{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{tag}"),
    };
    p.with_file_name(name)
}

fn require(path: PathBuf) -> Result<PathBuf> {
    if path.exists() {
        Ok(path)
    } else {
        Err(Error::MissingArtifact(path))
    }
}

#[derive(Debug, Clone)]
pub struct GenerateSummary {
    pub names: PathBuf,
    pub count: usize,
    pub reference: usize,
    pub holdout: usize,
}

/// Writes the names file and its reference/holdout split.
pub fn generate(cfg: &PipelineConfig) -> Result<GenerateSummary> {
    cfg.validate()?;
    cfg.ensure_output_dir()?;
    let names = match &cfg.import_names {
        Some(src) => synth::read_names(src)?,
        None => {
            let n = cfg.n_names.unwrap_or(cfg.n_reference + cfg.n_holdout);
            let given = NamePool::bundled_given();
            let surnames = NamePool::bundled_surnames();
            synth::generate_names(n, cfg.seeds.data, &given, &surnames)?.names
        }
    };
    let (reference, holdout) =
        synth::split_reference_holdout(&names, cfg.n_reference, cfg.n_holdout, cfg.seeds.split)?;
    let names_path = cfg.path(&cfg.paths.names);
    synth::write_names(&names_path, &names)?;
    synth::write_names(&cfg.path(&cfg.paths.reference_names), &reference)?;
    synth::write_names(&cfg.path(&cfg.paths.holdout_names), &holdout)?;
    Ok(GenerateSummary {
        names: names_path,
        count: names.len(),
        reference: reference.len(),
        holdout: holdout.len(),
    })
}

fn load_name_set(path: PathBuf) -> Result<Vec<String>> {
    synth::read_names(&require(path)?)
}

/// Pairwise dissimilarities of the reference names.
pub fn distmatrix(cfg: &PipelineConfig) -> Result<DissimilarityMatrix> {
    cfg.validate()?;
    let reference = load_name_set(cfg.path(&cfg.paths.reference_names))?;
    let delta = pairwise_matrix(&ObjectSet::strings(reference)?, cfg.metric)?;
    delta.save(&cfg.path(&cfg.paths.distance_matrix))?;
    Ok(delta)
}

fn load_or_build_matrix(cfg: &PipelineConfig) -> Result<DissimilarityMatrix> {
    let path = cfg.path(&cfg.paths.distance_matrix);
    if path.exists() {
        DissimilarityMatrix::load(&path)
    } else {
        distmatrix(cfg)
    }
}

/// Embeds the reference set at `k` and writes the configuration and stress trace.
pub fn embed(cfg: &PipelineConfig) -> Result<Embedding> {
    cfg.validate()?;
    let delta = load_or_build_matrix(cfg)?;
    let emb = lsmds::embed(&delta, cfg.k, &cfg.lsmds_options())?;
    emb.config.write_csv(&cfg.path(&cfg.paths.configuration))?;
    emb.write_trace_csv(&cfg.path(&cfg.paths.stress_trace))?;
    Ok(emb)
}

/// Runs whichever of generate / distmatrix / embed has no output yet.
pub fn ensure_reference(cfg: &PipelineConfig) -> Result<()> {
    if !cfg.path(&cfg.paths.reference_names).exists()
        || !cfg.path(&cfg.paths.holdout_names).exists()
    {
        generate(cfg)?;
    }
    if !cfg.path(&cfg.paths.configuration).exists() {
        embed(cfg)?;
    }
    Ok(())
}

fn choose_landmarks(
    cfg: &PipelineConfig,
    delta: &DissimilarityMatrix,
    count: usize,
) -> Result<LandmarkSet> {
    match cfg.landmark_method {
        LandmarkMethod::Fps => farthest_point_sampling(delta, count, cfg.seeds.landmarks),
        LandmarkMethod::Random => random_landmarks(delta.rows(), count, cfg.seeds.landmarks),
    }
}

/// Selects `landmark_count` landmarks and writes them as JSON.
pub fn landmarks(cfg: &PipelineConfig) -> Result<LandmarkSet> {
    cfg.validate()?;
    let delta = load_or_build_matrix(cfg)?;
    let set = choose_landmarks(cfg, &delta, cfg.landmark_count)?;
    set.save(&cfg.path(&cfg.paths.landmarks))?;
    Ok(set)
}

/// Everything the out-of-sample stages need, loaded once.
pub struct OseContext {
    pub reference_names: Vec<String>,
    pub holdout_names: Vec<String>,
    pub delta: DissimilarityMatrix,
    pub config: Configuration,
    /// Reference x holdout dissimilarities (`N x M`) for scoring.
    pub eval_cross: DissimilarityMatrix,
}

impl OseContext {
    pub fn load(cfg: &PipelineConfig) -> Result<Self> {
        let reference_names = load_name_set(cfg.path(&cfg.paths.reference_names))?;
        let holdout_names = load_name_set(cfg.path(&cfg.paths.holdout_names))?;
        let delta = load_or_build_matrix(cfg)?;
        let config = Configuration::read_csv(&require(cfg.path(&cfg.paths.configuration))?)?;
        if config.len() != reference_names.len() || delta.rows() != reference_names.len() {
            return Err(Error::shape(format!(
                "{} reference names, {} configuration rows, {} matrix rows",
                reference_names.len(),
                config.len(),
                delta.rows()
            )));
        }
        if config.dimension() != cfg.k {
            return Err(Error::shape(format!(
                "configuration has dimension {} but k = {}",
                config.dimension(),
                cfg.k
            )));
        }
        if holdout_names.is_empty() {
            return Err(Error::InvalidParameter("holdout set is empty".into()));
        }
        let eval_cross = cross_matrix(
            &ObjectSet::strings(reference_names.iter().cloned())?,
            &ObjectSet::strings(holdout_names.iter().cloned())?,
            cfg.metric,
        )?;
        Ok(OseContext {
            reference_names,
            holdout_names,
            delta,
            config,
            eval_cross,
        })
    }

    /// Holdout x landmark dissimilarities (`M x L`): the only distances the
    /// out-of-sample methods see.
    pub fn query_deltas(&self, set: &LandmarkSet) -> Matrix {
        // the evaluation matrix already holds every reference-holdout pair
        self.eval_cross
            .values()
            .select_rows(&set.indices)
            .transpose()
    }
}

/// Result of one method at one landmark set, before scoring.
pub struct OseRun {
    pub coords: Matrix,
    pub timings: TimingStats,
    pub train_seconds: Option<f64>,
    pub model: Option<MlpModel>,
}

pub fn run_optimize(cfg: &PipelineConfig, ctx: &OseContext, set: &LandmarkSet) -> Result<OseRun> {
    let landmark_coords = ctx.config.coords().select_rows(&set.indices);
    let queries = ctx.query_deltas(set);
    let mut data = Vec::with_capacity(queries.rows() * cfg.k);
    let mut samples = Vec::with_capacity(queries.rows());
    for i in 0..queries.rows() {
        let q = PointQuery::new(queries.row(i), &landmark_coords)?;
        let (res, stats) = time_op(cfg.timing_repeats, || {
            ose_optimize::embed_point(&q, &cfg.ose_descent)
        });
        let p = res.map_err(|e| Error::PointFailure {
            index: i,
            source: Box::new(e),
        })?;
        data.extend_from_slice(&p.coords);
        samples.push(stats.mean);
    }
    Ok(OseRun {
        coords: Matrix::from_vec(queries.rows(), cfg.k, data)?,
        timings: TimingStats::from_samples(samples),
        train_seconds: None,
        model: None,
    })
}

/// Training data: reference-to-landmark dissimilarities against reference coordinates.
pub fn training_set(ctx: &OseContext, set: &LandmarkSet) -> Result<TrainingSet> {
    TrainingSet::new(
        ctx.delta.values().select_cols(&set.indices),
        ctx.config.coords().clone(),
    )
}

pub fn train_model(
    cfg: &PipelineConfig,
    ctx: &OseContext,
    set: &LandmarkSet,
) -> Result<(MlpModel, f64)> {
    let data = training_set(ctx, set)?;
    let opts = cfg.train_options();
    let model = ose_neural::init_model(set.len(), cfg.k, &cfg.hidden_for(set.len()), opts.seed)?;
    let (res, stats) = time_op(1, || ose_neural::train(model.clone(), &data, &opts));
    Ok((res?.model, stats.mean))
}

pub fn run_neural(
    cfg: &PipelineConfig,
    ctx: &OseContext,
    set: &LandmarkSet,
    model: Option<MlpModel>,
) -> Result<OseRun> {
    let (model, train_seconds) = match model {
        Some(m) => (m, None),
        None => {
            let (m, secs) = train_model(cfg, ctx, set)?;
            (m, Some(secs))
        }
    };
    Error::check_dim(set.len(), model.input_size())?;
    Error::check_dim(cfg.k, model.output_size())?;
    let queries = ctx.query_deltas(set);
    let mut data = Vec::with_capacity(queries.rows() * cfg.k);
    let mut samples = Vec::with_capacity(queries.rows());
    for row in queries.row_iter() {
        let (pred, stats) = time_op(cfg.timing_repeats, || {
            ose_neural::predict_point(&model, row)
        });
        data.extend_from_slice(&pred?);
        samples.push(stats.mean);
    }
    Ok(OseRun {
        coords: Matrix::from_vec(queries.rows(), cfg.k, data)?,
        timings: TimingStats::from_samples(samples),
        train_seconds,
        model: Some(model),
    })
}

fn score(
    method: OseMethod,
    ctx: &OseContext,
    set: &LandmarkSet,
    run: &OseRun,
) -> Result<OseReport> {
    OseReport::evaluate(
        method,
        &ctx.config,
        set.len(),
        (0..ctx.holdout_names.len()).collect(),
        &run.coords,
        &ctx.eval_cross,
        run.timings.clone(),
        run.train_seconds,
    )
}

/// Selects landmarks, maps the holdout names with each configured method,
/// and writes coordinates, reports and point errors.
pub fn ose(cfg: &PipelineConfig) -> Result<Vec<OseReport>> {
    cfg.validate()?;
    ensure_reference(cfg)?;
    let ctx = OseContext::load(cfg)?;
    let set = choose_landmarks(cfg, &ctx.delta, cfg.landmark_count)?;
    set.save(&cfg.path(&cfg.paths.landmarks))?;

    let mut reports = Vec::new();
    for method in cfg.method.methods() {
        let run = match method {
            OseMethod::Optimize => run_optimize(cfg, &ctx, &set)?,
            OseMethod::Neural => {
                let model_path = cfg.method_path(&cfg.paths.model, method);
                let saved = if cfg.reuse_model && model_path.exists() {
                    Some(MlpModel::load(&model_path)?)
                } else {
                    None
                };
                let run = run_neural(cfg, &ctx, &set, saved)?;
                if run.train_seconds.is_some() {
                    run.model
                        .as_ref()
                        .expect("neural run keeps its model")
                        .save(&model_path)?;
                }
                run
            }
        };
        let ids: Vec<usize> = (0..ctx.holdout_names.len()).collect();
        ose_optimize::write_points_csv(
            &cfg.method_path(&cfg.paths.coordinates, method),
            &ids,
            &run.coords,
        )?;
        let report = score(method, &ctx, &set, &run)?;
        report.save_json(&cfg.method_path(&cfg.paths.report, method))?;
        report.write_point_csv(&cfg.method_path(&cfg.paths.point_errors, method))?;
        reports.push(report);
    }
    Ok(reports)
}

/// Re-scores previously written out-of-sample coordinates. Timing fields are zero.
pub fn evaluate(cfg: &PipelineConfig) -> Result<Vec<OseReport>> {
    cfg.validate()?;
    let ctx = OseContext::load(cfg)?;
    let mut reports = Vec::new();
    for method in cfg.method.methods() {
        let coords_path = require(cfg.method_path(&cfg.paths.coordinates, method))?;
        let (ids, coords) = ose_optimize::read_points_csv(&coords_path)?;
        if ids != (0..ctx.holdout_names.len()).collect::<Vec<_>>() {
            return Err(Error::corrupt(
                &coords_path,
                "ids do not match the holdout set",
            ));
        }
        let l = LandmarkSet::load(&cfg.path(&cfg.paths.landmarks)).map_or(0, |s| s.len());
        let report = OseReport::evaluate(
            method,
            &ctx.config,
            l,
            ids,
            &coords,
            &ctx.eval_cross,
            TimingStats::from_samples(vec![0.0; coords.rows()]),
            None,
        )?;
        report.save_json(&cfg.method_path(&cfg.paths.report, method))?;
        report.write_point_csv(&cfg.method_path(&cfg.paths.point_errors, method))?;
        reports.push(report);
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub method: OseMethod,
    pub l: usize,
    pub landmarks_file: PathBuf,
    pub outcome: std::result::Result<OseReport, String>,
}

impl BenchmarkRow {
    pub fn report(&self) -> Option<&OseReport> {
        self.outcome.as_ref().ok()
    }
}

pub const BENCHMARK_HEADER: &str =
    "method,L,total_error,mean_rt_seconds,min_rt_seconds,max_rt_seconds,train_seconds,skipped_terms,landmarks_file,status";

pub const BENCHMARK_POINTS_HEADER: &str = "method,L,point_id,perr,perr_norm,seconds";

/// Columns holding wall-clock measurements, by header name.
pub const TIMING_COLUMNS: [&str; 5] = [
    "mean_rt_seconds",
    "min_rt_seconds",
    "max_rt_seconds",
    "train_seconds",
    "seconds",
];

/// Sweeps `l_grid`. For each `L` one landmark set is chosen and shared by all
/// methods. A failing (method, L) cell yields a flagged row and the sweep continues.
pub fn benchmark(cfg: &PipelineConfig) -> Result<Vec<BenchmarkRow>> {
    cfg.validate()?;
    ensure_reference(cfg)?;
    let ctx = OseContext::load(cfg)?;
    let mut rows = Vec::new();
    for &l in &cfg.l_grid {
        let set = choose_landmarks(cfg, &ctx.delta, l)?;
        let landmarks_file = suffixed(&cfg.paths.landmarks, &format!("L{l}"));
        set.save(&cfg.path(&landmarks_file))?;
        for method in cfg.method.methods() {
            let outcome = match method {
                OseMethod::Optimize => run_optimize(cfg, &ctx, &set),
                OseMethod::Neural => run_neural(cfg, &ctx, &set, None),
            }
            .and_then(|run| score(method, &ctx, &set, &run))
            .map_err(|e| e.to_string());
            rows.push(BenchmarkRow {
                method,
                l,
                landmarks_file: landmarks_file.clone(),
                outcome,
            });
        }
    }
    write_benchmark(cfg, &rows)?;
    Ok(rows)
}

fn write_benchmark(cfg: &PipelineConfig, rows: &[BenchmarkRow]) -> Result<()> {
    let path = cfg.path(&cfg.paths.benchmark);
    let points_path = cfg.path(&cfg.paths.benchmark_points);
    let mut out = BufWriter::new(File::create(&path).map_err(|e| Error::io(&path, e))?);
    let mut points =
        BufWriter::new(File::create(&points_path).map_err(|e| Error::io(&points_path, e))?);
    let io = |e| Error::io(&path, e);
    let pio = |e| Error::io(&points_path, e);
    writeln!(out, "{BENCHMARK_HEADER}").map_err(io)?;
    writeln!(points, "{BENCHMARK_POINTS_HEADER}").map_err(pio)?;
    for row in rows {
        let file = row.landmarks_file.display();
        match &row.outcome {
            Ok(r) => {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{file},ok",
                    row.method,
                    row.l,
                    format_f64(r.total_error),
                    format_f64(r.timings.mean),
                    format_f64(r.timings.min),
                    format_f64(r.timings.max),
                    r.train_seconds.map(format_f64).unwrap_or_default(),
                    r.skipped_terms
                )
                .map_err(io)?;
                for j in 0..r.m {
                    writeln!(
                        points,
                        "{},{},{},{},{},{}",
                        row.method,
                        row.l,
                        r.point_ids[j],
                        format_f64(r.per_point_errors[j]),
                        format_f64(r.normalized_per_point_errors[j]),
                        format_f64(r.timings.samples[j])
                    )
                    .map_err(pio)?;
                }
            }
            Err(msg) => {
                let msg = msg.replace([',', '\n'], ";");
                writeln!(out, "{},{},,,,,,,{file},failed: {msg}", row.method, row.l).map_err(io)?;
            }
        }
    }
    out.flush().map_err(io)?;
    points.flush().map_err(pio)
}
