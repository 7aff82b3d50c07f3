use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use lsmds::landmarks::LandmarkMethod;
use lsmds::pipeline::{self, MethodSet, PipelineConfig};
use lsmds::{Error, Metric, OseReport};

#[derive(Parser)]
#[command(
    name = "lsmds",
    version,
    about = "Landmark LSMDS with out-of-sample embedding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic names and split them into reference and holdout sets.
    Generate(Common),
    /// Compute the reference dissimilarity matrix.
    Distmatrix(Common),
    /// Embed the reference set.
    Embed(Common),
    /// Select landmarks from the reference set.
    Landmarks(Common),
    /// Map the holdout set into the reference configuration.
    Ose(Common),
    /// Sweep the landmark grid with every configured method.
    Benchmark(Common),
    /// Re-score previously written out-of-sample coordinates.
    Evaluate(Common),
    /// Print the effective configuration as JSON.
    Config(Common),
}

#[derive(Args)]
struct Common {
    /// Pipeline config (JSON). Omitted fields take the desk-scale defaults.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    import_names: Option<PathBuf>,
    #[arg(long)]
    n_names: Option<usize>,
    #[arg(long)]
    n_reference: Option<usize>,
    #[arg(long)]
    n_holdout: Option<usize>,
    #[arg(long)]
    metric: Option<Metric>,
    #[arg(long, short)]
    k: Option<usize>,
    /// fps or random.
    #[arg(long)]
    landmark_method: Option<LandmarkMethod>,
    #[arg(long, short = 'l')]
    landmarks: Option<usize>,
    /// Comma-separated landmark counts for `benchmark`.
    #[arg(long, value_delimiter = ',')]
    l_grid: Option<Vec<usize>>,
    /// optimize, neural or both.
    #[arg(long, short)]
    method: Option<MethodSet>,
    #[arg(long)]
    seed_data: Option<u64>,
    #[arg(long)]
    seed_split: Option<u64>,
    #[arg(long)]
    seed_lsmds: Option<u64>,
    #[arg(long)]
    seed_landmarks: Option<u64>,
    #[arg(long)]
    seed_nn: Option<u64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Load a saved model instead of training.
    #[arg(long)]
    reuse_model: bool,
}

impl Common {
    fn resolve(self) -> anyhow::Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        cfg.apply_env();
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag { cfg.$($field).+ = v; })*
            };
        }
        set! {
            output_dir => output_dir,
            n_reference => n_reference,
            n_holdout => n_holdout,
            metric => metric,
            k => k,
            landmark_method => landmark_method,
            landmarks => landmark_count,
            l_grid => l_grid,
            method => method,
            seed_data => seeds.data,
            seed_split => seeds.split,
            seed_lsmds => seeds.lsmds,
            seed_landmarks => seeds.landmarks,
            seed_nn => seeds.nn,
            max_iters => descent.max_iters,
            epochs => train.epochs,
            repeats => timing_repeats,
        }
        if self.import_names.is_some() {
            cfg.import_names = self.import_names;
        }
        if self.n_names.is_some() {
            cfg.n_names = self.n_names;
        }
        cfg.reuse_model |= self.reuse_model;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_report(r: &OseReport) {
    let mean_perr = r.per_point_errors.iter().sum::<f64>() / r.m as f64;
    println!(
        "{}: L={} total_error={:.4} mean_perr={:.4} mean_rt={:.3e}s{}",
        r.method,
        r.l,
        r.total_error,
        mean_perr,
        r.timings.mean,
        r.train_seconds
            .map(|s| format!(" train={s:.2}s"))
            .unwrap_or_default()
    );
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Generate(c) => {
            let cfg = c.resolve()?;
            let s = pipeline::generate(&cfg)?;
            println!(
                "wrote {} names to {} ({} reference, {} holdout)",
                s.count,
                s.names.display(),
                s.reference,
                s.holdout
            );
        }
        Command::Distmatrix(c) => {
            let cfg = c.resolve()?;
            let d = pipeline::distmatrix(&cfg)?;
            println!(
                "wrote {}x{} matrix to {}",
                d.rows(),
                d.cols(),
                cfg.path(&cfg.paths.distance_matrix).display()
            );
        }
        Command::Embed(c) => {
            let cfg = c.resolve()?;
            let e = pipeline::embed(&cfg)?;
            println!(
                "embedded {} points at K={} in {} iterations, normalized stress {:.6}",
                e.config.len(),
                e.config.dimension(),
                e.iterations,
                e.final_stress()
            );
        }
        Command::Landmarks(c) => {
            let cfg = c.resolve()?;
            let set = pipeline::landmarks(&cfg)?;
            println!(
                "selected {} landmarks ({:?}) into {}",
                set.len(),
                set.method,
                cfg.path(&cfg.paths.landmarks).display()
            );
        }
        Command::Ose(c) => {
            let cfg = c.resolve()?;
            for r in pipeline::ose(&cfg)? {
                print_report(&r);
            }
        }
        Command::Benchmark(c) => {
            let cfg = c.resolve()?;
            let rows = pipeline::benchmark(&cfg)?;
            let mut failed = 0;
            for row in &rows {
                match &row.outcome {
                    Ok(r) => print_report(r),
                    Err(msg) => {
                        failed += 1;
                        eprintln!("{}: L={} failed: {msg}", row.method, row.l);
                    }
                }
            }
            println!("wrote {}", cfg.path(&cfg.paths.benchmark).display());
            if failed > 0 {
                anyhow::bail!("{failed} of {} benchmark cells failed", rows.len());
            }
        }
        Command::Evaluate(c) => {
            let cfg = c.resolve()?;
            for r in pipeline::evaluate(&cfg)? {
                print_report(&r);
            }
        }
        Command::Config(c) => {
            let cfg = c.resolve()?;
            let text = serde_json::to_string_pretty(&cfg).context("serializing config")?;
            println!("{text}");
        }
    }
    Ok(())
}

/// 2 invalid input or config, 3 missing or unreadable artifact, 4 corrupt
/// artifact, 5 numerical failure, 6 partial benchmark failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    let Some(e) = err.downcast_ref::<Error>() else {
        return 6;
    };
    match e {
        Error::DimensionMismatch { .. }
        | Error::ShapeMismatch(_)
        | Error::InvalidParameter(_)
        | Error::MetricKindMismatch { .. }
        | Error::TooMany { .. }
        | Error::PoolTooSmall { .. } => 2,
        Error::MissingArtifact(_) | Error::Io { .. } => 3,
        Error::CorruptFile { .. } | Error::Version { .. } => 4,
        Error::Degenerate(_) | Error::NumericalFailure(_) | Error::PointFailure { .. } => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
