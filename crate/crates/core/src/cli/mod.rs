//! Command-line interface: `generate`, `partition` and `loss-surface`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

pub mod io;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::{best_boundary, partition, LossSurface, RdpConfig};
use crate::error::{Error, Result};
use crate::geometry::GridSpec;
use crate::sample::SampleSet;
use crate::synth::{self, NoiseSpec};

pub use report::RunReport;

#[derive(Debug, Parser)]
#[command(
    name = "rdp",
    version,
    about = "Recursive domain partitioning of 1D and 2D datasets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
    /// Partition a dataset and write a JSON report.
    Partition(PartitionArgs),
    /// Write the two-model loss of every candidate boundary as CSV.
    LossSurface(LossSurfaceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum System {
    TwoDomain,
    ThreeDomain,
    Quad2d,
    Vector2d,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 11)]
    pub nx: usize,
    #[arg(long, default_value_t = 11)]
    pub ny: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub y_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub y_max: f64,
}

impl GridArgs {
    fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(
            self.x_min, self.x_max, self.y_min, self.y_max, self.nx, self.ny,
        )
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub system: System,
    /// Target signal-to-noise ratio in dB; clean data when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub snr: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample spacing of the 1D systems.
    #[arg(long, default_value_t = synth::DEFAULT_STEP)]
    pub step: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Input dimension; defaults to 1 for two-column files and 2 otherwise.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Highest degree (1D family `0..=K`, default 2) or x degree of the 2D basis (default 3).
    #[arg(long)]
    pub max_degree: Option<u32>,
    /// y degree of the 2D basis; defaults to `--max-degree`.
    #[arg(long)]
    pub max_degree_y: Option<u32>,
    /// Affine penalty slope for the 1D family, `p(K) = 1 - alpha (K_max - K)`.
    #[arg(long, default_value_t = 0.15)]
    pub penalty_alpha: f64,
    #[arg(long, default_value_t = crate::engine::DEFAULT_Q)]
    pub q: f64,
    /// Smallest admissible subdomain; defaults to the largest basis size plus one.
    #[arg(long)]
    pub min_points: Option<usize>,
    #[arg(long, default_value_t = crate::engine::DEFAULT_MAX_DEPTH)]
    pub max_depth: usize,
    /// Score candidates on a single thread.
    #[arg(long)]
    pub sequential: bool,
}

impl ModelArgs {
    fn load(&self) -> Result<SampleSet> {
        if let Some(d) = self.dim {
            if !(1..=2).contains(&d) {
                return Err(Error::Usage(format!("--dim must be 1 or 2, got {d}")));
            }
        }
        io::read_samples(&self.input, self.dim)
    }

    fn config(&self, data: &SampleSet) -> Result<RdpConfig> {
        let mut cfg = match data.dim() {
            1 => {
                if self.max_degree_y.is_some() {
                    return Err(Error::Usage(
                        "--max-degree-y applies to 2D data only".into(),
                    ));
                }
                RdpConfig::polynomial_1d(self.max_degree.unwrap_or(2), self.penalty_alpha)?
            }
            _ => {
                let kx = self.max_degree.unwrap_or(3);
                RdpConfig::power_series_2d(kx, self.max_degree_y.unwrap_or(kx))
                    .with_grid(GridSpec::infer(data)?)
            }
        };
        cfg = cfg
            .with_q(self.q)
            .with_max_depth(self.max_depth)
            .with_parallel(!self.sequential);
        if let Some(m) = self.min_points {
            cfg = cfg.with_min_points(m);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct LossSurfaceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Perimeter table for 2D input; defaults to `<out stem>.perimeter.csv`.
    #[arg(long)]
    pub perimeter_out: Option<PathBuf>,
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<SampleSet> {
    let clean = match args.system {
        System::TwoDomain => synth::gen_two_domain(args.step),
        System::ThreeDomain => synth::gen_three_domain(args.step),
        System::Quad2d => synth::gen_quad_2d(&args.grid.grid()?),
        System::Vector2d => synth::gen_vector_2d(&args.grid.grid()?),
    }
    .map_err(|e| match e {
        Error::Config(m) => Error::Usage(m),
        e => e,
    })?;
    let data = match args.snr {
        Some(snr_db) => synth::add_noise(&clean, NoiseSpec::new(snr_db, args.seed)?)?,
        None => clean,
    };
    io::write_samples(&args.out, &data)?;
    Ok(data)
}

pub fn cmd_partition(args: &PartitionArgs) -> Result<RunReport> {
    let data = args.model.load()?;
    let cfg = args.model.config(&data)?;
    let start = Instant::now();
    let tree = partition(&data, &cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    let echo = report::ConfigEcho::new(
        &cfg,
        Some(args.model.input.display().to_string()),
        data.dim(),
        data.outputs(),
        data.len(),
    );
    let report = RunReport::new(echo, &tree, seconds);
    io::write_json(&args.out, &report)?;
    Ok(report)
}

fn loss_field(total: Option<f64>) -> String {
    total.map(|v| v.to_string()).unwrap_or_default()
}

pub fn cmd_loss_surface(args: &LossSurfaceArgs) -> Result<LossSurface> {
    let data = args.model.load()?;
    let cfg = args.model.config(&data)?;
    let search = best_boundary(&data, &cfg)?;
    let csv_err = |path: &Path, e: csv::Error| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    };
    let out = &args.out;
    let mut w = io::writer(out)?;
    match &search.surface {
        LossSurface::Thresholds(rows) => {
            w.write_record(["threshold", "total_loss"])
                .map_err(|e| csv_err(out, e))?;
            for r in rows {
                w.write_record([r.threshold.to_string(), loss_field(r.total)])
                    .map_err(|e| csv_err(out, e))?;
            }
        }
        LossSurface::Perimeter { perimeter, .. } => {
            w.write_record(["i", "j", "total_loss"])
                .map_err(|e| csv_err(out, e))?;
            for (i, j, total) in search.surface.pairs() {
                w.write_record([i.to_string(), j.to_string(), loss_field(total)])
                    .map_err(|e| csv_err(out, e))?;
            }
            let side = args
                .perimeter_out
                .clone()
                .unwrap_or_else(|| out.with_extension("perimeter.csv"));
            let mut pw = io::writer(&side)?;
            pw.write_record(["index", "x", "y", "edge"])
                .map_err(|e| csv_err(&side, e))?;
            for (k, p) in perimeter.points().iter().enumerate() {
                pw.write_record([
                    k.to_string(),
                    p.point.x.to_string(),
                    p.point.y.to_string(),
                    p.edge.number().to_string(),
                ])
                .map_err(|e| csv_err(&side, e))?;
            }
            io::flush(&side, pw)?;
        }
    }
    io::flush(out, w)?;
    Ok(search.surface)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => cmd_generate(&args).map(drop),
        Command::Partition(args) => cmd_partition(&args).map(drop),
        Command::LossSurface(args) => cmd_loss_surface(&args).map(drop),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Usage(e.to_string()))?;
    run(cli)
}
