//! Command-line surface: argument structs, configuration resolution, and the
//! dispatcher that turns parsed arguments into command runs.
//!
//! Configuration precedence is flag > file > built-in default. The file is
//! named by `--config`, falling back to the `TUBEKIT_CONFIG` environment
//! variable; each flag below mirrors one key of the TOML file. Diagnostics
//! go to stderr, data goes to files or stdout, and the process exits zero
//! exactly when no error occurred.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};
use tubekit_core::config::PipelineConfig;
use tubekit_core::imaging::TemporalMode;
use tubekit_core::sim::read_scenario;

use crate::commands::link::{LinkOptions, LinkSource};
use crate::commands::sweep::SweepParam;
use crate::commands::{bench, eval, link, preprocess, simulate, sweep};
use crate::timing;

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "TUBEKIT_CONFIG";

#[derive(Parser, Debug)]
#[command(
    name = "tubekit",
    version,
    about = "Online action tubes from frame streams: temporal similarity maps, \
             heatmap decoding, tube linking, and evaluation."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the temporal stage over frames, writing maps and a manifest.
    Preprocess(PreprocessCmd),
    /// Link detections (or decoded heatmaps) into action tubes.
    Link(LinkCmd),
    /// Score tubes and detections against ground truth.
    Eval(EvalCmd),
    /// Measure per-stage latency on a synthetic scenario.
    Bench(BenchCmd),
    /// Rerun the pipeline across one parameter's value range.
    Sweep(SweepCmd),
    /// Render a scenario's ground truth, detections, frames, and heatmaps.
    Simulate(SimulateCmd),
}

/// TOML configuration plus per-key overrides; flag names match the file keys.
#[derive(Args, Clone, Debug, Default)]
pub struct ConfigArgs {
    /// Pipeline configuration file (TOML).
    #[arg(long, env = CONFIG_ENV, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Similarity window side length (odd). [ssim.window]
    #[arg(long, value_name = "N")]
    pub window: Option<usize>,
    /// Dynamic range of the pixel values. [ssim.L]
    #[arg(long = "L", value_name = "X")]
    pub range: Option<f64>,
    /// Luminance stabilizer, overriding (0.01 L)^2. [ssim.c1]
    #[arg(long, value_name = "X")]
    pub c1: Option<f64>,
    /// Contrast stabilizer, overriding (0.03 L)^2. [ssim.c2]
    #[arg(long, value_name = "X")]
    pub c2: Option<f64>,

    /// Temporal channel mode: ssmap, dsim, raw_prev, or none. [temporal.mode]
    #[arg(long, value_name = "MODE")]
    pub mode: Option<TemporalMode>,
    /// Distance to the past frame. [temporal.frame_gap]
    #[arg(long, value_name = "N")]
    pub frame_gap: Option<usize>,
    /// Sample the candidate from the k best instead of taking the best. [temporal.topk]
    #[arg(long, value_name = "K")]
    pub topk: Option<usize>,
    /// Seed for top-k candidate sampling. [temporal.seed]
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,

    /// Minimum peak score a decoded box needs. [detect.score_floor]
    #[arg(long, value_name = "X")]
    pub score_floor: Option<f64>,
    /// Decoded boxes kept per class before suppression. [detect.max_per_class]
    #[arg(long, value_name = "N")]
    pub max_per_class: Option<usize>,
    /// IoU above which a lower-scoring box is suppressed. [detect.nms_iou]
    #[arg(long, value_name = "X")]
    pub nms_iou: Option<f64>,
    /// Boxes surviving suppression per class. [detect.top_n]
    #[arg(long, value_name = "N")]
    pub top_n: Option<usize>,
    /// Emit full score vectors instead of one-hot peaks. [detect.dense_scores]
    #[arg(long, value_name = "BOOL")]
    pub dense_scores: Option<bool>,

    /// IoU threshold for matching detections to tubes. [link.lambda]
    #[arg(long, value_name = "X")]
    pub lambda: Option<f64>,
    /// Frames a tube may extrapolate before termination. [link.k]
    #[arg(long, value_name = "N")]
    pub k: Option<u32>,
    /// Detections considered per class and frame. [link.n]
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,
    /// Extrapolate unmatched tubes through missed detections. [link.explt]
    #[arg(long, value_name = "BOOL")]
    pub explt: Option<bool>,
    /// Predict boxes by linear extrapolation instead of holding them. [link.boxp]
    #[arg(long, value_name = "BOOL")]
    pub boxp: Option<bool>,
    /// Minimum score for a detection to start a new tube. [link.spawn_floor]
    #[arg(long, value_name = "X")]
    pub spawn_floor: Option<f64>,
}

impl ConfigArgs {
    /// Loads the file (when named) and applies the flag overrides on top.
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::from_path(path)?,
            None => PipelineConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident => $slot:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $slot = v; })*
            };
        }
        apply! {
            window => cfg.ssim.window,
            range => cfg.ssim.range,
            mode => cfg.temporal.mode,
            frame_gap => cfg.temporal.frame_gap,
            topk => cfg.temporal.topk,
            seed => cfg.temporal.seed,
            score_floor => cfg.detect.score_floor,
            max_per_class => cfg.detect.max_per_class,
            nms_iou => cfg.detect.nms_iou,
            top_n => cfg.detect.top_n,
            dense_scores => cfg.detect.dense_scores,
            lambda => cfg.link.lambda,
            k => cfg.link.k,
            n => cfg.link.n,
            explt => cfg.link.explt,
            boxp => cfg.link.boxp,
            spawn_floor => cfg.link.spawn_floor,
        }
        if let Some(c1) = self.c1 {
            cfg.ssim.c1 = Some(c1);
        }
        if let Some(c2) = self.c2 {
            cfg.ssim.c2 = Some(c2);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
pub struct PreprocessCmd {
    /// Input frames: a directory of numbered PNGs or a raw stream file.
    #[arg(long, value_name = "PATH")]
    pub frames: PathBuf,
    /// Directory the maps and manifest are written to.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args, Debug)]
#[command(group = ArgGroup::new("source").required(true).args(["dets", "heatmaps"]))]
pub struct LinkCmd {
    /// Detections JSONL file.
    #[arg(long, value_name = "FILE")]
    pub dets: Option<PathBuf>,
    /// Directory of numbered heatmap files to decode instead of --dets.
    #[arg(long, value_name = "DIR")]
    pub heatmaps: Option<PathBuf>,
    /// Output tube JSONL file.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Also append one JSON line of linker state after every frame.
    #[arg(long, value_name = "FILE")]
    pub emit_online: Option<PathBuf>,
    /// Video tag stamped on the output records.
    #[arg(long, value_name = "NAME")]
    pub video: Option<String>,
    /// Frame width in pixels, for clamping predicted boxes.
    #[arg(long, value_name = "PX", requires = "height")]
    pub width: Option<f64>,
    /// Frame height in pixels, for clamping predicted boxes.
    #[arg(long, value_name = "PX", requires = "width")]
    pub height: Option<f64>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args, Debug)]
pub struct EvalCmd {
    /// Tube JSONL file to score.
    #[arg(long, value_name = "FILE")]
    pub tubes: PathBuf,
    /// Detections JSONL file to score.
    #[arg(long, value_name = "FILE")]
    pub dets: PathBuf,
    /// Ground-truth tube JSONL file.
    #[arg(long, value_name = "FILE")]
    pub gt: PathBuf,
    /// Video name for untagged tubes and the detection file.
    #[arg(long, value_name = "NAME")]
    pub video: Option<String>,
    /// Score only observed tube frames, dropping extrapolated ones.
    #[arg(long)]
    pub exclude_extrapolated: bool,
}

#[derive(Args, Debug)]
pub struct BenchCmd {
    /// Scenario file; a built-in full-resolution scenario is the default.
    #[arg(long, value_name = "FILE")]
    pub scenario: Option<PathBuf>,
    /// Timed frames per stage (at least 500).
    #[arg(long, value_name = "N", default_value_t = 500)]
    pub timed_frames: usize,
    /// Untimed warm-up frames per stage.
    #[arg(long, value_name = "N", default_value_t = 32)]
    pub warmup: usize,
    /// Seed for the rendered inputs.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub scenario_seed: u64,
    /// Down-sampling ratio of the rendered heatmaps.
    #[arg(long, value_name = "R", default_value_t = 4)]
    pub down_ratio: usize,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args, Debug)]
pub struct SweepCmd {
    /// Parameter to sweep.
    #[arg(long, value_enum, value_name = "PARAM")]
    pub param: SweepParam,
    /// Comma-separated parameter values, one pipeline run each.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub values: Vec<String>,
    /// Scenario file driving the runs.
    #[arg(long, value_name = "FILE")]
    pub scenario: PathBuf,
    /// Seed for the rendered inputs.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub scenario_seed: u64,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args, Debug)]
pub struct SimulateCmd {
    /// Scenario file to render.
    #[arg(long, value_name = "FILE")]
    pub scenario: PathBuf,
    /// Directory the outputs are written to.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Seed for detection synthesis and rendering.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub seed: u64,
    /// Also write the rendered frames to frames.raw.
    #[arg(long)]
    pub render_frames: bool,
    /// Also write per-frame heatmaps to heatmaps/.
    #[arg(long)]
    pub emit_heatmaps: bool,
    /// Down-sampling ratio of the emitted heatmaps.
    #[arg(long, value_name = "R", default_value_t = 4)]
    pub down_ratio: usize,
    /// Ignore the scenario's noise block and emit exact detections.
    #[arg(long)]
    pub noiseless: bool,
}

/// Runs one parsed command, printing data to stdout and diagnostics to
/// stderr.
pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Preprocess(cmd) => {
            let cfg = cmd.config.resolve()?;
            let opts = preprocess::PreprocessOptions { frames: cmd.frames, out_dir: cmd.out_dir };
            let summary = preprocess::run(&opts, &cfg)?;
            eprintln!(
                "preprocessed {} frames in mode {}; manifest at {}",
                summary.frames,
                summary.mode.as_str(),
                summary.manifest.display()
            );
        }
        Command::Link(cmd) => {
            let cfg = cmd.config.resolve()?;
            let source = match (cmd.dets, cmd.heatmaps) {
                (Some(path), None) => LinkSource::Dets(path),
                (None, Some(dir)) => LinkSource::Heatmaps(dir),
                _ => bail!("exactly one of --dets and --heatmaps is required"),
            };
            let bounds = match (cmd.width, cmd.height) {
                (Some(w), Some(h)) => Some((w, h)),
                _ => None,
            };
            let opts = LinkOptions {
                source,
                out: cmd.out,
                emit_online: cmd.emit_online,
                video: cmd.video,
                bounds,
            };
            let summary = link::run(&opts, &cfg)?;
            eprintln!("linked {} frames into {} tubes", summary.frames, summary.tubes);
        }
        Command::Eval(cmd) => {
            let opts = eval::EvalOptions {
                tubes: cmd.tubes,
                dets: cmd.dets,
                gt: cmd.gt,
                video: cmd.video,
                exclude_extrapolated: cmd.exclude_extrapolated,
            };
            let report = eval::run(&opts)?;
            print!("{}", report.to_tsv());
        }
        Command::Bench(cmd) => {
            let cfg = cmd.config.resolve()?;
            let scenario = match &cmd.scenario {
                Some(path) => read_scenario(path)?,
                None => bench::default_scenario(),
            };
            let opts = bench::BenchOptions {
                timed_frames: cmd.timed_frames,
                warmup: cmd.warmup,
                seed: cmd.scenario_seed,
                down_ratio: cmd.down_ratio,
            };
            let reports = bench::run(&cfg, &scenario, &bench::ALL_MODES, &opts)?;
            print!("{}", timing::render_table(&reports));
        }
        Command::Sweep(cmd) => {
            let cfg = cmd.config.resolve()?;
            let scenario = read_scenario(&cmd.scenario)?;
            let table = sweep::run(&cfg, cmd.param, &cmd.values, &scenario, cmd.scenario_seed)?;
            print!("{}", table.to_tsv());
        }
        Command::Simulate(cmd) => {
            let opts = simulate::SimulateOptions {
                scenario: cmd.scenario,
                out_dir: cmd.out_dir,
                seed: cmd.seed,
                render_frames: cmd.render_frames,
                emit_heatmaps: cmd.emit_heatmaps,
                down_ratio: cmd.down_ratio,
                noiseless: cmd.noiseless,
            };
            let summary = simulate::run(&opts)?;
            eprintln!(
                "simulated {:?}: {} ground-truth tubes, {} detections over {} frames",
                summary.scenario.name, summary.gt_tubes, summary.detections, summary.scenario.frames
            );
        }
    }
    Ok(())
}
