//! `tubekit preprocess`: run the temporal stage over a frame sequence and
//! write the per-frame temporal channels plus a selection manifest.
//!
//! Output layout under `--out-dir`:
//!
//! * `manifest.tsv` — one row per frame: `frame`, the chosen shift `dx`/`dy`,
//!   and the candidate's mean similarity. Modes without candidate selection
//!   (`raw_prev`, `none`) write `-` in the selection columns.
//! * similarity modes (`ssmap`, `dsim`) — one greyscale PNG per temporal
//!   channel, named `NNNNNN_cC.png`, using the `[-1, 1]` map encoding.
//! * `raw_prev` — the past frame itself as `NNNNNN.png`, so the output
//!   directory doubles as an ordinary frame directory.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use tubekit_core::config::PipelineConfig;
use tubekit_core::imaging::io::{load_frames, write_frame_png, write_map_plane_png};
use tubekit_core::imaging::{Frame, SelectionSummary, TemporalMode, TemporalPreprocessor};

#[derive(Debug, Clone)]
pub struct PreprocessOptions {
    /// A directory of numbered PNGs or a raw frame stream file.
    pub frames: PathBuf,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct PreprocessSummary {
    pub frames: usize,
    pub mode: TemporalMode,
    pub manifest: PathBuf,
    /// Per-frame selection, `None` for modes without candidate search.
    pub selections: Vec<Option<SelectionSummary>>,
}

pub fn run(opts: &PreprocessOptions, cfg: &PipelineConfig) -> Result<PreprocessSummary> {
    let frames = load_frames(&opts.frames)?;
    if frames.is_empty() {
        bail!("no frames found at {}", opts.frames.display());
    }
    fs::create_dir_all(&opts.out_dir)
        .with_context(|| format!("creating {}", opts.out_dir.display()))?;

    let settings = cfg.temporal_settings()?;
    let mode = settings.mode;
    let mut pre = TemporalPreprocessor::new(settings)?;
    let mut manifest = String::from("frame\tdx\tdy\tmean_ssim\n");
    let mut selections = Vec::with_capacity(frames.len());
    let count = frames.len();

    for frame in frames {
        let t = frame.index;
        let out = pre.process(frame).with_context(|| format!("frame {t}"))?;
        let input = &out.input;
        let (w, h) = (input.width(), input.height());
        match mode {
            TemporalMode::Ssmap | TemporalMode::Dsim => {
                for c in 0..input.temporal_channels() {
                    let path = opts.out_dir.join(format!("{t:06}_c{c}.png"));
                    write_map_plane_png(&path, input.plane(input.image_channels() + c), w, h)
                        .with_context(|| format!("frame {t}"))?;
                }
            }
            TemporalMode::RawPrev => {
                let tch = input.temporal_channels();
                let mut data = Vec::with_capacity(w * h * tch);
                for c in 0..tch {
                    data.extend_from_slice(input.plane(input.image_channels() + c));
                }
                let past = Frame::new(t, w, h, tch, data)?;
                write_frame_png(opts.out_dir.join(format!("{t:06}.png")), &past)
                    .with_context(|| format!("frame {t}"))?;
            }
            TemporalMode::None => {}
        }
        match &out.selection {
            Some(sel) => manifest.push_str(&format!(
                "{t}\t{}\t{}\t{:.6}\n",
                sel.direction.dx, sel.direction.dy, sel.mean_ssim
            )),
            None => manifest.push_str(&format!("{t}\t-\t-\t-\n")),
        }
        selections.push(out.selection);
    }

    let manifest_path = opts.out_dir.join("manifest.tsv");
    fs::write(&manifest_path, manifest)
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    Ok(PreprocessSummary { frames: count, mode, manifest: manifest_path, selections })
}
