//! `tubekit link`: turn a detection stream into action tubes.
//!
//! Detections come either from a JSONL file (`--dets`) or from a directory
//! of per-frame heatmap files (`--heatmaps`), in which case each frame is
//! decoded and pruned with per-class non-maximum suppression first. Tubes
//! are written as JSONL; `--emit-online` additionally appends one JSON line
//! of linker state after every frame, which is what an online consumer of
//! the pipeline would have seen at that point.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use tubekit_core::config::PipelineConfig;
use tubekit_core::detect::{decode_heatmaps, nms, read_detections, read_heatmap, Detection, HeatmapSet};
use tubekit_core::tubes::{write_tubes, TubeLinker, TubeRecord};

#[derive(Debug, Clone)]
pub enum LinkSource {
    /// A detections JSONL file.
    Dets(PathBuf),
    /// A directory of numbered heatmap files to decode.
    Heatmaps(PathBuf),
}

#[derive(Debug, Clone)]
pub struct LinkOptions {
    pub source: LinkSource,
    pub out: PathBuf,
    /// Append per-frame linker snapshots to this file.
    pub emit_online: Option<PathBuf>,
    /// Video tag stamped on the output records.
    pub video: Option<String>,
    /// Frame bounds for clamping predicted boxes; derived from the heatmaps
    /// when decoding, otherwise taken from the flags.
    pub bounds: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct LinkSummary {
    pub frames: usize,
    pub tubes: usize,
}

pub fn run(opts: &LinkOptions, cfg: &PipelineConfig) -> Result<LinkSummary> {
    let (stream, derived_bounds) = match &opts.source {
        LinkSource::Dets(path) => (read_detections(path)?.frames, None),
        LinkSource::Heatmaps(dir) => decode_heatmap_dir(dir, cfg)?,
    };
    let bounds = opts.bounds.or(derived_bounds);
    let mut linker = TubeLinker::new(cfg.linker_config(bounds))?;
    let mut online = match &opts.emit_online {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            Some(BufWriter::new(file))
        }
        None => None,
    };

    let frames = stream.len();
    for (t, dets) in stream.iter().enumerate() {
        let t = t as u64;
        linker.step(t, dets).with_context(|| format!("frame {t}"))?;
        if let Some(w) = online.as_mut() {
            let tubes: Vec<TubeRecord> = linker.snapshot().iter().map(TubeRecord::from).collect();
            let line = serde_json::json!({ "frame": t, "tubes": tubes });
            writeln!(w, "{line}").context("writing online state")?;
        }
    }
    if let Some(mut w) = online {
        w.flush().context("writing online state")?;
    }

    let mut records: Vec<TubeRecord> = linker.into_tubes().iter().map(TubeRecord::from).collect();
    if let Some(video) = &opts.video {
        for rec in &mut records {
            rec.video = Some(video.clone());
        }
    }
    write_tubes(&opts.out, &records)?;
    Ok(LinkSummary { frames, tubes: records.len() })
}

/// Reads a directory of numbered heatmap files, decodes each frame, and
/// prunes the decoded boxes with per-class NMS. Returns the per-frame
/// detections and the input bounds implied by the heatmap geometry.
fn decode_heatmap_dir(
    dir: &Path,
    cfg: &PipelineConfig,
) -> Result<(Vec<Vec<Detection>>, Option<(f64, f64)>)> {
    let sets = read_heatmap_dir(dir)?;
    let decode_cfg = cfg.decode_config();
    let mut stream = Vec::with_capacity(sets.len());
    let mut bounds = None;
    for (t, set) in sets.iter().enumerate() {
        bounds.get_or_insert((set.input_width() as f64, set.input_height() as f64));
        let decoded = decode_heatmaps(set, t as u64, &decode_cfg);
        stream.push(class_nms(&decoded, set.classes(), cfg.detect.nms_iou, cfg.detect.top_n));
    }
    Ok((stream, bounds))
}

/// Reads `*.hm` files with numeric names in numeric order, like a frame
/// directory; all sets must share one geometry.
pub fn read_heatmap_dir(dir: &Path) -> Result<Vec<HeatmapSet>> {
    let entries = fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))?;
    let mut numbered: Vec<(u64, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry.with_context(|| format!("reading {}", dir.display()))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("hm") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let number: u64 = stem.parse().with_context(|| {
            format!("{}: heatmap files must have numeric names like 000042.hm", path.display())
        })?;
        numbered.push((number, path));
    }
    if numbered.is_empty() {
        bail!("no heatmap files found in {}", dir.display());
    }
    numbered.sort_by_key(|(n, _)| *n);
    for pair in numbered.windows(2) {
        if pair[0].0 == pair[1].0 {
            bail!("{}: duplicate heatmap number {}", pair[1].1.display(), pair[1].0);
        }
    }
    let mut sets = Vec::with_capacity(numbered.len());
    for (_, path) in &numbered {
        let set = read_heatmap(path)?;
        if let Some(first) = sets.first() {
            let first: &HeatmapSet = first;
            if (set.grid_w(), set.grid_h(), set.classes(), set.down_ratio())
                != (first.grid_w(), first.grid_h(), first.classes(), first.down_ratio())
            {
                bail!("{}: heatmap geometry differs from the first file", path.display());
            }
        }
        sets.push(set);
    }
    Ok(sets)
}

/// Suppresses within each class independently: detections are partitioned by
/// their top class, pruned with [`nms`], and stitched back in class order.
pub fn class_nms(dets: &[Detection], classes: usize, iou_thresh: f64, top_n: usize) -> Vec<Detection> {
    let mut kept = Vec::new();
    for c in 0..classes {
        let of_class: Vec<Detection> =
            dets.iter().filter(|d| d.top_class() == Some(c)).cloned().collect();
        kept.extend(nms(&of_class, c, iou_thresh, top_n));
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use tubekit_core::detect::{write_detections, write_heatmap, BBox};
    use tubekit_core::tubes::read_tubes;

    fn det(frame: u64, x: f64, score: f64, classes: usize, class: usize) -> Detection {
        let mut scores = vec![0.0; classes];
        scores[class] = score;
        Detection::new(frame, BBox::new(x, 0.0, x + 10.0, 10.0).unwrap(), scores)
    }

    #[test]
    fn links_a_detection_file_and_tags_the_video() {
        let dir = tempfile::tempdir().unwrap();
        let dets_path = dir.path().join("dets.jsonl");
        let frames: Vec<Vec<Detection>> =
            (0..5).map(|t| vec![det(t, f64::from(t as u32), 0.9, 1, 0)]).collect();
        write_detections(&dets_path, frames.iter().enumerate().map(|(t, d)| (t as u64, d.as_slice())))
            .unwrap();

        let out = dir.path().join("tubes.jsonl");
        let summary = run(
            &LinkOptions {
                source: LinkSource::Dets(dets_path),
                out: out.clone(),
                emit_online: None,
                video: Some("clip".into()),
                bounds: None,
            },
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!((summary.frames, summary.tubes), (5, 1));
        let records = read_tubes(&out).unwrap();
        assert_eq!(records[0].video.as_deref(), Some("clip"));
        assert_eq!(records[0].frames.len(), 5);
    }

    #[test]
    fn online_file_holds_one_line_per_frame() {
        let dir = tempfile::tempdir().unwrap();
        let dets_path = dir.path().join("dets.jsonl");
        let frames: Vec<Vec<Detection>> = (0..4).map(|t| vec![det(t, 0.0, 0.8, 1, 0)]).collect();
        write_detections(&dets_path, frames.iter().enumerate().map(|(t, d)| (t as u64, d.as_slice())))
            .unwrap();
        let online = dir.path().join("online.jsonl");
        run(
            &LinkOptions {
                source: LinkSource::Dets(dets_path),
                out: dir.path().join("tubes.jsonl"),
                emit_online: Some(online.clone()),
                video: None,
                bounds: None,
            },
            &PipelineConfig::default(),
        )
        .unwrap();
        let text = fs::read_to_string(&online).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        for (t, line) in lines.iter().enumerate() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["frame"], t as u64);
            assert_eq!(v["tubes"].as_array().unwrap().len(), 1);
        }
    }

    #[test]
    fn heatmap_directory_is_decoded_and_linked() {
        let dir = tempfile::tempdir().unwrap();
        let hm_dir = dir.path().join("heatmaps");
        fs::create_dir(&hm_dir).unwrap();
        for t in 0..3u64 {
            let mut set = HeatmapSet::zeros(8, 8, 1, 4).unwrap();
            set.set_center(0, 4, 4, 0.9);
            set.set_regression(4, 4, (12.0, 12.0), (0.0, 0.0));
            write_heatmap(hm_dir.join(format!("{t:06}.hm")), &set).unwrap();
        }
        let out = dir.path().join("tubes.jsonl");
        let summary = run(
            &LinkOptions {
                source: LinkSource::Heatmaps(hm_dir),
                out: out.clone(),
                emit_online: None,
                video: None,
                bounds: None,
            },
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!((summary.frames, summary.tubes), (3, 1));
        let records = read_tubes(&out).unwrap();
        assert_eq!(records[0].frames.len(), 3);
    }

    #[test]
    fn class_nms_keeps_the_best_box_per_class() {
        let dets = vec![
            det(0, 0.0, 0.9, 2, 0),
            det(0, 1.0, 0.8, 2, 0), // overlaps the first, same class: suppressed
            det(0, 1.0, 0.7, 2, 1), // overlaps but a different class: kept
            det(0, 40.0, 0.5, 2, 0),
        ];
        let kept = class_nms(&dets, 2, 0.45, 10);
        assert_eq!(kept.len(), 3);
        assert_eq!(kept.iter().filter(|d| d.top_class() == Some(0)).count(), 2);
        assert_eq!(kept.iter().filter(|d| d.top_class() == Some(1)).count(), 1);
    }
}
