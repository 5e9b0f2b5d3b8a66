//! `tubekit eval`: score a tube file and a detection file against ground
//! truth, printing the standard metric block.
//!
//! Ground-truth records always carry a video tag. Tube records and
//! detection files produced by `tubekit link` usually do not; untagged
//! entries are assigned `--video`, which defaults to the ground truth's
//! only video when there is exactly one.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Result};
use tubekit_core::detect::read_detections;
use tubekit_core::eval::{map_suite, read_ground_truth, EvalTube, MapReport, VideoDetections, VideoTubes};
use tubekit_core::tubes::read_tubes;

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub tubes: PathBuf,
    pub dets: PathBuf,
    pub gt: PathBuf,
    /// Video name for untagged tubes and for the detection file.
    pub video: Option<String>,
    /// Score only observed tube frames, dropping extrapolated ones.
    pub exclude_extrapolated: bool,
}

pub fn run(opts: &EvalOptions) -> Result<MapReport> {
    let gt = read_ground_truth(&opts.gt)?;
    let default_video = match &opts.video {
        Some(name) => name.clone(),
        None => {
            let videos = gt.videos();
            if videos.len() == 1 {
                videos.keys().next().expect("one video").clone()
            } else {
                bail!(
                    "ground truth covers {} videos; pass --video to place untagged tubes and detections",
                    videos.len()
                );
            }
        }
    };

    let mut grouped: BTreeMap<String, Vec<EvalTube>> = BTreeMap::new();
    for rec in &read_tubes(&opts.tubes)? {
        if let Some(tube) = EvalTube::from_record(rec, opts.exclude_extrapolated) {
            let video = rec.video.clone().unwrap_or_else(|| default_video.clone());
            grouped.entry(video).or_default().push(tube);
        }
    }
    let tubes: Vec<VideoTubes> =
        grouped.into_iter().map(|(video, tubes)| VideoTubes::new(video, tubes)).collect();

    let stream = read_detections(&opts.dets)?;
    if let Some(classes) = stream.classes {
        if classes != gt.classes() {
            bail!(
                "detections carry {classes} classes but the ground truth carries {}",
                gt.classes()
            );
        }
    }
    let preds = vec![VideoDetections::from_frames(
        default_video,
        stream.frames.iter().map(Vec::as_slice),
    )];

    Ok(map_suite(&preds, &tubes, &gt)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tubekit_core::detect::write_detections;
    use tubekit_core::sim::{render_ground_truth, synth_detections, Actor, MotionPath, NoiseParams, Scenario};
    use tubekit_core::tubes::{run_stream, write_tubes, TubeRecord};

    fn scenario() -> Scenario {
        Scenario {
            name: "clip".into(),
            frames: 8,
            width: 64,
            height: 64,
            classes: 2,
            channels: 1,
            drift: None,
            actors: vec![Actor {
                class: 1,
                start: 0,
                end: 7,
                size: (12.0, 12.0),
                path: MotionPath::Constant { origin: (4.0, 4.0), velocity: (2.0, 1.0) },
            }],
            occlusions: vec![],
            noise: None,
        }
    }

    /// Noiseless detections linked into tubes score a perfect report, and
    /// untagged records inherit the ground truth's single video name.
    #[test]
    fn perfect_pipeline_scores_ones() {
        let dir = tempfile::tempdir().unwrap();
        let sc = scenario();
        let gt = render_ground_truth(&sc).unwrap();
        let gt_path = dir.path().join("gt.jsonl");
        write_tubes(&gt_path, &gt.to_records()).unwrap();

        let dets = synth_detections(&sc, &NoiseParams::default(), 0).unwrap();
        let dets_path = dir.path().join("dets.jsonl");
        write_detections(&dets_path, dets.iter().enumerate().map(|(t, d)| (t as u64, d.as_slice())))
            .unwrap();

        let cfg = tubekit_core::config::PipelineConfig::default();
        let tubes = run_stream(
            dets.iter().enumerate().map(|(t, d)| (t as u64, d.clone())),
            &cfg.linker_config(Some((64.0, 64.0))),
        )
        .unwrap();
        let records: Vec<TubeRecord> = tubes.iter().map(TubeRecord::from).collect();
        let tubes_path = dir.path().join("tubes.jsonl");
        write_tubes(&tubes_path, &records).unwrap();

        let report = run(&EvalOptions {
            tubes: tubes_path,
            dets: dets_path,
            gt: gt_path,
            video: None,
            exclude_extrapolated: false,
        })
        .unwrap();
        assert_eq!(report.f_map_05, 1.0);
        assert_eq!(report.v_map_05, 1.0);
        assert_eq!(report.v_map_05_095, 1.0);
    }

    #[test]
    fn multi_video_ground_truth_requires_an_explicit_video() {
        let dir = tempfile::tempdir().unwrap();
        let sc = scenario();
        let gt = render_ground_truth(&sc).unwrap();
        let mut records = gt.to_records();
        let mut second = records[0].clone();
        second.video = Some("other".into());
        records.push(second);
        let gt_path = dir.path().join("gt.jsonl");
        write_tubes(&gt_path, &records).unwrap();

        let empty = dir.path().join("empty.jsonl");
        std::fs::write(&empty, "").unwrap();
        let err = run(&EvalOptions {
            tubes: empty.clone(),
            dets: empty,
            gt: gt_path,
            video: None,
            exclude_extrapolated: false,
        })
        .unwrap_err();
        assert!(err.to_string().contains("--video"), "{err}");
    }
}
