//! `tubekit sweep`: rerun the pipeline on a scenario across a range of one
//! parameter and tabulate the video-mAP metrics per value.
//!
//! Every value runs the whole pipeline: frames are rendered and pushed
//! through the temporal stage, the scenario's noisy detections stand in for
//! the detector head, the linker builds tubes, and the evaluator scores them
//! against the scenario's ground truth. Detections and ground truth depend
//! only on `(scenario, seed)`, so rows differ exactly where the swept
//! parameter matters.

use anyhow::{bail, Result};
use clap::ValueEnum;
use tubekit_core::config::PipelineConfig;
use tubekit_core::eval::{map_suite, EvalTube, VideoDetections, VideoTubes};
use tubekit_core::imaging::TemporalPreprocessor;
use tubekit_core::sim::{render_frames, render_ground_truth, synth_detections, Scenario};
use tubekit_core::tubes::run_stream;

/// The linker and temporal-stage knobs the sweep can vary.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
pub enum SweepParam {
    /// IoU threshold for matching a detection to a tube.
    Lambda,
    /// Frames a tube may extrapolate before it is terminated.
    K,
    /// Gap between the current and the past frame in the temporal stage.
    FrameGap,
    /// Extrapolate unmatched tubes through missed detections.
    Explt,
    /// Predict the next box by linear extrapolation instead of holding it.
    Boxp,
}

impl SweepParam {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::K => "k",
            SweepParam::FrameGap => "frame_gap",
            SweepParam::Explt => "explt",
            SweepParam::Boxp => "boxp",
        }
    }
}

/// One sweep row: the parameter value and its video-mAP block.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: String,
    pub v_map_02: f64,
    pub v_map_05: f64,
    pub v_map_075: f64,
    pub v_map_05_095: f64,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Tab-separated table: a header line, then one row per value.
    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "{}\tv-mAP@0.2\tv-mAP@0.5\tv-mAP@0.75\tv-mAP@0.5:0.95\n",
            self.param.as_str()
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\n",
                row.value, row.v_map_02, row.v_map_05, row.v_map_075, row.v_map_05_095
            ));
        }
        out
    }
}

/// Sets the swept parameter on a copy of the configuration.
fn apply_value(cfg: &mut PipelineConfig, param: SweepParam, raw: &str) -> Result<()> {
    match param {
        SweepParam::Lambda => cfg.link.lambda = parse_num(param, raw)?,
        SweepParam::K => cfg.link.k = parse_num(param, raw)?,
        SweepParam::FrameGap => cfg.temporal.frame_gap = parse_num(param, raw)?,
        SweepParam::Explt => cfg.link.explt = parse_flag(param, raw)?,
        SweepParam::Boxp => cfg.link.boxp = parse_flag(param, raw)?,
    }
    Ok(())
}

fn parse_num<T: std::str::FromStr>(param: SweepParam, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| {
        anyhow::anyhow!("{:?} is not a valid value for {}", raw, param.as_str())
    })
}

fn parse_flag(param: SweepParam, raw: &str) -> Result<bool> {
    match raw {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        other => bail!("{other:?} is not a valid value for {} (use on/off)", param.as_str()),
    }
}

pub fn run(
    base: &PipelineConfig,
    param: SweepParam,
    values: &[String],
    scenario: &Scenario,
    seed: u64,
) -> Result<SweepTable> {
    let values: Vec<&String> = values.iter().filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        bail!("the sweep range is empty");
    }
    scenario.validate()?;

    let frames = render_frames(scenario, seed)?;
    let noise = scenario.noise.unwrap_or_default();
    let dets = synth_detections(scenario, &noise, seed)?;
    let gt = render_ground_truth(scenario)?;
    let preds = vec![VideoDetections::from_frames(
        scenario.name.clone(),
        dets.iter().map(Vec::as_slice),
    )];
    let bounds = Some((f64::from(scenario.width), f64::from(scenario.height)));

    let mut rows = Vec::with_capacity(values.len());
    for raw in values {
        let mut cfg = *base;
        apply_value(&mut cfg, param, raw)?;
        cfg.validate()?;

        let mut pre = TemporalPreprocessor::new(cfg.temporal_settings()?)?;
        for frame in &frames {
            pre.process(frame.clone())?;
        }
        let tubes = run_stream(
            dets.iter().enumerate().map(|(t, d)| (t as u64, d.clone())),
            &cfg.linker_config(bounds),
        )?;
        let eval_tubes: Vec<EvalTube> = tubes.iter().map(EvalTube::from).collect();
        let video_tubes = vec![VideoTubes::new(scenario.name.clone(), eval_tubes)];
        let report = map_suite(&preds, &video_tubes, &gt)?;
        rows.push(SweepRow {
            value: raw.to_string(),
            v_map_02: report.v_map_02,
            v_map_05: report.v_map_05,
            v_map_075: report.v_map_075,
            v_map_05_095: report.v_map_05_095,
        });
    }
    Ok(SweepTable { param, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tubekit_core::sim::{Actor, MotionPath, NoiseParams, Occlusion};

    fn occlusion_scenario() -> Scenario {
        Scenario {
            name: "occl".into(),
            frames: 24,
            width: 64,
            height: 64,
            classes: 1,
            channels: 1,
            drift: None,
            actors: vec![Actor {
                class: 0,
                start: 0,
                end: 23,
                size: (10.0, 10.0),
                path: MotionPath::Constant { origin: (4.0, 4.0), velocity: (1.5, 1.0) },
            }],
            occlusions: vec![Occlusion { actor: 0, start: 10, end: 12 }],
            noise: Some(NoiseParams {
                p_miss: 0.0,
                jitter_sigma: 0.4,
                fp_rate: 0.0,
                score_range: (0.6, 0.95),
            }),
        }
    }

    #[test]
    fn one_row_per_value_in_input_order() {
        let cfg = PipelineConfig::default();
        let values = vec!["0.2".to_string(), "0.5".to_string(), "0.8".to_string()];
        let table = run(&cfg, SweepParam::Lambda, &values, &occlusion_scenario(), 7).unwrap();
        assert_eq!(table.rows.len(), 3);
        let tsv = table.to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("lambda\tv-mAP@0.2\t"));
        assert!(lines[1].starts_with("0.2\t"));
        assert!(lines[3].starts_with("0.8\t"));
    }

    #[test]
    fn empty_range_is_an_error() {
        let cfg = PipelineConfig::default();
        let err = run(&cfg, SweepParam::K, &[], &occlusion_scenario(), 0).unwrap_err();
        assert!(err.to_string().contains("empty"), "{err}");
        let blank = vec![String::new()];
        assert!(run(&cfg, SweepParam::K, &blank, &occlusion_scenario(), 0).is_err());
    }

    #[test]
    fn unparsable_values_are_rejected() {
        let cfg = PipelineConfig::default();
        let sc = occlusion_scenario();
        let bad = vec!["wide".to_string()];
        assert!(run(&cfg, SweepParam::Lambda, &bad, &sc, 0).is_err());
        assert!(run(&cfg, SweepParam::Explt, &bad, &sc, 0).is_err());
        let flags = vec!["on".to_string(), "off".to_string()];
        assert!(run(&cfg, SweepParam::Boxp, &flags, &sc, 0).is_ok());
    }

    /// Bridging a three-frame occlusion keeps one tube per actor, so the
    /// extrapolating row must score at least as well as the row without it.
    #[test]
    fn extrapolation_helps_through_occlusions() {
        let cfg = PipelineConfig::default();
        let values = vec!["on".to_string(), "off".to_string()];
        let table = run(&cfg, SweepParam::Explt, &values, &occlusion_scenario(), 11).unwrap();
        assert!(
            table.rows[0].v_map_05 >= table.rows[1].v_map_05,
            "explt on {} < off {}",
            table.rows[0].v_map_05,
            table.rows[1].v_map_05
        );
    }
}
