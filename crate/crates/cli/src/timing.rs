//! Latency summaries for the bench command.
//!
//! Each pipeline stage is timed per frame; a [`StageStats`] condenses those
//! samples into mean/median/tail figures and a [`TimingReport`] combines the
//! stages of one temporal mode into an end-to-end number.

use serde::Serialize;
use tubekit_core::imaging::TemporalMode;

/// Mean and percentile latency of one stage, in milliseconds per frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageStats {
    pub mean_ms: f64,
    pub p50_ms: f64,
    pub p95_ms: f64,
}

impl StageStats {
    /// Summarises per-frame samples (milliseconds). Panics on empty input;
    /// callers always time at least one frame.
    pub fn from_samples(samples: &[f64]) -> StageStats {
        assert!(!samples.is_empty(), "stage timed zero frames");
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        StageStats {
            mean_ms: mean,
            p50_ms: percentile(&sorted, 0.50),
            p95_ms: percentile(&sorted, 0.95),
        }
    }
}

/// Nearest-rank percentile over pre-sorted samples.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = (q * (sorted.len() - 1) as f64).round() as usize;
    sorted[idx]
}

/// Per-stage and end-to-end latency for one temporal mode.
///
/// The overall figure is the sum of the stage means (stages run in sequence
/// on every frame), so it is always at least the largest component mean.
#[derive(Debug, Clone, Serialize)]
pub struct TimingReport {
    pub mode: TemporalMode,
    pub temporal: StageStats,
    pub decode: StageStats,
    pub link: StageStats,
    pub overall_ms: f64,
    pub fps: f64,
}

impl TimingReport {
    pub fn new(mode: TemporalMode, temporal: &[f64], decode: &[f64], link: &[f64]) -> TimingReport {
        let temporal = StageStats::from_samples(temporal);
        let decode = StageStats::from_samples(decode);
        let link = StageStats::from_samples(link);
        let overall_ms = temporal.mean_ms + decode.mean_ms + link.mean_ms;
        TimingReport {
            mode,
            temporal,
            decode,
            link,
            overall_ms,
            fps: 1000.0 / overall_ms,
        }
    }
}

/// Formats reports as a tab-separated table, one row per temporal mode.
///
/// Modes without temporal channels show `-` in the temporal columns, the
/// convention the results tables use for the plain-detector baseline.
pub fn render_table(reports: &[TimingReport]) -> String {
    let mut out = String::from(
        "mode\ttemporal mean\ttemporal p50\ttemporal p95\tdecode mean\tdecode p50\tdecode p95\
         \tlink mean\tlink p50\tlink p95\toverall ms/frame\tfps\n",
    );
    for r in reports {
        out.push_str(r.mode.as_str());
        if r.mode == TemporalMode::None {
            out.push_str("\t-\t-\t-");
        } else {
            out.push_str(&format!(
                "\t{:.3}\t{:.3}\t{:.3}",
                r.temporal.mean_ms, r.temporal.p50_ms, r.temporal.p95_ms
            ));
        }
        out.push_str(&format!(
            "\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.1}\n",
            r.decode.mean_ms,
            r.decode.p50_ms,
            r.decode.p95_ms,
            r.link.mean_ms,
            r.link.p50_ms,
            r.link.p95_ms,
            r.overall_ms,
            r.fps
        ));
    }
    out
}
