//! Average-precision computation for boxes (frame level) and tubes (video
//! level).
//!
//! Matching and integration follow one fixed recipe so results are exactly
//! reproducible and can be checked bit-for-bit against the brute-force
//! reference in `sim::oracle`:
//!
//! * candidates are predictions with a positive class score, sorted by
//!   score descending with deterministic tie breaks (video position, then
//!   frame, then input order);
//! * each candidate greedily matches the unmatched same-video (and, for
//!   boxes, same-frame) ground-truth instance with the highest overlap,
//!   earliest instance winning ties, and is a true positive when that
//!   overlap reaches the threshold;
//! * AP integrates the raw precision-recall points under the all-point
//!   interpolation (right-to-left precision envelope).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::detect::{iou, BBox};
use crate::error::{Error, Result};
use crate::eval::{GroundTruth, VideoDetections, VideoTubes};

/// A precision-recall curve: the raw running points after each prediction,
/// plus the interpolated area.
#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    /// `(recall, precision)` after each prediction in rank order.
    pub points: Vec<(f64, f64)>,
    /// All-point interpolated average precision in `[0, 1]`.
    pub ap: f64,
}

impl PrCurve {
    /// Integrates ranked `(is_tp)` outcomes against `npos` positives.
    fn from_outcomes(outcomes: &[bool], npos: usize) -> PrCurve {
        let mut points = Vec::with_capacity(outcomes.len());
        let mut tp = 0usize;
        let mut fp = 0usize;
        for &hit in outcomes {
            if hit {
                tp += 1;
            } else {
                fp += 1;
            }
            let recall = tp as f64 / npos as f64;
            let precision = tp as f64 / (tp + fp) as f64;
            points.push((recall, precision));
        }
        let ap = interpolated_area(&points);
        PrCurve { points, ap }
    }
}

/// Area under the precision envelope: walking right to left, precision is
/// replaced by the running maximum, and each recall step contributes
/// `(r_i - r_{i-1}) * max_precision`.
fn interpolated_area(points: &[(f64, f64)]) -> f64 {
    let mut ap = 0.0;
    let mut max_p = 0.0;
    for i in (0..points.len()).rev() {
        let (r, p) = points[i];
        if p > max_p {
            max_p = p;
        }
        let prev_r = if i == 0 { 0.0 } else { points[i - 1].0 };
        ap += (r - prev_r) * max_p;
    }
    ap
}

fn check_thresh(thresh: f64) -> Result<()> {
    if !(thresh > 0.0 && thresh <= 1.0) {
        return Err(Error::invalid(format!("iou threshold must lie in (0, 1], got {thresh}")));
    }
    Ok(())
}

fn check_class(gt: &GroundTruth, class: usize) -> Result<()> {
    if class >= gt.classes() {
        return Err(Error::invalid(format!(
            "unknown class {class}: ground truth has {} classes",
            gt.classes()
        )));
    }
    Ok(())
}

/// Frame-level average precision for one class.
///
/// Detections from every video are pooled, ranked by class score, and
/// matched greedily against unmatched ground-truth boxes of the same video,
/// frame, and class. Zero ground-truth instances for the class is an error
/// (recall would be undefined); detections with a zero class score are not
/// candidates.
pub fn frame_ap(
    preds: &[VideoDetections],
    gt: &GroundTruth,
    class: usize,
    iou_thresh: f64,
) -> Result<PrCurve> {
    check_thresh(iou_thresh)?;
    check_class(gt, class)?;

    // Ground-truth boxes of this class, indexed by (video, frame). Instance
    // ids are assigned in video-name, tube, frame order.
    let mut instances: BTreeMap<(&str, u64), Vec<(usize, BBox)>> = BTreeMap::new();
    let mut npos = 0usize;
    for (video, tubes) in gt.videos() {
        for tube in tubes {
            if tube.class != class {
                continue;
            }
            for &(t, bbox) in &tube.frames {
                instances.entry((video, t)).or_default().push((npos, bbox));
                npos += 1;
            }
        }
    }
    if npos == 0 {
        return Err(Error::invalid(format!("class {class} has no ground-truth instances")));
    }

    // Candidates: (score, video position, frame, input order).
    let mut candidates: Vec<(f64, usize, u64, usize)> = Vec::new();
    for (vi, vd) in preds.iter().enumerate() {
        for (di, det) in vd.dets.iter().enumerate() {
            let score = det.score(class);
            if score > 0.0 {
                candidates.push((score, vi, det.frame, di));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("scores are finite")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
    });

    let mut matched = vec![false; npos];
    let mut outcomes = Vec::with_capacity(candidates.len());
    for &(_, vi, frame, di) in &candidates {
        let det = &preds[vi].dets[di];
        let mut best: Option<usize> = None;
        let mut best_iou = 0.0;
        if let Some(boxes) = instances.get(&(preds[vi].video.as_str(), frame)) {
            for &(id, bbox) in boxes {
                if matched[id] {
                    continue;
                }
                let overlap = iou(&det.bbox, &bbox);
                if overlap > best_iou {
                    best_iou = overlap;
                    best = Some(id);
                }
            }
        }
        let hit = best_iou >= iou_thresh && best.is_some();
        if hit {
            matched[best.expect("hit implies a best instance")] = true;
        }
        outcomes.push(hit);
    }
    Ok(PrCurve::from_outcomes(&outcomes, npos))
}

/// Spatio-temporal overlap of two tubes: the temporal IoU of their frame
/// sets times the mean spatial box IoU over the frames both cover. Zero
/// when they share no frame. Frames must be strictly increasing.
pub fn tube_iou(a: &[(u64, BBox)], b: &[(u64, BBox)]) -> f64 {
    let mut i = 0;
    let mut j = 0;
    let mut inter = 0usize;
    let mut spatial_sum = 0.0;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                spatial_sum += iou(&a[i].1, &b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    if inter == 0 {
        return 0.0;
    }
    let union = a.len() + b.len() - inter;
    let temporal = inter as f64 / union as f64;
    let spatial = spatial_sum / inter as f64;
    temporal * spatial
}

/// Video-level average precision for one class: predicted tubes of the
/// class are ranked by tube score and matched greedily against unmatched
/// same-video ground-truth tubes by highest spatio-temporal IoU.
pub fn video_ap(
    preds: &[VideoTubes],
    gt: &GroundTruth,
    class: usize,
    st_iou_thresh: f64,
) -> Result<PrCurve> {
    check_thresh(st_iou_thresh)?;
    check_class(gt, class)?;

    let mut instances: BTreeMap<&str, Vec<(usize, &[(u64, BBox)])>> = BTreeMap::new();
    let mut npos = 0usize;
    for (video, tubes) in gt.videos() {
        for tube in tubes {
            if tube.class != class {
                continue;
            }
            instances
                .entry(video)
                .or_default()
                .push((npos, tube.frames.as_slice()));
            npos += 1;
        }
    }
    if npos == 0 {
        return Err(Error::invalid(format!("class {class} has no ground-truth instances")));
    }

    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (vi, vt) in preds.iter().enumerate() {
        for (ti, tube) in vt.tubes.iter().enumerate() {
            if tube.class == class {
                candidates.push((tube.score, vi, ti));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("tube scores are finite")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut matched = vec![false; npos];
    let mut outcomes = Vec::with_capacity(candidates.len());
    for &(_, vi, ti) in &candidates {
        let tube = &preds[vi].tubes[ti];
        let mut best: Option<usize> = None;
        let mut best_iou = 0.0;
        if let Some(gts) = instances.get(preds[vi].video.as_str()) {
            for &(id, frames) in gts {
                if matched[id] {
                    continue;
                }
                let overlap = tube_iou(&tube.frames, frames);
                if overlap > best_iou {
                    best_iou = overlap;
                    best = Some(id);
                }
            }
        }
        let hit = best_iou >= st_iou_thresh && best.is_some();
        if hit {
            matched[best.expect("hit implies a best instance")] = true;
        }
        outcomes.push(hit);
    }
    Ok(PrCurve::from_outcomes(&outcomes, npos))
}

/// The standard metric block: frame-mAP at 0.5 plus video-mAP at 0.2, 0.5,
/// 0.75 and averaged over 0.5..0.95 in steps of 0.05.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapReport {
    pub f_map_05: f64,
    pub v_map_02: f64,
    pub v_map_05: f64,
    pub v_map_075: f64,
    pub v_map_05_095: f64,
}

impl MapReport {
    /// Two-line tab-separated table: header then values.
    pub fn to_tsv(&self) -> String {
        format!(
            "v-mAP@0.2\tv-mAP@0.5\tv-mAP@0.75\tv-mAP@0.5:0.95\tf-mAP@0.5\n{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\n",
            self.v_map_02, self.v_map_05, self.v_map_075, self.v_map_05_095, self.f_map_05
        )
    }
}

/// Mean AP over the classes present in ground truth (absent classes are
/// skipped, not counted as zero). Ground truth with no tubes at all yields
/// a report of zeros.
pub fn map_suite(
    preds: &[VideoDetections],
    tubes: &[VideoTubes],
    gt: &GroundTruth,
) -> Result<MapReport> {
    let classes = gt.present_classes();
    if classes.is_empty() {
        return Ok(MapReport {
            f_map_05: 0.0,
            v_map_02: 0.0,
            v_map_05: 0.0,
            v_map_075: 0.0,
            v_map_05_095: 0.0,
        });
    }

    let f_map_05 = mean_over_classes(&classes, |c| Ok(frame_ap(preds, gt, c, 0.5)?.ap))?;
    let v_map = |thresh: f64| -> Result<f64> {
        mean_over_classes(&classes, |c| Ok(video_ap(tubes, gt, c, thresh)?.ap))
    };
    let v_map_02 = v_map(0.2)?;
    let v_map_05 = v_map(0.5)?;
    let v_map_075 = v_map(0.75)?;
    let mut strict_sum = 0.0;
    let mut strict_count = 0usize;
    for pct in (50..=95).step_by(5) {
        strict_sum += v_map(pct as f64 / 100.0)?;
        strict_count += 1;
    }
    Ok(MapReport {
        f_map_05,
        v_map_02,
        v_map_05,
        v_map_075,
        v_map_05_095: strict_sum / strict_count as f64,
    })
}

fn mean_over_classes<F>(classes: &[usize], mut ap: F) -> Result<f64>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut sum = 0.0;
    for &c in classes {
        sum += ap(c)?;
    }
    Ok(sum / classes.len() as f64)
}
