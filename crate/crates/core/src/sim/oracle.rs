//! Brute-force reference implementations.
//!
//! Each oracle re-derives a pipeline result with the most naive algorithm
//! available and no shared logic with the module it checks (shared *data*
//! types are fine). The linking, AP, and decoding oracles use the same
//! arithmetic expression shapes as the real implementations so agreement is
//! exact, not just approximate; the SSIM oracle recomputes window
//! statistics directly and is compared within a tolerance.

use crate::detect::{BBox, Detection, DecodeConfig, HeatmapSet};
use crate::error::{Error, Result};
use crate::eval::{GroundTruth, VideoDetections, VideoTubes};
use crate::imaging::{Frame, SsimParams, TemporalMap};
use crate::tubes::{ActionTube, LinkerConfig, TubeFrame};

// ---------------------------------------------------------------------------
// Geometry helpers (deliberate re-derivations of detect::iou etc.)
// ---------------------------------------------------------------------------

fn naive_iou(a: &BBox, b: &BBox) -> f64 {
    let iw = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let ih = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = iw * ih;
    let area_a = (a.x2 - a.x1) * (a.y2 - a.y1);
    let area_b = (b.x2 - b.x1) * (b.y2 - b.y1);
    let union = area_a + area_b - inter;
    if union <= 0.0 {
        return 0.0;
    }
    inter / union
}

fn naive_top_class(d: &Detection) -> Option<usize> {
    if d.scores.is_empty() {
        return None;
    }
    let mut best = 0;
    for i in 1..d.scores.len() {
        if d.scores[i] > d.scores[best] {
            best = i;
        }
    }
    Some(best)
}

fn naive_score(d: &Detection, class: usize) -> f64 {
    if class < d.scores.len() {
        d.scores[class]
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Linking oracle
// ---------------------------------------------------------------------------

/// Reference linker: a plain per-frame scan over a vector of tube states.
/// Semantics (matching order, extrapolation, spawning, trimming, errors)
/// mirror `tubes::run_stream` and the result is expected to be identical
/// field for field.
pub fn oracle_link(frames: &[(u64, Vec<Detection>)], cfg: &LinkerConfig) -> Result<Vec<ActionTube>> {
    cfg.validate()?;
    let mut state = NaiveState {
        cfg: cfg.clone(),
        live: Vec::new(),
        done: Vec::new(),
        next_id: 0,
        classes: None,
    };
    let mut expected: Option<u64> = None;
    for (t, dets) in frames {
        if let Some(e) = expected {
            if *t < e {
                return Err(Error::invalid(format!(
                    "frames must arrive in ascending order: got {t} after {}",
                    e - 1
                )));
            }
            for gap in e..*t {
                state.frame(gap, &[])?;
            }
        }
        state.frame(*t, dets)?;
        expected = Some(t + 1);
    }
    for mut tube in state.live {
        naive_trim(&mut tube);
        state.done.push(tube);
    }
    state.done.sort_by_key(|t| t.id);
    Ok(state.done)
}

struct NaiveState {
    cfg: LinkerConfig,
    live: Vec<ActionTube>,
    done: Vec<ActionTube>,
    next_id: u64,
    classes: Option<usize>,
}

fn naive_trim(tube: &mut ActionTube) {
    while tube.frames.last().map(|f| f.extrapolated).unwrap_or(false) {
        tube.frames.pop();
    }
    tube.tau = 0;
}

fn naive_update(tube: &mut ActionTube, scores: &[f64]) {
    for i in 0..scores.len() {
        tube.class_energy[i] += scores[i];
    }
    let mut label = 0;
    for i in 1..tube.class_energy.len() {
        if tube.class_energy[i] > tube.class_energy[label] {
            label = i;
        }
    }
    tube.class_label = label;
    tube.score = tube.class_energy[label] / f64::from(tube.matched_count);
}

fn naive_predict(prev: &BBox, prev2: &BBox, bounds: Option<(f64, f64)>) -> BBox {
    let mut x1 = prev.x1 + (prev.x1 - prev2.x1);
    let mut y1 = prev.y1 + (prev.y1 - prev2.y1);
    let mut x2 = prev.x2 + (prev.x2 - prev2.x2);
    let mut y2 = prev.y2 + (prev.y2 - prev2.y2);
    if let Some((w, h)) = bounds {
        x1 = x1.clamp(0.0, w);
        x2 = x2.clamp(0.0, w);
        y1 = y1.clamp(0.0, h);
        y2 = y2.clamp(0.0, h);
    }
    if x1 > x2 || y1 > y2 {
        *prev
    } else {
        BBox { x1, y1, x2, y2 }
    }
}

impl NaiveState {
    fn frame(&mut self, t: u64, dets: &[Detection]) -> Result<()> {
        for d in dets {
            if d.frame != t {
                return Err(Error::invalid(format!(
                    "detection carries frame {} while linking frame {t}",
                    d.frame
                )));
            }
            if d.scores.is_empty() {
                return Err(Error::invalid(format!("frame {t}: detection has an empty score vector")));
            }
            match self.classes {
                None => self.classes = Some(d.scores.len()),
                Some(c) if c != d.scores.len() => {
                    return Err(Error::invalid(format!(
                        "frame {t}: score vector length {} differs from {c}",
                        d.scores.len()
                    )))
                }
                _ => {}
            }
        }

        let mut used = vec![false; dets.len()];
        let mut order: Vec<usize> = (0..self.live.len()).collect();
        order.sort_by(|&x, &y| {
            self.live[y]
                .score
                .partial_cmp(&self.live[x].score)
                .expect("finite scores")
                .then(self.live[x].id.cmp(&self.live[y].id))
        });
        let mut dead = vec![false; self.live.len()];
        for idx in order {
            let c = self.live[idx].class_label;
            let last = self.live[idx].frames.last().expect("non-empty tube").bbox;
            let mut best_i = usize::MAX;
            let mut best_s = 0.0;
            for i in 0..dets.len() {
                if used[i] {
                    continue;
                }
                if naive_iou(&dets[i].bbox, &last) >= self.cfg.lambda && naive_score(&dets[i], c) > best_s {
                    best_i = i;
                    best_s = naive_score(&dets[i], c);
                }
            }
            let tube = &mut self.live[idx];
            if best_i != usize::MAX {
                used[best_i] = true;
                tube.frames.push(TubeFrame {
                    t,
                    bbox: dets[best_i].bbox,
                    extrapolated: false,
                });
                tube.tau = 0;
                tube.matched_count += 1;
                naive_update(tube, &dets[best_i].scores);
            } else if self.cfg.extrapolate && tube.tau < self.cfg.k {
                let n = tube.frames.len();
                let bbox = if self.cfg.box_pred && n >= 2 {
                    naive_predict(&tube.frames[n - 1].bbox, &tube.frames[n - 2].bbox, self.cfg.bounds)
                } else {
                    tube.frames[n - 1].bbox
                };
                tube.frames.push(TubeFrame { t, bbox, extrapolated: true });
                tube.tau += 1;
            } else {
                dead[idx] = true;
            }
        }

        let mut alive = Vec::new();
        for (i, mut tube) in self.live.drain(..).enumerate() {
            if dead[i] {
                naive_trim(&mut tube);
                self.done.push(tube);
            } else {
                alive.push(tube);
            }
        }
        self.live = alive;

        let Some(classes) = self.classes else {
            return Ok(());
        };
        let free: Vec<usize> = (0..dets.len()).filter(|&i| !used[i]).collect();
        if free.is_empty() {
            return Ok(());
        }
        for c in 0..classes {
            let members: Vec<usize> = free
                .iter()
                .copied()
                .filter(|&i| naive_top_class(&dets[i]) == Some(c))
                .collect();
            if members.is_empty() {
                continue;
            }
            // Quadratic NMS over the class members.
            let mut rank: Vec<usize> = (0..members.len()).collect();
            rank.sort_by(|&x, &y| {
                naive_score(&dets[members[y]], c)
                    .partial_cmp(&naive_score(&dets[members[x]], c))
                    .expect("finite scores")
            });
            let mut gone = vec![false; members.len()];
            let mut kept: Vec<usize> = Vec::new();
            for ri in rank {
                if kept.len() >= self.cfg.n {
                    break;
                }
                if gone[ri] {
                    continue;
                }
                for rj in 0..members.len() {
                    if !gone[rj]
                        && naive_iou(&dets[members[ri]].bbox, &dets[members[rj]].bbox) > self.cfg.nms_iou
                    {
                        gone[rj] = true;
                    }
                }
                kept.push(ri);
            }
            for ri in kept {
                let d = &dets[members[ri]];
                if naive_score(d, c) < self.cfg.spawn_floor {
                    continue;
                }
                let mut tube = ActionTube {
                    id: self.next_id,
                    class_label: c,
                    score: 0.0,
                    class_energy: vec![0.0; d.scores.len()],
                    frames: vec![TubeFrame { t, bbox: d.bbox, extrapolated: false }],
                    tau: 0,
                    matched_count: 1,
                };
                naive_update(&mut tube, &d.scores);
                self.next_id += 1;
                self.live.push(tube);
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// AP oracles
// ---------------------------------------------------------------------------

fn naive_area(points: &[(f64, f64)]) -> f64 {
    let mut ap = 0.0;
    let mut envelope = 0.0;
    let mut i = points.len();
    while i > 0 {
        i -= 1;
        if points[i].1 > envelope {
            envelope = points[i].1;
        }
        let prev = if i == 0 { 0.0 } else { points[i - 1].0 };
        ap += (points[i].0 - prev) * envelope;
    }
    ap
}

fn naive_curve(outcomes: &[bool], npos: usize) -> f64 {
    let mut points = Vec::new();
    let mut tp = 0usize;
    let mut fp = 0usize;
    for &hit in outcomes {
        if hit {
            tp += 1;
        } else {
            fp += 1;
        }
        points.push((tp as f64 / npos as f64, tp as f64 / (tp + fp) as f64));
    }
    naive_area(&points)
}

/// Reference frame-level AP: flat vectors, no indexing structures.
pub fn oracle_frame_ap(
    preds: &[VideoDetections],
    gt: &GroundTruth,
    class: usize,
    thresh: f64,
) -> Result<f64> {
    if !(thresh > 0.0 && thresh <= 1.0) {
        return Err(Error::invalid(format!("iou threshold must lie in (0, 1], got {thresh}")));
    }
    if class >= gt.classes() {
        return Err(Error::invalid(format!(
            "unknown class {class}: ground truth has {} classes",
            gt.classes()
        )));
    }
    // Every ground-truth box of the class: (video, frame, bbox, matched).
    let mut boxes: Vec<(String, u64, BBox, bool)> = Vec::new();
    for (video, tubes) in gt.videos() {
        for tube in tubes {
            if tube.class != class {
                continue;
            }
            for &(t, bbox) in &tube.frames {
                boxes.push((video.clone(), t, bbox, false));
            }
        }
    }
    if boxes.is_empty() {
        return Err(Error::invalid(format!("class {class} has no ground-truth instances")));
    }
    let npos = boxes.len();

    let mut cands: Vec<(f64, usize, u64, usize)> = Vec::new();
    for (vi, vd) in preds.iter().enumerate() {
        for (di, d) in vd.dets.iter().enumerate() {
            let s = naive_score(d, class);
            if s > 0.0 {
                cands.push((s, vi, d.frame, di));
            }
        }
    }
    cands.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("finite scores")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
    });

    let mut outcomes = Vec::with_capacity(cands.len());
    for &(_, vi, frame, di) in &cands {
        let d = &preds[vi].dets[di];
        let mut best = usize::MAX;
        let mut best_iou = 0.0;
        for (gi, g) in boxes.iter().enumerate() {
            if g.3 || g.0 != preds[vi].video || g.1 != frame {
                continue;
            }
            let ov = naive_iou(&d.bbox, &g.2);
            if ov > best_iou {
                best_iou = ov;
                best = gi;
            }
        }
        let hit = best_iou >= thresh && best != usize::MAX;
        if hit {
            boxes[best].3 = true;
        }
        outcomes.push(hit);
    }
    Ok(naive_curve(&outcomes, npos))
}

fn naive_tube_iou(a: &[(u64, BBox)], b: &[(u64, BBox)]) -> f64 {
    let mut inter = 0usize;
    let mut spatial = 0.0;
    for &(ta, ba) in a {
        for &(tb, bb) in b {
            if ta == tb {
                inter += 1;
                spatial += naive_iou(&ba, &bb);
            }
        }
    }
    if inter == 0 {
        return 0.0;
    }
    let union = a.len() + b.len() - inter;
    let temporal = inter as f64 / union as f64;
    let mean_spatial = spatial / inter as f64;
    temporal * mean_spatial
}

/// Reference video-level AP over spatio-temporal tubes.
pub fn oracle_video_ap(
    preds: &[VideoTubes],
    gt: &GroundTruth,
    class: usize,
    thresh: f64,
) -> Result<f64> {
    if !(thresh > 0.0 && thresh <= 1.0) {
        return Err(Error::invalid(format!("iou threshold must lie in (0, 1], got {thresh}")));
    }
    if class >= gt.classes() {
        return Err(Error::invalid(format!(
            "unknown class {class}: ground truth has {} classes",
            gt.classes()
        )));
    }
    let mut gt_tubes: Vec<(String, Vec<(u64, BBox)>, bool)> = Vec::new();
    for (video, tubes) in gt.videos() {
        for tube in tubes {
            if tube.class == class {
                gt_tubes.push((video.clone(), tube.frames.clone(), false));
            }
        }
    }
    if gt_tubes.is_empty() {
        return Err(Error::invalid(format!("class {class} has no ground-truth instances")));
    }
    let npos = gt_tubes.len();

    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    for (vi, vt) in preds.iter().enumerate() {
        for (ti, tube) in vt.tubes.iter().enumerate() {
            if tube.class == class {
                cands.push((tube.score, vi, ti));
            }
        }
    }
    cands.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("finite scores")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut outcomes = Vec::with_capacity(cands.len());
    for &(_, vi, ti) in &cands {
        let tube = &preds[vi].tubes[ti];
        let mut best = usize::MAX;
        let mut best_iou = 0.0;
        for (gi, g) in gt_tubes.iter().enumerate() {
            if g.2 || g.0 != preds[vi].video {
                continue;
            }
            let ov = naive_tube_iou(&tube.frames, &g.1);
            if ov > best_iou {
                best_iou = ov;
                best = gi;
            }
        }
        let hit = best_iou >= thresh && best != usize::MAX;
        if hit {
            gt_tubes[best].2 = true;
        }
        outcomes.push(hit);
    }
    Ok(naive_curve(&outcomes, npos))
}

/// Reference metric block mirroring `eval::map_suite`.
pub fn oracle_map_suite(
    preds: &[VideoDetections],
    tubes: &[VideoTubes],
    gt: &GroundTruth,
) -> Result<[f64; 5]> {
    let mut classes: Vec<usize> = Vec::new();
    for c in 0..gt.classes() {
        let present = gt
            .videos()
            .values()
            .any(|ts| ts.iter().any(|t| t.class == c));
        if present {
            classes.push(c);
        }
    }
    if classes.is_empty() {
        return Ok([0.0; 5]);
    }
    let mean = |vals: &[f64]| vals.iter().sum::<f64>() / vals.len() as f64;
    let mut f_aps = Vec::new();
    for &c in &classes {
        f_aps.push(oracle_frame_ap(preds, gt, c, 0.5)?);
    }
    let v_map = |thresh: f64| -> Result<f64> {
        let mut sum = 0.0;
        for &c in &classes {
            sum += oracle_video_ap(tubes, gt, c, thresh)?;
        }
        Ok(sum / classes.len() as f64)
    };
    let mut strict = 0.0;
    let mut count = 0usize;
    for pct in (50..=95).step_by(5) {
        strict += v_map(pct as f64 / 100.0)?;
        count += 1;
    }
    Ok([
        mean(&f_aps),
        v_map(0.2)?,
        v_map(0.5)?,
        v_map(0.75)?,
        strict / count as f64,
    ])
}

// ---------------------------------------------------------------------------
// SSIM oracle
// ---------------------------------------------------------------------------

/// Direct windowed SSIM: for every output pixel, gathers the full window
/// from edge-replicated planes and computes the statistics by plain
/// summation. O(pixels * window^2); used only on small inputs.
pub fn oracle_ssim_map(a: &Frame, b: &Frame, params: &SsimParams) -> Result<TemporalMap> {
    if a.shape() != b.shape() {
        return Err(Error::invalid("frames must share a shape"));
    }
    let (w, h, ch) = a.shape();
    let r = (params.window() / 2) as i64;
    let n = (params.window() * params.window()) as f64;
    let (c1, c2) = (params.c1(), params.c2());
    let mut data = vec![0.0; w * h * ch];
    for c in 0..ch {
        let pa = a.plane(c);
        let pb = b.plane(c);
        let clamp = |v: i64, len: usize| -> usize { v.max(0).min(len as i64 - 1) as usize };
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let mut sa = 0.0;
                let mut sb = 0.0;
                let mut saa = 0.0;
                let mut sbb = 0.0;
                let mut sab = 0.0;
                for wy in -r..=r {
                    for wx in -r..=r {
                        let sx = clamp(x + wx, w);
                        let sy = clamp(y + wy, h);
                        let va = pa[sy * w + sx];
                        let vb = pb[sy * w + sx];
                        sa += va;
                        sb += vb;
                        saa += va * va;
                        sbb += vb * vb;
                        sab += va * vb;
                    }
                }
                let mu_a = sa / n;
                let mu_b = sb / n;
                let var_a = (saa - sa * mu_a) / (n - 1.0);
                let var_b = (sbb - sb * mu_b) / (n - 1.0);
                let cov = (sab - sa * mu_b) / (n - 1.0);
                let num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
                let den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
                data[c * w * h + (y as usize) * w + x as usize] = (num / den).clamp(-1.0, 1.0);
            }
        }
    }
    Ok(TemporalMap::from_parts(w, h, ch, data))
}

// ---------------------------------------------------------------------------
// Decode oracle
// ---------------------------------------------------------------------------

/// Exhaustive heatmap decode: every cell is tested against its full 3x3
/// neighbourhood with explicit loops; expected to agree exactly with
/// `detect::decode_heatmaps`.
pub fn oracle_decode(h: &HeatmapSet, frame: u64, cfg: &DecodeConfig) -> Vec<Detection> {
    let r = h.down_ratio() as f64;
    let w_max = h.input_width() as f64;
    let h_max = h.input_height() as f64;
    let mut out = Vec::new();
    for c in 0..h.classes() {
        let mut peaks: Vec<(f64, usize, usize)> = Vec::new();
        for j in 0..h.grid_h() {
            for i in 0..h.grid_w() {
                let v = h.center_at(c, i, j);
                if v < cfg.score_floor {
                    continue;
                }
                let mut wins = true;
                for (di, dj) in [
                    (-1i64, -1i64),
                    (0, -1),
                    (1, -1),
                    (-1, 0),
                    (1, 0),
                    (-1, 1),
                    (0, 1),
                    (1, 1),
                ] {
                    let ni = i as i64 + di;
                    let nj = j as i64 + dj;
                    if ni < 0 || nj < 0 || ni >= h.grid_w() as i64 || nj >= h.grid_h() as i64 {
                        continue;
                    }
                    let nv = h.center_at(c, ni as usize, nj as usize);
                    if nv > v {
                        wins = false;
                    }
                    // An equal neighbour earlier in row-major order owns the
                    // plateau.
                    if nv == v && (dj < 0 || (dj == 0 && di < 0)) {
                        wins = false;
                    }
                }
                if wins {
                    peaks.push((v, i, j));
                }
            }
        }
        peaks.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite scores"));
        peaks.truncate(cfg.max_per_class);
        for (v, i, j) in peaks {
            let (dx, dy) = h.offset_at(i, j);
            let (bw, bh) = h.size_at(i, j);
            let cx = (i as f64 + dx) * r;
            let cy = (j as f64 + dy) * r;
            let bbox = BBox {
                x1: (cx - bw / 2.0).clamp(0.0, w_max),
                y1: (cy - bh / 2.0).clamp(0.0, h_max),
                x2: (cx + bw / 2.0).clamp(0.0, w_max),
                y2: (cy + bh / 2.0).clamp(0.0, h_max),
            };
            let scores = if cfg.dense_scores {
                (0..h.classes()).map(|cc| h.center_at(cc, i, j)).collect()
            } else {
                let mut s = vec![0.0; h.classes()];
                s[c] = v;
                s
            };
            out.push(Detection::new(frame, bbox, scores));
        }
    }
    out
}
