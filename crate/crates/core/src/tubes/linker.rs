//! The tube-linking state machine.

use crate::detect::{iou, nms, BBox, Detection};
use crate::error::{Error, Result};

/// One frame of a tube: the box at frame `t` and whether it came from a real
/// detection or from extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeFrame {
    pub t: u64,
    pub bbox: BBox,
    pub extrapolated: bool,
}

/// A temporally contiguous sequence of boxes sharing one action class.
///
/// `class_energy` accumulates the score vectors of matched detections;
/// `class_label` is always its argmax (ties: lowest index) and `score` the
/// mean matched-detection score of the winning class.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionTube {
    pub id: u64,
    pub class_label: usize,
    pub score: f64,
    pub class_energy: Vec<f64>,
    pub frames: Vec<TubeFrame>,
    /// Consecutive extrapolated frames since the last real match.
    pub tau: u32,
    /// Number of matched (non-extrapolated) detections.
    pub matched_count: u32,
}

impl ActionTube {
    /// First frame index; tubes always hold at least one frame.
    pub fn start(&self) -> u64 {
        self.frames.first().expect("tubes are never empty").t
    }

    /// Last frame index.
    pub fn end(&self) -> u64 {
        self.frames.last().expect("tubes are never empty").t
    }

    fn last_bbox(&self) -> BBox {
        self.frames.last().expect("tubes are never empty").bbox
    }

    /// Drops trailing extrapolated frames so the tube ends on a real match.
    fn trim_trailing_extrapolation(&mut self) {
        while self.frames.last().is_some_and(|f| f.extrapolated) {
            self.frames.pop();
        }
        self.tau = 0;
    }
}

/// Linker parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkerConfig {
    /// Minimum IoU between a detection and a tube's last box for a match.
    pub lambda: f64,
    /// Maximum consecutive extrapolated frames before termination.
    pub k: u32,
    /// Maximum new tubes per class per frame.
    pub n: usize,
    /// EXPLT: bridge missed detections with extrapolated boxes.
    pub extrapolate: bool,
    /// BOXP: extrapolate with constant-velocity prediction instead of
    /// holding the last box.
    pub box_pred: bool,
    /// Minimum class score for a detection to spawn a tube.
    pub spawn_floor: f64,
    /// IoU threshold for the per-class NMS applied before spawning.
    pub nms_iou: f64,
    /// Frame `(width, height)` used to clamp predicted boxes; `None` leaves
    /// predictions unclamped.
    pub bounds: Option<(f64, f64)>,
}

impl Default for LinkerConfig {
    fn default() -> Self {
        LinkerConfig {
            lambda: 0.5,
            k: 5,
            n: 10,
            extrapolate: true,
            box_pred: false,
            spawn_floor: 0.05,
            nms_iou: 0.45,
            bounds: None,
        }
    }
}

impl LinkerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::invalid(format!("lambda must lie in [0, 1], got {}", self.lambda)));
        }
        if self.n == 0 {
            return Err(Error::invalid("n (new tubes per class) must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.spawn_floor) {
            return Err(Error::invalid(format!(
                "spawn floor must lie in [0, 1], got {}",
                self.spawn_floor
            )));
        }
        if !(0.0..=1.0).contains(&self.nms_iou) {
            return Err(Error::invalid(format!("nms iou must lie in [0, 1], got {}", self.nms_iou)));
        }
        if let Some((w, h)) = self.bounds {
            if !(w > 0.0) || !(h > 0.0) {
                return Err(Error::invalid(format!("bounds must be positive, got ({w}, {h})")));
            }
        }
        Ok(())
    }
}

/// Constant-velocity box prediction: each corner moves by its last step,
/// `b = b_prev + (b_prev - b_prev2)`, clamped to `bounds` when given. A
/// degenerate result (corners out of order after clamping) falls back to
/// `b_prev`.
pub fn predict_bbox(b_prev: &BBox, b_prev2: &BBox, bounds: Option<(f64, f64)>) -> BBox {
    let mut b = BBox {
        x1: b_prev.x1 + (b_prev.x1 - b_prev2.x1),
        y1: b_prev.y1 + (b_prev.y1 - b_prev2.y1),
        x2: b_prev.x2 + (b_prev.x2 - b_prev2.x2),
        y2: b_prev.y2 + (b_prev.y2 - b_prev2.y2),
    };
    if let Some((w, h)) = bounds {
        b.x1 = b.x1.clamp(0.0, w);
        b.x2 = b.x2.clamp(0.0, w);
        b.y1 = b.y1.clamp(0.0, h);
        b.y2 = b.y2.clamp(0.0, h);
    }
    if b.x1 > b.x2 || b.y1 > b.y2 {
        *b_prev
    } else {
        b
    }
}

/// Folds one matched detection's scores into the tube: adds them to the
/// class energy, relabels to the energy argmax (ties: lowest index), and
/// recomputes the tube score as the winning class's mean matched score.
/// `matched_count` must already include this detection.
///
/// Returns the updated `(score, class)`.
pub fn update_label(tube: &mut ActionTube, det_scores: &[f64]) -> Result<(f64, usize)> {
    if det_scores.len() != tube.class_energy.len() {
        return Err(Error::invalid(format!(
            "score vector length {} does not match class count {}",
            det_scores.len(),
            tube.class_energy.len()
        )));
    }
    if tube.matched_count == 0 {
        return Err(Error::invalid("update_label requires matched_count >= 1"));
    }
    for (e, s) in tube.class_energy.iter_mut().zip(det_scores) {
        *e += s;
    }
    let mut label = 0;
    for (i, &e) in tube.class_energy.iter().enumerate() {
        if e > tube.class_energy[label] {
            label = i;
        }
    }
    tube.class_label = label;
    tube.score = tube.class_energy[label] / f64::from(tube.matched_count);
    Ok((tube.score, label))
}

/// Sequential online linker; feed frames in strictly ascending order via
/// [`TubeLinker::step`].
#[derive(Debug)]
pub struct TubeLinker {
    cfg: LinkerConfig,
    live: Vec<ActionTube>,
    finished: Vec<ActionTube>,
    next_id: u64,
    next_frame: Option<u64>,
    classes: Option<usize>,
}

impl TubeLinker {
    pub fn new(cfg: LinkerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(TubeLinker {
            cfg,
            live: Vec::new(),
            finished: Vec::new(),
            next_id: 0,
            next_frame: None,
            classes: None,
        })
    }

    pub fn config(&self) -> &LinkerConfig {
        &self.cfg
    }

    /// Tubes still open for matching.
    pub fn live(&self) -> &[ActionTube] {
        &self.live
    }

    /// The full tube state after the last processed frame: terminated tubes
    /// (already trimmed) plus live tubes as they currently stand, by id.
    pub fn snapshot(&self) -> Vec<ActionTube> {
        let mut all: Vec<ActionTube> = self.finished.iter().chain(self.live.iter()).cloned().collect();
        all.sort_by_key(|t| t.id);
        all
    }

    /// Consumes the linker, closing live tubes: trailing extrapolated frames
    /// are trimmed so every emitted tube ends on a matched detection.
    pub fn into_tubes(mut self) -> Vec<ActionTube> {
        for mut tube in self.live.drain(..) {
            tube.trim_trailing_extrapolation();
            self.finished.push(tube);
        }
        self.finished.sort_by_key(|t| t.id);
        self.finished
    }

    /// Processes frame `t`. Frames must arrive in ascending order; skipped
    /// indices are treated as frames with no detections.
    pub fn step(&mut self, t: u64, dets: &[Detection]) -> Result<()> {
        if let Some(expected) = self.next_frame {
            if t < expected {
                return Err(Error::invalid(format!(
                    "frames must arrive in ascending order: got {t} after {}",
                    expected - 1
                )));
            }
            for gap in expected..t {
                self.step_consecutive(gap, &[])?;
            }
        }
        self.step_consecutive(t, dets)?;
        self.next_frame = Some(t + 1);
        Ok(())
    }

    fn check_dets(&mut self, t: u64, dets: &[Detection]) -> Result<()> {
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
        Ok(())
    }

    fn step_consecutive(&mut self, t: u64, dets: &[Detection]) -> Result<()> {
        self.check_dets(t, dets)?;
        let mut consumed = vec![false; dets.len()];

        // Match tubes in descending score order (ties: older id first).
        let mut order: Vec<usize> = (0..self.live.len()).collect();
        order.sort_by(|&a, &b| {
            let ta = &self.live[a];
            let tb = &self.live[b];
            tb.score
                .partial_cmp(&ta.score)
                .expect("tube scores are finite")
                .then(ta.id.cmp(&tb.id))
        });

        let mut terminated = vec![false; self.live.len()];
        for idx in order {
            let tube = &self.live[idx];
            let c = tube.class_label;
            let last = tube.last_bbox();
            let mut best: Option<usize> = None;
            let mut best_score = 0.0;
            for (i, d) in dets.iter().enumerate() {
                if consumed[i] {
                    continue;
                }
                if iou(&d.bbox, &last) >= self.cfg.lambda && d.score(c) > best_score {
                    best = Some(i);
                    best_score = d.score(c);
                }
            }
            let tube = &mut self.live[idx];
            match best {
                Some(i) => {
                    consumed[i] = true;
                    tube.frames.push(TubeFrame {
                        t,
                        bbox: dets[i].bbox,
                        extrapolated: false,
                    });
                    tube.tau = 0;
                    tube.matched_count += 1;
                    update_label(tube, &dets[i].scores)?;
                }
                None if self.cfg.extrapolate && tube.tau < self.cfg.k => {
                    let bbox = if self.cfg.box_pred && tube.frames.len() >= 2 {
                        let prev = tube.frames[tube.frames.len() - 1].bbox;
                        let prev2 = tube.frames[tube.frames.len() - 2].bbox;
                        predict_bbox(&prev, &prev2, self.cfg.bounds)
                    } else {
                        tube.last_bbox()
                    };
                    tube.frames.push(TubeFrame {
                        t,
                        bbox,
                        extrapolated: true,
                    });
                    tube.tau += 1;
                }
                None => terminated[idx] = true,
            }
        }

        // Retire terminated tubes, trimmed back to their last real match.
        if terminated.iter().any(|&d| d) {
            let mut still_live = Vec::with_capacity(self.live.len());
            for (i, mut tube) in self.live.drain(..).enumerate() {
                if terminated[i] {
                    tube.trim_trailing_extrapolation();
                    self.finished.push(tube);
                } else {
                    still_live.push(tube);
                }
            }
            self.live = still_live;
        }

        self.spawn(t, dets, &consumed);
        Ok(())
    }

    /// Spawns tubes from unconsumed detections: detections are grouped by
    /// their top-scoring class, reduced by per-class NMS to at most `n`, and
    /// filtered by the spawn floor. Ids grow monotonically in spawn order.
    fn spawn(&mut self, t: u64, dets: &[Detection], consumed: &[bool]) {
        let Some(classes) = self.classes else {
            return;
        };
        let unassigned: Vec<&Detection> = dets
            .iter()
            .zip(consumed)
            .filter(|(_, c)| !**c)
            .map(|(d, _)| d)
            .collect();
        if unassigned.is_empty() {
            return;
        }
        for c in 0..classes {
            let pool: Vec<Detection> = unassigned
                .iter()
                .filter(|d| d.top_class() == Some(c))
                .map(|d| (*d).clone())
                .collect();
            if pool.is_empty() {
                continue;
            }
            for d in nms(&pool, c, self.cfg.nms_iou, self.cfg.n) {
                if d.score(c) < self.cfg.spawn_floor {
                    continue;
                }
                let mut tube = ActionTube {
                    id: self.next_id,
                    class_label: c,
                    score: 0.0,
                    class_energy: vec![0.0; d.scores.len()],
                    frames: vec![TubeFrame {
                        t,
                        bbox: d.bbox,
                        extrapolated: false,
                    }],
                    tau: 0,
                    matched_count: 1,
                };
                update_label(&mut tube, &d.scores).expect("matching lengths by construction");
                self.next_id += 1;
                self.live.push(tube);
            }
        }
    }
}

/// Runs a whole detection stream through a fresh linker and returns every
/// tube (live tubes closed and trimmed), ordered by id.
pub fn run_stream<I>(frames: I, cfg: &LinkerConfig) -> Result<Vec<ActionTube>>
where
    I: IntoIterator<Item = (u64, Vec<Detection>)>,
{
    let mut linker = TubeLinker::new(cfg.clone())?;
    for (t, dets) in frames {
        linker.step(t, &dets)?;
    }
    Ok(linker.into_tubes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn det(t: u64, bbox: (f64, f64, f64, f64), scores: &[f64]) -> Detection {
        Detection::new(
            t,
            BBox::new(bbox.0, bbox.1, bbox.2, bbox.3).unwrap(),
            scores.to_vec(),
        )
    }

    fn one_class_stream(boxes: &[Option<(f64, f64, f64, f64)>]) -> Vec<(u64, Vec<Detection>)> {
        boxes
            .iter()
            .enumerate()
            .map(|(t, b)| {
                let dets = b.map(|bb| vec![det(t as u64, bb, &[0.9])]).unwrap_or_default();
                (t as u64, dets)
            })
            .collect()
    }

    #[test]
    fn greedy_match_consumes_best_overlapping_detection() {
        let cfg = LinkerConfig::default();
        let mut linker = TubeLinker::new(cfg).unwrap();
        linker
            .step(0, &[det(0, (0.0, 0.0, 10.0, 10.0), &[0.8, 0.0])])
            .unwrap();
        // D1 overlaps the tube (IoU ~= 0.681 >= 0.5); D2 is disjoint and
        // spawns a second tube.
        linker
            .step(
                1,
                &[
                    det(1, (1.0, 1.0, 11.0, 11.0), &[0.8, 0.0]),
                    det(1, (20.0, 20.0, 30.0, 30.0), &[0.9, 0.0]),
                ],
            )
            .unwrap();
        let tubes = linker.snapshot();
        assert_eq!(tubes.len(), 2);
        assert_eq!(tubes[0].frames.len(), 2);
        assert_eq!(tubes[0].frames[1].bbox.x1, 1.0);
        assert_eq!(tubes[1].frames.len(), 1);
        assert_eq!(tubes[1].frames[0].bbox.x1, 20.0);
    }

    #[test]
    fn missed_frame_extrapolates_by_holding_the_box() {
        let cfg = LinkerConfig {
            k: 5,
            box_pred: false,
            ..LinkerConfig::default()
        };
        let mut linker = TubeLinker::new(cfg).unwrap();
        linker.step(0, &[det(0, (0.0, 0.0, 10.0, 10.0), &[0.9])]).unwrap();
        linker.step(1, &[]).unwrap();
        let live = linker.live();
        assert_eq!(live.len(), 1);
        assert_eq!(live[0].tau, 1);
        let f = live[0].frames.last().unwrap();
        assert!(f.extrapolated);
        assert_eq!(f.bbox, BBox::new(0.0, 0.0, 10.0, 10.0).unwrap());
    }

    #[test]
    fn tube_survives_exactly_k_extrapolated_frames() {
        let cfg = LinkerConfig {
            k: 3,
            ..LinkerConfig::default()
        };
        let mut linker = TubeLinker::new(cfg).unwrap();
        linker.step(0, &[det(0, (0.0, 0.0, 10.0, 10.0), &[0.9])]).unwrap();
        for t in 1..=3 {
            linker.step(t, &[]).unwrap();
            assert_eq!(linker.live().len(), 1, "still alive at miss {t}");
            assert_eq!(linker.live()[0].tau, t as u32);
        }
        // Fourth consecutive miss exhausts k = 3.
        linker.step(4, &[]).unwrap();
        assert!(linker.live().is_empty());
        let tubes = linker.into_tubes();
        assert_eq!(tubes.len(), 1);
        // Trailing extrapolated frames are trimmed.
        assert_eq!(tubes[0].frames.len(), 1);
        assert!(!tubes[0].frames[0].extrapolated);
    }

    #[test]
    fn explt_off_terminates_on_first_miss() {
        let cfg = LinkerConfig {
            extrapolate: false,
            ..LinkerConfig::default()
        };
        let stream = one_class_stream(&[
            Some((0.0, 0.0, 10.0, 10.0)),
            None,
            Some((0.0, 0.0, 10.0, 10.0)),
        ]);
        let tubes = run_stream(stream, &cfg).unwrap();
        assert_eq!(tubes.len(), 2);
        assert_eq!(tubes[0].frames.len(), 1);
        assert_eq!(tubes[1].frames.len(), 1);
    }

    #[test]
    fn gap_within_k_is_bridged_into_one_tube() {
        let cfg = LinkerConfig {
            k: 5,
            ..LinkerConfig::default()
        };
        let stream = one_class_stream(&[
            Some((0.0, 0.0, 10.0, 10.0)),
            None,
            None,
            None,
            Some((0.0, 0.0, 10.0, 10.0)),
            Some((0.0, 0.0, 10.0, 10.0)),
        ]);
        let tubes = run_stream(stream, &cfg).unwrap();
        assert_eq!(tubes.len(), 1);
        let tube = &tubes[0];
        assert_eq!(tube.frames.len(), 6);
        let flags: Vec<bool> = tube.frames.iter().map(|f| f.extrapolated).collect();
        assert_eq!(flags, [false, true, true, true, false, false]);
        // Frame indices are consecutive.
        for (i, f) in tube.frames.iter().enumerate() {
            assert_eq!(f.t, i as u64);
        }
        assert_eq!(tube.matched_count, 3);
    }

    #[test]
    fn gap_beyond_k_fragments_into_two_tubes() {
        let cfg = LinkerConfig {
            k: 2,
            ..LinkerConfig::default()
        };
        let stream = one_class_stream(&[
            Some((0.0, 0.0, 10.0, 10.0)),
            None,
            None,
            None,
            Some((0.0, 0.0, 10.0, 10.0)),
        ]);
        let tubes = run_stream(stream, &cfg).unwrap();
        assert_eq!(tubes.len(), 2);
    }

    #[test]
    fn prediction_is_constant_velocity_with_fallbacks() {
        let b2 = BBox::new(0.0, 0.0, 10.0, 10.0).unwrap();
        let b1 = BBox::new(5.0, 0.0, 15.0, 10.0).unwrap();
        assert_eq!(predict_bbox(&b1, &b2, None), BBox::new(10.0, 0.0, 20.0, 10.0).unwrap());
        // Zero velocity holds the box.
        assert_eq!(predict_bbox(&b1, &b1, None), b1);
        // Clamped to bounds.
        let clamped = predict_bbox(&b1, &b2, Some((18.0, 10.0)));
        assert_eq!(clamped, BBox::new(10.0, 0.0, 18.0, 10.0).unwrap());
        // Degenerate after clamping falls back to the previous box.
        let far2 = BBox::new(0.0, 0.0, 4.0, 4.0).unwrap();
        let far1 = BBox::new(40.0, 0.0, 44.0, 4.0).unwrap();
        let fallback = predict_bbox(&far1, &far2, Some((50.0, 50.0)));
        // Prediction would start at x1 = 80 > 50; x1 clamps to 50, x2 to 50:
        // still a valid (degenerate-width) box, so it is kept.
        assert_eq!(fallback, BBox::new(50.0, 0.0, 50.0, 4.0).unwrap());
    }

    #[test]
    fn box_prediction_tracks_moving_tubes_through_misses() {
        let cfg = LinkerConfig {
            lambda: 0.3,
            box_pred: true,
            bounds: Some((100.0, 100.0)),
            ..LinkerConfig::default()
        };
        let mut linker = TubeLinker::new(cfg).unwrap();
        linker.step(0, &[det(0, (0.0, 0.0, 10.0, 10.0), &[0.9])]).unwrap();
        linker.step(1, &[det(1, (5.0, 0.0, 15.0, 10.0), &[0.9])]).unwrap();
        linker.step(2, &[]).unwrap();
        let f = *linker.live()[0].frames.last().unwrap();
        assert!(f.extrapolated);
        assert_eq!(f.bbox, BBox::new(10.0, 0.0, 20.0, 10.0).unwrap());
        // A second miss extrapolates from the predicted box.
        linker.step(3, &[]).unwrap();
        let f = *linker.live()[0].frames.last().unwrap();
        assert_eq!(f.bbox, BBox::new(15.0, 0.0, 25.0, 10.0).unwrap());
    }

    #[test]
    fn update_label_accumulates_energy_and_relabels() {
        let mut tube = ActionTube {
            id: 0,
            class_label: 0,
            score: 0.0,
            class_energy: vec![0.0, 0.0],
            frames: vec![TubeFrame {
                t: 0,
                bbox: BBox::new(0.0, 0.0, 1.0, 1.0).unwrap(),
                extrapolated: false,
            }],
            tau: 0,
            matched_count: 1,
        };
        let (score, class) = update_label(&mut tube, &[0.1, 0.9]).unwrap();
        assert_eq!(class, 1);
        assert_eq!(score, 0.9);

        // Second detection flips the label back to class 0.
        tube.class_energy = vec![0.9, 0.1];
        tube.class_label = 0;
        tube.matched_count = 2;
        let (score, class) = update_label(&mut tube, &[0.2, 0.8]).unwrap();
        assert_eq!(class, 0);
        assert_abs_diff_eq!(tube.class_energy[0], 1.1, epsilon = 1e-15);
        assert_abs_diff_eq!(tube.class_energy[1], 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(score, 0.55, epsilon = 1e-15);

        // Ties resolve to the lowest class index.
        let mut even = ActionTube {
            class_energy: vec![0.0, 0.0],
            matched_count: 1,
            ..tube.clone()
        };
        let (_, class) = update_label(&mut even, &[0.5, 0.5]).unwrap();
        assert_eq!(class, 0);

        assert!(update_label(&mut even, &[0.5]).is_err());
    }

    #[test]
    fn spawn_applies_nms_and_floor() {
        let cfg = LinkerConfig {
            n: 10,
            spawn_floor: 0.3,
            ..LinkerConfig::default()
        };
        let mut linker = TubeLinker::new(cfg).unwrap();
        let identical: Vec<Detection> = (0..5)
            .map(|i| det(0, (0.0, 0.0, 10.0, 10.0), &[0.9 - 0.1 * f64::from(i)]))
            .collect();
        linker.step(0, &identical).unwrap();
        // Five overlapping detections collapse to one tube.
        assert_eq!(linker.live().len(), 1);
        assert_eq!(linker.live()[0].score, 0.9);

        // A detection below the floor never spawns.
        linker.step(1, &[det(1, (50.0, 50.0, 60.0, 60.0), &[0.2])]).unwrap();
        assert_eq!(
            linker.live().iter().filter(|t| t.frames[0].t == 1).count(),
            0
        );
    }

    #[test]
    fn spawn_caps_new_tubes_per_class() {
        let cfg = LinkerConfig {
            n: 3,
            ..LinkerConfig::default()
        };
        let mut linker = TubeLinker::new(cfg).unwrap();
        let spread: Vec<Detection> = (0..6)
            .map(|i| {
                let x = f64::from(i) * 20.0;
                det(0, (x, 0.0, x + 10.0, 10.0), &[0.5])
            })
            .collect();
        linker.step(0, &spread).unwrap();
        assert_eq!(linker.live().len(), 3);
    }

    #[test]
    fn higher_scoring_tube_picks_first() {
        // Two tubes of the same class overlap one detection; the higher
        // scoring tube consumes it, the other extrapolates.
        let cfg = LinkerConfig {
            lambda: 0.3,
            nms_iou: 0.9,
            ..LinkerConfig::default()
        };
        let mut linker = TubeLinker::new(cfg).unwrap();
        linker
            .step(
                0,
                &[
                    det(0, (0.0, 0.0, 10.0, 10.0), &[0.6]),
                    det(0, (2.0, 0.0, 12.0, 10.0), &[0.9]),
                ],
            )
            .unwrap();
        assert_eq!(linker.live().len(), 2);
        linker.step(1, &[det(1, (1.0, 0.0, 11.0, 10.0), &[0.7])]).unwrap();
        let tubes = linker.snapshot();
        // Spawn hands out ids in descending detection score, so tube 0 is the
        // 0.9-score tube: it consumes the detection and tube 1 extrapolates.
        let t0 = tubes.iter().find(|t| t.id == 0).unwrap();
        let t1 = tubes.iter().find(|t| t.id == 1).unwrap();
        assert!(!t0.frames.last().unwrap().extrapolated);
        assert_eq!(t0.matched_count, 2);
        assert!(t1.frames.last().unwrap().extrapolated);
    }

    #[test]
    fn out_of_order_and_mismatched_frames_error() {
        let mut linker = TubeLinker::new(LinkerConfig::default()).unwrap();
        linker.step(3, &[]).unwrap();
        assert!(linker.step(2, &[]).is_err());
        assert!(linker.step(3, &[]).is_err());
        let mut fresh = TubeLinker::new(LinkerConfig::default()).unwrap();
        assert!(fresh.step(0, &[det(5, (0.0, 0.0, 1.0, 1.0), &[0.5])]).is_err());
    }

    #[test]
    fn skipped_frames_count_as_empty() {
        let cfg = LinkerConfig {
            k: 1,
            ..LinkerConfig::default()
        };
        let mut linker = TubeLinker::new(cfg).unwrap();
        linker.step(0, &[det(0, (0.0, 0.0, 10.0, 10.0), &[0.9])]).unwrap();
        // Jumping to frame 3 implies two empty frames; k = 1 kills the tube.
        linker.step(3, &[det(3, (0.0, 0.0, 10.0, 10.0), &[0.9])]).unwrap();
        assert_eq!(linker.snapshot().len(), 2);
    }

    #[test]
    fn zero_score_detections_never_match() {
        // The matching condition requires a strictly positive class score.
        let cfg = LinkerConfig {
            lambda: 0.1,
            spawn_floor: 0.0,
            ..LinkerConfig::default()
        };
        let mut linker = TubeLinker::new(cfg).unwrap();
        linker.step(0, &[det(0, (0.0, 0.0, 10.0, 10.0), &[0.9, 0.0])]).unwrap();
        // Same place, but zero score for class 0: the tube extrapolates.
        linker.step(1, &[det(1, (0.0, 0.0, 10.0, 10.0), &[0.0, 0.4])]).unwrap();
        let tubes = linker.snapshot();
        let class0 = tubes.iter().find(|t| t.class_label == 0).unwrap();
        assert!(class0.frames.last().unwrap().extrapolated);
    }
}
