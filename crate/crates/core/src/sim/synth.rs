//! Noisy detection streams from scenarios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::detect::{BBox, Detection};
use crate::error::Result;
use crate::sim::{NoiseParams, Scenario};

/// Synthesizes per-frame detections for a scenario.
///
/// For each frame, each living actor is processed in actor order: a uniform
/// dropout draw is taken first (always, so streams stay aligned across
/// occlusion edits); the box is dropped when that draw falls below `p_miss`
/// or the actor is occluded. Surviving boxes get four Gaussian corner
/// perturbations (x1, y1, x2, y2 order; skipped entirely when sigma is 0),
/// are clamped to the frame with corners reordered, and carry a one-hot
/// score at the true class drawn from `score_range`. After the actors, a
/// Poisson draw (when `fp_rate > 0`) adds that many false positives, each
/// consuming center x, center y, half-width, half-height, class, and score
/// draws. The generator is ChaCha8 seeded with `seed`, so the stream is a
/// pure function of `(scenario, noise, seed)`.
pub fn synth_detections(
    scenario: &Scenario,
    noise: &NoiseParams,
    seed: u64,
) -> Result<Vec<Vec<Detection>>> {
    scenario.validate()?;
    noise.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = if noise.jitter_sigma > 0.0 {
        Some(Normal::new(0.0, noise.jitter_sigma).expect("sigma validated"))
    } else {
        None
    };
    let fps = if noise.fp_rate > 0.0 {
        Some(Poisson::new(noise.fp_rate).expect("rate validated"))
    } else {
        None
    };
    let w = f64::from(scenario.width);
    let h = f64::from(scenario.height);
    let (s_lo, s_hi) = noise.score_range;

    let mut frames = Vec::with_capacity(scenario.frames as usize);
    for t in 0..scenario.frames {
        let mut dets: Vec<Detection> = Vec::new();
        for (idx, actor) in scenario.actors.iter().enumerate() {
            let Some(bbox) = scenario.actor_box(idx, t) else {
                continue;
            };
            let miss: f64 = rng.gen();
            if miss < noise.p_miss || scenario.is_occluded(idx, t) {
                continue;
            }
            let bbox = match &jitter {
                Some(n) => {
                    let x1 = bbox.x1 + n.sample(&mut rng);
                    let y1 = bbox.y1 + n.sample(&mut rng);
                    let x2 = bbox.x2 + n.sample(&mut rng);
                    let y2 = bbox.y2 + n.sample(&mut rng);
                    sanitize(x1, y1, x2, y2, w, h)
                }
                None => bbox,
            };
            let mut scores = vec![0.0; scenario.classes];
            scores[actor.class] = rng.gen_range(s_lo..=s_hi);
            dets.push(Detection::new(t, bbox, scores));
        }
        if let Some(p) = &fps {
            let count = p.sample(&mut rng) as usize;
            for _ in 0..count {
                let cx = rng.gen_range(0.0..w);
                let cy = rng.gen_range(0.0..h);
                let hw = rng.gen_range(2.0..=16.0);
                let hh = rng.gen_range(2.0..=16.0);
                let class = rng.gen_range(0..scenario.classes);
                let score = rng.gen_range(s_lo..=s_hi);
                let bbox = BBox {
                    x1: (cx - hw).clamp(0.0, w),
                    y1: (cy - hh).clamp(0.0, h),
                    x2: (cx + hw).clamp(0.0, w),
                    y2: (cy + hh).clamp(0.0, h),
                };
                let mut scores = vec![0.0; scenario.classes];
                scores[class] = score;
                dets.push(Detection::new(t, bbox, scores));
            }
        }
        frames.push(dets);
    }
    Ok(frames)
}

/// Clamps jittered corners to the frame and restores corner order.
fn sanitize(x1: f64, y1: f64, x2: f64, y2: f64, w: f64, h: f64) -> BBox {
    let (x1, x2) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
    let (y1, y2) = if y1 <= y2 { (y1, y2) } else { (y2, y1) };
    BBox {
        x1: x1.clamp(0.0, w),
        y1: y1.clamp(0.0, h),
        x2: x2.clamp(0.0, w),
        y2: y2.clamp(0.0, h),
    }
}
