//! Frame and heatmap rendering for synthetic scenarios.
//!
//! Everything is a pure function of `(scenario, seed)`. Pixel values come
//! from a splitmix64 hash of the seed and the texture coordinate, so frames
//! are bit-reproducible across platforms and runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detect::HeatmapSet;
use crate::error::{Error, Result};
use crate::imaging::Frame;
use crate::sim::Scenario;

/// The standard splitmix64 mixer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash texture: one byte per (seed, x, y) lattice point.
fn tex(seed: u64, x: i64, y: i64) -> u8 {
    (splitmix64(splitmix64(seed ^ x as u64) ^ y as u64) & 0xFF) as u8
}

fn channel_seed(seed: u64, channel: u8) -> u64 {
    splitmix64(seed ^ u64::from(channel).wrapping_add(0xC0FF_EE00))
}

fn actor_seed(seed: u64, actor: usize) -> u64 {
    splitmix64(seed ^ (actor as u64).wrapping_add(0xAC70_u64 << 16))
}

/// Renders the scenario into frames.
///
/// The background is hash noise; with drift `(dx, dy)` the texture is
/// sampled at `(x + t * dx, y + t * dy)`, so shifting frame `t` by the drift
/// vector realigns it with frame `t - 1` (candidate selection recovers the
/// drift). Actors are filled rectangles of their own hash texture anchored
/// to the box origin, so an actor's pattern travels with it while the
/// background behind it stays put. Occluded actors are not drawn.
pub fn render_frames(scenario: &Scenario, seed: u64) -> Result<Vec<Frame>> {
    scenario.validate()?;
    let w = scenario.width as usize;
    let h = scenario.height as usize;
    let ch = usize::from(scenario.channels);
    let (dx, dy) = scenario.drift.unwrap_or((0, 0));
    let mut frames = Vec::with_capacity(scenario.frames as usize);
    for t in 0..scenario.frames {
        let mut data = vec![0.0f64; w * h * ch];
        for c in 0..scenario.channels {
            let bg_seed = channel_seed(seed, c);
            let plane = &mut data[usize::from(c) * w * h..(usize::from(c) + 1) * w * h];
            let ox = i64::from(dx) * t as i64;
            let oy = i64::from(dy) * t as i64;
            for y in 0..h {
                for x in 0..w {
                    plane[y * w + x] = f64::from(tex(bg_seed, x as i64 + ox, y as i64 + oy));
                }
            }
            for (idx, _) in scenario.actors.iter().enumerate() {
                let Some(bbox) = scenario.actor_box(idx, t) else {
                    continue;
                };
                if scenario.is_occluded(idx, t) {
                    continue;
                }
                let a_seed = channel_seed(actor_seed(seed, idx), c);
                let x0 = bbox.x1.round().max(0.0) as usize;
                let y0 = bbox.y1.round().max(0.0) as usize;
                let x1 = (bbox.x2.round() as usize).min(w);
                let y1 = (bbox.y2.round() as usize).min(h);
                for y in y0..y1 {
                    for x in x0..x1 {
                        plane[y * w + x] = f64::from(tex(a_seed, x as i64 - x0 as i64, y as i64 - y0 as i64));
                    }
                }
            }
        }
        frames.push(Frame::new(t, w, h, ch, data)?);
    }
    Ok(frames)
}

/// Renders per-frame heatmaps for the scenario, as an idealized detector
/// would produce them: a peak at each visible actor's center cell with a
/// Gaussian falloff around it, the box size and sub-cell offset regressed
/// at the peak. Peak scores are drawn per (frame, actor) from a seeded
/// generator; all values are quantized to `f32` so an in-memory decode
/// matches a decode after a file round trip. The frame size must be
/// divisible by `down_ratio`.
pub fn render_heatmaps(scenario: &Scenario, down_ratio: usize, seed: u64) -> Result<Vec<HeatmapSet>> {
    scenario.validate()?;
    if down_ratio == 0 {
        return Err(Error::invalid("down_ratio must be >= 1"));
    }
    let w = scenario.width as usize;
    let h = scenario.height as usize;
    if w % down_ratio != 0 || h % down_ratio != 0 {
        return Err(Error::invalid(format!(
            "frame size {w}x{h} is not divisible by down_ratio {down_ratio}"
        )));
    }
    let grid_w = w / down_ratio;
    let grid_h = h / down_ratio;
    let r = down_ratio as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(scenario.frames as usize);
    for t in 0..scenario.frames {
        let mut maps = HeatmapSet::zeros(grid_w, grid_h, scenario.classes, down_ratio)?;
        for (idx, actor) in scenario.actors.iter().enumerate() {
            let Some(bbox) = scenario.actor_box(idx, t) else {
                continue;
            };
            if scenario.is_occluded(idx, t) {
                continue;
            }
            let peak = quantize(rng.gen_range(0.6..=0.95));
            let (cx, cy) = bbox.center();
            let ci = ((cx / r) as usize).min(grid_w - 1);
            let cj = ((cy / r) as usize).min(grid_h - 1);
            let off_x = quantize((cx / r - ci as f64).clamp(0.0, 0.999_999));
            let off_y = quantize((cy / r - cj as f64).clamp(0.0, 0.999_999));
            // Gaussian falloff, strictly below the peak away from it.
            let sigma = ((bbox.width().min(bbox.height()) / r) / 3.0).max(0.75);
            let radius = 3i64;
            for dj in -radius..=radius {
                for di in -radius..=radius {
                    let i = ci as i64 + di;
                    let j = cj as i64 + dj;
                    if i < 0 || j < 0 || i >= grid_w as i64 || j >= grid_h as i64 {
                        continue;
                    }
                    let d2 = (di * di + dj * dj) as f64;
                    let v = quantize(peak * (-d2 / (2.0 * sigma * sigma)).exp());
                    let (i, j) = (i as usize, j as usize);
                    if v > maps.center_at(actor.class, i, j) {
                        maps.set_center(actor.class, i, j, v);
                    }
                }
            }
            maps.set_regression(
                ci,
                cj,
                (quantize(bbox.width()), quantize(bbox.height())),
                (off_x, off_y),
            );
        }
        out.push(maps);
    }
    Ok(out)
}

/// Rounds through `f32`, the precision heatmap files store.
fn quantize(v: f64) -> f64 {
    v as f32 as f64
}
