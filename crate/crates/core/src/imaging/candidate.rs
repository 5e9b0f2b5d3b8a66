//! Shift-candidate generation and selection.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imaging::frame::{shift_frame, Frame, ShiftDirection};
use crate::imaging::ssim::{ssim_map_shifted, ssim_means_for_shifts, SsimParams, TemporalMap};

/// Candidate shifts considered per frame pair: the identity first, then the
/// eight one-pixel shifts in row-major `(dy, dx)` order. Ties on mean
/// similarity resolve to the earliest entry.
pub const CANDIDATE_DIRECTIONS: [ShiftDirection; 9] = [
    ShiftDirection { dx: 0, dy: 0 },
    ShiftDirection { dx: -1, dy: -1 },
    ShiftDirection { dx: 0, dy: -1 },
    ShiftDirection { dx: 1, dy: -1 },
    ShiftDirection { dx: -1, dy: 0 },
    ShiftDirection { dx: 1, dy: 0 },
    ShiftDirection { dx: -1, dy: 1 },
    ShiftDirection { dx: 0, dy: 1 },
    ShiftDirection { dx: 1, dy: 1 },
];

/// Outcome of candidate selection.
#[derive(Debug, Clone)]
pub struct Selection {
    /// Shift applied to the current frame.
    pub direction: ShiftDirection,
    /// The shifted current frame (`shift_frame(current, direction)`).
    pub candidate: Frame,
    /// Mean similarity of the chosen candidate against the past frame.
    pub mean_ssim: f64,
    /// Full similarity map of the chosen candidate against the past frame.
    pub map: TemporalMap,
}

/// Mean similarity of each candidate against `past`, in candidate order.
///
/// Only the means are computed; no candidate map is materialised. Each mean
/// still equals the corresponding full map's mean bit for bit.
pub fn candidate_scores(current: &Frame, past: &Frame, params: &SsimParams) -> Result<Vec<(ShiftDirection, f64)>> {
    if current.shape() != past.shape() {
        return Err(Error::invalid(format!(
            "candidate selection needs equally shaped frames, got {:?} vs {:?}",
            current.shape(),
            past.shape()
        )));
    }
    let means = ssim_means_for_shifts(current, past, &CANDIDATE_DIRECTIONS, params)?;
    Ok(CANDIDATE_DIRECTIONS.iter().copied().zip(means).collect())
}

/// Picks the shifted copy of `current` most similar to `past`.
///
/// All nine candidates are scored by the spatial-and-channel mean of their
/// similarity map against `past`; the highest mean wins and ties keep the
/// earliest candidate (identity first). Only the winner's map is
/// materialised. The winning shift compensates the dominant inter-frame
/// motion: if the scene moved by `m` between `past` and `current`, the
/// selected direction is `-m`.
pub fn select_candidate(current: &Frame, past: &Frame, params: &SsimParams) -> Result<Selection> {
    let scores = candidate_scores(current, past, params)?;
    let mut best = 0;
    for (i, (_, mean)) in scores.iter().enumerate() {
        if *mean > scores[best].1 {
            best = i;
        }
    }
    let (direction, mean_ssim) = scores[best];
    let map = ssim_map_shifted(current, past, direction, params)?;
    Ok(Selection {
        direction,
        candidate: shift_frame(current, direction),
        mean_ssim,
        map,
    })
}

/// Randomised variant used for training-time augmentation: ranks the nine
/// candidates by mean similarity (ties keep candidate order) and draws one
/// of the best `k` uniformly, using a fixed-algorithm generator seeded with
/// `seed` so runs are reproducible.
pub fn select_candidate_topk(
    current: &Frame,
    past: &Frame,
    params: &SsimParams,
    k: usize,
    seed: u64,
) -> Result<Selection> {
    if k == 0 || k > CANDIDATE_DIRECTIONS.len() {
        return Err(Error::invalid(format!(
            "top-k must lie in 1..={}, got {k}",
            CANDIDATE_DIRECTIONS.len()
        )));
    }
    let scores = candidate_scores(current, past, params)?;
    let mut order: Vec<(usize, f64)> = scores.iter().map(|(_, m)| *m).enumerate().collect();
    // Stable sort keeps candidate order among equal means.
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("ssim means are finite"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = rng.gen_range(0..k);
    let (idx, mean_ssim) = order[pick];
    let direction = CANDIDATE_DIRECTIONS[idx];
    let map = ssim_map_shifted(current, past, direction, params)?;
    Ok(Selection {
        direction,
        candidate: shift_frame(current, direction),
        mean_ssim,
        map,
    })
}
