//! Umbrella acceptance suite: every component is exercised against a
//! brute-force oracle or a scripted scenario, and each criterion prints one
//! PASS/FAIL line. Run with
//!
//! ```text
//! cargo test -p tubekit-cli --test acceptance -- --nocapture
//! ```

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use tubekit_cli::commands::bench::{self, BenchOptions};
use tubekit_cli::commands::sweep::{self, SweepParam};
use tubekit_core::config::PipelineConfig;
use tubekit_core::detect::{decode_heatmaps, BBox, DecodeConfig, Detection, HeatmapSet};
use tubekit_core::eval::{
    frame_ap, map_suite, video_ap, EvalTube, GroundTruth, GtTube, VideoDetections, VideoTubes,
};
use tubekit_core::imaging::{
    select_candidate, shift_frame, ssim_map, Frame, SsimParams, TemporalMode, CANDIDATE_DIRECTIONS,
};
use tubekit_core::sim::{
    oracle_decode, oracle_frame_ap, oracle_link, oracle_map_suite, oracle_ssim_map,
    oracle_video_ap, Actor, MotionPath, NoiseParams, Occlusion, Scenario,
};
use tubekit_core::tubes::{run_stream, LinkerConfig, TubeLinker};

type Check = fn() -> Result<(), String>;

#[test]
fn acceptance() {
    let criteria: [(&str, Check); 9] = [
        ("similarity maps match the direct windowed oracle", ssim_matches_oracle),
        ("candidate selection recovers one-pixel global shifts", shifts_are_recovered),
        ("online linking matches the brute-force oracle", linker_matches_oracle),
        ("a g-frame gap keeps one tube iff g <= k", gaps_bridge_iff_within_budget),
        ("ap metrics match the quadratic oracle", metrics_match_oracle),
        ("sweep reproduces the occlusion ablation", sweep_shows_the_ablation),
        ("heatmap decoding matches the exhaustive oracle", decode_matches_oracle),
        ("per-stage latency fits the budget", latency_fits_budget),
        ("tube state after frame t uses no future frames", linking_is_causal),
    ];

    let mut failures = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("criterion {} ({name}): PASS", i + 1),
            Err(msg) => {
                println!("criterion {} ({name}): FAIL - {msg}", i + 1);
                failures.push(format!("criterion {} ({name}): {msg}", i + 1));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "{} of 9 criteria failed:\n{}",
        failures.len(),
        failures.join("\n")
    );
}

// ---------------------------------------------------------------- generators

fn random_frame(rng: &mut ChaCha8Rng, index: u64, w: usize, h: usize, ch: usize) -> Frame {
    let data = (0..w * h * ch).map(|_| rng.gen_range(0.0..=255.0)).collect();
    Frame::new(index, w, h, ch, data).expect("random frame is valid")
}

/// A box whose corners are multiples of 1/4 inside [0, 90]^2, so identical
/// arithmetic on both sides of an oracle comparison is exact.
fn lattice_box(rng: &mut ChaCha8Rng) -> BBox {
    let x1 = rng.gen_range(0..=280) as f64 * 0.25;
    let y1 = rng.gen_range(0..=280) as f64 * 0.25;
    let w = rng.gen_range(8..=80) as f64 * 0.25;
    let h = rng.gen_range(8..=80) as f64 * 0.25;
    BBox::new(x1, y1, x1 + w, y1 + h).expect("lattice box is ordered")
}

/// Scores on a 1/64 grid: exactly representable, so ranking ties are decided
/// identically everywhere.
fn lattice_score(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0..=64) as f64 / 64.0
}

/// A detection stream built from up to five noisy constant-velocity tracks
/// plus clutter, capped at eight detections per frame.
fn random_stream(rng: &mut ChaCha8Rng, frames: u64, classes: usize) -> Vec<(u64, Vec<Detection>)> {
    struct Track {
        class: usize,
        start: u64,
        end: u64,
        x: f64,
        y: f64,
        vx: f64,
        vy: f64,
        w: f64,
        h: f64,
    }
    let tracks: Vec<Track> = (0..rng.gen_range(1..=5))
        .map(|_| {
            let start = rng.gen_range(0..frames);
            Track {
                class: rng.gen_range(0..classes),
                start,
                end: rng.gen_range(start..frames),
                x: rng.gen_range(0..=240) as f64 * 0.25,
                y: rng.gen_range(0..=240) as f64 * 0.25,
                vx: rng.gen_range(-6..=6) as f64 * 0.25,
                vy: rng.gen_range(-6..=6) as f64 * 0.25,
                w: rng.gen_range(16..=60) as f64 * 0.25,
                h: rng.gen_range(16..=60) as f64 * 0.25,
            }
        })
        .collect();

    (0..frames)
        .map(|t| {
            let mut dets = Vec::new();
            for tr in &tracks {
                if t < tr.start || t > tr.end || rng.gen_bool(0.15) {
                    continue;
                }
                let dt = (t - tr.start) as f64;
                let x1 = (tr.x + tr.vx * dt).clamp(0.0, 80.0);
                let y1 = (tr.y + tr.vy * dt).clamp(0.0, 80.0);
                let bbox = BBox::new(x1, y1, x1 + tr.w, y1 + tr.h).expect("track box is ordered");
                let mut scores = vec![0.0; classes];
                scores[tr.class] = lattice_score(rng);
                if rng.gen_bool(0.25) {
                    let other = rng.gen_range(0..classes);
                    scores[other] = scores[other].max(lattice_score(rng) * 0.5);
                }
                dets.push(Detection::new(t, bbox, scores));
            }
            while dets.len() < 8 && rng.gen_bool(0.2) {
                let mut scores = vec![0.0; classes];
                scores[rng.gen_range(0..classes)] = lattice_score(rng);
                dets.push(Detection::new(t, lattice_box(rng), scores));
            }
            (t, dets)
        })
        .collect()
}

// ----------------------------------------------------------------- criteria

/// 1: `ssim_map` equals the direct per-window oracle within 1e-6 on random
/// frame pairs for windows 3, 7, and 11, and the self-similarity of any
/// frame is 1 within 1e-9. Budget: 10 s.
fn ssim_matches_oracle() -> Result<(), String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..100 {
        let ch = rng.gen_range(1..=3);
        let a = random_frame(&mut rng, 0, 32, 32, ch);
        let b = random_frame(&mut rng, 1, 32, 32, ch);
        for window in [3usize, 7, 11] {
            let params = SsimParams::new(window, 255.0).map_err(|e| e.to_string())?;
            let fast = ssim_map(&a, &b, &params).map_err(|e| e.to_string())?;
            let slow = oracle_ssim_map(&a, &b, &params).map_err(|e| e.to_string())?;
            let worst = fast
                .data()
                .iter()
                .zip(slow.data())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max);
            if worst > 1e-6 {
                return Err(format!(
                    "case {case}, window {window}: max |ssim - oracle| = {worst:.3e}"
                ));
            }
            let own = ssim_map(&a, &a, &params).map_err(|e| e.to_string())?;
            let worst_self = own
                .data()
                .iter()
                .map(|v| (v - 1.0).abs())
                .fold(0.0f64, f64::max);
            if worst_self > 1e-9 {
                return Err(format!(
                    "case {case}, window {window}: self-similarity off by {worst_self:.3e}"
                ));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        return Err(format!("runtime {secs:.1} s exceeds the 10 s budget"));
    }
    Ok(())
}

/// 2: on noiseless one-pixel global translations of textured frames, the
/// candidate stage recovers the compensating shift every time. Budget: 30 s.
fn shifts_are_recovered() -> Result<(), String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let params = SsimParams::default();
    for case in 0..200usize {
        let d = CANDIDATE_DIRECTIONS[case % CANDIDATE_DIRECTIONS.len()];
        let current = random_frame(&mut rng, 1, 32, 32, 1);
        // `past` is `current` moved by `+d`, so the scene moved by `-d`
        // between the two frames and the compensating shift is exactly `d`.
        let past = shift_frame(&current, d);
        let sel = select_candidate(&current, &past, &params).map_err(|e| e.to_string())?;
        if (sel.direction.dx, sel.direction.dy) != (d.dx, d.dy) {
            return Err(format!(
                "case {case}: expected shift ({},{}), selected ({},{})",
                d.dx, d.dy, sel.direction.dx, sel.direction.dy
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 30.0 {
        return Err(format!("runtime {secs:.1} s exceeds the 30 s budget"));
    }
    Ok(())
}

/// 3: the streaming linker is bit-identical to the brute-force oracle on
/// 1,000 random instances across every lambda/k/extrapolation/box-prediction
/// combination. Budget: 60 s.
fn linker_matches_oracle() -> Result<(), String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for case in 0..1000 {
        let classes = rng.gen_range(1..=4);
        let frames = rng.gen_range(1..=20);
        let stream = random_stream(&mut rng, frames, classes);
        for lambda in [0.1, 0.3, 0.5] {
            for k in [0u32, 2, 5] {
                for extrapolate in [false, true] {
                    for box_pred in [false, true] {
                        let cfg = LinkerConfig {
                            lambda,
                            k,
                            n: 10,
                            extrapolate,
                            box_pred,
                            spawn_floor: 0.05,
                            nms_iou: 0.45,
                            bounds: Some((100.0, 100.0)),
                        };
                        let got =
                            run_stream(stream.iter().cloned(), &cfg).map_err(|e| e.to_string())?;
                        let want = oracle_link(&stream, &cfg).map_err(|e| e.to_string())?;
                        if got != want {
                            return Err(format!(
                                "case {case} (lambda={lambda}, k={k}, explt={extrapolate}, \
                                 boxp={box_pred}): {} tubes vs oracle's {}",
                                got.len(),
                                want.len()
                            ));
                        }
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("runtime {secs:.1} s exceeds the 60 s budget"));
    }
    Ok(())
}

/// 4: a stationary target that disappears for g frames yields one tube when
/// the extrapolation budget covers the gap (g <= k) and two tubes otherwise,
/// for every (g, k) in {0..6}^2.
fn gaps_bridge_iff_within_budget() -> Result<(), String> {
    let bbox = BBox::new(10.0, 10.0, 22.0, 22.0).expect("static box");
    for g in 0u64..=6 {
        for k in 0u32..=6 {
            let mut stream = Vec::new();
            let mut t = 0u64;
            for _ in 0..3 {
                stream.push((t, vec![Detection::new(t, bbox, vec![0.9])]));
                t += 1;
            }
            for _ in 0..g {
                stream.push((t, Vec::new()));
                t += 1;
            }
            for _ in 0..3 {
                stream.push((t, vec![Detection::new(t, bbox, vec![0.9])]));
                t += 1;
            }
            let cfg = LinkerConfig {
                lambda: 0.5,
                k,
                extrapolate: true,
                box_pred: false,
                ..LinkerConfig::default()
            };
            let tubes = run_stream(stream, &cfg).map_err(|e| e.to_string())?;
            let want = if u64::from(k) >= g { 1 } else { 2 };
            if tubes.len() != want {
                return Err(format!(
                    "gap g={g}, budget k={k}: got {} tubes, expected {want}",
                    tubes.len()
                ));
            }
        }
    }
    Ok(())
}

/// 5: frame and video AP agree with the quadratic oracle within 1e-9 on 500
/// random instances; perfect predictions score 1.0 on every suite entry and
/// empty predictions score 0.0.
fn metrics_match_oracle() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for case in 0..500 {
        let classes = rng.gen_range(1..=3);
        let gt = random_gt(&mut rng, classes);
        let preds = random_preds(&mut rng, &gt, classes);
        let tubes = random_tube_preds(&mut rng, &gt, classes);
        let class = *gt
            .present_classes()
            .choose(&mut rng)
            .expect("ground truth has at least one class");
        let thresh = [0.2, 0.5, 0.75][rng.gen_range(0..3)];

        let got_f = frame_ap(&preds, &gt, class, thresh)
            .map_err(|e| e.to_string())?
            .ap;
        let want_f = oracle_frame_ap(&preds, &gt, class, thresh).map_err(|e| e.to_string())?;
        if (got_f - want_f).abs() > 1e-9 {
            return Err(format!(
                "case {case}: frame ap {got_f} vs oracle {want_f} (class {class}, iou {thresh})"
            ));
        }

        let got_v = video_ap(&tubes, &gt, class, thresh)
            .map_err(|e| e.to_string())?
            .ap;
        let want_v = oracle_video_ap(&tubes, &gt, class, thresh).map_err(|e| e.to_string())?;
        if (got_v - want_v).abs() > 1e-9 {
            return Err(format!(
                "case {case}: video ap {got_v} vs oracle {want_v} (class {class}, iou {thresh})"
            ));
        }
    }

    let gt = fixed_gt();
    let (preds, tubes) = perfect_from(&gt);
    let report = map_suite(&preds, &tubes, &gt).map_err(|e| e.to_string())?;
    let entries = [
        ("f-mAP@0.5", report.f_map_05),
        ("v-mAP@0.2", report.v_map_02),
        ("v-mAP@0.5", report.v_map_05),
        ("v-mAP@0.75", report.v_map_075),
        ("v-mAP@0.5:0.95", report.v_map_05_095),
    ];
    for (name, v) in entries {
        if (v - 1.0).abs() > 1e-9 {
            return Err(format!("perfect predictions: {name} = {v}, expected 1.0"));
        }
    }
    let suite = oracle_map_suite(&preds, &tubes, &gt).map_err(|e| e.to_string())?;
    let pairs = [
        (report.f_map_05, suite[0]),
        (report.v_map_02, suite[1]),
        (report.v_map_05, suite[2]),
        (report.v_map_075, suite[3]),
        (report.v_map_05_095, suite[4]),
    ];
    if let Some((got, want)) = pairs.iter().find(|(g, w)| (g - w).abs() > 1e-9) {
        return Err(format!("suite disagrees with its oracle: {got} vs {want}"));
    }

    let zero = map_suite(&[], &[], &gt).map_err(|e| e.to_string())?;
    let entries = [
        ("f-mAP@0.5", zero.f_map_05),
        ("v-mAP@0.2", zero.v_map_02),
        ("v-mAP@0.5", zero.v_map_05),
        ("v-mAP@0.75", zero.v_map_075),
        ("v-mAP@0.5:0.95", zero.v_map_05_095),
    ];
    for (name, v) in entries {
        if v != 0.0 {
            return Err(format!("empty predictions: {name} = {v}, expected 0.0"));
        }
    }
    Ok(())
}

/// 6: on a scenario with scheduled occlusions and corner jitter, the sweep
/// harness shows extrapolation holding tubes together (v-mAP@0.5 at least as
/// high with it on, by a wide margin here) while toggling box prediction
/// moves v-mAP@0.5 by less than 0.02.
fn sweep_shows_the_ablation() -> Result<(), String> {
    let scenario = occlusion_scenario();
    let cfg = PipelineConfig::default();
    let on_off = vec!["on".to_string(), "off".to_string()];

    let explt =
        sweep::run(&cfg, SweepParam::Explt, &on_off, &scenario, 7).map_err(|e| e.to_string())?;
    let (on, off) = (explt.rows[0].v_map_05, explt.rows[1].v_map_05);
    if on < off {
        return Err(format!("v-mAP@0.5 with extrapolation {on:.3} < without {off:.3}"));
    }
    if on - off < 0.3 {
        return Err(format!(
            "extrapolation should separate the occlusion scenario clearly; got {on:.3} vs {off:.3}"
        ));
    }

    let boxp =
        sweep::run(&cfg, SweepParam::Boxp, &on_off, &scenario, 7).map_err(|e| e.to_string())?;
    let delta = (boxp.rows[0].v_map_05 - boxp.rows[1].v_map_05).abs();
    if delta >= 0.02 {
        return Err(format!("box prediction moved v-mAP@0.5 by {delta:.4}, expected < 0.02"));
    }
    Ok(())
}

/// 7: heatmap decoding equals the exhaustive local-maximum oracle exactly on
/// random heatmap sets, and the single-peak arithmetic example reproduces.
fn decode_matches_oracle() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for case in 0..200u64 {
        let grid_w = rng.gen_range(4..=10);
        let grid_h = rng.gen_range(4..=10);
        let classes = rng.gen_range(1..=3);
        let r = [2usize, 4][rng.gen_range(0..2)];
        let mut set = HeatmapSet::zeros(grid_w, grid_h, classes, r).map_err(|e| e.to_string())?;
        for _ in 0..rng.gen_range(0..=12) {
            let c = rng.gen_range(0..classes);
            let i = rng.gen_range(0..grid_w);
            let j = rng.gen_range(0..grid_h);
            set.set_center(c, i, j, rng.gen_range(0..=64) as f64 / 64.0);
        }
        for _ in 0..rng.gen_range(0..=8) {
            let i = rng.gen_range(0..grid_w);
            let j = rng.gen_range(0..grid_h);
            let size = (
                rng.gen_range(4..=96) as f64 * 0.25,
                rng.gen_range(4..=96) as f64 * 0.25,
            );
            let offset = (
                rng.gen_range(0..64) as f64 / 64.0,
                rng.gen_range(0..64) as f64 / 64.0,
            );
            set.set_regression(i, j, size, offset);
        }
        let cfg = DecodeConfig {
            score_floor: [0.05, 0.25, 0.5][rng.gen_range(0..3)],
            max_per_class: [1usize, 3, 20][rng.gen_range(0..3)],
            dense_scores: rng.gen_bool(0.5),
        };
        let got = decode_heatmaps(&set, case, &cfg);
        let want = oracle_decode(&set, case, &cfg);
        if got != want {
            return Err(format!(
                "case {case}: {} detections vs oracle's {}",
                got.len(),
                want.len()
            ));
        }
    }

    // Single-peak arithmetic: with a down ratio of 4, a peak at cell (4, 5)
    // carrying offset (0.5, 0.5) and size (20, 10) decodes to a box centered
    // at (18, 22), i.e. (8, 17, 28, 27).
    let mut set = HeatmapSet::zeros(8, 8, 1, 4).map_err(|e| e.to_string())?;
    set.set_center(0, 4, 5, 0.9);
    set.set_regression(4, 5, (20.0, 10.0), (0.5, 0.5));
    let dets = decode_heatmaps(&set, 0, &DecodeConfig::default());
    if dets.len() != 1 {
        return Err(format!("single peak decoded to {} detections", dets.len()));
    }
    let want = BBox::new(8.0, 17.0, 28.0, 27.0).expect("reference box");
    if dets[0].bbox != want {
        return Err(format!("single-peak box {:?}, expected {:?}", dets[0].bbox, want));
    }
    Ok(())
}

/// 8: at 256x256x3, the temporal stage (nine candidate means plus the
/// winner's map) averages at most 25 ms/frame and linking at most 5 ms/frame,
/// with the temporal stage the more expensive of the two.
fn latency_fits_budget() -> Result<(), String> {
    let opts = BenchOptions { timed_frames: 500, warmup: 32, seed: 0, down_ratio: 4 };
    let reports = bench::run(
        &PipelineConfig::default(),
        &bench::default_scenario(),
        &[TemporalMode::Ssmap],
        &opts,
    )
    .map_err(|e| e.to_string())?;
    let r = &reports[0];
    if r.temporal.mean_ms > 25.0 {
        return Err(format!(
            "temporal stage averages {:.2} ms/frame, budget is 25 ms",
            r.temporal.mean_ms
        ));
    }
    if r.link.mean_ms > 5.0 {
        return Err(format!(
            "link stage averages {:.3} ms/frame, budget is 5 ms",
            r.link.mean_ms
        ));
    }
    if r.temporal.mean_ms <= r.link.mean_ms {
        return Err(format!(
            "expected the temporal stage ({:.3} ms) to cost more than linking ({:.3} ms)",
            r.temporal.mean_ms, r.link.mean_ms
        ));
    }
    Ok(())
}

/// 9: the tube state emitted after frame t equals the state of a fresh
/// linker run over the prefix up to t, so no future frame can influence it.
fn linking_is_causal() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for case in 0..50 {
        let classes = rng.gen_range(1..=3);
        let frames = rng.gen_range(1..=15);
        let stream = random_stream(&mut rng, frames, classes);
        let cfg = LinkerConfig {
            lambda: [0.1, 0.3, 0.5][rng.gen_range(0..3)],
            k: rng.gen_range(0..=5),
            extrapolate: rng.gen_bool(0.5),
            box_pred: rng.gen_bool(0.5),
            bounds: if rng.gen_bool(0.5) { Some((100.0, 100.0)) } else { None },
            ..LinkerConfig::default()
        };

        let mut full = TubeLinker::new(cfg.clone()).map_err(|e| e.to_string())?;
        let mut snapshots = Vec::new();
        for (t, dets) in &stream {
            full.step(*t, dets).map_err(|e| e.to_string())?;
            snapshots.push(full.snapshot());
        }

        for (idx, snap) in snapshots.iter().enumerate() {
            let mut fresh = TubeLinker::new(cfg.clone()).map_err(|e| e.to_string())?;
            for (t, dets) in &stream[..=idx] {
                fresh.step(*t, dets).map_err(|e| e.to_string())?;
            }
            if &fresh.snapshot() != snap {
                return Err(format!(
                    "case {case}: state after frame {idx} differs from the prefix rerun"
                ));
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------- criterion-5 pieces

fn random_gt(rng: &mut ChaCha8Rng, classes: usize) -> GroundTruth {
    let mut gt = GroundTruth::new();
    for v in 0..rng.gen_range(1..=3) {
        let name = format!("v{v}");
        for _ in 0..rng.gen_range(1..=3) {
            let start = rng.gen_range(0..10u64);
            let len = rng.gen_range(1..=8u64);
            let frames = (start..start + len).map(|t| (t, lattice_box(rng))).collect();
            gt.add_tube(
                &name,
                GtTube::new(rng.gen_range(0..classes), frames).expect("ground-truth tube"),
            );
        }
    }
    gt
}

fn random_preds(rng: &mut ChaCha8Rng, gt: &GroundTruth, classes: usize) -> Vec<VideoDetections> {
    let mut names: Vec<String> = gt.videos().keys().cloned().collect();
    if rng.gen_bool(0.2) {
        names.push("ghost".to_string());
    }
    names
        .iter()
        .map(|name| {
            let dets = (0..rng.gen_range(0..=12))
                .map(|_| {
                    let t = rng.gen_range(0..18u64);
                    let mut scores = vec![0.0; classes];
                    for s in scores.iter_mut() {
                        if rng.gen_bool(0.6) {
                            *s = lattice_score(rng);
                        }
                    }
                    Detection::new(t, lattice_box(rng), scores)
                })
                .collect();
            VideoDetections::new(name.clone(), dets)
        })
        .collect()
}

fn random_tube_preds(rng: &mut ChaCha8Rng, gt: &GroundTruth, classes: usize) -> Vec<VideoTubes> {
    let mut names: Vec<String> = gt.videos().keys().cloned().collect();
    if rng.gen_bool(0.2) {
        names.push("ghost".to_string());
    }
    names
        .iter()
        .map(|name| {
            let tubes = (0..rng.gen_range(0..=4))
                .map(|_| {
                    let start = rng.gen_range(0..10u64);
                    let len = rng.gen_range(1..=8u64);
                    let frames = (start..start + len).map(|t| (t, lattice_box(rng))).collect();
                    EvalTube::new(rng.gen_range(0..classes), lattice_score(rng), frames)
                        .expect("predicted tube")
                })
                .collect();
            VideoTubes::new(name.clone(), tubes)
        })
        .collect()
}

fn fixed_gt() -> GroundTruth {
    let tube = |class: usize, origin: f64, start: u64, len: u64| {
        let frames = (start..start + len)
            .map(|t| {
                let s = origin + (t - start) as f64;
                (t, BBox::new(s, s, s + 12.0, s + 12.0).expect("ground-truth box"))
            })
            .collect();
        GtTube::new(class, frames).expect("ground-truth tube")
    };
    let mut gt = GroundTruth::new();
    gt.add_tube("clip-a", tube(0, 4.0, 0, 8));
    gt.add_tube("clip-a", tube(1, 40.0, 2, 6));
    gt.add_tube("clip-b", tube(0, 12.0, 1, 9));
    gt.add_tube("clip-b", tube(2, 60.0, 0, 5));
    gt
}

/// Predictions copied verbatim from the ground truth, with full confidence.
fn perfect_from(gt: &GroundTruth) -> (Vec<VideoDetections>, Vec<VideoTubes>) {
    let classes = gt.classes();
    let mut preds = Vec::new();
    let mut tubes = Vec::new();
    for (video, gts) in gt.videos() {
        let mut dets = Vec::new();
        let mut vt = Vec::new();
        for tube in gts {
            for &(t, bbox) in &tube.frames {
                let mut scores = vec![0.0; classes];
                scores[tube.class] = 1.0;
                dets.push(Detection::new(t, bbox, scores));
            }
            vt.push(EvalTube::new(tube.class, 1.0, tube.frames.clone()).expect("perfect tube"));
        }
        preds.push(VideoDetections::new(video.clone(), dets));
        tubes.push(VideoTubes::new(video.clone(), vt));
    }
    (preds, tubes)
}

// ------------------------------------------------------- criterion-6 pieces

/// Two well-separated actors, each hidden for three-frame stretches, with
/// mild corner jitter on the synthesized detections. The default
/// extrapolation budget (k = 5) covers the gaps, so tubes survive occlusions
/// exactly when extrapolation is on.
fn occlusion_scenario() -> Scenario {
    Scenario {
        name: "occlusion-ablation".to_string(),
        frames: 60,
        width: 96,
        height: 96,
        classes: 2,
        channels: 1,
        drift: None,
        actors: vec![
            Actor {
                class: 0,
                start: 0,
                end: 59,
                size: (14.0, 14.0),
                path: MotionPath::Constant { origin: (6.0, 6.0), velocity: (0.5, 0.25) },
            },
            Actor {
                class: 1,
                start: 0,
                end: 59,
                size: (14.0, 14.0),
                path: MotionPath::Constant { origin: (76.0, 76.0), velocity: (-0.5, -0.4) },
            },
        ],
        occlusions: vec![
            Occlusion { actor: 0, start: 20, end: 22 },
            Occlusion { actor: 0, start: 40, end: 42 },
            Occlusion { actor: 1, start: 30, end: 32 },
        ],
        noise: Some(NoiseParams {
            p_miss: 0.0,
            jitter_sigma: 0.25,
            fp_rate: 0.0,
            score_range: (0.6, 0.95),
        }),
    }
}
