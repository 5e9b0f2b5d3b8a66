//! Pipeline configuration.
//!
//! One TOML file carries every tunable, grouped by stage; unknown keys are
//! rejected so typos fail loudly. All keys are optional and fall back to
//! the documented defaults:
//!
//! ```toml
//! [ssim]
//! window = 7
//! L = 255.0
//! # c1 / c2 override the constants derived from L
//!
//! [temporal]
//! mode = "ssmap"      # ssmap | dsim | raw_prev | none
//! frame_gap = 1
//! topk = 1
//! seed = 0
//!
//! [detect]
//! score_floor = 0.05
//! max_per_class = 20
//! nms_iou = 0.45
//! top_n = 10
//! dense_scores = false
//!
//! [link]
//! lambda = 0.5
//! k = 5
//! n = 10
//! explt = true
//! boxp = false
//! spawn_floor = 0.05
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detect::DecodeConfig;
use crate::error::{Error, Result};
use crate::imaging::{SsimParams, TemporalMode, TemporalSettings, K1, K2};
use crate::tubes::LinkerConfig;

/// `[ssim]`: window geometry and stabilisation constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsimSection {
    pub window: usize,
    /// Dynamic range of the pixel data.
    #[serde(rename = "L")]
    pub range: f64,
    /// Overrides `(K1 * L)^2` when set.
    pub c1: Option<f64>,
    /// Overrides `(K2 * L)^2` when set.
    pub c2: Option<f64>,
}

impl Default for SsimSection {
    fn default() -> Self {
        SsimSection {
            window: 7,
            range: 255.0,
            c1: None,
            c2: None,
        }
    }
}

impl SsimSection {
    pub fn params(&self) -> Result<SsimParams> {
        match (self.c1, self.c2) {
            (None, None) => SsimParams::new(self.window, self.range),
            (c1, c2) => {
                let c1 = c1.unwrap_or((K1 * self.range) * (K1 * self.range));
                let c2 = c2.unwrap_or((K2 * self.range) * (K2 * self.range));
                SsimParams::with_constants(self.window, c1, c2)
            }
        }
    }
}

/// `[temporal]`: which temporal map is stacked onto the detector input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemporalSection {
    pub mode: TemporalMode,
    pub frame_gap: usize,
    pub topk: usize,
    pub seed: u64,
}

impl Default for TemporalSection {
    fn default() -> Self {
        TemporalSection {
            mode: TemporalMode::Ssmap,
            frame_gap: 1,
            topk: 1,
            seed: 0,
        }
    }
}

/// `[detect]`: heatmap decoding and per-class NMS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectSection {
    pub score_floor: f64,
    pub max_per_class: usize,
    pub nms_iou: f64,
    pub top_n: usize,
    pub dense_scores: bool,
}

impl Default for DetectSection {
    fn default() -> Self {
        DetectSection {
            score_floor: 0.05,
            max_per_class: 20,
            nms_iou: 0.45,
            top_n: 10,
            dense_scores: false,
        }
    }
}

/// `[link]`: tube-linking parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    pub lambda: f64,
    pub k: u32,
    pub n: usize,
    /// EXPLT: bridge missed detections by extrapolating.
    pub explt: bool,
    /// BOXP: constant-velocity prediction instead of holding the last box.
    pub boxp: bool,
    pub spawn_floor: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        LinkSection {
            lambda: 0.5,
            k: 5,
            n: 10,
            explt: true,
            boxp: false,
            spawn_floor: 0.05,
        }
    }
}

/// The whole pipeline configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub ssim: SsimSection,
    pub temporal: TemporalSection,
    pub detect: DetectSection,
    pub link: LinkSection,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Validates every section by building the derived structures.
    pub fn validate(&self) -> Result<()> {
        self.ssim_params()?;
        self.temporal_settings()?;
        if !(0.0..=1.0).contains(&self.detect.score_floor) {
            return Err(Error::Config(format!(
                "detect.score_floor must lie in [0, 1], got {}",
                self.detect.score_floor
            )));
        }
        if self.detect.max_per_class == 0 || self.detect.top_n == 0 {
            return Err(Error::Config(
                "detect.max_per_class and detect.top_n must be >= 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.detect.nms_iou) {
            return Err(Error::Config(format!(
                "detect.nms_iou must lie in [0, 1], got {}",
                self.detect.nms_iou
            )));
        }
        self.linker_config(None)
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn ssim_params(&self) -> Result<SsimParams> {
        self.ssim.params()
    }

    pub fn temporal_settings(&self) -> Result<TemporalSettings> {
        let settings = TemporalSettings {
            mode: self.temporal.mode,
            frame_gap: self.temporal.frame_gap,
            topk: self.temporal.topk,
            seed: self.temporal.seed,
            params: self.ssim_params()?,
        };
        settings.validate()?;
        Ok(settings)
    }

    pub fn decode_config(&self) -> DecodeConfig {
        DecodeConfig {
            score_floor: self.detect.score_floor,
            max_per_class: self.detect.max_per_class,
            dense_scores: self.detect.dense_scores,
        }
    }

    /// The linker configuration; `bounds` (frame width/height) enables
    /// clamped box prediction.
    pub fn linker_config(&self, bounds: Option<(f64, f64)>) -> LinkerConfig {
        LinkerConfig {
            lambda: self.link.lambda,
            k: self.link.k,
            n: self.link.n,
            extrapolate: self.link.explt,
            box_pred: self.link.boxp,
            spawn_floor: self.link.spawn_floor,
            nms_iou: self.detect.nms_iou,
            bounds,
        }
    }
}
