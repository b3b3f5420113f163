//! Experiment configuration: JSON file plus command-line overrides.

use std::path::{Path, PathBuf};

use bsq_core::geometry::TangentVector;
use bsq_core::model::ModelSpace;
use serde::{Deserialize, Serialize};

use crate::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as i64;
        (0..=n.max(0)).map(|i| self.start + i as f64 * self.step).collect()
    }

    fn parse(s: &str) -> Result<Self, ConfigError> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts[..] else {
            return Err(ConfigError::Invalid(format!("range `{s}` is not start:stop:step")));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| ConfigError::Invalid(format!("bad number `{x}` in range `{s}`")));
        let r = Range {
            start: num(a)?,
            stop: num(b)?,
            step: num(c)?,
        };
        if !(r.step > 0.0) || r.stop < r.start {
            return Err(ConfigError::Invalid(format!("range `{s}` is empty or has a nonpositive step")));
        }
        Ok(r)
    }
}

/// Tangent vectors `w = p + iq`; in dimension `d > 1` a point lies along `e_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WGrid {
    Points(Vec<[f64; 2]>),
    Grid { p: Range, q: Range },
}

impl WGrid {
    pub fn points(&self) -> Vec<[f64; 2]> {
        match self {
            WGrid::Points(v) => v.clone(),
            WGrid::Grid { p, q } => {
                let qs = q.values();
                p.values().into_iter().flat_map(|a| qs.iter().map(move |b| [a, *b])).collect()
            }
        }
    }

    /// `"re,im;re,im"`.
    pub fn parse_points(s: &str) -> Result<Self, ConfigError> {
        let pts = s
            .split(';')
            .filter(|x| !x.trim().is_empty())
            .map(|pair| {
                let (a, b) = pair
                    .split_once(',')
                    .ok_or_else(|| ConfigError::Invalid(format!("w entry `{pair}` is not re,im")))?;
                let num = |x: &str| x.trim().parse::<f64>().map_err(|_| ConfigError::Invalid(format!("bad number `{x}` in w")));
                Ok([num(a)?, num(b)?])
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WGrid::Points(pts))
    }

    /// `"p=-2:2:0.25,q=-2:2:0.25"`.
    pub fn parse_grid(s: &str) -> Result<Self, ConfigError> {
        let mut p = None;
        let mut q = None;
        for item in s.split(',') {
            match item.split_once('=') {
                Some(("p", r)) => p = Some(Range::parse(r)?),
                Some(("q", r)) => q = Some(Range::parse(r)?),
                _ => return Err(ConfigError::Invalid(format!("w-grid entry `{item}` is not p=… or q=…"))),
            }
        }
        match (p, q) {
            (Some(p), Some(q)) => Ok(WGrid::Grid { p, q }),
            _ => Err(ConfigError::Invalid("w-grid needs both p and q ranges".into())),
        }
    }
}

pub fn tangent(point: [f64; 2], dim: usize) -> TangentVector {
    let mut w = TangentVector::zeros(dim).components().to_vec();
    w[0] = bsq_core::C64::new(point[0], point[1]);
    TangentVector::new(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    /// `‖w⊥‖ = c·k^a`.
    pub exponent: f64,
    pub constants: Vec<f64>,
    /// Ratio tests against `k^{−N}` for `N = 1..=max_order`.
    pub max_order: u32,
    /// Base distance of the far-point control.
    pub far_distance: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            exponent: 0.3,
            constants: vec![1.0],
            max_order: 5,
            far_distance: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: String,
    #[serde(rename = "loop")]
    pub loop_preset: String,
    /// Loop parameter (or plane coordinate) of the base point `x`.
    pub base_parameter: f64,
    pub k_list: Vec<u32>,
    pub w_grid: WGrid,
    pub ell: usize,
    pub epsilon: f64,
    pub window_const: f64,
    /// `C` in the branch cutoff `4C·k^{−1/3}`.
    pub cutoff_const: f64,
    /// Number of leading `k` values used to calibrate remainder constants;
    /// `None` means the lower half.
    pub calibration: Option<usize>,
    pub quad_nodes: Option<usize>,
    pub seed: u64,
    /// Random cases in the kernel symmetry sweep.
    pub symmetry_samples: usize,
    pub decay: DecayConfig,
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: "cp1:2".into(),
            loop_preset: "cp1-equator".into(),
            base_parameter: 0.0,
            k_list: vec![32, 64, 128, 256],
            w_grid: WGrid::Points(vec![[0.0, 0.0]]),
            ell: 0,
            epsilon: 0.1,
            window_const: 1.0,
            cutoff_const: 1.0,
            calibration: None,
            quad_nodes: None,
            seed: 0,
            symmetry_samples: 16,
            decay: DecayConfig::default(),
            format: OutputFormat::Csv,
            out: None,
            svg: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn model_space(&self) -> Result<ModelSpace, ConfigError> {
        self.model.parse().map_err(|e: bsq_core::Error| ConfigError::Invalid(e.to_string()))
    }

    /// Number of calibration `k` values.
    pub fn calibration_len(&self) -> usize {
        self.calibration.unwrap_or(self.k_list.len() / 2)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model_space()?;
        if self.k_list.is_empty() || self.k_list[0] == 0 {
            return Err(ConfigError::Invalid("k_list must hold positive levels".into()));
        }
        if self.k_list.windows(2).any(|p| p[0] >= p[1]) {
            return Err(ConfigError::Invalid("k_list must be strictly ascending".into()));
        }
        if self.w_grid.points().is_empty() {
            return Err(ConfigError::Invalid("w grid is empty".into()));
        }
        if self.w_grid.points().iter().flatten().any(|v| !v.is_finite()) {
            return Err(ConfigError::Invalid("w grid has non-finite entries".into()));
        }
        if self.ell > 2 {
            return Err(ConfigError::Invalid(format!("ell must be 0, 1 or 2, got {}", self.ell)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(ConfigError::Invalid(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.window_const > 0.0) || !(self.cutoff_const > 0.0) {
            return Err(ConfigError::Invalid("window and cutoff constants must be positive".into()));
        }
        if self.calibration_len() > self.k_list.len() {
            return Err(ConfigError::Invalid("calibration split exceeds k_list".into()));
        }
        if !(self.decay.exponent > 0.0) || self.decay.constants.iter().any(|c| !(*c > 0.0)) {
            return Err(ConfigError::Invalid("decay exponent and constants must be positive".into()));
        }
        Ok(())
    }
}
