//! Loop presets and the geometric data shared by every experiment.

use std::f64::consts::PI;
use std::str::FromStr;

use bsq_core::asymptotics::Poly;
use bsq_core::legendrian::{branch_cutoff, find_branches, presets, BranchSet, Component, Legendrian};
use bsq_core::model::{CircleBundlePoint, ModelKind, ModelSpace};
use bsq_core::C64;

use crate::config::ExperimentConfig;
use crate::{ConfigError, ExperimentError};

/// A named Legendrian fixture with its numeric parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Cp1Equator,
    /// Latitude enclosing the given fraction of the sphere's area.
    Cp1Latitude(f64),
    /// Equator together with its fiber rotation by `e^{i·angle}`.
    Cp1DoubleBranch(f64),
    BfCircle(f64),
    BfPlane {
        sigma: f64,
        center: f64,
        offset: C64,
        /// Weight polynomial in the first plane coordinate.
        poly: Vec<f64>,
    },
}

pub const PRESET_HELP: &[(&str, &str)] = &[
    ("cp1-equator", "great circle on cp1:<even D>, unit weight"),
    ("cp1-latitude:<fraction>", "latitude enclosing <fraction> of the area; D·fraction must be an integer"),
    ("cp1-double-branch[:<angle>]", "equator plus its fiber rotation by e^{i·angle} (default 2π/3)"),
    ("bf-circle[:<radius>]", "circle |z| = radius on bf:1 (default 1)"),
    ("bf-plane[:sigma=<s>,center=<t>,offset=<re>/<im>,poly=<c0>/<c1>/…]", "translate of iℝ^d with weight poly·Gaussian"),
];

fn number(s: &str, what: &str) -> Result<f64, ConfigError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::Invalid(format!("bad {what} `{s}`")))
}

impl FromStr for Preset {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let single = |default: Option<f64>, what: &str| match (params, default) {
            (Some(p), _) => number(p, what),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(ConfigError::Invalid(format!("preset `{name}` needs a {what}"))),
        };
        match name {
            "cp1-equator" if params.is_none() => Ok(Preset::Cp1Equator),
            "cp1-latitude" => Ok(Preset::Cp1Latitude(single(None, "area fraction")?)),
            "cp1-double-branch" => Ok(Preset::Cp1DoubleBranch(single(Some(2.0 * PI / 3.0), "angle")?)),
            "bf-circle" => Ok(Preset::BfCircle(single(Some(1.0), "radius")?)),
            "bf-plane" => {
                let mut out = Preset::BfPlane {
                    sigma: 1.0,
                    center: 0.0,
                    offset: C64::new(0.0, 0.0),
                    poly: vec![1.0],
                };
                let Preset::BfPlane { sigma, center, offset, poly } = &mut out else { unreachable!() };
                for item in params.into_iter().flat_map(|p| p.split(',')).filter(|i| !i.trim().is_empty()) {
                    let (key, value) = item
                        .split_once('=')
                        .ok_or_else(|| ConfigError::Invalid(format!("bf-plane parameter `{item}` is not key=value")))?;
                    match key.trim() {
                        "sigma" => *sigma = number(value, "sigma")?,
                        "center" => *center = number(value, "center")?,
                        "offset" => {
                            let (re, im) = value.split_once('/').unwrap_or((value, "0"));
                            *offset = C64::new(number(re, "offset")?, number(im, "offset")?);
                        }
                        "poly" => *poly = value.split('/').map(|c| number(c, "coefficient")).collect::<Result<_, _>>()?,
                        other => return Err(ConfigError::Invalid(format!("unknown bf-plane parameter `{other}`"))),
                    }
                }
                if !(*sigma > 0.0) {
                    return Err(ConfigError::Invalid("bf-plane sigma must be positive".into()));
                }
                Ok(out)
            }
            _ => Err(ConfigError::Invalid(format!("unknown loop preset `{s}`"))),
        }
    }
}

impl Preset {
    pub fn build(&self, model: &ModelSpace) -> Result<Legendrian, ExperimentError> {
        let mismatch = || ConfigError::Invalid(format!("preset {self:?} does not live on {model}"));
        let legendrian = match (self, model.kind()) {
            (Preset::Cp1Equator, ModelKind::ProjectiveLine { .. }) => presets::cp1_equator(model)?.into(),
            (Preset::Cp1Latitude(f), ModelKind::ProjectiveLine { .. }) => presets::cp1_latitude(model, *f)?.into(),
            (Preset::Cp1DoubleBranch(angle), ModelKind::ProjectiveLine { .. }) => presets::cp1_double_branch(model, C64::from_polar(1.0, *angle))?,
            (Preset::BfCircle(r), ModelKind::BargmannFock { dim: 1 }) => presets::bf_circle(model, *r)?.into(),
            (Preset::BfPlane { sigma, center, offset, poly }, ModelKind::BargmannFock { dim }) => {
                let mut off = vec![C64::new(0.0, 0.0); dim];
                off[0] = *offset;
                let mut centers = vec![0.0; dim];
                centers[0] = *center;
                let weight = Poly::univariate(poly).embed(dim, &[0]);
                Legendrian::from(presets::bf_plane(model, off, weight, centers, *sigma)?)
            }
            _ => return Err(mismatch().into()),
        };
        Ok(legendrian)
    }
}

/// Model, Legendrian, base point `x` on its first component and the
/// branches over `x`.
#[derive(Debug, Clone)]
pub struct Setup {
    pub model: ModelSpace,
    pub legendrian: Legendrian,
    pub base: CircleBundlePoint,
    pub branches: BranchSet,
}

impl Setup {
    pub fn new(config: &ExperimentConfig) -> Result<Self, ExperimentError> {
        config.validate()?;
        let model = config.model_space()?;
        let legendrian = config.loop_preset.parse::<Preset>()?.build(&model)?;
        let t = config.base_parameter;
        let base = match &legendrian.components()[0] {
            Component::Loop(l) => l.point(t),
            Component::Plane(p) => {
                let mut coords = vec![0.0; model.dim()];
                coords[0] = t;
                p.point(&coords)
            }
        };
        let cutoff = branch_cutoff(config.k_list[0], config.cutoff_const);
        let branches = find_branches(&legendrian, &base, cutoff)?;
        Ok(Setup {
            model,
            legendrian,
            base,
            branches,
        })
    }
}
