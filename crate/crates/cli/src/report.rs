//! Report rows, CSV/JSON emission, and the pure verdict logic.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use bsq_core::C64;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::fit::{fit_rate, RateFit};
use crate::ExperimentError;

pub const CSV_HEADER: &str = "k,w_re,w_im,u_re,u_im,pred_re,pred_im,abs_err,rel_err,bound,in_window";

/// Slope thresholds for the relative error of the ℓ-truncated prediction.
pub const REL_RATE_THRESHOLD: [f64; 3] = [-0.45, -0.9, -1.35];
pub const PHASE_RATE_THRESHOLD: f64 = -0.45;
/// Allowed distance of the kernel-discrepancy slope from `d − 1`.
pub const DISCREPANCY_SLOPE_WINDOW: f64 = 0.2;
pub const BF_EXACT_TOL: f64 = 1e-12;
pub const SYMMETRY_TOL: f64 = 1e-10;
pub const DOUBLING_TOL: f64 = 1e-9;
pub const ON_BODY_TOL: f64 = 0.1;
pub const FAR_TOL: f64 = 1e-8;
/// Smallest level at which the far-point control applies.
pub const FAR_MIN_K: u32 = 128;
/// Normalized profile deviations below this count as converged.
pub const PROFILE_NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    KernelCheck,
    Quantize,
    Profile,
    Decay,
    Convergence,
}

/// One `(k, w)` record; field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub k: u32,
    pub w_re: f64,
    pub w_im: f64,
    pub u_re: f64,
    pub u_im: f64,
    pub pred_re: f64,
    pub pred_im: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub bound: f64,
    pub in_window: bool,
}

impl Row {
    pub fn new(k: u32, w: [f64; 2], u: C64, pred: C64, bound: f64, in_window: bool) -> Self {
        let abs_err = (u - pred).norm();
        Row {
            k,
            w_re: w[0],
            w_im: w[1],
            u_re: u.re,
            u_im: u.im,
            pred_re: pred.re,
            pred_im: pred.im,
            abs_err,
            rel_err: abs_err / u.norm(),
            bound,
            in_window,
        }
    }

    pub fn u(&self) -> C64 {
        C64::new(self.u_re, self.u_im)
    }

    pub fn pred(&self) -> C64 {
        C64::new(self.pred_re, self.pred_im)
    }

    pub fn within_bound(&self) -> bool {
        self.abs_err <= self.bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl From<bool> for Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
    pub fits: BTreeMap<String, RateFit>,
    pub verdicts: BTreeMap<String, Verdict>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a ExperimentConfig,
    rows: &'a [Row],
    fits: &'a BTreeMap<String, RateFit>,
    verdicts: &'a BTreeMap<String, Verdict>,
    versions: BTreeMap<&'static str, &'static str>,
}

impl ExperimentReport {
    /// Assembles a report, deriving fits and verdicts from the rows.
    pub fn from_rows(kind: ExperimentKind, config: ExperimentConfig, rows: Vec<Row>) -> Self {
        let (fits, verdicts) = evaluate(kind, &config, &rows);
        ExperimentReport {
            kind,
            config,
            rows,
            fits,
            verdicts,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| *v == Verdict::Pass)
    }

    pub fn to_csv(&self) -> Result<String, ExperimentError> {
        rows_to_csv(&self.rows)
    }

    pub fn to_json(&self) -> Result<String, ExperimentError> {
        let versions = BTreeMap::from([("bs-quantize", env!("CARGO_PKG_VERSION")), ("bsq-core", bsq_core::VERSION)]);
        // Output destinations do not define the experiment.
        let config = ExperimentConfig {
            out: None,
            svg: None,
            ..self.config.clone()
        };
        let doc = JsonReport {
            config: &config,
            rows: &self.rows,
            fits: &self.fits,
            verdicts: &self.verdicts,
            versions,
        };
        let mut s = serde_json::to_string_pretty(&doc).map_err(|e| ExperimentError::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

pub fn rows_to_csv(rows: &[Row]) -> Result<String, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| ExperimentError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ExperimentError::Io(e.to_string()))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<Row>, ExperimentError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(ExperimentError::Io(format!("unexpected CSV header `{}`", header.join(","))));
    }
    Ok(r.deserialize().collect::<Result<Vec<Row>, _>>()?)
}

/// Verdicts recomputed from an emitted CSV.
pub fn verdicts_from_csv(kind: ExperimentKind, config: &ExperimentConfig, csv: &str) -> Result<BTreeMap<String, Verdict>, ExperimentError> {
    Ok(evaluate(kind, config, &rows_from_csv(csv)?).1)
}

/// Rows per level, in emission order.
pub fn rows_per_k(kind: ExperimentKind, config: &ExperimentConfig) -> usize {
    let grid = config.w_grid.points().len();
    match kind {
        ExperimentKind::KernelCheck => grid + config.symmetry_samples,
        ExperimentKind::Decay => 2 + config.decay.constants.len(),
        _ => grid,
    }
}

fn dim(config: &ExperimentConfig) -> usize {
    config.model_space().map(|m| m.dim()).unwrap_or(1)
}

fn normalizer(k: u32, d: usize) -> f64 {
    (2.0 * k as f64 / PI).powf(d as f64 / 2.0)
}

/// Fits and verdicts as a pure function of config and rows.
pub fn evaluate(kind: ExperimentKind, config: &ExperimentConfig, rows: &[Row]) -> (BTreeMap<String, RateFit>, BTreeMap<String, Verdict>) {
    let mut fits = BTreeMap::new();
    let mut verdicts = BTreeMap::new();
    let per_k = rows_per_k(kind, config).max(1);
    let blocks: Vec<&[Row]> = rows.chunks(per_k).collect();
    let d = dim(config);
    let holdout_from = config.calibration_len();
    let calibrated = holdout_from > 0 && holdout_from < config.k_list.len();
    let mut fit_series = |name: &str, series: Vec<(f64, f64)>| fit_rate(&series).ok().inspect(|f| {
        fits.insert(name.to_owned(), f.clone());
    });

    match kind {
        ExperimentKind::Quantize => {}
        ExperimentKind::Profile => {
            let max_rel = per_level(&blocks, |r| r.in_window, |r| r.rel_err);
            if let Some(f) = fit_series("max_rel_err", max_rel) {
                verdicts.insert("rel_err_rate".into(), (f.slope <= REL_RATE_THRESHOLD[config.ell.min(2)]).into());
            }
            let phase = per_level(&blocks, |r| r.in_window && r.w_re * r.w_im != 0.0, |r| (r.u() / r.pred()).arg().abs());
            if let Some(f) = fit_series("max_phase_err", phase) {
                verdicts.insert("phase_rate".into(), (f.slope <= PHASE_RATE_THRESHOLD).into());
            }
            // Deviation of |u| from |pred| on the scale of the level's peak prediction.
            let peak = per_level(&blocks, |r| r.in_window, |r| r.pred().norm());
            let dev: Vec<(f64, f64)> = per_level(&blocks, |r| r.in_window, |r| (r.u().norm() - r.pred().norm()).abs())
                .into_iter()
                .zip(&peak)
                .map(|((k, e), (_, s))| (k, e / s))
                .collect();
            if dev.len() >= 2 {
                let monotone = dev.windows(2).all(|p| p[1].1 < p[0].1 || p[1].1 <= PROFILE_NOISE_FLOOR);
                verdicts.insert("profile_deviation_decreasing".into(), monotone.into());
            }
            if calibrated {
                verdicts.insert("remainder_envelope".into(), holdout(&blocks, holdout_from, |r| r.in_window).into());
            }
        }
        ExperimentKind::KernelCheck => {
            let grid = config.w_grid.points().len();
            let grid_rows = |b: &&[Row]| b[..grid.min(b.len())].to_vec();
            let grid_blocks: Vec<Vec<Row>> = blocks.iter().map(grid_rows).collect();
            let grid_slices: Vec<&[Row]> = grid_blocks.iter().map(|b| b.as_slice()).collect();
            let bf = config.model.starts_with("bf");
            if bf {
                let worst = rows_in(&grid_slices).map(|r| r.abs_err).fold(0.0, f64::max);
                verdicts.insert("gaussian_exact".into(), (worst <= BF_EXACT_TOL).into());
            } else {
                let disc = per_level(&grid_slices, |r| r.in_window, |r| r.abs_err);
                if let Some(f) = fit_series("max_abs_discrepancy", disc) {
                    let target = d as f64 - 1.0;
                    verdicts.insert("discrepancy_order".into(), ((f.slope - target).abs() <= DISCREPANCY_SLOPE_WINDOW).into());
                }
                if calibrated {
                    verdicts.insert("remainder_envelope".into(), holdout(&grid_slices, holdout_from, |r| r.in_window).into());
                }
            }
            if config.symmetry_samples > 0 {
                let ok = blocks.iter().flat_map(|b| &b[grid.min(b.len())..]).all(Row::within_bound);
                verdicts.insert("symmetry".into(), ok.into());
            }
        }
        ExperimentKind::Decay => {
            let on_body = blocks.iter().filter_map(|b| b.first()).all(Row::within_bound);
            verdicts.insert("on_body_control".into(), on_body.into());
            let far: Vec<&Row> = blocks.iter().filter_map(|b| b.get(1)).filter(|r| r.k >= FAR_MIN_K).collect();
            if !far.is_empty() {
                let ok = far.iter().all(|r| r.u().norm() <= FAR_TOL * normalizer(r.k, d));
                verdicts.insert("far_point_control".into(), ok.into());
            }
            for (ci, c) in config.decay.constants.iter().enumerate() {
                let series: Vec<(f64, f64)> = blocks
                    .iter()
                    .filter_map(|b| b.get(2 + ci))
                    .map(|r| (r.k as f64, r.u().norm() / normalizer(r.k, d)))
                    .collect();
                fit_series(&format!("decay_c{c}"), series.clone());
                if series.len() < 2 {
                    continue;
                }
                for n in 1..=config.decay.max_order {
                    let scaled: Vec<f64> = series.iter().map(|(k, v)| v * k.powi(n as i32)).collect();
                    let ok = scaled.windows(2).all(|p| p[1] < p[0]);
                    let name = format!("ratio_test_n{n}");
                    let prev = verdicts.get(&name).copied().unwrap_or(Verdict::Pass);
                    verdicts.insert(name, if prev == Verdict::Pass { ok.into() } else { Verdict::Fail });
                }
            }
        }
        ExperimentKind::Convergence => {
            verdicts.insert("quadrature_doubling".into(), rows.iter().all(Row::within_bound).into());
        }
    }
    (fits, verdicts)
}

fn rows_in<'a>(blocks: &'a [&'a [Row]]) -> impl Iterator<Item = &'a Row> {
    blocks.iter().flat_map(|b| b.iter())
}

/// Per-level maximum of `value` over rows passing `keep`.
fn per_level(blocks: &[&[Row]], keep: impl Fn(&Row) -> bool, value: impl Fn(&Row) -> f64) -> Vec<(f64, f64)> {
    blocks
        .iter()
        .filter_map(|b| {
            let vals: Vec<f64> = b.iter().filter(|r| keep(r)).map(&value).collect();
            (!vals.is_empty()).then(|| (b[0].k as f64, vals.into_iter().fold(f64::NEG_INFINITY, f64::max)))
        })
        .collect()
}

fn holdout(blocks: &[&[Row]], from: usize, keep: impl Fn(&Row) -> bool) -> bool {
    blocks.iter().skip(from).flat_map(|b| b.iter()).filter(|r| keep(r)).all(Row::within_bound)
}
