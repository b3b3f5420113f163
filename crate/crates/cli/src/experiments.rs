//! Experiment runners. Grid points at one level evaluate in parallel and are
//! gathered in grid order.

use std::f64::consts::PI;

use bsq_core::asymptotics::predict::remainder_envelope;
use bsq_core::asymptotics::{szego_remainder_bound, Predictor};
use bsq_core::geometry::TangentVector;
use bsq_core::hardy::ProjectorKernel;
use bsq_core::legendrian::{default_nodes, quantize, Component, Legendrian};
use bsq_core::model::{CircleBundlePoint, HeisenbergChart, ModelSpace};
use bsq_core::quadrature::QuadratureSpec;
use bsq_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{tangent, ExperimentConfig};
use crate::report::{ExperimentKind, ExperimentReport, Row, BF_EXACT_TOL, DOUBLING_TOL, FAR_TOL, ON_BODY_TOL, SYMMETRY_TOL};
use crate::setup::Setup;
use crate::{ConfigError, ExperimentError};

pub fn run(kind: ExperimentKind, config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    match kind {
        ExperimentKind::KernelCheck => run_kernel_check(config),
        ExperimentKind::Quantize => run_quantize(config),
        ExperimentKind::Profile => run_profile(config),
        ExperimentKind::Decay => run_decay(config),
        ExperimentKind::Convergence => run_convergence(config),
    }
}

fn in_window(w: [f64; 2], k: u32, c: f64) -> bool {
    w[0].hypot(w[1]) <= c * (k as f64).powf(1.0 / 6.0)
}

fn normalizer(k: u32, d: usize) -> f64 {
    (2.0 * k as f64 / PI).powf(d as f64 / 2.0)
}

fn quadrature(config: &ExperimentConfig) -> QuadratureSpec {
    QuadratureSpec {
        nodes: config.quad_nodes,
        latitude_nodes: None,
    }
}

fn at(k: u32, w: [f64; 2]) -> impl Fn(bsq_core::Error) -> ExperimentError {
    move |source| ExperimentError::At { k, w, source }
}

/// Observation at one grid point before the bound is known.
struct Sample {
    k: u32,
    w: [f64; 2],
    u: C64,
    pred: C64,
    /// Remainder envelope with unit constant.
    envelope: f64,
    in_window: bool,
}

fn observe(setup: &Setup, config: &ExperimentConfig, predictor: &Predictor, kern: &ProjectorKernel, k: u32, w: [f64; 2]) -> Result<Sample, ExperimentError> {
    let d = setup.model.dim();
    let v = tangent(w, d);
    let x = setup.branches.displaced(&v, k).map_err(at(k, w))?;
    let u = quantize(kern, &setup.legendrian, &x, &quadrature(config)).map_err(at(k, w))?;
    let pred = predictor.eval(&v, k).map_err(at(k, w))?;
    let perp: Vec<f64> = pred.terms.iter().map(|t| t.perpendicular.norm_sqr()).collect();
    Ok(Sample {
        k,
        w,
        u,
        pred: pred.value,
        envelope: remainder_envelope(k, config.ell, d, &perp, 1.0, config.epsilon),
        in_window: pred.in_window,
    })
}

/// Largest in-window `|u − pred| / envelope` over the calibration levels.
fn calibrate(samples: &[Sample], config: &ExperimentConfig) -> f64 {
    let split = config.calibration_len();
    if split == 0 {
        return f64::INFINITY;
    }
    let last = config.k_list[split - 1];
    samples
        .iter()
        .filter(|s| s.k <= last && s.in_window && s.envelope > 0.0)
        .map(|s| (s.u - s.pred).norm() / s.envelope)
        .fold(0.0, f64::max)
}

fn kernel(model: ModelSpace, k: u32) -> Result<ProjectorKernel, ExperimentError> {
    ProjectorKernel::new(model, k).map_err(at(k, [0.0, 0.0]))
}

fn sweep(setup: &Setup, config: &ExperimentConfig) -> Result<Vec<Sample>, ExperimentError> {
    let predictor = Predictor::new(setup.branches.clone(), config.ell)?.with_window_const(config.window_const);
    let points = config.w_grid.points();
    let mut samples = Vec::with_capacity(points.len() * config.k_list.len());
    for &k in &config.k_list {
        let kern = kernel(setup.model, k)?;
        let level: Vec<Sample> = points
            .par_iter()
            .map(|w| observe(setup, config, &predictor, &kern, k, *w))
            .collect::<Result<_, _>>()?;
        samples.extend(level);
    }
    Ok(samples)
}

/// Quantized states against the ℓ-truncated prediction, with the remainder
/// constant calibrated on the lower levels.
pub fn run_profile(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let setup = Setup::new(config)?;
    let samples = sweep(&setup, config)?;
    let c = calibrate(&samples, config);
    let rows = samples
        .iter()
        .map(|s| Row::new(s.k, s.w, s.u, s.pred, c * s.envelope, s.in_window))
        .collect();
    Ok(ExperimentReport::from_rows(ExperimentKind::Profile, config.clone(), rows))
}

/// Quantized states with the unit-constant remainder envelope; no verdicts.
pub fn run_quantize(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let setup = Setup::new(config)?;
    let rows = sweep(&setup, config)?
        .iter()
        .map(|s| Row::new(s.k, s.w, s.u, s.pred, s.envelope, s.in_window))
        .collect();
    Ok(ExperimentReport::from_rows(ExperimentKind::Quantize, config.clone(), rows))
}

/// Smallest base distance from `x` to `Λ`, by dense sampling of loops.
fn distance_to(legendrian: &Legendrian, x: &CircleBundlePoint) -> f64 {
    const SAMPLES: usize = 4096;
    let model = legendrian.model();
    legendrian
        .components()
        .iter()
        .map(|c| match c {
            Component::Loop(l) => (0..SAMPLES)
                .map(|i| model.base_distance(x, &l.point(2.0 * PI * i as f64 / SAMPLES as f64)))
                .fold(f64::INFINITY, f64::min),
            Component::Plane(p) => {
                let CircleBundlePoint::Flat { z, .. } = x else { unreachable!("planes live in flat models") };
                let t: Vec<f64> = z.iter().zip(p.offset()).map(|(a, b)| a.im - b.im).collect();
                model.base_distance(x, &p.point(&t))
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Chart radius `r` along the perpendicular axis at which `x + r` lies at
/// base distance `target` from `Λ`.
fn far_radius(setup: &Setup, target: f64) -> Result<f64, ExperimentError> {
    let d = setup.model.dim();
    let chart = &setup.branches.eval_chart;
    let dist = |r: f64| -> Result<f64, ExperimentError> {
        let x = chart.eval(&tangent([r, 0.0], d), 0.0)?;
        Ok(distance_to(&setup.legendrian, &x))
    };
    let mut hi = chart.radius().min(4.0 * target + 1.0) * (1.0 - 1e-9);
    if dist(hi)? < target {
        return Err(ConfigError::Invalid(format!("no point at base distance {target} from the Legendrian inside the chart")).into());
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if dist(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Decay away from `S¹·Λ`: per level an on-body control at `w = 0`, a far
/// point at fixed base distance, and `‖w⊥‖ = c·k^a` for each constant.
pub fn run_decay(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let setup = Setup::new(config)?;
    let d = setup.model.dim();
    let predictor = Predictor::new(setup.branches.clone(), config.ell)?.with_window_const(config.window_const);
    let far = far_radius(&setup, config.decay.far_distance)?;
    let mut rows = Vec::new();
    for &k in &config.k_list {
        let kern = kernel(setup.model, k)?;
        let sk = (k as f64).sqrt();
        let mut points = vec![[0.0, 0.0], [far * sk, 0.0]];
        points.extend(config.decay.constants.iter().map(|c| [c * (k as f64).powf(config.decay.exponent), 0.0]));
        let samples: Vec<Sample> = points
            .par_iter()
            .map(|w| observe(&setup, config, &predictor, &kern, k, *w))
            .collect::<Result<_, _>>()?;
        for (i, s) in samples.iter().enumerate() {
            let bound = match i {
                0 => ON_BODY_TOL * s.pred.norm(),
                1 => FAR_TOL * normalizer(k, d),
                _ => s.envelope,
            };
            rows.push(Row::new(k, s.w, s.u, s.pred, bound, s.in_window));
        }
    }
    Ok(ExperimentReport::from_rows(ExperimentKind::Decay, config.clone(), rows))
}

/// Fixed base point for kernel checks, off the origin of the base but at
/// fiber angle 0 so that `k·θ` adds no phase rounding.
fn kernel_base(model: &ModelSpace) -> Result<CircleBundlePoint, ExperimentError> {
    let origin = model.origin();
    Ok(model.chart_at(&origin).eval(&tangent([0.35, -0.15], model.dim()), 0.0)?)
}

fn universal_gaussian(k: u32, d: usize, p: f64, qw: f64, q: f64) -> C64 {
    (k as f64 / PI).powi(d as i32) * C64::new(-0.5 * p * p - 0.5 * (qw - q) * (qw - q), -p * q).exp()
}

fn chart_point(chart: &HeisenbergChart, w: &TangentVector, k: u32) -> bsq_core::Result<CircleBundlePoint> {
    chart.eval(&w.scale(C64::new(1.0 / (k as f64).sqrt(), 0.0)), 0.0)
}

/// The kernel at `x + w/√k` against `x − i·Im(w)/√k` versus the universal
/// Heisenberg Gaussian, then a seeded Hermitian/equivariance sweep.
pub fn run_kernel_check(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    config.validate()?;
    let model = config.model_space()?;
    let d = model.dim();
    let flat = matches!(model.kind(), bsq_core::model::ModelKind::BargmannFock { .. });
    let chart = model.chart_at(&kernel_base(&model)?);
    let points = config.w_grid.points();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut grid = Vec::new();
    let mut symmetry = Vec::new();
    for &k in &config.k_list {
        let kern = kernel(model, k)?;
        let level: Vec<Sample> = points
            .par_iter()
            .map(|&w| {
                let (p, qw) = (w[0], w[1]);
                let q = -qw;
                let x = chart_point(&chart, &tangent(w, d), k).map_err(at(k, w))?;
                let y = chart_point(&chart, &tangent([0.0, q], d), k).map_err(at(k, w))?;
                let pad = |v: f64| {
                    let mut out = vec![0.0; d];
                    out[0] = v;
                    out
                };
                Ok(Sample {
                    k,
                    w,
                    u: kern.eval(&x, &y),
                    pred: universal_gaussian(k, d, p, qw, q),
                    envelope: szego_remainder_bound(k, 0, &pad(p), &pad(q), &pad(qw), 1.0, config.epsilon),
                    in_window: in_window(w, k, config.window_const),
                })
            })
            .collect::<Result<_, ExperimentError>>()?;
        grid.push(level);

        let cases: Vec<(TangentVector, TangentVector, C64)> = (0..config.symmetry_samples)
            .map(|_| {
                let mut random = || TangentVector::new((0..d).map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect());
                let (a, b) = (random(), random());
                (a, b, C64::from_polar(1.0, rng.gen_range(-PI..PI)))
            })
            .collect();
        let level: Vec<Row> = cases
            .par_iter()
            .map(|(a, b, g)| {
                let w = [a.components()[0].re, a.components()[0].im];
                let x = chart_point(&chart, a, k).map_err(at(k, w))?;
                let y = chart_point(&chart, b, k).map_err(at(k, w))?;
                let u = kern.eval(&model.circle_act(*g, &x), &y);
                let pred = g.powi(k as i32) * kern.eval(&y, &x).conj();
                let bound = SYMMETRY_TOL * pred.norm().max(1e-3 * (k as f64 / PI).powi(d as i32));
                Ok(Row::new(k, w, u, pred, bound, false))
            })
            .collect::<Result<_, ExperimentError>>()?;
        symmetry.push(level);
    }

    let flat_samples: Vec<Sample> = grid.into_iter().flatten().collect();
    let c = if flat { 0.0 } else { calibrate(&flat_samples, config) };
    let mut rows = Vec::new();
    let per_k = points.len();
    for (level, sym) in flat_samples.chunks(per_k).zip(symmetry) {
        rows.extend(level.iter().map(|s| {
            let bound = if flat { BF_EXACT_TOL } else { c * s.envelope };
            Row::new(s.k, s.w, s.u, s.pred, bound, s.in_window)
        }));
        rows.extend(sym);
    }
    Ok(ExperimentReport::from_rows(ExperimentKind::KernelCheck, config.clone(), rows))
}

/// Quadrature convergence: default node count against twice as many nodes.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let setup = Setup::new(config)?;
    let d = setup.model.dim();
    let points = config.w_grid.points();
    let mut rows = Vec::new();
    for &k in &config.k_list {
        let kern = kernel(setup.model, k)?;
        let nodes = config.quad_nodes.unwrap_or_else(|| default_nodes(&setup.legendrian.components()[0], k));
        let (coarse, fine) = (QuadratureSpec::with_nodes(nodes), QuadratureSpec::with_nodes(2 * nodes));
        let level: Vec<Row> = points
            .par_iter()
            .map(|&w| {
                let x = setup.branches.displaced(&tangent(w, d), k).map_err(at(k, w))?;
                let u = quantize(&kern, &setup.legendrian, &x, &coarse).map_err(at(k, w))?;
                let reference = quantize(&kern, &setup.legendrian, &x, &fine).map_err(at(k, w))?;
                Ok(Row::new(k, w, u, reference, DOUBLING_TOL * normalizer(k, d), in_window(w, k, config.window_const)))
            })
            .collect::<Result<_, ExperimentError>>()?;
        rows.extend(level);
    }
    Ok(ExperimentReport::from_rows(ExperimentKind::Convergence, config.clone(), rows))
}
