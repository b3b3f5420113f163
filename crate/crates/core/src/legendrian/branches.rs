use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{Component, FlatLegendrian, Legendrian, LegendrianLoop, FD_STEP};
use crate::asymptotics::poly::Poly;
use crate::geometry::{LagrangianFrame, TangentVector};
use crate::model::{CircleBundlePoint, HeisenbergChart, ModelKind, ModelSpace};
use crate::{Error, Result, C64};

/// `4C·k^{−1/3}`.
pub fn branch_cutoff(k: u32, c: f64) -> f64 {
    4.0 * c * (k as f64).powf(-1.0 / 3.0)
}

/// Taylor coefficients at a branch point, in the adapted chart coordinate `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorData {
    /// Highest retained degree.
    pub order: u32,
    /// Fiber coordinate of `Λ`, vanishing to third order.
    pub phase: Poly,
    /// `dens_Λ / |dq|`, with constant term 1.
    pub density: Poly,
    /// `F_λ` in terms of `q`.
    pub weight: Poly,
    /// Residual transverse coordinate `p(q)` of `Λ` in the chart; zero for
    /// geodesic loops and planes.
    pub straightening: Poly,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub component: usize,
    /// Loop parameter `t_j`, or plane coordinates.
    pub parameter: Vec<f64>,
    /// `r_h(x) = x_j`.
    pub h: C64,
    pub point: CircleBundlePoint,
    /// Base distance between `x` and `x_j`.
    pub offset: f64,
    /// Tangent space of `r_{h^{-1}}(Λ)` at `x`, in the evaluation chart.
    pub frame: LagrangianFrame,
    /// Adapted chart at `x_j`: `Λ` is tangent to the imaginary axes.
    pub chart: HeisenbergChart,
    pub taylor: TaylorData,
}

/// Branches of `Λ` over a base point `x`.
#[derive(Debug, Clone)]
pub struct BranchSet {
    pub base: CircleBundlePoint,
    pub cutoff: f64,
    /// Chart at `x` in which the first branch is tangent to `iℝ^d`.
    pub eval_chart: HeisenbergChart,
    pub branches: Vec<Branch>,
}

impl BranchSet {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn model(&self) -> &ModelSpace {
        self.eval_chart.model()
    }

    /// `x + w/√k` in the evaluation chart.
    pub fn displaced(&self, w: &TangentVector, k: u32) -> Result<CircleBundlePoint> {
        self.eval_chart.eval(&w.scale(C64::new(1.0 / (k as f64).sqrt(), 0.0)), 0.0)
    }
}

const DEFAULT_ORDER: u32 = 4;
const SCAN_SAMPLES: usize = 720;
const FIT_SAMPLES: usize = 25;
const FIT_DEGREE: usize = 12;
const FIT_REACH: f64 = 0.2;
const ADAPTED_TOL: f64 = 1e-6;

pub fn find_branches(legendrian: &Legendrian, x: &CircleBundlePoint, cutoff: f64) -> Result<BranchSet> {
    find_branches_to_order(legendrian, x, cutoff, DEFAULT_ORDER)
}

/// Locates the points of `Λ` over base points within `cutoff` of `π(x)` and
/// extracts adapted-chart Taylor data up to degree `order`.
pub fn find_branches_to_order(legendrian: &Legendrian, x: &CircleBundlePoint, cutoff: f64, order: u32) -> Result<BranchSet> {
    let model = *legendrian.model();
    let mut hits: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut nearest = f64::INFINITY;
    for (ci, c) in legendrian.components().iter().enumerate() {
        match c {
            Component::Loop(lp) => {
                let (minima, closest) = loop_minima(lp, x);
                nearest = nearest.min(closest);
                for (t, dist) in minima {
                    nearest = nearest.min(dist);
                    if dist < cutoff {
                        hits.push((ci, vec![t]));
                    }
                }
            }
            Component::Plane(pl) => {
                let (t, dist) = plane_foot(pl, x);
                nearest = nearest.min(dist);
                if dist < cutoff {
                    hits.push((ci, t));
                }
            }
        }
    }
    if hits.is_empty() {
        return Err(Error::NoBranch { cutoff, nearest });
    }

    let base_chart = model.chart_at(x);
    let eval_chart = match &legendrian.components()[hits[0].0] {
        Component::Loop(lp) => {
            let tau = chart_tangent(&base_chart, lp, hits[0].1[0])?;
            base_chart.with_unitary(&[vec![C64::new(0.0, -1.0) * tau / tau.norm()]])
        }
        Component::Plane(_) => base_chart,
    };

    let mut branches = Vec::with_capacity(hits.len());
    for (ci, t) in hits {
        let branch = match &legendrian.components()[ci] {
            Component::Loop(lp) => loop_branch(lp, ci, t[0], x, &eval_chart, order)?,
            Component::Plane(pl) => plane_branch(pl, ci, t, x, order),
        };
        branches.push(branch);
    }
    Ok(BranchSet {
        base: x.clone(),
        cutoff,
        eval_chart,
        branches,
    })
}

/// Local minima of `t ↦ dist(π(x), π(Λ(t)))`, refined by golden section.
/// Also returns the smallest sampled distance.
fn loop_minima(lp: &LegendrianLoop, x: &CircleBundlePoint) -> (Vec<(f64, f64)>, f64) {
    let model = lp.model();
    let step = 2.0 * PI / SCAN_SAMPLES as f64;
    let dist = |t: f64| model.base_distance(x, &lp.base_point(t));
    let samples: Vec<f64> = (0..SCAN_SAMPLES).map(|i| dist(i as f64 * step)).collect();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for i in 0..SCAN_SAMPLES {
        let prev = samples[(i + SCAN_SAMPLES - 1) % SCAN_SAMPLES];
        let next = samples[(i + 1) % SCAN_SAMPLES];
        if !(samples[i] <= prev && samples[i] < next) {
            continue;
        }
        let t0 = i as f64 * step;
        let (t, d) = golden_section(&dist, t0 - step, t0 + step);
        let t = t.rem_euclid(2.0 * PI);
        let duplicate = out.iter().any(|(s, _)| {
            let gap = (s - t).abs();
            gap.min(2.0 * PI - gap) < 1e-6
        });
        if !duplicate {
            out.push((t, d));
        }
    }
    (out, samples.iter().copied().fold(f64::INFINITY, f64::min))
}

fn golden_section(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

fn plane_foot(pl: &FlatLegendrian, x: &CircleBundlePoint) -> (Vec<f64>, f64) {
    match x {
        CircleBundlePoint::Flat { z, .. } => {
            let t = z.iter().zip(pl.offset()).map(|(a, c)| a.im - c.im).collect();
            let dist = z.iter().zip(pl.offset()).map(|(a, c)| (a.re - c.re).powi(2)).sum::<f64>().sqrt();
            (t, dist)
        }
        _ => panic!("model mismatch"),
    }
}

/// `d/dt` of the chart coordinate `w` of `Λ(t)`, in one complex dimension.
fn chart_tangent(chart: &HeisenbergChart, lp: &LegendrianLoop, t: f64) -> Result<C64> {
    let w = |s: f64| -> Result<C64> { Ok(chart.inverse(&lp.point(t + s))?.0.components()[0]) };
    let h = FD_STEP;
    Ok((8.0 * (w(h)? - w(-h)?) - (w(2.0 * h)? - w(-2.0 * h)?)) / (12.0 * h))
}

fn loop_branch(lp: &LegendrianLoop, component: usize, t: f64, x: &CircleBundlePoint, eval_chart: &HeisenbergChart, order: u32) -> Result<Branch> {
    let model = *lp.model();
    let point = lp.point(t);
    let (h, offset) = model.fiber_offset(x, &point);

    let tau_eval = chart_tangent(eval_chart, lp, t)?;
    let frame = LagrangianFrame::line(tau_eval / tau_eval.norm())?;

    let raw = model.chart_at(&point);
    let tau = chart_tangent(&raw, lp, t)?;
    let chart = raw.with_unitary(&[vec![C64::new(0.0, -1.0) * tau / tau.norm()]]);

    let taylor = loop_taylor(lp, &chart, t, order)?;
    Ok(Branch {
        component,
        parameter: vec![t],
        h,
        point,
        offset,
        frame,
        chart,
        taylor,
    })
}

/// Least-squares fit of `ys` by a polynomial of degree `degree` in `xs ∈ [−1, 1]`.
fn fit(xs: &[f64], ys: &[C64], degree: usize) -> Result<Vec<C64>> {
    let a = DMatrix::from_fn(xs.len(), degree + 1, |i, m| xs[i].powi(m as i32));
    let svd = a.svd(true, true);
    let solve = |v: Vec<f64>| -> Result<Vec<f64>> {
        svd.solve(&DVector::from_vec(v), 1e-14)
            .map(|s| s.iter().copied().collect())
            .map_err(|e| Error::NumericalDegeneracy(format!("Taylor fit: {e}")))
    };
    let re = solve(ys.iter().map(|y| y.re).collect())?;
    let im = solve(ys.iter().map(|y| y.im).collect())?;
    Ok(re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect())
}

fn derivative(coeffs: &[C64], x: f64) -> C64 {
    coeffs.iter().enumerate().skip(1).map(|(m, c)| c * m as f64 * x.powi(m as i32 - 1)).sum()
}

fn loop_taylor(lp: &LegendrianLoop, chart: &HeisenbergChart, t: f64, order: u32) -> Result<TaylorData> {
    let reach = FIT_REACH / lp.speed(t);
    let taus: Vec<f64> = (0..FIT_SAMPLES)
        .map(|i| (PI * (i as f64 + 0.5) / FIT_SAMPLES as f64).cos())
        .collect();
    let mut qs = Vec::with_capacity(FIT_SAMPLES);
    let mut ps = Vec::with_capacity(FIT_SAMPLES);
    let mut thetas = Vec::with_capacity(FIT_SAMPLES);
    let mut weights = Vec::with_capacity(FIT_SAMPLES);
    let mut speeds = Vec::with_capacity(FIT_SAMPLES);
    for tau in &taus {
        let s = t + reach * tau;
        let (w, theta) = chart.inverse(&lp.point(s))?;
        let w = w.components()[0];
        qs.push(w.im);
        ps.push(C64::new(w.re, 0.0));
        thetas.push(C64::new(theta, 0.0));
        weights.push(lp.weight(s));
        speeds.push(lp.speed(s));
    }
    let q_fit = fit(&taus, &qs.iter().map(|q| C64::new(*q, 0.0)).collect::<Vec<_>>(), FIT_DEGREE)?;
    let densities: Vec<C64> = taus
        .iter()
        .zip(&speeds)
        .map(|(tau, s)| C64::new(s * reach / derivative(&q_fit, *tau).re, 0.0))
        .collect();

    let scale = qs.iter().fold(0.0f64, |m, q| m.max(q.abs()));
    let us: Vec<f64> = qs.iter().map(|q| q / scale).collect();
    let taylor = |ys: &[C64]| -> Result<Vec<C64>> {
        let c = fit(&us, ys, FIT_DEGREE)?;
        Ok(c.iter().enumerate().map(|(m, c)| c / scale.powi(m as i32)).collect())
    };
    let phase = taylor(&thetas)?;
    let density = taylor(&densities)?;
    let weight = taylor(&weights)?;
    let straight = taylor(&ps)?;

    if phase[..3].iter().any(|c| c.norm() > ADAPTED_TOL) {
        return Err(Error::NotLegendrian(format!(
            "fiber coordinate does not vanish to third order: {:?}",
            &phase[..3]
        )));
    }
    if (density[0] - 1.0).norm() > ADAPTED_TOL || straight[..2].iter().any(|c| c.norm() > ADAPTED_TOL) {
        return Err(Error::NotLegendrian(format!(
            "chart is not adapted: density {} and transverse part {:?}",
            density[0],
            &straight[..2]
        )));
    }
    let to_poly = |c: &[C64], from: usize, real: bool| {
        let mut p = Poly::zero(1);
        for (m, v) in c.iter().enumerate().take(order as usize + 1).skip(from) {
            p.add_term(vec![m as u32], if real { C64::new(v.re, 0.0) } else { *v });
        }
        p
    };
    let mut density_poly = to_poly(&density, 1, true);
    density_poly.add_term(vec![0], C64::new(1.0, 0.0));
    Ok(TaylorData {
        order,
        phase: to_poly(&phase, 3, true),
        density: density_poly,
        weight: to_poly(&weight, 0, false),
        straightening: to_poly(&straight, 2, true),
    })
}

fn plane_branch(pl: &FlatLegendrian, component: usize, t: Vec<f64>, x: &CircleBundlePoint, order: u32) -> Branch {
    let model = *pl.model();
    let d = t.len();
    let point = pl.point(&t);
    let (h, offset) = model.fiber_offset(x, &point);
    let chart = model.chart_at(&point);

    // F(t + q) = P(t + q)·e^{−‖a‖²/2σ²}·exp(−(2a·q + ‖q‖²)/2σ²), a = t − center.
    let s2 = pl.sigma() * pl.sigma();
    let a: Vec<f64> = t.iter().zip(pl.weight_center()).map(|(u, c)| u - c).collect();
    let mut exponent = Poly::zero(d);
    for (i, ai) in a.iter().enumerate() {
        let mut e = vec![0; d];
        e[i] = 1;
        exponent.add_term(e.clone(), C64::new(-ai / s2, 0.0));
        e[i] = 2;
        exponent.add_term(e, C64::new(-0.5 / s2, 0.0));
    }
    let gauss0 = (-a.iter().map(|v| v * v).sum::<f64>() / (2.0 * s2)).exp();
    let weight = (&pl.weight_poly().shift(&t) * &exponent.exp_truncated(order))
        .truncate(order)
        .scale(C64::new(gauss0, 0.0));

    debug_assert!(matches!(model.kind(), ModelKind::BargmannFock { .. }));
    Branch {
        component,
        parameter: t,
        h,
        point,
        offset,
        frame: LagrangianFrame::imaginary_axes(d),
        chart,
        taylor: TaylorData {
            order,
            phase: Poly::zero(d),
            density: Poly::one(d),
            weight,
            straightening: Poly::zero(d),
        },
    }
}
