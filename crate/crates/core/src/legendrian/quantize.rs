use std::f64::consts::PI;

use super::{Component, FlatLegendrian, Legendrian, LegendrianLoop};
use crate::hardy::{KernelRow, ProjectorKernel};
use crate::model::CircleBundlePoint;
use crate::quadrature::QuadratureSpec;
use crate::{Error, Result, C64};

/// Smallest accepted node count along a loop at level `k`.
pub fn loop_node_floor(k: u32) -> usize {
    64.max(8 * k as usize)
}

/// Node count used when the quadrature spec leaves it open.
pub fn default_nodes(component: &Component, k: u32) -> usize {
    match component {
        Component::Loop(lp) => loop_node_floor(k).max(4 * lp.model().degree().unwrap_or(2) as usize * k as usize),
        Component::Plane(_) => PLANE_DEFAULT_NODES,
    }
}

const PLANE_NODE_FLOOR: usize = 64;
const PLANE_DEFAULT_NODES: usize = 128;
/// Truncation of flat Legendrians, in standard deviations of the integrand.
const PLANE_HALF_WIDTH: f64 = 10.0;

/// `u_k(x) = ∫_Λ Π_k(x, y) F_λ(y) dens_Λ(y)`, one quadrature per component.
pub fn quantize(kern: &ProjectorKernel, legendrian: &Legendrian, x: &CircleBundlePoint, quadrature: &QuadratureSpec) -> Result<C64> {
    if kern.model() != legendrian.model() {
        return Err(Error::ModelMismatch(format!(
            "kernel on {} but Legendrian in {}",
            kern.model(),
            legendrian.model()
        )));
    }
    let row = kern.row(x);
    let mut total = C64::new(0.0, 0.0);
    for c in legendrian.components() {
        total += match c {
            Component::Loop(l) => quantize_loop(&row, kern.level(), l, quadrature.nodes.unwrap_or(default_nodes(c, kern.level())))?,
            Component::Plane(p) => quantize_plane(&row, kern.level(), p, x, quadrature.nodes.unwrap_or(PLANE_DEFAULT_NODES))?,
        };
    }
    Ok(total)
}

fn quantize_loop(row: &KernelRow<'_>, k: u32, lp: &LegendrianLoop, n: usize) -> Result<C64> {
    let floor = loop_node_floor(k);
    if n < floor {
        return Err(Error::UnderResolved { nodes: n, required: floor });
    }
    let step = 2.0 * PI / n as f64;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let t = i as f64 * step;
        acc += row.eval(&lp.point(t)) * lp.weight(t) * lp.speed(t);
    }
    Ok(acc * step)
}

fn quantize_plane(row: &KernelRow<'_>, k: u32, plane: &FlatLegendrian, x: &CircleBundlePoint, n: usize) -> Result<C64> {
    if n < PLANE_NODE_FLOOR {
        return Err(Error::UnderResolved {
            nodes: n,
            required: PLANE_NODE_FLOOR,
        });
    }
    let zx = match x {
        CircleBundlePoint::Flat { z, .. } => z,
        _ => unreachable!("model checked by the caller"),
    };
    // The integrand is Gaussian in each axis, centered between the kernel
    // peak and the weight center.
    let kf = k as f64;
    let inv_var = 1.0 / (plane.sigma() * plane.sigma());
    let std = 1.0 / (kf + inv_var).sqrt();
    let axes: Vec<(f64, f64)> = zx
        .iter()
        .zip(plane.offset())
        .zip(plane.weight_center())
        .map(|((z, c), tc)| {
            let peak = (kf * (z.im - c.im) + inv_var * tc) / (kf + inv_var);
            (peak - PLANE_HALF_WIDTH * std, 2.0 * PLANE_HALF_WIDTH * std / n as f64)
        })
        .collect();
    let d = axes.len();
    let mut acc = C64::new(0.0, 0.0);
    let mut index = vec![0usize; d];
    let mut t = vec![0.0; d];
    loop {
        for a in 0..d {
            t[a] = axes[a].0 + (index[a] as f64 + 0.5) * axes[a].1;
        }
        acc += row.eval(&plane.point(&t)) * plane.weight(&t);
        let mut a = 0;
        while a < d {
            index[a] += 1;
            if index[a] < n {
                break;
            }
            index[a] = 0;
            a += 1;
        }
        if a == d {
            break;
        }
    }
    Ok(acc * axes.iter().map(|(_, h)| h).product::<f64>())
}
