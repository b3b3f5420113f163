//! Named fixtures: equators and latitudes of `ℂP¹`, planes and circles in
//! Bargmann–Fock space.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{Component, Curve, FlatLegendrian, Legendrian, LegendrianLoop, WeightFn};
use crate::asymptotics::poly::Poly;
use crate::model::{ModelKind, ModelSpace};
use crate::{tol, Error, Result, C64};

pub fn unit_weight() -> WeightFn {
    Arc::new(|_| C64::new(1.0, 0.0))
}

fn require_sphere(model: &ModelSpace) -> Result<u32> {
    model
        .degree()
        .ok_or_else(|| Error::Unsupported(format!("preset needs a projective line, got {model}")))
}

/// The latitude `|v_1|² = f` traversed once; `f = 1/2` is the equator.
pub fn latitude_base(model: &ModelSpace, area_fraction: f64) -> Curve {
    assert!(area_fraction > 0.0 && area_fraction < 1.0, "area fraction must lie in (0, 1)");
    let m = *model;
    let (a, b) = ((1.0 - area_fraction).sqrt(), area_fraction.sqrt());
    Arc::new(move |t| m.sphere_point([C64::new(a, 0.0), C64::from_polar(b, t)]))
}

/// Horizontal lift of a latitude enclosing the fraction `area_fraction` of
/// the total area around `[1 : 0]`; fails unless `D·f` is an integer.
pub fn cp1_latitude(model: &ModelSpace, area_fraction: f64) -> Result<LegendrianLoop> {
    let degree = require_sphere(model)? as f64;
    let holonomy = C64::from_polar(1.0, -2.0 * PI * degree * area_fraction);
    if (holonomy - 1.0).norm() > tol::BOHR_SOMMERFELD {
        return Err(Error::NotLegendrian(format!(
            "latitude with area fraction {area_fraction} on {model} has holonomy {holonomy}"
        )));
    }
    let rate = degree * area_fraction;
    Ok(LegendrianLoop::new(
        *model,
        format!("cp1-latitude:{area_fraction}"),
        latitude_base(model, area_fraction),
        Some(Arc::new(move |t| -rate * t)),
        unit_weight(),
    ))
}

/// The equator through `[1 : 1]`; Bohr–Sommerfeld exactly when `D` is even.
pub fn cp1_equator(model: &ModelSpace) -> Result<LegendrianLoop> {
    Ok(cp1_latitude(model, 0.5)?.with_label("cp1-equator"))
}

/// The equator together with its rotate by `g`.
pub fn cp1_double_branch(model: &ModelSpace, g: C64) -> Result<Legendrian> {
    let eq = cp1_equator(model)?;
    Ok(Legendrian::new(vec![Component::Loop(eq.clone()), Component::Loop(eq.rotated(g))]))
}

/// The circle `|z| = r` in `ℂ`.
pub fn circle_base(model: &ModelSpace, radius: f64) -> Curve {
    assert!(radius > 0.0, "radius must be positive");
    let m = *model;
    Arc::new(move |t| m.flat_point(vec![C64::from_polar(radius, t)], 0.0))
}

/// Horizontal lift of `|z| = r` in `bf:1`; needs `r²` to be an integer.
pub fn bf_circle(model: &ModelSpace, radius: f64) -> Result<LegendrianLoop> {
    if model.kind() != (ModelKind::BargmannFock { dim: 1 }) {
        return Err(Error::Unsupported(format!("bf-circle needs bf:1, got {model}")));
    }
    let r2 = radius * radius;
    let holonomy = C64::from_polar(1.0, -2.0 * PI * r2);
    if (holonomy - 1.0).norm() > tol::BOHR_SOMMERFELD {
        return Err(Error::NotLegendrian(format!("circle of radius {radius} has holonomy {holonomy}")));
    }
    Ok(LegendrianLoop::new(
        *model,
        format!("bf-circle:{radius}"),
        circle_base(model, radius),
        Some(Arc::new(move |t| -r2 * t)),
        unit_weight(),
    ))
}

/// The plane `iℝ^d + offset` with weight `P(t)·exp(−‖t − center‖²/(2σ²))`.
pub fn bf_plane(model: &ModelSpace, offset: Vec<C64>, poly: Poly, center: Vec<f64>, sigma: f64) -> Result<FlatLegendrian> {
    FlatLegendrian::new(*model, offset, poly, center, sigma)
}

/// `iℝ^d` with a unit-width Gaussian weight.
pub fn bf_plane_standard(model: &ModelSpace) -> Result<FlatLegendrian> {
    let d = model.dim();
    bf_plane(model, vec![C64::new(0.0, 0.0); d], Poly::one(d), vec![0.0; d], 1.0)
}
