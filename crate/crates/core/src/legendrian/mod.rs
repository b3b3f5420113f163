//! Legendrian loops and planes in `X`, holonomy, branch data and the
//! quantizer `u_k = P_k(δ_{Λ,λ})`.

mod branches;
pub mod presets;
mod quantize;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub use branches::{branch_cutoff, find_branches, find_branches_to_order, Branch, BranchSet, TaylorData};
pub use quantize::{default_nodes, loop_node_floor, quantize};

use crate::asymptotics::poly::Poly;
use crate::model::{CircleBundlePoint, ModelKind, ModelSpace};
use crate::ode::dopri5;
use crate::quadrature::gauss_legendre_interval;
use crate::{tol, Result, C64};

/// A closed curve `t ↦ π`-level point, `t ∈ [0, 2π]`.
pub type Curve = Arc<dyn Fn(f64) -> CircleBundlePoint + Send + Sync>;
/// A complex weight along a loop parameter.
pub type WeightFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;
/// A fiber phase `Φ(t)` along a loop.
pub type PhaseFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const FD_STEP: f64 = 1e-3;

/// Applies the fiber rotation by angle `phi` without wrapping, so that
/// representatives stay continuous in `phi`.
pub(crate) fn lift_point(model: &ModelSpace, phi: f64, x: &CircleBundlePoint) -> CircleBundlePoint {
    match (model.kind(), x) {
        (ModelKind::BargmannFock { .. }, CircleBundlePoint::Flat { z, theta }) => model.flat_point(z.clone(), theta + phi),
        (ModelKind::ProjectiveLine { degree }, CircleBundlePoint::Sphere { v }) => {
            let s = C64::from_polar(1.0, phi / degree as f64);
            CircleBundlePoint::Sphere { v: [v[0] * s, v[1] * s] }
        }
        _ => panic!("point does not belong to {model}"),
    }
}

/// Fourth-order central difference of the representative coordinates.
pub(crate) fn fd_velocity(model: &ModelSpace, curve: &dyn Fn(f64) -> CircleBundlePoint, t: f64, h: f64) -> Vec<C64> {
    let center = curve(t);
    let d = |s: f64| model.coord_difference(&center, &curve(t + s));
    let (p1, m1, p2, m2) = (d(h), d(-h), d(2.0 * h), d(-2.0 * h));
    (0..p1.len())
        .map(|i| (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h))
        .collect()
}

#[derive(Clone)]
enum Lift {
    /// No transport: the base representative itself.
    Fixed,
    Analytic(PhaseFn),
    Transported(Arc<TransportTable>),
}

/// Horizontal transport phase tabulated at checkpoints.
struct TransportTable {
    model: ModelSpace,
    base: Curve,
    knots: Vec<f64>,
}

const TRANSPORT_SEGMENTS: usize = 64;

impl TransportTable {
    fn build(model: ModelSpace, base: Curve) -> Result<Self> {
        let step = 2.0 * PI / TRANSPORT_SEGMENTS as f64;
        let mut knots = vec![0.0];
        for i in 0..TRANSPORT_SEGMENTS {
            let rate = |t: f64, _: f64| -connection_rate(&model, base.as_ref(), t);
            let seg = dopri5(rate, i as f64 * step, knots[i], (i + 1) as f64 * step, tol::TRANSPORT)?;
            knots.push(seg.value);
        }
        Ok(TransportTable { model, base, knots })
    }

    fn total(&self) -> f64 {
        self.knots[TRANSPORT_SEGMENTS]
    }

    fn phase(&self, t: f64) -> f64 {
        let period = 2.0 * PI;
        let turns = (t / period).floor();
        let s = t - turns * period;
        let step = period / TRANSPORT_SEGMENTS as f64;
        let i = ((s / step) as usize).min(TRANSPORT_SEGMENTS - 1);
        let a = i as f64 * step;
        let (nodes, weights) = gauss_legendre_interval(16, a, s);
        let tail: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(u, w)| -w * connection_rate(&self.model, self.base.as_ref(), *u))
            .sum();
        turns * self.total() + self.knots[i] + tail
    }
}

/// `α(base'(t))` for the unlifted base curve.
fn connection_rate(model: &ModelSpace, base: &(dyn Fn(f64) -> CircleBundlePoint + Send + Sync), t: f64) -> f64 {
    let v = fd_velocity(model, base, t, FD_STEP);
    model.connection(&base(t), &v)
}

/// A parametrized loop in `X` with a half-density weight.
#[derive(Clone)]
pub struct LegendrianLoop {
    model: ModelSpace,
    label: String,
    base: Curve,
    lift: Lift,
    weight: WeightFn,
    rotation: f64,
}

impl fmt::Debug for LegendrianLoop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LegendrianLoop")
            .field("model", &self.model)
            .field("label", &self.label)
            .field("rotation", &self.rotation)
            .finish_non_exhaustive()
    }
}

impl LegendrianLoop {
    /// A loop `t ↦ r_{e^{iΦ(t)}}(base(t))`; with `phase = None` the base
    /// representatives are used as they are.
    pub fn new(model: ModelSpace, label: impl Into<String>, base: Curve, phase: Option<PhaseFn>, weight: WeightFn) -> Self {
        LegendrianLoop {
            model,
            label: label.into(),
            base,
            lift: phase.map_or(Lift::Fixed, Lift::Analytic),
            weight,
            rotation: 0.0,
        }
    }

    /// The horizontal lift of `base` obtained by integrating the transport
    /// ODE. Closes up only when the holonomy is trivial.
    pub fn transported(model: ModelSpace, label: impl Into<String>, base: Curve, weight: WeightFn) -> Result<Self> {
        let table = TransportTable::build(model, base.clone())?;
        Ok(LegendrianLoop {
            model,
            label: label.into(),
            base,
            lift: Lift::Transported(Arc::new(table)),
            weight,
            rotation: 0.0,
        })
    }

    pub fn model(&self) -> &ModelSpace {
        &self.model
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn phase(&self, t: f64) -> f64 {
        self.rotation
            + match &self.lift {
                Lift::Fixed => 0.0,
                Lift::Analytic(f) => f(t),
                Lift::Transported(table) => table.phase(t),
            }
    }

    pub fn point(&self, t: f64) -> CircleBundlePoint {
        lift_point(&self.model, self.phase(t), &(self.base)(t))
    }

    pub fn base_point(&self, t: f64) -> CircleBundlePoint {
        (self.base)(t)
    }

    pub fn weight(&self, t: f64) -> C64 {
        (self.weight)(t)
    }

    /// Representative velocity of the lifted loop.
    pub fn velocity(&self, t: f64) -> Vec<C64> {
        fd_velocity(&self.model, &|s| self.point(s), t, FD_STEP)
    }

    /// Arc-length density `|π_*(velocity)|`.
    pub fn speed(&self, t: f64) -> f64 {
        let v = fd_velocity(&self.model, self.base.as_ref(), t, FD_STEP);
        self.model.base_speed(&(self.base)(t), &v)
    }

    /// `r_g(Λ)` with the weight transported unchanged in `t`.
    pub fn rotated(&self, g: C64) -> Self {
        assert!((g.norm() - 1.0).abs() <= tol::UNIT_CIRCLE, "circle element must be unimodular");
        let mut out = self.clone();
        out.rotation += g.arg();
        out
    }

    pub fn with_weight(&self, weight: WeightFn) -> Self {
        let mut out = self.clone();
        out.weight = weight;
        out
    }

    pub fn with_label(&self, label: impl Into<String>) -> Self {
        let mut out = self.clone();
        out.label = label.into();
        out
    }

    /// Distance in `X` between the endpoints `t = 0` and `t = 2π`.
    pub fn closure_gap(&self) -> f64 {
        let (g, dist) = self.model.fiber_offset(&self.point(0.0), &self.point(2.0 * PI));
        dist + (g - 1.0).norm()
    }

    /// Smallest base speed over `samples` equispaced parameters.
    pub fn min_speed(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|i| self.speed(2.0 * PI * i as f64 / samples as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `max_t |α(velocity)|` over `samples` equispaced parameters.
pub fn horizontality_residual(lp: &LegendrianLoop, samples: usize) -> f64 {
    assert!(samples >= 16, "need at least 16 samples, got {samples}");
    (0..samples)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / samples as f64;
            lp.model.connection(&lp.point(t), &lp.velocity(t)).abs()
        })
        .fold(0.0, f64::max)
}

/// Outcome of transporting around a base loop.
#[derive(Debug, Clone)]
pub struct HolonomyCheck {
    pub holonomy: C64,
    pub is_bs: bool,
    lift: LegendrianLoop,
}

impl HolonomyCheck {
    /// The horizontal lift with weight `weight`, when the loop is Bohr–Sommerfeld.
    pub fn into_loop(self, label: impl Into<String>, weight: WeightFn) -> Option<LegendrianLoop> {
        self.is_bs.then(|| self.lift.with_label(label).with_weight(weight))
    }
}

/// Holonomy of the horizontal transport around a closed base loop.
pub fn bohr_sommerfeld_check(model: &ModelSpace, base: Curve) -> Result<HolonomyCheck> {
    let start = base(0.0);
    let end = base(2.0 * PI);
    assert!(
        model.base_distance(&start, &end) <= 1e-10,
        "base loop is not closed: gap {}",
        model.base_distance(&start, &end)
    );
    let lift = LegendrianLoop::transported(*model, "transported", base, Arc::new(|_| C64::new(1.0, 0.0)))?;
    let (closing, _) = model.fiber_offset(&start, &end);
    let total = match &lift.lift {
        Lift::Transported(table) => table.total(),
        _ => unreachable!(),
    };
    let holonomy = closing * C64::from_polar(1.0, total);
    Ok(HolonomyCheck {
        holonomy,
        is_bs: (holonomy - 1.0).norm() <= tol::BOHR_SOMMERFELD,
        lift,
    })
}

/// A Legendrian plane `t ↦ (c + it, θ₀ − Re(c)·t)` in Bargmann–Fock space
/// with weight `P(t)·exp(−‖t − t_c‖²/(2σ²))`.
#[derive(Debug, Clone)]
pub struct FlatLegendrian {
    model: ModelSpace,
    label: String,
    offset: Vec<C64>,
    theta0: f64,
    poly: Poly,
    center: Vec<f64>,
    sigma: f64,
}

impl FlatLegendrian {
    pub fn new(model: ModelSpace, offset: Vec<C64>, poly: Poly, center: Vec<f64>, sigma: f64) -> Result<Self> {
        let d = match model.kind() {
            ModelKind::BargmannFock { dim } => dim,
            _ => return Err(crate::Error::Unsupported(format!("flat Legendrians live in Bargmann–Fock space, not {model}"))),
        };
        assert!(offset.len() == d && center.len() == d && poly.nvars() == d, "dimension mismatch");
        assert!(sigma > 0.0 && sigma.is_finite(), "weight width must be positive");
        Ok(FlatLegendrian {
            model,
            label: "bf-plane".into(),
            offset,
            theta0: 0.0,
            poly,
            center,
            sigma,
        })
    }

    pub fn model(&self) -> &ModelSpace {
        &self.model
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn offset(&self) -> &[C64] {
        &self.offset
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn weight_center(&self) -> &[f64] {
        &self.center
    }

    pub fn weight_poly(&self) -> &Poly {
        &self.poly
    }

    pub fn point(&self, t: &[f64]) -> CircleBundlePoint {
        let z = self.offset.iter().zip(t).map(|(c, s)| c + C64::new(0.0, *s)).collect();
        let twist: f64 = self.offset.iter().zip(t).map(|(c, s)| c.re * s).sum();
        self.model.flat_point(z, self.theta0 - twist)
    }

    pub fn weight(&self, t: &[f64]) -> C64 {
        let r2: f64 = t.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum();
        self.poly.eval_real(t) * (-r2 / (2.0 * self.sigma * self.sigma)).exp()
    }

    pub fn rotated(&self, g: C64) -> Self {
        assert!((g.norm() - 1.0).abs() <= tol::UNIT_CIRCLE, "circle element must be unimodular");
        let mut out = self.clone();
        out.theta0 += g.arg();
        out
    }

    pub fn with_weight(&self, poly: Poly, center: Vec<f64>, sigma: f64) -> Result<Self> {
        let mut out = Self::new(self.model, self.offset.clone(), poly, center, sigma)?;
        out.theta0 = self.theta0;
        out.label = self.label.clone();
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub enum Component {
    Loop(LegendrianLoop),
    Plane(FlatLegendrian),
}

impl Component {
    pub fn model(&self) -> &ModelSpace {
        match self {
            Component::Loop(l) => l.model(),
            Component::Plane(p) => p.model(),
        }
    }

    pub fn rotated(&self, g: C64) -> Self {
        match self {
            Component::Loop(l) => Component::Loop(l.rotated(g)),
            Component::Plane(p) => Component::Plane(p.rotated(g)),
        }
    }
}

/// A disjoint union of Legendrian components.
#[derive(Debug, Clone)]
pub struct Legendrian {
    components: Vec<Component>,
}

impl Legendrian {
    pub fn new(components: Vec<Component>) -> Self {
        assert!(!components.is_empty(), "a Legendrian needs at least one component");
        let m = *components[0].model();
        assert!(components.iter().all(|c| *c.model() == m), "components live in different models");
        Legendrian { components }
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn model(&self) -> &ModelSpace {
        self.components[0].model()
    }

    pub fn rotated(&self, g: C64) -> Self {
        Legendrian::new(self.components.iter().map(|c| c.rotated(g)).collect())
    }

    pub fn union(&self, other: &Legendrian) -> Self {
        Legendrian::new(self.components.iter().chain(&other.components).cloned().collect())
    }
}

impl From<LegendrianLoop> for Legendrian {
    fn from(l: LegendrianLoop) -> Self {
        Legendrian::new(vec![Component::Loop(l)])
    }
}

impl From<FlatLegendrian> for Legendrian {
    fn from(p: FlatLegendrian) -> Self {
        Legendrian::new(vec![Component::Plane(p)])
    }
}
