//! The two quantized Kähler models.
//!
//! **Bargmann–Fock `ℂ^d`.** `X = ℂ^d × S¹` with points `(z, θ)`, connection
//! form `α = dθ + Im(z̄·dz)` (so `dα = 2ω`) and level-`k` Szegő kernel
//!
//! ```text
//! Π_k(x, y) = (k/π)^d · e^{ik(θ_x − θ_y)} · e^{k(z_x·z̄_y − |z_x|²/2 − |z_y|²/2)}.
//! ```
//!
//! The chart centered at the origin is the identity, so the kernel at
//! rescaled arguments is exactly the universal Heisenberg Gaussian.
//!
//! **`ℂP¹` with `A = O(D)`.** `X = S³/ℤ_D`; a point is stored as a unit
//! vector `v ∈ ℂ²` together with the understanding that `v ~ ζv` for
//! `ζ^D = 1`. The circle acts by `r_{e^{iθ}}[v] = [e^{iθ/D} v]`, the
//! connection form is `α = D·Im(v̄·dv)` and the base carries `ω = D·ω_FS`,
//! a round sphere of radius `√D/2` and area `Dπ`. Level-`k` CR functions are
//! homogeneous polynomials of degree `Dk` in `v`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::geometry::TangentVector;
use crate::{tol, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    BargmannFock { dim: usize },
    ProjectiveLine { degree: u32 },
}

/// A quantized model `(M, A, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelSpace {
    kind: ModelKind,
}

impl ModelSpace {
    pub fn bargmann_fock(dim: usize) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return Err(Error::Unsupported(format!("Bargmann–Fock dimension {dim} (supported: 1..=4)")));
        }
        Ok(ModelSpace {
            kind: ModelKind::BargmannFock { dim },
        })
    }

    pub fn projective_line(degree: u32) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Unsupported("O(0) is not ample".into()));
        }
        Ok(ModelSpace {
            kind: ModelKind::ProjectiveLine { degree },
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Complex dimension `d` of the base.
    pub fn dim(&self) -> usize {
        match self.kind {
            ModelKind::BargmannFock { dim } => dim,
            ModelKind::ProjectiveLine { .. } => 1,
        }
    }

    /// `D` for `ℂP¹`, `None` for Bargmann–Fock.
    pub fn degree(&self) -> Option<u32> {
        match self.kind {
            ModelKind::ProjectiveLine { degree } => Some(degree),
            ModelKind::BargmannFock { .. } => None,
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.kind, ModelKind::ProjectiveLine { .. })
    }

    /// `∫_M ω`, infinite for Bargmann–Fock.
    pub fn symplectic_volume(&self) -> f64 {
        match self.kind {
            ModelKind::ProjectiveLine { degree } => degree as f64 * PI,
            ModelKind::BargmannFock { .. } => f64::INFINITY,
        }
    }

    /// `dim H(X)_k` when finite.
    pub fn hardy_dim(&self, k: u32) -> Option<usize> {
        self.degree().map(|d| (d * k) as usize + 1)
    }

    pub fn flat_point(&self, z: Vec<C64>, theta: f64) -> CircleBundlePoint {
        assert!(matches!(self.kind, ModelKind::BargmannFock { dim } if dim == z.len()), "point does not belong to {self}");
        CircleBundlePoint::Flat {
            z,
            theta: wrap_angle(theta),
        }
    }

    /// The class of `v / |v|`.
    pub fn sphere_point(&self, v: [C64; 2]) -> CircleBundlePoint {
        assert!(self.is_compact(), "point does not belong to {self}");
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        assert!(n > 0.0 && n.is_finite(), "zero vector is not a point of S³");
        CircleBundlePoint::Sphere {
            v: [v[0] / n, v[1] / n],
        }
    }

    /// `[1 : 0]` with trivial fiber phase, or the origin of `ℂ^d`.
    pub fn origin(&self) -> CircleBundlePoint {
        match self.kind {
            ModelKind::BargmannFock { dim } => self.flat_point(vec![C64::new(0.0, 0.0); dim], 0.0),
            ModelKind::ProjectiveLine { .. } => self.sphere_point([C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
        }
    }

    fn check_point(&self, x: &CircleBundlePoint) {
        let ok = match (self.kind, x) {
            (ModelKind::BargmannFock { dim }, CircleBundlePoint::Flat { z, .. }) => z.len() == dim,
            (ModelKind::ProjectiveLine { .. }, CircleBundlePoint::Sphere { v }) => {
                (v[0].norm_sqr() + v[1].norm_sqr() - 1.0).abs() <= 1e-12
            }
            _ => false,
        };
        assert!(ok, "point does not belong to {self}");
    }

    /// `r_g(x)` for a unit complex `g`.
    pub fn circle_act(&self, g: C64, x: &CircleBundlePoint) -> CircleBundlePoint {
        assert!((g.norm() - 1.0).abs() <= tol::UNIT_CIRCLE, "circle element must be unimodular, |g| = {}", g.norm());
        self.check_point(x);
        let phase = g.arg();
        match (self.kind, x) {
            (ModelKind::BargmannFock { .. }, CircleBundlePoint::Flat { z, theta }) => CircleBundlePoint::Flat {
                z: z.clone(),
                theta: wrap_angle(theta + phase),
            },
            (ModelKind::ProjectiveLine { degree }, CircleBundlePoint::Sphere { v }) => {
                let s = C64::from_polar(1.0, phase / degree as f64);
                CircleBundlePoint::Sphere { v: [v[0] * s, v[1] * s] }
            }
            _ => unreachable!(),
        }
    }

    /// `r_{e^{iθ}}(x)`.
    pub fn rotate(&self, theta: f64, x: &CircleBundlePoint) -> CircleBundlePoint {
        self.circle_act(C64::from_polar(1.0, theta), x)
    }

    /// The unique `g` with `r_g(x) ≈ y` together with the base distance
    /// between `π(x)` and `π(y)`.
    pub fn fiber_offset(&self, x: &CircleBundlePoint, y: &CircleBundlePoint) -> (C64, f64) {
        self.check_point(x);
        self.check_point(y);
        let dist = self.base_distance(x, y);
        let g = match (self.kind, x, y) {
            (ModelKind::BargmannFock { .. }, CircleBundlePoint::Flat { theta: tx, .. }, CircleBundlePoint::Flat { theta: ty, .. }) => {
                C64::from_polar(1.0, ty - tx)
            }
            (ModelKind::ProjectiveLine { degree }, CircleBundlePoint::Sphere { v: vx }, CircleBundlePoint::Sphere { v: vy }) => {
                let c = vy[0] * vx[0].conj() + vy[1] * vx[1].conj();
                C64::from_polar(1.0, degree as f64 * c.arg())
            }
            _ => unreachable!(),
        };
        (g, dist)
    }

    /// Whether `x` and `y` are the same point of `X` up to `tolerance`.
    pub fn same_point(&self, x: &CircleBundlePoint, y: &CircleBundlePoint, tolerance: f64) -> bool {
        let (g, dist) = self.fiber_offset(x, y);
        dist <= tolerance && (g - 1.0).norm() <= tolerance
    }

    /// Riemannian distance between `π(x)` and `π(y)`.
    pub fn base_distance(&self, x: &CircleBundlePoint, y: &CircleBundlePoint) -> f64 {
        match (self.kind, x, y) {
            (ModelKind::BargmannFock { .. }, CircleBundlePoint::Flat { z: a, .. }, CircleBundlePoint::Flat { z: b, .. }) => {
                assert_eq!(a.len(), b.len(), "model mismatch");
                a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt()
            }
            (ModelKind::ProjectiveLine { degree }, CircleBundlePoint::Sphere { v }, CircleBundlePoint::Sphere { v: w }) => {
                let overlap = (v[0] * w[0].conj() + v[1] * w[1].conj()).norm();
                let wedge = (v[0] * w[1] - v[1] * w[0]).norm();
                (degree as f64).sqrt() * wedge.atan2(overlap)
            }
            _ => panic!("model mismatch: points do not belong to {self}"),
        }
    }

    /// Raw representative coordinates: `(z_1, …, z_d, θ)` or `(v_0, v_1)`.
    pub fn coords(&self, x: &CircleBundlePoint) -> Vec<C64> {
        match x {
            CircleBundlePoint::Flat { z, theta } => {
                let mut c = z.clone();
                c.push(C64::new(*theta, 0.0));
                c
            }
            CircleBundlePoint::Sphere { v } => v.to_vec(),
        }
    }

    /// `coords(y) − coords(x)` with the fiber angle difference wrapped.
    pub fn coord_difference(&self, x: &CircleBundlePoint, y: &CircleBundlePoint) -> Vec<C64> {
        let mut d: Vec<C64> = self.coords(y).iter().zip(self.coords(x)).map(|(a, b)| a - b).collect();
        if let CircleBundlePoint::Flat { .. } = x {
            let last = d.len() - 1;
            d[last] = C64::new(wrap_angle(d[last].re), 0.0);
        }
        d
    }

    /// The connection form `α` at `x` on a representative velocity.
    pub fn connection(&self, x: &CircleBundlePoint, velocity: &[C64]) -> f64 {
        match (self.kind, x) {
            (ModelKind::BargmannFock { dim }, CircleBundlePoint::Flat { z, .. }) => {
                velocity[dim].re + z.iter().zip(velocity).map(|(a, b)| (a.conj() * b).im).sum::<f64>()
            }
            (ModelKind::ProjectiveLine { degree }, CircleBundlePoint::Sphere { v }) => {
                degree as f64 * (v[0].conj() * velocity[0] + v[1].conj() * velocity[1]).im
            }
            _ => panic!("model mismatch"),
        }
    }

    /// Length in `M` of the projected velocity.
    pub fn base_speed(&self, x: &CircleBundlePoint, velocity: &[C64]) -> f64 {
        match (self.kind, x) {
            (ModelKind::BargmannFock { dim }, CircleBundlePoint::Flat { .. }) => {
                velocity[..dim].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
            }
            (ModelKind::ProjectiveLine { degree }, CircleBundlePoint::Sphere { v }) => {
                let s = v[0].conj() * velocity[0] + v[1].conj() * velocity[1];
                let h0 = velocity[0] - s * v[0];
                let h1 = velocity[1] - s * v[1];
                (degree as f64).sqrt() * (h0.norm_sqr() + h1.norm_sqr()).sqrt()
            }
            _ => panic!("model mismatch"),
        }
    }

    /// The standard Heisenberg chart centered at `center`.
    pub fn chart_at(&self, center: &CircleBundlePoint) -> HeisenbergChart {
        self.check_point(center);
        let frame = match (self.kind, center) {
            (ModelKind::BargmannFock { dim }, CircleBundlePoint::Flat { .. }) => ChartFrame::Flat {
                unitary: (0..dim)
                    .map(|a| (0..dim).map(|b| C64::new(if a == b { 1.0 } else { 0.0 }, 0.0)).collect())
                    .collect(),
            },
            (ModelKind::ProjectiveLine { .. }, CircleBundlePoint::Sphere { v }) => ChartFrame::Sphere {
                columns: [*v, [-v[1].conj(), v[0].conj()]],
            },
            _ => unreachable!(),
        };
        HeisenbergChart {
            model: *self,
            center: center.clone(),
            frame,
        }
    }

    /// Level-`k` Szegő kernel `Π_k(x, y)`.
    ///
    /// On `ℂP¹` this assembles a fresh orthonormal basis; build a
    /// [`crate::hardy::ProjectorKernel`] once for repeated evaluation.
    pub fn szego_kernel(&self, k: u32, x: &CircleBundlePoint, y: &CircleBundlePoint) -> Result<C64> {
        assert!(k >= 1, "level must be positive");
        match self.kind {
            ModelKind::BargmannFock { .. } => Ok(bargmann_fock_kernel(self.dim(), k, x, y)),
            ModelKind::ProjectiveLine { .. } => Ok(crate::hardy::ProjectorKernel::new(*self, k)?.eval(x, y)),
        }
    }
}

pub(crate) fn bargmann_fock_kernel(dim: usize, k: u32, x: &CircleBundlePoint, y: &CircleBundlePoint) -> C64 {
    match (x, y) {
        (CircleBundlePoint::Flat { z: a, theta: ta }, CircleBundlePoint::Flat { z: b, theta: tb }) => {
            assert!(a.len() == dim && b.len() == dim, "model mismatch");
            let kf = k as f64;
            // p q̄ − |p|²/2 − |q|²/2 = −|p − q|²/2 + i Im((p − q) q̄), without the
            // cancellation between large terms.
            let mut e = C64::new(0.0, kf * (ta - tb));
            for (p, q) in a.iter().zip(b) {
                let diff = p - q;
                e += kf * C64::new(-0.5 * diff.norm_sqr(), (diff * q.conj()).im);
            }
            (kf / PI).powi(dim as i32) * e.exp()
        }
        _ => panic!("model mismatch"),
    }
}

impl fmt::Display for ModelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModelKind::BargmannFock { dim } => write!(f, "bf:{dim}"),
            ModelKind::ProjectiveLine { degree } => write!(f, "cp1:{degree}"),
        }
    }
}

impl FromStr for ModelSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::ModelParse(s.to_string());
        let (kind, arg) = s.trim().split_once(':').ok_or_else(err)?;
        match kind {
            "bf" => ModelSpace::bargmann_fock(arg.parse().map_err(|_| err())?),
            "cp1" => ModelSpace::projective_line(arg.parse().map_err(|_| err())?),
            _ => Err(err()),
        }
    }
}

/// A point of the unit circle bundle `X ⊂ A*`.
#[derive(Debug, Clone, PartialEq)]
pub enum CircleBundlePoint {
    /// Bargmann–Fock: base point `z` and fiber phase `θ ∈ (−π, π]`.
    Flat { z: Vec<C64>, theta: f64 },
    /// `ℂP¹`: a unit representative in `S³`, defined up to `ℤ_D`.
    Sphere { v: [C64; 2] },
}

impl CircleBundlePoint {
    /// The representative with `arg` of its leading nonzero coordinate in
    /// `[0, 2π/D)`; the identity on flat points.
    pub fn canonical(&self, model: &ModelSpace) -> Self {
        match (self, model.degree()) {
            (CircleBundlePoint::Sphere { v }, Some(d)) => {
                let lead = if v[0].norm() > 1e-8 { v[0] } else { v[1] };
                let sector = 2.0 * PI / d as f64;
                let shift = (lead.arg().rem_euclid(sector)) - lead.arg();
                let s = C64::from_polar(1.0, shift);
                CircleBundlePoint::Sphere { v: [v[0] * s, v[1] * s] }
            }
            _ => self.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum ChartFrame {
    /// Columns of a unitary `U`: `z = z_c + U·w`.
    Flat { unitary: Vec<Vec<C64>> },
    /// Columns `(u_0, u_1)` of a unitary with `u_0` the center.
    Sphere { columns: [[C64; 2]; 2] },
}

/// A Heisenberg chart `(w, θ) ↦ r_{e^{iθ}}(x + w)` centered at a point of `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergChart {
    model: ModelSpace,
    center: CircleBundlePoint,
    frame: ChartFrame,
}

impl HeisenbergChart {
    pub fn model(&self) -> &ModelSpace {
        &self.model
    }

    pub fn center(&self) -> &CircleBundlePoint {
        &self.center
    }

    /// Largest `‖w‖` accepted by [`eval`](Self::eval).
    pub fn radius(&self) -> f64 {
        match self.model.kind {
            ModelKind::BargmannFock { .. } => f64::INFINITY,
            // Half the injectivity radius `π√D/2` of the round base.
            ModelKind::ProjectiveLine { degree } => PI * (degree as f64).sqrt() / 4.0,
        }
    }

    /// `x + w` rotated by `θ`.
    pub fn eval(&self, w: &TangentVector, theta: f64) -> Result<CircleBundlePoint> {
        assert_eq!(w.dim(), self.model.dim(), "dimension mismatch");
        let norm = w.norm();
        if norm > self.radius() {
            return Err(Error::OutOfChart {
                norm,
                radius: self.radius(),
            });
        }
        let point = match (&self.frame, &self.center) {
            (ChartFrame::Flat { unitary }, CircleBundlePoint::Flat { z: zc, theta: tc }) => {
                let d = zc.len();
                let uw: Vec<C64> = (0..d)
                    .map(|a| (0..d).map(|b| unitary[b][a] * w.components()[b]).sum())
                    .collect();
                let twist: f64 = zc.iter().zip(&uw).map(|(c, x)| (c.conj() * x).im).sum();
                CircleBundlePoint::Flat {
                    z: zc.iter().zip(&uw).map(|(c, x)| c + x).collect(),
                    theta: wrap_angle(tc + theta - twist),
                }
            }
            (ChartFrame::Sphere { columns }, CircleBundlePoint::Sphere { .. }) => {
                let dd = self.model.degree().unwrap() as f64;
                let zeta = w.components()[0] / dd.sqrt();
                let scale = C64::from_polar(1.0 / (1.0 + zeta.norm_sqr()).sqrt(), theta / dd);
                CircleBundlePoint::Sphere {
                    v: [
                        (columns[0][0] + columns[1][0] * zeta) * scale,
                        (columns[0][1] + columns[1][1] * zeta) * scale,
                    ],
                }
            }
            _ => unreachable!(),
        };
        Ok(point)
    }

    /// Chart coordinates `(w, θ)` of `x`.
    pub fn inverse(&self, x: &CircleBundlePoint) -> Result<(TangentVector, f64)> {
        self.model.check_point(x);
        match (&self.frame, &self.center, x) {
            (ChartFrame::Flat { unitary }, CircleBundlePoint::Flat { z: zc, theta: tc }, CircleBundlePoint::Flat { z, theta }) => {
                let d = zc.len();
                let delta: Vec<C64> = z.iter().zip(zc).map(|(a, b)| a - b).collect();
                let w: Vec<C64> = (0..d)
                    .map(|a| (0..d).map(|b| unitary[a][b].conj() * delta[b]).sum())
                    .collect();
                let twist: f64 = zc.iter().zip(&delta).map(|(c, x)| (c.conj() * x).im).sum();
                Ok((TangentVector::new(w), wrap_angle(theta - tc + twist)))
            }
            (ChartFrame::Sphere { columns }, _, CircleBundlePoint::Sphere { v }) => {
                let dd = self.model.degree().unwrap() as f64;
                let u0 = columns[0][0].conj() * v[0] + columns[0][1].conj() * v[1];
                let u1 = columns[1][0].conj() * v[0] + columns[1][1].conj() * v[1];
                if u0.norm() < 1e-12 {
                    return Err(Error::OutOfChart {
                        norm: f64::INFINITY,
                        radius: self.radius(),
                    });
                }
                let w = dd.sqrt() * u1 / u0;
                Ok((TangentVector::new(vec![w]), wrap_angle(dd * u0.arg())))
            }
            _ => unreachable!(),
        }
    }

    /// The chart `(w, θ) ↦ r_g(self(w, θ))`, centered at `r_g(center)`.
    pub fn circle_shift(&self, g: C64) -> HeisenbergChart {
        let center = self.model.circle_act(g, &self.center);
        let frame = match &self.frame {
            ChartFrame::Flat { unitary } => ChartFrame::Flat {
                unitary: unitary.clone(),
            },
            ChartFrame::Sphere { columns } => {
                let s = C64::from_polar(1.0, g.arg() / self.model.degree().unwrap() as f64);
                ChartFrame::Sphere {
                    columns: [
                        [columns[0][0] * s, columns[0][1] * s],
                        [columns[1][0] * s, columns[1][1] * s],
                    ],
                }
            }
        };
        HeisenbergChart {
            model: self.model,
            center,
            frame,
        }
    }

    /// The chart `w ↦ self(M·w)` for a unitary `M` given by its columns.
    pub fn with_unitary(&self, columns: &[Vec<C64>]) -> HeisenbergChart {
        let d = self.model.dim();
        assert!(columns.len() == d && columns.iter().all(|c| c.len() == d), "dimension mismatch");
        for a in 0..d {
            for b in 0..d {
                let dot: C64 = (0..d).map(|i| columns[a][i].conj() * columns[b][i]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).norm() < 1e-12, "chart rotation must be unitary");
            }
        }
        let frame = match &self.frame {
            ChartFrame::Flat { unitary } => ChartFrame::Flat {
                unitary: (0..d)
                    .map(|c| (0..d).map(|i| (0..d).map(|b| unitary[b][i] * columns[c][b]).sum()).collect())
                    .collect(),
            },
            ChartFrame::Sphere { columns: cols } => {
                let m = columns[0][0];
                ChartFrame::Sphere {
                    columns: [cols[0], [cols[1][0] * m, cols[1][1] * m]],
                }
            }
        };
        HeisenbergChart {
            model: self.model,
            center: self.center.clone(),
            frame,
        }
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    // In-range angles pass through untouched; rem_euclid would round small
    // negative angles through 2π.
    if theta > -PI && theta <= PI {
        return theta;
    }
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::riemannian_inner;
    use crate::quadrature::gauss_legendre_interval;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn wrap_angle_keeps_small_angles_exact() {
        assert_eq!(wrap_angle(-1e-9), -1e-9);
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-15);
    }

    fn random_point(model: &ModelSpace, rng: &mut ChaCha8Rng) -> CircleBundlePoint {
        match model.kind() {
            ModelKind::BargmannFock { dim } => model.flat_point(
                (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
                rng.gen_range(-PI..PI),
            ),
            ModelKind::ProjectiveLine { .. } => model.sphere_point([
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ]),
        }
    }

    #[test]
    fn parses_model_strings() {
        assert_eq!("bf:2".parse::<ModelSpace>().unwrap(), ModelSpace::bargmann_fock(2).unwrap());
        assert_eq!("cp1:2".parse::<ModelSpace>().unwrap().to_string(), "cp1:2");
        assert!("bf:0".parse::<ModelSpace>().is_err());
        assert!("cp2:1".parse::<ModelSpace>().is_err());
        assert!("cp1:x".parse::<ModelSpace>().is_err());
    }

    #[test]
    fn circle_action_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for model in ["bf:2", "cp1:1", "cp1:3"].map(|s| s.parse::<ModelSpace>().unwrap()) {
            let x = random_point(&model, &mut rng);
            assert_eq!(model.circle_act(c(1.0, 0.0), &x), x);
            let twice = model.circle_act(c(-1.0, 0.0), &model.circle_act(c(-1.0, 0.0), &x));
            assert!(model.same_point(&twice, &x, 1e-14));
            for _ in 0..20 {
                let (a, b) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
                let lhs = model.rotate(a, &model.rotate(b, &x));
                let rhs = model.rotate(a + b, &x);
                assert!(model.same_point(&lhs, &rhs, 1e-12));
            }
        }
        let bf = ModelSpace::bargmann_fock(1).unwrap();
        let x = bf.flat_point(vec![c(0.3, 0.1)], 3.0);
        match bf.rotate(0.5, &x) {
            CircleBundlePoint::Flat { z, theta } => {
                assert_eq!(z, vec![c(0.3, 0.1)]);
                assert!((theta - wrap_angle(3.5)).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    #[should_panic(expected = "unimodular")]
    fn circle_action_rejects_non_unit() {
        let bf = ModelSpace::bargmann_fock(1).unwrap();
        bf.circle_act(c(1.1, 0.0), &bf.origin());
    }

    #[test]
    fn chart_center_and_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for model in ["bf:1", "bf:3", "cp1:2"].map(|s| s.parse::<ModelSpace>().unwrap()) {
            for _ in 0..10 {
                let x = random_point(&model, &mut rng);
                let chart = model.chart_at(&x);
                assert_eq!(chart.eval(&TangentVector::zeros(model.dim()), 0.0).unwrap(), x);
                let w = TangentVector::new((0..model.dim()).map(|_| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))).collect());
                let th = rng.gen_range(-PI..PI);
                let a = chart.eval(&w, th).unwrap();
                let b = model.rotate(th, &chart.eval(&w, 0.0).unwrap());
                assert!(model.same_point(&a, &b, 1e-12));
                let (w2, th2) = chart.inverse(&a).unwrap();
                assert!(w2.sub(&w).norm() < 1e-12);
                assert!((wrap_angle(th2 - th)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chart_is_unitary_at_center() {
        // Pushforward metric by central differences against the base distance.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for model in ["bf:2", "cp1:1", "cp1:4"].map(|s| s.parse::<ModelSpace>().unwrap()) {
            let x = random_point(&model, &mut rng);
            let chart = model.chart_at(&x);
            let h = 1e-5;
            for _ in 0..5 {
                let u = TangentVector::new((0..model.dim()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
                let plus = chart.eval(&u.scale(c(h, 0.0)), 0.0).unwrap();
                let minus = chart.eval(&u.scale(c(-h, 0.0)), 0.0).unwrap();
                let len = model.base_distance(&plus, &minus) / (2.0 * h);
                assert!((len * len - riemannian_inner(&u, &u)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn projective_chart_geodesic_distance() {
        let model = ModelSpace::projective_line(2).unwrap();
        let chart = model.chart_at(&model.origin());
        for s in [1e-3, 1e-2, 0.1] {
            let y = chart.eval(&TangentVector::scalar(s, 0.0), 0.0).unwrap();
            let dist = model.base_distance(&model.origin(), &y);
            assert!((dist / s - 1.0).abs() < s * s);
        }
        assert!(chart.eval(&TangentVector::scalar(1.2, 0.0), 0.0).is_err());
    }

    #[test]
    fn north_pole_to_equator_matches_area() {
        // Meridian length by quadrature of the chart metric |dz|/(1+|z|²/D)
        // out to the equator |z| = √D, compared with a quarter great circle
        // on the sphere of area 2π.
        let model = ModelSpace::projective_line(2).unwrap();
        let (x, w) = gauss_legendre_interval(40, 0.0, 2f64.sqrt());
        let quad: f64 = x.iter().zip(&w).map(|(s, w)| w / (1.0 + s * s / 2.0)).sum();
        let equator = model.sphere_point([c(1.0, 0.0), c(1.0, 0.0)]);
        let dist = model.base_distance(&model.origin(), &equator);
        assert!((dist - quad).abs() < 1e-13);
        let radius = (model.symplectic_volume() / (4.0 * PI)).sqrt();
        assert!((dist - PI * radius / 2.0).abs() < 1e-14);
    }

    #[test]
    fn base_distance_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for model in ["bf:2", "cp1:2"].map(|s| s.parse::<ModelSpace>().unwrap()) {
            for _ in 0..200 {
                let (x, y, z) = (random_point(&model, &mut rng), random_point(&model, &mut rng), random_point(&model, &mut rng));
                assert_eq!(model.base_distance(&x, &x), 0.0);
                assert!(model.base_distance(&x, &model.rotate(1.3, &x)) < 1e-15);
                assert!((model.base_distance(&x, &y) - model.base_distance(&y, &x)).abs() < 1e-15);
                assert!(model.base_distance(&x, &z) <= model.base_distance(&x, &y) + model.base_distance(&y, &z) + 1e-12);
            }
        }
    }

    #[test]
    fn bargmann_fock_kernel_values() {
        let bf = ModelSpace::bargmann_fock(1).unwrap();
        let o = bf.origin();
        assert!((bf.szego_kernel(1, &o, &o).unwrap() - c(1.0 / PI, 0.0)).norm() < 1e-16);
        let x = bf.flat_point(vec![c(0.4, -0.7)], 1.1);
        let on_diag = bf.szego_kernel(7, &x, &x).unwrap();
        assert!((on_diag - c(7.0 / PI, 0.0)).norm() < 1e-13);
        // x = (p = 1)/√k, y = (i q = i)/√k at k = 4.
        let k = 4u32;
        let s = (k as f64).sqrt();
        let x = bf.flat_point(vec![c(1.0 / s, 0.0)], 0.0);
        let y = bf.flat_point(vec![c(0.0, 1.0 / s)], 0.0);
        let expect = 4.0 / PI * c(-1.0, -1.0).exp();
        assert!((bf.szego_kernel(k, &x, &y).unwrap() - expect).norm() < 1e-15);
    }

    #[test]
    fn kernel_equivariance_and_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for model in ["bf:2", "cp1:2"].map(|s| s.parse::<ModelSpace>().unwrap()) {
            for _ in 0..10 {
                let k = rng.gen_range(1..=64u32);
                let (x, y) = (random_point(&model, &mut rng), random_point(&model, &mut rng));
                let g = C64::from_polar(1.0, rng.gen_range(-PI..PI));
                let base = model.szego_kernel(k, &x, &y).unwrap();
                // Summation error is absolute on the scale of the diagonal k/π.
                let scale = base.norm().max(1e-3 * k as f64 / PI);
                let left = model.szego_kernel(k, &model.circle_act(g, &x), &y).unwrap();
                let right = model.szego_kernel(k, &x, &model.circle_act(g, &y)).unwrap();
                assert!((left - g.powi(k as i32) * base).norm() <= 1e-10 * scale);
                assert!((right - g.powi(-(k as i32)) * base).norm() <= 1e-10 * scale);
                let swapped = model.szego_kernel(k, &y, &x).unwrap();
                assert!((swapped.conj() - base).norm() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn bargmann_fock_scaling_is_the_universal_gaussian() {
        // Kernel at x + w/√k versus x + iq/√k from a chart centered away
        // from the origin: (k/π)^d e^{-ip·q - p²/2 - (q_w - q)²/2}.
        let bf = ModelSpace::bargmann_fock(1).unwrap();
        let chart = bf.chart_at(&bf.flat_point(vec![c(0.7, -0.3)], 0.4));
        for k in [16u32, 64, 256] {
            let s = (k as f64).sqrt();
            for (p, qw, q) in [(0.5, -1.0, 0.3), (-1.5, 2.0, -2.0), (0.0, 0.0, 1.0)] {
                let x = chart.eval(&TangentVector::scalar(p / s, qw / s), 0.0).unwrap();
                let y = chart.eval(&TangentVector::scalar(0.0, q / s), 0.0).unwrap();
                let got = bf.szego_kernel(k, &x, &y).unwrap();
                let expect = k as f64 / PI * c(-0.5 * p * p - 0.5 * (qw - q) * (qw - q), -p * q).exp();
                assert!((got - expect).norm() < 1e-12);
            }
        }
    }
}
