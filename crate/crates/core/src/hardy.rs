//! Orthonormal bases of the Hardy isotypes `H(X)_k` and the projector kernel
//! `Π_k(x, y) = Σ_r s_r(x)·conj(s_r(y))`.
//!
//! On `ℂP¹` with `O(D)` the level-`k` isotype is spanned by the homogeneous
//! polynomials of degree `n = Dk` in `v ∈ S³`. Monomials are taken in the
//! binomially scaled form `e_a(v) = √C(n,a)·v_0^a·v_1^{n−a}` so that their
//! Gram entries stay `O(1)` for large `n`. The density on `X` is the
//! Riemannian one with fiber measure `dθ/2π`, total mass `Dπ`, which is the
//! normalization under which `Π_k(x, x) ~ (k/π)^d`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::model::{bargmann_fock_kernel, CircleBundlePoint, ModelKind, ModelSpace};
use crate::quadrature::{gauss_legendre, gauss_legendre_interval, periodic_nodes, QuadratureSpec};
use crate::{tol, Error, Result, C64};

/// `ln m!` for `m = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 2);
    out.push(0.0);
    for m in 1..=n + 1 {
        out.push(out[m - 1] + (m as f64).ln());
    }
    out
}

/// An orthonormal basis of `H(X)_k` on `ℂP¹`.
#[derive(Debug, Clone)]
pub struct HardyBasis {
    k: u32,
    model: ModelSpace,
    /// Polynomial degree `Dk`.
    n: usize,
    /// Gram matrix of the scaled monomials.
    gram: DMatrix<C64>,
    /// Nonzero coefficients `(a, c)` of each section in the scaled monomials.
    sections: Vec<Vec<(usize, C64)>>,
    half_ln_binom: Vec<f64>,
    up_ratio: Vec<f64>,
    orthonormality_residual: f64,
}

/// Monomial Gram matrix on `X` in the scaled basis, from the Beta integrals
/// `⟨|v_0|^{2a}|v_1|^{2b}⟩_{S³} = B(a+1, b+1)` (off-diagonal entries vanish
/// by the angular integration).
fn monomial_gram(model: &ModelSpace, n: usize) -> DMatrix<C64> {
    let lf = ln_factorials(n + 1);
    let vol = model.symplectic_volume();
    DMatrix::from_fn(n + 1, n + 1, |a, b| {
        if a != b {
            return C64::new(0.0, 0.0);
        }
        let ln_binom = lf[n] - lf[a] - lf[n - a];
        let ln_beta = lf[a] + lf[n - a] - lf[n + 1];
        C64::new(vol * (ln_binom + ln_beta).exp(), 0.0)
    })
}

/// `max_{r,s} |⟨s_r, s_s⟩ − δ_rs|` from sparse section coefficients.
fn sparse_residual(gram: &DMatrix<C64>, sections: &[Vec<(usize, C64)>]) -> f64 {
    let mut worst = 0.0f64;
    for (r, sr) in sections.iter().enumerate() {
        for (s, ss) in sections.iter().enumerate() {
            let mut ip = C64::new(0.0, 0.0);
            for (a, ca) in sr {
                for (b, cb) in ss {
                    ip += ca.conj() * gram[(*a, *b)] * cb;
                }
            }
            if r == s {
                ip -= 1.0;
            }
            worst = worst.max(ip.norm());
        }
    }
    worst
}

impl HardyBasis {
    pub fn build(model: ModelSpace, k: u32) -> Result<Self> {
        let degree = match model.kind() {
            ModelKind::ProjectiveLine { degree } => degree,
            ModelKind::BargmannFock { .. } => {
                return Err(Error::Unsupported("Hardy bases are built for ℂP¹ only".into()))
            }
        };
        assert!(k >= 1, "level must be positive");
        let n = (degree * k) as usize;
        let gram = monomial_gram(&model, n);
        // The Gram matrix is diagonal, so its Cholesky factor is the diagonal
        // square root and each section is a normalized monomial.
        let sections: Vec<Vec<(usize, C64)>> = (0..=n)
            .map(|a| {
                let g = gram[(a, a)].re;
                if g > 0.0 && g.is_finite() {
                    Ok(vec![(a, C64::new(1.0 / g.sqrt(), 0.0))])
                } else {
                    Err(Error::NumericalDegeneracy("monomial Gram matrix is not positive definite".into()))
                }
            })
            .collect::<Result<_>>()?;
        let residual = sparse_residual(&gram, &sections);
        if residual > tol::ORTHONORMAL {
            return Err(Error::NumericalDegeneracy(format!(
                "orthonormality residual {residual:e} exceeds {:e}",
                tol::ORTHONORMAL
            )));
        }
        let lf = ln_factorials(n);
        let half_ln_binom = (0..=n).map(|a| 0.5 * (lf[n] - lf[a] - lf[n - a])).collect();
        let up_ratio = (0..n).map(|a| (((n - a) as f64) / ((a + 1) as f64)).sqrt()).collect();
        Ok(HardyBasis {
            k,
            model,
            n,
            gram,
            sections,
            half_ln_binom,
            up_ratio,
            orthonormality_residual: residual,
        })
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn count(&self) -> usize {
        self.sections.len()
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn orthonormality_residual(&self) -> f64 {
        self.orthonormality_residual
    }

    /// Section coefficients in the scaled monomial basis.
    pub fn coefficients(&self, r: usize) -> &[(usize, C64)] {
        &self.sections[r]
    }

    /// `e_a(v)` for `a = 0..=n`, built outward from the dominant index so
    /// that no intermediate power under- or overflows.
    pub fn scaled_monomials(&self, x: &CircleBundlePoint) -> Vec<C64> {
        let v = match x {
            CircleBundlePoint::Sphere { v } => v,
            _ => panic!("point does not belong to {}", self.model),
        };
        let n = self.n;
        let (m0, m1) = (v[0].norm(), v[1].norm());
        let peak = ((n as f64) * m0 * m0).round().clamp(0.0, n as f64) as usize;
        let peak = if m0 == 0.0 { 0 } else if m1 == 0.0 { n } else { peak };
        let ln_part = |count: usize, m: f64| if count == 0 { 0.0 } else { count as f64 * m.ln() };
        let log_mag = self.half_ln_binom[peak] + ln_part(peak, m0) + ln_part(n - peak, m1);
        let phase = peak as f64 * v[0].arg() + (n - peak) as f64 * v[1].arg();
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        out[peak] = C64::from_polar(log_mag.exp(), phase);
        if peak < n {
            let step = v[0] / v[1];
            for a in peak..n {
                out[a + 1] = out[a] * step * self.up_ratio[a];
            }
        }
        if peak > 0 {
            let step = v[1] / v[0];
            for a in (1..=peak).rev() {
                out[a - 1] = out[a] * step / self.up_ratio[a - 1];
            }
        }
        out
    }

    /// `(s_0(x), …, s_n(x))`.
    pub fn sections_at(&self, x: &CircleBundlePoint) -> Vec<C64> {
        let e = self.scaled_monomials(x);
        self.sections
            .iter()
            .map(|s| s.iter().map(|(a, c)| c * e[*a]).sum())
            .collect()
    }
}

#[derive(Debug, Clone)]
enum Backing {
    ClosedForm,
    Basis(HardyBasis),
}

/// The level-`k` projector kernel of a model.
#[derive(Debug, Clone)]
pub struct ProjectorKernel {
    model: ModelSpace,
    k: u32,
    backing: Backing,
}

/// `Π_k(x, ·)` with the data depending on `x` precomputed.
#[derive(Debug, Clone)]
pub struct KernelRow<'a> {
    kernel: &'a ProjectorKernel,
    x: CircleBundlePoint,
    sections: Vec<C64>,
}

impl KernelRow<'_> {
    pub fn eval(&self, y: &CircleBundlePoint) -> C64 {
        match &self.kernel.backing {
            Backing::ClosedForm => bargmann_fock_kernel(self.kernel.model.dim(), self.kernel.k, &self.x, y),
            Backing::Basis(basis) => {
                let sy = basis.sections_at(y);
                self.sections.iter().zip(&sy).map(|(a, b)| a * b.conj()).sum()
            }
        }
    }
}

impl ProjectorKernel {
    pub fn new(model: ModelSpace, k: u32) -> Result<Self> {
        assert!(k >= 1, "level must be positive");
        let backing = match model.kind() {
            ModelKind::BargmannFock { .. } => Backing::ClosedForm,
            ModelKind::ProjectiveLine { .. } => Backing::Basis(HardyBasis::build(model, k)?),
        };
        Ok(ProjectorKernel { model, k, backing })
    }

    pub fn model(&self) -> &ModelSpace {
        &self.model
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn basis(&self) -> Option<&HardyBasis> {
        match &self.backing {
            Backing::Basis(b) => Some(b),
            Backing::ClosedForm => None,
        }
    }

    pub fn row(&self, x: &CircleBundlePoint) -> KernelRow<'_> {
        let sections = match &self.backing {
            Backing::Basis(b) => b.sections_at(x),
            Backing::ClosedForm => Vec::new(),
        };
        KernelRow {
            kernel: self,
            x: x.clone(),
            sections,
        }
    }

    pub fn eval(&self, x: &CircleBundlePoint, y: &CircleBundlePoint) -> C64 {
        self.row(x).eval(y)
    }

    /// `∫_X f(s(y)) dens_X(y)` over the product rule on `X`, where `s(y)` are
    /// the basis sections at the node (compact models only).
    fn sphere_integral(&self, quadrature: &QuadratureSpec, mut f: impl FnMut(&[C64]) -> C64) -> Result<C64> {
        let basis = self.basis().ok_or_else(|| Error::Unsupported("quadrature over X needs a compact model".into()))?;
        let n = basis.n;
        let required = 4 * n;
        let angles = quadrature.nodes.unwrap_or(4 * n + 16);
        if angles < required {
            return Err(Error::UnderResolved {
                nodes: angles,
                required,
            });
        }
        let lat = quadrature.latitude_nodes.unwrap_or(n / 2 + 8);
        if 2 * lat < n + 2 {
            return Err(Error::UnderResolved {
                nodes: lat,
                required: n / 2 + 1,
            });
        }
        let (t, wt) = gauss_legendre_interval(lat, 0.0, 1.0);
        let phis: Vec<C64> = periodic_nodes(angles).map(|p| C64::from_polar(1.0, p)).collect();
        let scale = self.model.symplectic_volume() / (angles * angles) as f64;
        let mut total = C64::new(0.0, 0.0);
        for (ti, wi) in t.iter().zip(&wt) {
            let (r0, r1) = (ti.sqrt(), (1.0 - ti).sqrt());
            let mut layer = C64::new(0.0, 0.0);
            for p0 in &phis {
                for p1 in &phis {
                    let y = CircleBundlePoint::Sphere { v: [p0 * r0, p1 * r1] };
                    layer += f(&basis.sections_at(&y));
                }
            }
            total += layer * (wi * scale);
        }
        Ok(total)
    }

    /// `∫_X Π_k(y, y) dens_X(y)`.
    pub fn trace(&self, quadrature: &QuadratureSpec) -> Result<f64> {
        Ok(self.sphere_integral(quadrature, |s| C64::new(s.iter().map(|v| v.norm_sqr()).sum(), 0.0))?.re)
    }

    /// Relative (or, where `|Π_k(x, z)| ≤ 1e-6`, absolute) defect of
    /// `∫ Π_k(x, y)·Π_k(y, z) dy = Π_k(x, z)`.
    pub fn reproducing_residual(&self, x: &CircleBundlePoint, z: &CircleBundlePoint, quadrature: &QuadratureSpec) -> Result<f64> {
        let rx = self.row(x);
        let rz = self.row(z);
        let integral: C64 = match &self.backing {
            Backing::Basis(_) => self.sphere_integral(quadrature, |sy| {
                let (mut a, mut b) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for ((sx, sz), s) in rx.sections.iter().zip(&rz.sections).zip(sy) {
                    let c = s.conj();
                    a += sx * c;
                    b += sz * c;
                }
                a * b.conj()
            })?,
            Backing::ClosedForm => self.flat_reproducing_integral(&rx, &rz, x, z, quadrature)?,
        };
        let target = self.eval(x, z);
        let defect = (integral - target).norm();
        Ok(if target.norm() > 1e-6 { defect / target.norm() } else { defect })
    }

    /// Tensor Gauss–Legendre over a box around `x` and `z`, with the fiber
    /// integral done exactly (the integrand is `S¹`-invariant in `y`).
    fn flat_reproducing_integral(
        &self,
        rx: &KernelRow<'_>,
        rz: &KernelRow<'_>,
        x: &CircleBundlePoint,
        z: &CircleBundlePoint,
        quadrature: &QuadratureSpec,
    ) -> Result<C64> {
        let (zx, zz) = match (x, z) {
            (CircleBundlePoint::Flat { z: a, .. }, CircleBundlePoint::Flat { z: b, .. }) => (a, b),
            _ => panic!("model mismatch"),
        };
        let d = self.model.dim();
        if d > 2 {
            return Err(Error::Unsupported("flat reproducing check supports d <= 2".into()));
        }
        let per_axis = quadrature.nodes.unwrap_or(64);
        if per_axis < 16 {
            return Err(Error::UnderResolved {
                nodes: per_axis,
                required: 16,
            });
        }
        let width = 8.0 / (self.k as f64).sqrt();
        let mut axes = Vec::with_capacity(2 * d);
        for a in 0..d {
            let mid = 0.5 * (zx[a] + zz[a]);
            let half = 0.5 * (zx[a] - zz[a]);
            axes.push(gauss_legendre_interval(per_axis, mid.re - half.re.abs() - width, mid.re + half.re.abs() + width));
            axes.push(gauss_legendre_interval(per_axis, mid.im - half.im.abs() - width, mid.im + half.im.abs() + width));
        }
        let total = per_axis.pow(2 * d as u32);
        let mut sum = C64::new(0.0, 0.0);
        let mut idx = vec![0usize; 2 * d];
        for _ in 0..total {
            let mut w = 1.0;
            let mut y = Vec::with_capacity(d);
            for a in 0..d {
                let (re, wre) = (&axes[2 * a].0[idx[2 * a]], axes[2 * a].1[idx[2 * a]]);
                let (im, wim) = (&axes[2 * a + 1].0[idx[2 * a + 1]], axes[2 * a + 1].1[idx[2 * a + 1]]);
                y.push(C64::new(*re, *im));
                w *= wre * wim;
            }
            let yp = CircleBundlePoint::Flat { z: y, theta: 0.0 };
            sum += rx.eval(&yp) * rz.eval(&yp).conj() * w;
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < per_axis {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(sum)
    }
}

/// Gauss–Legendre rule on `[0, 1]` reused by tests that cross-check the
/// analytic monomial integrals.
pub fn latitude_rule(nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(nodes);
    (x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w.iter().map(|v| 0.5 * v).collect())
}

/// `(Dk + 1)/(Dπ)·⟨v_x, v_y⟩^{Dk}`, the closed form the basis sum must match.
pub fn projective_closed_form(model: &ModelSpace, k: u32, x: &CircleBundlePoint, y: &CircleBundlePoint) -> C64 {
    let (d, a, b) = match (model.degree(), x, y) {
        (Some(d), CircleBundlePoint::Sphere { v: a }, CircleBundlePoint::Sphere { v: b }) => (d, a, b),
        _ => panic!("closed form is for ℂP¹ points"),
    };
    let n = (d * k) as i32;
    let overlap = a[0] * b[0].conj() + a[1] * b[1].conj();
    (n as f64 + 1.0) / (d as f64 * PI) * overlap.powi(n)
}
