//! Complex-linear and symplectic primitives on `T_mM ≅ ℂ^d`.
//!
//! Conventions, fixed once for the whole crate:
//!
//! - the Riemannian metric is `g(v, u) = Re Σ v_a · conj(u_a)`;
//! - the Kähler form is `ω(v, u) = Im Σ conj(v_a) · u_a`, so `ω(1, i) = 1`
//!   and `ω(v, i·v) = g(v, v)`.
//!
//! With these signs the exact Bargmann–Fock kernel at `x + w/√k` against
//! `x + iq/√k` carries the phase `e^{-i p·q}` for `w = p + i q_w`, and the
//! scaling prediction carries `e^{-i ω(w⊥, w∥)}` with `ω(p, i q) = p·q`.

use nalgebra::{DMatrix, DVector};

use crate::{tol, Error, Result, C64};

/// A tangent vector in Heisenberg-chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(Vec<C64>);

impl TangentVector {
    pub fn new(components: Vec<C64>) -> Self {
        assert!(!components.is_empty(), "tangent vectors need d >= 1");
        assert!(
            components.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
            "tangent vector components must be finite"
        );
        TangentVector(components)
    }

    pub fn zeros(d: usize) -> Self {
        Self::new(vec![C64::new(0.0, 0.0); d])
    }

    /// Builds `p + i q` from real and imaginary parts.
    pub fn from_parts(p: &[f64], q: &[f64]) -> Self {
        assert_eq!(p.len(), q.len());
        Self::new(p.iter().zip(q).map(|(&a, &b)| C64::new(a, b)).collect())
    }

    /// The single-component vector `re + i·im`.
    pub fn scalar(re: f64, im: f64) -> Self {
        Self::new(vec![C64::new(re, im)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[C64] {
        &self.0
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.re).collect()
    }

    pub fn imag_part(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.im).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        TangentVector(self.0.iter().map(|c| c * s).collect())
    }

    /// Multiplication by `i`, the complex structure `J`.
    pub fn rotate_j(&self) -> Self {
        self.scale(C64::i())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        TangentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        TangentVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

/// `Re Σ v_a conj(u_a)`.
pub fn riemannian_inner(v: &TangentVector, u: &TangentVector) -> f64 {
    assert_eq!(v.dim(), u.dim(), "dimension mismatch");
    v.0.iter().zip(&u.0).map(|(a, b)| (a * b.conj()).re).sum()
}

/// `Im Σ conj(v_a) u_a`.
pub fn symplectic_pairing(v: &TangentVector, u: &TangentVector) -> f64 {
    assert_eq!(v.dim(), u.dim(), "dimension mismatch");
    v.0.iter().zip(&u.0).map(|(a, b)| a.re * b.im - a.im * b.re).sum()
}

/// A real basis of a Lagrangian subspace `L ⊂ ℂ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianFrame {
    basis: Vec<TangentVector>,
}

impl LagrangianFrame {
    pub fn new(basis: Vec<TangentVector>) -> Result<Self> {
        let d = basis.first().map(TangentVector::dim).ok_or_else(|| {
            Error::DegenerateFrame("empty basis".into())
        })?;
        if basis.len() != d || basis.iter().any(|b| b.dim() != d) {
            return Err(Error::DegenerateFrame(format!(
                "need {d} vectors of dimension {d}"
            )));
        }
        for (a, fa) in basis.iter().enumerate() {
            for fb in &basis[a + 1..] {
                let w = symplectic_pairing(fa, fb);
                if w.abs() > tol::LAGRANGIAN * fa.norm() * fb.norm() {
                    return Err(Error::DegenerateFrame(format!(
                        "span is not Lagrangian: ω = {w:e}"
                    )));
                }
            }
        }
        let frame = LagrangianFrame { basis };
        frame.gram_cholesky()?;
        Ok(frame)
    }

    /// The frame `{i·e_1, …, i·e_d}` of an adapted chart.
    pub fn imaginary_axes(d: usize) -> Self {
        let basis = (0..d)
            .map(|a| {
                let mut c = vec![C64::new(0.0, 0.0); d];
                c[a] = C64::i();
                TangentVector::new(c)
            })
            .collect();
        LagrangianFrame { basis }
    }

    /// A one-dimensional frame spanned by `direction`.
    pub fn line(direction: C64) -> Result<Self> {
        Self::new(vec![TangentVector::new(vec![direction])])
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[TangentVector] {
        &self.basis
    }

    fn gram_cholesky(&self) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
        let d = self.dim();
        let gram = DMatrix::from_fn(d, d, |a, b| riemannian_inner(&self.basis[a], &self.basis[b]));
        let scale = (0..d).map(|a| gram[(a, a)]).fold(0.0, f64::max);
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::DegenerateFrame("frame is rank deficient".into()))?;
        let min_pivot = chol.l().diagonal().iter().fold(f64::INFINITY, |m, x| m.min(*x));
        if !(min_pivot * min_pivot > 1e-24 * scale) {
            return Err(Error::DegenerateFrame("frame is rank deficient".into()));
        }
        Ok(chol)
    }

    /// Coordinates `(p, q)` of `w` in the real basis `{-i f_a} ∪ {f_a}`.
    ///
    /// For the imaginary-axis frame this is `w = p + i q`.
    pub fn coordinates(&self, w: &TangentVector) -> (Vec<f64>, Vec<f64>) {
        let chol = self
            .gram_cholesky()
            .expect("frame validated at construction");
        let solve = |rhs: Vec<f64>| chol.solve(&DVector::from_vec(rhs)).iter().copied().collect();
        let q = solve(self.basis.iter().map(|f| riemannian_inner(w, f)).collect());
        let p = solve(
            self.basis
                .iter()
                .map(|f| riemannian_inner(w, &f.scale(-C64::i())))
                .collect(),
        );
        (p, q)
    }
}

/// `w = w∥ + w⊥` relative to a Lagrangian frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentDecomposition {
    pub parallel: TangentVector,
    pub perpendicular: TangentVector,
}

/// Orthogonal projection of `w` onto `span_ℝ(frame)` via the normal equations.
pub fn decompose(w: &TangentVector, frame: &LagrangianFrame) -> Result<TangentDecomposition> {
    assert_eq!(w.dim(), frame.dim(), "dimension mismatch");
    let chol = frame.gram_cholesky()?;
    let rhs = DVector::from_iterator(frame.dim(), frame.basis.iter().map(|f| riemannian_inner(w, f)));
    let coef = chol.solve(&rhs);
    let mut parallel = TangentVector::zeros(w.dim());
    for (c, f) in coef.iter().zip(&frame.basis) {
        parallel = parallel.add(&f.scale(C64::new(*c, 0.0)));
    }
    let perpendicular = w.sub(&parallel);
    Ok(TangentDecomposition {
        parallel,
        perpendicular,
    })
}
