//! The truncated scaling expansion and its remainder envelopes.

use std::f64::consts::PI;

use super::moments::MomentTable;
use super::poly::Poly;
use super::series::HalfPowerSeries;
use crate::geometry::{decompose, symplectic_pairing, TangentVector};
use crate::legendrian::{Branch, BranchSet};
use crate::{Error, Result, C64};

/// Largest supported truncation order.
pub const MAX_ELL: usize = 2;

/// Correction polynomials `a_{l}(p, q)` for `l = 1..=ell`, in the variables
/// `(p_1, …, p_d, q_1, …, q_d)` of the adapted chart.
///
/// The kernel is taken to be its universal Gaussian, which is exact in
/// Bargmann–Fock space.
pub fn compose_expansion(branch: &Branch, ell: usize) -> Result<Vec<Poly>> {
    assert!(ell <= MAX_ELL, "truncation order {ell} exceeds {MAX_ELL}");
    let taylor = &branch.taylor;
    let need = ell as u32 + 2;
    if taylor.order < need {
        return Err(Error::TaylorOrder { have: taylor.order, need });
    }
    let d = taylor.weight.nvars();
    let f0 = taylor.weight.constant_term();
    if f0.norm() < 1e-300 {
        return Err(Error::NumericalDegeneracy("weight vanishes at the branch point".into()));
    }
    let phase = HalfPowerSeries::from_rescaled_taylor(&taylor.phase, 2, ell).scale(C64::new(0.0, -1.0));
    let weight = HalfPowerSeries::from_rescaled_taylor(&taylor.weight, 0, ell).scale(1.0 / f0);
    let density = HalfPowerSeries::from_rescaled_taylor(&taylor.density, 0, ell);
    let product = phase.exp().mul(&weight).mul(&density);

    let max_degree = (1..=ell).filter_map(|r| product.order(r).degree()).max().unwrap_or(0);
    let table = MomentTable::new(d, max_degree);
    let norm = C64::new((2.0 * PI).powf(-(d as f64) / 2.0), 0.0);
    (1..=ell)
        .map(|r| {
            let mut a = Poly::zero(2 * d);
            for (beta, c) in product.order(r).terms() {
                a = &a + &table.entry(beta)?.scale(c * norm);
            }
            Ok(a)
        })
        .collect()
}

/// One branch's contribution to the prediction.
#[derive(Debug, Clone)]
pub struct BranchTerm {
    pub h: C64,
    /// `F_λ(x_j)`.
    pub weight: C64,
    pub parallel: TangentVector,
    pub perpendicular: TangentVector,
    /// Adapted coordinates `(p_j, q_j)` of `w`.
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    /// `a_{lj}(w)` for `l = 1..=ell`.
    pub corrections: Vec<C64>,
    /// `h^{−k}·e^{−‖w⊥‖² − iω(w⊥, w∥)}·F_λ(x_j)·(1 + Σ k^{−l/2} a_l)`.
    pub value: C64,
}

#[derive(Debug, Clone)]
pub struct Prediction {
    pub k: u32,
    pub ell: usize,
    /// `(2k/π)^{d/2}`.
    pub prefactor: f64,
    pub terms: Vec<BranchTerm>,
    pub value: C64,
    /// Whether `‖w‖ ≤ c·k^{1/6}`.
    pub in_window: bool,
}

impl Prediction {
    /// The leading-order value, `ℓ = 0`.
    pub fn leading(&self) -> C64 {
        let kf = self.k as f64;
        self.prefactor
            * self
                .terms
                .iter()
                .map(|t| t.value / (1.0 + t.corrections.iter().enumerate().map(|(l, a)| a * kf.powf(-(l as f64 + 1.0) / 2.0)).sum::<C64>()))
                .sum::<C64>()
    }
}

/// Coefficient polynomials of every branch, composed once.
#[derive(Debug, Clone)]
pub struct Predictor {
    branches: BranchSet,
    ell: usize,
    coefficients: Vec<Vec<Poly>>,
    window_const: f64,
}

impl Predictor {
    pub fn new(branches: BranchSet, ell: usize) -> Result<Self> {
        let coefficients = branches
            .branches
            .iter()
            .map(|b| compose_expansion(b, ell))
            .collect::<Result<_>>()?;
        Ok(Predictor {
            branches,
            ell,
            coefficients,
            window_const: 1.0,
        })
    }

    pub fn with_window_const(mut self, c: f64) -> Self {
        assert!(c > 0.0, "window constant must be positive");
        self.window_const = c;
        self
    }

    pub fn branches(&self) -> &BranchSet {
        &self.branches
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn coefficients(&self, branch: usize) -> &[Poly] {
        &self.coefficients[branch]
    }

    pub fn eval(&self, w: &TangentVector, k: u32) -> Result<Prediction> {
        assert!(k >= 1, "level must be positive");
        let kf = k as f64;
        let d = w.dim();
        let mut terms = Vec::with_capacity(self.branches.len());
        for (branch, coeffs) in self.branches.branches.iter().zip(&self.coefficients) {
            let parts = decompose(w, &branch.frame)?;
            let (p, q) = branch.frame.coordinates(w);
            let omega = symplectic_pairing(&parts.perpendicular, &parts.parallel);
            let gaussian = C64::new(-parts.perpendicular.norm_sqr(), -omega).exp();
            let vars: Vec<f64> = p.iter().chain(&q).copied().collect();
            let corrections: Vec<C64> = coeffs.iter().map(|a| a.eval_real(&vars)).collect();
            let series = C64::new(1.0, 0.0)
                + corrections
                    .iter()
                    .enumerate()
                    .map(|(l, a)| a * kf.powf(-(l as f64 + 1.0) / 2.0))
                    .sum::<C64>();
            let weight = branch.taylor.weight.constant_term();
            let value = branch.h.powi(-(k as i32)) * gaussian * weight * series;
            terms.push(BranchTerm {
                h: branch.h,
                weight,
                parallel: parts.parallel,
                perpendicular: parts.perpendicular,
                p,
                q,
                corrections,
                value,
            });
        }
        let prefactor = (2.0 * kf / PI).powf(d as f64 / 2.0);
        let value = prefactor * terms.iter().map(|t| t.value).sum::<C64>();
        Ok(Prediction {
            k,
            ell: self.ell,
            prefactor,
            terms,
            value,
            in_window: w.norm() <= self.window_const * kf.powf(1.0 / 6.0),
        })
    }
}

/// The truncated expansion of `u_k(x + w/√k)` at order `ell`.
pub fn predict(branches: &BranchSet, w: &TangentVector, k: u32, ell: usize) -> Result<Prediction> {
    predict_with(branches, w, k, ell, 1.0)
}

/// [`predict`] with an explicit validity-window constant.
pub fn predict_with(branches: &BranchSet, w: &TangentVector, k: u32, ell: usize, window_const: f64) -> Result<Prediction> {
    Predictor::new(branches.clone(), ell)?.with_window_const(window_const).eval(w, k)
}

/// `C·k^{(d−ℓ−1)/2}·Σ_j e^{−(1−ε)/2·‖w_j^⊥‖²}`.
pub fn remainder_bound(k: u32, ell: usize, branches: &BranchSet, w: &TangentVector, c: f64, epsilon: f64) -> Result<f64> {
    let norms = branches
        .branches
        .iter()
        .map(|b| Ok(decompose(w, &b.frame)?.perpendicular.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(remainder_envelope(k, ell, w.dim(), &norms, c, epsilon))
}

/// [`remainder_bound`] from the squared perpendicular norms of each branch.
pub fn remainder_envelope(k: u32, ell: usize, dim: usize, perpendicular_sq: &[f64], c: f64, epsilon: f64) -> f64 {
    assert!(epsilon > 0.0 && epsilon < 1.0, "ε must lie in (0, 1)");
    assert!(c > 0.0, "constant must be positive");
    let exponent = (dim as f64 - ell as f64 - 1.0) / 2.0;
    c * (k as f64).powf(exponent) * perpendicular_sq.iter().map(|n| (-(1.0 - epsilon) / 2.0 * n).exp()).sum::<f64>()
}

/// `C_R·k^{d−(R+1)}·e^{−(1−ε)/2·(‖p‖² + ‖q − q_j‖²)}`.
pub fn szego_remainder_bound(k: u32, r: u32, p: &[f64], q: &[f64], qj: &[f64], c: f64, epsilon: f64) -> f64 {
    assert!(p.len() == q.len() && q.len() == qj.len(), "dimension mismatch");
    assert!(epsilon > 0.0 && epsilon <= 1.0, "ε must lie in (0, 1]");
    let d = p.len() as f64;
    let spread: f64 = p.iter().map(|a| a * a).sum::<f64>() + q.iter().zip(qj).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    c * (k as f64).powf(d - (r as f64 + 1.0)) * (-(1.0 - epsilon) / 2.0 * spread).exp()
}
