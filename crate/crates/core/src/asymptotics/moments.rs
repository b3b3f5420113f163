//! `∫ q^β e^{−ip·q − ½‖q − q_j‖²} dq` in closed form.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::poly::Poly;
use crate::{Error, Result, C64};

pub const DEFAULT_MAX_DEGREE: u32 = 8;

/// Moment polynomials `T_β(p, q_j)` with
/// `∫ q^β e^{−ip·q − ½‖q − q_j‖²} dq = T_β(p, q_j)·e^{−ip·q_j − ½‖p‖²}`.
///
/// Variables are ordered `(p_1, …, p_d, q_1, …, q_d)`.
#[derive(Debug, Clone)]
pub struct MomentTable {
    dim: usize,
    max_degree: u32,
    entries: BTreeMap<Vec<u32>, Poly>,
}

/// Probabilists' Hermite polynomials `He_0, …, He_n` in one variable.
pub fn hermite(n: u32) -> Vec<Poly> {
    let x = Poly::var(1, 0);
    let mut out = vec![Poly::one(1)];
    if n >= 1 {
        out.push(x.clone());
    }
    for m in 1..n as usize {
        let next = &(&x * &out[m]) - &out[m - 1].scale(C64::new(m as f64, 0.0));
        out.push(next);
    }
    out
}

fn binomial(n: u32, r: u32) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl MomentTable {
    pub fn new(dim: usize, max_degree: u32) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        // One-dimensional factors in (p, q0):
        // √(2π)·Σ_γ C(b,γ)·q0^{b−γ}·(−i)^γ·He_γ(p).
        let he = hermite(max_degree);
        let minus_i = C64::new(0.0, -1.0);
        let factors: Vec<Poly> = (0..=max_degree)
            .map(|b| {
                (0..=b).fold(Poly::zero(2), |acc, g| {
                    let c = minus_i.powu(g) * binomial(b, g) * (2.0 * PI).sqrt();
                    let term = &he[g as usize].embed(2, &[0]) * &Poly::monomial(vec![0, b - g], c);
                    &acc + &term
                })
            })
            .collect();
        let mut entries = BTreeMap::new();
        for beta in multi_indices(dim, max_degree) {
            let mut p = Poly::one(2 * dim);
            for (i, b) in beta.iter().enumerate() {
                p = &p * &factors[*b as usize].embed(2 * dim, &[i, dim + i]);
            }
            entries.insert(beta, p);
        }
        MomentTable {
            dim,
            max_degree,
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn entry(&self, beta: &[u32]) -> Result<&Poly> {
        assert_eq!(beta.len(), self.dim, "multi-index dimension mismatch");
        let degree: u32 = beta.iter().sum();
        if degree > self.max_degree {
            return Err(Error::MomentDegree {
                degree,
                max: self.max_degree,
            });
        }
        Ok(&self.entries[beta])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[u32], &Poly)> {
        self.entries.iter().map(|(b, p)| (b.as_slice(), p))
    }

    /// The moment itself at `(p, q_j)`.
    pub fn moment(&self, beta: &[u32], p: &[f64], qj: &[f64]) -> Result<C64> {
        assert!(p.len() == self.dim && qj.len() == self.dim, "dimension mismatch");
        let poly = self.entry(beta)?;
        let vars: Vec<f64> = p.iter().chain(qj).copied().collect();
        let pq: f64 = p.iter().zip(qj).map(|(a, b)| a * b).sum();
        let pp: f64 = p.iter().map(|a| a * a).sum();
        Ok(poly.eval_real(&vars) * C64::new(-0.5 * pp, -pq).exp())
    }
}

/// All multi-indices of length `dim` with total degree at most `max`.
pub fn multi_indices(dim: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                let used: u32 = prefix.iter().sum();
                (0..=max - used).map(move |m| {
                    let mut e = prefix.clone();
                    e.push(m);
                    e
                })
            })
            .collect();
    }
    out
}

/// `∫ q^β e^{−ip·q − ½‖q − q_j‖²} dq` with the default table degree.
pub fn gaussian_moment(beta: &[u32], p: &[f64], qj: &[f64]) -> Result<C64> {
    let degree: u32 = beta.iter().sum();
    if degree > DEFAULT_MAX_DEGREE {
        return Err(Error::MomentDegree {
            degree,
            max: DEFAULT_MAX_DEGREE,
        });
    }
    MomentTable::new(beta.len(), degree).moment(beta, p, qj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_values() {
        let he = hermite(4);
        // He_4(x) = x⁴ − 6x² + 3
        assert_eq!(he[4], Poly::univariate(&[3.0, 0.0, -6.0, 0.0, 1.0]));
    }

    #[test]
    fn table_shape() {
        let t = MomentTable::new(2, 3);
        assert_eq!(t.entries().count(), 10);
        let root = t.entry(&[0, 0]).unwrap();
        assert!((root.constant_term() - C64::new(2.0 * PI, 0.0)).norm() < 1e-14);
        assert_eq!(root.degree(), Some(0));
        assert!(matches!(t.entry(&[2, 2]), Err(Error::MomentDegree { degree: 4, max: 3 })));
    }
}
