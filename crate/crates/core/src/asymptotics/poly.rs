//! Sparse multivariate polynomials with complex coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::C64;

/// `Σ c_β x^β` over a fixed number of variables; zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C64::new(1.0, 0.0))
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, C64::new(1.0, 0.0))
    }

    pub fn monomial(exponents: Vec<u32>, c: C64) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    /// A univariate polynomial from ascending real coefficients.
    pub fn univariate(coefficients: &[f64]) -> Self {
        let mut p = Self::zero(1);
        for (m, c) in coefficients.iter().enumerate() {
            p.add_term(vec![m as u32], C64::new(*c, 0.0));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: C64) {
        assert_eq!(exponents.len(), self.nvars, "variable count mismatch");
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(exponents).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if *entry == C64::new(0.0, 0.0) {
            self.terms.retain(|_, v| *v != C64::new(0.0, 0.0));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], C64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn coefficient(&self, exponents: &[u32]) -> C64 {
        self.terms.get(exponents).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn constant_term(&self) -> C64 {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    /// Terms of total degree exactly `deg`.
    pub fn homogeneous(&self, deg: u32) -> Self {
        self.filter(|e| e.iter().sum::<u32>() == deg)
    }

    /// Terms of total degree at most `deg`.
    pub fn truncate(&self, deg: u32) -> Self {
        self.filter(|e| e.iter().sum::<u32>() <= deg)
    }

    fn filter(&self, keep: impl Fn(&[u32]) -> bool) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), *c)).collect(),
        }
    }

    pub fn powi(&self, m: u32) -> Self {
        (0..m).fold(Self::one(self.nvars), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        assert_eq!(x.len(), self.nvars, "variable count mismatch");
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(x).fold(*c, |acc, (m, xi)| acc * xi.powu(*m)))
            .sum()
    }

    pub fn eval_real(&self, x: &[f64]) -> C64 {
        let xc: Vec<C64> = x.iter().map(|v| C64::new(*v, 0.0)).collect();
        self.eval(&xc)
    }

    /// `P(x + shift)`.
    pub fn shift(&self, shift: &[f64]) -> Self {
        assert_eq!(shift.len(), self.nvars, "variable count mismatch");
        let translated: Vec<Poly> = (0..self.nvars)
            .map(|i| &Self::var(self.nvars, i) + &Self::constant(self.nvars, C64::new(shift[i], 0.0)))
            .collect();
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut term = Self::constant(self.nvars, *c);
            for (i, m) in e.iter().enumerate() {
                term = &term * &translated[i].powi(*m);
            }
            out = &out + &term;
        }
        out
    }

    /// `exp(P)` truncated at total degree `deg`; `P` must have no constant term.
    pub fn exp_truncated(&self, deg: u32) -> Self {
        assert_eq!(self.constant_term(), C64::new(0.0, 0.0), "exp_truncated needs a vanishing constant term");
        let mut out = Self::one(self.nvars);
        let mut power = Self::one(self.nvars);
        for m in 1..=deg {
            power = (&power * self).truncate(deg);
            if power.is_zero() {
                break;
            }
            out = &out + &power.scale(C64::new(1.0 / factorial(m), 0.0));
        }
        out
    }

    /// Embeds into a larger variable set: variable `i` becomes `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; nvars];
            for (i, m) in e.iter().enumerate() {
                ne[map[i]] += m;
            }
            out.add_term(ne, *c);
        }
        out
    }

    /// Whether every term has odd total degree.
    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() % 2 == 1)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| **m > 0)
                    .map(|(i, m)| if *m == 1 { format!("x{i}") } else { format!("x{i}^{m}") })
                    .collect();
                format!("({}{:+}i){}", c.re, c.im, if mono.is_empty() { String::new() } else { format!("·{}", mono.join("·")) })
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
