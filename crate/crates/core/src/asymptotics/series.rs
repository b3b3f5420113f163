//! Truncated series in powers of `k^{-1/2}` with polynomial coefficients.

use super::poly::Poly;
use crate::C64;

/// `Σ_{r=0}^{R} k^{-r/2}·c_r(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPowerSeries {
    orders: Vec<Poly>,
}

impl HalfPowerSeries {
    pub fn new(orders: Vec<Poly>) -> Self {
        assert!(!orders.is_empty(), "series needs a truncation order");
        let n = orders[0].nvars();
        assert!(orders.iter().all(|p| p.nvars() == n), "variable count mismatch");
        HalfPowerSeries { orders }
    }

    pub fn one(nvars: usize, truncation: usize) -> Self {
        let mut orders = vec![Poly::zero(nvars); truncation + 1];
        orders[0] = Poly::one(nvars);
        Self::new(orders)
    }

    /// Regroups a Taylor polynomial `P(q/√k)·k^{offset/2}` by half-powers:
    /// the degree-`m` part lands at order `m − offset`. Parts of degree
    /// below `offset` must vanish.
    pub fn from_rescaled_taylor(taylor: &Poly, offset: u32, truncation: usize) -> Self {
        let n = taylor.nvars();
        let orders = (0..=truncation)
            .map(|r| taylor.homogeneous(r as u32 + offset))
            .collect();
        for m in 0..offset {
            assert!(taylor.homogeneous(m).is_zero(), "degree {m} part must vanish");
        }
        let mut s = Self::new(orders);
        if s.orders.iter().all(Poly::is_zero) {
            s.orders[0] = Poly::zero(n);
        }
        s
    }

    pub fn truncation(&self) -> usize {
        self.orders.len() - 1
    }

    pub fn nvars(&self) -> usize {
        self.orders[0].nvars()
    }

    pub fn order(&self, r: usize) -> &Poly {
        &self.orders[r]
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.orders.iter().map(|p| p.scale(s)).collect())
    }

    /// Product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let r = self.truncation().min(other.truncation());
        let n = self.nvars();
        let orders = (0..=r)
            .map(|m| {
                (0..=m).fold(Poly::zero(n), |acc, i| &acc + &(&self.orders[i] * &other.orders[m - i]))
            })
            .collect();
        Self::new(orders)
    }

    /// `exp(S)` for a series with vanishing order-0 part.
    pub fn exp(&self) -> Self {
        assert!(self.orders[0].is_zero(), "exp needs a vanishing leading order");
        let r = self.truncation();
        let mut out = Self::one(self.nvars(), r);
        let mut power = Self::one(self.nvars(), r);
        let mut fact = 1.0;
        for m in 1..=r {
            power = power.mul(self);
            fact *= m as f64;
            out = out.add(&power.scale(C64::new(1.0 / fact, 0.0)));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let r = self.truncation().min(other.truncation());
        Self::new((0..=r).map(|m| &self.orders[m] + &other.orders[m]).collect())
    }
}
