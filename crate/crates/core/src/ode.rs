//! Adaptive Dormand–Prince 5(4) integration for scalar transport equations
//! `y' = f(t)`, `y' = f(t, y)`.

use crate::{Error, Result};

// Butcher tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integration outcome: final value and the accepted step count.
#[derive(Debug, Clone, Copy)]
pub struct Integrated {
    pub value: f64,
    pub steps: usize,
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` with local error `tol`.
pub fn dopri5<F>(f: F, t0: f64, y0: f64, t1: f64, tol: f64) -> Result<Integrated>
where
    F: Fn(f64, f64) -> f64,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(Integrated { value: y0, steps: 0 });
    }
    let dir = span.signum();
    let mut h = dir * span.abs().min(0.1);
    let (mut t, mut y) = (t0, y0);
    let mut steps = 0;
    let mut k = [0.0; 7];
    for _ in 0..1_000_000 {
        if (t1 - t) * dir <= 0.0 {
            return Ok(Integrated { value: y, steps });
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        for s in 0..7 {
            let ys = y + h * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
            k[s] = f(t + C[s] * h, ys);
        }
        let y5 = y + h * (0..7).map(|s| B5[s] * k[s]).sum::<f64>();
        let y4 = y + h * (0..7).map(|s| B4[s] * k[s]).sum::<f64>();
        let err = (y5 - y4).abs();
        let scale = tol * (1.0 + y.abs().max(y5.abs()));
        if err <= scale {
            t += h;
            y = y5;
            steps += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { 0.9 * (scale / err).powf(0.2) };
        h *= factor.clamp(0.2, 5.0);
        if h.abs() < 1e-14 * span.abs() {
            return Err(Error::NumericalDegeneracy("transport step size underflow".into()));
        }
    }
    Err(Error::NumericalDegeneracy("transport step budget exhausted".into()))
}
