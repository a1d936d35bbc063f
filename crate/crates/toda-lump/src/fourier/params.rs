use std::f64::consts::{PI, SQRT_2};

use crate::{C64, DELTA, LAMBDA};

/// Constants attached to a lattice site `n` and a height `y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolParams {
    pub n: i64,
    pub y: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub b: f64,
    pub c: f64,
    pub alpha1: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub a1: C64,
    pub a2: C64,
    pub a3: C64,
    pub a4: C64,
    pub gamma: C64,
    pub gamma_star: C64,
}

impl SymbolParams {
    pub fn new(n: i64, y: f64) -> Self {
        let c = DELTA;
        let alpha = n as f64 * c;
        let beta = (y * y / 2.0 + 1.0 / 32.0).sqrt();
        let b = -y / 2.0;
        let i = C64::new(0.0, 1.0);
        let a1 = C64::from(0.5 - b / (2.0 * beta));
        let a3 = C64::from(-(0.5 + b / (2.0 * beta)));
        let corr = C64::from(SQRT_2 / (16.0 * beta)) / i;
        let a2 = -(C64::from(0.5) - corr) * (LAMBDA / SQRT_2);
        let a4 = (C64::from(0.5) + corr) * (LAMBDA / SQRT_2);
        SymbolParams {
            n,
            y,
            lambda: LAMBDA,
            alpha,
            beta,
            b,
            c,
            alpha1: alpha - c,
            alpha0: (n as f64 + (SQRT_2 - 1.0) / 2.0) * c,
            beta0: y.abs() / SQRT_2,
            a1,
            a2,
            a3,
            a4,
            gamma: a4 / (a1 * LAMBDA * LAMBDA),
            gamma_star: a2 / (a3 * LAMBDA * LAMBDA),
        }
    }

    /// Angular rate of `E(ξ) = e^{2πicξ}`, i.e. `π/√2`.
    pub fn e_rate(&self) -> f64 {
        2.0 * PI * self.c
    }
}
