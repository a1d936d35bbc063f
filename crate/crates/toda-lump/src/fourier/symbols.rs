//! Frequency symbols of the Fourier-side equations.
//!
//! Everything is evaluated through truncated Taylor series around a complex
//! base point, so the same code serves pointwise evaluation, derivatives of
//! `J`, Frobenius coefficients at `ξ = 0` and integration along complex paths.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use super::params::SymbolParams;
use super::series::Series;
use super::FreqFunction;
use crate::{Error, Result, C64, LAMBDA, LAMBDA_INV};

const I: C64 = C64::new(0.0, 1.0);

/// Taylor expansions of every symbol around one base point.
#[derive(Clone, Debug)]
pub struct SymbolSeries {
    pub p: Series,
    pub q: Series,
    pub r: Series,
    /// `(1-γ*E)/(1-γE)·e^{-4πβξ}`, whose derivative is `J`.
    pub jf: Series,
    pub j: Series,
    pub p0: Series,
    pub q0: Series,
}

impl SymbolSeries {
    pub fn at(params: &SymbolParams, xi0: C64, len: usize) -> Self {
        let one = C64::new(1.0, 0.0);
        let rate = I * params.e_rate();
        let xi = Series::linear(xi0, one, len + 1);
        let e = Series::linear(rate * xi0, rate, len + 1).exp();
        let einv = Series::linear(-rate * xi0, -rate, len + 1).exp();
        let decay = Series::linear(
            C64::from(-4.0 * PI * params.beta) * xi0,
            C64::from(-4.0 * PI * params.beta),
            len + 1,
        );
        let (g, gs) = (params.gamma, params.gamma_star);

        let one_minus_ge = e.scale(-g).add_const(one);
        let one_minus_gse = e.scale(-gs).add_const(one);
        let p = (&(&xi.scale(2.0 * PI * I) - &e.scale(LAMBDA_INV.into())) + &einv.scale(LAMBDA.into()))
            .add_const((-2.0).into())
            .scale(one / (2.0 * PI * I));
        let q = &(&one_minus_ge * &einv.scale(params.a2).add_const(params.a1))
            - &(&one_minus_gse * &einv.scale(params.a4).add_const(params.a3));
        let r = &(&one_minus_ge * &einv.scale(params.a4).add_const(params.a3)) * &decay.scale((-1.0).into()).exp();
        let jf = &one_minus_gse.div(&one_minus_ge) * &decay.exp();
        let j = jf.deriv();

        let em1 = e.add_const(-one);
        let one_minus_einv = einv.scale(-one).add_const(one);
        let p0 = &(&xi.scale(2.0 * PI * I) - &em1.scale(LAMBDA.into())) - &one_minus_einv.scale(LAMBDA_INV.into());
        let k = I * (PI / SQRT_2);
        let q0 = &em1.scale(-k * LAMBDA) + &one_minus_einv.scale(k * LAMBDA_INV);

        SymbolSeries {
            p: p.truncate(len),
            q: q.truncate(len),
            r: r.truncate(len),
            jf: jf.truncate(len + 1),
            j: j.truncate(len),
            p0: p0.truncate(len),
            q0: q0.truncate(len),
        }
    }
}

/// Values of the symbols at one (possibly complex) frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolValues {
    pub p: C64,
    pub q: C64,
    pub r: C64,
    pub jf: C64,
    pub j: C64,
    pub dj: C64,
    pub p1: C64,
    pub q1: C64,
    pub r1: C64,
    pub p0: C64,
    pub q0: C64,
}

pub fn symbol_values(params: &SymbolParams, xi: C64) -> SymbolValues {
    let s = SymbolSeries::at(params, xi, 3);
    let (p, q, r, j, dj) = (s.p.coef(0), s.q.coef(0), s.r.coef(0), s.j.coef(0), s.j.coef(1));
    SymbolValues {
        p,
        q,
        r,
        jf: s.jf.coef(0),
        j,
        dj,
        p1: p,
        q1: q - p * dj / j,
        r1: r * j,
        p0: s.p0.coef(0),
        q0: s.q0.coef(0),
    }
}

/// The nine symbols as frequency functions.
#[derive(Clone)]
pub struct Symbols {
    pub params: SymbolParams,
    pub p: FreqFunction,
    pub q: FreqFunction,
    pub j: FreqFunction,
    pub r: FreqFunction,
    pub p1: FreqFunction,
    pub q1: FreqFunction,
    pub r1: FreqFunction,
    pub p0: FreqFunction,
    pub q0: FreqFunction,
}

/// Range scanned for zeros of `J` when populating singular sets.
pub const J_ZERO_SCAN: f64 = 10.0;

pub fn symbols(n: i64, y: f64) -> Symbols {
    let params = SymbolParams::new(n, y);
    let mut zeros = j_zeros(&params, -J_ZERO_SCAN, J_ZERO_SCAN).unwrap_or_default();
    zeros.sort_by(f64::total_cmp);
    let make = |pick: fn(&SymbolValues) -> C64, singular: Vec<f64>| {
        FreqFunction::new(Arc::new(move |xi: f64| pick(&symbol_values(&params, xi.into()))), singular)
    };
    Symbols {
        params,
        p: make(|v| v.p, vec![]),
        q: make(|v| v.q, vec![]),
        j: make(|v| v.j, vec![]),
        r: make(|v| v.r, vec![]),
        p1: make(|v| v.p1, vec![]),
        q1: make(|v| v.q1, zeros.clone()),
        r1: make(|v| v.r1, vec![]),
        p0: make(|v| v.p0, vec![]),
        q0: make(|v| v.q0, vec![]),
    }
}

/// Real zeros of `J` in `[lo, hi]`.
///
/// Each window `[2√2j - 1/2, 2√2j + 1/2]` is scanned for the minimum of `|J|`,
/// which is then polished by complex Newton iteration on the series of `J`.
/// Windows whose polished root leaves the real axis or the window are skipped.
pub fn j_zeros(params: &SymbolParams, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let period = 2.0 * SQRT_2;
    let mut out = Vec::new();
    let j_lo = ((lo - 0.5) / period).ceil() as i64;
    let j_hi = ((hi + 0.5) / period).floor() as i64;
    for jj in j_lo..=j_hi {
        let centre = jj as f64 * period;
        let scale = |xi: f64| symbol_values(params, xi.into()).j.norm() * (4.0 * PI * params.beta * xi).exp();
        let mut best = (f64::INFINITY, centre);
        let steps = 200;
        for k in 0..=steps {
            let xi = centre - 0.5 + k as f64 / steps as f64;
            let v = scale(xi);
            if v < best.0 {
                best = (v, xi);
            }
        }
        let mut z = C64::from(best.1);
        let mut converged = false;
        for _ in 0..50 {
            let s = SymbolSeries::at(params, z, 3);
            let step = s.j.coef(0) / s.j.coef(1);
            z -= step;
            if step.norm() < 1e-13 * (1.0 + z.norm()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { iterations: 50, residual: scale(z.re) });
        }
        if z.im.abs() < 1e-9 && (z.re - centre).abs() <= 0.5 && z.re >= lo && z.re <= hi {
            out.push(z.re);
        }
    }
    Ok(out)
}
