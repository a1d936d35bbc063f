//! Quadrature checks of the transformed linearized operators against their
//! factorized forms in terms of `h` and `g`.

use std::f64::consts::PI;

use super::params::SymbolParams;
use super::quad::{self, QuadOptions};
use super::symbols::symbol_values;
use super::transforms::{ft_simple_pole, ft_theta_ratios, PoleBranch};
use super::{cis, FreqFunction};
use crate::{Error, Result, C64, DELTA, LAMBDA, LAMBDA_INV};

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

/// Worst disagreement between two sides of an identity over a sample set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralResidual {
    pub max_abs: f64,
    /// Largest modulus of the reference side over the samples.
    pub scale: f64,
    /// `max_abs / scale`, or `max_abs` when the reference side vanishes.
    pub relative: f64,
    pub worst_xi: f64,
    pub samples: usize,
}

impl SpectralResidual {
    fn collect(pairs: &[(f64, C64, C64)]) -> Self {
        let scale = pairs.iter().map(|p| p.1.norm()).fold(0.0, f64::max);
        let (worst_xi, max_abs) = pairs
            .iter()
            .map(|p| (p.0, (p.1 - p.2).norm()))
            .fold((f64::NAN, 0.0), |acc, v| if v.1 > acc.1 || acc.0.is_nan() { v } else { acc });
        SpectralResidual {
            max_abs,
            scale,
            relative: if scale > 0.0 { max_abs / scale } else { max_abs },
            worst_xi,
            samples: pairs.len(),
        }
    }
}

fn opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 }
}

fn support(phi: &FreqFunction) -> Result<(f64, f64)> {
    phi.support
        .ok_or_else(|| Error::InvalidArgument("identity checks need a compactly supported test function".into()))
}

/// `∫ f(s) K(ξ - s) ds` over the support of `f`, split where `K` jumps.
fn convolve(f: &dyn Fn(f64) -> C64, k: &FreqFunction, (lo, hi): (f64, f64), xi: f64) -> Result<C64> {
    let g = |s: f64| f(s) * k.eval(xi - s);
    if lo < xi && xi < hi {
        quad::integrate_pieces(&g, &[lo, xi, hi], opts())
    } else {
        quad::integrate(&g, lo, hi, opts())
    }
}

fn e(xi: f64) -> C64 {
    cis(DELTA.into(), xi)
}

/// Compares `(1 - γE)·[F1φ]^` assembled from the convolution identities with
/// `2πi e^{2πi(α+βi)ξ}(P h' + Q h - R g)`, where
/// `h(ξ) = ∫_{-∞}^ξ (1-γE)e^{-2πi(α+βi)s}φ̂(s) ds` and `g(ξ) = ∫_ξ^∞ h J`.
///
/// `g` is evaluated after one integration by parts,
/// `g(ξ) = -h(ξ)Jf(ξ) - ∫_ξ^∞ h' Jf`, with `Jf' = J`.
pub fn verify_prop_f1(n: i64, y: f64, phi: &FreqFunction, samples: &[f64]) -> Result<SpectralResidual> {
    let (lo, hi) = support(phi)?;
    let p = SymbolParams::new(n, y);
    let t = ft_theta_ratios(n, y);
    let up = C64::new(p.alpha, p.beta);
    let phi_e = |s: f64| e(s) * phi.eval(s);
    let phi_einv = |s: f64| phi.eval(s) / e(s);
    let phi_f = |s: f64| phi.eval(s);
    let weight = |s: f64| (1.0 - p.gamma * e(s)) * cis(-up, s) * phi.eval(s);

    let mut pairs = Vec::with_capacity(samples.len());
    for &xi in samples {
        let ex = e(xi);
        let mut lhs = (TWO_PI_I * xi - 2.0 - ex * LAMBDA_INV + LAMBDA / ex) * phi.eval(xi);
        lhs -= convolve(&phi_f, &t.ds_log_theta, (lo, hi), xi)?;
        lhs -= convolve(&phi_f, &t.dt_log_theta_prev, (lo, hi), xi)?;
        lhs -= convolve(&phi_e, &t.prev_over_current.smooth, (lo, hi), xi)? * LAMBDA_INV;
        lhs += convolve(&phi_einv, &t.current_over_prev.smooth, (lo, hi), xi)? * LAMBDA;
        let lhs = lhs * (1.0 - p.gamma * ex);

        let v = symbol_values(&p, xi.into());
        let upper = xi.clamp(lo, hi);
        let h = quad::integrate(&weight, lo, upper, opts())?;
        let h_prime = weight(xi);
        let tail = if xi < hi {
            let wj = |s: f64| weight(s) * symbol_values(&p, s.into()).jf;
            quad::integrate(&wj, xi.max(lo), hi, opts())?
        } else {
            C64::new(0.0, 0.0)
        };
        let g = -h * v.jf - tail;
        let rhs = TWO_PI_I * cis(up, xi) * (v.p * h_prime + v.q * h - v.r * g);
        pairs.push((xi, lhs, rhs));
    }
    Ok(SpectralResidual::collect(&pairs))
}

/// Compares `[F0σ]^`, assembled from the transforms of `1/ω`, with its
/// factorized form: for `y > 0`
/// `e^{2πi(α0+β0 i)ξ}/(E-1)·(P0 h1' + Q0 h1)` with
/// `h1 = ∫_{-∞}^ξ e^{-2πi(α0+β0 i)s}(E-1)σ̂`, and for `y < 0`
/// `-e^{2πi(α0-β0 i)ξ}/(E-1)·(P0 h2' + Q0 h2)` with `h2 = ∫_ξ^∞ …`.
pub fn verify_lemma_h(n: i64, y: f64, sigma: &FreqFunction, samples: &[f64]) -> Result<SpectralResidual> {
    if y == 0.0 {
        return Err(Error::InvalidArgument("the factorization needs y ≠ 0".into()));
    }
    let (lo, hi) = support(sigma)?;
    let p = SymbolParams::new(n, y);
    let branch = if y > 0.0 { PoleBranch::Upper } else { PoleBranch::Lower };
    let offset = (y / std::f64::consts::SQRT_2).abs();
    let ka = ft_simple_pole(p.alpha0, offset, branch)?;
    let kb = ft_simple_pole(p.alpha0 - p.c, offset, branch)?;
    let dp = |s: f64| (e(s) - 1.0) * sigma.eval(s);
    let dm = |s: f64| (1.0 - 1.0 / e(s)) * sigma.eval(s);
    let rate = C64::new(p.alpha0, p.beta0.copysign(y));
    let weight = |s: f64| cis(-rate, s) * dp(s);

    let mut pairs = Vec::with_capacity(samples.len());
    for &xi in samples {
        let ex = e(xi);
        if (ex - 1.0).norm() < 1e-6 {
            return Err(Error::InvalidArgument(format!("sample ξ = {xi} sits on a zero of E - 1")));
        }
        let conv_a = convolve(&dp, &ka, (lo, hi), xi)? * DELTA;
        let conv_b = convolve(&dm, &kb, (lo, hi), xi)? * DELTA;
        let lhs = TWO_PI_I * xi * sigma.eval(xi) - (dp(xi) - conv_a) * LAMBDA - (dm(xi) + conv_b) * LAMBDA_INV;

        let v = symbol_values(&p, xi.into());
        let clamp = xi.clamp(lo, hi);
        let rhs = if y > 0.0 {
            let h1 = quad::integrate(&weight, lo, clamp, opts())?;
            cis(rate, xi) / (ex - 1.0) * (v.p0 * weight(xi) + v.q0 * h1)
        } else {
            let h2 = quad::integrate(&weight, clamp, hi, opts())?;
            -cis(rate, xi) / (ex - 1.0) * (-v.p0 * weight(xi) + v.q0 * h2)
        };
        pairs.push((xi, lhs, rhs));
    }
    Ok(SpectralResidual::collect(&pairs))
}
