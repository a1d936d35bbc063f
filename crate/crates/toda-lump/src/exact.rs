//! Closed-form tau families, the lump, Hirota products and residuals of the
//! nonlinear lattice, its bilinear form and the Bäcklund systems.

use std::f64::consts::SQRT_2;

use num_complex::Complex;
use twofloat::TwoFloat;

use crate::jet::{to_c64, Jet, JetDd, Scalar, SeqField};
use crate::{Residual, SitePoint, C64, LAMBDA};

const TWO_SQRT2: f64 = 2.0 * SQRT_2;

/// Constant term `(√2 - 1)/2` of ω.
pub const OMEGA_SHIFT: f64 = (SQRT_2 - 1.0) / 2.0;

/// The three tau families generated from the vacuum by Bäcklund steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TauFamily {
    /// κ ≡ 1
    Kappa,
    /// ω = 2√2x + n + 2iy + (√2-1)/2
    Omega,
    /// θ = (2√2x + n)² + 4y² + 1/4
    Theta,
}

impl TauFamily {
    pub const ALL: [TauFamily; 3] = [TauFamily::Kappa, TauFamily::Omega, TauFamily::Theta];

    pub fn name(self) -> &'static str {
        match self {
            TauFamily::Kappa => "kappa",
            TauFamily::Omega => "omega",
            TauFamily::Theta => "theta",
        }
    }
}

impl SeqField for TauFamily {
    fn jet(&self, n: i64, x: f64, y: f64) -> Jet {
        tau_jet(*self, n, x, y, SQRT_2)
    }

    fn jet_dd(&self, n: i64, x: f64, y: f64) -> Option<JetDd> {
        Some(tau_jet(*self, n, x, y, sqrt2_dd()))
    }
}

fn sqrt2_dd() -> TwoFloat {
    TwoFloat::from(2.0).sqrt()
}

/// `1/a` to double-double accuracy; `TwoFloat` division alone is only good
/// to about `1e-16`.
fn recip_dd(a: TwoFloat) -> TwoFloat {
    let mut r = TwoFloat::from(1.0 / f64::from(a));
    for _ in 0..2 {
        r += r * (1.0 - a * r);
    }
    r
}

/// The tau jets with `√2` supplied at the working precision.
fn tau_jet<S: Scalar>(family: TauFamily, n: i64, x: f64, y: f64, sqrt2: S) -> Jet<S> {
    let c = |v: f64| S::from(v);
    let two_sqrt2 = sqrt2 * c(2.0);
    let (x, y) = (c(x), c(y));
    let xx = two_sqrt2 * x + c(n as f64);
    let zero = S::zero();
    match family {
        TauFamily::Kappa => Jet::real_in(S::one(), zero, zero, zero, zero, zero),
        TauFamily::Omega => Jet {
            v: Complex::new(xx + (sqrt2 - S::one()) * c(0.5), c(2.0) * y),
            dx: Complex::new(two_sqrt2, zero),
            dy: Complex::new(zero, c(2.0)),
            ..Jet::default()
        },
        TauFamily::Theta => Jet::real_in(
            xx * xx + c(4.0) * y * y + c(0.25),
            c(2.0) * two_sqrt2 * xx,
            c(8.0) * y,
            c(16.0),
            zero,
            c(8.0),
        ),
    }
}

/// θ_n at a real point without going through complex arithmetic.
pub fn theta(n: i64, x: f64, y: f64) -> f64 {
    let xx = TWO_SQRT2 * x + n as f64;
    xx * xx + 4.0 * y * y + 0.25
}

/// Value and partials in `s, t` up to second order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauJet {
    pub value: C64,
    pub d_s: C64,
    pub d_t: C64,
    pub d_ss: C64,
    pub d_st: C64,
    pub d_tt: C64,
}

impl From<Jet> for TauJet {
    fn from(j: Jet) -> Self {
        TauJet { value: j.v, d_s: j.ds(), d_t: j.dt(), d_ss: j.dss(), d_st: j.dst(), d_tt: j.dtt() }
    }
}

pub fn eval_tau(family: TauFamily, p: SitePoint) -> TauJet {
    family.jet(p.n, p.x, p.y).into()
}

/// Derivatives of `ln θ_n` up to third order in `(x, y)`.
#[derive(Clone, Copy, Debug)]
pub struct LogTheta {
    pub g: f64,
    pub gx: f64,
    pub gy: f64,
    pub gxx: f64,
    pub gxy: f64,
    pub gyy: f64,
    pub gxxx: f64,
    pub gxxy: f64,
    pub gxyy: f64,
    pub gyyy: f64,
}

pub fn log_theta(n: i64, x: f64, y: f64) -> LogTheta {
    let xx = TWO_SQRT2 * x + n as f64;
    let th = xx * xx + 4.0 * y * y + 0.25;
    let (tx, ty, txx, tyy) = (2.0 * TWO_SQRT2 * xx, 8.0 * y, 16.0, 8.0);
    let (i1, i2) = (1.0 / th, 1.0 / (th * th));
    let i3 = i1 * i2;
    LogTheta {
        g: th.ln(),
        gx: tx * i1,
        gy: ty * i1,
        gxx: txx * i1 - tx * tx * i2,
        gxy: -tx * ty * i2,
        gyy: tyy * i1 - ty * ty * i2,
        gxxx: -3.0 * txx * tx * i2 + 2.0 * tx * tx * tx * i3,
        gxxy: -txx * ty * i2 + 2.0 * tx * tx * ty * i3,
        gxyy: -tyy * tx * i2 + 2.0 * tx * ty * ty * i3,
        gyyy: -3.0 * tyy * ty * i2 + 2.0 * ty * ty * ty * i3,
    }
}

/// `Q_n = ln(θ_{n-1}/θ_n)`.
pub fn eval_lump(p: SitePoint) -> f64 {
    (theta(p.n - 1, p.x, p.y) / theta(p.n, p.x, p.y)).ln()
}

/// The lump `Q` as a field.
#[derive(Clone, Copy, Debug, Default)]
pub struct Lump;

impl SeqField for Lump {
    fn jet(&self, n: i64, x: f64, y: f64) -> Jet {
        let (a, b) = (log_theta(n - 1, x, y), log_theta(n, x, y));
        Jet::real(a.g - b.g, a.gx - b.gx, a.gy - b.gy, a.gxx - b.gxx, a.gxy - b.gxy, a.gyy - b.gyy)
    }
}

/// `e^{Q_{n-1} - Q_n} = θ_{n-2}θ_n/θ_{n-1}²`.
pub fn exp_lump_difference(n: i64, x: f64, y: f64) -> f64 {
    let t = theta(n - 1, x, y);
    theta(n - 2, x, y) * theta(n, x, y) / (t * t)
}

/// Result of a Hirota product together with the finite-difference step used, if any.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HirotaValue {
    pub value: C64,
    pub fd_step: Option<f64>,
}

/// `D_s^m D_t^k f·g` at `p`. Orders with `m + k ≤ 2` use the jets directly;
/// higher orders fall back to Richardson-extrapolated central differences.
pub fn hirota_d(m: u32, k: u32, f: &dyn SeqField, g: &dyn SeqField, p: SitePoint) -> HirotaValue {
    if m + k > 2 {
        let h = fd_step(m + k);
        return HirotaValue { value: hirota_d_fd(m, k, f, g, p, h), fd_step: Some(h) };
    }
    let (a, b) = (f.jet(p.n, p.x, p.y), g.jet(p.n, p.x, p.y));
    let value = match (m, k) {
        (0, 0) => a.v * b.v,
        (1, 0) => a.ds() * b.v - a.v * b.ds(),
        (0, 1) => a.dt() * b.v - a.v * b.dt(),
        (2, 0) => a.dss() * b.v - a.ds() * b.ds() * 2.0 + a.v * b.dss(),
        (0, 2) => a.dtt() * b.v - a.dt() * b.dt() * 2.0 + a.v * b.dtt(),
        _ => a.dst() * b.v - a.ds() * b.dt() - a.dt() * b.ds() + a.v * b.dst(),
    };
    HirotaValue { value, fd_step: None }
}

fn fd_step(order: u32) -> f64 {
    f64::EPSILON.powf(1.0 / (order as f64 + 4.0))
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients of `(∂x - i∂y)^a (∂x + i∂y)^b / 2^{a+b}`, indexed by the power of `∂y`.
fn st_to_xy(a: u32, b: u32) -> Vec<C64> {
    let mut poly = vec![C64::new(1.0, 0.0)];
    let factors = std::iter::repeat_n(-1.0, a as usize).chain(std::iter::repeat_n(1.0, b as usize));
    for sign in factors {
        let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j] += *c * 0.5;
            next[j + 1] += *c * C64::new(0.0, 0.5 * sign);
        }
        poly = next;
    }
    poly
}

fn central_partial(f: &dyn SeqField, p: SitePoint, rx: u32, ry: u32, h: f64) -> C64 {
    let weights = |r: u32| -> Vec<(f64, f64)> {
        (0..=r)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                ((r as f64 / 2.0 - i as f64) * h, sign * binomial(r, i) / h.powi(r as i32))
            })
            .collect()
    };
    let (wx, wy) = (weights(rx), weights(ry));
    let mut acc = C64::new(0.0, 0.0);
    for (ox, cx) in &wx {
        for (oy, cy) in &wy {
            acc += f.value(p.n, p.x + ox, p.y + oy) * (cx * cy);
        }
    }
    acc
}

fn st_partial_fd(f: &dyn SeqField, p: SitePoint, a: u32, b: u32, h: f64) -> C64 {
    let total = a + b;
    let one = |h: f64| -> C64 {
        st_to_xy(a, b)
            .iter()
            .enumerate()
            .map(|(j, c)| *c * central_partial(f, p, total - j as u32, j as u32, h))
            .sum()
    };
    if total == 0 {
        return f.value(p.n, p.x, p.y);
    }
    (one(h / 2.0) * 4.0 - one(h)) / 3.0
}

/// Finite-difference evaluation of `D_s^m D_t^k f·g` with base step `h`.
pub fn hirota_d_fd(m: u32, k: u32, f: &dyn SeqField, g: &dyn SeqField, p: SitePoint, h: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..=m {
        for b in 0..=k {
            let sign = if (m - a + k - b) % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * binomial(m, a) * binomial(k, b);
            acc += st_partial_fd(f, p, a, b, h) * st_partial_fd(g, p, m - a, k - b, h) * w;
        }
    }
    acc
}

/// `(1/4)Δq_n - e^{q_{n-1}-q_n} + e^{q_n-q_{n+1}}`.
pub fn toda_residual(q: &dyn SeqField, p: SitePoint) -> Residual {
    let c = q.jet(p.n, p.x, p.y);
    let qm = q.value(p.n - 1, p.x, p.y);
    let qp = q.value(p.n + 1, p.x, p.y);
    let value = c.laplacian() * 0.25 - (qm - c.v).exp() + (c.v - qp).exp();
    Residual::new(value, p)
}

/// Jets of `f` at the given sites, in double-double if `f` supplies them.
fn jets_dd<const N: usize>(f: &dyn SeqField, sites: [i64; N], x: f64, y: f64) -> Option<[JetDd; N]> {
    let mut out = [JetDd::default(); N];
    for (o, n) in out.iter_mut().zip(sites) {
        *o = f.jet_dd(n, x, y)?;
    }
    Some(out)
}

fn jets<const N: usize>(f: &dyn SeqField, sites: [i64; N], x: f64, y: f64) -> [Jet; N] {
    sites.map(|n| f.jet(n, x, y))
}

fn hirota_st<S: Scalar>(j: &Jet<S>) -> Complex<S> {
    (j.v * j.dst() - j.ds() * j.dt()) * S::from(2.0)
}

fn bilinear_core<S: Scalar>([c, up, down]: [Jet<S>; 3]) -> Complex<S> {
    hirota_st(&c) - (up.v * down.v - c.v * c.v) * S::from(2.0)
}

/// `D_sD_t τ_n·τ_n - 2(τ_{n+1}τ_{n-1} - τ_n²)`.
///
/// Families that supply double-double jets are evaluated in that precision:
/// for θ the terms are of size θ², which would otherwise leave a rounding
/// floor of about `1e-16·θ²`.
pub fn bilinear_residual(tau: &dyn SeqField, p: SitePoint) -> Residual {
    let sites = [p.n, p.n + 1, p.n - 1];
    let value = match jets_dd(tau, sites, p.x, p.y) {
        Some(j) => to_c64(bilinear_core(j)),
        None => bilinear_core(jets(tau, sites, p.x, p.y)),
    };
    Residual::new(value, p)
}

fn exchange_core<S: Scalar>(
    [t, tp1, tm1]: [Jet<S>; 3],
    [u, up1, um1]: [Jet<S>; 3],
    lambda: Complex<S>,
    li: Complex<S>,
) -> Complex<S> {
    let two = S::from(2.0);
    let pp = (hirota_st(&t) - tp1.v * tm1.v * two + t.v * t.v * two) * u.v * u.v
        - (hirota_st(&u) - up1.v * um1.v * two + u.v * u.v * two) * t.v * t.v;

    let a = t.ds() * u.v - t.v * u.ds() - lambda * tp1.v * um1.v + lambda * t.v * u.v;
    let a_t = t.dst() * u.v + t.ds() * u.dt() - t.dt() * u.ds() - t.v * u.dst()
        - lambda * (tp1.dt() * um1.v + tp1.v * um1.dt())
        + lambda * (t.dt() * u.v + t.v * u.dt());
    let b = u.v * t.v;
    let b_t = u.dt() * t.v + u.v * t.dt();
    let term1 = a_t * b - a * b_t;
    let term2 = lambda
        * ((tp1.dt() * u.v - tp1.v * u.dt()) + li * t.v * up1.v - li * tp1.v * u.v)
        * um1.v
        * t.v;
    let term3 = -lambda
        * ((t.dt() * um1.v - t.v * um1.dt()) + li * tm1.v * u.v - li * t.v * um1.v)
        * u.v
        * tp1.v;
    pp * S::from(0.5) - (term1 + term2 + term3)
}

/// Residual of the three-term exchange identity for `𝒫/2` with free parameter `λ`.
pub fn exchange_identity_residual(tau: &dyn SeqField, taup: &dyn SeqField, lambda: C64, p: SitePoint) -> Residual {
    let (n, x, y) = (p.n, p.x, p.y);
    let sites = [n, n + 1, n - 1];
    let value = match (jets_dd(tau, sites, x, y), jets_dd(taup, sites, x, y)) {
        (Some(t), Some(u)) => {
            let l = Complex::new(TwoFloat::from(lambda.re), TwoFloat::from(lambda.im));
            let r = recip_dd(l.norm_sqr());
            to_c64(exchange_core(t, u, l, Complex::new(l.re * r, -l.im * r)))
        }
        _ => exchange_core(jets(tau, sites, x, y), jets(taup, sites, x, y), lambda, lambda.inv()),
    };
    Residual::new(value, p)
}

fn backlund_core<S: Scalar>([t, tp1]: [Jet<S>; 2], [u, up1, um1]: [Jet<S>; 3], [lambda, li]: [S; 2]) -> (Complex<S>, Complex<S>) {
    let r1 = t.ds() * u.v - t.v * u.ds() - tp1.v * um1.v * lambda + t.v * u.v * lambda;
    let r2 = tp1.dt() * u.v - tp1.v * u.dt() + (t.v * up1.v - tp1.v * u.v) * li;
    (r1, r2)
}

fn backlund_at(tau: &dyn SeqField, taup: &dyn SeqField, lambda: f64, lambda_dd: [TwoFloat; 2], p: SitePoint) -> (Residual, Residual) {
    let (n, x, y) = (p.n, p.x, p.y);
    let (ts, us) = ([n, n + 1], [n, n + 1, n - 1]);
    let (r1, r2) = match (jets_dd(tau, ts, x, y), jets_dd(taup, us, x, y)) {
        (Some(t), Some(u)) => {
            let (a, b) = backlund_core(t, u, lambda_dd);
            (to_c64(a), to_c64(b))
        }
        _ => backlund_core(jets(tau, ts, x, y), jets(taup, us, x, y), [lambda, 1.0 / lambda]),
    };
    (Residual::new(r1, p), Residual::new(r2, p))
}

/// Both equations of the Bäcklund system from `τ` to `τ'` with parameter `λ`,
/// in product form:
/// `D_sτ_n·τ'_n - λτ_{n+1}τ'_{n-1} + λτ_nτ'_n` and
/// `D_tτ_{n+1}·τ'_n + λ⁻¹τ_nτ'_{n+1} - λ⁻¹τ_{n+1}τ'_n`.
pub fn backlund_residual(tau: &dyn SeqField, taup: &dyn SeqField, lambda: f64, p: SitePoint) -> (Residual, Residual) {
    let l = TwoFloat::from(lambda);
    backlund_at(tau, taup, lambda, [l, recip_dd(l)], p)
}

/// The transformation from κ to ω (parameter λ).
pub fn backlund_residual_b1(p: SitePoint) -> (Residual, Residual) {
    let r = sqrt2_dd();
    backlund_at(&TauFamily::Kappa, &TauFamily::Omega, LAMBDA, [r + 1.0, r - 1.0], p)
}

/// The transformation from ω to θ (parameter λ⁻¹).
pub fn backlund_residual_b2(p: SitePoint) -> (Residual, Residual) {
    let r = sqrt2_dd();
    backlund_at(&TauFamily::Omega, &TauFamily::Theta, 1.0 / LAMBDA, [r - 1.0, r + 1.0], p)
}

/// `r_n = Q_n - Q_{n+1}`, `V_n = e^{r_n} - 1` and `∂s∂t ln θ_n`; with this labelling
/// `θ_n` is the tau function of `V_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VRecord {
    pub r: f64,
    pub v: f64,
    pub dst_log_tau: f64,
    pub residual: Residual,
}

pub fn v_field_and_substitutions(p: SitePoint) -> VRecord {
    let r = eval_lump(p) - eval_lump(p.shift(1));
    let v = r.exp_m1();
    let g = log_theta(p.n, p.x, p.y);
    let dst_log_tau = (g.gxx + g.gyy) * 0.25;
    VRecord { r, v, dst_log_tau, residual: Residual::new((v - dst_log_tau).into(), p) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn st_expansion_of_mixed_derivative() {
        // ∂s∂t = (∂x² + ∂y²)/4
        let c = st_to_xy(1, 1);
        assert_eq!(c.len(), 3);
        assert!((c[0] - C64::new(0.25, 0.0)).norm() < 1e-15);
        assert!(c[1].norm() < 1e-15);
        assert!((c[2] - C64::new(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn theta_fast_path_matches_jet() {
        let j = TauFamily::Theta.jet(2, 0.3, -0.4);
        assert_eq!(j.v.re, theta(2, 0.3, -0.4));
    }
}
