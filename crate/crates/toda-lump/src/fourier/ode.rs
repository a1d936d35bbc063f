//! The second-order equation `P1 g'' + Q1 g' + R1 g = B` in the frequency
//! variable, its Frobenius solutions at `ξ = 0`, the first-order equation for
//! `ρ`, and variation of parameters.
//!
//! Integration is adaptive Dormand–Prince 5(4) along piecewise paths in the
//! complex plane. Real zeros of `J` (where `Q1` has simple poles) are passed
//! on a small semicircle in the upper half plane.

use std::f64::consts::PI;

use super::params::SymbolParams;
use super::quad::{self, QuadOptions};
use super::series::Series;
use super::symbols::{j_zeros, symbol_values, SymbolSeries};
use super::FreqFunction;
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Frobenius series are used for `|ξ| ≤ XI_SERIES`.
pub const XI_SERIES: f64 = 0.05;

/// Number of Frobenius coefficients kept.
pub const FROBENIUS_TERMS: usize = 24;

/// Radius of the semicircle used to pass a zero of `J`.
pub const DETOUR_RADIUS: f64 = 0.2;

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rel_tol: 1e-12, abs_tol: 1e-14, min_step: 1e-12, max_steps: 200_000 }
    }
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Line(C64, C64),
    Arc { centre: f64, radius: f64, from: f64, to: f64 },
}

impl Piece {
    /// Point and `dz/dτ` at `τ ∈ [0, 1]`.
    fn at(&self, tau: f64) -> (C64, C64) {
        match *self {
            Piece::Line(a, b) => (a + (b - a) * tau, b - a),
            Piece::Arc { centre, radius, from, to } => {
                let phi = from + (to - from) * tau;
                let e = C64::from_polar(radius, phi);
                (centre + e, I * e * (to - from))
            }
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type Rhs<'a, const N: usize> = &'a dyn Fn(C64, &[C64; N]) -> [C64; N];

fn dopri5<const N: usize>(rhs: Rhs<N>, piece: Piece, y0: [C64; N], opts: &OdeOptions) -> Result<[C64; N]> {
    let f = |tau: f64, y: &[C64; N]| {
        let (z, dz) = piece.at(tau);
        let mut d = rhs(z, y);
        d.iter_mut().for_each(|v| *v *= dz);
        d
    };
    let mut tau: f64 = 0.0;
    let mut y = y0;
    let mut h: f64 = 0.01;
    let mut k = [[C64::new(0.0, 0.0); N]; 7];
    k[0] = f(0.0, &y);
    for _ in 0..opts.max_steps {
        if tau >= 1.0 {
            return Ok(y);
        }
        h = h.min(1.0 - tau);
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                for (j, kj) in k.iter().enumerate().take(s) {
                    *v += kj[i] * (h * A[s][j]);
                }
            }
            k[s] = f(tau + C[s] * h, &ys);
        }
        let mut y_new = y;
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut e = C64::new(0.0, 0.0);
            for s in 0..6 {
                y_new[i] += k[s][i] * (h * A[6][s]);
            }
            for s in 0..7 {
                e += k[s][i] * (h * ERR[s]);
            }
            let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / scale);
        }
        if !err.is_finite() {
            return Err(Error::StepUnderflow { at: piece.at(tau).0.re, step: h });
        }
        if err <= 1.0 {
            tau += h;
            y = y_new;
            k[0] = k[6];
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < opts.min_step && tau < 1.0 {
            return Err(Error::StepUnderflow { at: piece.at(tau).0.re, step: h });
        }
    }
    Err(Error::StepUnderflow { at: piece.at(tau).0.re, step: h })
}

/// Series of `p = ξQ1/P1` and `q = ξ²R1/P1` at `ξ = 0`, normalised so that the
/// equation reads `ξ²g'' + ξp g' + q g = 0`.
fn indicial_coefficients(params: &SymbolParams, len: usize) -> (Series, Series) {
    let s = SymbolSeries::at(params, C64::new(0.0, 0.0), len + 3);
    let p_t = s.p.shift_down(2);
    let q_t = s.q.shift_down(1);
    let mut j = s.j.clone();
    j.0[0] = C64::new(0.0, 0.0);
    let j_t = j.shift_down(1);
    let dj = j.deriv();
    let p = &q_t.div(&p_t) - &dj.div(&j_t);
    let q = (&s.r * &j).div(&p_t);
    (p.truncate(len), q.truncate(len))
}

/// Frobenius data at `ξ = 0`: `g1 = Σ a_k ξ^k` with `a_0 = 1`, and
/// `g2 = c·g1·ln|ξ| + Σ b_m ξ^{m-2}` with `b_0 = 1`, `b_2 = 0`.
#[derive(Clone, Debug)]
pub struct Frobenius {
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub log_coefficient: C64,
    pub p: Series,
    pub q: Series,
}

impl Frobenius {
    pub fn new(params: &SymbolParams, terms: usize) -> Self {
        let (p, q) = indicial_coefficients(params, terms);
        let indicial = |r: f64| C64::from(r * (r - 1.0)) + p.coef(0) * r + q.coef(0);
        let mut a = vec![C64::new(0.0, 0.0); terms];
        a[0] = C64::new(1.0, 0.0);
        for k in 1..terms {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += (p.coef(j) * (k - j) as f64 + q.coef(j)) * a[k - j];
            }
            a[k] = -acc / indicial(k as f64);
        }
        let mut b = vec![C64::new(0.0, 0.0); terms];
        b[0] = C64::new(1.0, 0.0);
        let mut log_coefficient = C64::new(0.0, 0.0);
        for m in 1..terms {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=m {
                acc += (p.coef(j) * (m as f64 - 2.0 - j as f64) + q.coef(j)) * b[m - j];
            }
            if m == 2 {
                // The resonance: the left side vanishes identically, which
                // fixes the logarithmic coefficient and leaves b_2 free.
                log_coefficient = -acc / ((p.coef(0) - 1.0) * a[0]);
                continue;
            }
            if m > 2 {
                let k = m - 2;
                let mut forcing = a[k] * (2.0 * k as f64 - 1.0 + p.coef(0));
                for j in 1..=k {
                    forcing += p.coef(j) * a[k - j];
                }
                acc += log_coefficient * forcing;
            }
            b[m] = -acc / indicial(m as f64 - 2.0);
        }
        Frobenius { a, b, log_coefficient, p, q }
    }

    /// `[g1, g1', g2, g2']` at real `ξ ≠ 0`.
    pub fn eval(&self, xi: f64) -> [C64; 4] {
        let (mut g1, mut dg1) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (k, a) in self.a.iter().enumerate().rev() {
            g1 = g1 * xi + a;
            if k > 0 {
                dg1 = dg1 * xi + a * k as f64;
            }
        }
        let (mut v, mut dv) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (m, b) in self.b.iter().enumerate() {
            let e = m as i32 - 2;
            v += b * xi.powi(e);
            if e != 0 {
                dv += b * (e as f64) * xi.powi(e - 1);
            }
        }
        let ln = xi.abs().ln();
        let g2 = self.log_coefficient * g1 * ln + v;
        let dg2 = self.log_coefficient * (dg1 * ln + g1 / xi) + dv;
        [g1, dg1, g2, dg2]
    }
}

/// `g'' = -(Q1 g' + R1 g)/P1` for two solutions at once.
fn homogeneous(params: &SymbolParams, z: C64, y: &[C64]) -> [C64; 2] {
    let v = symbol_values(params, z);
    let acc = |g: C64, dg: C64| -(v.q1 * dg + v.r1 * g) / v.p1;
    [acc(y[0], y[1]), acc(y[2], y[3])]
}

/// Fundamental solutions of the homogeneous equation at one height `y`.
#[derive(Clone, Debug)]
pub struct FundamentalSystem {
    pub params: SymbolParams,
    pub frobenius: Frobenius,
    pub options: OdeOptions,
}

impl FundamentalSystem {
    pub fn new(y: f64) -> Result<Self> {
        let params = SymbolParams::new(0, y);
        let frobenius = Frobenius::new(&params, FROBENIUS_TERMS);
        let finite = frobenius.a.iter().chain(&frobenius.b).all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::InvalidArgument(format!("degenerate Frobenius data at y = {y}")));
        }
        Ok(FundamentalSystem { params, frobenius, options: OdeOptions::default() })
    }

    /// Real zeros of `J` strictly between `a` and `b`, excluding `ξ = 0`.
    fn zeros_between(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let zeros = j_zeros(&self.params, lo, hi)?;
        Ok(zeros.into_iter().filter(|z| z.abs() > 1e-9 && *z > lo && *z < hi).collect())
    }

    fn path(&self, a: f64, b: f64) -> Result<(Vec<Piece>, Vec<f64>)> {
        let mut zeros = self.zeros_between(a, b)?;
        let forward = b > a;
        if !forward {
            zeros.reverse();
        }
        let mut pieces = Vec::new();
        let mut at = a;
        for &z in &zeros {
            let r = DETOUR_RADIUS.min(0.5 * (z - a).abs()).min(0.5 * (b - z).abs());
            let (enter, leave, from, to) = if forward { (z - r, z + r, PI, 0.0) } else { (z + r, z - r, 0.0, PI) };
            pieces.push(Piece::Line(at.into(), enter.into()));
            pieces.push(Piece::Arc { centre: z, radius: r, from, to });
            at = leave;
        }
        pieces.push(Piece::Line(at.into(), b.into()));
        Ok((pieces, zeros))
    }

    /// Carries an `N`-component state from `a` to `b`; returns the state and
    /// the zeros of `J` that were passed.
    pub fn propagate<const N: usize>(
        &self,
        a: f64,
        b: f64,
        y0: [C64; N],
        rhs: &dyn Fn(C64, &[C64; N]) -> [C64; N],
    ) -> Result<([C64; N], Vec<f64>)> {
        if a == b {
            return Ok((y0, Vec::new()));
        }
        if a * b <= 0.0 {
            return Err(Error::InvalidArgument(format!("path from {a} to {b} crosses the singular point 0")));
        }
        let (pieces, zeros) = self.path(a, b)?;
        let mut y = y0;
        for piece in pieces {
            y = dopri5(rhs, piece, y, &self.options)?;
        }
        Ok((y, zeros))
    }

    fn rhs4(&self) -> impl Fn(C64, &[C64; 4]) -> [C64; 4] + '_ {
        move |z, y| {
            let [a1, a2] = homogeneous(&self.params, z, y);
            [y[1], a1, y[3], a2]
        }
    }

    /// `[g1, g1', g2, g2']` at a single `ξ ≠ 0`.
    pub fn eval(&self, xi: f64) -> Result<[C64; 4]> {
        if xi == 0.0 {
            return Err(Error::InvalidArgument("g2 is singular at ξ = 0".into()));
        }
        if xi.abs() <= XI_SERIES {
            return Ok(self.frobenius.eval(xi));
        }
        let start = XI_SERIES.copysign(xi);
        let rhs = self.rhs4();
        Ok(self.propagate(start, xi, self.frobenius.eval(start), &rhs)?.0)
    }
}

/// `g1`, `g2`, their derivatives and the Wronskian `W = g1 g2' - g1' g2` on a
/// grid of frequencies.
#[derive(Clone, Debug, Default)]
pub struct FundamentalGrid {
    pub xi: Vec<f64>,
    pub g1: Vec<C64>,
    pub dg1: Vec<C64>,
    pub g2: Vec<C64>,
    pub dg2: Vec<C64>,
    pub w: Vec<C64>,
    /// Zeros of `J` passed by a complex detour.
    pub detours: Vec<f64>,
}

/// Walks outward from `±XI_SERIES` through the sorted grid points on each side
/// of the origin, so every point is reached by one continuous path.
pub fn ode_fundamental_g(y: f64, grid: &[f64]) -> Result<FundamentalGrid> {
    let sys = FundamentalSystem::new(y)?;
    if grid.iter().any(|&x| x == 0.0 || !x.is_finite()) {
        return Err(Error::InvalidArgument("grid must avoid ξ = 0".into()));
    }
    let rhs = sys.rhs4();
    let mut values = vec![[C64::new(0.0, 0.0); 4]; grid.len()];
    let mut detours = Vec::new();
    for side in [1.0, -1.0] {
        let mut order: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] * side > 0.0).collect();
        order.sort_by(|&i, &j| (grid[i] * side).total_cmp(&(grid[j] * side)));
        let mut at = XI_SERIES * side;
        let mut state = sys.frobenius.eval(at);
        for i in order {
            let xi = grid[i];
            if xi.abs() <= XI_SERIES {
                values[i] = sys.frobenius.eval(xi);
                continue;
            }
            let (next, passed) = sys.propagate(at, xi, state, &rhs)?;
            detours.extend(passed);
            state = next;
            at = xi;
            values[i] = state;
        }
    }
    let mut out = FundamentalGrid { xi: grid.to_vec(), detours, ..Default::default() };
    for v in values {
        out.g1.push(v[0]);
        out.dg1.push(v[1]);
        out.g2.push(v[2]);
        out.dg2.push(v[3]);
        out.w.push(v[0] * v[3] - v[1] * v[2]);
    }
    Ok(out)
}

/// `ρ` is evaluated from its series for `|ξ| ≤ RHO_SERIES`.
pub const RHO_SERIES: f64 = 0.25;
const RHO_TERMS: usize = 40;

/// Series of `Q0/P0 - 2/ξ` at the origin.
fn rho_log_derivative_series() -> Series {
    let params = SymbolParams::new(0, 0.0);
    let s = SymbolSeries::at(&params, C64::new(0.0, 0.0), RHO_TERMS + 3);
    let ratio = s.q0.shift_down(1).div(&s.p0.shift_down(2));
    let mut r = ratio.add_const((-2.0).into());
    r.0[0] = C64::new(0.0, 0.0);
    r.shift_down(1)
}

/// `ρ(ξ) = ξ^{-2} exp(-∫_0^ξ (Q0/P0 - 2/s) ds)`, the solution of
/// `P0ρ' + Q0ρ = 0` with `ξ²ρ → 1` at the origin.
pub fn rho(xi: f64) -> Result<C64> {
    if xi == 0.0 || !xi.is_finite() {
        return Err(Error::InvalidArgument(format!("ρ is singular at ξ = {xi}")));
    }
    let integral_series = rho_log_derivative_series().integral();
    let near = xi.clamp(-RHO_SERIES, RHO_SERIES);
    let mut integral = integral_series.eval(near.into());
    if xi.abs() > RHO_SERIES {
        let params = SymbolParams::new(0, 0.0);
        let f = |s: f64| {
            let v = symbol_values(&params, s.into());
            v.q0 / v.p0 - 2.0 / s
        };
        integral += quad::integrate(&f, near, xi, QuadOptions { abs_tol: 1e-12, rel_tol: 1e-11, ..QuadOptions::default() })?;
    }
    Ok((-integral).exp() / (xi * xi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    PlusInfinity,
    Zero,
}

#[derive(Clone, Debug, Default)]
pub struct VopGrid {
    pub xi: Vec<f64>,
    pub g: Vec<C64>,
    pub dg: Vec<C64>,
    pub detours: Vec<f64>,
}

/// `g* = g2∫(g1 B)/(W P1) - g1∫(g2 B)/(W P1)`, both integrals starting at
/// the anchor.
///
/// The integrals are carried as two extra components of the state so the
/// quadrature shares the adaptive steps of the fundamental solutions. `B` must
/// vanish on a neighbourhood of the anchor: compact support for `+∞`, support
/// away from the origin for `0` (where `g2 B/(W P1) ~ B/ξ`).
pub fn variation_of_parameters(
    sys: &FundamentalSystem,
    b: &FreqFunction,
    anchor: Anchor,
    grid: &[f64],
) -> Result<VopGrid> {
    let (lo, hi) = b.support.ok_or_else(|| {
        Error::InvalidArgument("variation of parameters needs a compactly supported right side".into())
    })?;
    if hi <= lo {
        let zero = vec![C64::new(0.0, 0.0); grid.len()];
        return Ok(VopGrid { xi: grid.to_vec(), g: zero.clone(), dg: zero, detours: Vec::new() });
    }
    let start = match anchor {
        Anchor::PlusInfinity => hi,
        Anchor::Zero if lo > 0.0 => lo,
        Anchor::Zero if hi < 0.0 => hi,
        Anchor::Zero => {
            let probe = b.eval(1e-8).norm() + b.eval(-1e-8).norm();
            if probe == 0.0 {
                return Err(Error::InvalidArgument("right side must be supported on one side of ξ = 0".into()));
            }
            return Err(Error::InvalidArgument(format!(
                "non-integrable singularity of g2·B/(W·P1) at ξ = 0 (|B| ≈ {probe:.3e})"
            )));
        }
    };
    if start == 0.0 || grid.iter().any(|&x| x * start <= 0.0) {
        return Err(Error::InvalidArgument("grid and anchor must lie on one side of ξ = 0".into()));
    }
    let params = sys.params;
    let rhs = |z: C64, y: &[C64; 6]| {
        let [a1, a2] = homogeneous(&params, z, y);
        let v = symbol_values(&params, z);
        let w = y[0] * y[3] - y[1] * y[2];
        let src = if z.im == 0.0 { b.eval(z.re) } else { C64::new(0.0, 0.0) };
        let common = src / (w * v.p1);
        [y[1], a1, y[3], a2, y[0] * common, y[2] * common]
    };
    let g0 = sys.eval(start)?;
    let origin = [g0[0], g0[1], g0[2], g0[3], C64::new(0.0, 0.0), C64::new(0.0, 0.0)];

    let mut out = VopGrid { xi: grid.to_vec(), g: vec![C64::new(0.0, 0.0); grid.len()], dg: vec![C64::new(0.0, 0.0); grid.len()], detours: Vec::new() };
    for dir in [1.0, -1.0] {
        let mut order: Vec<usize> = (0..grid.len()).filter(|&i| (grid[i] - start) * dir >= 0.0).collect();
        if dir < 0.0 {
            order.retain(|&i| grid[i] != start);
        }
        order.sort_by(|&i, &j| ((grid[i] - start) * dir).total_cmp(&((grid[j] - start) * dir)));
        let (mut at, mut state) = (start, origin);
        for i in order {
            let (next, passed) = sys.propagate(at, grid[i], state, &rhs)?;
            out.detours.extend(passed);
            state = next;
            at = grid[i];
            out.g[i] = state[2] * state[4] - state[0] * state[5];
            out.dg[i] = state[3] * state[4] - state[1] * state[5];
        }
    }
    Ok(out)
}
