//! Fourier-side symbols, closed-form transforms, the ODE solutions built from
//! the symbols, the transformed identities and the multiplier pipeline.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toda_lump::exact::theta;
use toda_lump::fourier::symbols::SymbolSeries;
use toda_lump::fourier::*;
use toda_lump::linearized::{kernel_field, Direction};
use toda_lump::{Error, Jet, C64, DELTA, LAMBDA};

use super::{run_jobs, Job};
use crate::artifacts::Artifact;
use crate::config::RunConfig;
use crate::oracle::{d5, fourier_transform, limit0};
use crate::report::{Check, Expect, Location, SuiteReport};

const I: C64 = C64::new(0.0, 1.0);
const ORIGIN_HEIGHTS: [f64; 3] = [0.1, 1.0, 10.0];
/// Multiplier grid: `N = 512` nodes per side, `h = δ/refine`.
pub const MULTIPLIER_NODES: usize = 512;

fn at(xi: f64, y: f64) -> Location {
    Location::Frequency { xi, y }
}

/// Observes `f` on a check, recording any error instead of a value.
fn observe_or_error(c: &mut Check, r: toda_lump::Result<f64>, loc: Location) {
    match r {
        Ok(v) => c.observe(v, loc),
        Err(e) => c.error(e),
    }
}

fn origin_checks(tol: f64) -> Vec<Check> {
    let mut q = Check::below("fourier.q_origin", "Q vanishes at the origin", tol);
    let mut dq = Check::below("fourier.q_slope_origin", "Q'(0) equals pi i", tol);
    let mut j = Check::below("fourier.j_origin", "J vanishes at the origin", tol);
    for y in ORIGIN_HEIGHTS {
        let s = symbols(0, y);
        q.observe(s.q.eval(0.0).norm(), at(0.0, y));
        let ser = SymbolSeries::at(&s.params, C64::new(0.0, 0.0), 4);
        dq.observe((ser.q.coef(1) - PI * I).norm(), at(0.0, y));
        j.observe(s.j.eval(0.0).norm(), at(0.0, y));
    }
    vec![q, dq, j]
}

fn gamma_product(tol: f64, count: usize) -> Vec<Check> {
    let mut c = Check::below("fourier.gamma_product", "gamma times gamma-star equals lambda^-2", tol);
    let count = count.max(2);
    for k in 0..count {
        let y = -50.0 + 100.0 * k as f64 / (count - 1) as f64;
        let p = SymbolParams::new(0, y);
        c.observe((p.gamma * p.gamma_star - 1.0 / (LAMBDA * LAMBDA)).norm(), at(0.0, y));
    }
    vec![c]
}

fn small_xi(tol: f64) -> Vec<Check> {
    let mut p = Check::below("fourier.p_small_xi", "leading coefficient of P at the origin is pi i/4", tol);
    let mut p0 = Check::below("fourier.p0_small_xi", "leading coefficient of P0 at the origin is pi^2/2", tol);
    let (want_p, want_p0) = (PI * I / 4.0, C64::from(PI * PI / 2.0));
    for y in ORIGIN_HEIGHTS {
        let s = symbols(0, y);
        let c = limit0(|x| s.p.eval(x) / (x * x));
        p.observe((c - want_p).norm() / want_p.norm(), at(0.0, y));
        let c = limit0(|x| s.p0.eval(x) / (x * x));
        p0.observe((c - want_p0).norm() / want_p0.norm(), at(0.0, y));
    }
    vec![p, p0]
}

fn compare(c: &mut Check, closed: &FreqFunction, f: &dyn Fn(f64) -> C64, xi: f64, y: f64, r: f64) {
    c.observe((closed.eval(xi) - fourier_transform(f, xi, r)).norm(), at(xi, y));
}

fn transforms(tol: f64) -> Vec<Check> {
    let mut c = Check::below(
        "fourier.transform_closed_forms",
        "closed-form transforms of poles, rational functions and theta ratios against windowed quadrature",
        tol,
    );

    let poles = [(0.0, 1.0, PoleBranch::Upper), (0.3, 0.5, PoleBranch::Lower)];
    for (a1, a2, branch) in poles {
        let im = if branch == PoleBranch::Upper { a2 } else { -a2 };
        let f = move |x: f64| C64::new(1.0, 0.0) / C64::new(x + a1, im);
        match ft_simple_pole(a1, a2, branch) {
            Ok(ft) => {
                for xi in [-2.0, -0.7, -0.2, 0.2, 0.5, 1.3, 3.0] {
                    compare(&mut c, &ft, &f, xi, 0.0, 200.0);
                }
            }
            Err(e) => c.error(e),
        }
    }
    let (a1, a2, a3) = (0.35, 0.6, C64::new(0.4, -0.25));
    let f = move |x: f64| (C64::from(x + a1) + a3) / ((x + a1) * (x + a1) + a2 * a2);
    match ft_rational(a1, a2, a3) {
        Ok(ft) => {
            for k in 0..20 {
                compare(&mut c, &ft, &f, -2.0 + 4.0 * (k as f64 + 0.5) / 20.0, 0.0, 400.0);
            }
        }
        Err(e) => c.error(e),
    }

    for (n, y) in [(0, 0.0), (1, 0.8), (-2, -1.5)] {
        let t = ft_theta_ratios(n, y);
        let th = move |k: i64, x: f64| theta(k, x, y);
        let ds = move |x: f64| C64::new(2.0 * SQRT_2 * (2.0 * SQRT_2 * x + n as f64), -4.0 * y) / th(n, x);
        let dt_prev =
            move |x: f64| C64::new(2.0 * SQRT_2 * (2.0 * SQRT_2 * x + (n - 1) as f64), 4.0 * y) / th(n - 1, x);
        let prev_cur = move |x: f64| C64::from(th(n - 1, x) / th(n, x) - 1.0);
        let cur_prev = move |x: f64| C64::from(th(n, x) / th(n - 1, x) - 1.0);
        for k in 0..9 {
            let xi = 0.05 + 0.35 * k as f64;
            for s in [xi, -xi] {
                compare(&mut c, &t.ds_log_theta, &ds, s, y, 400.0);
                compare(&mut c, &t.dt_log_theta_prev, &dt_prev, s, y, 400.0);
                compare(&mut c, &t.prev_over_current.smooth, &prev_cur, s, y, 400.0);
                compare(&mut c, &t.current_over_prev.smooth, &cur_prev, s, y, 400.0);
            }
        }
    }
    vec![c]
}

fn with_stencil(centres: &[f64], h: f64) -> Vec<f64> {
    centres.iter().flat_map(|&x| (-2..=2).map(move |k| x + k as f64 * h)).collect()
}

/// Relative residual of `P1 g'' + Q1 g' + R1 g = b` at the centre of each
/// five-point stencil, `g''` from differences of `g'`.
fn ode_residuals(
    c: &mut Check,
    y: f64,
    xs: &[f64],
    g: &[C64],
    dg: &[C64],
    h: f64,
    b: &dyn Fn(f64) -> C64,
) {
    let p = SymbolParams::new(0, y);
    for (k, chunk) in xs.chunks(5).enumerate() {
        let x = chunk[2];
        let i = 5 * k;
        let d2 = d5([dg[i], dg[i + 1], dg[i + 2], dg[i + 3], dg[i + 4]], h);
        let v = symbol_values(&p, x.into());
        let terms = [v.p1 * d2, v.q1 * dg[i + 2], v.r1 * g[i + 2], b(x)];
        let scale: f64 = terms.iter().map(|t| t.norm()).sum();
        let res = terms[0] + terms[1] + terms[2] - terms[3];
        c.observe(res.norm() / scale.max(1e-300), at(x, y));
    }
}

const PLUG_Y: f64 = 1.0;
const PLUG_H: f64 = 2.5e-4;

fn fundamental(tol: f64) -> Vec<Check> {
    let mut c = Check::below("fourier.g_plug_back", "fundamental solutions g1, g2 solve the homogeneous equation", tol);
    let centres: Vec<f64> = (0..20).map(|k| 0.06 + (2.0 - 0.06) * k as f64 / 19.0).collect();
    let xs = with_stencil(&centres, PLUG_H);
    let zero = |_x: f64| C64::new(0.0, 0.0);
    match ode_fundamental_g(PLUG_Y, &xs) {
        Ok(fg) => {
            ode_residuals(&mut c, PLUG_Y, &xs, &fg.g1, &fg.dg1, PLUG_H, &zero);
            ode_residuals(&mut c, PLUG_Y, &xs, &fg.g2, &fg.dg2, PLUG_H, &zero);
        }
        Err(e) => c.error(e),
    }
    vec![c]
}

fn rho_check(tol: f64) -> Vec<Check> {
    let mut c = Check::below("fourier.rho_plug_back", "rho solves P0 rho' + Q0 rho = 0", tol);
    let p = SymbolParams::new(0, 0.0);
    for x in [0.1, 0.5, 1.0, -0.3, 2.5] {
        let h = 1e-4;
        let vals: toda_lump::Result<Vec<C64>> = [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|k| rho(x + k * h)).collect();
        let r = vals.map(|vals| {
            let d = d5([vals[0], vals[1], vals[2], vals[3], vals[4]], h);
            let v = symbol_values(&p, x.into());
            let scale = (v.p0 * d).norm() + (v.q0 * vals[2]).norm();
            (v.p0 * d + v.q0 * vals[2]).norm() / scale
        });
        observe_or_error(&mut c, r, at(x, 0.0));
    }
    vec![c]
}

fn vop(tol: f64) -> Vec<Check> {
    let mut c = Check::below(
        "fourier.vop_plug_back",
        "variation of parameters solves the forced equation from both anchors",
        tol,
    );
    let sys = match FundamentalSystem::new(PLUG_Y) {
        Ok(s) => s,
        Err(e) => {
            c.error(e);
            return vec![c];
        }
    };
    let centres: Vec<f64> = (0..15).map(|k| 0.2 + 1.6 * k as f64 / 14.0).collect();
    let xs = with_stencil(&centres, PLUG_H);
    let bump = FreqFunction::bump(0.5, 1.5, C64::new(1.0, 0.5));
    let b = |x: f64| bump.eval(x);
    for anchor in [Anchor::PlusInfinity, Anchor::Zero] {
        match variation_of_parameters(&sys, &bump, anchor, &xs) {
            Ok(out) => ode_residuals(&mut c, PLUG_Y, &xs, &out.g, &out.dg, PLUG_H, &b),
            Err(e) => c.error(e),
        }
    }
    vec![c]
}

fn identities(tol: f64) -> Vec<Check> {
    let mut f1 = Check::below(
        "fourier.prop_f1",
        "transformed F1 agrees with its factorized form through h and g",
        tol,
    );
    let bump = FreqFunction::bump(0.5, 1.5, C64::new(1.0, 0.0));
    let samples = [0.2, 0.6, 0.9, 1.0, 1.3, 1.7, 2.4];
    for (n, y) in [(0, 1.0), (0, 5.0), (2, -0.7)] {
        match verify_prop_f1(n, y, &bump, &samples) {
            Ok(r) => f1.observe(r.relative, at(r.worst_xi, y)),
            Err(e) => f1.error(e),
        }
    }
    let mut h = Check::below("fourier.lemma_h", "transformed F0 agrees with its factorized forms for y > 0 and y < 0", tol);
    let bump = FreqFunction::bump(0.5, 1.5, C64::new(0.3, 1.0));
    let samples = [0.2, 0.7, 1.0, 1.2, 1.9, -0.4];
    for y in [1.0, -1.0, 3.0, -0.25] {
        match verify_lemma_h(0, y, &bump, &samples) {
            Ok(r) => h.observe(r.relative, at(r.worst_xi, y)),
            Err(e) => h.error(e),
        }
    }
    vec![f1, h]
}

fn zeros(tol: f64) -> Vec<Check> {
    let mut c = Check::below("fourier.j_zero_lattice", "real zeros of J lie at multiples of 2 sqrt 2", tol);
    for y in [-3.0, 0.0, 0.5, 2.0] {
        match j_zeros(&SymbolParams::new(0, y), 1e-6, 10.0) {
            Ok(z) if z.len() == 3 => {
                for (j, x) in z.iter().enumerate() {
                    c.observe((x - 2.0 * SQRT_2 * (j + 1) as f64).abs(), at(*x, y));
                }
            }
            Ok(z) => c.error(format!("expected 3 zeros in (0, 10] at y={y}, found {}", z.len())),
            Err(e) => c.error(e),
        }
    }
    vec![c]
}

/// A traveling field made of a few seeded Gaussian bumps; not a kernel element.
fn random_bumps(seed: u64) -> impl Fn(i64, f64, f64) -> Jet + Send + Sync {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<[f64; 4]> = (0..3)
        .map(|_| {
            [
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(0.5..1.5),
                rng.random_range(0.5..1.5),
            ]
        })
        .collect();
    move |n: i64, x: f64, y: f64| {
        let xx = x + n as f64 * DELTA;
        let v: f64 = bumps
            .iter()
            .map(|[cx, cy, w, a]| a * (-((xx - cx).powi(2) + (y - cy).powi(2)) / (w * w)).exp())
            .sum();
        Jet::constant(C64::from(v))
    }
}

fn multiplier(cfg: &RunConfig) -> Vec<Check> {
    let mean_tol = cfg.tolerances.get("mean_zero");
    let mut mean = Check::below("multiplier.mean_zero", "f0 has zero mean for the x-translation mode", mean_tol);
    let mut yi = Check::below(
        "multiplier.yi_residual",
        "multiplier solution satisfies the discrete eta-tilde equation",
        cfg.tolerances.get("yi_residual"),
    );
    let mut negative = Check::new(
        "multiplier.negative_control",
        "mean-zero assertion rejects a random non-kernel field",
        Expect::AtLeast,
        mean_tol,
    );
    let grid = match PlaneGrid::new(MULTIPLIER_NODES, cfg.refine) {
        Ok(g) => g,
        Err(e) => {
            for c in [&mut mean, &mut yi, &mut negative] {
                c.error(&e);
            }
            return vec![mean, yi, negative];
        }
    };
    let loc = Location::Grid { half_width: grid.half_width, refine: grid.k };
    let area = (2.0 * grid.half_width).powi(2);
    match multiplier_solve_eta_tilde(&kernel_field(Direction::X), grid, mean_tol / area) {
        Ok(rep) => {
            mean.observe(rep.integral_f.abs(), loc);
            yi.observe(rep.yi_residual, loc);
            yi.note(format!("max |rhs| = {:.6e}", rep.yi_scale));
        }
        Err(Error::MeanZero { integral, .. }) => {
            mean.observe(integral.abs(), loc);
            yi.skip("mean-zero assertion failed");
        }
        Err(e) => {
            mean.error(&e);
            yi.error(&e);
        }
    }
    match multiplier_solve_eta_tilde(&random_bumps(cfg.seed), grid, mean_tol / area) {
        Err(Error::MeanZero { integral, .. }) => negative.observe(integral.abs(), loc),
        Ok(rep) => {
            negative.observe(rep.integral_f.abs(), loc);
            negative.note("mean-zero assertion accepted the random field");
        }
        Err(e) => negative.error(e),
    }
    vec![mean, yi, negative]
}

/// `P`, `Q`, `J`, `R` at `n = 0`, `y = 1` on `ξ = -5, -4.99, …, 5`.
pub fn symbol_curves() -> Vec<Artifact> {
    let s = symbols(0, 1.0);
    let xi: Vec<f64> = (0..=1000).map(|i| (i as f64 - 500.0) / 100.0).collect();
    [("P", &s.p), ("Q", &s.q), ("J", &s.j), ("R", &s.r)]
        .into_iter()
        .map(|(name, f)| Artifact::Curve {
            file: format!("symbols_{name}.csv"),
            columns: vec!["xi".into(), "re".into(), "im".into()],
            rows: xi
                .iter()
                .map(|&x| {
                    let v = f.eval(x);
                    vec![x, v.re, v.im]
                })
                .collect(),
        })
        .collect()
}

pub fn run(cfg: &RunConfig) -> SuiteReport {
    let t0 = Instant::now();
    let tol = |name| cfg.tolerances.get(name);
    let jobs: Vec<Job> = vec![
        Box::new(move || origin_checks(tol("symbol_origin"))),
        Box::new(move || gamma_product(tol("gamma_product"), cfg.samples)),
        Box::new(move || small_xi(tol("small_xi"))),
        Box::new(move || transforms(tol("transforms"))),
        Box::new(move || fundamental(tol("plug_back"))),
        Box::new(move || rho_check(tol("plug_back"))),
        Box::new(move || vop(tol("plug_back"))),
        Box::new(move || identities(tol("identities"))),
        Box::new(move || zeros(tol("j_zeros"))),
        Box::new(move || multiplier(cfg)),
    ];
    let mut report = SuiteReport::new("fourier", run_jobs(&jobs, cfg.parallel), t0.elapsed());
    report.artifacts = symbol_curves();
    report
}
