//! Residuals of the nonlinear lattice, its bilinear form and the Bäcklund
//! systems at seeded sample points.

use std::time::Instant;

use toda_lump::exact::*;
use toda_lump::sampling::{sample_points, SampleBox};
use toda_lump::{C64, LAMBDA};

use super::{pointwise, run_jobs, Job};
use crate::config::RunConfig;
use crate::report::SuiteReport;

pub fn run(cfg: &RunConfig) -> SuiteReport {
    let t0 = Instant::now();
    let tol = |name| cfg.tolerances.get(name);
    let b = SampleBox::new(cfg.sample_half_width(), cfg.n_range.0, cfg.n_range.1);
    let pts = sample_points(cfg.seed, cfg.samples, b);
    let pts = &pts;

    let mut jobs: Vec<Job> = vec![Box::new(move || {
        pointwise("exact.toda_residual", "lump solves the 2+1 Toda lattice", tol("toda"), pts, |p| {
            toda_residual(&Lump, p).magnitude
        })
    })];
    for family in TauFamily::ALL {
        jobs.push(Box::new(move || {
            let name = format!("exact.bilinear_{}", family.name());
            let reference = format!("{} solves the bilinear form", family.name());
            pointwise(&name, &reference, tol("bilinear"), pts, |p| bilinear_residual(&family, p).magnitude)
        }));
    }
    jobs.push(Box::new(move || {
        pointwise("exact.backlund_b1", "Bäcklund system from kappa to omega", tol("backlund"), pts, |p| {
            let (a, b) = backlund_residual_b1(p);
            a.magnitude.max(b.magnitude)
        })
    }));
    jobs.push(Box::new(move || {
        pointwise("exact.backlund_b2", "Bäcklund system from omega to theta", tol("backlund"), pts, |p| {
            let (a, b) = backlund_residual_b2(p);
            a.magnitude.max(b.magnitude)
        })
    }));
    let exchange = [
        ("exact.exchange_kappa_omega", TauFamily::Kappa, TauFamily::Omega, C64::new(LAMBDA, 0.0)),
        ("exact.exchange_theta_theta", TauFamily::Theta, TauFamily::Theta, C64::new(1.0, 0.0)),
    ];
    for (name, tau, taup, lambda) in exchange {
        jobs.push(Box::new(move || {
            pointwise(name, "three-term exchange identity for the bilinear products", tol("exchange"), pts, |p| {
                exchange_identity_residual(&tau, &taup, lambda, p).magnitude
            })
        }));
    }
    jobs.push(Box::new(move || {
        pointwise("exact.lump_log_ratio", "lump is the log ratio of neighbouring theta", tol("lump_log"), pts, |p| {
            (eval_lump(p) - (theta(p.n - 1, p.x, p.y).ln() - theta(p.n, p.x, p.y).ln())).abs()
        })
    }));
    jobs.push(Box::new(move || {
        pointwise("exact.v_substitution", "V_n equals the s-t derivative of ln theta_n", tol("v_field"), pts, |p| {
            v_field_and_substitutions(p).residual.magnitude
        })
    }));
    SuiteReport::new("exact", run_jobs(&jobs, cfg.parallel), t0.elapsed())
}
