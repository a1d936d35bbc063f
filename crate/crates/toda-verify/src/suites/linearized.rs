//! Translation modes and the identities of the linearized Bäcklund operators.

use std::time::Instant;

use toda_lump::exact::TauFamily;
use toda_lump::linearized::*;
use toda_lump::sampling::{sample_points, SampleBox};
use toda_lump::{Error, Jet, C64};

use super::{pointwise, run_jobs, Job};
use crate::config::RunConfig;
use crate::report::{Check, SuiteReport};

fn one(_n: i64, _x: f64, _y: f64) -> Jet {
    Jet::constant(C64::new(1.0, 0.0))
}

/// Folds a pole-guarded residual into `c`, counting excluded points.
fn guarded(c: &mut Check, skipped: &mut usize, r: toda_lump::Result<f64>, p: toda_lump::SitePoint) {
    match r {
        Ok(v) => c.observe(v, p),
        Err(Error::NearPole { .. }) => *skipped += 1,
        Err(e) => c.error(e),
    }
}

pub fn run(cfg: &RunConfig) -> SuiteReport {
    let t0 = Instant::now();
    let tol = |name| cfg.tolerances.get(name);
    let pole = tol("pole");
    let b = SampleBox::new(cfg.sample_half_width(), cfg.n_range.0, cfg.n_range.1);
    let pts = sample_points(cfg.seed, cfg.samples, b);
    let pts = &pts;

    let mut jobs: Vec<Job> = Vec::new();
    for (d, name) in [(Direction::X, "linearized.translation_x"), (Direction::Y, "linearized.translation_y")] {
        jobs.push(Box::new(move || {
            let u = kernel_field(d);
            pointwise(name, "translation mode solves the linearized lattice", tol("translation"), pts, |p| {
                linearized_toda_residual(&u, p).magnitude
            })
        }));
    }
    jobs.push(Box::new(move || {
        pointwise("linearized.family1_omega", "F1 and M1 annihilate omega", tol("annihilation"), pts, |p| {
            [OperatorTag::F1, OperatorTag::M1]
                .iter()
                .map(|&t| apply_family1(t, RoleField::phi(&TauFamily::Omega), p).map_or(f64::NAN, |v| v.norm()))
                .fold(0.0, f64::max)
        })
    }));
    jobs.push(Box::new(move || {
        let mut c = Check::below("linearized.family0_constant", "F0 and M0 annihilate constants", tol("annihilation"));
        let mut skipped = 0;
        for p in pts {
            for t in [OperatorTag::F0, OperatorTag::M0] {
                let r = apply_family0(t, RoleField::sigma(&one), *p, pole).map(|v| v.norm());
                guarded(&mut c, &mut skipped, r, *p);
            }
        }
        c.note(format!("{skipped} evaluations within {pole:.0e} of an omega zero skipped"));
        vec![c]
    }));
    jobs.push(Box::new(move || {
        let mut c = Check::below("linearized.m1_pairs", "identity pairs of the omega-side operators", tol("m1_pairs"));
        let mut skipped = 0;
        let pairs = lemma_m1_pairs();
        for p in pts {
            for pair in &pairs {
                let r = lemma_m1_residual(pair, *p, pole).map(|(a, b)| a.magnitude.max(b.magnitude));
                guarded(&mut c, &mut skipped, r, *p);
            }
        }
        c.note(format!("{} pairs; {skipped} evaluations skipped near omega zeros", pairs.len()));
        vec![c]
    }));
    jobs.push(Box::new(move || {
        let pairs = lemma_m1_pairs();
        pointwise("linearized.l3_identities", "starred-operator form of the kappa-omega system", tol("l3"), pts, |p| {
            pairs
                .iter()
                .map(|pair| {
                    let (a, b) = identity_l3_residual(pair.sigma.as_ref(), pair.phi.as_ref(), p);
                    a.magnitude.max(b.magnitude)
                })
                .fold(0.0, f64::max)
        })
    }));
    jobs.push(Box::new(move || {
        let mut c = Check::below("linearized.l4_identities", "derivatives of eta through the starred theta operators", tol("l4"));
        let mut skipped = 0;
        let pairs = lemma_l4_pairs();
        for p in pts {
            for pair in &pairs {
                let r = identity_l4_residual(pair.phi.as_ref(), pair.eta.as_ref(), *p, pole)
                    .map(|(a, b)| a.magnitude.max(b.magnitude));
                guarded(&mut c, &mut skipped, r, *p);
            }
        }
        c.note(format!("{} pairs; {skipped} evaluations skipped near omega zeros", pairs.len()));
        vec![c]
    }));
    SuiteReport::new("linearized", run_jobs(&jobs, cfg.parallel), t0.elapsed())
}
