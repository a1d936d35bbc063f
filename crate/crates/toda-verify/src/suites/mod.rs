//! The verification suites. Each suite is a list of independent jobs; a job
//! evaluates one or more checks.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use toda_lump::SitePoint;

use crate::report::{Check, CheckRecord, Expect};

pub mod exact;
pub mod fourier;
pub mod kernel;
pub mod linearized;

pub type Job<'a> = Box<dyn Fn() -> Vec<Check> + Send + Sync + 'a>;

fn run_one(job: &Job, index: usize) -> Vec<CheckRecord> {
    let t = Instant::now();
    match catch_unwind(AssertUnwindSafe(job)) {
        Ok(checks) => {
            // a job's time is split evenly between the checks it produced
            let each = t.elapsed() / checks.len().max(1) as u32;
            checks.into_iter().map(|c| c.finish(each)).collect()
        }
        Err(_) => {
            let mut c = Check::new(&format!("job_{index}"), "job completed", Expect::Below, 0.0);
            c.error("panicked");
            vec![c.finish(t.elapsed())]
        }
    }
}

/// Runs the jobs, concurrently when `parallel`; records keep the job order.
pub fn run_jobs(jobs: &[Job], parallel: bool) -> Vec<CheckRecord> {
    if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = jobs.iter().enumerate().map(|(i, j)| s.spawn(move || run_one(j, i))).collect();
            handles.into_iter().flat_map(|h| h.join().expect("run_one catches panics")).collect()
        })
    } else {
        jobs.iter().enumerate().flat_map(|(i, j)| run_one(j, i)).collect()
    }
}

/// A check that takes the worst of `f` over sample points.
pub(crate) fn pointwise(name: &str, reference: &str, tol: f64, pts: &[SitePoint], f: impl Fn(SitePoint) -> f64) -> Vec<Check> {
    let mut c = Check::below(name, reference, tol);
    for p in pts {
        c.observe(f(*p), *p);
    }
    vec![c]
}
