//! Near-kernel of the discretized linearized operator and the convergence
//! study around it.

use std::time::Instant;

use serde_json::json;
use toda_lump::exact::eval_lump;
use toda_lump::kernel::*;
use toda_lump::linearized::{kernel_field, Direction};
use toda_lump::SitePoint;

use crate::artifacts::{Artifact, GridHeader};
use crate::config::RunConfig;
use crate::report::{Check, CheckRecord, Expect, Location, SuiteReport};

/// Box widths of the convergence study besides the requested one.
pub const STUDY_WIDTHS: [f64; 2] = [8.0, 16.0];
pub const COARSE_REFINE: usize = 2;
/// Translation-mode residual order is measured on `[-3, 3]²` at these `k`.
pub const MODE_REFINES: [usize; 3] = [8, 16, 32];
const MODE_HALF_WIDTH: f64 = 3.0;

fn grid_loc(g: &GridSpec) -> Location {
    Location::Grid { half_width: g.half_width, refine: g.refine }
}

pub fn study_grids(cfg: &RunConfig) -> toda_lump::Result<Vec<GridSpec>> {
    let mut grids = Vec::new();
    for k in [COARSE_REFINE, cfg.refine] {
        for l in [STUDY_WIDTHS[0], cfg.kernel_half_width(), STUDY_WIDTHS[1]] {
            let g = GridSpec::new(l, k)?;
            if !grids.contains(&g) {
                grids.push(g);
            }
        }
    }
    Ok(grids)
}

/// Max of `|A m|` over interior rows for a discretized translation mode.
fn mode_residual(g: &GridSpec, direction: Direction) -> toda_lump::Result<f64> {
    let op = assemble(*g)?;
    let am = op.apply(&g.sample(&kernel_field(direction)));
    let mut worst: f64 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            if g.has_full_stencil(i, j) {
                worst = worst.max(am[g.idx(i, j)].abs());
            }
        }
    }
    Ok(worst)
}

fn mode_order(tol: f64) -> Check {
    let mut c = Check::new(
        "kernel.mode_order",
        "discretized translation modes have second-order residuals",
        Expect::AtLeast,
        tol,
    );
    for d in [Direction::X, Direction::Y] {
        let grids: toda_lump::Result<Vec<GridSpec>> =
            MODE_REFINES.iter().map(|&k| GridSpec::new(MODE_HALF_WIDTH, k)).collect();
        let r = grids.and_then(|gs| {
            gs.iter()
                .map(|g| mode_residual(g, d).map(|r| (*g, r)))
                .collect::<toda_lump::Result<Vec<_>>>()
        });
        match r {
            Ok(rs) => {
                for w in rs.windows(2) {
                    c.observe(w[0].1 / w[1].1, grid_loc(&w[1].0));
                }
            }
            Err(e) => c.error(e),
        }
    }
    c
}

/// Lump `Q_0` sampled on `g`.
pub fn lump_slice(g: GridSpec) -> Artifact {
    let mut values = Vec::with_capacity(g.len());
    for j in 0..g.ny {
        for i in 0..g.nx {
            values.push(eval_lump(SitePoint::new(0, g.x(i), g.y(j))));
        }
    }
    Artifact::Grid { file: "lump_slice.csv".into(), grid: GridHeader::from(g), values }
}

fn study_checks(cfg: &RunConfig, table: &ConvergenceTable, target: &StudyRow) -> Vec<Check> {
    let tol = |name| cfg.tolerances.get(name);
    let loc = grid_loc(&target.grid);
    let mut out = Vec::new();

    let mut c = Check::new(
        "kernel.count_below",
        "exactly two singular values below the calibrated threshold",
        Expect::Equal,
        tol("count_below"),
    );
    c.observe(table.count_below(target) as f64, loc);
    c.note(format!("threshold {:.6e}", table.threshold.threshold(target.grid.h, target.grid.half_width)));
    out.push(c);

    let mut c = Check::new("kernel.gap_ratio", "sigma3/sigma2 separates the kernel", Expect::AtLeast, tol("gap_ratio"));
    c.observe(target.gap_ratio, loc);
    out.push(c);

    let mut c = Check::below(
        "kernel.principal_angles",
        "near-kernel spans the x and y translation modes",
        tol("angles"),
    );
    match target.principal_angles.iter().copied().reduce(f64::max) {
        Some(a) => c.observe(a, loc),
        None => c.error("no principal angles reported"),
    }
    out.push(c);

    let checks = table.checks();
    let mut c = Check::new(
        "kernel.refinement_ratio",
        "sigma1 at least halves under h-refinement",
        Expect::AtMost,
        tol("refinement"),
    );
    match checks.refinement_ratio {
        Some(r) => c.observe(r, loc),
        None => c.error("no pair of study grids shares a box width"),
    }
    out.push(c);

    // worst ratio of sigma2 between consecutive widths at fixed refinement
    let mut c = Check::below("kernel.sigma2_decreasing", "sigma2 decreases as the box grows", 1.0);
    for k in [COARSE_REFINE, cfg.refine] {
        let mut rows: Vec<&StudyRow> = table.rows.iter().filter(|r| r.grid.refine == k).collect();
        rows.sort_by(|a, b| a.grid.half_width.total_cmp(&b.grid.half_width));
        for w in rows.windows(2) {
            c.observe(w[1].sigma[1] / w[0].sigma[1], grid_loc(&w[1].grid));
        }
    }
    out.push(c);

    let mut c = Check::below("kernel.sigma3_spread", "sigma3 is stable across the study", tol("sigma3_spread"));
    c.observe(checks.sigma3_spread, Location::None);
    out.push(c);

    let mut c = Check::new(
        "kernel.solver_residual",
        "singular triplets converged",
        Expect::AtMost,
        tol("solver"),
    );
    for row in &table.rows {
        let rep = &row.report;
        for (b, s) in rep.backward_residuals.iter().zip(&rep.singular_values) {
            c.observe(b / s, grid_loc(&row.grid));
        }
    }
    out.push(c);

    let mut c = Check::below("kernel.parity", "each near-kernel vector is even or odd in y", tol("parity"));
    for (_, v) in &target.report.parity {
        c.observe(*v, loc);
    }
    out.push(c);
    out
}

fn study_data(table: &ConvergenceTable, target: &StudyRow) -> serde_json::Value {
    let rep = &target.report;
    json!({
        "grid": { "half_width": target.grid.half_width, "refine": target.grid.refine, "h": target.grid.h,
                  "nx": target.grid.nx, "ny": target.grid.ny },
        "singular_values": rep.singular_values,
        "forward_residuals": rep.forward_residuals,
        "backward_residuals": rep.backward_residuals,
        "correlations": rep.correlations,
        "principal_angles": rep.principal_angles,
        "parity": rep.parity.iter().map(|(p, v)| json!({ "parity": format!("{p:?}").to_lowercase(), "violation": v }))
            .collect::<Vec<_>>(),
        "gap_ratio": rep.gap_ratio,
        "iterations": rep.iterations,
        "seed": rep.seed,
        "threshold": { "c1": table.threshold.c1, "c2": table.threshold.c2,
                       "value": table.threshold.threshold(target.grid.h, target.grid.half_width) },
        "study": table.rows.iter().map(|r| json!({
            "half_width": r.grid.half_width, "refine": r.grid.refine, "h": r.grid.h,
            "sigma": r.sigma, "gap_ratio": r.gap_ratio, "principal_angles": r.principal_angles,
            "iterations": r.report.iterations,
        })).collect::<Vec<_>>(),
    })
}

pub fn run(cfg: &RunConfig) -> SuiteReport {
    let t0 = Instant::now();
    let opts = KernelOptions::default();
    let mut records: Vec<CheckRecord> = Vec::new();
    let mut data = None;
    let mut artifacts = Vec::new();

    let t = Instant::now();
    let study = study_grids(cfg).and_then(|g| convergence_study(&g, &opts, cfg.parallel));
    let target = GridSpec::new(cfg.kernel_half_width(), cfg.refine);
    match (study, target) {
        (Ok(table), Ok(target)) => {
            let row = table.rows.iter().find(|r| r.grid == target).expect("target grid is part of the study");
            let checks = study_checks(cfg, &table, row);
            let each = t.elapsed() / checks.len() as u32;
            records.extend(checks.into_iter().map(|c| c.finish(each)));
            data = Some(study_data(&table, row));
            for (i, v) in row.report.kernel_vectors.iter().take(2).enumerate() {
                artifacts.push(Artifact::Grid {
                    file: format!("kernel_mode_{}.csv", i + 1),
                    grid: GridHeader::from(target),
                    values: v.clone(),
                });
            }
            artifacts.push(lump_slice(target));
        }
        (Err(e), _) | (_, Err(e)) => {
            let mut c = Check::below("kernel.study", "convergence study completed", 0.0);
            c.error(e);
            records.push(c.finish(t.elapsed()));
        }
    }

    let t = Instant::now();
    records.push(mode_order(cfg.tolerances.get("mode_order")).finish(t.elapsed()));

    let mut report = SuiteReport::new("kernel", records, t0.elapsed());
    report.data = data;
    report.artifacts = artifacts;
    report
}
