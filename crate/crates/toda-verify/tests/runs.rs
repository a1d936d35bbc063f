use serde_json::Value;
use toda_verify::artifacts::{read_grid_csv, Artifact};
use toda_verify::config::{RunConfig, Suite};
use toda_verify::report::{Check, Status};
use toda_verify::suites::{fourier::symbol_curves, run_jobs, Job};
use toda_verify::{run, RunError};

fn exact(samples: usize) -> RunConfig {
    let mut cfg = RunConfig::new(Suite::Exact);
    cfg.samples = samples;
    cfg.output.stdout_summary = false;
    cfg
}

/// Drops the fields that hold wall-clock times.
fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("created_unix");
            m.remove("elapsed_s");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn exact_run_lists_checks_and_no_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = exact(200);
    cfg.seed = 7;
    cfg.output.json = Some(dir.path().join("r.json"));
    cfg.output.csv_dir = Some(dir.path().join("csv"));
    let out = run(&cfg).unwrap();
    assert!(out.report.passed(), "{}", out.report.summary());
    assert!(out.csv_files.is_empty());

    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["config"]["seed"], 7);
    let checks = v["suites"][0]["checks"].as_array().unwrap();
    assert!(checks.len() >= 8, "{} checks", checks.len());
    for c in checks {
        assert!(!c["reference"].as_str().unwrap().is_empty());
        assert!(c["worst_residual"].is_f64(), "{c}");
        assert_eq!(c["location"]["kind"], "site");
    }
    assert!(v["versions"]["library"].is_string());
}

#[test]
fn json_is_deterministic_up_to_timing() {
    // the path is part of the echoed config, so both runs write the same one
    let mut texts = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    for _ in 0..2 {
        let mut cfg = exact(100);
        cfg.suite = Suite::Linearized;
        cfg.output.json = Some(path.clone());
        run(&cfg).unwrap();
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        strip_timing(&mut v);
        texts.push(serde_json::to_string_pretty(&v).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn parallel_matches_serial() {
    let serial = run(&exact(100)).unwrap().report;
    let mut cfg = exact(100);
    cfg.parallel = true;
    let parallel = run(&cfg).unwrap().report;
    let (a, b) = (&serial.suites[0].checks, &parallel.suites[0].checks);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert_eq!((&x.name, x.status, x.worst_residual), (&y.name, y.status, y.worst_residual));
    }
}

#[test]
fn zero_samples_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Suite::Fourier);
    cfg.samples = 0;
    cfg.output.json = Some(dir.path().join("r.json"));
    assert!(matches!(run(&cfg), Err(RunError::Usage(_))));
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn tightened_tolerance_fails_the_check() {
    let mut cfg = exact(50);
    cfg.tolerances.set("toda", 1e-300).unwrap();
    let rep = run(&cfg).unwrap().report;
    assert_eq!(rep.status, Status::Fail);
    assert_eq!(rep.suites[0].check("exact.toda_residual").unwrap().status, Status::Fail);
    assert_eq!(rep.suites[0].check("exact.bilinear_kappa").unwrap().status, Status::Pass);
}

#[test]
fn panicking_job_becomes_a_failed_record() {
    let jobs: Vec<Job> = vec![
        Box::new(|| {
            let mut c = Check::below("ok", "fine", 1.0);
            c.observe(0.5, toda_verify::report::Location::None);
            vec![c]
        }),
        Box::new(|| panic!("boom")),
    ];
    for parallel in [false, true] {
        let r = run_jobs(&jobs, parallel);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].status, Status::Pass);
        assert_eq!(r[1].status, Status::Fail);
        assert!(r[1].worst_residual.unwrap().is_nan());
        assert_eq!(r[1].detail.as_deref(), Some("panicked"));
    }
}

#[test]
fn symbol_curves_cover_the_window() {
    let curves = symbol_curves();
    let files: Vec<&str> = curves.iter().map(Artifact::file).collect();
    assert_eq!(files, ["symbols_P.csv", "symbols_Q.csv", "symbols_J.csv", "symbols_R.csv"]);
    let text = curves[1].to_csv().unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["xi", "re", "im"]);
    let rows: Vec<Vec<f64>> =
        rdr.records().map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 1001);
    assert_eq!((rows[0][0], rows[1000][0]), (-5.0, 5.0));
    let origin = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!(origin[1].hypot(origin[2]) < 1e-10);
}

#[test]
fn small_kernel_run_writes_mode_grids() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Suite::Kernel);
    cfg.half_width = Some(4.0);
    cfg.refine = 2;
    cfg.output.csv_dir = Some(dir.path().to_path_buf());
    let out = run(&cfg).unwrap();
    let names: Vec<String> =
        out.csv_files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert_eq!(names, ["kernel_mode_1.csv", "kernel_mode_2.csv", "lump_slice.csv"]);
    let suite = &out.report.suites[0];
    let data = suite.data.as_ref().unwrap();
    assert_eq!(data["singular_values"].as_array().unwrap().len(), 3);
    assert_eq!(data["study"].as_array().unwrap().len(), 3);
    for f in &out.csv_files {
        let g = read_grid_csv(&std::fs::read_to_string(f).unwrap()).unwrap();
        assert_eq!(g.values.len(), g.grid.nx * g.grid.ny);
        assert_eq!(g.grid.refine, 2);
        assert_eq!(g.grid.nx, data["grid"]["nx"].as_u64().unwrap() as usize);
    }
    for c in &suite.checks {
        assert!(c.status == Status::Skipped || c.worst_residual.is_some(), "{}", c.name);
    }
}
