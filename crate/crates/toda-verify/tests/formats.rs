use proptest::prelude::*;
use toda_lump::kernel::GridSpec;
use toda_verify::artifacts::*;
use toda_verify::config::*;

#[test]
fn tol_parser() {
    assert_eq!(parse_tol("toda=1e-9").unwrap(), ("toda".to_string(), 1e-9));
    assert_eq!(parse_tol(" l3 = 0.5 ").unwrap(), ("l3".to_string(), 0.5));
    for bad in ["toda", "=1", "to-da=1", "toda=abc", "toda=0", "toda=-1", "toda=inf", "toda=NaN", ""] {
        assert!(parse_tol(bad).is_err(), "{bad}");
    }
    let mut t = Tolerances::default();
    t.set("toda", 2e-10).unwrap();
    assert_eq!(t.get("toda"), 2e-10);
    assert!(t.set("nope", 1.0).is_err());
    for (name, v) in TOLERANCES {
        assert_eq!(Tolerances::default().get(name), *v);
    }
}

#[test]
fn n_range_parser() {
    assert_eq!(parse_n_range("-3:3").unwrap(), (-3, 3));
    assert_eq!(parse_n_range("2:2").unwrap(), (2, 2));
    for bad in ["3:-3", "1", "a:b", "1:2:3", "-2000000:0", ":"] {
        assert!(parse_n_range(bad).is_err(), "{bad}");
    }
}

#[test]
fn suite_names_round_trip() {
    for s in [Suite::Exact, Suite::Linearized, Suite::Fourier, Suite::Kernel, Suite::All] {
        assert_eq!(Suite::parse(s.name()).unwrap(), s);
    }
    assert_eq!(Suite::All.expand().len(), 4);
    assert!(Suite::parse("everything").is_err());
}

#[test]
fn config_validation() {
    let mut cfg = RunConfig::new(Suite::Exact);
    assert!(cfg.validate().is_ok());
    cfg.samples = 0;
    assert!(cfg.validate().is_err());
    let mut cfg = RunConfig::new(Suite::Kernel);
    cfg.refine = 1;
    assert!(cfg.validate().is_err());
    cfg.refine = 2;
    cfg.half_width = Some(-1.0);
    assert!(cfg.validate().is_err());

    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Suite::Exact);
    cfg.output.json = Some(dir.path().to_path_buf());
    assert!(cfg.validate().is_err(), "a directory is not a report path");
    cfg.output.json = Some(dir.path().join("missing").join("r.json"));
    assert!(cfg.validate().is_err());
    cfg.output.json = Some(dir.path().join("r.json"));
    cfg.output.csv_dir = Some(dir.path().join("csv"));
    assert!(cfg.validate().is_ok());
    assert!(dir.path().join("csv").is_dir());
}

fn sample_grid() -> (GridHeader, Vec<f64>) {
    let g = GridHeader::from(GridSpec::new(0.5, 2).unwrap());
    let values = (0..g.nx * g.ny).map(|i| (i as f64).sin() * 1e-3 + 1.0 / 3.0).collect();
    (g, values)
}

#[test]
fn grid_csv_round_trip() {
    let (grid, values) = sample_grid();
    let a = Artifact::Grid { file: "g.csv".into(), grid, values: values.clone() };
    let text = a.to_csv().unwrap();
    assert!(text.starts_with("# grid half_width="));
    assert_eq!(text.lines().nth(1), Some("i,j,x,y,value"));
    assert_eq!(text.lines().count(), 2 + grid.nx * grid.ny);
    let back = read_grid_csv(&text).unwrap();
    assert_eq!(back.grid, grid);
    assert_eq!(back.values, values, "17 digits round-trip exactly");

    let dir = tempfile::tempdir().unwrap();
    let files = emit_csv(&[a], dir.path()).unwrap();
    assert_eq!(files, vec![dir.path().join("g.csv")]);
    assert_eq!(std::fs::read_to_string(&files[0]).unwrap(), text);
    assert!(emit_csv(&[], dir.path()).unwrap().is_empty());
}

#[test]
fn curve_csv() {
    let a = Artifact::Curve {
        file: "c.csv".into(),
        columns: vec!["xi".into(), "re".into(), "im".into()],
        rows: vec![vec![0.0, 1.0, -0.1], vec![0.01, 2.0, 1e-300]],
    };
    let text = a.to_csv().unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("xi,re,im"));
    assert_eq!(lines.next(), Some("0.0000000000000000e0,1.0000000000000000e0,-1.0000000000000001e-1"));
    let bad = Artifact::Curve { file: "c.csv".into(), columns: vec!["a".into()], rows: vec![vec![1.0, 2.0]] };
    assert!(matches!(bad.to_csv(), Err(ArtifactError::Shape { .. })));
}

#[test]
fn grid_reader_rejects_damage() {
    let (grid, values) = sample_grid();
    let text = Artifact::Grid { file: "g.csv".into(), grid, values }.to_csv().unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let join = |ls: &[&str]| ls.join("\n") + "\n";

    assert!(matches!(read_grid_csv(&text[1..]), Err(ArtifactError::Header(_))));
    let no_nx = text.replacen(&format!("nx={}", grid.nx), "", 1);
    assert!(matches!(read_grid_csv(&no_nx), Err(ArtifactError::Header(_))));
    let huge = text.replacen(&format!("nx={}", grid.nx), "nx=100000000", 1);
    assert!(matches!(read_grid_csv(&huge), Err(ArtifactError::Header(_))));
    let cols = text.replacen("i,j,x,y,value", "i,j,x,y,v", 1);
    assert!(matches!(read_grid_csv(&cols), Err(ArtifactError::Header(_))));

    // truncated
    assert!(matches!(read_grid_csv(&join(&lines[..lines.len() - 1])), Err(ArtifactError::Shape { .. })));
    // swapped rows
    let mut swapped = lines.clone();
    swapped.swap(2, 3);
    assert!(matches!(read_grid_csv(&join(&swapped)), Err(ArtifactError::Row { row: 0, .. })));
    // moved node
    let mut moved: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    let f: Vec<&str> = lines[4].split(',').collect();
    moved[4] = format!("{},{},{},{},{}", f[0], f[1], "7.0", f[3], f[4]);
    assert!(matches!(read_grid_csv(&(moved.join("\n") + "\n")), Err(ArtifactError::Row { row: 2, .. })));
    // non-finite value
    let mut nan = lines.clone();
    let last = lines[lines.len() - 1].rsplit_once(',').unwrap().0.to_string() + ",NaN";
    let n = nan.len();
    nan[n - 1] = &last;
    assert!(matches!(read_grid_csv(&join(&nan)), Err(ArtifactError::Row { .. })));
    // extra row
    let mut extra = lines.clone();
    extra.push(lines[2]);
    assert!(matches!(read_grid_csv(&join(&extra)), Err(ArtifactError::Row { .. })));
}

#[test]
fn fuzz_seeds_are_valid_grids() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/read_grid_csv");
    for name in ["tiny", "small"] {
        let g = read_grid_csv(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap();
        assert_eq!(g.values.len(), g.grid.nx * g.grid.ny, "{name}");
    }
    let header_only = std::fs::read_to_string(dir.join("header_only")).unwrap();
    assert!(matches!(read_grid_csv(&header_only), Err(ArtifactError::Shape { .. })));
}

proptest! {
    #[test]
    fn tol_parser_accepts_what_it_prints(name in "[a-z_][a-z0-9_]{0,12}", value in 1e-300f64..1e300) {
        let (n, v) = parse_tol(&format!("{name}={value:e}")).unwrap();
        prop_assert_eq!(n, name);
        prop_assert_eq!(v, value);
    }

    #[test]
    fn n_range_parser_round_trip(lo in -1_000_000i64..=1_000_000, len in 0i64..100) {
        let hi = (lo + len).min(1_000_000);
        prop_assert_eq!(parse_n_range(&format!("{lo}:{hi}")).unwrap(), (lo, hi));
    }

    #[test]
    fn parsers_never_panic(s in "\\PC{0,40}") {
        let _ = parse_tol(&s);
        let _ = parse_n_range(&s);
        let _ = read_grid_csv(&s);
    }

    #[test]
    fn grid_values_round_trip(vals in proptest::collection::vec(-1e6f64..1e6, 9)) {
        let grid = GridHeader::from(GridSpec::from_parts(1, 2));
        let a = Artifact::Grid { file: "g.csv".into(), grid, values: vals.clone() };
        prop_assert_eq!(read_grid_csv(&a.to_csv().unwrap()).unwrap().values, vals);
    }
}
