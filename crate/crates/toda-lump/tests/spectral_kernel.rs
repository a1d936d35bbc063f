use faer::Mat;
use toda_lump::exact::exp_lump_difference;
use toda_lump::kernel::*;
use toda_lump::linearized::{kernel_field, Direction};
use toda_lump::{Error, SeqField, DELTA};

fn small_opts() -> KernelOptions {
    KernelOptions { count: 4, tol: 1e-9, ..Default::default() }
}

#[test]
fn grid_invariants() {
    let g = GridSpec::new(12.0, 4).unwrap();
    assert!((g.h * (g.nx - 1) as f64 - 2.0 * g.half_width).abs() < 1e-12);
    assert!((g.refine as f64 * g.h - DELTA).abs() < 1e-15);
    assert!(g.half_width >= 12.0 && g.half_width < 12.0 + g.h);
    assert_eq!(g.nx, 273);
    assert!(g.len() > 70_000 && g.len() < 80_000);
    // node i + k sits exactly δ to the right
    assert!((g.x(100 + g.refine) - g.x(100) - DELTA).abs() < 1e-12);
    assert!(matches!(GridSpec::new(12.0, 1), Err(Error::Grid(_))));
    assert!(GridSpec::new(-1.0, 2).is_err());
    let exact = GridSpec::from_parts(10, 2);
    assert_eq!(GridSpec::new(exact.half_width, 2).unwrap(), exact);
}

#[test]
fn assembled_structure() {
    let g = GridSpec::new(4.0, 2).unwrap();
    let op = assemble(g).unwrap();
    assert_eq!(op.dimension(), g.nx * g.ny);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let r = g.idx(i, j);
            let (cols, vals) = op.row(r);
            if g.is_boundary(i, j) {
                assert_eq!((cols, vals), (&[r][..], &[1.0][..]));
            } else if g.has_full_stencil(i, j) {
                assert_eq!(cols.len(), 7);
            } else {
                assert!(cols.len() < 7 && cols.len() >= 5);
            }
        }
    }
    let (am, ap) = coupling_coefficients(0.3, -0.2);
    assert!(am > 0.0 && ap > 0.0);
    assert!((am - exp_lump_difference(0, 0.3, -0.2)).abs() < 1e-15);
    assert!((ap - exp_lump_difference(1, 0.3, -0.2)).abs() < 1e-15);

    let bad = GridSpec { h: 0.1, ..g };
    assert!(matches!(assemble(bad), Err(Error::Grid(_))));
}

#[test]
fn rows_match_a_hand_stencil() {
    let g = GridSpec::new(3.0, 3).unwrap();
    let op = assemble(g).unwrap();
    let u: Vec<f64> = (0..g.len()).map(|r| ((r * 7919) % 1000) as f64 / 1000.0 - 0.5).collect();
    let au = op.apply(&u);
    let c = 0.25 / (g.h * g.h);
    for (i, j) in [(5, 5), (g.nx / 2, g.ny / 2), (1, 7), (g.nx - 2, 3), (g.nx - 4, g.ny - 2)] {
        let r = g.idx(i, j);
        let (x, y) = (g.x(i), g.y(j));
        let (am, ap) = (exp_lump_difference(0, x, y), exp_lump_difference(1, x, y));
        let lap = c * (u[r + 1] + u[r - 1] + u[r + g.nx] + u[r - g.nx] - 4.0 * u[r]);
        let left = if i >= g.refine { u[r - g.refine] } else { 0.0 };
        let right = if i + g.refine < g.nx { u[r + g.refine] } else { 0.0 };
        let want = lap - am * (left - u[r]) + ap * (u[r] - right);
        assert!((au[r] - want).abs() < 1e-12 * (1.0 + want.abs()), "({i},{j})");
    }
    let v: Vec<f64> = (0..g.len()).map(|r| ((r * 104729) % 997) as f64 / 997.0).collect();
    let lhs: f64 = au.iter().zip(&v).map(|(a, b)| a * b).sum();
    let atv = op.apply_transpose(&v);
    let rhs: f64 = u.iter().zip(&atv).map(|(a, b)| a * b).sum();
    assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
}

#[test]
fn constants_vanish_in_the_far_field() {
    let g = GridSpec::new(12.0, 4).unwrap();
    let op = assemble(g).unwrap();
    let ones = vec![1.0; g.len()];
    let out = op.apply(&ones);
    let (i, j) = (g.refine + 2, 3);
    let (am, ap) = coupling_coefficients(g.x(i), g.y(j));
    assert!((am - 1.0).abs() < 1e-2 && (ap - 1.0).abs() < 1e-2);
    assert!(out[g.idx(i, j)].abs() < 1e-12);
    // next to the wall the Laplacian sees the boundary rows, which carry 1
    assert!(out[g.idx(g.nx / 2, 1)].abs() < 1e-12);
}

/// Max residual of the discretized translation modes over rows whose
/// stencil lies inside the box.
fn mode_residual(g: &GridSpec, direction: Direction) -> f64 {
    let op = assemble(*g).unwrap();
    let m = g.sample(&kernel_field(direction));
    let am = op.apply(&m);
    let mut worst: f64 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            if g.has_full_stencil(i, j) {
                worst = worst.max(am[g.idx(i, j)].abs());
            }
        }
    }
    worst
}

#[test]
fn translation_modes_have_second_order_residuals() {
    for d in [Direction::X, Direction::Y] {
        let r: Vec<f64> = [8, 16, 32].iter().map(|&k| mode_residual(&GridSpec::new(3.0, k).unwrap(), d)).collect();
        assert!(r[0] / r[1] > 3.5 && r[1] / r[2] > 3.5, "{d:?}: {r:?}");
    }
    // the continuous fields solve the equation
    let u = kernel_field(Direction::X);
    let p = toda_lump::SitePoint::new(0, 0.4, 0.1);
    assert!(toda_lump::linearized::linearized_toda_residual(&u, p).magnitude < 1e-12);
    assert!(u.value(0, 0.4, 0.1).re.is_finite());
}

#[test]
fn near_kernel_of_the_identity() {
    let op = DiscreteOperator::identity(12);
    let rep = near_kernel(&op, &KernelOptions::default()).unwrap();
    assert_eq!(rep.singular_values.len(), 3);
    for s in &rep.singular_values {
        assert!((s - 1.0).abs() < 1e-14);
    }
    assert!(rep.correlations.is_empty());
    assert!(matches!(
        near_kernel(&op, &KernelOptions { count: 2, ..Default::default() }),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn near_kernel_matches_a_dense_svd() {
    let g = GridSpec::new(1.5, 2).unwrap();
    let op = assemble(g).unwrap();
    let n = op.dimension();
    let mut dense = Mat::<f64>::zeros(n, n);
    for r in 0..n {
        let (c, v) = op.row(r);
        for (&c, &v) in c.iter().zip(v) {
            dense[(r, c)] = v;
        }
    }
    let all = dense.singular_values().unwrap();
    let mut all = all.clone();
    all.sort_by(f64::total_cmp);
    let rep = near_kernel(&op, &small_opts()).unwrap();
    for (a, b) in rep.singular_values.iter().zip(&all) {
        assert!((a - b).abs() < 1e-10 * b.max(1.0), "{a} vs {b}");
    }
    assert!(rep.singular_values.windows(2).all(|w| w[0] <= w[1]));
    for (s, (f, b)) in rep.singular_values.iter().zip(rep.forward_residuals.iter().zip(&rep.backward_residuals)) {
        assert!(*f <= s * (1.0 + 1e-9));
        assert!(*b <= 1e-9 * s);
    }
}

#[test]
fn near_kernel_is_reproducible() {
    let g = GridSpec::new(4.0, 2).unwrap();
    let op = assemble(g).unwrap();
    let a = near_kernel(&op, &small_opts()).unwrap();
    let b = near_kernel(&op, &small_opts()).unwrap();
    assert_eq!(a.iterations, b.iterations);
    for (x, y) in a.singular_values.iter().zip(&b.singular_values) {
        assert!((x - y).abs() < 1e-10);
    }
    let c = near_kernel(&op, &KernelOptions { seed: 99, ..small_opts() }).unwrap();
    for (x, y) in a.singular_values.iter().zip(&c.singular_values) {
        assert!((x - y).abs() < 1e-8 * y);
    }
}

#[test]
fn report_fields_are_consistent() {
    let g = GridSpec::new(4.0, 2).unwrap();
    let rep = near_kernel(&assemble(g).unwrap(), &small_opts()).unwrap();
    assert_eq!(rep.grid, Some(g));
    assert_eq!(rep.kernel_vectors.len(), 4);
    assert!((rep.gap_ratio - rep.singular_values[2] / rep.singular_values[1]).abs() < 1e-15);
    for c in rep.correlations.iter().flatten() {
        assert!((0.0..=1.0 + 1e-12).contains(c));
    }
    // the operator commutes with y ↦ -y, so each vector has a parity
    for (_, violation) in &rep.parity {
        assert!(*violation < 1e-6);
    }
    assert_eq!(rep.principal_angles.len(), 2);
    assert!(rep.principal_angles.iter().all(|a| (0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(a)));
    for v in &rep.kernel_vectors {
        let n: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-12);
    }
}

#[test]
fn principal_angles_of_known_spans() {
    let e = |k: usize| (0..5).map(|i| if i == k { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
    let a = principal_angles(&[e(0), e(1)], &[e(1), e(0)]).unwrap();
    assert!(a.iter().all(|x| x.abs() < 1e-7));
    let b = principal_angles(&[e(0), e(1)], &[e(2), e(3)]).unwrap();
    assert!(b.iter().all(|x| (x - std::f64::consts::FRAC_PI_2).abs() < 1e-12));
    let tilted = vec![1.0, 0.0, 1.0, 0.0, 0.0];
    let c = principal_angles(&[e(0), e(1)], &[tilted, e(1)]).unwrap();
    assert!(c[0].abs() < 1e-7 && (c[1] - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
}

#[test]
fn convergence_study_bookkeeping() {
    let grids: Vec<GridSpec> = [(2.0, 2), (3.0, 2), (2.0, 3)].iter().map(|&(l, k)| GridSpec::new(l, k).unwrap()).collect();
    let opts = small_opts();
    let serial = convergence_study(&grids, &opts, false).unwrap();
    let parallel = convergence_study(&grids, &opts, true).unwrap();
    for (a, b) in serial.rows.iter().zip(&parallel.rows) {
        assert_eq!(a.grid, b.grid);
        for (x, y) in a.sigma.iter().zip(&b.sigma) {
            assert!((x - y).abs() < 1e-10);
        }
    }
    let t = serial.threshold;
    assert!(t.c1 >= 0.0 && t.c2 >= 0.0);
    for row in &serial.rows {
        assert!(row.sigma[1] <= 0.5 * t.threshold(row.grid.h, row.grid.half_width) * (1.0 + 1e-12));
        assert!(serial.count_below(row) >= 2);
    }
    let checks = serial.checks();
    assert!(checks.refinement_ratio.is_some());
    assert!(checks.sigma2_decreasing.is_some());
    assert!(checks.sigma3_spread >= 0.0);
    assert!(matches!(convergence_study(&grids[..2], &opts, false), Err(Error::InvalidArgument(_))));
}
