//! Finite-difference discretization of the linearized lump equation under the
//! traveling reduction `U[n](x, y) = U[0](x + nδ, y)`, and a search for its
//! smallest singular values.
//!
//! The unknown is one plane function on a square box with zero Dirichlet
//! data. Row `(i, j)` encodes
//! `(1/4)Δh U - a₋(U(x-δ) - U) + a₊(U - U(x+δ))` with
//! `a₋ = θ(-2)θ0/θ(-1)²` and `a₊ = θ(-1)θ1/θ0²`.

use std::time::Instant;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::theta;
use crate::linearized::{kernel_field, Direction};
use crate::{Error, Result, SeqField, DELTA};

/// Square node grid on `[-L, L]²` with spacing `h = δ/k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    pub refine: usize,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// Snaps `half_width` up to the next multiple of `h = δ/refine`, so that
    /// `h·(nx - 1) = 2L` and a lattice shift is exactly `refine` columns.
    pub fn new(half_width: f64, refine: usize) -> Result<Self> {
        if refine < 2 {
            return Err(Error::Grid(format!("refine must be at least 2, got {refine}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Grid(format!("half width must be positive, got {half_width}")));
        }
        let h = DELTA / refine as f64;
        let m = (half_width / h - 1e-9).ceil().max(1.0) as usize;
        Ok(GridSpec::from_parts(m, refine))
    }

    /// Grid with `2m + 1` nodes per side.
    pub fn from_parts(m: usize, refine: usize) -> Self {
        let h = DELTA / refine as f64;
        GridSpec { half_width: m as f64 * h, refine, h, nx: 2 * m + 1, ny: 2 * m + 1 }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.h
    }

    /// Row-major index, `i` along `x`.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Interior node whose shifted couplings stay inside the box.
    pub fn has_full_stencil(&self, i: usize, j: usize) -> bool {
        !self.is_boundary(i, j) && i >= self.refine && i + self.refine < self.nx
    }

    pub fn sample(&self, f: &dyn SeqField) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for j in 0..self.ny {
            for i in 0..self.nx {
                out[self.idx(i, j)] = f.value(0, self.x(i), self.y(j)).re;
            }
        }
        out
    }

    /// `v(x, -y)`.
    pub fn reflect_y(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for j in 0..self.ny {
            for i in 0..self.nx {
                out[self.idx(i, j)] = v[self.idx(i, self.ny - 1 - j)];
            }
        }
        out
    }
}

/// `e^{Q(-1)-Q0}` and `e^{Q0-Q1}` at a point.
pub fn coupling_coefficients(x: f64, y: f64) -> (f64, f64) {
    let (tm2, tm1, t0, t1) = (theta(-2, x, y), theta(-1, x, y), theta(0, x, y), theta(1, x, y));
    (tm2 * t0 / (tm1 * tm1), tm1 * t1 / (t0 * t0))
}

/// Real sparse matrix in compressed row form.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub grid: Option<GridSpec>,
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl DiscreteOperator {
    /// Builds from `(row, col, value)` entries; duplicates are summed.
    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| e.0 >= dim || e.1 >= dim) {
            return Err(Error::InvalidArgument(format!("entry ({}, {}) outside a {dim}×{dim} matrix", e.0, e.1)));
        }
        entries.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *vals.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(DiscreteOperator { grid: None, dim, row_ptr, cols, vals })
    }

    pub fn identity(dim: usize) -> Self {
        DiscreteOperator::from_triplets(dim, (0..dim).map(|r| (r, r, 1.0)).collect()).expect("diagonal entries are in range")
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.cols[span.clone()], &self.vals[span])
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|r| {
                let (c, v) = self.row(r);
                c.iter().zip(v).map(|(&c, v)| v * x[c]).sum()
            })
            .collect()
    }

    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (r, xr) in x.iter().enumerate().take(self.dim) {
            let (c, v) = self.row(r);
            for (&c, v) in c.iter().zip(v) {
                out[c] += v * xr;
            }
        }
        out
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.dim {
            let (c, v) = self.row(r);
            t.extend(c.iter().zip(v).map(|(&c, &v)| Triplet::new(r, c, v)));
        }
        SparseColMat::try_new_from_triplets(self.dim, self.dim, &t).map_err(|e| Error::Solver(format!("{e:?}")))
    }
}

/// Assembles the traveling-reduced linearized operator on `grid`.
pub fn assemble(grid: GridSpec) -> Result<DiscreteOperator> {
    let k = (DELTA / grid.h).round() as usize;
    if k != grid.refine || ((DELTA / grid.h) - k as f64).abs() > 1e-9 {
        return Err(Error::Grid(format!("spacing {} is not δ/{}", grid.h, grid.refine)));
    }
    if grid.nx < 3 || grid.ny < 3 {
        return Err(Error::Grid(format!("need at least 3×3 nodes, got {}×{}", grid.nx, grid.ny)));
    }
    let c = 0.25 / (grid.h * grid.h);
    let mut entries = Vec::with_capacity(7 * grid.len());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let r = grid.idx(i, j);
            if grid.is_boundary(i, j) {
                entries.push((r, r, 1.0));
                continue;
            }
            let (am, ap) = coupling_coefficients(grid.x(i), grid.y(j));
            entries.push((r, r, -4.0 * c + am + ap));
            entries.push((r, r - 1, c));
            entries.push((r, r + 1, c));
            entries.push((r, r - grid.nx, c));
            entries.push((r, r + grid.nx, c));
            // columns beyond the box carry the zero exterior value
            if i >= k {
                entries.push((r, r - k, -am));
            }
            if i + k < grid.nx {
                entries.push((r, r + k, -ap));
            }
        }
    }
    let mut op = DiscreteOperator::from_triplets(grid.len(), entries)?;
    op.grid = Some(grid);
    Ok(op)
}

/// Discretized `∂xQ0` and `∂yQ0`.
pub fn translation_modes(grid: &GridSpec) -> [Vec<f64>; 2] {
    [grid.sample(&kernel_field(Direction::X)), grid.sample(&kernel_field(Direction::Y))]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelOptions {
    /// Number of singular triplets reported; at least 3.
    pub count: usize,
    /// Convergence tolerance on `‖Aᵀu - σv‖/σ`.
    pub tol: f64,
    pub seed: u64,
    /// Extra block columns carried to speed up convergence.
    pub guard: usize,
    pub max_iterations: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions { count: 3, tol: 1e-6, seed: 0, guard: 8, max_iterations: 300 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug)]
pub struct KernelReport {
    pub grid: Option<GridSpec>,
    /// Ascending.
    pub singular_values: Vec<f64>,
    /// Unit right singular vectors, in the order of `singular_values`.
    pub kernel_vectors: Vec<Vec<f64>>,
    /// `‖A v‖` for each vector.
    pub forward_residuals: Vec<f64>,
    /// `‖Aᵀu - σv‖` for each triplet.
    pub backward_residuals: Vec<f64>,
    /// `|⟨v, m⟩|/(‖v‖‖m‖)` against `[∂xQ, ∂yQ]`; empty without a grid.
    pub correlations: Vec<[f64; 2]>,
    /// Principal angles between the span of the first two vectors and
    /// `span{∂xQ, ∂yQ}`, ascending; empty without a grid.
    pub principal_angles: Vec<f64>,
    /// Parity in `y` of each vector with its relative violation.
    pub parity: Vec<(Parity, f64)>,
    /// `σ3/σ2`.
    pub gap_ratio: f64,
    pub iterations: usize,
    pub seed: u64,
    pub runtime_secs: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

fn column(m: &Mat<f64>, j: usize) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

fn orthonormalize(m: &Mat<f64>) -> Mat<f64> {
    m.qr().compute_thin_Q()
}

/// Principal angles between the column spans of `a` and `b`, ascending.
pub fn principal_angles(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = a.first().map_or(0, Vec::len);
    let qa = orthonormalize(&Mat::from_fn(n, a.len(), |i, j| a[j][i]));
    let qb = orthonormalize(&Mat::from_fn(n, b.len(), |i, j| b[j][i]));
    let c = qa.transpose() * &qb;
    let svd = c.thin_svd().map_err(|e| Error::Solver(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let mut angles: Vec<f64> = (0..s.nrows()).map(|i| s[i].clamp(-1.0, 1.0).acos()).collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// Smallest singular triplets of `op` by block inverse iteration on `AᵀA`
/// (two sparse LU solves per sweep) with a Rayleigh–Ritz step on `A V`.
pub fn near_kernel(op: &DiscreteOperator, opts: &KernelOptions) -> Result<KernelReport> {
    let start = Instant::now();
    let n = op.dimension();
    if opts.count < 3 {
        return Err(Error::InvalidArgument(format!("count must be at least 3, got {}", opts.count)));
    }
    let p = (opts.count + opts.guard).min(n);
    if p < opts.count {
        return Err(Error::InvalidArgument(format!("{} triplets requested from dimension {n}", opts.count)));
    }
    let lu = op.to_faer()?.sp_lu().map_err(|e| Error::Solver(format!("sparse LU failed: {e:?}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v = orthonormalize(&Mat::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0)));
    let mut iterations = 0;
    loop {
        iterations += 1;
        lu.solve_transpose_in_place(v.as_mut());
        lu.solve_in_place(v.as_mut());
        v = orthonormalize(&v);

        let mut av = Mat::<f64>::zeros(n, p);
        for j in 0..p {
            let col = op.apply(&column(&v, j));
            for (i, x) in col.into_iter().enumerate() {
                av[(i, j)] = x;
            }
        }
        let svd = av.thin_svd().map_err(|e| Error::Solver(format!("{e:?}")))?;
        let s = svd.S().column_vector();
        // faer orders singular values descending
        let order: Vec<usize> = (0..p).rev().take(opts.count).collect();
        let ritz = &v * svd.V();
        let left = svd.U();

        let mut sigma = Vec::with_capacity(opts.count);
        let mut vectors = Vec::with_capacity(opts.count);
        let mut forward = Vec::with_capacity(opts.count);
        let mut backward = Vec::with_capacity(opts.count);
        for &c in &order {
            let x = column(&ritz, c);
            let u: Vec<f64> = (0..n).map(|i| left[(i, c)]).collect();
            let atu = op.apply_transpose(&u);
            let res: Vec<f64> = atu.iter().zip(&x).map(|(a, b)| a - s[c] * b).collect();
            forward.push(norm(&op.apply(&x)));
            backward.push(norm(&res));
            sigma.push(s[c]);
            vectors.push(x);
        }
        let worst = sigma
            .iter()
            .zip(&backward)
            .map(|(s, r)| r / s.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        if worst <= opts.tol {
            return Ok(finish(op, sigma, vectors, forward, backward, iterations, opts.seed, start));
        }
        if iterations >= opts.max_iterations {
            return Err(Error::NoConvergence { iterations, residual: worst });
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    op: &DiscreteOperator,
    singular_values: Vec<f64>,
    kernel_vectors: Vec<Vec<f64>>,
    forward_residuals: Vec<f64>,
    backward_residuals: Vec<f64>,
    iterations: usize,
    seed: u64,
    start: Instant,
) -> KernelReport {
    let gap_ratio = singular_values[2] / singular_values[1];
    let mut correlations = Vec::new();
    let mut principal = Vec::new();
    let mut parity = Vec::new();
    if let Some(grid) = op.grid {
        let modes = translation_modes(&grid);
        for v in &kernel_vectors {
            let nv = norm(v);
            correlations.push([0, 1].map(|m| dot(v, &modes[m]).abs() / (nv * norm(&modes[m]))));
            let r = grid.reflect_y(v);
            let even: Vec<f64> = v.iter().zip(&r).map(|(a, b)| a - b).collect();
            let odd: Vec<f64> = v.iter().zip(&r).map(|(a, b)| a + b).collect();
            let (e, o) = (norm(&even) / (2.0 * nv), norm(&odd) / (2.0 * nv));
            parity.push(if e <= o { (Parity::Even, e) } else { (Parity::Odd, o) });
        }
        principal = principal_angles(&kernel_vectors[..2], &modes).unwrap_or_default();
    }
    KernelReport {
        grid: op.grid,
        singular_values,
        kernel_vectors,
        forward_residuals,
        backward_residuals,
        correlations,
        principal_angles: principal,
        parity,
        gap_ratio,
        iterations,
        seed,
        runtime_secs: start.elapsed().as_secs_f64(),
    }
}

/// `θ_small(h, L) = c1·h² + c2/L²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdModel {
    pub c1: f64,
    pub c2: f64,
}

impl ThresholdModel {
    pub fn threshold(&self, h: f64, half_width: f64) -> f64 {
        self.c1 * h * h + self.c2 / (half_width * half_width)
    }

    /// Least-squares fit of `c1 h² + c2/L²` to `σ2` over the rows (both
    /// coefficients kept nonnegative), then scaled so the model sits at twice
    /// the largest observed `σ2`.
    pub fn calibrate(rows: &[StudyRow]) -> Self {
        let pts: Vec<(f64, f64, f64)> = rows
            .iter()
            .map(|r| (r.grid.h * r.grid.h, 1.0 / (r.grid.half_width * r.grid.half_width), r.sigma[1]))
            .collect();
        let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(u, w, s) in &pts {
            a11 += u * u;
            a12 += u * w;
            a22 += w * w;
            b1 += u * s;
            b2 += w * s;
        }
        let det = a11 * a22 - a12 * a12;
        let (mut c1, mut c2) = if det.abs() > 1e-300 {
            ((b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det)
        } else {
            (0.0, f64::NAN)
        };
        if c1 < 0.0 || c2.is_nan() {
            c1 = 0.0;
            c2 = b2 / a22;
        } else if c2 < 0.0 {
            c2 = 0.0;
            c1 = b1 / a11;
        }
        let base = ThresholdModel { c1, c2 };
        let scale = pts
            .iter()
            .zip(rows)
            .map(|(&(_, _, s), r)| s / base.threshold(r.grid.h, r.grid.half_width))
            .fold(0.0, f64::max);
        ThresholdModel { c1: 2.0 * scale * c1, c2: 2.0 * scale * c2 }
    }
}

#[derive(Clone, Debug)]
pub struct StudyRow {
    pub grid: GridSpec,
    pub sigma: [f64; 3],
    pub principal_angles: Vec<f64>,
    pub gap_ratio: f64,
    pub report: KernelReport,
}

#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    pub rows: Vec<StudyRow>,
    pub threshold: ThresholdModel,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudyChecks {
    /// Worst `σ1(fine)/σ1(coarse)` over pairs of rows sharing `L`.
    pub refinement_ratio: Option<f64>,
    /// `σ2` strictly decreasing in `L` among rows sharing `k`.
    pub sigma2_decreasing: Option<bool>,
    /// `(max σ3 - min σ3)/min σ3` over the study.
    pub sigma3_spread: f64,
}

impl StudyChecks {
    pub fn passed(&self) -> bool {
        self.refinement_ratio.is_some_and(|r| r <= 0.5) && self.sigma2_decreasing == Some(true) && self.sigma3_spread < 0.2
    }
}

impl ConvergenceTable {
    pub fn checks(&self) -> StudyChecks {
        let same = |a: f64, b: f64| (a - b).abs() < 0.5 * DELTA;
        let mut refinement_ratio: Option<f64> = None;
        for a in &self.rows {
            for b in &self.rows {
                if same(a.grid.half_width, b.grid.half_width) && a.grid.refine < b.grid.refine {
                    let r = b.sigma[0] / a.sigma[0];
                    refinement_ratio = Some(refinement_ratio.map_or(r, |v| v.max(r)));
                }
            }
        }
        let mut sigma2_decreasing = None;
        let mut by_k: Vec<usize> = self.rows.iter().map(|r| r.grid.refine).collect();
        by_k.sort_unstable();
        by_k.dedup();
        for k in by_k {
            let mut rows: Vec<&StudyRow> = self.rows.iter().filter(|r| r.grid.refine == k).collect();
            if rows.len() < 2 {
                continue;
            }
            rows.sort_by(|a, b| a.grid.half_width.total_cmp(&b.grid.half_width));
            let ok = rows.windows(2).all(|w| w[1].sigma[1] < w[0].sigma[1]);
            sigma2_decreasing = Some(sigma2_decreasing.unwrap_or(true) && ok);
        }
        let s3: Vec<f64> = self.rows.iter().map(|r| r.sigma[2]).collect();
        let (lo, hi) = s3.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        StudyChecks { refinement_ratio, sigma2_decreasing, sigma3_spread: (hi - lo) / lo }
    }

    /// Singular values of `row` below the calibrated threshold.
    pub fn count_below(&self, row: &StudyRow) -> usize {
        let t = self.threshold.threshold(row.grid.h, row.grid.half_width);
        row.report.singular_values.iter().filter(|&&s| s < t).count()
    }
}

fn study_row(grid: GridSpec, opts: &KernelOptions) -> Result<StudyRow> {
    let report = near_kernel(&assemble(grid)?, opts)?;
    let s = &report.singular_values;
    Ok(StudyRow {
        grid,
        sigma: [s[0], s[1], s[2]],
        principal_angles: report.principal_angles.clone(),
        gap_ratio: report.gap_ratio,
        report,
    })
}

/// Runs [`near_kernel`] on each grid (concurrently when `parallel`) and
/// calibrates the threshold model from the results.
pub fn convergence_study(grids: &[GridSpec], opts: &KernelOptions, parallel: bool) -> Result<ConvergenceTable> {
    if grids.len() < 3 {
        return Err(Error::InvalidArgument(format!("a study needs at least 3 grids, got {}", grids.len())));
    }
    let rows: Vec<StudyRow> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = grids.iter().map(|&g| scope.spawn(move || study_row(g, opts))).collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err(Error::Solver("study worker panicked".into()))))
                .collect::<Result<Vec<_>>>()
        })?
    } else {
        grids.iter().map(|&g| study_row(g, opts)).collect::<Result<Vec<_>>>()?
    };
    let threshold = ThresholdModel::calibrate(&rows);
    Ok(ConvergenceTable { rows, threshold })
}
