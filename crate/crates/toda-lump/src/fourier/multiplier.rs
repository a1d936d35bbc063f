//! Periodic FFT grids in the plane and the Fourier multiplier that produces
//! `η̃` from a traveling kernel candidate `U`.

use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::exact::theta;
use crate::{Error, Result, SeqField, C64, DELTA};

/// `N × N` periodic grid on `[-L, L)²` with spacing `h = δ/k`, so a lattice
/// shift is exactly `k` columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneGrid {
    pub n: usize,
    pub k: usize,
    pub h: f64,
    pub half_width: f64,
}

impl PlaneGrid {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 || k == 0 {
            return Err(Error::Grid(format!("need an even N ≥ 4 and k ≥ 1, got N={n}, k={k}")));
        }
        let h = DELTA / k as f64;
        Ok(PlaneGrid { n, k, h, half_width: 0.5 * n as f64 * h })
    }

    /// Grid with a prescribed spacing; fails unless `δ/h` is an integer.
    pub fn with_spacing(n: usize, h: f64) -> Result<Self> {
        let k = (DELTA / h).round();
        if k < 1.0 || ((DELTA / h) - k).abs() > 1e-9 {
            return Err(Error::Grid(format!("spacing {h} does not divide δ = {DELTA}")));
        }
        PlaneGrid::new(n, k as usize)
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h
    }

    /// Frequency of FFT bin `i`, in the `e^{-2πixξ}` convention.
    pub fn freq(&self, i: usize) -> f64 {
        let n = self.n as i64;
        let m = if (i as i64) < n / 2 { i as i64 } else { i as i64 - n };
        m as f64 / (self.n as f64 * self.h)
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Index of node `(i, j)`, `i` along `x`.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn sample(&self, f: &dyn SeqField, site: i64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for j in 0..self.n {
            for i in 0..self.n {
                out[self.idx(i, j)] = f.value(site, self.coord(i), self.coord(j)).re;
            }
        }
        out
    }

    /// Translates a traveling field by `shift` lattice sites: the value at
    /// `x` becomes the old value at `x + shift·δ`, wrapping periodically.
    pub fn lattice_shift(&self, values: &[f64], shift: i64) -> Vec<f64> {
        let n = self.n as i64;
        let cols = shift * self.k as i64;
        let mut out = vec![0.0; values.len()];
        for j in 0..self.n {
            for i in 0..self.n {
                let src = (i as i64 + cols).rem_euclid(n) as usize;
                out[self.idx(i, j)] = values[self.idx(src, j)];
            }
        }
        out
    }
}

/// Discrete stand-in for the continuous transform on a [`PlaneGrid`]:
/// `F(ξ) ≈ h² Σ f(x) e^{-2πi x·ξ}` at the FFT frequencies.
pub struct GridFT {
    pub grid: PlaneGrid,
    planner: FftPlanner<f64>,
}

impl GridFT {
    pub fn new(grid: PlaneGrid) -> Self {
        GridFT { grid, planner: FftPlanner::new() }
    }

    fn transform_2d(&mut self, data: &mut [C64], forward: bool) {
        let n = self.grid.n;
        let fft = if forward {
            self.planner.plan_fft_forward(n)
        } else {
            self.planner.plan_fft_inverse(n)
        };
        fft.process(data);
        let mut t = transpose(data, n);
        fft.process(&mut t);
        data.copy_from_slice(&transpose(&t, n));
    }

    /// Phase that moves the grid origin from the corner `(-L, -L)` to `0`.
    fn origin_phase(&self, i: usize, j: usize) -> C64 {
        let l = self.grid.half_width;
        C64::from_polar(1.0, 2.0 * PI * l * (self.grid.freq(i) + self.grid.freq(j)))
    }

    pub fn forward(&mut self, values: &[C64]) -> Vec<C64> {
        let mut data = values.to_vec();
        self.transform_2d(&mut data, true);
        let h2 = self.grid.h * self.grid.h;
        let n = self.grid.n;
        for j in 0..n {
            for i in 0..n {
                data[j * n + i] *= self.origin_phase(i, j) * h2;
            }
        }
        data
    }

    pub fn inverse(&mut self, spectrum: &[C64]) -> Vec<C64> {
        let n = self.grid.n;
        let h2 = self.grid.h * self.grid.h;
        let mut data = spectrum.to_vec();
        for j in 0..n {
            for i in 0..n {
                data[j * n + i] /= self.origin_phase(i, j) * h2 * (n * n) as f64;
            }
        }
        self.transform_2d(&mut data, false);
        data
    }

    /// Applies a real multiplier `m(ξ1, ξ2)` to a real grid function.
    pub fn apply(&mut self, values: &[f64], m: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let c: Vec<C64> = values.iter().map(|&v| C64::from(v)).collect();
        let mut s = self.forward(&c);
        let n = self.grid.n;
        for j in 0..n {
            for i in 0..n {
                s[j * n + i] *= m(self.grid.freq(i), self.grid.freq(j));
            }
        }
        self.inverse(&s).into_iter().map(|v| v.re).collect()
    }
}

fn transpose(data: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    for r in 0..n {
        for c in 0..n {
            out[c * n + r] = data[r * n + c];
        }
    }
    out
}

/// `-π²|ξ|² + 2 - 2cos(πξ1/√2)`.
pub fn multiplier_denominator(xi1: f64, xi2: f64) -> f64 {
    -PI * PI * (xi1 * xi1 + xi2 * xi2) + 2.0 - 2.0 * (PI * xi1 / std::f64::consts::SQRT_2).cos()
}

#[derive(Clone, Debug)]
pub struct MultiplierReport {
    pub grid: PlaneGrid,
    /// `η̃0` on the grid.
    pub eta_tilde: Vec<f64>,
    /// `h² Σ f0`.
    pub integral_f: f64,
    /// Max over the central half box of `|(1/4)Δη̃0 - e^{Q(-1)-Q0}(U(-1) - U0)|`.
    pub yi_residual: f64,
    /// Max of `|e^{Q(-1)-Q0}(U(-1) - U0)|` over the same box.
    pub yi_scale: f64,
    /// Max over the central half box of `|(Tθ η)|/θ(-1)²` for `η = θ(-1)η̃0`.
    pub t_theta_residual: f64,
    /// Max of `|∂s∂tη̃0|` over the same box, the leading term of `Tθη/θ²`.
    pub t_theta_scale: f64,
}

/// Solves for `η̃0` with `F(η̃0) = F(f0)/(-π²|ξ|² + 2 - 2cos(πξ1/√2))`, where
/// `v0 = U(-1) - U0` and `f0 = (e^{Q(-1)-Q0} - 1)v0`, the zero mode set to 0.
///
/// `U` is sampled at sites `-1` and `0`; `|h² Σ f0|` must stay below
/// `mean_tol · (2L)²`.
pub fn multiplier_solve_eta_tilde(u: &dyn SeqField, grid: PlaneGrid, mean_tol: f64) -> Result<MultiplierReport> {
    let n = grid.n;
    let u0 = grid.sample(u, 0);
    let um = grid.sample(u, -1);
    let mut a_minus = vec![0.0; grid.len()];
    let mut v = vec![0.0; grid.len()];
    let mut f = vec![0.0; grid.len()];
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (grid.coord(i), grid.coord(j));
            let r = grid.idx(i, j);
            a_minus[r] = theta(-2, x, y) * theta(0, x, y) / theta(-1, x, y).powi(2);
            v[r] = um[r] - u0[r];
            f[r] = (a_minus[r] - 1.0) * v[r];
        }
    }
    let area = (2.0 * grid.half_width).powi(2);
    let integral_f = f.iter().sum::<f64>() * grid.h * grid.h;
    if integral_f.abs() > mean_tol * area {
        return Err(Error::MeanZero { integral: integral_f, tol: mean_tol * area });
    }

    let mut ft = GridFT::new(grid);
    let eta = ft.apply(&f, |a, b| {
        let d = multiplier_denominator(a, b);
        if d == 0.0 {
            0.0
        } else {
            1.0 / d
        }
    });
    let quarter_laplacian = ft.apply(&eta, |a, b| -PI * PI * (a * a + b * b));

    let eta_next = grid.lattice_shift(&eta, 1);
    let eta_prev = grid.lattice_shift(&eta, -1);
    let lo = n / 4;
    let hi = 3 * n / 4;
    let (mut yi_residual, mut yi_scale, mut t_res, mut t_scale) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for j in lo..hi {
        for i in lo..hi {
            let r = grid.idx(i, j);
            let (x, y) = (grid.coord(i), grid.coord(j));
            let rhs = a_minus[r] * v[r];
            yi_residual = yi_residual.max((quarter_laplacian[r] - rhs).abs());
            yi_scale = yi_scale.max(rhs.abs());

            // Tθ(θη̃)/θ² = ∂s∂tη̃ + 2(θθst - |∂sθ|²)/θ²·η̃ - θ₊θ₋/θ²·(η̃₊ + η̃₋) + 2η̃,
            // with θ = θ(-1): the coefficient e^{Q(-1)-Q0} is θ(-2)θ0/θ(-1)².
            let xx = 2.0 * std::f64::consts::SQRT_2 * x - 1.0;
            let th = theta(-1, x, y);
            let ds_sq = 8.0 * xx * xx + 16.0 * y * y;
            let pm = theta(0, x, y) * theta(-2, x, y) / (th * th);
            let t = quarter_laplacian[r] + 2.0 * (6.0 * th - ds_sq) / (th * th) * eta[r]
                - pm * (eta_next[r] + eta_prev[r])
                + 2.0 * eta[r];
            t_res = t_res.max(t.abs());
            t_scale = t_scale.max(quarter_laplacian[r].abs());
        }
    }
    Ok(MultiplierReport {
        grid,
        eta_tilde: eta,
        integral_f,
        yi_residual,
        yi_scale,
        t_theta_residual: t_res,
        t_theta_scale: t_scale,
    })
}
