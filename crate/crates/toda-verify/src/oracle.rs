//! Brute-force references the closed forms are compared against.

use std::f64::consts::PI;

use toda_lump::C64;

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Composite five-point Gauss–Legendre rule on `panels` equal panels.
pub fn gauss_legendre(f: impl Fn(f64) -> C64, a: f64, b: f64, panels: usize) -> C64 {
    let w = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..panels {
        let c = a + (k as f64 + 0.5) * w;
        for (x, wt) in GL5_X.iter().zip(GL5_W) {
            acc += f(c + 0.5 * w * x) * wt;
        }
    }
    acc * (0.5 * w)
}

/// `∫ f(x) e^{-2πixξ} dx` for `f` decaying like `1/x`, windowed to `[-r, r]`
/// with three integration-by-parts terms for each tail. Features of `f` must
/// sit in `[-10, 10]`, where the panels are finer.
pub fn fourier_transform(f: &dyn Fn(f64) -> C64, xi: f64, r: f64) -> C64 {
    let k = 2.0 * PI * xi;
    let kernel = |x: f64| f(x) * C64::from_polar(1.0, -k * x);
    let core = 10.0_f64.min(r);
    let outer = ((r - core) * (4.0 * xi.abs() + 2.0)).ceil() as usize;
    let mut body = gauss_legendre(kernel, -core, core, 2000);
    if outer > 0 {
        body += gauss_legendre(kernel, -r, -core, outer) + gauss_legendre(kernel, core, r, outer);
    }
    let h = 1e-2;
    let d = |x: f64| [f(x), (f(x + h) - f(x - h)) / (2.0 * h), (f(x + h) - f(x) * 2.0 + f(x - h)) / (h * h)];
    let ik = C64::new(0.0, k);
    let tail = |x: f64| {
        let ds = d(x);
        ds[0] / ik + ds[1] / (ik * ik) + ds[2] / (ik * ik * ik)
    };
    body + C64::from_polar(1.0, -k * r) * tail(r) - C64::from_polar(1.0, k * r) * tail(-r)
}

/// Five-point central difference of samples at `x-2h, …, x+2h`.
pub fn d5(v: [C64; 5], h: f64) -> C64 {
    (v[0] - v[1] * 8.0 + v[3] * 8.0 - v[4]) / (12.0 * h)
}

/// `lim_{x→0} f(x)` by Richardson extrapolation of the even part of `f` at
/// `x = 1e-3` and `2e-3`.
pub fn limit0(f: impl Fn(f64) -> C64) -> C64 {
    let even = |x: f64| (f(x) + f(-x)) / 2.0;
    (even(1e-3) * 4.0 - even(2e-3)) / 3.0
}
