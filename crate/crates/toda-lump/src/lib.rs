//! Traveling lump of the 2+1 Toda lattice: closed-form tau functions, the
//! linearized operator families around them, their Fourier-side symbols and a
//! sparse discretization used to probe the kernel of the linearized equation.
//!
//! Conventions used throughout:
//!
//! - complex coordinates `s = x + iy`, `t = x - iy` with
//!   `∂s = (∂x - i∂y)/2` and `∂t = (∂x + i∂y)/2`, so `Δ = 4∂s∂t`;
//! - the lattice shift is `δ = 1/(2√2)`: every traveling family obeys
//!   `F[n+1](x, y) = F[n](x + δ, y)`;
//! - Fourier transforms in `x` use the kernel `e^{-2πixξ}`.

pub mod error;
pub mod exact;
pub mod fourier;
pub mod jet;
pub mod kernel;
pub mod linearized;
pub mod sampling;

pub use error::{Error, Result};
pub use jet::{Jet, SeqField};
pub use num_complex::Complex64 as C64;

/// `1/(2√2)`, the x-offset between neighbouring lattice sites.
pub const DELTA: f64 = std::f64::consts::FRAC_1_SQRT_2 / 2.0;

/// Version of this library.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The Bäcklund parameter `√2 + 1`.
pub const LAMBDA: f64 = std::f64::consts::SQRT_2 + 1.0;

/// `1/λ = √2 - 1`.
pub const LAMBDA_INV: f64 = std::f64::consts::SQRT_2 - 1.0;

/// A lattice site together with a point of the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SitePoint {
    pub n: i64,
    pub x: f64,
    pub y: f64,
}

impl SitePoint {
    pub fn new(n: i64, x: f64, y: f64) -> Self {
        SitePoint { n, x, y }
    }

    pub fn shift(self, dn: i64) -> Self {
        SitePoint { n: self.n + dn, ..self }
    }

    pub fn s(&self) -> C64 {
        C64::new(self.x, self.y)
    }

    pub fn t(&self) -> C64 {
        C64::new(self.x, -self.y)
    }
}

/// Outcome of evaluating an identity that should vanish.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub value: C64,
    pub magnitude: f64,
    pub at: SitePoint,
}

impl Residual {
    pub fn new(value: C64, at: SitePoint) -> Self {
        Residual { value, magnitude: value.norm(), at }
    }

    pub fn zero(at: SitePoint) -> Self {
        Residual::new(C64::new(0.0, 0.0), at)
    }
}
