//! Frequency-side analysis in `x`, with the kernel `e^{-2πixξ}`.

use std::fmt;
use std::sync::Arc;

use crate::C64;

pub mod identities;
pub mod multiplier;
pub mod ode;
pub mod params;
pub mod quad;
pub mod series;
pub mod symbols;
pub mod transforms;

pub use identities::{verify_lemma_h, verify_prop_f1, SpectralResidual};
pub use multiplier::{multiplier_denominator, multiplier_solve_eta_tilde, GridFT, MultiplierReport, PlaneGrid};
pub use ode::{ode_fundamental_g, rho, variation_of_parameters, Anchor, FundamentalGrid, FundamentalSystem, VopGrid};
pub use params::SymbolParams;
pub use symbols::{j_zeros, symbol_values, symbols, SymbolValues, Symbols};
pub use transforms::{ft_rational, ft_simple_pole, ft_theta_ratios, DeltaPlus, PoleBranch, ThetaRatioTransforms};

pub type Evaluator = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// A complex function of the frequency, with the real points where it (or a
/// ratio built from it) is singular and, optionally, a compact support.
#[derive(Clone)]
pub struct FreqFunction {
    evaluator: Evaluator,
    pub singular_set: Vec<f64>,
    pub support: Option<(f64, f64)>,
}

impl FreqFunction {
    pub fn new(evaluator: Evaluator, mut singular_set: Vec<f64>) -> Self {
        singular_set.sort_by(f64::total_cmp);
        FreqFunction { evaluator, singular_set, support: None }
    }

    pub fn from_fn(f: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        FreqFunction::new(Arc::new(f), Vec::new())
    }

    pub fn zero() -> Self {
        FreqFunction::from_fn(|_| C64::new(0.0, 0.0)).with_support(0.0, 0.0)
    }

    /// The smooth bump `exp(-1/(1-u²))`, `u` the affine map of `[lo, hi]` onto
    /// `[-1, 1]`, scaled by `amplitude`.
    pub fn bump(lo: f64, hi: f64, amplitude: C64) -> Self {
        FreqFunction::from_fn(move |xi| {
            if xi <= lo || xi >= hi {
                return C64::new(0.0, 0.0);
            }
            let u = (2.0 * xi - lo - hi) / (hi - lo);
            amplitude * (-1.0 / (1.0 - u * u)).exp()
        })
        .with_support(lo, hi)
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    pub fn eval(&self, xi: f64) -> C64 {
        (self.evaluator)(xi)
    }

    pub fn evaluator(&self) -> Evaluator {
        self.evaluator.clone()
    }
}

impl fmt::Debug for FreqFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FreqFunction")
            .field("singular_set", &self.singular_set)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

/// `u(ξ)` with `u(0) = 1`.
pub(crate) fn heaviside(xi: f64) -> f64 {
    if xi >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// `e^{2πiaξ}` for complex `a`.
pub(crate) fn cis(a: C64, xi: f64) -> C64 {
    (C64::new(0.0, 2.0 * std::f64::consts::PI) * a * xi).exp()
}
