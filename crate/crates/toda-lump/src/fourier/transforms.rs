//! Closed-form transforms of simple poles, of the rational functions built
//! from them and of the logarithmic derivatives and ratios of `θ`.

use std::f64::consts::PI;
use std::sync::Arc;

use super::params::SymbolParams;
use super::{cis, heaviside, FreqFunction};
use crate::{Error, Result, C64};

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleBranch {
    /// `1/(x + a1 - a2 i)`.
    Lower,
    /// `1/(x + a1 + a2 i)`.
    Upper,
    /// `p.v. 1/(x + a1)`.
    Principal,
}

pub fn ft_simple_pole(a1: f64, a2: f64, branch: PoleBranch) -> Result<FreqFunction> {
    if branch != PoleBranch::Principal && a2 <= 0.0 {
        return Err(Error::InvalidArgument(format!("pole offset a2 = {a2} must be positive")));
    }
    let f: FreqFunction = match branch {
        PoleBranch::Lower => {
            let a = C64::new(a1, -a2);
            FreqFunction::from_fn(move |xi| TWO_PI_I * cis(a, xi) * heaviside(-xi))
        }
        PoleBranch::Upper => {
            let a = C64::new(a1, a2);
            FreqFunction::from_fn(move |xi| -TWO_PI_I * cis(a, xi) * heaviside(xi))
        }
        PoleBranch::Principal => FreqFunction::from_fn(move |xi| {
            let sgn = if xi > 0.0 {
                1.0
            } else if xi < 0.0 {
                -1.0
            } else {
                0.0
            };
            C64::new(0.0, -PI) * cis(a1.into(), xi) * sgn
        }),
    };
    Ok(FreqFunction::new(f.evaluator(), vec![0.0]))
}

/// `ξ ↦ w₊e^{2πi a₊ξ}u(ξ) + w₋e^{2πi a₋ξ}u(-ξ)`.
fn two_sided(w_plus: C64, a_plus: C64, w_minus: C64, a_minus: C64) -> FreqFunction {
    FreqFunction::new(
        Arc::new(move |xi| {
            w_plus * cis(a_plus, xi) * heaviside(xi) + w_minus * cis(a_minus, xi) * heaviside(-xi)
        }),
        vec![0.0],
    )
}

/// Transform of `((x + a1) + a3)/((x + a1)² + a2²)`.
pub fn ft_rational(a1: f64, a2: f64, a3: C64) -> Result<FreqFunction> {
    if a2 <= 0.0 {
        return Err(Error::InvalidArgument(format!("a2 = {a2} must be positive")));
    }
    let ratio = a3 / C64::new(0.0, 2.0 * a2);
    Ok(two_sided(
        (C64::from(0.5) - ratio) * -TWO_PI_I,
        C64::new(a1, a2),
        (C64::from(0.5) + ratio) * TWO_PI_I,
        C64::new(a1, -a2),
    ))
}

/// `delta·δ + smooth`.
#[derive(Clone, Debug)]
pub struct DeltaPlus {
    pub delta: C64,
    pub smooth: FreqFunction,
}

/// Transforms in `x` of `∂sθn/θn`, `∂tθ(n-1)/θ(n-1)`, `θ(n-1)/θn` and
/// `θn/θ(n-1)`.
#[derive(Clone, Debug)]
pub struct ThetaRatioTransforms {
    pub ds_log_theta: FreqFunction,
    pub dt_log_theta_prev: FreqFunction,
    pub prev_over_current: DeltaPlus,
    pub current_over_prev: DeltaPlus,
}

pub fn ft_theta_ratios(n: i64, y: f64) -> ThetaRatioTransforms {
    let p = SymbolParams::new(n, y);
    let lam = p.lambda;
    let up = C64::new(p.alpha, p.beta);
    let down = C64::new(p.alpha, -p.beta);
    let up1 = C64::new(p.alpha1, p.beta);
    let down1 = C64::new(p.alpha1, -p.beta);
    ThetaRatioTransforms {
        ds_log_theta: two_sided(-TWO_PI_I * p.a1, up, -TWO_PI_I * p.a3, down),
        dt_log_theta_prev: two_sided(TWO_PI_I * p.a3, up1, TWO_PI_I * p.a1, down1),
        prev_over_current: DeltaPlus {
            delta: C64::new(1.0, 0.0),
            smooth: two_sided(TWO_PI_I * p.a4 / lam, up, TWO_PI_I * p.a2 / lam, down),
        },
        current_over_prev: DeltaPlus {
            delta: C64::new(1.0, 0.0),
            smooth: two_sided(TWO_PI_I * p.a2 / lam, up1, TWO_PI_I * p.a4 / lam, down1),
        },
    }
}
