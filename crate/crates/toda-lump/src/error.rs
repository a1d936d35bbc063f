use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("|ω| = {modulus:.3e} below pole tolerance {tol:.1e} at n={n}, x={x}, y={y}")]
    NearPole { n: i64, x: f64, y: f64, modulus: f64, tol: f64 },
    #[error("operator {op} expects a {expected} field, got {got}")]
    RoleMismatch { op: &'static str, expected: &'static str, got: &'static str },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("grid: {0}")]
    Grid(String),
    #[error("mean-zero check failed: |∬f| = {integral:.3e} exceeds {tol:.1e}")]
    MeanZero { integral: f64, tol: f64 },
    #[error("quadrature did not converge on [{a}, {b}] (error estimate {estimate:.3e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },
    #[error("integration stalled at ξ = {at} (step {step:.3e})")]
    StepUnderflow { at: f64, step: f64 },
    #[error("solver: {0}")]
    Solver(String),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
