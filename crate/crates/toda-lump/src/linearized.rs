//! Linearized operators around the tau families and the lump, together with the
//! algebraic identities relating them.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::exact::{exp_lump_difference, log_theta, TauFamily};
use crate::jet::{Jet, SeqField};
use crate::{Residual, SitePoint, C64, LAMBDA, LAMBDA_INV};

/// Default modulus below which ω is treated as a pole.
pub const POLE_TOL: f64 = 1e-6;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorTag {
    TKappa,
    TOmega,
    TTheta,
    F1,
    M1,
    G1,
    N1,
    F0,
    M0,
    G0,
    N0,
    F0Star,
    M0Star,
    F1Star,
    M1Star,
}

/// Which unknown of a linearized Bäcklund system a field stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// perturbation of θ
    Eta,
    /// perturbation of ω
    Phi,
    /// perturbation of κ
    Sigma,
}

impl Role {
    fn name(self) -> &'static str {
        match self {
            Role::Eta => "eta",
            Role::Phi => "phi",
            Role::Sigma => "sigma",
        }
    }
}

impl OperatorTag {
    pub const ALL: [OperatorTag; 15] = [
        OperatorTag::TKappa,
        OperatorTag::TOmega,
        OperatorTag::TTheta,
        OperatorTag::F1,
        OperatorTag::M1,
        OperatorTag::G1,
        OperatorTag::N1,
        OperatorTag::F0,
        OperatorTag::M0,
        OperatorTag::G0,
        OperatorTag::N0,
        OperatorTag::F0Star,
        OperatorTag::M0Star,
        OperatorTag::F1Star,
        OperatorTag::M1Star,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorTag::TKappa => "T_kappa",
            OperatorTag::TOmega => "T_omega",
            OperatorTag::TTheta => "T_theta",
            OperatorTag::F1 => "F1",
            OperatorTag::M1 => "M1",
            OperatorTag::G1 => "G1",
            OperatorTag::N1 => "N1",
            OperatorTag::F0 => "F0",
            OperatorTag::M0 => "M0",
            OperatorTag::G0 => "G0",
            OperatorTag::N0 => "N0",
            OperatorTag::F0Star => "F0star",
            OperatorTag::M0Star => "M0star",
            OperatorTag::F1Star => "F1star",
            OperatorTag::M1Star => "M1star",
        }
    }

    /// The role the operand of this operator must carry.
    pub fn input_role(self) -> Role {
        use OperatorTag::*;
        match self {
            TKappa | TOmega | TTheta | G1 | N1 => Role::Eta,
            F1 | M1 | G0 | N0 | F1Star | M1Star => Role::Phi,
            F0 | M0 | F0Star | M0Star => Role::Sigma,
        }
    }
}

/// A field tagged with the role it plays.
#[derive(Clone, Copy)]
pub struct RoleField<'a> {
    pub role: Role,
    pub field: &'a dyn SeqField,
}

impl<'a> RoleField<'a> {
    pub fn eta(field: &'a dyn SeqField) -> Self {
        RoleField { role: Role::Eta, field }
    }

    pub fn phi(field: &'a dyn SeqField) -> Self {
        RoleField { role: Role::Phi, field }
    }

    pub fn sigma(field: &'a dyn SeqField) -> Self {
        RoleField { role: Role::Sigma, field }
    }
}

fn check_role(tag: OperatorTag, input: &RoleField) -> Result<()> {
    let expected = tag.input_role();
    if input.role != expected {
        return Err(Error::RoleMismatch { op: tag.name(), expected: expected.name(), got: input.role.name() });
    }
    Ok(())
}

fn wrong_family(tag: OperatorTag, family: &'static str) -> Error {
    Error::InvalidArgument(format!("{} is not a {family} operator", tag.name()))
}

/// Jets of a field at sites n-1, n, n+1.
struct Stencil {
    m: Jet,
    c: Jet,
    p: Jet,
}

fn stencil(f: &dyn SeqField, p: SitePoint) -> Stencil {
    Stencil { m: f.jet(p.n - 1, p.x, p.y), c: f.jet(p.n, p.x, p.y), p: f.jet(p.n + 1, p.x, p.y) }
}

/// `(T_τ η)_n = ∂s∂tη τ - ∂sη ∂tτ - ∂tη ∂sτ + η ∂s∂tτ - (η_{n+1}τ_{n-1} + τ_{n+1}η_{n-1} - 2τ_nη_n)`.
pub fn apply_t(family: TauFamily, eta: &dyn SeqField, p: SitePoint) -> C64 {
    let e = stencil(eta, p);
    let t = stencil(&family, p);
    e.c.dst() * t.c.v - e.c.ds() * t.c.dt() - e.c.dt() * t.c.ds() + e.c.v * t.c.dst()
        - (e.p.v * t.m.v + t.p.v * e.m.v - t.c.v * e.c.v * 2.0)
}

/// `(1/4)ΔU_n - e^{Q_{n-1}-Q_n}(U_{n-1} - U_n) + e^{Q_n-Q_{n+1}}(U_n - U_{n+1})`.
pub fn linearized_toda_residual(u: &dyn SeqField, p: SitePoint) -> Residual {
    let s = stencil(u, p);
    let am = exp_lump_difference(p.n, p.x, p.y);
    let ap = exp_lump_difference(p.n + 1, p.x, p.y);
    let value = s.c.laplacian() * 0.25 - (s.m.v - s.c.v) * am + (s.c.v - s.p.v) * ap;
    Residual::new(value, p)
}

/// Direction of a translation mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

/// `∂xQ` or `∂yQ` in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelField(pub Direction);

pub fn kernel_field(direction: Direction) -> KernelField {
    KernelField(direction)
}

impl SeqField for KernelField {
    fn jet(&self, n: i64, x: f64, y: f64) -> Jet {
        let (a, b) = (log_theta(n - 1, x, y), log_theta(n, x, y));
        match self.0 {
            Direction::X => Jet::real(
                a.gx - b.gx,
                a.gxx - b.gxx,
                a.gxy - b.gxy,
                a.gxxx - b.gxxx,
                a.gxxy - b.gxxy,
                a.gxyy - b.gxyy,
            ),
            Direction::Y => Jet::real(
                a.gy - b.gy,
                a.gxy - b.gxy,
                a.gyy - b.gyy,
                a.gxxy - b.gxxy,
                a.gxyy - b.gxyy,
                a.gyyy - b.gyyy,
            ),
        }
    }
}

/// Operators of the linearized transformation between ω and θ.
pub fn apply_family1(tag: OperatorTag, input: RoleField, p: SitePoint) -> Result<C64> {
    if !matches!(tag, OperatorTag::F1 | OperatorTag::M1 | OperatorTag::G1 | OperatorTag::N1) {
        return Err(wrong_family(tag, "theta-side"));
    }
    check_role(tag, &input)?;
    let th = stencil(&TauFamily::Theta, p);
    let f = stencil(input.field, p);
    let (t0, tm) = (th.c.v, th.m.v);
    Ok(match tag {
        OperatorTag::F1 => {
            f.c.dx - (th.c.ds() / t0 + th.m.dt() / tm + 2.0) * f.c.v - LAMBDA_INV * (tm / t0) * f.p.v
                + LAMBDA * (t0 / tm) * f.m.v
        }
        OperatorTag::M1 => {
            -I * f.c.dy - (th.c.ds() / t0 - th.m.dt() / tm - 2.0 * SQRT_2) * f.c.v
                - LAMBDA_INV * f.p.v * (tm / t0)
                - LAMBDA * f.m.v * (t0 / tm)
        }
        _ => {
            // the η_{n-1} coefficient of the θ_n part carries λ⁻¹, matching the
            // first linearized equation
            let w = stencil(&TauFamily::Omega, p);
            let ra = -w.c.ds() * f.c.v + w.c.v * f.c.ds() + LAMBDA_INV * (w.p.v * f.m.v - w.c.v * f.c.v);
            let rb = -w.c.dt() * f.m.v + w.c.v * f.m.dt() - LAMBDA * (w.m.v * f.c.v - w.c.v * f.m.v);
            if tag == OperatorTag::G1 {
                ra / t0 + rb / tm
            } else {
                ra / t0 - rb / tm
            }
        }
    })
}

fn guard_pole(w: C64, n: i64, p: SitePoint, tol: f64) -> Result<()> {
    if w.norm() < tol {
        return Err(Error::NearPole { n, x: p.x, y: p.y, modulus: w.norm(), tol });
    }
    Ok(())
}

/// Operators of the linearized transformation between κ and ω. These divide
/// by ω_n and ω_{n-1}.
pub fn apply_family0(tag: OperatorTag, input: RoleField, p: SitePoint, tol: f64) -> Result<C64> {
    if !matches!(tag, OperatorTag::F0 | OperatorTag::M0 | OperatorTag::G0 | OperatorTag::N0) {
        return Err(wrong_family(tag, "omega-side"));
    }
    check_role(tag, &input)?;
    let w = stencil(&TauFamily::Omega, p);
    guard_pole(w.c.v, p.n, p, tol)?;
    guard_pole(w.m.v, p.n - 1, p, tol)?;
    let f = stencil(input.field, p);
    let fwd = LAMBDA * (w.m.v / w.c.v) * (f.p.v - f.c.v);
    let bwd = LAMBDA_INV * (w.c.v / w.m.v) * (f.c.v - f.m.v);
    Ok(match tag {
        OperatorTag::F0 => f.c.dx - fwd - bwd,
        OperatorTag::M0 => -I * f.c.dy - fwd + bwd,
        _ => {
            let a = (f.c.ds() + LAMBDA * (f.m.v - f.c.v)) / w.c.v;
            let b = (f.m.dt() - LAMBDA_INV * (f.c.v - f.m.v)) / w.m.v;
            if tag == OperatorTag::G0 {
                a + b
            } else {
                a - b
            }
        }
    })
}

/// Starred operators; these involve no divisions.
pub fn apply_starred(tag: OperatorTag, input: RoleField, p: SitePoint) -> Result<C64> {
    check_role(tag, &input)?;
    let f = stencil(input.field, p);
    Ok(match tag {
        OperatorTag::F0Star | OperatorTag::M0Star => {
            let w = stencil(&TauFamily::Omega, p);
            if tag == OperatorTag::F0Star {
                f.c.ds() * w.c.v - f.c.v * w.c.ds() - LAMBDA * (f.p.v * w.m.v - f.c.v * w.c.v)
            } else {
                f.p.dt() * w.c.v - f.p.v * w.c.dt() + LAMBDA_INV * (f.c.v * w.p.v - f.p.v * w.c.v)
            }
        }
        OperatorTag::F1Star | OperatorTag::M1Star => {
            let th = stencil(&TauFamily::Theta, p);
            if tag == OperatorTag::F1Star {
                f.c.ds() * th.c.v - f.c.v * th.c.ds() - LAMBDA_INV * (f.p.v * th.m.v - f.c.v * th.c.v)
            } else {
                f.p.dt() * th.c.v - f.p.v * th.c.dt() + LAMBDA * (f.c.v * th.p.v - f.p.v * th.c.v)
            }
        }
        _ => return Err(wrong_family(tag, "starred")),
    })
}

/// Residuals of the sum and difference of the linearized κ–ω system, written
/// with the starred operators.
pub fn identity_l3_residual(sigma: &dyn SeqField, phi: &dyn SeqField, p: SitePoint) -> (Residual, Residual) {
    let f0 = apply_starred(OperatorTag::F0Star, RoleField::sigma(sigma), p).expect("role");
    let m0 = apply_starred(OperatorTag::M0Star, RoleField::sigma(sigma), p).expect("role");
    let f = stencil(phi, p);
    let shifts_minus = LAMBDA * f.m.v - LAMBDA_INV * f.p.v;
    let shifts_plus = LAMBDA * f.m.v + LAMBDA_INV * f.p.v;
    let y1 = f.c.dx - 2.0 * f.c.v + shifts_minus - (f0 + m0);
    let y2 = -I * f.c.dy - 2.0 * SQRT_2 * f.c.v + shifts_plus - (f0 - m0);
    (Residual::new(y1, p), Residual::new(y2, p))
}

/// Residuals of the two identities expressing `∂xη`, `∂yη` through
/// `F1*φ/ω_n` and `M1*φ/ω_{n+1}`.
pub fn identity_l4_residual(phi: &dyn SeqField, eta: &dyn SeqField, p: SitePoint, tol: f64) -> Result<(Residual, Residual)> {
    let w = stencil(&TauFamily::Omega, p);
    guard_pole(w.c.v, p.n, p, tol)?;
    guard_pole(w.p.v, p.n + 1, p, tol)?;
    let f1 = apply_starred(OperatorTag::F1Star, RoleField::phi(phi), p)?;
    let m1 = apply_starred(OperatorTag::M1Star, RoleField::phi(phi), p)?;
    let e = stencil(eta, p);
    let (w0, w1) = (w.c.v, w.p.v);
    let back = LAMBDA_INV * (w1 / w0) * e.m.v;
    let fwd = LAMBDA * (w0 / w1) * e.p.v;
    let lx = e.c.dx + (2.0 - LAMBDA / w0 - LAMBDA_INV / w1) * e.c.v + back - fwd;
    let ly = -I * e.c.dy + (-LAMBDA / w0 + LAMBDA_INV / w1 - 2.0 * SQRT_2) * e.c.v + back + fwd;
    Ok((Residual::new(lx - (f1 / w0 + m1 / w1), p), Residual::new(ly - (f1 / w0 - m1 / w1), p)))
}

fn xx(n: i64, x: f64) -> Jet {
    Jet::x(x) * (2.0 * SQRT_2) + Jet::constant((n as f64).into())
}

/// A pair `(σ, φ)` with `F0σ = G0φ` and `M0σ = N0φ`.
pub struct M1Pair {
    pub name: &'static str,
    pub sigma: Box<dyn SeqField>,
    pub phi: Box<dyn SeqField>,
}

/// Explicit polynomial solutions of the linearized κ–ω system:
/// `σ = 2√2x+n` with `φ = (2√2x+n)² + 2iy(2√2x+n) + (1-√2)iy`,
/// `σ = y` with `φ = y·ω_n`, and `σ = 0` with `φ = ω_n`.
pub fn lemma_m1_pairs() -> Vec<M1Pair> {
    let quad = |n: i64, x: f64, y: f64| {
        let a = xx(n, x);
        let yi = Jet::y(y) * I;
        a * a + a * yi * 2.0 + yi * (1.0 - SQRT_2)
    };
    let y_omega = |n: i64, x: f64, y: f64| Jet::y(y) * TauFamily::Omega.jet(n, x, y);
    vec![
        M1Pair { name: "linear", sigma: Box::new(|n, x, _y| xx(n, x)), phi: Box::new(quad) },
        M1Pair { name: "y", sigma: Box::new(|_n, _x, y| Jet::y(y)), phi: Box::new(y_omega) },
        M1Pair { name: "omega", sigma: Box::new(crate::jet::Zero), phi: Box::new(TauFamily::Omega) },
    ]
}

/// `(F0σ - G0φ, M0σ - N0φ)`.
pub fn lemma_m1_residual(pair: &M1Pair, p: SitePoint, tol: f64) -> Result<(Residual, Residual)> {
    let s = RoleField::sigma(pair.sigma.as_ref());
    let f = RoleField::phi(pair.phi.as_ref());
    let a = apply_family0(OperatorTag::F0, s, p, tol)? - apply_family0(OperatorTag::G0, f, p, tol)?;
    let b = apply_family0(OperatorTag::M0, s, p, tol)? - apply_family0(OperatorTag::N0, f, p, tol)?;
    Ok((Residual::new(a, p), Residual::new(b, p)))
}

/// A pair `(φ, η)` solving the linearized ω–θ system.
pub struct L4Pair {
    pub name: &'static str,
    pub phi: Box<dyn SeqField>,
    pub eta: Box<dyn SeqField>,
}

/// Translations of the ω–θ pair and the stated kernel element
/// `η = 2√2x + n + 2iy` with φ = 0.
pub fn lemma_l4_pairs() -> Vec<L4Pair> {
    let dtheta = |dir: Direction| {
        move |n: i64, x: f64, y: f64| {
            let j = TauFamily::Theta.jet(n, x, y);
            match dir {
                Direction::X => Jet { v: j.dx, dx: j.dxx, dy: j.dxy, ..Jet::default() },
                Direction::Y => Jet { v: j.dy, dx: j.dxy, dy: j.dyy, ..Jet::default() },
            }
        }
    };
    let constant = |c: C64| move |_n: i64, _x: f64, _y: f64| Jet::constant(c);
    vec![
        L4Pair {
            name: "x-translation",
            phi: Box::new(constant((2.0 * SQRT_2).into())),
            eta: Box::new(dtheta(Direction::X)),
        },
        L4Pair { name: "y-translation", phi: Box::new(constant(2.0 * I)), eta: Box::new(dtheta(Direction::Y)) },
        L4Pair {
            name: "kernel",
            phi: Box::new(crate::jet::Zero),
            eta: Box::new(|n: i64, x: f64, y: f64| xx(n, x) + Jet::y(y) * (2.0 * I)),
        },
    ]
}
