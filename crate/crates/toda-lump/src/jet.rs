//! Second-order jets of complex fields on the plane.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::Num;
use twofloat::TwoFloat;

use crate::C64;

/// Real scalar a jet is computed in: `f64`, or the double-double [`TwoFloat`]
/// for polynomial families whose identities cancel large terms.
pub trait Scalar: Copy + Num + Neg<Output = Self> + From<f64> + Into<f64> + Default + Debug + Send + Sync {}

impl<T> Scalar for T where T: Copy + Num + Neg<Output = T> + From<f64> + Into<f64> + Default + Debug + Send + Sync {}

/// Value, gradient and Hessian of a complex function of `(x, y)` at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet<S = f64> {
    pub v: Complex<S>,
    pub dx: Complex<S>,
    pub dy: Complex<S>,
    pub dxx: Complex<S>,
    pub dxy: Complex<S>,
    pub dyy: Complex<S>,
}

/// Jet in double-double precision.
pub type JetDd = Jet<TwoFloat>;

fn k<S: Scalar>(c: f64) -> S {
    S::from(c)
}

/// Rounds a complex value of any precision to `f64`.
pub fn to_c64<S: Scalar>(z: Complex<S>) -> C64 {
    C64::new(z.re.into(), z.im.into())
}

impl Jet {
    pub fn constant(c: C64) -> Self {
        Jet { v: c, ..Jet::default() }
    }

    pub fn real(v: f64, dx: f64, dy: f64, dxx: f64, dxy: f64, dyy: f64) -> Self {
        Jet::real_in(v, dx, dy, dxx, dxy, dyy)
    }

    /// The coordinate function `x`.
    pub fn x(x: f64) -> Self {
        Jet::real(x, 1.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// The coordinate function `y`.
    pub fn y(y: f64) -> Self {
        Jet::real(y, 0.0, 1.0, 0.0, 0.0, 0.0)
    }
}

impl<S: Scalar> Jet<S> {
    pub fn real_in(v: S, dx: S, dy: S, dxx: S, dxy: S, dyy: S) -> Self {
        let r = |a: S| Complex::new(a, S::zero());
        Jet { v: r(v), dx: r(dx), dy: r(dy), dxx: r(dxx), dxy: r(dxy), dyy: r(dyy) }
    }

    pub fn ds(&self) -> Complex<S> {
        (self.dx - Complex::<S>::i() * self.dy) * k::<S>(0.5)
    }

    pub fn dt(&self) -> Complex<S> {
        (self.dx + Complex::<S>::i() * self.dy) * k::<S>(0.5)
    }

    pub fn dss(&self) -> Complex<S> {
        (self.dxx - Complex::<S>::i() * self.dxy * k::<S>(2.0) - self.dyy) * k::<S>(0.25)
    }

    pub fn dtt(&self) -> Complex<S> {
        (self.dxx + Complex::<S>::i() * self.dxy * k::<S>(2.0) - self.dyy) * k::<S>(0.25)
    }

    pub fn dst(&self) -> Complex<S> {
        (self.dxx + self.dyy) * k::<S>(0.25)
    }

    pub fn laplacian(&self) -> Complex<S> {
        self.dxx + self.dyy
    }

    pub fn scale(self, c: Complex<S>) -> Self {
        Jet {
            v: self.v * c,
            dx: self.dx * c,
            dy: self.dy * c,
            dxx: self.dxx * c,
            dxy: self.dxy * c,
            dyy: self.dyy * c,
        }
    }

    /// The same jet rounded to `f64`.
    pub fn to_f64(&self) -> Jet {
        Jet {
            v: to_c64(self.v),
            dx: to_c64(self.dx),
            dy: to_c64(self.dy),
            dxx: to_c64(self.dxx),
            dxy: to_c64(self.dxy),
            dyy: to_c64(self.dyy),
        }
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Jet<S>;
    fn add(self, o: Jet<S>) -> Jet<S> {
        Jet {
            v: self.v + o.v,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
            dxx: self.dxx + o.dxx,
            dxy: self.dxy + o.dxy,
            dyy: self.dyy + o.dyy,
        }
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Jet<S>;
    fn sub(self, o: Jet<S>) -> Jet<S> {
        self + (-o)
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        self.scale(Complex::new(-S::one(), S::zero()))
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, o: Jet<S>) -> Jet<S> {
        let two = k::<S>(2.0);
        Jet {
            v: self.v * o.v,
            dx: self.dx * o.v + self.v * o.dx,
            dy: self.dy * o.v + self.v * o.dy,
            dxx: self.dxx * o.v + self.dx * o.dx * two + self.v * o.dxx,
            dxy: self.dxy * o.v + self.dx * o.dy + self.dy * o.dx + self.v * o.dxy,
            dyy: self.dyy * o.v + self.dy * o.dy * two + self.v * o.dyy,
        }
    }
}

impl Mul<C64> for Jet {
    type Output = Jet;
    fn mul(self, c: C64) -> Jet {
        self.scale(c)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c.into())
    }
}

/// A ℤ-indexed family of plane functions, evaluated through its second-order jet.
pub trait SeqField: Sync {
    fn jet(&self, n: i64, x: f64, y: f64) -> Jet;

    fn value(&self, n: i64, x: f64, y: f64) -> C64 {
        self.jet(n, x, y).v
    }

    /// The jet in double-double precision, for families that can supply it
    /// without rounding their coefficients to `f64` first.
    fn jet_dd(&self, _n: i64, _x: f64, _y: f64) -> Option<JetDd> {
        None
    }
}

impl<F> SeqField for F
where
    F: Fn(i64, f64, f64) -> Jet + Sync,
{
    fn jet(&self, n: i64, x: f64, y: f64) -> Jet {
        self(n, x, y)
    }
}

/// `a·f + b·g`, evaluated pointwise.
pub struct Combination<'a> {
    pub terms: Vec<(C64, &'a dyn SeqField)>,
}

impl SeqField for Combination<'_> {
    fn jet(&self, n: i64, x: f64, y: f64) -> Jet {
        self.terms
            .iter()
            .fold(Jet::default(), |acc, (c, f)| acc + f.jet(n, x, y).scale(*c))
    }
}

/// The zero family.
pub struct Zero;

impl SeqField for Zero {
    fn jet(&self, _n: i64, _x: f64, _y: f64) -> Jet {
        Jet::default()
    }
}
