//! Truncated power series with complex coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use crate::C64;

/// Coefficients `c[k]` of `h^k`, truncated at a fixed length.
#[derive(Clone, Debug, PartialEq)]
pub struct Series(pub Vec<C64>);

impl Series {
    pub fn zeros(len: usize) -> Self {
        Series(vec![C64::new(0.0, 0.0); len])
    }

    pub fn constant(c: C64, len: usize) -> Self {
        let mut s = Series::zeros(len);
        s.0[0] = c;
        s
    }

    /// `a + b·h`.
    pub fn linear(a: C64, b: C64, len: usize) -> Self {
        let mut s = Series::constant(a, len);
        if len > 1 {
            s.0[1] = b;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coef(&self, k: usize) -> C64 {
        self.0.get(k).copied().unwrap_or_default()
    }

    pub fn scale(&self, c: C64) -> Series {
        Series(self.0.iter().map(|a| a * c).collect())
    }

    pub fn add_const(&self, c: C64) -> Series {
        let mut s = self.clone();
        s.0[0] += c;
        s
    }

    pub fn inv(&self) -> Series {
        Series::constant(C64::new(1.0, 0.0), self.len()).div(self)
    }

    pub fn div(&self, d: &Series) -> Series {
        let n = self.len().min(d.len());
        let d0 = d.0[0];
        let mut q = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut acc = self.0[k];
            for j in 1..=k {
                acc -= d.0[j] * q[k - j];
            }
            q[k] = acc / d0;
        }
        Series(q)
    }

    /// `exp` of the series, by the recurrence `e' = a'·e`.
    pub fn exp(&self) -> Series {
        let n = self.len();
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[0] = self.0[0].exp();
        for k in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.0[j] * e[k - j] * j as f64;
            }
            e[k] = acc / k as f64;
        }
        Series(e)
    }

    /// Term-by-term derivative; one coefficient shorter.
    pub fn deriv(&self) -> Series {
        Series(self.0.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect())
    }

    /// Term-by-term antiderivative vanishing at `h = 0`; one coefficient longer.
    pub fn integral(&self) -> Series {
        let mut v = vec![C64::new(0.0, 0.0)];
        v.extend(self.0.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
        Series(v)
    }

    /// Divides by `h^k`, dropping the first `k` coefficients (which the caller
    /// knows to vanish).
    pub fn shift_down(&self, k: usize) -> Series {
        Series(self.0[k.min(self.len())..].to_vec())
    }

    pub fn truncate(&self, len: usize) -> Series {
        Series(self.0[..len.min(self.len())].to_vec())
    }

    pub fn eval(&self, h: C64) -> C64 {
        self.0.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * h + c)
    }
}

fn zip_with(a: &Series, b: &Series, f: impl Fn(C64, C64) -> C64) -> Series {
    let n = a.len().min(b.len());
    Series((0..n).map(|k| f(a.0[k], b.0[k])).collect())
}

impl Add for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        zip_with(self, o, |a, b| a + b)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        zip_with(self, o, |a, b| a - b)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        let n = self.len().min(o.len());
        let mut c = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Series(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_log_roundtrip_via_derivative() {
        let a = Series(vec![C64::new(0.1, 0.2), C64::new(1.0, -0.5), C64::new(0.3, 0.0), C64::new(0.0, 0.0)]);
        let e = a.exp();
        // e' = a' e
        let lhs = e.deriv();
        let rhs = &a.deriv() * &e.truncate(3);
        for k in 0..3 {
            assert!((lhs.0[k] - rhs.0[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Series(vec![C64::new(2.0, 1.0), C64::new(-1.0, 0.5), C64::new(0.25, 0.0)]);
        let b = Series(vec![C64::new(1.0, -1.0), C64::new(0.0, 3.0), C64::new(1.0, 1.0)]);
        let q = (&a * &b).div(&b);
        for k in 0..3 {
            assert!((q.0[k] - a.0[k]).norm() < 1e-14);
        }
    }
}
