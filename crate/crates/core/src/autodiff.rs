//! Forward-mode automatic differentiation.
//!
//! [`Dual`] carries one tangent and yields exact first derivatives.
//! [`HyperDual`] carries two independent infinitesimals `e1`, `e2` with
//! `e1^2 = e2^2 = 0` and `e1 e2 != 0`; seeding `e1` on coordinate `a` and
//! `e2` on coordinate `b` makes the `e12` part equal `d2f / (da db)` to
//! machine precision, with no step-size error.

use std::ops::{Add, Mul, Neg, Sub};

/// Arithmetic needed to evaluate polynomial and quadratic costs.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;

    fn scale(self, k: f64) -> Self {
        self * Self::constant(k)
    }

    /// Integer power by repeated squaring; `x^0 = 1` for every `x`.
    fn pow_u32(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = Self::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }
}

impl Scalar for f64 {
    #[inline]
    fn constant(v: f64) -> Self {
        v
    }

    #[inline]
    fn scale(self, k: f64) -> Self {
        self * k
    }

    #[inline]
    fn pow_u32(self, e: u32) -> Self {
        self.powi(e as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub val: f64,
    pub dot: f64,
}

impl Dual {
    #[inline]
    pub fn new(val: f64, dot: f64) -> Self {
        Self { val, dot }
    }

    #[inline]
    pub fn var(val: f64) -> Self {
        Self { val, dot: 1.0 }
    }
}

impl Add for Dual {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.val + rhs.val, self.dot + rhs.dot)
    }
}

impl Sub for Dual {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.val - rhs.val, self.dot - rhs.dot)
    }
}

impl Mul for Dual {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.val * rhs.val, self.val * rhs.dot + self.dot * rhs.val)
    }
}

impl Neg for Dual {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.val, -self.dot)
    }
}

impl Scalar for Dual {
    #[inline]
    fn constant(v: f64) -> Self {
        Self::new(v, 0.0)
    }

    #[inline]
    fn scale(self, k: f64) -> Self {
        Self::new(self.val * k, self.dot * k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperDual {
    pub re: f64,
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
}

impl HyperDual {
    #[inline]
    pub fn new(re: f64, e1: f64, e2: f64, e12: f64) -> Self {
        Self { re, e1, e2, e12 }
    }

    /// Seed a coordinate: `in_e1`/`in_e2` mark whether it carries each infinitesimal.
    #[inline]
    pub fn seeded(re: f64, in_e1: bool, in_e2: bool) -> Self {
        Self::new(re, f64::from(u8::from(in_e1)), f64::from(u8::from(in_e2)), 0.0)
    }
}

impl Add for HyperDual {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        Self::new(self.re + r.re, self.e1 + r.e1, self.e2 + r.e2, self.e12 + r.e12)
    }
}

impl Sub for HyperDual {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        Self::new(self.re - r.re, self.e1 - r.e1, self.e2 - r.e2, self.e12 - r.e12)
    }
}

impl Mul for HyperDual {
    type Output = Self;
    #[inline]
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.re * r.re,
            self.re * r.e1 + self.e1 * r.re,
            self.re * r.e2 + self.e2 * r.re,
            self.re * r.e12 + self.e1 * r.e2 + self.e2 * r.e1 + self.e12 * r.re,
        )
    }
}

impl Neg for HyperDual {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.e1, -self.e2, -self.e12)
    }
}

impl Scalar for HyperDual {
    #[inline]
    fn constant(v: f64) -> Self {
        Self::new(v, 0.0, 0.0, 0.0)
    }

    #[inline]
    fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.e1 * k, self.e2 * k, self.e12 * k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic<T: Scalar>(x: T, y: T) -> T {
        // x^3 y - 2 x y^2 + 5
        x.pow_u32(3) * y - (x * y.pow_u32(2)).scale(2.0) + T::constant(5.0)
    }

    #[test]
    fn dual_gives_first_derivative() {
        let d = cubic(Dual::var(2.0), Dual::constant(3.0));
        assert_eq!(d.val, 8.0 * 3.0 - 2.0 * 2.0 * 9.0 + 5.0);
        // d/dx = 3x^2 y - 2 y^2
        assert_eq!(d.dot, 3.0 * 4.0 * 3.0 - 2.0 * 9.0);
    }

    #[test]
    fn hyperdual_gives_mixed_second_derivative() {
        let x = HyperDual::seeded(2.0, true, false);
        let y = HyperDual::seeded(3.0, false, true);
        let h = cubic(x, y);
        // d2/dxdy = 3x^2 - 4y
        assert_eq!(h.e12, 12.0 - 12.0);
        let x = HyperDual::seeded(2.0, true, true);
        let y = HyperDual::constant(3.0);
        // d2/dx2 = 6 x y
        assert_eq!(cubic(x, y).e12, 36.0);
    }

    #[test]
    fn pow_zero_is_one() {
        assert_eq!(Dual::var(0.0).pow_u32(0), Dual::constant(1.0));
        assert_eq!(0.0f64.pow_u32(0), 1.0);
    }
}
