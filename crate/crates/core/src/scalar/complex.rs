use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use super::Real;

/// Complex number over a [`Real`] backend.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Cplx<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Cplx<T> {
    pub fn new(re: T, im: T) -> Self {
        Cplx { re, im }
    }

    pub fn real(re: T) -> Self {
        Cplx { re, im: T::zero() }
    }

    pub fn zero() -> Self {
        Cplx::real(T::zero())
    }

    pub fn one() -> Self {
        Cplx::real(T::one())
    }

    pub fn i() -> Self {
        Cplx::new(T::zero(), T::one())
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Cplx::new(T::from_f64(re), T::from_f64(im))
    }

    pub fn conj(self) -> Self {
        Cplx::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> T {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> T {
        self.re.hypot(self.im)
    }

    pub fn scale(self, s: T) -> Self {
        Cplx::new(self.re * s, self.im * s)
    }

    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl<T: Real> Add for Cplx<T> {
    type Output = Self;
    #[inline(always)]
    fn add(self, b: Self) -> Self {
        Cplx::new(self.re + b.re, self.im + b.im)
    }
}

impl<T: Real> Sub for Cplx<T> {
    type Output = Self;
    #[inline(always)]
    fn sub(self, b: Self) -> Self {
        Cplx::new(self.re - b.re, self.im - b.im)
    }
}

impl<T: Real> Mul for Cplx<T> {
    type Output = Self;
    #[inline(always)]
    fn mul(self, b: Self) -> Self {
        Cplx::new(
            self.re * b.re - self.im * b.im,
            self.re * b.im + self.im * b.re,
        )
    }
}

impl<T: Real> Neg for Cplx<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Cplx::new(-self.re, -self.im)
    }
}

impl<T: Real> AddAssign for Cplx<T> {
    #[inline(always)]
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl<T: Real> SubAssign for Cplx<T> {
    #[inline(always)]
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl<T: Real> MulAssign for Cplx<T> {
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

impl<T: Real> fmt::Debug for Cplx<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}
