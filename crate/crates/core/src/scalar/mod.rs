//! Real scalar backends and a small complex type built on top of them.
//!
//! Everything numeric in the crate is generic over [`Real`]. Three backends
//! ship with the crate:
//!
//! | backend | mantissa bits | notes |
//! |---------|---------------|-------|
//! | `f64`   | 53            | smoke tests and precision-scaling checks |
//! | [`Dd`]  | 106           | double-double, the default working precision |
//! | [`F256`]| 256           | software float, slow but resolves ~1e-77 |

mod complex;
mod dd;
mod elementary;
mod f256;

pub use complex::Cplx;
pub use dd::Dd;
pub use f256::F256;

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// A real floating-point type with a fixed mantissa precision.
pub trait Real:
    Copy
    + Send
    + Sync
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Default
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + 'static
{
    /// Mantissa precision P in bits.
    const BITS: u32;
    /// Short backend tag used in dumps and metadata.
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    /// Multiplies by 2^k exactly.
    fn mul_pow2(self, k: i32) -> Self;
    /// Exact, lossless hexadecimal encoding.
    fn to_hex(self) -> String;
    fn from_hex(s: &str) -> Result<Self>;

    fn from_i64(n: i64) -> Self {
        // exact for |n| < 2^53, which covers every use in the crate
        Self::from_f64(n as f64)
    }

    fn is_zero(self) -> bool {
        self == Self::zero()
    }

    /// 2^-P, the unit roundoff scale of the backend.
    fn epsilon() -> Self {
        Self::one().mul_pow2(-(Self::BITS as i32))
    }

    /// 2^(-P + shift), the tolerance shape used throughout the contracts.
    fn tol(shift: i32) -> Self {
        Self::one().mul_pow2(-(Self::BITS as i32) + shift)
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn signum_or_one(self) -> Self {
        if self < Self::zero() {
            -Self::one()
        } else {
            Self::one()
        }
    }

    fn hypot(self, other: Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return Self::zero();
        }
        let r = small / big;
        big * (Self::one() + r * r).sqrt()
    }

    fn powi(self, mut n: u32) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc *= base;
            }
            base *= base;
            n >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    const BITS: u32 = 53;
    const NAME: &'static str = "f64";

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn mul_pow2(self, k: i32) -> Self {
        elementary::ldexp(self, k)
    }
    fn to_hex(self) -> String {
        format!("{:016x}", self.to_bits())
    }
    fn from_hex(s: &str) -> Result<Self> {
        let bits = u64::from_str_radix(s.trim(), 16)
            .map_err(|e| Error::Parse(format!("bad f64 hex {s:?}: {e}")))?;
        Ok(f64::from_bits(bits))
    }
}

/// Runtime description of a backend, for metadata and dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    F64,
    DoubleDouble,
    Soft256,
}

impl Backend {
    /// Smallest backend offering at least `bits` of mantissa.
    pub fn for_bits(bits: u32) -> Result<Self> {
        match bits {
            0 => Err(Error::Usage("precision must be positive".into())),
            1..=53 => Ok(Backend::F64),
            54..=106 => Ok(Backend::DoubleDouble),
            107..=256 => Ok(Backend::Soft256),
            _ => Err(Error::Usage(format!(
                "precision {bits} bits exceeds the widest backend (256 bits)"
            ))),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Backend::F64 => <f64 as Real>::BITS,
            Backend::DoubleDouble => Dd::BITS,
            Backend::Soft256 => F256::BITS,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::F64 => <f64 as Real>::NAME,
            Backend::DoubleDouble => Dd::NAME,
            Backend::Soft256 => F256::NAME,
        }
    }
}
