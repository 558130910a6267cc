//! Double-double arithmetic: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use super::elementary::{exp_reduced, ldexp, ln_newton, write_decimal};
use super::Real;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[cfg(target_feature = "fma")]
#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

// Dekker's split. Exact like the fma path, so results are bit-identical.
#[cfg(not(target_feature = "fma"))]
#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0;
    #[inline(always)]
    fn split(x: f64) -> (f64, f64) {
        let t = SPLITTER * x;
        let hi = t - (t - x);
        (hi, x - hi)
    }
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    const LN2_HI: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline(always)]
    fn mul_f64(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * b);
        Dd { hi, lo }
    }

    #[inline(always)]
    fn sqr(self) -> Dd {
        let (p1, p2) = two_prod(self.hi, self.hi);
        let (hi, lo) = quick_two_sum(p1, p2 + 2.0 * self.hi * self.lo);
        Dd { hi, lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline(always)]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline(always)]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline(always)]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline(always)]
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let mut r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        r -= b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + Dd { hi: q3, lo: 0.0 }
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for Dd {
            #[inline(always)]
            fn $m(&mut self, rhs: Dd) {
                *self = *self $op rhs;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_decimal(f, *self, 32)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl Real for Dd {
    const BITS: u32 = 106;
    const NAME: &'static str = "dd";

    fn zero() -> Self {
        Dd::ZERO
    }
    fn one() -> Self {
        Dd::ONE
    }
    fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Dd::ZERO
            } else {
                Dd::from_f64(f64::NAN)
            };
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let corr = (self - Dd::from_f64(ax).sqr()).hi * (x * 0.5);
        let (hi, lo) = two_sum(ax, corr);
        Dd { hi, lo }
    }
    fn exp(self) -> Self {
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        exp_reduced(self, Dd::LN2_HI, Dd::ZERO, 9)
    }
    fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::from_f64(if self.hi == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            });
        }
        ln_newton(self, Dd::from_f64(self.hi.ln()), 2)
    }
    fn mul_pow2(self, k: i32) -> Self {
        Dd {
            hi: ldexp(self.hi, k),
            lo: ldexp(self.lo, k),
        }
    }
    fn to_hex(self) -> String {
        format!("{:016x}{:016x}", self.hi.to_bits(), self.lo.to_bits())
    }
    fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() != 32 || !s.is_ascii() {
            return Err(Error::Parse(format!("bad double-double hex {s:?}")));
        }
        let part = |p: &str| {
            u64::from_str_radix(p, 16)
                .map(f64::from_bits)
                .map_err(|e| Error::Parse(format!("bad double-double hex {s:?}: {e}")))
        };
        Ok(Dd {
            hi: part(&s[..16])?,
            lo: part(&s[16..])?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, rel: f64) -> bool {
        ((a - b).abs().to_f64()) <= rel * b.abs().to_f64().max(1e-300)
    }

    #[test]
    fn arithmetic_beyond_double() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let back = third * Dd::from_f64(3.0);
        assert!((back - Dd::ONE).abs().to_f64() < 1e-31);
        // 1 + 2^-80 survives in dd but not in f64
        let tiny = Dd::ONE.mul_pow2(-80);
        assert_eq!(((Dd::ONE + tiny) - Dd::ONE).to_f64(), 2f64.powi(-80));
    }

    #[test]
    fn sqrt_two_matches_reference() {
        // sqrt(2) to 32 digits
        let s = Dd::from_f64(2.0).sqrt();
        let reference = Dd::new(std::f64::consts::SQRT_2, -9.667293313452913e-17);
        assert!(close(s, reference, 1e-31), "{s:?}");
        assert!(((s * s) - Dd::from_f64(2.0)).abs().to_f64() < 1e-31);
    }

    #[test]
    fn exp_and_ln() {
        let e = Dd::ONE.exp();
        let reference = Dd::new(std::f64::consts::E, 1.4456468917292502e-16);
        assert!(close(e, reference, 1e-31), "{e:?}");
        let l = Dd::from_f64(10.0).ln();
        let reference = Dd::new(std::f64::consts::LN_10, -2.1707562233822494e-16);
        assert!(close(l, reference, 1e-31), "{l:?}");
        for x in [-600.0, -3.5, -1e-20, 0.25, 40.0] {
            let v = Dd::from_f64(x);
            assert!(close(v.exp().ln(), v, 1e-30), "x = {x}");
        }
        assert_eq!(Dd::from_f64(-800.0).exp(), Dd::ZERO);
    }

    #[test]
    fn ordering_and_hex() {
        let a = Dd::new(1.0, 1e-20);
        let b = Dd::new(1.0, -1e-20);
        assert!(a > b);
        assert_eq!(Dd::from_hex(&a.to_hex()).unwrap(), a);
        assert!(Dd::from_hex("zz").is_err());
    }
}
