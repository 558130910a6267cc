//! Software binary floating point with a 256-bit mantissa.
//!
//! A value is `(-1)^neg * (mant / 2^256) * 2^exp` with the top bit of
//! `mant[3]` set, so the fraction lies in [1/2, 1). Zero has an all-zero
//! mantissa, `exp == 0` and `neg == false`. Results are rounded to nearest
//! (ties away from zero) from a 384-bit intermediate; bits shifted past the
//! intermediate during alignment are dropped, which keeps every operation
//! faithful rather than correctly rounded.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use super::elementary::{exp_reduced, ldexp, ln_newton, write_decimal};
use super::Real;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq)]
pub struct F256 {
    neg: bool,
    exp: i32,
    /// Little-endian limbs; `mant[3]` is most significant.
    mant: [u64; 4],
}

const WIDE: usize = 6;
type Wide = [u64; WIDE];

fn wide_is_zero(w: &Wide) -> bool {
    w.iter().all(|&l| l == 0)
}

fn wide_leading_zeros(w: &Wide) -> u32 {
    let mut lz = 0;
    for &limb in w.iter().rev() {
        if limb == 0 {
            lz += 64;
        } else {
            return lz + limb.leading_zeros();
        }
    }
    lz
}

fn wide_shl(w: &Wide, s: u32) -> Wide {
    let limbs = (s / 64) as usize;
    let bits = s % 64;
    let mut out = [0u64; WIDE];
    for i in (limbs..WIDE).rev() {
        let src = i - limbs;
        let mut v = w[src] << bits;
        if bits > 0 && src > 0 {
            v |= w[src - 1] >> (64 - bits);
        }
        out[i] = v;
    }
    out
}

fn wide_shr(w: &Wide, s: u32) -> Wide {
    if s >= (WIDE as u32) * 64 {
        return [0; WIDE];
    }
    let limbs = (s / 64) as usize;
    let bits = s % 64;
    let mut out = [0u64; WIDE];
    for (i, slot) in out.iter_mut().enumerate().take(WIDE - limbs) {
        let src = i + limbs;
        let mut v = w[src] >> bits;
        if bits > 0 && src + 1 < WIDE {
            v |= w[src + 1] << (64 - bits);
        }
        *slot = v;
    }
    out
}

fn wide_add(a: &Wide, b: &Wide) -> (Wide, bool) {
    let mut out = [0u64; WIDE];
    let mut carry = false;
    for i in 0..WIDE {
        let (s1, c1) = a[i].overflowing_add(b[i]);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        out[i] = s2;
        carry = c1 || c2;
    }
    (out, carry)
}

/// a - b, assuming a >= b.
fn wide_sub(a: &Wide, b: &Wide) -> Wide {
    let mut out = [0u64; WIDE];
    let mut borrow = false;
    for i in 0..WIDE {
        let (s1, b1) = a[i].overflowing_sub(b[i]);
        let (s2, b2) = s1.overflowing_sub(borrow as u64);
        out[i] = s2;
        borrow = b1 || b2;
    }
    out
}

fn mant_cmp(a: &[u64; 4], b: &[u64; 4]) -> Ordering {
    for i in (0..4).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    Ordering::Equal
}

impl F256 {
    pub const ZERO: F256 = F256 {
        neg: false,
        exp: 0,
        mant: [0; 4],
    };
    pub const ONE: F256 = F256 {
        neg: false,
        exp: 1,
        mant: [0, 0, 0, 1 << 63],
    };
    // ln 2 split so that m * LN2_HI is exact for |m| < 2^16
    const LN2_HI: F256 = F256 {
        neg: false,
        exp: 0,
        mant: [
            0x8a0d175b8baa0000,
            0x40f343267298b62d,
            0xc9e3b39803f2f6af,
            0xb17217f7d1cf79ab,
        ],
    };
    const LN2_LO: F256 = F256 {
        neg: false,
        exp: -240,
        mant: [
            0x214427573b29116a,
            0x1b10ed2eae35c138,
            0xac98559552fb4afa,
            0xfa2be7b876206deb,
        ],
    };

    /// Packs a 384-bit magnitude `w / 2^384 * 2^exp`, normalizing and rounding.
    fn pack(neg: bool, exp: i32, w: Wide) -> F256 {
        if wide_is_zero(&w) {
            return F256::ZERO;
        }
        let lz = wide_leading_zeros(&w);
        let w = wide_shl(&w, lz);
        let mut exp = exp - lz as i32;
        let mut mant = [w[2], w[3], w[4], w[5]];
        if w[1] >> 63 == 1 {
            let mut carry = true;
            for limb in mant.iter_mut() {
                let (v, c) = limb.overflowing_add(carry as u64);
                *limb = v;
                carry = c;
                if !carry {
                    break;
                }
            }
            if carry {
                mant = [0, 0, 0, 1 << 63];
                exp += 1;
            }
        }
        F256 { neg, exp, mant }
    }

    fn widen(&self) -> Wide {
        [0, 0, self.mant[0], self.mant[1], self.mant[2], self.mant[3]]
    }

    fn cmp_abs(&self, other: &F256) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => mant_cmp(&self.mant, &other.mant),
            ord => ord,
        }
    }

    fn add_impl(self, b: F256) -> F256 {
        if self.is_zero() {
            return b;
        }
        if b.is_zero() {
            return self;
        }
        let (big, small) = if self.cmp_abs(&b) == Ordering::Less {
            (b, self)
        } else {
            (self, b)
        };
        let shift = (big.exp - small.exp) as u32;
        if shift > 256 + 64 + 2 {
            return big;
        }
        let bw = big.widen();
        let sw = wide_shr(&small.widen(), shift);
        if big.neg == small.neg {
            let (sum, carry) = wide_add(&bw, &sw);
            if carry {
                let mut w = wide_shr(&sum, 1);
                w[WIDE - 1] |= 1 << 63;
                F256::pack(big.neg, big.exp + 1, w)
            } else {
                F256::pack(big.neg, big.exp, sum)
            }
        } else {
            F256::pack(big.neg, big.exp, wide_sub(&bw, &sw))
        }
    }

    /// Scales into [1/2, 1) and returns the exponent removed.
    fn split_exp(self) -> (F256, i32) {
        (F256 { exp: 0, ..self }, self.exp)
    }

    fn recip(self) -> F256 {
        let (m, e) = self.split_exp();
        let mut y = F256::from_f64(1.0 / m.to_f64());
        for _ in 0..3 {
            y = y + y * (F256::ONE - m * y);
        }
        y.mul_pow2(-e)
    }
}

impl Default for F256 {
    fn default() -> Self {
        F256::ZERO
    }
}

impl Add for F256 {
    type Output = F256;
    fn add(self, b: F256) -> F256 {
        self.add_impl(b)
    }
}

impl Neg for F256 {
    type Output = F256;
    fn neg(self) -> F256 {
        if self.is_zero() {
            self
        } else {
            F256 {
                neg: !self.neg,
                ..self
            }
        }
    }
}

impl Sub for F256 {
    type Output = F256;
    fn sub(self, b: F256) -> F256 {
        self.add_impl(-b)
    }
}

impl Mul for F256 {
    type Output = F256;
    fn mul(self, b: F256) -> F256 {
        if self.is_zero() || b.is_zero() {
            return F256::ZERO;
        }
        let mut prod = [0u64; 8];
        for i in 0..4 {
            let mut carry: u128 = 0;
            for j in 0..4 {
                let t = (self.mant[i] as u128) * (b.mant[j] as u128) + prod[i + j] as u128 + carry;
                prod[i + j] = t as u64;
                carry = t >> 64;
            }
            prod[i + 4] = carry as u64;
        }
        let w = [prod[2], prod[3], prod[4], prod[5], prod[6], prod[7]];
        F256::pack(self.neg != b.neg, self.exp + b.exp, w)
    }
}

impl Div for F256 {
    type Output = F256;
    fn div(self, b: F256) -> F256 {
        assert!(!b.is_zero(), "F256 division by zero");
        if self.is_zero() {
            return F256::ZERO;
        }
        let y = b.recip();
        let q = self * y;
        let r = self - q * b;
        q + r * y
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for F256 {
            fn $m(&mut self, rhs: F256) {
                *self = *self $op rhs;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl PartialOrd for F256 {
    fn partial_cmp(&self, other: &F256) -> Option<Ordering> {
        let ord = match (self.neg, other.neg) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => self.cmp_abs(other),
            (true, true) => other.cmp_abs(self),
        };
        Some(ord)
    }
}

impl fmt::Debug for F256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F256({})", self.to_hex())
    }
}

impl fmt::Display for F256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_decimal(f, *self, 76)
    }
}

impl Real for F256 {
    const BITS: u32 = 256;
    const NAME: &'static str = "soft256";

    fn zero() -> Self {
        F256::ZERO
    }
    fn one() -> Self {
        F256::ONE
    }

    fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "F256::from_f64 on non-finite value");
        if x == 0.0 {
            return F256::ZERO;
        }
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        // x = m * 2^(e) with integer m
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let lz = m.leading_zeros();
        let top = m << lz;
        // m = top * 2^-lz, and the fraction is top / 2^64
        F256 {
            neg,
            exp: e + 64 - lz as i32,
            mant: [0, 0, 0, top],
        }
    }

    fn to_f64(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let v = self.mant[3] as f64 + ldexp(self.mant[2] as f64, -64);
        let v = ldexp(v, self.exp.clamp(-1100, 1100) - 64);
        if self.neg {
            -v
        } else {
            v
        }
    }

    fn abs(self) -> Self {
        F256 { neg: false, ..self }
    }

    fn sqrt(self) -> Self {
        if self.is_zero() {
            return F256::ZERO;
        }
        assert!(!self.neg, "F256 square root of a negative value");
        // make the removed exponent even
        let (mut m, mut e) = self.split_exp();
        if e % 2 != 0 {
            m = m.mul_pow2(1);
            e -= 1;
        }
        let mut y = F256::from_f64(1.0 / m.to_f64().sqrt());
        for _ in 0..3 {
            y = y + (y * (F256::ONE - m * y * y)).mul_pow2(-1);
        }
        let s = m * y;
        let s = s + ((m - s * s) * y).mul_pow2(-1);
        s.mul_pow2(e / 2)
    }

    fn exp(self) -> Self {
        exp_reduced(self, F256::LN2_HI, F256::LN2_LO, 16)
    }

    fn ln(self) -> Self {
        assert!(!self.neg && !self.is_zero(), "F256 log of a non-positive value");
        let (m, e) = self.split_exp();
        let ln_m = ln_newton(m, F256::from_f64(m.to_f64().ln()), 3);
        let ef = F256::from_i64(e as i64);
        ln_m + F256::LN2_HI * ef + F256::LN2_LO * ef
    }

    fn mul_pow2(self, k: i32) -> Self {
        if self.is_zero() {
            self
        } else {
            F256 {
                exp: self.exp + k,
                ..self
            }
        }
    }

    fn to_hex(self) -> String {
        format!(
            "{}{:08x}.{:016x}{:016x}{:016x}{:016x}",
            if self.neg { '-' } else { '+' },
            self.exp as u32,
            self.mant[3],
            self.mant[2],
            self.mant[1],
            self.mant[0]
        )
    }

    fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad soft256 hex {s:?}"));
        if s.len() != 1 + 8 + 1 + 64 || !s.is_ascii() {
            return Err(bad());
        }
        let neg = match &s[..1] {
            "+" => false,
            "-" => true,
            _ => return Err(bad()),
        };
        if &s[9..10] != "." {
            return Err(bad());
        }
        let exp = u32::from_str_radix(&s[1..9], 16).map_err(|_| bad())? as i32;
        let mut mant = [0u64; 4];
        for (i, limb) in mant.iter_mut().rev().enumerate() {
            let start = 10 + 16 * i;
            *limb = u64::from_str_radix(&s[start..start + 16], 16).map_err(|_| bad())?;
        }
        let v = F256 { neg, exp, mant };
        let zero = mant.iter().all(|&l| l == 0);
        if (zero && (neg || exp != 0)) || (!zero && mant[3] >> 63 == 0) {
            return Err(bad());
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> F256 {
        F256::from_hex(s).unwrap()
    }

    fn rel_err(a: F256, b: F256) -> f64 {
        ((a - b).abs() / b.abs()).to_f64()
    }

    const TOL: f64 = 1e-74; // about 2^-245

    #[test]
    fn from_f64_roundtrip() {
        for x in [1.0, -2.5, 0.1, 1e-310, 3e300, -7.0e-5] {
            assert_eq!(F256::from_f64(x).to_f64(), x);
        }
        assert_eq!(F256::from_f64(1.0), F256::ONE);
    }

    #[test]
    fn basic_arithmetic() {
        let third = F256::ONE / F256::from_f64(3.0);
        let reference = h("+ffffffff.aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaab");
        assert!(rel_err(third, reference) < TOL);
        let x = F256::from_f64(1.25);
        let y = F256::from_f64(-0.75);
        assert_eq!((x + y).to_f64(), 0.5);
        assert_eq!((x * y).to_f64(), -0.9375);
        assert_eq!((y - x).to_f64(), -2.0);
        assert_eq!(x - x, F256::ZERO);
        let tiny = F256::ONE.mul_pow2(-200);
        assert_eq!((F256::ONE + tiny) - F256::ONE, tiny);
    }

    #[test]
    fn elementary_functions() {
        let sqrt2 = h("+00000001.b504f333f9de6484597d89b3754abe9f1d6f60ba893ba84ced17ac8583339915");
        assert!(rel_err(F256::from_f64(2.0).sqrt(), sqrt2) < TOL);
        let e = h("+00000002.adf85458a2bb4a9aafdc5620273d3cf1d8b9c583ce2d3695a9e13641146433fc");
        assert!(rel_err(F256::ONE.exp(), e) < TOL);
        let ln10 = h("+00000002.935d8dddaaa8ac16ea56d62b82d30a28e28fecf9da5df90e83c61e8201f02d73");
        assert!(rel_err(F256::from_f64(10.0).ln(), ln10) < TOL);
        let e700 = h("+fffffc0f.8a79587dc983f855e586959f79e6c76531ad28d57b2cc5e1d24f00daf9b93f1f");
        assert!(rel_err(F256::from_f64(-700.0).exp(), e700) < 1e-72);
    }

    #[test]
    fn ordering_and_hex() {
        let a = F256::from_f64(-3.0);
        let b = F256::from_f64(2.0);
        assert!(a < b && b > F256::ZERO && a < F256::ZERO);
        assert!(F256::from_f64(-1.0) > F256::from_f64(-2.0));
        for v in [a, b, F256::ZERO, F256::ONE / F256::from_f64(7.0)] {
            assert_eq!(F256::from_hex(&v.to_hex()).unwrap(), v);
        }
        assert!(F256::from_hex("+00000001.00").is_err());
    }
}
