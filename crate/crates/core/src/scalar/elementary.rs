//! Elementary functions shared by the multi-word backends.

use std::fmt;

use super::Real;

/// `x * 2^k` for f64 without intermediate overflow of `2^k`.
pub(crate) fn ldexp(mut x: f64, mut k: i32) -> f64 {
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
    }
    x * 2f64.powi(k)
}

/// exp(x) by Cody-Waite reduction against `ln2 = ln2_hi + ln2_lo`, a further
/// division by `2^squarings`, a Taylor series for expm1, and repeated doubling.
pub(crate) fn exp_reduced<T: Real>(x: T, ln2_hi: T, ln2_lo: T, squarings: u32) -> T {
    if x.is_zero() {
        return T::one();
    }
    let m = (x.to_f64() / std::f64::consts::LN_2).round();
    let mt = T::from_f64(m);
    let r = ((x - ln2_hi * mt) - ln2_lo * mt).mul_pow2(-(squarings as i32));

    let eps = T::epsilon();
    let mut term = r;
    let mut s = r;
    let mut n = 1i64;
    loop {
        n += 1;
        term = term * r / T::from_i64(n);
        s += term;
        if term.abs() <= eps * s.abs() || n > 64 {
            break;
        }
    }
    // expm1(2y) = 2 expm1(y) + expm1(y)^2
    for _ in 0..squarings {
        s = s.mul_pow2(1) + s * s;
    }
    (s + T::one()).mul_pow2(m as i32)
}

/// ln(x) by Newton iteration on exp, starting from a low-precision guess `y0`.
pub(crate) fn ln_newton<T: Real>(x: T, y0: T, iterations: u32) -> T {
    let mut y = y0;
    for _ in 0..iterations {
        y = y + x * (-y).exp() - T::one();
    }
    y
}

/// Writes `x` in scientific notation with `digits` significant digits.
pub(crate) fn write_decimal<T: Real>(f: &mut fmt::Formatter<'_>, x: T, digits: usize) -> fmt::Result {
    let approx = x.to_f64();
    if approx.is_nan() || approx.is_infinite() {
        return write!(f, "{approx}");
    }
    if x.is_zero() {
        return write!(f, "0e0");
    }
    let digits = f.precision().map(|p| p + 1).unwrap_or(digits).max(1);
    let mut v = x.abs();
    let mut e10 = approx.abs().log10().floor() as i32;
    let ten = T::from_f64(10.0);
    let scale = ten.powi(e10.unsigned_abs());
    v = if e10 >= 0 { v / scale } else { v * scale };
    while v >= ten {
        v /= ten;
        e10 += 1;
    }
    while v < T::one() {
        v *= ten;
        e10 -= 1;
    }
    let mut out = String::with_capacity(digits + 8);
    if x < T::zero() {
        out.push('-');
    }
    for i in 0..digits {
        let d = v.to_f64().floor().clamp(0.0, 9.0);
        out.push(char::from(b'0' + d as u8));
        if i == 0 && digits > 1 {
            out.push('.');
        }
        v = (v - T::from_f64(d)) * ten;
    }
    write!(f, "{out}e{e10}")
}
