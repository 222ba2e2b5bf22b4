//! Double-double reals: an unevaluated sum `hi + lo` with |lo| <= ulp(hi)/2,
//! giving ~106 bits of mantissa. Only what log-space bookkeeping needs.

use num_bigint::BigUint;
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub const LN2: DoubleDouble = DoubleDouble { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };
pub const PI: DoubleDouble = DoubleDouble { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
/// ln(2*pi) / 2
pub const HALF_LN_2PI: DoubleDouble = DoubleDouble { hi: 0.9189385332046728, lo: -3.8782941580672414e-17 };

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Exact for every u128 below 2^106.
    pub fn from_u128(x: u128) -> Self {
        let hi = x as f64;
        if !hi.is_finite() {
            return Self::from_f64(hi);
        }
        // `hi` may round above x; the remainder is below 2^75 in magnitude
        let hi_int = hi as u128;
        let lo = if hi_int >= x { -((hi_int - x) as f64) } else { (x - hi_int) as f64 };
        Self::new(hi, lo)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    /// Multiplication by 2^e, exact.
    pub fn ldexp(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        Self { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        if self.hi == 0.0 {
            return Self::ONE;
        }
        // x = m ln2 + 512 r, |r| <= ln2 / 1024
        let m = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(m)).ldexp(-9);

        // expm1(r) by Taylor to r^10
        let mut term = r;
        let mut s = r;
        for i in 2..=10 {
            term = term * r / Self::from_f64(i as f64);
            s = s + term;
        }
        // expm1(2y) = 2 expm1(y) + expm1(y)^2
        for _ in 0..9 {
            s = s.mul_f64(2.0) + s.sqr();
        }
        (s + Self::ONE).ldexp(m as i32)
    }

    /// Natural log; NaN for non-positive input.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 || self.hi.is_nan() {
            return Self::from_f64(f64::NAN);
        }
        if self.hi.is_infinite() {
            return self;
        }
        // x = 2^e f with f near 1 keeps exp(-y) away from the subnormals
        let e = self.hi.log2().floor();
        let f = self.ldexp(-(e as i32));
        let y = Self::from_f64(f.hi.ln());
        // one Newton step on exp(y) = f doubles the ~53 correct bits
        y + f * (-y).exp() - Self::ONE + LN2.mul_f64(e)
    }

    /// ln of an arbitrary-size natural number via its top 104 bits.
    pub fn ln_biguint(x: &BigUint) -> Self {
        let bits = x.bits();
        if bits <= 104 {
            let v: u128 = x.try_into().expect("fits in u128");
            return Self::from_u128(v).ln();
        }
        let shift = bits - 104;
        let top: u128 = (x >> shift).try_into().expect("fits in u128");
        Self::from_u128(top).ln() + LN2.mul_f64(shift as f64)
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.hi.total_cmp(&other.hi).then(self.lo.total_cmp(&other.lo))
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}
