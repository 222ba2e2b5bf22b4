use super::dd::DoubleDouble;
use num_bigint::{BigInt, Sign};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A real number held as `sign * exp(ln)`, for quantities far beyond f64 range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogReal {
    pub ln: DoubleDouble,
    /// -1, 0 or +1; `ln` is meaningless when zero.
    pub sign: i8,
}

impl LogReal {
    pub const ZERO: Self = Self { ln: DoubleDouble::ZERO, sign: 0 };
    pub const ONE: Self = Self { ln: DoubleDouble::ZERO, sign: 1 };

    pub fn from_ln(ln: DoubleDouble) -> Self {
        Self { ln, sign: 1 }
    }

    pub fn from_ln_f64(ln: f64) -> Self {
        Self::from_ln(DoubleDouble::from_f64(ln))
    }

    pub fn from_f64(x: f64) -> Self {
        match x.partial_cmp(&0.0) {
            Some(Ordering::Greater) => Self { ln: DoubleDouble::from_f64(x).ln(), sign: 1 },
            Some(Ordering::Less) => Self { ln: DoubleDouble::from_f64(-x).ln(), sign: -1 },
            _ => Self::ZERO,
        }
    }

    pub fn from_bigint(x: &BigInt) -> Self {
        let sign = match x.sign() {
            Sign::Plus => 1,
            Sign::Minus => -1,
            Sign::NoSign => return Self::ZERO,
        };
        Self { ln: DoubleDouble::ln_biguint(x.magnitude()), sign }
    }

    pub fn from_u128(x: u128) -> Self {
        Self::from_bigint(&BigInt::from(x))
    }

    pub fn ln_f64(&self) -> f64 {
        self.ln.to_f64()
    }

    /// Overflows to +-inf outside f64 range.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        self.sign as f64 * self.ln.to_f64().exp()
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            Self { ln: self.ln, sign: 1 }
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        Self { ln: -self.ln, sign: self.sign }
    }

    pub fn powf(self, e: f64) -> Self {
        assert!(self.sign > 0, "powf of non-positive LogReal");
        Self { ln: self.ln.mul_f64(e), sign: 1 }
    }
}

impl Neg for LogReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self { ln: self.ln, sign: -self.sign }
    }
}

impl Mul for LogReal {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        if self.sign == 0 || b.sign == 0 {
            return Self::ZERO;
        }
        Self { ln: self.ln + b.ln, sign: self.sign * b.sign }
    }
}

impl Div for LogReal {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, b: Self) -> Self {
        self * b.recip()
    }
}

impl Add for LogReal {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        if self.sign == 0 {
            return b;
        }
        if b.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln >= b.ln { (self, b) } else { (b, self) };
        let rel = (small.ln - big.ln).exp();
        let factor = if big.sign == small.sign { DoubleDouble::ONE + rel } else { DoubleDouble::ONE - rel };
        if factor.hi <= 0.0 {
            return Self::ZERO;
        }
        Self { ln: big.ln + factor.ln(), sign: big.sign }
    }
}

impl Sub for LogReal {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            o => return Some(o),
        }
        match self.sign {
            0 => Some(Ordering::Equal),
            1 => self.ln.partial_cmp(&other.ln),
            _ => other.ln.partial_cmp(&self.ln),
        }
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            1 => write!(f, "exp({})", self.ln.to_f64()),
            _ => write!(f, "-exp({})", self.ln.to_f64()),
        }
    }
}

impl Serialize for LogReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LogReal", 2)?;
        st.serialize_field("ln", &self.ln.to_f64())?;
        st.serialize_field("sign", &self.sign)?;
        st.end()
    }
}
