//! Exact integers, binomials, primality, and log-space mirrors.

pub mod dd;
pub mod logreal;

pub use dd::DoubleDouble;
pub use logreal::LogReal;
pub use num_bigint::BigInt;
pub use num_rational::BigRational;

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::sync::OnceLock;

/// Exact n choose k.
pub fn binomial(n: u64, k: u64) -> Result<BigInt> {
    if k > n {
        return Err(Error::InvalidBinomial { n, k });
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc = C(n, i) here, so the division is exact
        acc = acc * (n - i) / (i + 1);
    }
    Ok(acc)
}

/// Sum of C(n, i) for i = 0..p-1 (terms past n vanish). Zero when p = 0.
pub fn binomial_tail_sum(n: u64, p: u64) -> BigInt {
    let top = match p.checked_sub(1) {
        Some(t) => t.min(n),
        None => return BigInt::zero(),
    };
    let mut term = BigInt::one();
    let mut sum = BigInt::one();
    for i in 0..top {
        term = term * (n - i) / (i + 1);
        sum += &term;
    }
    sum
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue modulo a prime.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin; the first twelve prime bases cover all of u64.
pub fn is_prime(m: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if m < 2 {
        return false;
    }
    for &b in &BASES {
        if m % b == 0 {
            return m == b;
        }
    }
    let s = (m - 1).trailing_zeros();
    let d = (m - 1) >> s;
    'witness: for &b in &BASES {
        let mut x = pow_mod(b, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const EXACT_FACTORIALS: usize = 256;

fn factorial_table() -> &'static [DoubleDouble] {
    static TABLE: OnceLock<Vec<DoubleDouble>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut f = BigUint::one();
        let mut out = vec![DoubleDouble::ZERO];
        for m in 1..=EXACT_FACTORIALS as u64 {
            f *= m;
            out.push(DoubleDouble::ln_biguint(&f));
        }
        out
    })
}

/// ln m!, exact-table below 257 and Stirling's series above.
pub fn ln_factorial(m: u64) -> DoubleDouble {
    if (m as usize) <= EXACT_FACTORIALS {
        return factorial_table()[m as usize];
    }
    // Bernoulli terms B_2j / (2j (2j-1)) as num/den
    const SERIES: [(f64, f64); 8] = [
        (1.0, 12.0),
        (-1.0, 360.0),
        (1.0, 1260.0),
        (-1.0, 1680.0),
        (1.0, 1188.0),
        (-691.0, 360360.0),
        (1.0, 156.0),
        (-3617.0, 122400.0),
    ];
    let x = DoubleDouble::from_f64(m as f64);
    let lnx = x.ln();
    let mut s = (x + DoubleDouble::from_f64(0.5)) * lnx - x + dd::HALF_LN_2PI;
    let inv = DoubleDouble::ONE / x;
    let inv2 = inv * inv;
    let mut pw = inv;
    for (num, den) in SERIES {
        s = s + pw * DoubleDouble::from_f64(num) / DoubleDouble::from_f64(den);
        pw = pw * inv2;
    }
    s
}

/// ln C(n, k), independent of the big-integer route.
pub fn log_binomial(n: u64, k: u64) -> Result<LogReal> {
    if k > n {
        return Err(Error::InvalidBinomial { n, k });
    }
    Ok(LogReal::from_ln(ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)))
}

/// ln of sum_{i<p} C(n, i), summing term ratios around the largest term.
pub fn log_binomial_tail(n: u64, p: u64) -> LogReal {
    let top = match p.checked_sub(1) {
        Some(t) => t.min(n),
        None => return LogReal::ZERO,
    };
    let peak = top.min(n / 2);
    let cutoff = DoubleDouble::from_f64(1e-36);
    let mut sum = DoubleDouble::ONE;

    let mut t = DoubleDouble::ONE;
    for i in (1..=peak).rev() {
        t = t.mul_f64(i as f64) / DoubleDouble::from_f64((n - i + 1) as f64);
        sum = sum + t;
        if t < sum * cutoff {
            break;
        }
    }
    let mut t = DoubleDouble::ONE;
    for i in peak..top {
        t = t.mul_f64((n - i) as f64) / DoubleDouble::from_f64((i + 1) as f64);
        sum = sum + t;
        if t < sum * cutoff {
            break;
        }
    }
    let base = log_binomial(n, peak).expect("peak <= n");
    LogReal::from_ln(base.ln + sum.ln())
}

/// Exact rational from an f64 (every finite f64 is a dyadic rational).
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pascal(rows: usize) -> Vec<Vec<BigInt>> {
        let mut t = vec![vec![BigInt::one()]];
        for n in 1..=rows {
            let prev = &t[n - 1];
            let mut row = vec![BigInt::one(); n + 1];
            for k in 1..n {
                row[k] = &prev[k - 1] + &prev[k];
            }
            t.push(row);
        }
        t
    }

    #[test]
    fn binomial_matches_pascal_triangle() {
        let t = pascal(200);
        for n in 0..=200u64 {
            for k in 0..=n {
                assert_eq!(binomial(n, k).unwrap(), t[n as usize][k as usize], "C({n},{k})");
            }
        }
        assert_eq!(binomial(7, 3).unwrap(), BigInt::from(35));
        assert_eq!(binomial(16, 4).unwrap(), BigInt::from(1820));
        assert_eq!(binomial(9, 0).unwrap(), BigInt::one());
        assert!(matches!(binomial(3, 4), Err(Error::InvalidBinomial { .. })));
    }

    #[test]
    fn tail_sums() {
        let direct = |n: u64, p: u64| -> BigInt { (0..p).map(|i| binomial(n, i).unwrap()).sum() };
        assert_eq!(binomial_tail_sum(8, 5), BigInt::from(163));
        assert_eq!(binomial_tail_sum(16, 5), BigInt::from(2517));
        assert_eq!(binomial_tail_sum(12, 5), BigInt::from(794));
        assert_eq!(binomial_tail_sum(20, 7), BigInt::from(60460));
        assert_eq!(binomial_tail_sum(30, 1), BigInt::one());
        assert_eq!(binomial_tail_sum(4, 9), BigInt::from(16));
        for n in [10u64, 33, 64] {
            for p in 1..=n {
                assert_eq!(binomial_tail_sum(n, p), direct(n, p));
            }
        }
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let lim = 1_000_000usize;
        let mut sieve = vec![true; lim + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= lim {
            if sieve[i] {
                let mut j = i * i;
                while j <= lim {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        for (m, &expect) in sieve.iter().enumerate() {
            assert_eq!(is_prime(m as u64), expect, "m = {m}");
        }
        assert!(is_prime(37) && !is_prime(1) && !is_prime(36));
        // strong pseudoprime to bases 2..=31
        assert!(!is_prime(3_825_123_056_546_413_051));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn log_binomial_against_exact() {
        assert!((log_binomial(7, 3).unwrap().ln_f64() - 35f64.ln()).abs() < 1e-14);
        assert!(log_binomial(50, 50).unwrap().ln_f64().abs() < 1e-15);
        let exact = LogReal::from_bigint(&binomial(1000, 500).unwrap());
        let got = log_binomial(1000, 500).unwrap();
        assert!(((got.ln - exact.ln).to_f64() / exact.ln_f64()).abs() < 1e-25);
    }

    #[test]
    fn stirling_joins_table_smoothly() {
        // ln 257! from the series vs table value ln 256! + ln 257
        let via_table = factorial_table()[256] + DoubleDouble::from_f64(257.0).ln();
        assert!((ln_factorial(257) - via_table).abs().to_f64() < 1e-26);
    }

    #[test]
    fn log_tail_against_exact() {
        for &(n, p) in &[(8u64, 5u64), (96, 37), (1000, 260), (1000, 700), (3000, 1501), (64, 65)] {
            let exact = LogReal::from_bigint(&binomial_tail_sum(n, p));
            let got = log_binomial_tail(n, p);
            assert!((got.ln - exact.ln).abs().to_f64() < 1e-20, "n={n} p={p}");
        }
        assert!(log_binomial_tail(5, 0).is_zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn exp_log_binomial_matches_exact(n in 1u64..=2000, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).round() as u64;
            let exact = LogReal::from_bigint(&binomial(n, k).unwrap());
            let got = log_binomial(n, k).unwrap();
            // relative error of the value = absolute error of its log
            prop_assert!((got.ln - exact.ln).abs().to_f64() < 1e-12);
        }

        #[test]
        fn rational_times_reciprocal_is_one(num in 1i64..1_000_000_000, den in 1i64..1_000_000_000, neg in any::<bool>()) {
            let q = BigRational::new(BigInt::from(if neg { -num } else { num }), BigInt::from(den));
            prop_assert!(q.denom() > &BigInt::zero());
            prop_assert_eq!(&q * q.recip(), BigRational::one());
        }
    }
}
