//! Parameter pipelines: (r, d) -> (k, a0, n, a, p) for fixed radius, and
//! d -> (phi, r, k, a0, n, a, p) for the shrinking radius r = 1/2 + phi(d).

use crate::error::{Error, Result};
use crate::exactnum::{
    binomial_tail_sum, is_prime, log_binomial, rational_from_f64, rational_to_f64, BigInt, BigRational,
};
use crate::ser;
use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, Pow};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    FixedRadius,
    ShrinkingRadius {
        c_phi: f64,
        phi: f64,
    },
    /// Parameters supplied directly (desk experiments); only the
    /// arithmetic relations are enforced.
    Manual,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamSet {
    pub mode: Mode,
    pub r: f64,
    /// Exact square of the binary value of `r`.
    #[serde(serialize_with = "ser::rational")]
    pub rsq: BigRational,
    pub k: u32,
    pub a0: f64,
    pub n: u64,
    pub a: u64,
    pub p: u64,
    #[serde(serialize_with = "ser::display")]
    pub d: u128,
}

/// One named inequality `lhs < rhs` (or `<=`, per check) and its verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Phi {
    #[serde(serialize_with = "ser::display")]
    pub d: u128,
    pub c_phi: f64,
    pub phi: f64,
}

impl Phi {
    /// phi = c_phi ln ln d / ln d.
    pub fn new(d: u128, c_phi: f64) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidArgument(format!("ln ln d undefined or non-positive for d = {d}")));
        }
        if !(c_phi > 0.0) {
            return Err(Error::InvalidArgument(format!("c_phi must be positive, got {c_phi}")));
        }
        let ln_d = (d as f64).ln();
        Ok(Self { d, c_phi, phi: c_phi * ln_d.ln() / ln_d })
    }
}

impl ParamSet {
    pub fn p0(&self) -> f64 {
        self.a0 / 8.0 + 0.25
    }

    /// Directly supplied parameters, checked only for n = 4p - a and the
    /// divisibility/primality relations.
    pub fn manual(n: u64, k: u32, a: u64, p: u64, d: u128, r: f64) -> Result<Self> {
        let ps =
            ParamSet { mode: Mode::Manual, r, rsq: rsq_of(r), k, a0: 2.0 * a as f64 / n.max(1) as f64, n, a, p, d };
        ps.validate()?;
        Ok(ps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 4 != 0 {
            return Err(Error::NotMultipleOfFour(self.n));
        }
        if self.a == 0 || self.a % 4 != 0 {
            return Err(Error::InvalidArgument(format!("a = {} is not a positive multiple of 4", self.a)));
        }
        if !is_prime(self.p) {
            return Err(Error::InvalidArgument(format!("p = {} is not prime", self.p)));
        }
        if 4 * self.p != self.a + self.n {
            return Err(Error::RelationViolated { lhs: self.n as i64 - 4 * self.p as i64, rhs: -(self.a as i64) });
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        if self.mode == Mode::Manual {
            return Ok(());
        }
        let e = 2 * self.k;
        let d = BigUint::from(self.d);
        if BigUint::from(self.n).pow(e) >= d || BigUint::from(self.n + 4).pow(e) < d {
            return Err(Error::InvalidArgument(format!("n = {} is not the admissible n for d = {}", self.n, self.d)));
        }
        if (self.a as f64) < self.a0 * self.n as f64 / 2.0 {
            return Err(Error::InvalidArgument("a < a0 n / 2".into()));
        }
        Ok(())
    }

    /// Dimension n^{2k} spanned by the tensor images: the n tail
    /// coordinates repeat the words 1..1i because x_1 = 1.
    pub fn image_dim(&self) -> u128 {
        (self.n as u128).saturating_pow(2 * self.k)
    }
}

pub fn rsq_of(r: f64) -> BigRational {
    let q = rational_from_f64(r);
    &q * &q
}

/// Least k with rsq > (2k+1)/(8k), i.e. k > 1/(8 rsq - 2).
pub fn solve_k(rsq: &BigRational) -> Result<u32> {
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    if *rsq <= quarter {
        return Err(Error::RadiusNotAboveHalf);
    }
    let gap = rsq * BigInt::from(8) - BigInt::from(2);
    let k = gap.recip().floor().to_integer() + 1;
    u32::try_from(k).map_err(|_| Error::InvalidArgument("r too close to 1/2: k overflows".into()))
}

pub fn k_threshold(k: u32) -> BigRational {
    BigRational::new(BigInt::from(2 * k + 1), BigInt::from(8 * k))
}

/// u(a0) = (1 + 2k x^{2k-1}) / (2 + 4k x^{2k-1} + (4k-2) x^{2k}), x = a0/2.
pub fn u_eval(a0: f64, k: u32) -> Result<f64> {
    if !(0.0..=2.0).contains(&a0) || k == 0 {
        return Err(Error::InvalidArgument(format!("u(a0) needs a0 in [0,2] and k >= 1, got a0 = {a0}, k = {k}")));
    }
    let x = a0 / 2.0;
    let k = k as f64;
    let xo = x.powf(2.0 * k - 1.0);
    let xe = xo * x;
    Ok((1.0 + 2.0 * k * xo) / (2.0 + 4.0 * k * xo + (4.0 * k - 2.0) * xe))
}

pub fn u_exact(a0: &BigRational, k: u32) -> BigRational {
    let x = a0 / BigInt::from(2);
    let xo = Pow::pow(&x, 2 * k - 1);
    let xe = &xo * &x;
    let kk = BigInt::from(k);
    let one = BigRational::one();
    let num = &one + &xo * (&kk * 2);
    let den = &one * BigInt::from(2) + &xo * (&kk * 4) + &xe * (&kk * 4 - 2);
    num / den
}

/// Bisection for u(a0) = rsq on [0, 2], returning the right bracket end so
/// that u(a0) <= rsq always holds.
pub fn solve_a0(rsq: &BigRational, k: u32, tol: f64) -> Result<f64> {
    if k == 0 || !(tol > 0.0) {
        return Err(Error::InvalidArgument("solve_a0 needs k >= 1 and tol > 0".into()));
    }
    let u0 = BigRational::new(BigInt::one(), BigInt::from(2));
    if *rsq >= u0 || *rsq <= k_threshold(k) {
        return Err(Error::NoRoot { target: rational_to_f64(rsq), k });
    }
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    let mut u_lo = u0;
    let mut u_hi = k_threshold(k);
    loop {
        if rational_to_f64(&(&u_lo - &u_hi)) <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let u_mid = u_exact(&rational_from_f64(mid), k);
        if u_mid > *rsq {
            lo = mid;
            u_lo = u_mid;
        } else {
            hi = mid;
            u_hi = u_mid;
        }
    }
    Ok(hi)
}

/// Largest multiple of 4 with n^{2k} < d.
pub fn choose_n(d: u128, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let e = 2 * k;
    let err = Error::NoAdmissibleN { d, k };
    if d < 2 {
        return Err(err);
    }
    let m = (d - 1).nth_root(e);
    let n = m - m % 4;
    if n < 4 {
        return Err(err);
    }
    let n = n as u64;
    let dd = BigUint::from(d);
    assert!(BigUint::from(n).pow(e) < dd && BigUint::from(n + 4).pow(e) >= dd);
    // d^{1/2k} - 5 <= n
    assert!(BigUint::from(n + 5).pow(e) >= dd);
    Ok(n)
}

/// Least a = 0 mod 4, a >= max(a0 n / 2, 4), with (a+n)/4 prime.
pub fn choose_a(a0: f64, n: u64) -> Result<(u64, u64)> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::NotMultipleOfFour(n));
    }
    if !(0.0..2.0).contains(&a0) {
        return Err(Error::InvalidArgument(format!("a0 = {a0} outside [0, 2)")));
    }
    let lower = (rational_from_f64(a0) * BigInt::from(n) / BigInt::from(2)).ceil().to_integer();
    let lower = u64::try_from(lower).expect("a0 n / 2 < n");
    let mut a = lower.div_ceil(4).max(1) * 4;
    while a <= 8 * n {
        let p = (a + n) / 4;
        if is_prime(p) {
            return Ok((a, p));
        }
        a += 4;
    }
    Err(Error::PrimeGapAnomaly { n })
}

/// Fixed-radius pipeline: solve_k -> solve_a0 -> choose_n -> choose_a.
pub fn plan_fixed(r: f64, d: u128, tol: f64) -> Result<ParamSet> {
    if !(r > 0.5) || !r.is_finite() {
        return Err(Error::RadiusNotAboveHalf);
    }
    let rsq = rsq_of(r);
    let k = solve_k(&rsq)?;
    // at r >= 1/sqrt(2) every a0 satisfies u(a0) <= r^2
    let a0 = if rsq >= BigRational::new(BigInt::one(), BigInt::from(2)) { 0.0 } else { solve_a0(&rsq, k, tol)? };
    let n = choose_n(d, k)?;
    let (a, p) = choose_a(a0, n)?;
    Ok(ParamSet { mode: Mode::FixedRadius, r, rsq, k, a0, n, a, p, d })
}

/// Shrinking-radius pipeline plus its parameter-level checks (i)-(iii).
pub fn plan_shrinking_unchecked(d: u128, c_phi: f64) -> Result<(ParamSet, Vec<InequalityCheck>)> {
    let phi = Phi::new(d, c_phi)?;
    let f = phi.phi;
    if !(f > 0.0) || f >= 4.0 {
        return Err(Error::InvalidArgument(format!("phi = {f} leaves no room for a0 = 2 - phi/2 in (0,2)")));
    }
    let r = 0.5 + f;
    let k_f = (1.0 / f).ceil();
    if k_f > u32::MAX as f64 / 4.0 {
        return Err(Error::InvalidArgument("k = ceil(1/phi) overflows".into()));
    }
    let k = k_f as u32;
    let a0 = 2.0 - f / 2.0;
    let n = choose_n(d, k)?;
    let (a, p) = choose_a(a0, n)?;
    let rsq = rsq_of(r);
    let ps = ParamSet { mode: Mode::ShrinkingRadius { c_phi, phi: f }, r, rsq, k, a0, n, a, p, d };
    let checks = parameter_checks(&ps, f);
    Ok((ps, checks))
}

fn parameter_checks(ps: &ParamSet, phi: f64) -> Vec<InequalityCheck> {
    let kt = k_threshold(ps.k);
    let ua0 = u_exact(&rational_from_f64(ps.a0), ps.k);
    let nf = ps.n as f64;
    let p_cap = nf / 2.0 - phi * nf / 20.0;
    vec![
        InequalityCheck {
            name: "k_threshold_below_r2".into(),
            lhs: rational_to_f64(&kt),
            rhs: rational_to_f64(&ps.rsq),
            pass: kt < ps.rsq,
        },
        InequalityCheck {
            name: "u_a0_below_r2".into(),
            lhs: rational_to_f64(&ua0),
            rhs: rational_to_f64(&ps.rsq),
            pass: ua0 < ps.rsq,
        },
        InequalityCheck {
            name: "a_below_n_and_p_gap".into(),
            lhs: ps.p as f64,
            rhs: p_cap,
            pass: ps.a < ps.n && (ps.p as f64) <= p_cap,
        },
    ]
}

/// Check (iv): ln[(1/2) C(n, n/2) / sum_{i<p} C(n,i)] against ln(d+2).
pub fn count_ratio_check(ps: &ParamSet) -> (InequalityCheck, crate::LogReal) {
    let half = crate::LogReal::from_f64(0.5);
    let ratio = half * log_binomial(ps.n, ps.n / 2).expect("n/2 <= n") / crate::exactnum::log_binomial_tail(ps.n, ps.p);
    let rhs = crate::LogReal::from_u128(ps.d.saturating_add(2));
    let check = InequalityCheck {
        name: "count_ratio_above_d_plus_2".into(),
        lhs: ratio.ln_f64(),
        rhs: rhs.ln_f64(),
        pass: ratio > rhs,
    };
    (check, ratio)
}

/// Shrinking-radius pipeline; errors naming the first failed check among
/// (i)-(iii). The count check (iv) is reported by `bounds::theorem3_check`.
pub fn plan_shrinking(d: u128, c_phi: f64, _tol: f64) -> Result<ParamSet> {
    let (ps, checks) = plan_shrinking_unchecked(d, c_phi)?;
    if let Some(c) = checks.iter().find(|c| !c.pass) {
        return Err(Error::BelowThreshold { check: c.name.clone(), lhs: c.lhs, rhs: c.rhs });
    }
    Ok(ps)
}

/// Exact |Sigma| / tail-sum pair used by several reports.
pub fn exact_counts(n: u64, p: u64) -> (BigInt, BigInt) {
    let sigma = crate::exactnum::binomial(n - 1, n / 2 - 1).expect("n >= 2");
    (sigma, binomial_tail_sum(n, p))
}
