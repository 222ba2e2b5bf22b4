//! Pigeonhole lower bound |Sigma| / sum_{i<p} C(n,i), its asymptotic base,
//! the d0 search, and the shrinking-radius inequality chain.

use crate::error::{Error, Result};
use crate::exactnum::{binomial, binomial_tail_sum, log_binomial, log_binomial_tail, BigInt, LogReal};
use crate::params::{self, choose_a, choose_n, plan_shrinking_unchecked, rsq_of, solve_a0, solve_k, Mode, ParamSet};
use crate::ser;
use num_bigint::BigUint;
use num_traits::{One, Pow, ToPrimitive};
use serde::Serialize;

pub use crate::params::InequalityCheck;

/// Exact arithmetic is used up to this n; beyond it only log-space.
pub const EXACT_N_CAP: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountBound {
    pub n: u64,
    pub p: u64,
    /// C(n-1, n/2-1) = |Sigma|
    #[serde(serialize_with = "ser::bigint_opt")]
    pub numerator: Option<BigInt>,
    /// sum_{i<p} C(n, i)
    #[serde(serialize_with = "ser::bigint_opt")]
    pub denominator: Option<BigInt>,
    pub numerator_log: LogReal,
    pub denominator_log: LogReal,
    pub ratio_log: LogReal,
    /// d + 1
    #[serde(serialize_with = "ser::display")]
    pub threshold: BigInt,
    pub passes: bool,
}

pub fn lower_bound(ps: &ParamSet) -> CountBound {
    count_bound(ps.n, ps.p, ps.d)
}

/// |Sigma(n)| / sum_{i<p} C(n,i) against d + 1.
pub fn count_bound(n: u64, p: u64, d: u128) -> CountBound {
    let threshold = BigInt::from(d) + 1;
    let numerator_log = log_binomial(n - 1, n / 2 - 1).expect("n >= 2");
    let denominator_log = log_binomial_tail(n, p);
    let ratio_log = numerator_log / denominator_log;
    let (numerator, denominator, passes) = if n <= EXACT_N_CAP {
        let num = binomial(n - 1, n / 2 - 1).expect("n >= 2");
        let den = binomial_tail_sum(n, p);
        let passes = num > &den * &threshold;
        (Some(num), Some(den), passes)
    } else {
        (None, None, ratio_log > LogReal::from_bigint(&threshold))
    };
    CountBound { n, p, numerator, denominator, numerator_log, denominator_log, ratio_log, threshold, passes }
}

/// Binary entropy in bits.
pub fn binary_entropy(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        return 0.0;
    }
    -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticBase {
    pub p0: f64,
    /// 2^{H(p0)}: growth base of sum_{i < p0 n} C(n, i)
    pub c_prime: f64,
    /// 2 / c_prime: growth base of the count bound
    pub c: f64,
    /// (n, (sum_{i<ceil(p0 n)} C(n,i))^{1/n}) from exact sums
    pub empirical: Vec<(u64, f64)>,
    /// |empirical - c_prime| strictly decreasing along n
    pub monotone: bool,
}

pub const EMPIRICAL_NS: [u64; 3] = [400, 800, 1600];

pub fn asymptotic_base(ps: &ParamSet) -> Result<AsymptoticBase> {
    asymptotic_base_p0(ps.p0())
}

pub fn asymptotic_base_p0(p0: f64) -> Result<AsymptoticBase> {
    if !(0.25..0.5).contains(&p0) {
        return Err(Error::InvalidArgument(format!("p0 = {p0} outside [1/4, 1/2)")));
    }
    let c_prime = 2f64.powf(binary_entropy(p0));
    let empirical: Vec<(u64, f64)> = EMPIRICAL_NS
        .iter()
        .map(|&n| {
            let p = (p0 * n as f64).ceil() as u64;
            let s = LogReal::from_bigint(&binomial_tail_sum(n, p));
            (n, (s.ln_f64() / n as f64).exp())
        })
        .collect();
    let errs: Vec<f64> = empirical.iter().map(|(_, v)| (v - c_prime).abs()).collect();
    Ok(AsymptoticBase { p0, c_prime, c: 2.0 / c_prime, empirical, monotone: errs.windows(2).all(|w| w[1] < w[0]) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct D0Report {
    pub r: f64,
    pub k: u32,
    #[serde(serialize_with = "ser::display")]
    pub d0: u128,
    pub params: ParamSet,
    pub certificate: CountBound,
    /// Previous grid point n^{2k}+1 and its (failing) bound.
    #[serde(serialize_with = "ser::display_opt")]
    pub previous_d: Option<u128>,
    pub previous: Option<CountBound>,
    /// Largest d sharing d0's n at which the bound still passes.
    #[serde(serialize_with = "ser::display")]
    pub last_passing_in_block: u128,
    pub grid_points: u64,
}

pub const D0_CAP: u128 = 1_000_000_000_000_000_000_000_000;
pub const D0_GRID_BUDGET: u64 = 200_000;

/// Least d with |Sigma| > (d+1) sum_{i<p} C(n,i) for the fixed-radius
/// parameters at d. Between consecutive grid points n^{2k}+1 the triple
/// (n, a, p) is constant and the test only gets harder as d grows, so the
/// least passing d is always a grid point.
pub fn find_d0(r: f64, tol: f64) -> Result<D0Report> {
    if !(r > 0.5) || !r.is_finite() {
        return Err(Error::RadiusNotAboveHalf);
    }
    let rsq = rsq_of(r);
    let k = solve_k(&rsq)?;
    let half = crate::BigRational::new(BigInt::one(), BigInt::from(2));
    let a0 = if rsq >= half { 0.0 } else { solve_a0(&rsq, k, tol)? };
    let e = 2 * k;
    let mut prev: Option<(u128, CountBound)> = None;
    let mut n = 4u64;
    for grid_points in 1..=D0_GRID_BUDGET {
        let Some(d) = BigUint::from(n).pow(e).to_u128().and_then(|v| v.checked_add(1)).filter(|&d| d <= D0_CAP) else {
            return Err(Error::NoD0(format!("grid passed d = 1e24 at n = {n}")));
        };
        debug_assert_eq!(choose_n(d, k)?, n);
        let (a, p) = choose_a(a0, n)?;
        let cb = count_bound(n, p, d);
        if cb.passes {
            let params = ParamSet { mode: Mode::FixedRadius, r, rsq, k, a0, n, a, p, d };
            let block_end = BigUint::from(n + 4).pow(e);
            let last = match (&cb.numerator, &cb.denominator) {
                (Some(num), Some(den)) => {
                    let v: BigInt = (num - 1u32) / den - 1;
                    v.min(BigInt::from(block_end)).to_u128().unwrap_or(u128::MAX)
                }
                // log-space: ratio - 1, floored
                _ => (cb.ratio_log.to_f64() - 1.0).floor().min(block_end.to_f64().unwrap_or(f64::MAX)) as u128,
            };
            return Ok(D0Report {
                r,
                k,
                d0: d,
                params,
                certificate: cb,
                previous_d: prev.as_ref().map(|x| x.0),
                previous: prev.map(|x| x.1),
                last_passing_in_block: last,
                grid_points,
            });
        }
        prev = Some((d, cb));
        n += 4;
    }
    Err(Error::NoD0(format!("grid budget of {D0_GRID_BUDGET} points exhausted")))
}

/// ln(bound) / d^{1/(2k)}; negative when the bound is below 1.
pub fn theorem2_exponent(ps: &ParamSet) -> f64 {
    let root = (ps.d as f64).ln() / (2.0 * ps.k as f64);
    lower_bound(ps).ratio_log.ln_f64() / root.exp()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem3Report {
    #[serde(serialize_with = "ser::display")]
    pub d: u128,
    pub c_phi: f64,
    pub phi: Option<f64>,
    pub params: Option<ParamSet>,
    /// Set when (k, n, a, p) could not be formed at all.
    pub pipeline_error: Option<String>,
    pub checks: Vec<InequalityCheck>,
    /// ln[(1/2) C(n, n/2) / sum_{i<p} C(n,i)]
    pub final_ratio_log: Option<LogReal>,
    pub all_pass: bool,
}

impl Theorem3Report {
    pub fn first_failure(&self) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// Evaluate every inequality of the shrinking-radius chain at d.
pub fn theorem3_check(d: u128, c_phi: f64) -> Theorem3Report {
    let phi = params::Phi::new(d, c_phi).ok().map(|p| p.phi);
    match plan_shrinking_unchecked(d, c_phi) {
        Ok((ps, mut checks)) => {
            let (iv, ratio) = params::count_ratio_check(&ps);
            checks.push(iv);
            let all_pass = checks.iter().all(|c| c.pass);
            Theorem3Report {
                d,
                c_phi,
                phi,
                params: Some(ps),
                pipeline_error: None,
                checks,
                final_ratio_log: Some(ratio),
                all_pass,
            }
        }
        Err(e) => Theorem3Report {
            d,
            c_phi,
            phi,
            params: None,
            pipeline_error: Some(e.to_string()),
            checks: vec![InequalityCheck {
                name: "parameter_pipeline".into(),
                lhs: f64::NAN,
                rhs: f64::NAN,
                pass: false,
            }],
            final_ratio_log: None,
            all_pass: false,
        },
    }
}
