//! Optimality of t^m + m n^{m-1} t among nonnegative-coefficient polynomials
//! minimized at -a: the ratio h(n) / (2h(n) - 2h(-a)) and a constrained search.
//!
//! Internally everything runs in normalized coordinates c_j = u_j n^j,
//! x = t/n, s = a/n, where the class conditions are scale-free.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const GRID: usize = 10_000;
pub const DERIV_TOL: f64 = 1e-9;

/// h(t) = sum u_j t^j on [-n, n], meant to be minimized at t = -a.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidatePolynomial {
    /// u_0 .. u_m
    pub coeffs: Vec<f64>,
    pub m: usize,
    pub a: f64,
    pub n: f64,
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &u| acc * x + u)
}

fn deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(j, &u)| j as f64 * u).collect()
}

impl CandidatePolynomial {
    pub fn new(coeffs: Vec<f64>, a: f64, n: f64) -> Result<Self> {
        if coeffs.len() < 2 || !(n > 0.0) || !(a > 0.0 && a <= n) {
            return Err(Error::InvalidArgument("need degree >= 1, n > 0 and a in (0, n]".into()));
        }
        Ok(Self { m: coeffs.len() - 1, coeffs, a, n })
    }

    /// t^{2k} + 2k a^{2k-1} t, the polynomial behind the tensor construction.
    pub fn construction(k: u32, a: f64, n: f64) -> Result<Self> {
        let m = 2 * k as usize;
        let mut c = vec![0.0; m + 1];
        c[1] = m as f64 * a.powi(m as i32 - 1);
        c[m] = 1.0;
        Self::new(c, a, n)
    }

    pub fn eval(&self, t: f64) -> f64 {
        horner(&self.coeffs, t)
    }

    /// c_j = u_j n^j
    pub fn normalized(&self) -> Vec<f64> {
        self.coeffs.iter().enumerate().map(|(j, &u)| u * self.n.powi(j as i32)).collect()
    }

    fn s(&self) -> f64 {
        self.a / self.n
    }

    /// Why the polynomial is not in the class, if it is not.
    pub fn class_violation(&self) -> Option<String> {
        let c = self.normalized();
        let s = self.s();
        if let Some(j) = c.iter().position(|&x| x < 0.0 || !x.is_finite()) {
            return Some(format!("coefficient u_{j} is negative or not finite"));
        }
        let dc = deriv(&c);
        let dscale: f64 = dc.iter().enumerate().map(|(i, &v)| v * s.powi(i as i32)).sum::<f64>().max(f64::MIN_POSITIVE);
        let dv = horner(&dc, -s);
        if dv.abs() > DERIV_TOL * dscale {
            return Some(format!("h'(-a) = {} (relative {}) is not zero", dv / self.n, dv.abs() / dscale));
        }
        let scale: f64 = c.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        let h_min = horner(&c, -s);
        let floor = h_min - DERIV_TOL * scale;
        let mut probes: Vec<f64> = (0..=GRID).map(|i| -1.0 + 2.0 * i as f64 / GRID as f64).collect();
        probes.extend(critical_points(&dc));
        if let Some(&x) = probes.iter().find(|&&x| horner(&c, x) < floor) {
            return Some(format!("h({}) = {} lies below h(-a) = {}", x * self.n, horner(&c, x), h_min));
        }
        None
    }

    /// Member of the class with the minimum at -a.
    pub fn is_member(&self) -> bool {
        self.class_violation().is_none()
    }

    /// Member of the reduced class: additionally h(-a) <= 0.
    pub fn is_reduced_member(&self) -> bool {
        self.is_member() && self.eval(-self.a) <= self.zero_tol()
    }

    fn zero_tol(&self) -> f64 {
        1e-12 * self.normalized().iter().sum::<f64>()
    }
}

/// Roots of a polynomial in [-1, 1]: sign changes on a grid, then bisection.
fn critical_points(dc: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let xs: Vec<f64> = (0..=GRID).map(|i| -1.0 + 2.0 * i as f64 / GRID as f64).collect();
    for w in xs.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (horner(dc, lo), horner(dc, hi));
        if flo == 0.0 {
            out.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if horner(dc, mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

/// t^m + m n^{m-1} t for even m.
pub fn h_star(m: usize, n: f64) -> Result<CandidatePolynomial> {
    if m < 2 || m % 2 == 1 {
        return Err(Error::InvalidArgument(format!("h* needs even m >= 2, got {m}")));
    }
    let mut c = vec![0.0; m + 1];
    c[1] = m as f64 * n.powi(m as i32 - 1);
    c[m] = 1.0;
    CandidatePolynomial::new(c, n, n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioValue {
    /// h(n) / (2h(n) - 2h(-a))
    pub value: f64,
    pub h_n: f64,
    pub h_minus_a: f64,
    /// |h(-a)| / h(n)
    pub objective: f64,
}

pub fn ratio(h: &CandidatePolynomial) -> Result<RatioValue> {
    let h_n = h.eval(h.n);
    let h_minus_a = h.eval(-h.a);
    if h_minus_a > h.zero_tol() {
        return Err(Error::NotInReducedClass(h_minus_a));
    }
    Ok(RatioValue { value: h_n / (2.0 * h_n - 2.0 * h_minus_a), h_n, h_minus_a, objective: h_minus_a.abs() / h_n })
}

/// Best value of |h(-a)|/h(n) over the class: (m-1)/(m+1) for even m and
/// the degree m-1 value (m-2)/m for odd m.
pub fn objective_bound(m: usize) -> f64 {
    let e = if m % 2 == 0 { m } else { m - 1 };
    (e as f64 - 1.0) / (e as f64 + 1.0)
}

/// Ratio value matching `objective_bound`: 1 / (2 + 2 obj).
pub fn ratio_bound(m: usize) -> f64 {
    1.0 / (2.0 + 2.0 * objective_bound(m))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub m: usize,
    pub n: f64,
    pub a: f64,
    pub samples: usize,
    pub best: CandidatePolynomial,
    pub best_ratio: f64,
    pub best_objective: f64,
    /// Raw samples that could not be projected onto the constraint.
    pub resampled: usize,
}

/// Map a raw nonnegative vector onto {h'(-a) = 0, h(n) = 1} by scaling the
/// odd and even groups separately; None when one group is empty.
fn project(z: &[f64], s: f64) -> Option<Vec<f64>> {
    let (mut odd, mut even) = (0.0, 0.0);
    for (j, &v) in z.iter().enumerate().skip(1) {
        let w = j as f64 * v * s.powi(j as i32 - 1);
        if j % 2 == 1 {
            odd += w;
        } else {
            even += w;
        }
    }
    if !(odd > 0.0 && even > 0.0) {
        return None;
    }
    let mut c: Vec<f64> = z.iter().enumerate().map(|(j, &v)| if j % 2 == 1 { v / odd } else { v / even }).collect();
    let total: f64 = c.iter().sum();
    c.iter_mut().for_each(|x| *x /= total);
    Some(c)
}

/// -h(-a) with h(n) = 1.
fn objective(c: &[f64], s: f64) -> f64 {
    -horner(c, -s)
}

fn raw_sample(seed: u64, i: usize, m: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    (0..=m).map(|_| if rng.gen_bool(0.5) { -(1.0 - rng.gen::<f64>()).ln() } else { 0.0 }).collect()
}

fn candidate(c: &[f64], a: f64, n: f64) -> CandidatePolynomial {
    let u = c.iter().enumerate().map(|(j, &v)| v / n.powi(j as i32)).collect();
    CandidatePolynomial { coeffs: u, m: c.len() - 1, a, n }
}

fn admissible(c: &[f64], s: f64, a: f64, n: f64) -> bool {
    objective(c, s) >= 0.0 && candidate(c, a, n).is_member()
}

/// Local moves around an incumbent: drop one coefficient, or jitter all
/// of them multiplicatively with shrinking amplitude.
fn refine(z: &mut Vec<f64>, best: &mut f64, s: f64, a: f64, n: f64, rng: &mut ChaCha8Rng) {
    let mut eps = 0.5;
    while eps > 1e-7 {
        let mut improved = false;
        for j in 0..z.len() {
            if z[j] == 0.0 {
                continue;
            }
            let mut t = z.clone();
            t[j] = 0.0;
            if let Some(c) = project(&t, s) {
                let o = objective(&c, s);
                if o > *best && admissible(&c, s, a, n) {
                    *z = t;
                    *best = o;
                    improved = true;
                }
            }
        }
        for _ in 0..20 {
            let t: Vec<f64> = z.iter().map(|&v| v * (eps * (2.0 * rng.gen::<f64>() - 1.0)).exp()).collect();
            if let Some(c) = project(&t, s) {
                let o = objective(&c, s);
                if o > *best && admissible(&c, s, a, n) {
                    *z = t;
                    *best = o;
                    improved = true;
                }
            }
        }
        if !improved {
            eps *= 0.5;
        }
    }
}

/// Random search for the class member of degree <= m minimizing the ratio
/// at a = n.
pub fn search_optimum(m: usize, n: f64, samples: usize, seed: u64) -> Result<SearchResult> {
    search_optimum_at(m, n, n, samples, seed)
}

/// The same search with the minimum prescribed at -a, a in (0, n].
pub fn search_optimum_at(m: usize, n: f64, a: f64, samples: usize, seed: u64) -> Result<SearchResult> {
    if m < 1 || samples == 0 || !(n > 0.0) || !(a > 0.0 && a <= n) {
        return Err(Error::InvalidArgument("need m >= 1, samples >= 1, 0 < a <= n".into()));
    }
    let s = a / n;
    // sample i depends only on (seed, i), so a longer run extends a shorter one
    let scored: Vec<Option<(Vec<f64>, f64)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let z = raw_sample(seed, i, m);
            project(&z, s).map(|c| {
                let o = objective(&c, s);
                (z, o)
            })
        })
        .collect();
    let resampled = scored.iter().filter(|x| x.is_none()).count();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for (z, o) in scored.into_iter().flatten() {
        if best.as_ref().is_some_and(|b| o <= b.1) {
            continue;
        }
        let c = project(&z, s).expect("projected before");
        if !admissible(&c, s, a, n) {
            continue;
        }
        let (mut z, mut o) = (z, o);
        refine(&mut z, &mut o, s, a, n, &mut rng);
        best = Some((z, o));
    }
    let (z, o) = best.ok_or_else(|| Error::NonConvergence("no admissible sample found".into()))?;
    let c = project(&z, s).expect("incumbent is feasible");
    let best = candidate(&c, a, n);
    Ok(SearchResult { m, n, a, samples, best_ratio: 1.0 / (2.0 + 2.0 * o), best_objective: o, best, resampled })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalitySplit {
    /// sum over odd j of u_j n^j
    pub lhs: f64,
    /// factor * sum over even j of u_j n^j
    pub rhs: f64,
    pub pass: bool,
    /// m for even m, m - 1 for odd m
    pub factor: usize,
}

/// Odd part <= m * even part (even m) or (m-1) * even part (odd m), for
/// class members at a = n with u_0 = 0.
pub fn verify_inequality_10_11(h: &CandidatePolynomial) -> Result<InequalitySplit> {
    if h.coeffs[0] != 0.0 {
        return Err(Error::InvalidArgument(format!("u_0 = {} must be zero", h.coeffs[0])));
    }
    if (h.a - h.n).abs() > 1e-12 * h.n {
        return Err(Error::InvalidArgument("the split applies at a = n".into()));
    }
    if let Some(why) = h.class_violation() {
        return Err(Error::NotInClass(why));
    }
    let c = h.normalized();
    let odd: f64 = c.iter().skip(1).step_by(2).sum();
    let even: f64 = c.iter().step_by(2).sum();
    let factor = if h.m % 2 == 0 { h.m } else { h.m - 1 };
    let rhs = factor as f64 * even;
    Ok(InequalitySplit { lhs: odd, rhs, pass: odd <= rhs * (1.0 + 1e-12), factor })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AReduction {
    /// (a, best objective |h(-a)|/h(n) found at that a)
    pub entries: Vec<(f64, f64)>,
    /// Grid maximum attained at the largest a, within 1e-4.
    pub consistent: bool,
}

pub fn a_reduction_check(m: usize, n: f64, a_grid: &[f64], samples: usize, seed: u64) -> Result<AReduction> {
    if a_grid.iter().any(|&a| !(a > 0.0 && a <= n)) {
        return Err(Error::InvalidArgument("a_grid must lie in (0, n]".into()));
    }
    let entries: Vec<(f64, f64)> = a_grid
        .iter()
        .map(|&a| search_optimum_at(m, n, a, samples, seed).map(|r| (a, r.best_objective)))
        .collect::<Result<_>>()?;
    let consistent = match entries.iter().max_by(|x, y| x.0.total_cmp(&y.0)) {
        Some(&(_, at_top)) => entries.iter().all(|&(_, o)| o <= at_top + 1e-4),
        None => true,
    };
    Ok(AReduction { entries, consistent })
}
