//! Avoiding families and the dimension-bound certificate.

use super::mis::{max_avoiding_exact, MIS_CAP_N};
use super::poly::{build_reduced, excluded_residue, residue_product};
use super::rank::rank_gfp;
use crate::construction::{attainable_inner, gen_sigma, inner_sign_unchecked, SignVector};
use crate::error::{Error, Result};
use crate::exactnum::{binomial, binomial_tail_sum, is_prime, BigInt};
use crate::ser;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Members of Sigma, no two distinct ones at inner product `forbidden`
/// (unless built unchecked for adversarial tests).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AvoidingFamily {
    pub members: Vec<SignVector>,
    pub forbidden: i64,
}

impl AvoidingFamily {
    pub fn new(members: Vec<SignVector>, forbidden: i64) -> Result<Self> {
        let q = Self { members, forbidden };
        if !q.is_avoiding() {
            return Err(Error::InvalidArgument(format!("family contains a pair at inner product {forbidden}")));
        }
        Ok(q)
    }

    pub fn new_unchecked(members: Vec<SignVector>, forbidden: i64) -> Self {
        Self { members, forbidden }
    }

    pub fn is_avoiding(&self) -> bool {
        let m = &self.members;
        (0..m.len()).all(|i| (i + 1..m.len()).all(|j| inner_sign_unchecked(&m[i], &m[j]) != self.forbidden))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Lexicographic scan of `sigma`, keeping each compatible vector.
    pub fn greedy(sigma: &[SignVector], forbidden: i64) -> Self {
        Self::greedy_in_order(sigma.iter().copied(), forbidden, usize::MAX)
    }

    /// Greedy over a seeded shuffle of `sigma`, stopping at `cap` members.
    pub fn random_greedy(sigma: &[SignVector], forbidden: i64, seed: u64, cap: usize) -> Self {
        let mut order = sigma.to_vec();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::greedy_in_order(order.into_iter(), forbidden, cap)
    }

    fn greedy_in_order(it: impl Iterator<Item = SignVector>, forbidden: i64, cap: usize) -> Self {
        let mut members: Vec<SignVector> = Vec::new();
        for x in it {
            if members.len() >= cap {
                break;
            }
            if members.iter().all(|y| inner_sign_unchecked(&x, y) != forbidden) {
                members.push(x);
            }
        }
        Self { members, forbidden }
    }
}

/// (lhs, rhs) = ([(x,y) = -a mod p], [P'_x(y) != 0 mod p]).
pub fn property_check(x: &SignVector, y: &SignVector, p: u64, a: u64) -> Result<(bool, bool)> {
    let t = crate::construction::inner_sign(x, y)?;
    let lhs = t.rem_euclid(p as i64) as u64 == excluded_residue(a, p);
    let rhs = build_reduced(x, p, a)?.evaluate(y) != 0;
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertySweep {
    pub pairs: u64,
    pub exceptions: u64,
}

/// The Property over all ordered pairs of Sigma(n): P'_x is built in the
/// multilinear basis and evaluated on the whole cube by Hadamard transform.
pub fn property_sweep(n: usize, p: u64, a: u64) -> Result<PropertySweep> {
    let sigma = gen_sigma(n)?;
    let e = excluded_residue(a, p);
    let exceptions = sigma
        .par_iter()
        .map(|x| -> Result<u64> {
            let table = build_reduced(x, p, a)?.evaluate_all();
            Ok(sigma
                .iter()
                .filter(|y| {
                    let lhs = inner_sign_unchecked(x, y).rem_euclid(p as i64) as u64 == e;
                    let rhs = table[y.mask() as usize] != 0;
                    lhs != rhs
                })
                .count() as u64)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    let s = sigma.len() as u64;
    Ok(PropertySweep { pairs: s * s, exceptions })
}

/// Number of multilinear monomials of degree <= p-1.
pub fn dimension_bound(n: u64, p: u64) -> BigInt {
    binomial_tail_sum(n, p)
}

fn check_relation(n: u64, p: u64, a: u64) -> Result<()> {
    if n as i64 - 4 * p as i64 != -(a as i64) {
        return Err(Error::RelationViolated { lhs: n as i64 - 4 * p as i64, rhs: -(a as i64) });
    }
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("p = {p} is not prime")));
    }
    Ok(())
}

/// Evaluation-form check of M[i][j] = P'_{x_i}(x_j): nonzero diagonal and
/// zero off-diagonal certify that the P'_{x_i} are independent.
pub fn independence_verify(q: &AvoidingFamily, p: u64, a: u64) -> Result<bool> {
    let Some(first) = q.members.first() else { return Ok(true) };
    check_relation(first.n() as u64, p, a)?;
    // the entry depends on (x_i, x_j) only through its residue mod p
    let by_residue: Vec<u64> = (0..p as i64).map(|t| residue_product(t, p, a)).collect();
    let m = &q.members;
    let ok = (0..m.len()).into_par_iter().all(|i| {
        (0..m.len()).all(|j| {
            let t = inner_sign_unchecked(&m[i], &m[j]);
            let v = by_residue[t.rem_euclid(p as i64) as usize];
            if i == j {
                v != 0
            } else {
                v == 0
            }
        })
    });
    Ok(ok)
}

/// Coefficient rows P'_x for each x, built in parallel.
pub fn polynomial_rows(xs: &[SignVector], p: u64, a: u64) -> Result<Vec<super::ReducedPolynomial>> {
    xs.par_iter().map(|x| build_reduced(x, p, a)).collect()
}

/// Rank computations are attempted only below this many matrix entries.
pub const RANK_ENTRY_CAP: u128 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCertificate {
    pub n: u64,
    pub p: u64,
    pub a: u64,
    #[serde(serialize_with = "ser::display")]
    pub bound: BigInt,
    #[serde(serialize_with = "ser::display")]
    pub sigma_size: BigInt,
    pub mis_exact: Option<usize>,
    /// Rank over GF(p) of {P'_x : x in Sigma}.
    pub rank: Option<usize>,
    /// Sizes of the sampled avoiding families certified by independence_verify.
    pub sampled_families: Vec<usize>,
    pub vacuous: bool,
    /// No distinct pair has (x,y) = -a mod p without (x,y) = -a.
    pub residue_exclusion: bool,
    /// -a = 0 mod p: the factor i = 0 is the one left out.
    pub minus_a_zero_mod_p: bool,
    pub verdict: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct LemmaOptions {
    pub families: usize,
    pub family_cap: usize,
    pub seed: u64,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        Self { families: 8, family_cap: 2000, seed: 0 }
    }
}

pub fn lemma_bound_check(n: u64, p: u64, a: u64) -> Result<LemmaCertificate> {
    lemma_bound_check_with(n, p, a, &LemmaOptions::default())
}

pub fn lemma_bound_check_with(n: u64, p: u64, a: u64, opts: &LemmaOptions) -> Result<LemmaCertificate> {
    check_relation(n, p, a)?;
    if n == 0 || n % 4 != 0 {
        return Err(Error::NotMultipleOfFour(n));
    }
    let bound = dimension_bound(n, p);
    let sigma_size = binomial(n - 1, n / 2 - 1)?;
    let forbidden = -(a as i64);
    let e = excluded_residue(a, p) as i64;
    let residue_exclusion = attainable_inner(n).into_iter().all(|t| t == forbidden || t.rem_euclid(p as i64) != e);
    let mut verdict = true;

    let mis_exact = if n as usize <= MIS_CAP_N {
        let m = max_avoiding_exact(n as usize, forbidden)?.size;
        verdict &= BigInt::from(m) <= bound;
        Some(m)
    } else {
        None
    };

    let cols = bound.to_u128().unwrap_or(u128::MAX);
    let rows = sigma_size.to_u128().unwrap_or(u128::MAX);
    let sigma = gen_sigma(n as usize)?;
    let rank = if rows.saturating_mul(cols) <= RANK_ENTRY_CAP {
        let r = rank_gfp(&polynomial_rows(&sigma, p, a)?, p);
        verdict &= BigInt::from(r) <= bound;
        Some(r)
    } else {
        None
    };

    // the evaluation argument needs the residue exclusion; without it the
    // sampled families prove nothing
    let mut sampled_families = Vec::new();
    let families = if residue_exclusion { opts.families } else { 0 };
    for s in 0..families {
        let q = AvoidingFamily::random_greedy(&sigma, forbidden, opts.seed.wrapping_add(s as u64), opts.family_cap);
        verdict &= independence_verify(&q, p, a)? && BigInt::from(q.len()) <= bound;
        sampled_families.push(q.len());
    }

    Ok(LemmaCertificate {
        n,
        p,
        a,
        vacuous: bound >= sigma_size,
        bound,
        sigma_size,
        mis_exact,
        rank,
        sampled_families,
        residue_exclusion,
        minus_a_zero_mod_p: e == 0,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::inner_sign;

    #[test]
    fn dimension_examples() {
        assert_eq!(dimension_bound(16, 5), BigInt::from(2517));
        assert_eq!(dimension_bound(12, 5), BigInt::from(794));
        assert_eq!(dimension_bound(9, 1), BigInt::from(1));
    }

    #[test]
    fn property_examples() {
        let s = gen_sigma(12).unwrap();
        // n - 4p = -a: (x,x) = 12 = -8 mod 5
        assert_eq!(property_check(&s[3], &s[3], 5, 8).unwrap(), (true, true));
        let y = s.iter().find(|y| inner_sign(&s[0], y).unwrap() == 0).unwrap();
        assert_eq!(property_check(&s[0], y, 5, 8).unwrap(), (false, false));
        assert_eq!(property_sweep(12, 5, 8).unwrap(), PropertySweep { pairs: 462 * 462, exceptions: 0 });
    }

    #[test]
    fn residue_exclusion_from_divisibility() {
        for &(n, p, a) in &[(12u64, 5u64, 8u64), (16, 5, 4), (8, 3, 4), (20, 7, 8)] {
            assert_eq!(n as i64 - 4 * p as i64, -(a as i64));
            let s = gen_sigma(n as usize).unwrap();
            let banned: Vec<i64> = [1, 2, 3, 5, 6, 7].iter().map(|j| n as i64 - j * p as i64).collect();
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    assert!(!banned.contains(&inner_sign_unchecked(&s[i], &s[j])));
                }
            }
        }
    }

    #[test]
    fn families_independent_and_full_rank() {
        let s = gen_sigma(12).unwrap();
        let g = AvoidingFamily::greedy(&s, -8);
        assert!(g.is_avoiding());
        assert!(independence_verify(&g, 5, 8).unwrap());
        assert_eq!(rank_gfp(&polynomial_rows(&g.members, 5, 8).unwrap(), 5), g.len());
        for seed in 0..100 {
            let q = AvoidingFamily::random_greedy(&s, -8, seed, usize::MAX);
            assert!(q.is_avoiding());
            assert!(independence_verify(&q, 5, 8).unwrap());
            assert_eq!(rank_gfp(&polynomial_rows(&q.members, 5, 8).unwrap(), 5), q.len());
        }
        let one = AvoidingFamily::new(vec![s[0]], -8).unwrap();
        assert!(independence_verify(&one, 5, 8).unwrap());
    }

    #[test]
    fn injected_violation_detected() {
        let s = gen_sigma(12).unwrap();
        let mut q = AvoidingFamily::greedy(&s, -8);
        let x = q.members[0];
        let bad = *s.iter().find(|y| inner_sign(&x, y).unwrap() == -8).unwrap();
        q.members.push(bad);
        assert!(AvoidingFamily::new(q.members.clone(), -8).is_err());
        let q = AvoidingFamily::new_unchecked(q.members, -8);
        assert!(!independence_verify(&q, 5, 8).unwrap());
    }

    #[test]
    fn relation_enforced() {
        let s = gen_sigma(12).unwrap();
        let q = AvoidingFamily::greedy(&s, -4);
        assert!(matches!(independence_verify(&q, 5, 4), Err(Error::RelationViolated { .. })));
        assert!(matches!(lemma_bound_check(12, 7, 8), Err(Error::RelationViolated { .. })));
    }

    #[test]
    fn certificate_12_5_8() {
        let c = lemma_bound_check(12, 5, 8).unwrap();
        assert_eq!(c.bound, BigInt::from(794));
        assert_eq!(c.sigma_size, BigInt::from(462));
        assert!(c.vacuous && c.verdict && c.residue_exclusion && !c.minus_a_zero_mod_p);
        assert_eq!(c.mis_exact, Some(210));
        assert!(c.rank.unwrap() <= 794);
    }

    #[test]
    fn literal_rule_when_minus_a_is_zero_mod_p() {
        // n = 4, a = 4, p = 2: the product is just (1 - t); residues collide
        let c = lemma_bound_check(4, 2, 4).unwrap();
        assert!(c.minus_a_zero_mod_p);
        assert!(!c.residue_exclusion);
        assert_eq!(c.mis_exact, Some(3));
    }
}
