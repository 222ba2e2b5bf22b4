//! Residue polynomials P_x(y) = prod_{i != -a mod p} (i - (x, y)) over GF(p).

use crate::construction::SignVector;
use crate::error::{Error, Result};
use crate::exactnum::is_prime;
use std::collections::{BTreeMap, HashMap};

/// The residue class i = -a (mod p) left out of the product.
pub fn excluded_residue(a: u64, p: u64) -> u64 {
    (p - a % p) % p
}

/// prod_{i != -a mod p} (i - t) mod p; P_x(y) when t = (x, y).
pub fn residue_product(t: i64, p: u64, a: u64) -> u64 {
    let e = excluded_residue(a, p);
    let t = t.rem_euclid(p as i64) as u64;
    let mut acc = 1u64;
    for i in (0..p).filter(|&i| i != e) {
        acc = acc * ((i + p - t) % p) % p;
    }
    acc
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("p = {p} is not prime")));
    }
    if p >= 1 << 31 {
        return Err(Error::InvalidArgument(format!("p = {p} too large for machine residues")));
    }
    Ok(())
}

/// A general polynomial in y_1..y_n over GF(p), exponent vector -> coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub n: usize,
    pub p: u64,
    pub terms: BTreeMap<Vec<u16>, u64>,
}

impl Polynomial {
    pub fn constant(n: usize, p: u64, c: u64) -> Self {
        let mut terms = BTreeMap::new();
        if c % p != 0 {
            terms.insert(vec![0; n], c % p);
        }
        Self { n, p, terms }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().map(|&x| x as u32).sum()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!((self.n, self.p), (other.n, other.p));
        let p = self.p;
        let mut out: BTreeMap<Vec<u16>, u64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let c = out.entry(e).or_insert(0);
                *c = (*c + ca * cb) % p;
            }
        }
        out.retain(|_, c| *c != 0);
        Self { n: self.n, p, terms: out }
    }

    /// Value at a +-1 point.
    pub fn evaluate(&self, y: &[i8]) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let neg = e.iter().zip(y).filter(|(&k, &v)| k % 2 == 1 && v < 0).count() % 2 == 1;
            acc = (acc + if neg { p - c } else { *c }) % p;
        }
        acc
    }
}

/// P_x expanded in the full exponent space (no reduction).
#[allow(non_snake_case)]
pub fn build_P(x: &SignVector, p: u64, a: u64) -> Result<Polynomial> {
    check_prime(p)?;
    let n = x.n();
    let e = excluded_residue(a, p);
    let mut acc = Polynomial::constant(n, p, 1);
    for i in (0..p).filter(|&i| i != e) {
        // i - sum_j x_j y_j
        let mut f = Polynomial::constant(n, p, i);
        for j in 0..n {
            let mut ex = vec![0u16; n];
            ex[j] = 1;
            f.terms.insert(ex, if x.entry(j) > 0 { p - 1 } else { 1 });
        }
        acc = acc.mul(&f);
    }
    Ok(acc)
}

/// Multilinear polynomial over GF(p): variable subset (bitmask) -> coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedPolynomial {
    pub n: usize,
    pub p: u64,
    /// Nonzero coefficients only.
    pub coeffs: BTreeMap<u64, u64>,
}

impl ReducedPolynomial {
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(|m| m.count_ones()).max().unwrap_or(0)
    }

    /// Value at the point with y_j = -1 exactly for the bits of `mask`.
    pub fn evaluate_mask(&self, mask: u64) -> u64 {
        let p = self.p;
        self.coeffs.iter().fold(0, |acc, (&s, &c)| {
            let v = if (s & mask).count_ones() % 2 == 1 { p - c } else { c };
            (acc + v) % p
        })
    }

    pub fn evaluate(&self, y: &SignVector) -> u64 {
        self.evaluate_mask(y.mask())
    }

    /// Values on all of {+-1}^n by a Walsh-Hadamard transform mod p,
    /// indexed by the mask of -1 positions.
    pub fn evaluate_all(&self) -> Vec<u32> {
        assert!(self.n <= 24, "evaluate_all needs a 2^n table");
        let p = self.p as u32;
        let mut f = vec![0u32; 1 << self.n];
        for (&s, &c) in &self.coeffs {
            f[s as usize] = c as u32;
        }
        let mut h = 1;
        while h < f.len() {
            for block in f.chunks_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*u, *v);
                    *u = (x + y) % p;
                    *v = (x + p - y) % p;
                }
            }
            h *= 2;
        }
        f
    }
}

/// y^e -> y for odd e, 1 for even e; collapsed coefficients summed mod p.
pub fn reduce_multilinear(poly: &Polynomial) -> ReducedPolynomial {
    assert!(poly.n <= 64);
    let p = poly.p;
    let mut coeffs: BTreeMap<u64, u64> = BTreeMap::new();
    for (e, c) in &poly.terms {
        let mask = e.iter().enumerate().filter(|(_, &k)| k % 2 == 1).fold(0u64, |m, (j, _)| m | 1 << j);
        let slot = coeffs.entry(mask).or_insert(0);
        *slot = (*slot + c) % p;
    }
    coeffs.retain(|_, c| *c != 0);
    ReducedPolynomial { n: poly.n, p, coeffs }
}

/// P'_x built directly in the multilinear basis, reducing after every factor.
pub fn build_reduced(x: &SignVector, p: u64, a: u64) -> Result<ReducedPolynomial> {
    check_prime(p)?;
    let n = x.n();
    let e = excluded_residue(a, p);
    // -x_j mod p
    let lin: Vec<u64> = (0..n).map(|j| if x.entry(j) > 0 { p - 1 } else { 1 }).collect();
    let mut cur: HashMap<u64, u64> = HashMap::from([(0u64, 1u64)]);
    for i in (0..p).filter(|&i| i != e) {
        let mut next: HashMap<u64, u64> = HashMap::with_capacity(cur.len() * (n + 1));
        for (&s, &c) in &cur {
            if i != 0 {
                let slot = next.entry(s).or_insert(0);
                *slot = (*slot + c * i) % p;
            }
            for (j, &l) in lin.iter().enumerate() {
                // y_j * y^S: y_j^2 = 1 removes j, otherwise adds it
                let slot = next.entry(s ^ (1 << j)).or_insert(0);
                *slot = (*slot + c * l) % p;
            }
        }
        next.retain(|_, c| *c != 0);
        cur = next;
    }
    Ok(ReducedPolynomial { n, p, coeffs: cur.into_iter().collect() })
}
