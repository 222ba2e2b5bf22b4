//! Sigma, tensor images x^{*2k}, exact geometry of Omega', and the
//! embedding into the radius-r sphere.

use crate::error::{Error, Result};
use crate::exactnum::{rational_to_f64, BigInt, BigRational};
use crate::params::ParamSet;
use crate::ser;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;
use std::io::{self, Write};

pub const SIGMA_CAP: usize = 24;
pub const MATERIALIZE_CAP: u128 = 1_000_000;
pub const EMBED_CAP: u128 = 10_000_000;

/// A +-1 vector with first entry +1 and zero sum. Bit i of `mask` set
/// means entry i is -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector {
    n: u32,
    mask: u64,
}

impl SignVector {
    pub fn from_entries(entries: &[i8]) -> Result<Self> {
        let n = entries.len();
        if n == 0 || n % 4 != 0 || n > 64 {
            return Err(Error::NotMultipleOfFour(n as u64));
        }
        let mut mask = 0u64;
        for (i, &e) in entries.iter().enumerate() {
            match e {
                1 => {}
                -1 => mask |= 1 << i,
                _ => return Err(Error::InvalidArgument(format!("entry {e} is not +-1"))),
            }
        }
        if mask & 1 != 0 {
            return Err(Error::InvalidArgument("first entry must be +1".into()));
        }
        if mask.count_ones() as usize * 2 != n {
            return Err(Error::InvalidArgument("entries must sum to zero".into()));
        }
        Ok(Self { n: n as u32, mask })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Bit i set iff entry i is -1.
    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn entry(&self, i: usize) -> i8 {
        if self.mask >> i & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn entries(&self) -> Vec<i8> {
        (0..self.n()).map(|i| self.entry(i)).collect()
    }
}

impl Serialize for SignVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::NotMultipleOfFour(n as u64));
    }
    if n > SIGMA_CAP {
        return Err(Error::EnumerationTooLarge { n, cap: SIGMA_CAP });
    }
    Ok(())
}

/// All of Sigma in lexicographic order (+1 before -1).
pub fn gen_sigma(n: usize) -> Result<Vec<SignVector>> {
    check_n(n)?;
    // Walk (n-1)-bit words of weight n/2 upward; word bit (n-2-j) is
    // position j+1, so numeric order is lexicographic order.
    let w = n / 2;
    let width = n - 1;
    let mut out = Vec::new();
    let mut v: u64 = (1u64 << w) - 1;
    while v < 1u64 << width {
        let mut mask = 0u64;
        for j in 0..width {
            if v >> (width - 1 - j) & 1 == 1 {
                mask |= 1 << (j + 1);
            }
        }
        out.push(SignVector { n: n as u32, mask });
        // Gosper's hack: next word with the same popcount
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    Ok(out)
}

pub fn inner_sign(x: &SignVector, y: &SignVector) -> Result<i64> {
    if x.n != y.n {
        return Err(Error::LengthMismatch(x.n(), y.n()));
    }
    Ok(inner_sign_unchecked(x, y))
}

#[inline]
pub fn inner_sign_unchecked(x: &SignVector, y: &SignVector) -> i64 {
    x.n as i64 - 2 * (x.mask ^ y.mask).count_ones() as i64
}

/// x^{*2k}: stored by its base vector only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TensorImage {
    pub base: SignVector,
    pub k: u32,
    pub a: u64,
    /// 2k a^{2k-1}, the squared weight of the tail copy of x.
    #[serde(serialize_with = "ser::display")]
    pub tail_weight_sq: BigInt,
}

impl TensorImage {
    pub fn new(base: SignVector, k: u32, a: u64) -> Self {
        Self { base, k, a, tail_weight_sq: tail_weight_sq(k, a) }
    }

    pub fn word_count(&self) -> u128 {
        (self.base.n as u128).saturating_pow(2 * self.k)
    }

    pub fn norm_sq(&self) -> BigInt {
        BigInt::from(self.base.n).pow(2 * self.k) + &self.tail_weight_sq * self.base.n
    }
}

pub fn tail_weight_sq(k: u32, a: u64) -> BigInt {
    BigInt::from(2 * k) * BigInt::from(a).pow(2 * k - 1)
}

/// h(t) = t^{2k} + 2k a^{2k-1} t.
pub fn star_poly(t: i64, k: u32, a: u64) -> BigInt {
    BigInt::from(t).pow(2 * k) + tail_weight_sq(k, a) * t
}

pub fn star_inner(x: &TensorImage, y: &TensorImage) -> Result<BigInt> {
    if x.k != y.k || x.a != y.a || x.base.n != y.base.n {
        return Err(Error::ParameterMismatch);
    }
    let t = inner_sign_unchecked(&x.base, &y.base);
    Ok(BigInt::from(t).pow(2 * x.k) + &x.tail_weight_sq * t)
}

/// Explicit coordinates: all 2k-fold products over words in lexicographic
/// order, then sqrt(2k a^{2k-1}) x.
pub fn star_materialize(x: &TensorImage) -> Result<Vec<f64>> {
    let len = x.word_count().saturating_add(x.base.n as u128);
    if len > MATERIALIZE_CAP {
        return Err(Error::MaterializationTooLarge { len, cap: MATERIALIZE_CAP });
    }
    let e: Vec<f64> = x.base.entries().into_iter().map(f64::from).collect();
    let mut words = vec![1.0f64];
    for _ in 0..2 * x.k {
        words = words.iter().flat_map(|&w| e.iter().map(move |&xi| w * xi)).collect();
    }
    let s = rational_to_f64(&BigRational::from_integer(x.tail_weight_sq.clone())).sqrt();
    words.extend(e.iter().map(|&xi| s * xi));
    Ok(words)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryReport {
    pub n: u64,
    pub k: u32,
    pub a: u64,
    /// 2n^{2k} + 4k a^{2k-1} n + (4k-2) a^{2k}
    #[serde(serialize_with = "ser::display")]
    pub diam_sq: BigInt,
    /// n^{2k} + 2k a^{2k-1} n
    #[serde(serialize_with = "ser::display")]
    pub rho_sq: BigInt,
    #[serde(serialize_with = "ser::rational")]
    pub r_prime_sq: BigRational,
    #[serde(serialize_with = "ser::rational")]
    pub lift_height_sq: BigRational,
    #[serde(serialize_with = "ser::rational")]
    pub scale_sq: BigRational,
    /// No pair of Sigma has inner product -a (happens when a >= n).
    pub degenerate: bool,
    /// Inner product of the pairs that really realize the diameter.
    pub attained_t: i64,
    #[serde(serialize_with = "ser::display")]
    pub attained_diam_sq: BigInt,
}

/// Inner products realized by distinct pairs of Sigma(n): n-4, n-8, ..., 4-n.
pub fn attainable_inner(n: u64) -> Vec<i64> {
    let n = n as i64;
    (1..n / 2).map(|j| n - 4 * j).collect()
}

/// argmin over attainable t of t^{2k} + 2k a^{2k-1} t (n >= 8), else 0 when
/// Sigma has a single distance (n = 4).
fn attained_min(n: u64, k: u32, a: u64) -> (i64, BigInt) {
    let mut best: Option<(i64, BigInt)> = None;
    for t in attainable_inner(n) {
        let v = star_poly(t, k, a);
        if best.as_ref().map_or(true, |(_, b)| v < *b) {
            best = Some((t, v));
        }
    }
    best.unwrap_or((n as i64, star_poly(n as i64, k, a)))
}

pub fn geometry(ps: &ParamSet) -> Result<GeometryReport> {
    let (n, k, a) = (ps.n, ps.k, ps.a);
    let nb = BigInt::from(n);
    let ab = BigInt::from(a);
    let w = tail_weight_sq(k, a);
    let n2k = nb.clone().pow(2 * k);
    let a2k = ab.pow(2 * k);
    let rho_sq: BigInt = &n2k + &w * n;
    let diam_sq: BigInt = &n2k * 2u32 + &w * (2 * n) + &a2k * BigInt::from(4 * k as i64 - 2);
    // the same value via 2 rho^2 - 2 min, min = (1-2k) a^{2k}
    debug_assert_eq!(diam_sq, &rho_sq * 2 - star_poly(-(a as i64), k, a) * 2);

    let r_prime_sq = BigRational::new(rho_sq.clone(), diam_sq.clone());
    if r_prime_sq > ps.rsq {
        return Err(Error::CompressionFailed {
            r_prime_sq: ser::rational_string(&r_prime_sq),
            rsq: ser::rational_string(&ps.rsq),
        });
    }
    let (attained_t, min_val) = if n >= 8 { attained_min(n, k, a) } else { (0, BigInt::zero()) };
    let attained_diam_sq = if n >= 8 { &rho_sq * 2 - min_val * 2 } else { &rho_sq * 2 };
    Ok(GeometryReport {
        n,
        k,
        a,
        lift_height_sq: &ps.rsq - &r_prime_sq,
        scale_sq: BigRational::new(BigInt::one(), diam_sq.clone()),
        diam_sq,
        rho_sq,
        r_prime_sq,
        degenerate: a >= n,
        attained_t,
        attained_diam_sq,
    })
}

/// Point of Omega on the sphere in dimension d. Since x_1 = 1 the tail
/// coordinate sqrt(2k a^{2k-1}) x_i repeats the word 1..1i up to scale, so
/// the two fold into one coordinate sqrt(1 + 2k a^{2k-1}) x_i; the image
/// then needs n^{2k} coordinates plus one for the lift.
pub fn embed(ps: &ParamSet, g: &GeometryReport, x: &TensorImage) -> Result<Vec<f64>> {
    let need = x.word_count().saturating_add(1);
    if ps.d < need {
        return Err(Error::DimensionInsufficient { need, have: ps.d });
    }
    if ps.d > EMBED_CAP {
        return Err(Error::MaterializationTooLarge { len: ps.d, cap: EMBED_CAP });
    }
    let s = rational_to_f64(&g.scale_sq).sqrt();
    let h = rational_to_f64(&g.lift_height_sq).sqrt();
    let n = x.base.n as usize;
    let mut full = star_materialize(x)?;
    let tail = full.split_off(full.len() - n);
    let fold = (1.0 + rational_to_f64(&BigRational::from_integer(x.tail_weight_sq.clone()))).sqrt();
    // words are little-endian in the last letter: 1..1i sits at index i-1
    for (i, &t) in tail.iter().enumerate() {
        debug_assert_eq!(full[i], x.base.entry(i) as f64);
        debug_assert_eq!(t.signum(), full[i]);
        full[i] *= fold;
    }
    let mut v: Vec<f64> = full.into_iter().map(|c| s * c).collect();
    v.push(h);
    v.resize(ps.d as usize, 0.0);
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiameterScan {
    /// Exact max squared distance between distinct images (unscaled).
    #[serde(serialize_with = "ser::display")]
    pub diam_sq: BigInt,
    /// Inner product (x, y) of every attaining pair; None for < 2 points.
    pub attaining_inner: Option<i64>,
    /// Index pairs (i < j) into the scanned slice.
    pub pairs: Vec<(usize, usize)>,
}

impl DiameterScan {
    pub fn scaled(&self, scale_sq: &BigRational) -> BigRational {
        scale_sq * &self.diam_sq
    }
}

/// Exhaustive pair scan. Squared distances are 2|x|^2 - 2 h((x,y)), so the
/// farthest pairs are those minimizing h over the realized inner products.
pub fn diameter_scan(points: &[TensorImage]) -> Result<DiameterScan> {
    if points.len() < 2 {
        return Ok(DiameterScan { diam_sq: BigInt::zero(), attaining_inner: None, pairs: vec![] });
    }
    let (k, a, n) = (points[0].k, points[0].a, points[0].base.n);
    if points.iter().any(|p| p.k != k || p.a != a || p.base.n != n) {
        return Err(Error::ParameterMismatch);
    }
    let realized: BTreeSet<i64> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut s = BTreeSet::new();
            for j in i + 1..points.len() {
                s.insert(inner_sign_unchecked(&points[i].base, &points[j].base));
            }
            s
        })
        .reduce(BTreeSet::new, |mut x, y| {
            x.extend(y);
            x
        });
    let (t_star, h_min) = realized
        .iter()
        .map(|&t| (t, star_poly(t, k, a)))
        .min_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)))
        .expect("at least one pair");
    let pairs: Vec<(usize, usize)> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..points.len())
                .filter(|&j| inner_sign_unchecked(&points[i].base, &points[j].base) == t_star)
                .map(|j| (i, j))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let diam_sq = points[0].norm_sq() * 2 - h_min * 2;
    Ok(DiameterScan { diam_sq, attaining_inner: Some(t_star), pairs })
}

/// One embedded point per line under a `# borsuk-omega` header.
pub fn write_points<W: Write>(mut w: W, ps: &ParamSet, g: &GeometryReport, points: &[TensorImage]) -> Result<()> {
    let io = |e: io::Error| Error::InvalidArgument(format!("write failed: {e}"));
    writeln!(w, "# borsuk-omega d={} r={} n={} k={} a={} p={}", ps.d, ps.r, ps.n, ps.k, ps.a, ps.p).map_err(io)?;
    for x in points {
        let v = embed(ps, g, x)?;
        let line: Vec<String> = v.iter().map(|c| c.to_string()).collect();
        writeln!(w, "{}", line.join(" ")).map_err(io)?;
    }
    Ok(())
}
