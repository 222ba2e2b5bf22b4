//! Upper-bound side: the inscribed regular simplex partition of the sphere
//! (one piece per facet, radially projected) and the Rogers covering count.

use crate::error::{Error, Result};
use crate::exactnum::{DoubleDouble, LogReal};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const NUMERIC_MAX_D: usize = 12;
pub const DEFAULT_RESTARTS: usize = 50;

/// Vertices of a regular simplex inscribed in the radius-r sphere of R^d,
/// from the Helmert basis of the sum-zero hyperplane of R^{d+1}.
pub fn simplex_vertices(d: usize, r: f64) -> Vec<Vec<f64>> {
    assert!(d >= 1);
    let scale = r * ((d + 1) as f64 / d as f64).sqrt();
    (0..=d)
        .map(|i| {
            (1..=d)
                .map(|j| {
                    let norm = ((j * (j + 1)) as f64).sqrt();
                    let h = match i.cmp(&j) {
                        std::cmp::Ordering::Less => 1.0 / norm,
                        std::cmp::Ordering::Equal => -(j as f64) / norm,
                        std::cmp::Ordering::Greater => 0.0,
                    };
                    scale * h
                })
                .collect()
        })
        .collect()
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut s: Vec<f64> = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in s.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Facet {
    /// rows: the d facet vertices on the unit sphere
    v: Vec<Vec<f64>>,
}

impl Facet {
    fn point(&self, w: &[f64]) -> Vec<f64> {
        let d = self.v[0].len();
        let mut a = vec![0.0; d];
        for (wi, vi) in w.iter().zip(&self.v) {
            for (x, y) in a.iter_mut().zip(vi) {
                *x += wi * y;
            }
        }
        a
    }

    /// cos of the angle between the two projected points, and its gradient.
    fn cos_grad(&self, w: &[f64], u: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let a = self.point(w);
        let b = self.point(u);
        let (na, nb) = (dot(&a, &a).sqrt(), dot(&b, &b).sqrt());
        let f = dot(&a, &b) / (na * nb);
        let ga: Vec<f64> = a.iter().zip(&b).map(|(ai, bi)| bi / (na * nb) - f * ai / (na * na)).collect();
        let gb: Vec<f64> = a.iter().zip(&b).map(|(ai, bi)| ai / (na * nb) - f * bi / (nb * nb)).collect();
        let gw = self.v.iter().map(|vi| dot(vi, &ga)).collect();
        let gu = self.v.iter().map(|vi| dot(vi, &gb)).collect();
        (f, gw, gu)
    }

    fn cos(&self, w: &[f64], u: &[f64]) -> f64 {
        let a = self.point(w);
        let b = self.point(u);
        dot(&a, &b) / (dot(&a, &a) * dot(&b, &b)).sqrt()
    }
}

struct Ascent {
    cos: f64,
    stationarity: f64,
}

/// Projected gradient descent on cos(P(w), P(u)) with Armijo backtracking.
fn descend(facet: &Facet, mut w: Vec<f64>, mut u: Vec<f64>) -> Ascent {
    let mut step = 1.0;
    let mut stationarity = f64::INFINITY;
    let (mut f, mut gw, mut gu) = facet.cos_grad(&w, &u);
    for _ in 0..20_000 {
        let mut accepted = false;
        while step > 1e-18 {
            let mut w2: Vec<f64> = w.iter().zip(&gw).map(|(x, g)| x - step * g).collect();
            let mut u2: Vec<f64> = u.iter().zip(&gu).map(|(x, g)| x - step * g).collect();
            project_simplex(&mut w2);
            project_simplex(&mut u2);
            let moved: f64 = w2.iter().zip(&w).chain(u2.iter().zip(&u)).map(|(a, b)| (a - b) * (a - b)).sum();
            let f2 = facet.cos(&w2, &u2);
            if f2 <= f - 1e-4 * moved / step {
                stationarity = moved.sqrt() / step;
                let improved = f - f2;
                w = w2;
                u = u2;
                (f, gw, gu) = facet.cos_grad(&w, &u);
                accepted = true;
                step *= 2.0;
                if improved < 1e-16 {
                    return Ascent { cos: f, stationarity };
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no descent at any step: projected gradient step is null
            return Ascent { cos: f, stationarity: 0.0 };
        }
    }
    Ascent { cos: f, stationarity }
}

fn dirichlet(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    // exponential draws, normalized: uniform on the simplex
    let mut v: Vec<f64> = (0..d).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Largest distance within the radial projection of one facet onto the
/// radius-r sphere. Optimized at unit radius, then scaled (homothety).
pub fn piece_diameter(d: usize, r: f64, restarts: usize) -> Result<f64> {
    piece_diameter_seeded(d, r, restarts, 0)
}

pub fn piece_diameter_seeded(d: usize, r: f64, restarts: usize, seed: u64) -> Result<f64> {
    if !(2..=NUMERIC_MAX_D).contains(&d) {
        return Err(Error::InvalidArgument(format!("d = {d} outside the numeric range 2..={NUMERIC_MAX_D}")));
    }
    if restarts == 0 || !(r > 0.0) {
        return Err(Error::InvalidArgument("need restarts >= 1 and r > 0".into()));
    }
    let verts = simplex_vertices(d, 1.0);
    let facet = Facet { v: verts[1..].to_vec() };
    let runs: Vec<Ascent> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64));
            let w = dirichlet(&mut rng, d);
            let u = dirichlet(&mut rng, d);
            descend(&facet, w, u)
        })
        .collect();
    let best = runs.iter().min_by(|a, b| a.cos.total_cmp(&b.cos)).expect("restarts >= 1");
    if !(best.stationarity < 1e-6) {
        return Err(Error::NonConvergence(format!(
            "d = {d}: best restart stalled at cos = {} with projected-gradient norm {}",
            best.cos, best.stationarity
        )));
    }
    // |P - Q|^2 = 2 - 2 cos on the unit sphere
    Ok(r * (2.0 - 2.0 * best.cos).max(0.0).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendFit {
    /// piece_diam ~ 2r (1 - c_fit / d)
    pub c_fit: f64,
    /// root mean square of the fit residual in d (1 - piece_diam / 2r)
    pub residual: f64,
    pub samples: Vec<(usize, f64, f64)>,
}

/// Least-squares fit of 1 - diam/(2r) = c / d over d = 2..=12, r = 1/2 + c_r/d.
pub fn trend_fit(c_r: f64, restarts: usize) -> Result<TrendFit> {
    let mut samples = Vec::new();
    for d in 2..=NUMERIC_MAX_D {
        let r = 0.5 + c_r / d as f64;
        samples.push((d, r, piece_diameter(d, r, restarts)?));
    }
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(d, r, diam) in &samples {
        let x = 1.0 / d as f64;
        let y = 1.0 - diam / (2.0 * r);
        sxy += x * y;
        sxx += x * x;
    }
    let c_fit = sxy / sxx;
    let residual = (samples
        .iter()
        .map(|&(d, r, diam)| {
            let e = (1.0 - diam / (2.0 * r)) * d as f64 - c_fit;
            e * e
        })
        .sum::<f64>()
        / samples.len() as f64)
        .sqrt();
    Ok(TrendFit { c_fit, residual, samples })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexPartitionReport {
    pub d: usize,
    pub r: f64,
    pub piece_diam: f64,
    pub trend_fit: (f64, f64),
    pub pass: bool,
    /// piece_diam comes from the trend fit, not from optimization
    pub extrapolated: bool,
}

/// r = 1/2 + c_r/d; passes when one piece has diameter below 1.
pub fn theorem4_check(d: usize, c_r: f64) -> Result<SimplexPartitionReport> {
    theorem4_check_with(d, c_r, DEFAULT_RESTARTS, None)
}

pub fn theorem4_check_with(
    d: usize,
    c_r: f64,
    restarts: usize,
    fit: Option<&TrendFit>,
) -> Result<SimplexPartitionReport> {
    if d < 2 {
        return Err(Error::InvalidArgument("d must be at least 2".into()));
    }
    let owned;
    let fit = match fit {
        Some(f) => f,
        None => {
            owned = trend_fit(c_r, restarts)?;
            &owned
        }
    };
    let r = 0.5 + c_r / d as f64;
    let extrapolated = d > NUMERIC_MAX_D;
    let piece_diam =
        if extrapolated { 2.0 * r * (1.0 - fit.c_fit / d as f64) } else { piece_diameter(d, r, restarts)? };
    Ok(SimplexPartitionReport {
        d,
        r,
        piece_diam,
        trend_fit: (fit.c_fit, fit.residual),
        pass: piece_diam < 1.0,
        extrapolated,
    })
}

/// ln of the leading Rogers count (2r)^d of diameter-1 caps covering S_r.
pub fn rogers_cover_log(r: f64, d: u64) -> Result<LogReal> {
    if !(r > 0.5) {
        return Err(Error::RadiusNotAboveHalf);
    }
    Ok(LogReal::from_ln(DoubleDouble::from_f64(2.0 * r).ln().mul_f64(d as f64)))
}
