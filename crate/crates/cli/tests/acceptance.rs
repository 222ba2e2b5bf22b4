//! Acceptance suite: one PASS/FAIL line per criterion, each against its
//! runtime budget. Expected values come from oracles written here, not
//! from the library routes under test.

use borsuk_core::algebra::{
    dimension_bound, independence_verify, max_avoiding_exact, polynomial_rows, property_sweep, rank_gfp, AvoidingFamily,
};
use borsuk_core::bounds::{count_bound, find_d0, lower_bound, theorem3_check};
use borsuk_core::construction::{gen_sigma, inner_sign, star_inner, star_materialize, SignVector, TensorImage};
use borsuk_core::exactnum::binomial;
use borsuk_core::optimality::{h_star, ratio, search_optimum, verify_inequality_10_11, CandidatePolynomial};
use borsuk_core::params::plan_fixed;
use borsuk_core::upper::{piece_diameter, rogers_cover_log, DEFAULT_RESTARTS};
use borsuk_core::BigInt;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

/// (id, name, runtime budget in seconds, check)
type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn entries_dot(x: &SignVector, y: &SignVector) -> i64 {
    x.entries().iter().zip(y.entries()).map(|(&a, b)| a as i64 * b as i64).sum()
}

/// Row n of binomials, C(n, i+1) = C(n, i) (n - i) / (i + 1).
fn binom_row(n: u64) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 0..n {
        let next = row.last().unwrap() * BigInt::from(n - i) / BigInt::from(i + 1);
        row.push(next);
    }
    row
}

fn pascal_u128(n: usize, k: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[k]
}

/// ln of a positive big integer from its leading 64 bits.
fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Word-by-word tensor image: every 2k-fold product, then the weighted copy.
fn tensor_oracle(x: &[i8], k: u32, a: u64) -> Vec<f64> {
    let n = x.len();
    let len = n.pow(2 * k);
    let mut v = Vec::with_capacity(len + n);
    for w in 0..len {
        let (mut w, mut prod) = (w, 1.0);
        for _ in 0..2 * k {
            prod *= x[w % n] as f64;
            w /= n;
        }
        v.push(prod);
    }
    let weight = (2.0 * k as f64 * (a as f64).powi(2 * k as i32 - 1)).sqrt();
    v.extend(x.iter().map(|&e| weight * e as f64));
    v
}

fn c01_scalar_product() -> Outcome {
    let mut pairs = 0;
    for (n, k, a) in [(4usize, 1u32, 8u64), (4, 2, 8), (8, 1, 4)] {
        let sigma = gen_sigma(n).map_err(|e| e.to_string())?;
        let imgs: Vec<TensorImage> = sigma.iter().map(|x| TensorImage::new(*x, k, a)).collect();
        let oracle: Vec<Vec<f64>> = sigma.iter().map(|x| tensor_oracle(&x.entries(), k, a)).collect();
        let lib: Vec<Vec<f64>> = imgs.iter().map(|x| star_materialize(x).unwrap()).collect();
        for i in 0..imgs.len() {
            for j in 0..imgs.len() {
                let t = entries_dot(&sigma[i], &sigma[j]) as i128;
                let exact = t.pow(2 * k) + 2 * k as i128 * (a as i128).pow(2 * k - 1) * t;
                let formula = star_inner(&imgs[i], &imgs[j]).map_err(|e| e.to_string())?;
                ensure(formula == BigInt::from(exact), || format!("n={n} k={k} ({i},{j}): {formula} vs {exact}"))?;
                for v in [dot(&oracle[i], &oracle[j]), dot(&lib[i], &lib[j])] {
                    let rel = (v - exact as f64).abs() / (exact as f64).abs().max(1.0);
                    ensure(rel <= 1e-9, || format!("n={n} k={k} ({i},{j}): float {v} vs {exact}"))?;
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs, exact path bit-equal, float path within 1e-9"))
}

fn c02_divisibility() -> Outcome {
    let mut pairs = 0u64;
    for n in [4usize, 8, 12] {
        let sigma = gen_sigma(n).map_err(|e| e.to_string())?;
        let n = n as i64;
        for (i, x) in sigma.iter().enumerate() {
            for (j, y) in sigma.iter().enumerate() {
                let t = inner_sign(x, y).map_err(|e| e.to_string())?;
                ensure(t == entries_dot(x, y), || format!("n={n}: inner_sign {t} disagrees with entry sum"))?;
                ensure(t % 4 == 0, || format!("n={n}: {t} not divisible by 4"))?;
                ensure(t > -n && t <= n, || format!("n={n}: {t} outside (-n, n]"))?;
                ensure((t == n) == (i == j), || format!("n={n}: t = n off the diagonal at ({i},{j})"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} ordered pairs"))
}

fn c03_property() -> Outcome {
    let mut out = Vec::new();
    for (n, p, a) in [(12usize, 5u64, 8u64), (16, 5, 4)] {
        let sweep = property_sweep(n, p, a).map_err(|e| e.to_string())?;
        let s = pascal_u128(n - 1, n / 2 - 1) as u64;
        ensure(sweep.pairs == s * s, || format!("({n},{p},{a}): {} pairs, expected {}", sweep.pairs, s * s))?;
        ensure(sweep.exceptions == 0, || format!("({n},{p},{a}): {} exceptions", sweep.exceptions))?;
        out.push(format!("({n},{p},{a}) {} pairs", sweep.pairs));
    }
    // product form of P'_x(y) straight from the residue, on a slice of pairs
    let sigma = gen_sigma(12).unwrap();
    let rows = polynomial_rows(&sigma[..40], 5, 8).map_err(|e| e.to_string())?;
    for (x, row) in sigma.iter().zip(&rows) {
        for y in &sigma {
            let t = entries_dot(x, y);
            let skip = (-8i64).rem_euclid(5);
            let prod = (0..5i64).filter(|&i| i != skip).fold(1i64, |acc, i| (acc * (i - t).rem_euclid(5)) % 5);
            ensure(row.evaluate(y) == prod as u64, || format!("P'_x(y) = {} vs product {prod}", row.evaluate(y)))?;
        }
    }
    Ok(format!("zero exceptions: {}", out.join(", ")))
}

fn c04_rank() -> Outcome {
    let sigma = gen_sigma(16).map_err(|e| e.to_string())?;
    let bound: BigInt = binom_row(16).into_iter().take(5).sum();
    ensure(bound == BigInt::from(2517) && dimension_bound(16, 5) == bound, || "dimension bound is not 2517".into())?;
    let rows = polynomial_rows(&sigma, 5, 4).map_err(|e| e.to_string())?;
    let rank = rank_gfp(&rows, 5);
    ensure(rank <= 2517, || format!("rank {rank} exceeds 2517"))?;
    let mut sizes = Vec::new();
    for seed in 0..100u64 {
        let fam = AvoidingFamily::random_greedy(&sigma, -4, seed, usize::MAX);
        ensure(fam.is_avoiding(), || format!("seed {seed}: family not avoiding"))?;
        let diag = independence_verify(&fam, 5, 4).map_err(|e| e.to_string())?;
        ensure(diag, || format!("seed {seed}: diagonal certificate fails"))?;
        if seed < 10 {
            let sub: Vec<_> =
                fam.members.iter().map(|x| rows[sigma.iter().position(|y| y == x).unwrap()].clone()).collect();
            let r = rank_gfp(&sub, 5);
            ensure(r == fam.len(), || format!("seed {seed}: rank {r} < family size {}", fam.len()))?;
        }
        sizes.push(fam.len());
    }
    let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
    Ok(format!("rank {rank} <= 2517; 100 families ({lo}..={hi} members) diagonal-certified, 10 also by rank"))
}

/// Plain branch and bound on bitsets, for graphs up to 64 vertices.
fn mis_oracle(adj: &[u64], cand: u64, size: usize, best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + cand.count_ones() as usize <= *best {
        return;
    }
    let v = cand.trailing_zeros() as usize;
    mis_oracle(adj, cand & !(1 << v) & !adj[v], size + 1, best);
    mis_oracle(adj, cand & !(1 << v), size, best);
}

fn c05_lemma_oracle() -> Outcome {
    let mut out = Vec::new();
    for n in [4u64, 8, 12] {
        for p in (2..=n).filter(|&p| borsuk_core::exactnum::is_prime(p)) {
            let a = (4 * p).checked_sub(n).filter(|&a| a > 0 && a <= 2 * n);
            let Some(a) = a else { continue };
            let mis = max_avoiding_exact(n as usize, -(a as i64)).map_err(|e| e.to_string())?;
            let bound: BigInt = binom_row(n).into_iter().take(p as usize).sum();
            ensure(BigInt::from(mis.size) <= bound, || format!("({n},{p},{a}): MIS {} > bound {bound}", mis.size))?;
            // independent values: brute force when small, Erdos-Ko-Rado otherwise
            let sigma = gen_sigma(n as usize).unwrap();
            let expect = if sigma.len() <= 64 {
                let adj: Vec<u64> = sigma
                    .iter()
                    .map(|x| {
                        sigma
                            .iter()
                            .enumerate()
                            .filter(|(_, y)| entries_dot(x, y) == -(a as i64))
                            .fold(0, |m, (j, _)| m | 1 << j)
                    })
                    .collect();
                let mut best = 0;
                let all = if sigma.len() == 64 { u64::MAX } else { (1u64 << sigma.len()) - 1 };
                mis_oracle(&adj, all, 0, &mut best);
                best
            } else if a < n {
                // -a = 4 - n: complement-disjoint pairs, a Kneser graph
                ensure(a + 4 == n, || format!("no oracle for ({n},{a})"))?;
                pascal_u128(n as usize - 2, n as usize / 2 - 2) as usize
            } else {
                sigma.len()
            };
            ensure(mis.size == expect, || format!("({n},{p},{a}): MIS {} vs oracle {expect}", mis.size))?;
            out.push(format!("({n},{p},{a}) {}<={bound}", mis.size));
        }
    }
    Ok(out.join(", "))
}

fn c06_counting() -> Outcome {
    for n in [4usize, 8, 12, 16] {
        let count = (0u64..1 << n).filter(|m| m & 1 == 0 && m.count_ones() as usize == n / 2).count();
        let lib = gen_sigma(n).map_err(|e| e.to_string())?.len();
        let c = pascal_u128(n - 1, n / 2 - 1) as usize;
        ensure(count == c && lib == c, || format!("n={n}: enumerated {count}, library {lib}, binomial {c}"))?;
    }
    for n in (2..=64u64).step_by(2) {
        let left = binomial(n - 1, n / 2 - 1).map_err(|e| e.to_string())?;
        let full = BigInt::from(pascal_u128(n as usize, n as usize / 2));
        ensure(&left * 2 == full, || format!("n={n}: 2 C(n-1,n/2-1) = {} != C(n,n/2) = {full}", &left * 2))?;
    }
    Ok("|Sigma| enumerated for n = 4..16; halving identity exact for even n <= 64".into())
}

fn c07_optimality() -> Outcome {
    let n = 10.0;
    for m in [2usize, 4, 6, 8] {
        let h = h_star(m, n).map_err(|e| e.to_string())?;
        let r = ratio(&h).map_err(|e| e.to_string())?;
        let nm = 10i64.pow(m as u32);
        let (hn, hma) = ((m as i64 + 1) * nm, (1 - m as i64) * nm);
        ensure(r.h_n == hn as f64 && r.h_minus_a == hma as f64, || {
            format!("m={m}: components {} {}", r.h_n, r.h_minus_a)
        })?;
        let target = (m as f64 - 1.0) / (m as f64 + 1.0);
        ensure(r.objective == target, || format!("m={m}: objective {} vs {target}", r.objective))?;
        let s = search_optimum(m, n, 10_000, 0).map_err(|e| e.to_string())?;
        ensure(s.best_objective <= target + 1e-9, || format!("m={m}: search found {} > {target}", s.best_objective))?;
        let split = verify_inequality_10_11(&h).map_err(|e| e.to_string())?;
        ensure((split.lhs - split.rhs).abs() <= 1e-12 * split.rhs, || format!("m={m}: no equality at h*"))?;
    }
    // random members: nonnegative odd/even parts balanced so h'(-n) = 0
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut members = 0;
    for _ in 0..2000 {
        let m = rng.gen_range(2..=8usize);
        let mut c: Vec<f64> =
            (0..=m).map(|j| if j > 0 && rng.gen_bool(0.6) { rng.gen::<f64>() } else { 0.0 }).collect();
        let odd: f64 = (1..=m).step_by(2).map(|j| j as f64 * c[j]).sum();
        let even: f64 = (2..=m).step_by(2).map(|j| j as f64 * c[j]).sum();
        if odd == 0.0 || even == 0.0 {
            continue;
        }
        for j in (2..=m).step_by(2) {
            c[j] *= odd / even;
        }
        let u: Vec<f64> = c.iter().enumerate().map(|(j, &v)| v / n.powi(j as i32)).collect();
        let h = CandidatePolynomial::new(u, n, n).map_err(|e| e.to_string())?;
        if !h.is_member() {
            continue;
        }
        members += 1;
        let split = verify_inequality_10_11(&h).map_err(|e| e.to_string())?;
        let lhs: f64 = (1..=m).step_by(2).map(|j| c[j]).sum();
        let rhs = (if m % 2 == 0 { m } else { m - 1 }) as f64 * (2..=m).step_by(2).map(|j| c[j]).sum::<f64>();
        ensure(split.pass && lhs <= rhs * (1.0 + 1e-12), || format!("m={m}: {lhs} > {rhs}"))?;
    }
    ensure(members >= 100, || format!("only {members} class members sampled"))?;
    Ok(format!("objective (m-1)/(m+1) exact for m = 2,4,6,8; search bounded; split holds on {members} members"))
}

fn c08_shrinking_chain() -> Outcome {
    let d = 1_000_000_000_000u128;
    let big = theorem3_check(d, 6.0);
    let small = theorem3_check(100, 6.0);
    let failing = small.first_failure().map(|c| c.name.clone()).or(small.pipeline_error.clone());
    let summary: Vec<String> =
        big.checks.iter().map(|c| format!("{}={}", c.name, if c.pass { "ok" } else { "fail" })).collect();
    ensure(failing.is_some(), || "d = 100 reports no failing check".into())?;
    let final_ok = big.final_ratio_log.is_some_and(|r| r.sign > 0 && r.ln_f64() > ((d + 2) as f64).ln());
    ensure(big.all_pass && final_ok, || format!("d = 1e12: {}", summary.join(" ")))?;
    Ok(format!("d = 1e12 all pass; d = 100 fails at {}", failing.unwrap()))
}

/// Centroid split of the simplex vertices on the unit sphere.
fn centroid_split_diam(d: usize, r: f64) -> f64 {
    let s = (d / 2) as f64;
    let t = d as f64 - s;
    let cos = -(s * t / ((s + 1.0) * (t + 1.0))).sqrt();
    r * (2.0 - 2.0 * cos).sqrt()
}

fn c09_simplex_partition() -> Outcome {
    for d in 2..=10usize {
        let r = 0.5 + 0.01 / d as f64;
        let diam = piece_diameter(d, r, DEFAULT_RESTARTS).map_err(|e| e.to_string())?;
        ensure(diam < 1.0, || format!("d={d}: piece diameter {diam} >= 1"))?;
        let oracle = centroid_split_diam(d, r);
        ensure((diam - oracle).abs() < 1e-6, || format!("d={d}: {diam} vs centroid split {oracle}"))?;
        if d == 2 {
            ensure((diam - r * 3f64.sqrt()).abs() < 1e-6, || format!("d=2: {diam} vs r sqrt 3"))?;
        }
    }
    let gaps: Vec<f64> = (4..=12usize)
        .map(|d| {
            let r = 0.5 + 0.01 / d as f64;
            (2.0 * r - piece_diameter(d, r, DEFAULT_RESTARTS).unwrap()) * d as f64
        })
        .collect();
    let (lo, hi) = gaps.iter().fold((f64::MAX, f64::MIN), |(l, h), &g| (l.min(g), h.max(g)));
    ensure(lo > 0.0 && hi <= 2.0 * lo, || format!("(2r - diam) d ranges over [{lo}, {hi}]"))?;
    Ok(format!("diam < 1 for d = 2..10; (2r - diam) d in [{lo:.4}, {hi:.4}]"))
}

fn c10_bound_consistency() -> Outcome {
    let mut matched = 0;
    for r in [0.6, 0.65, 0.71, 0.8] {
        for d in [1_000_000u128, 1_000_000_000, 1_000_000_000_000] {
            let ps = plan_fixed(r, d, 1e-12).map_err(|e| e.to_string())?;
            if ps.n > 10_000 {
                continue;
            }
            let cb = lower_bound(&ps);
            let row = binom_row(ps.n);
            let num = &row[ps.n as usize / 2] / 2;
            let den: BigInt = row.iter().take(ps.p as usize).sum();
            ensure(cb.numerator.as_ref() == Some(&num) && cb.denominator.as_ref() == Some(&den), || {
                format!("r={r} d={d}: exact counts differ from Pascal oracle")
            })?;
            let exact_ln = ln_big(&num) - ln_big(&den);
            let mirror = cb.ratio_log.ln_f64();
            ensure((exact_ln - mirror).abs() <= 1e-9, || {
                format!("r={r} d={d}: ln ratio {exact_ln} vs log mirror {mirror}")
            })?;
            let passes_exact = num > den * BigInt::from(d + 1);
            ensure(passes_exact == cb.passes, || format!("r={r} d={d}: verdict mismatch"))?;
            matched += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let r = rng.gen_range(0.55..0.95);
        let d = 10f64.powf(rng.gen_range(4.0..15.0)) as u128;
        let ps = plan_fixed(r, d, 1e-12).map_err(|e| e.to_string())?;
        let lower = lower_bound(&ps).ratio_log;
        let upper = rogers_cover_log(r, d as u64).map_err(|e| e.to_string())?;
        ensure(lower.sign <= 0 || lower.ln_f64() < upper.ln_f64(), || {
            format!("r={r} d={d}: lower ln {} >= Rogers ln {}", lower.ln_f64(), upper.ln_f64())
        })?;
    }
    Ok(format!("{matched} matched (r, d) agree to 1e-9; lower < Rogers at 20 random points"))
}

fn c11_find_d0() -> Outcome {
    let rep = find_d0(0.71, 1e-12).map_err(|e| e.to_string())?;
    let check = |d: u128| -> Result<bool, String> {
        let ps = plan_fixed(0.71, d, 1e-12).map_err(|e| e.to_string())?;
        let row = binom_row(ps.n);
        let num = &row[ps.n as usize / 2] / 2;
        let den: BigInt = row.iter().take(ps.p as usize).sum();
        ensure(count_bound(ps.n, ps.p, d).passes == (num > &den * BigInt::from(d + 1)), || {
            format!("verdict mismatch at {d}")
        })?;
        Ok(num > den * BigInt::from(d + 1))
    };
    ensure(check(rep.d0)?, || format!("d0 = {} fails its own bound", rep.d0))?;
    let prev = rep.previous_d.ok_or("no preceding grid point")?;
    ensure(!check(prev)?, || format!("preceding grid point {prev} already passes"))?;
    ensure(!check(rep.d0 - 1)?, || "d0 - 1 already passes".to_string())?;
    Ok(format!("d0 = {} (n = {}), previous grid point {prev} fails", rep.d0, rep.params.n))
}

fn c12_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_borsuk");
    let runs: &[&[&str]] = &[
        &["plan", "--r", "0.6", "--d", "1e9"],
        &["certify", "--n", "12", "--p", "5", "--a", "8", "--seed", "3"],
        &["bound", "--mode", "shrinking", "--d", "1e12", "--format", "csv"],
        &["find-d0", "--r", "0.71"],
        &["upper", "--d", "6", "--format", "text"],
        &["optimal-poly", "--m", "4", "--samples", "2000", "--seed", "5"],
        &["build", "--n", "8", "--k", "1", "--a", "4", "--r", "0.75", "--d", "100"],
    ];
    for args in runs {
        let go = |threads: &str| Command::new(bin).args(*args).env("BORSUK_THREADS", threads).output();
        let a = go("1").map_err(|e| e.to_string())?;
        let b = go("4").map_err(|e| e.to_string())?;
        ensure(!a.stdout.is_empty(), || format!("{args:?}: empty output"))?;
        ensure(a.stdout == b.stdout && a.status == b.status, || format!("{args:?}: outputs differ"))?;
    }
    Ok(format!("{} invocations byte-identical across repeated runs", runs.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("C01", "scalar-product identity", 10, c01_scalar_product),
        ("C02", "divisibility structure", 5, c02_divisibility),
        ("C03", "property equivalence", 300, c03_property),
        ("C04", "dimension/rank bound", 600, c04_rank),
        ("C05", "lemma desk oracle", 600, c05_lemma_oracle),
        ("C06", "counting identities", 60, c06_counting),
        ("C07", "ratio optimality", 120, c07_optimality),
        ("C08", "shrinking-radius chain", 10, c08_shrinking_chain),
        ("C09", "simplex partition numerics", 300, c09_simplex_partition),
        ("C10", "bound consistency", 60, c10_bound_consistency),
        ("C11", "find_d0 self-consistency", 60, c11_find_d0),
        ("C12", "determinism", 120, c12_determinism),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let res = run();
        let took = start.elapsed();
        let res = match res {
            Ok(msg) if took > Duration::from_secs(budget) => Err(format!("{msg}; took {took:.1?} > {budget}s")),
            other => other,
        };
        match res {
            Ok(msg) => println!("PASS {id} {name} [{took:.1?}]: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id} {name} [{took:.1?}]: {msg}");
            }
        }
    }
    println!("{} of 12 criteria pass", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
