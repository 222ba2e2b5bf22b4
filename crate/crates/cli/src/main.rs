//! `borsuk`: plan parameters, build point sets, certify the rank lemma and
//! print bound tables. Exit 0 = ok, 1 = a mathematical check failed,
//! 2 = bad invocation or infeasible input.

mod emit;

use borsuk_core::algebra::{lemma_bound_check_with, LemmaOptions};
use borsuk_core::bounds::{asymptotic_base, find_d0, lower_bound, theorem2_exponent, theorem3_check};
use borsuk_core::construction::{gen_sigma, geometry, write_points, TensorImage, SIGMA_CAP};
use borsuk_core::optimality::{objective_bound, search_optimum};
use borsuk_core::params::{plan_fixed, plan_shrinking};
use borsuk_core::upper::{rogers_cover_log, theorem4_check};
use borsuk_core::{Error, ParamSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use emit::{Format, Report};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "borsuk", version, about = "Borsuk counterexamples on spheres: parameters, certificates, bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "BORSUK_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args, Debug, Clone, Default)]
struct Target {
    #[arg(long)]
    r: Option<f64>,
    /// Dimension; accepts plain integers or 1e12-style powers of ten.
    #[arg(long, value_parser = parse_u128)]
    d: Option<u128>,
    #[arg(long, value_enum, default_value_t = PlanMode::Fixed)]
    mode: PlanMode,
    #[arg(long, default_value_t = 6.0)]
    c_phi: f64,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Default, PartialEq)]
enum PlanMode {
    #[default]
    Fixed,
    Shrinking,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Choose (k, n, a, p) for a radius and dimension.
    Plan(Target),
    /// Geometry report; with --points, also the embedded point set.
    Build {
        #[command(flatten)]
        target: Target,
        /// Number of points of Omega to write (0 = report only).
        #[arg(long, default_value_t = 0)]
        points: usize,
        /// File for the point set (required with --points).
        #[arg(long)]
        points_out: Option<PathBuf>,
    },
    /// Certify the avoiding-family bound at (n, p, a).
    Certify {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u64,
        #[arg(long, default_value_t = 8)]
        families: usize,
    },
    /// Count bound |Sigma| / sum_{i<p} C(n,i) against d + 1; in shrinking
    /// mode the whole inequality chain.
    Bound(Target),
    /// Least d at which the fixed-radius bound beats d + 1.
    FindD0 {
        #[arg(long)]
        r: f64,
    },
    /// Entropy base of the count bound and its growth exponent.
    Asymptotic(Target),
    /// Simplex-partition upper bound at r = 1/2 + c_r/d.
    Upper {
        #[arg(long, value_parser = parse_u128)]
        d: u128,
        #[arg(long, default_value_t = 0.01)]
        c_r: f64,
    },
    /// Constrained search for the best ratio polynomial of degree m.
    OptimalPoly {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10.0)]
        n: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

fn parse_u128(s: &str) -> Result<u128, String> {
    if let Ok(v) = s.parse::<u128>() {
        return Ok(v);
    }
    let bad = || format!("`{s}` is not a non-negative integer");
    let (mant, exp) = s.split_once(['e', 'E']).ok_or_else(bad)?;
    let mant: u128 = mant.parse().map_err(|_| bad())?;
    let exp: u32 = exp.trim_start_matches('+').parse().map_err(|_| bad())?;
    10u128.checked_pow(exp).and_then(|p| p.checked_mul(mant)).ok_or_else(bad)
}

/// A failed run: usage/infeasibility (exit 2).
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

fn need<T>(v: Option<T>, flag: &str, cmd: &str) -> Result<T, Usage> {
    v.ok_or_else(|| Usage(format!("`{cmd}` requires --{flag}")))
}

fn resolve(t: &Target, cmd: &str, tol: f64) -> Result<ParamSet, Usage> {
    let overrides = [t.n.is_some(), t.k.is_some(), t.a.is_some(), t.p.is_some()];
    if overrides.iter().any(|&x| x) {
        let n = need(t.n, "n", cmd)?;
        let a = need(t.a, "a", cmd)?;
        let p = t.p.unwrap_or((n + a) / 4);
        return Ok(ParamSet::manual(n, t.k.unwrap_or(1), a, p, t.d.unwrap_or(0), t.r.unwrap_or(0.0))?);
    }
    let d = need(t.d, "d", cmd)?;
    Ok(match t.mode {
        PlanMode::Fixed => plan_fixed(need(t.r, "r", cmd)?, d, tol)?,
        PlanMode::Shrinking => plan_shrinking(d, t.c_phi, tol)?,
    })
}

#[derive(Serialize)]
struct BuildReport<'a> {
    params: &'a ParamSet,
    geometry: borsuk_core::GeometryReport,
    points_written: usize,
}

#[derive(Serialize)]
struct AsymptoticReport {
    base: borsuk_core::bounds::AsymptoticBase,
    /// ln(bound) / d^{1/(2k)}
    exponent: f64,
    ln_c: f64,
}

#[derive(Serialize)]
struct UpperReport {
    simplex: borsuk_core::SimplexPartitionReport,
    rogers_cover_log: Option<borsuk_core::LogReal>,
}

#[derive(Serialize)]
struct OptimalPolyReport {
    m: usize,
    n: f64,
    samples: usize,
    best_ratio: f64,
    best_objective: f64,
    objective_bound: f64,
    gap: f64,
    best_coeffs: Vec<f64>,
    best_is_member: bool,
}

fn run(cli: &Cli) -> Result<(Report, bool), Usage> {
    let c = &cli.common;
    Ok(match &cli.command {
        Command::Plan(t) => (Report::of(&resolve(t, "plan", c.tol)?), true),
        Command::Build { target, points, points_out } => {
            let ps = resolve(target, "build", c.tol)?;
            let g = geometry(&ps)?;
            if *points > 0 {
                let path = need(points_out.clone(), "points-out", "build --points")?;
                if ps.n as usize > SIGMA_CAP {
                    return Err(Usage(format!("n = {} too large to enumerate Sigma", ps.n)));
                }
                let xs: Vec<TensorImage> = gen_sigma(ps.n as usize)?
                    .into_iter()
                    .take(*points)
                    .map(|x| TensorImage::new(x, ps.k, ps.a))
                    .collect();
                let f = File::create(&path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
                write_points(BufWriter::new(f), &ps, &g, &xs)?;
            }
            let rep = BuildReport { params: &ps, geometry: g, points_written: *points };
            (Report::of(&rep), true)
        }
        Command::Certify { n, p, a, families } => {
            if 4 * p != n + a {
                return Err(Usage(format!("need n - 4p = -a, got n - 4p = {}", *n as i64 - 4 * *p as i64)));
            }
            let opts = LemmaOptions { families: *families, seed: c.seed, ..LemmaOptions::default() };
            let cert = lemma_bound_check_with(*n, *p, *a, &opts)?;
            (Report::of(&cert), cert.verdict)
        }
        Command::Bound(t) if t.mode == PlanMode::Shrinking && t.n.is_none() => {
            let rep = theorem3_check(need(t.d, "d", "bound")?, t.c_phi);
            let rows = emit::rows(&rep.checks);
            (Report::with_rows(&rep, rows), rep.all_pass)
        }
        Command::Bound(t) => {
            let ps = resolve(t, "bound", c.tol)?;
            if t.n.is_some() && t.d.is_none() {
                return Err(Usage("`bound` requires --d".into()));
            }
            let cb = lower_bound(&ps);
            let pass = cb.passes;
            (Report::of(&cb), pass)
        }
        Command::FindD0 { r } => (Report::of(&find_d0(*r, c.tol)?), true),
        Command::Asymptotic(t) => {
            let ps = resolve(t, "asymptotic", c.tol)?;
            let base = asymptotic_base(&ps)?;
            let ln_c = base.c.ln();
            (Report::of(&AsymptoticReport { exponent: theorem2_exponent(&ps), ln_c, base }), true)
        }
        Command::Upper { d, c_r } => {
            let d = usize::try_from(*d).map_err(|_| Usage("d too large".into()))?;
            let simplex = theorem4_check(d, *c_r)?;
            let rogers = rogers_cover_log(simplex.r, d as u64).ok();
            let pass = simplex.pass;
            (Report::of(&UpperReport { simplex, rogers_cover_log: rogers }), pass)
        }
        Command::OptimalPoly { m, n, samples } => {
            let res = search_optimum(*m, *n, *samples, c.seed)?;
            let bound = objective_bound(*m);
            let rep = OptimalPolyReport {
                m: *m,
                n: *n,
                samples: *samples,
                best_ratio: res.best_ratio,
                best_objective: res.best_objective,
                objective_bound: bound,
                gap: bound - res.best_objective,
                best_is_member: res.best.is_member(),
                best_coeffs: res.best.coeffs,
            };
            let pass = rep.best_is_member && rep.gap >= -1e-9;
            (Report::of(&rep), pass)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let (report, pass) = match run(&cli) {
        Ok(x) => x,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let bytes = report.render(cli.common.format);
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, &bytes),
        None => io::stdout().lock().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(if pass { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_ten() {
        assert_eq!(parse_u128("1e12"), Ok(1_000_000_000_000));
        assert_eq!(parse_u128("3E2"), Ok(300));
        assert_eq!(parse_u128("999"), Ok(999));
        assert!(parse_u128("1.5e3").is_err());
        assert!(parse_u128("1e40").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
