//! Randomized invariant suite behind the `check` verb.

use std::fmt::Write as _;
use std::sync::Arc;

use lp_projection::decomp::semi_orthogonal;
use lp_projection::derivatives::{frechet_ball, gateaux_ball, probe_operator};
use lp_projection::duality::{dual_pairing, duality_map, duality_map_star, norm_square_sandwich, pairing};
use lp_projection::projections::{
    project_ball, project_cone, project_cylinder, project_line, variational_margin, Point, ProjectionTarget,
};
use lp_projection::root::RootOptions;
use lp_projection::sample::{self, derive_seed, seeded_rng, SampleRng};
use lp_projection::{Exponent, IndexSet, LpVector, MeasureSpace, Result};
use rand::Rng;

use crate::args::CheckArgs;
use crate::commands::Report;
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_PROPERTY};

type Trial = fn(&mut SampleRng, Exponent) -> Result<f64>;

struct Property {
    name: &'static str,
    tol: f64,
    /// Only meaningful for `p = 2`.
    hilbert: bool,
    trial: Trial,
}

const PROPERTIES: &[Property] = &[
    Property { name: "duality-inverse", tol: 1e-10, hilbert: false, trial: duality_inverse },
    Property { name: "duality-pairing", tol: 1e-10, hilbert: false, trial: duality_pairing },
    Property { name: "duality-norm", tol: 1e-10, hilbert: false, trial: duality_norm },
    Property { name: "norm-square-sandwich", tol: 1e-10, hilbert: false, trial: sandwich },
    Property { name: "split-tangency", tol: 1e-10, hilbert: false, trial: split_tangency },
    Property { name: "ball-idempotence", tol: 1e-12, hilbert: false, trial: ball_idempotence },
    Property { name: "ball-variational", tol: 1e-9, hilbert: false, trial: ball_variational },
    Property { name: "cylinder-idempotence", tol: 1e-12, hilbert: false, trial: cylinder_idempotence },
    Property { name: "cylinder-full-mask", tol: 1e-12, hilbert: false, trial: cylinder_full_mask },
    Property { name: "line-dual-characterization", tol: 1e-12, hilbert: false, trial: line_dual },
    Property { name: "line-minimality", tol: 1e-12, hilbert: false, trial: line_minimality },
    Property { name: "gateaux-homogeneity", tol: 1e-12, hilbert: false, trial: gateaux_homogeneity },
    Property { name: "frechet-operator", tol: 1e-10, hilbert: false, trial: frechet_operator },
    Property { name: "cone-projection", tol: 1e-12, hilbert: false, trial: cone_projection },
    Property { name: "hilbert-duality", tol: 1e-14, hilbert: true, trial: hilbert_duality },
    Property { name: "hilbert-line", tol: 1e-10, hilbert: true, trial: hilbert_line },
];

fn dim(rng: &mut SampleRng) -> usize {
    rng.random_range(1..=8)
}

fn vector(rng: &mut SampleRng) -> LpVector {
    loop {
        let d = dim(rng);
        let x = sample::gaussian_vector(rng, d);
        if !x.is_zero() {
            return x;
        }
    }
}

fn duality_inverse(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let x = vector(rng);
    let back = duality_map_star(&duality_map(&x, p), p);
    Ok((&back - &x).norm(p) / x.norm(p))
}

fn duality_pairing(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let x = vector(rng);
    let n2 = x.norm(p).powi(2);
    Ok((pairing(&duality_map(&x, p), &x) - n2).abs() / n2)
}

fn duality_norm(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let x = vector(rng);
    let n = x.norm(p);
    Ok((duality_map(&x, p).norm(p) - n).abs() / n)
}

fn sandwich(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let (x, y) = (vector(rng), vector(rng));
    Ok(norm_square_sandwich(&x, &y, p).violation().max(0.0))
}

fn split_tangency(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let (b, x) = (vector(rng), vector(rng));
    let d = semi_orthogonal(&b, &x, p)?;
    let (nb, nx) = (b.norm(p), x.norm(p));
    let rebuilt = (&d.reconstruct(&b) - &x).norm(p) / nx;
    let tangency = dual_pairing(&b, &d.o, p).abs() / (nb * (nx + d.o.norm(p)));
    Ok(rebuilt.max(tangency))
}

fn ball_point(rng: &mut SampleRng, p: Exponent) -> (LpVector, f64) {
    let r = rng.random_range(0.5..2.0);
    let d = dim(rng);
    (sample::scaled_sphere(rng, d, r, 0.2, 3.0, p), r)
}

fn ball_idempotence(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let (x, r) = ball_point(rng, p);
    let u = project_ball(&x, r, p);
    Ok((&project_ball(&u, r, p) - &u).norm(p) / r)
}

fn ball_variational(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let (x, r) = ball_point(rng, p);
    let u = project_ball(&x, r, p);
    let target = ProjectionTarget::ball(r, p)?;
    let scale = (x.norm(p) + r).powi(2);
    let margin = variational_margin(&x.clone().into(), &u.into(), &target, 16, rng.random())?;
    Ok((-margin).max(0.0) / scale)
}

fn cylinder_instance(rng: &mut SampleRng) -> (LpVector, f64, IndexSet) {
    let d = dim(rng);
    let x = 3.0 * &sample::gaussian_vector(rng, d);
    let mut members: Vec<usize> = (1..=d + 1).filter(|_| rng.random_bool(0.5)).collect();
    if members.is_empty() {
        members.push(1);
    }
    let mask = IndexSet::finite(members).expect("indices start at 1");
    (x, rng.random_range(0.5..2.0), mask)
}

fn cylinder_idempotence(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let (x, r, mask) = cylinder_instance(rng);
    let u = project_cylinder(&x, r, &mask, p);
    Ok((&project_cylinder(&u, r, &mask, p) - &u).norm(p) / (1.0 + u.norm(p)))
}

fn cylinder_full_mask(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let (x, r, _) = cylinder_instance(rng);
    let gap = (&project_cylinder(&x, r, &IndexSet::all(), p) - &project_ball(&x, r, p)).norm(p);
    Ok(gap / (1.0 + x.norm(p)))
}

/// Half-width, relative to `max(1, |t*|)`, of the smallest bracket around
/// `t*` on which `phi(t) = <J(x - t b), b>` changes sign. The residual
/// `|phi(t*)|` itself is a poor measure for `p < 2`, where `phi` has
/// unbounded slope near coordinates with `x_i = t b_i`.
fn line_dual(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let (x, b) = (vector(rng), vector(rng));
    let t = project_line(&x, &b, p, RootOptions::default())?.t_star;
    let phi = |s: f64| dual_pairing(&(&x - &(s * &b)), &b, p);
    if phi(t) == 0.0 {
        return Ok(0.0);
    }
    let unit = f64::EPSILON * t.abs().max(1.0);
    let mut width = unit;
    while width < 1.0 {
        if phi(t - width) >= 0.0 && phi(t + width) <= 0.0 {
            return Ok(width / t.abs().max(1.0));
        }
        width *= 2.0;
    }
    Ok(f64::INFINITY)
}

fn line_minimality(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let (x, b) = (vector(rng), vector(rng));
    let t = project_line(&x, &b, p, RootOptions::default())?.t_star;
    let dist = |s: f64| (&x - &(s * &b)).norm(p);
    let delta = 1e-3 * (1.0 + t.abs());
    let best = dist(t - delta).min(dist(t + delta));
    Ok((dist(t) - best).max(0.0) / x.norm(p))
}

fn gateaux_homogeneity(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let r = rng.random_range(0.5..2.0);
    let d = dim(rng);
    let base = sample::on_sphere(rng, d, r, p);
    let w = sample::gaussian_vector(rng, d + 1);
    let lambda = rng.random_range(0.1..10.0);
    let scaled = gateaux_ball(&base, &(lambda * &w), r, p)?;
    let plain = gateaux_ball(&base, &w, r, p)?;
    Ok((&scaled - &(lambda * &plain)).norm(p) / (lambda * (plain.norm(p) + w.norm(p))))
}

fn frechet_operator(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let (x, r) = ball_point(rng, p);
    let derivative = frechet_ball(&x, r, p)?;
    let Some(op) = derivative.operator() else {
        return Ok(0.0);
    };
    let probe = probe_operator(op, x.dimension() + 1, p, 8, rng.random());
    Ok(probe.linearity_defect.max(probe.observed_norm / probe.bound - 1.0).max(0.0))
}

fn cone_projection(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let space = Arc::new(MeasureSpace::geometric(16));
    let f = sample::gaussian_function(rng, &space);
    let u = project_cone(&f);
    let again = project_cone(&u).zip_with(&u, |a, b| a - b).lp_norm(p);
    let target = ProjectionTarget::cone(space, p);
    let scale = (1.0 + f.lp_norm(p)).powi(2);
    let margin = variational_margin(&Point::from(f), &Point::from(u), &target, 16, rng.random())?;
    Ok(again.max((-margin).max(0.0) / scale))
}

fn hilbert_duality(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let x = vector(rng);
    Ok((duality_map(&x, p).entries() - &x).norm(p) / x.norm(p))
}

fn hilbert_line(rng: &mut SampleRng, p: Exponent) -> Result<f64> {
    let (x, b) = (vector(rng), vector(rng));
    let t = project_line(&x, &b, p, RootOptions::default())?.t_star;
    let exact = x.dot(&b) / b.dot(&b);
    Ok((t - exact).abs() / (1.0 + exact.abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub property: &'static str,
    pub p: f64,
    pub trials: usize,
    pub passed: usize,
    pub max_violation: f64,
    pub tol: f64,
    pub errors: usize,
}

impl BatchResult {
    pub fn pass(&self) -> bool {
        self.passed == self.trials
    }
}

fn run_batch(property: &Property, p: Exponent, trials: usize, tol: f64, seed: u64) -> BatchResult {
    let mut rng = seeded_rng(seed);
    let (mut passed, mut errors, mut worst) = (0, 0, 0.0_f64);
    for _ in 0..trials {
        match (property.trial)(&mut rng, p) {
            Ok(v) => {
                worst = worst.max(v);
                if v <= tol {
                    passed += 1;
                }
            }
            Err(_) => {
                errors += 1;
                worst = f64::INFINITY;
            }
        }
    }
    BatchResult {
        property: property.name,
        p: p.p(),
        trials,
        passed,
        max_violation: worst,
        tol,
        errors,
    }
}

fn parse_exponents(list: &str) -> CliResult<Vec<Exponent>> {
    list.split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|_| CliError::parse(format!("--p: bad exponent {t:?}")))?;
            Ok(Exponent::new(v)?)
        })
        .collect()
}

/// Runs every applicable (property, exponent) batch. Batch `i` draws from
/// the stream `derive_seed(seed, i)`, so results do not depend on the
/// thread count.
pub fn run_suite(seed: u64, exponents: &[Exponent], trials: usize, tol: Option<f64>, threads: usize) -> Vec<BatchResult> {
    let jobs: Vec<(&Property, Exponent)> = PROPERTIES
        .iter()
        .flat_map(|prop| exponents.iter().map(move |&p| (prop, p)))
        .filter(|(prop, p)| !prop.hilbert || p.p() == 2.0)
        .collect();
    let threads = threads.clamp(1, jobs.len().max(1));
    let mut results: Vec<Option<BatchResult>> = vec![None; jobs.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|k| {
                let jobs = &jobs;
                scope.spawn(move || {
                    (k..jobs.len())
                        .step_by(threads)
                        .map(|i| {
                            let (prop, p) = jobs[i];
                            (i, run_batch(prop, p, trials, tol.unwrap_or(prop.tol), derive_seed(seed, i as u64)))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("property worker panicked") {
                results[i] = Some(r);
            }
        }
    });
    results.into_iter().map(|r| r.expect("every batch ran")).collect()
}

pub fn check(args: &CheckArgs) -> CliResult<Report> {
    let exponents = parse_exponents(&args.p)?;
    if args.trials == 0 {
        return Err(CliError::parse("--trials must be positive"));
    }
    if let Some(t) = args.tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::parse(format!("--tol must be a nonnegative number, got {t}")));
        }
    }
    let results = run_suite(args.seed, &exponents, args.trials, args.tol, args.threads);
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{:<28} {:>5} {:>7} {:>7} {:>14} {:>10}  status",
        "property", "p", "trials", "passed", "max_violation", "tol"
    );
    for r in &results {
        let _ = writeln!(
            text,
            "{:<28} {:>5} {:>7} {:>7} {:>14.3e} {:>10.1e}  {}{}",
            r.property,
            r.p,
            r.trials,
            r.passed,
            r.max_violation,
            r.tol,
            if r.pass() { "ok" } else { "FAIL" },
            if r.errors > 0 { format!(" ({} errors)", r.errors) } else { String::new() },
        );
    }
    let ok = results.iter().filter(|r| r.pass()).count();
    let _ = writeln!(text, "{ok} of {} batches passed", results.len());
    Ok(Report {
        text,
        exit: if ok == results.len() { EXIT_OK } else { EXIT_PROPERTY },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_count_does_not_change_results() {
        let ps = parse_exponents("1.5,3").unwrap();
        assert_eq!(run_suite(7, &ps, 5, None, 1), run_suite(7, &ps, 5, None, 3));
    }

    #[test]
    fn hilbert_properties_need_p_two() {
        let names = |ps: &str| -> Vec<&str> {
            run_suite(1, &parse_exponents(ps).unwrap(), 1, None, 2).iter().map(|r| r.property).collect()
        };
        assert!(!names("3").contains(&"hilbert-line"));
        assert!(names("2").contains(&"hilbert-line"));
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(parse_exponents("1").is_err());
        assert!(parse_exponents("2,x").is_err());
    }
}
