//! Finite difference oracles and remainder tables.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::lp_space::{Exponent, LinearSpace, LpVector};
use crate::sample::{self, seeded_rng};
use crate::{Error, Result};

/// Successive quotients further apart than this at the two smallest steps
/// flag a divergent estimate.
pub const DIVERGENCE_THRESHOLD: f64 = 1e-2;

/// Strictly decreasing positive step sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepSchedule {
    steps: Vec<f64>,
}

impl StepSchedule {
    pub fn new(steps: Vec<f64>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidSchedule("no steps".into()));
        }
        if let Some(bad) = steps.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
            return Err(Error::InvalidSchedule(format!("step {bad} is not positive")));
        }
        if steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidSchedule("steps must strictly decrease".into()));
        }
        Ok(Self { steps })
    }

    /// `10^-first, 10^-(first+1), ..., 10^-last`.
    pub fn decades(first: i32, last: i32) -> Result<Self> {
        Self::new((first..=last).map(|k| 10f64.powi(-k)).collect())
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn smallest(&self) -> f64 {
        *self.steps.last().expect("schedules are nonempty")
    }
}

impl Default for StepSchedule {
    fn default() -> Self {
        Self::decades(1, 6).expect("decades are decreasing")
    }
}

impl FromStr for StepSchedule {
    type Err = Error;

    /// A comma-separated list such as `"1e-2,1e-4"`.
    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidSchedule(format!("bad step {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateauxEstimate<V> {
    /// `(P(x + h w) - P(x)) / h` at the smallest step.
    pub quotient: V,
    /// Norms of the differences between quotients at consecutive steps.
    pub successive_differences: Vec<f64>,
    pub diverged: bool,
}

impl<V> GateauxEstimate<V> {
    /// Successive differences shrink along the schedule.
    pub fn is_settling(&self) -> bool {
        self.successive_differences.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Forward difference quotients of `project` at `x` along `w`.
pub fn numerical_gateaux<V, F>(project: F, x: &V, w: &V, schedule: &StepSchedule, p: Exponent) -> Result<GateauxEstimate<V>>
where
    V: LinearSpace,
    F: Fn(&V) -> V,
{
    if w.norm(p) == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let at_x = project(x);
    let quotients: Vec<V> = schedule
        .steps()
        .iter()
        .map(|&h| project(&x.axpy(h, w)).sub(&at_x).scale(1.0 / h))
        .collect();
    let successive_differences: Vec<f64> = quotients.windows(2).map(|q| q[1].sub(&q[0]).norm(p)).collect();
    let diverged = successive_differences
        .last()
        .is_some_and(|&d| d > DIVERGENCE_THRESHOLD);
    Ok(GateauxEstimate {
        quotient: quotients.into_iter().last().expect("schedules are nonempty"),
        successive_differences,
        diverged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualRow {
    pub h: f64,
    pub max_ratio: f64,
}

/// Largest first-order remainder ratio observed at each step size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualTable {
    pub rows: Vec<ResidualRow>,
}

impl ResidualTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,max_ratio\n");
        for row in &self.rows {
            writeln!(out, "{:.16e},{:.16e}", row.h, row.max_ratio).expect("writing to a string");
        }
        out
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].max_ratio <= w[0].max_ratio)
    }

    pub fn final_ratio(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.max_ratio)
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.max_ratio))
    }

    /// Rows with `h <= cutoff`.
    pub fn below(&self, cutoff: f64) -> Self {
        Self {
            rows: self.rows.iter().copied().filter(|r| r.h <= cutoff).collect(),
        }
    }
}

/// `max_d ||P(b + h d) - P(b) - A(h d)|| / (h ||d||)` for each step `h`.
pub fn frechet_residual<V, P, A>(
    project: P,
    operator: A,
    base: &V,
    directions: &[V],
    schedule: &StepSchedule,
    p: Exponent,
) -> ResidualTable
where
    V: LinearSpace,
    P: Fn(&V) -> V,
    A: Fn(&V) -> V,
{
    let at_base = project(base);
    let rows = schedule
        .steps()
        .iter()
        .map(|&h| {
            let max_ratio = directions
                .iter()
                .filter_map(|d| {
                    let nd = d.norm(p);
                    (nd > 0.0).then(|| {
                        let step = d.scale(h);
                        let rem = project(&base.add(&step)).sub(&at_base).sub(&operator(&step));
                        rem.norm(p) / (h * nd)
                    })
                })
                .fold(0.0, f64::max);
            ResidualRow { h, max_ratio }
        })
        .collect();
    ResidualTable { rows }
}

/// `max ||P(u) - P(v) - A(u - v)|| / ||u - v||` over `pairs` pairs drawn
/// by `sampler(h)` for each step `h`.
pub fn strict_frechet_residual<V, P, A, S>(
    project: P,
    operator: A,
    mut sampler: S,
    pairs: usize,
    schedule: &StepSchedule,
    p: Exponent,
) -> ResidualTable
where
    V: LinearSpace,
    P: Fn(&V) -> V,
    A: Fn(&V) -> V,
    S: FnMut(f64) -> (V, V),
{
    let rows = schedule
        .steps()
        .iter()
        .map(|&h| {
            let mut max_ratio = 0.0_f64;
            for _ in 0..pairs {
                let (u, v) = sampler(h);
                let diff = u.sub(&v);
                let nd = diff.norm(p);
                if nd > 0.0 {
                    let rem = project(&u).sub(&project(&v)).sub(&operator(&diff));
                    max_ratio = max_ratio.max(rem.norm(p) / nd);
                }
            }
            ResidualRow { h, max_ratio }
        })
        .collect();
    ResidualTable { rows }
}

/// Pairs drawn independently from the `h`-ball around `base` in the first
/// `dim` coordinates.
pub fn ball_pair_sampler(base: LpVector, dim: usize, p: Exponent, seed: u64) -> impl FnMut(f64) -> (LpVector, LpVector) {
    let mut rng = seeded_rng(seed);
    move |h| {
        let u = &base + &sample::in_ball(&mut rng, dim, h, p);
        let v = &base + &sample::in_ball(&mut rng, dim, h, p);
        (u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_space::{IndexSet, MeasureSpace, StepFunction};
    use crate::projections::{project_ball, project_cone, project_cylinder};
    use std::sync::Arc;

    fn exp(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn schedules() {
        assert_eq!(StepSchedule::default().steps().len(), 6);
        assert_eq!(StepSchedule::default().smallest(), 1e-6);
        assert!(StepSchedule::new(vec![]).is_err());
        assert!(StepSchedule::new(vec![1e-2, 1e-2]).is_err());
        assert!(StepSchedule::new(vec![1e-2, -1.0]).is_err());
        let s: StepSchedule = "1e-2, 1e-3".parse().unwrap();
        assert_eq!(s.steps(), &[1e-2, 1e-3]);
        assert!("1e-2,x".parse::<StepSchedule>().is_err());
    }

    #[test]
    fn identity_quotient() {
        let p = exp(3.0);
        let x = LpVector::from_dense(&[1.0, 2.0]);
        let w = LpVector::from_dense(&[0.5, -1.0, 3.0]);
        let est = numerical_gateaux(|v: &LpVector| v.clone(), &x, &w, &StepSchedule::default(), p).unwrap();
        assert!((&est.quotient - &w).max_abs() < 1e-9);
        assert!(!est.diverged);
        assert_eq!(
            numerical_gateaux(|v: &LpVector| v.clone(), &x, &LpVector::zero(), &StepSchedule::default(), p),
            Err(Error::ZeroDirection)
        );
    }

    #[test]
    fn interior_quotients() {
        let p = exp(3.0);
        let x = LpVector::from_dense(&[0.1, -0.2]);
        let w = LpVector::from_dense(&[1.0, 1.0, 1.0]);
        let est = numerical_gateaux(|v| project_ball(v, 1.0, p), &x, &w, &StepSchedule::default(), p).unwrap();
        assert!((&est.quotient - &w).max_abs() < 1e-9);

        let space = Arc::new(MeasureSpace::geometric(5));
        let f = StepFunction::constant(space.clone(), -1.0);
        let g = StepFunction::new(space, vec![1.0, -2.0, 3.0, 0.5, 2.0]).unwrap();
        let est = numerical_gateaux(project_cone, &f, &g, &StepSchedule::default(), p).unwrap();
        assert!(est.quotient.lp_norm(p) < 1e-10);
    }

    #[test]
    fn sphere_quotients_along_a_kink() {
        // P(x + h w) - P(x) is not differentiable in w at the sphere, but a
        // single direction still has a one-sided limit
        let p = exp(3.0);
        let x = LpVector::from_dense(&[1.0]);
        let w = LpVector::from_dense(&[1.0, 1.0]);
        let est = numerical_gateaux(|v| project_ball(v, 1.0, p), &x, &w, &StepSchedule::default(), p).unwrap();
        assert!(!est.diverged);
        assert!((&est.quotient - &LpVector::from_dense(&[0.0, 1.0])).max_abs() < 1e-5);
    }

    #[test]
    fn divergence_flag() {
        let p = exp(2.0);
        let x = LpVector::zero();
        let w = LpVector::basis(1);
        // a map with a square-root cusp
        let cusp = |v: &LpVector| v.map(|_, t| t.abs().sqrt());
        let est = numerical_gateaux(cusp, &x, &w, &StepSchedule::default(), p).unwrap();
        assert!(est.diverged);
        assert!(!est.is_settling());
    }

    #[test]
    fn residual_tables() {
        let p = exp(3.0);
        let base = LpVector::from_dense(&[2.0, -1.0, 0.5]);
        let op = crate::derivatives::frechet_ball(&base, 1.0, p).unwrap();
        let op = op.operator().unwrap().clone();
        let mut rng = seeded_rng(1);
        let dirs: Vec<LpVector> = (0..10).map(|_| sample::gaussian_vector(&mut rng, 3)).collect();
        let table = frechet_residual(|x| project_ball(x, 1.0, p), |x| op.apply(x), &base, &dirs, &StepSchedule::default(), p);
        assert!(table.final_ratio() < 1e-4);
        assert!(table.below(1e-2).is_nonincreasing());
        let csv = table.to_csv();
        assert!(csv.starts_with("h,max_ratio\n1.0000000000000001e-1,"), "{csv}");
        assert_eq!(csv.lines().count(), 7);

        // zero up to the roundoff in (b + h d) - b - h d
        let zero = frechet_residual(|x: &LpVector| x.clone(), |x| x.clone(), &base, &dirs, &StepSchedule::default(), p);
        assert!(zero.max_ratio() < 1e-9);
    }

    #[test]
    fn sphere_residual_does_not_decay() {
        // the directional formula is not a Fréchet derivative: along the
        // inward radial direction its candidate linear map is off by ||d||
        let p = exp(3.0);
        let base = crate::sample::on_sphere(&mut seeded_rng(2), 3, 1.0, p);
        let candidate = |d: &LpVector| {
            let c = crate::duality::dual_pairing(&base, d, p);
            d - &(c * &base)
        };
        let dirs = vec![base.clone(), -&base];
        let table = frechet_residual(|x| project_ball(x, 1.0, p), candidate, &base, &dirs, &StepSchedule::default(), p);
        assert!(table.final_ratio() > 0.5);
    }

    #[test]
    fn strict_residual_interiors() {
        let p = exp(1.5);
        let base = LpVector::from_dense(&[0.1, 0.2, -0.1]);
        let table = strict_frechet_residual(
            |x| project_ball(x, 1.0, p),
            |x: &LpVector| x.clone(),
            ball_pair_sampler(base.clone(), 3, p, 3),
            50,
            &StepSchedule::decades(2, 6).unwrap(),
            p,
        );
        assert_eq!(table.max_ratio(), 0.0);

        let m = IndexSet::finite([1, 2]).unwrap();
        let base = LpVector::from_dense(&[0.1, 0.2, 30.0]);
        let table = strict_frechet_residual(
            |x| project_cylinder(x, 1.0, &m, p),
            |x: &LpVector| x.clone(),
            ball_pair_sampler(base, 4, p, 4),
            50,
            &StepSchedule::decades(2, 6).unwrap(),
            p,
        );
        assert_eq!(table.max_ratio(), 0.0);
    }
}
