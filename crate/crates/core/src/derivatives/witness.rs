//! Explicit sequences along which no Fréchet derivative can exist.

use serde::Serialize;

use crate::lp_space::{Exponent, IndexSet, LpVector, StepFunction};
use crate::projections::{project_ball, project_cone, project_cylinder};
use crate::{Error, Result};

use super::require_boundary;
use super::StepSchedule;

/// Radial difference quotients at a sphere point. Outward they force any
/// derivative `A` to satisfy `A(base) = 0`, inward `A(base) = base`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereReport {
    pub p: f64,
    pub radius: f64,
    pub base: LpVector,
    pub steps: Vec<f64>,
    /// `(P((1 + d) base) - P(base)) / d` at the smallest step.
    pub outward_forced: LpVector,
    /// `(P((1 - d) base) - P(base)) / (-d)` at the smallest step.
    pub inward_forced: LpVector,
    /// `||inward_forced - outward_forced||`, expected to equal the radius.
    pub disagreement: f64,
    pub pass: bool,
}

pub fn witness_sphere_nondiff(base: &LpVector, r: f64, p: Exponent, schedule: &StepSchedule) -> Result<SphereReport> {
    require_boundary(base.norm(p), r)?;
    let at_base = project_ball(base, r, p);
    let quotient = |t: f64| (1.0 / t) * &(&project_ball(&((1.0 + t) * base), r, p) - &at_base);
    let d = schedule.smallest();
    let outward_forced = quotient(d);
    let inward_forced = quotient(-d);
    let disagreement = (&inward_forced - &outward_forced).norm(p);
    let pass = outward_forced.norm(p) <= 1e-9 * r
        && (&inward_forced - base).norm(p) <= 1e-9 * r
        && (disagreement - r).abs() <= 1e-9 * r;
    Ok(SphereReport {
        p: p.p(),
        radius: r,
        base: base.clone(),
        steps: schedule.steps().to_vec(),
        outward_forced,
        inward_forced,
        disagreement,
        pass,
    })
}

/// The same radial test for a cylinder, moving only the `M` coordinates:
/// the quotients along `base_M` force `A(base_M) = 0` outward and
/// `A(base_M) = base_M` inward. `base` in the report is `base_M`.
pub fn witness_cylinder_nondiff(
    base: &LpVector,
    r: f64,
    mask: &IndexSet,
    p: Exponent,
    schedule: &StepSchedule,
) -> Result<SphereReport> {
    let radial = base.mask(mask);
    require_boundary(radial.norm(p), r)?;
    let at_base = project_cylinder(base, r, mask, p);
    let quotient =
        |t: f64| (1.0 / t) * &(&project_cylinder(&(base + &(t * &radial)), r, mask, p) - &at_base);
    let d = schedule.smallest();
    let outward_forced = quotient(d);
    let inward_forced = quotient(-d);
    let disagreement = (&inward_forced - &outward_forced).norm(p);
    let pass = outward_forced.norm(p) <= 1e-9 * r
        && (&inward_forced - &radial).norm(p) <= 1e-9 * r
        && (disagreement - r).abs() <= 1e-9 * r;
    Ok(SphereReport {
        p: p.p(),
        radius: r,
        base: radial,
        steps: schedule.steps().to_vec(),
        outward_forced,
        inward_forced,
        disagreement,
        pass,
    })
}

/// Nested sets `D_1 ⊃ D_2 ⊃ ...` taken as tails of `atoms` after sorting
/// by decreasing weight, so their measures strictly decrease.
fn nested_tails(f: &StepFunction, mut atoms: Vec<usize>, steps: usize) -> Vec<Vec<usize>> {
    let space = f.space();
    atoms.sort_by(|&a, &b| space.weight(b).total_cmp(&space.weight(a)).then(a.cmp(&b)));
    (0..steps).map(|n| atoms[n..].to_vec()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeInsideReport {
    pub p: f64,
    pub lambda: f64,
    pub measures: Vec<f64>,
    /// `||2 lambda 1_D - f 1_D|| / ||2 lambda 1_D||` for each set.
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub pass: bool,
}

/// Perturbations `g_n = 2 lambda 1_{D_n}` at a cone member `f` with
/// `0 <= f <= lambda` on every `D_n`. Each remainder ratio stays at least
/// `1/2`, which a Fréchet derivative would drive to zero.
pub fn witness_cone_nondiff_in_cone(f: &StepFunction, lambda: f64, steps: usize, p: Exponent) -> Result<ConeInsideReport> {
    if !f.is_nonnegative() {
        return Err(Error::WitnessPrecondition("f must lie in the positive cone".into()));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::WitnessPrecondition(format!("lambda must be positive, got {lambda}")));
    }
    let qualifying: Vec<usize> = (0..f.values().len())
        .filter(|&k| f.values()[k] <= lambda)
        .collect();
    if steps == 0 || qualifying.len() < steps {
        return Err(Error::WitnessPrecondition(format!(
            "{} atoms with 0 <= f <= {lambda}, need {steps}",
            qualifying.len()
        )));
    }
    let space = f.space().clone();
    let mut measures = Vec::with_capacity(steps);
    let mut ratios = Vec::with_capacity(steps);
    for set in nested_tails(f, qualifying, steps) {
        measures.push(space.measure_of(&set));
        let g = StepFunction::indicator(space.clone(), &set, 2.0 * lambda);
        let fn_ = StepFunction::indicator(space.clone(), &set, 1.0).zip_with(f, |a, b| a * b);
        let num = g.zip_with(&fn_, |a, b| a - b).lp_norm(p);
        ratios.push(num / g.lp_norm(p));
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConeInsideReport {
        p: p.p(),
        lambda,
        measures,
        pass: min_ratio >= 0.5 - 1e-12,
        ratios,
        min_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeOutsideReport {
    pub p: f64,
    pub beta: f64,
    pub measures: Vec<f64>,
    /// `||h_m / ||h_m|| ||`, identically one.
    pub normalized_norms: Vec<f64>,
    /// `max |(P(f + h_m) - P(f)) - h_m / 2|`.
    pub half_step_defects: Vec<f64>,
    /// `||P(f - h_m) - P(f)||`: perturbations into the negative part leave
    /// the projection unchanged, forcing `B(h_m) = 0` for a linear `B`.
    pub downward_differences: Vec<f64>,
    /// `||P(f + h_m) - P(f)|| / ||h_m||`, which a Fréchet derivative with
    /// `B(h_m) = 0` would send to zero.
    pub remainder_ratios: Vec<f64>,
    pub pass: bool,
}

/// Perturbations `h_m = -2 f 1_{D_m}` supported where `-beta < f < 0`.
pub fn witness_cone_nondiff_outside(f: &StepFunction, beta: f64, steps: usize, p: Exponent) -> Result<ConeOutsideReport> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::WitnessPrecondition(format!("beta must be positive, got {beta}")));
    }
    let qualifying: Vec<usize> = (0..f.values().len())
        .filter(|&k| f.values()[k] < 0.0 && f.values()[k] > -beta)
        .collect();
    if steps == 0 || qualifying.len() < steps {
        return Err(Error::WitnessPrecondition(format!(
            "{} atoms with -{beta} < f < 0, need {steps}",
            qualifying.len()
        )));
    }
    let space = f.space().clone();
    let at_f = project_cone(f);
    let mut report = ConeOutsideReport {
        p: p.p(),
        beta,
        measures: Vec::new(),
        normalized_norms: Vec::new(),
        half_step_defects: Vec::new(),
        downward_differences: Vec::new(),
        remainder_ratios: Vec::new(),
        pass: false,
    };
    for set in nested_tails(f, qualifying, steps) {
        report.measures.push(space.measure_of(&set));
        let h = StepFunction::indicator(space.clone(), &set, -2.0).zip_with(f, |a, b| a * b);
        let nh = h.lp_norm(p);
        report.normalized_norms.push(h.map(|v| v / nh).lp_norm(p));
        let up = project_cone(&f.zip_with(&h, |a, b| a + b)).zip_with(&at_f, |a, b| a - b);
        let defect = up
            .zip_with(&h, |a, b| (a - 0.5 * b).abs())
            .values()
            .iter()
            .fold(0.0_f64, |m, &v| m.max(v));
        report.half_step_defects.push(defect);
        let down = project_cone(&f.zip_with(&h, |a, b| a - b)).zip_with(&at_f, |a, b| a - b);
        report.downward_differences.push(down.lp_norm(p));
        report.remainder_ratios.push(up.lp_norm(p) / nh);
    }
    report.pass = report.normalized_norms.iter().all(|&n| (n - 1.0).abs() <= 1e-12)
        && report.half_step_defects.iter().all(|&d| d <= 1e-12)
        && report.downward_differences.iter().all(|&d| d == 0.0)
        && report.remainder_ratios.iter().all(|&r| (r - 0.5).abs() <= 1e-12);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_space::MeasureSpace;
    use crate::sample::{on_sphere, seeded_rng};
    use std::sync::Arc;

    fn exp(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn sphere() {
        let p = exp(3.0);
        let base = on_sphere(&mut seeded_rng(3), 4, 2.0, p);
        let r = witness_sphere_nondiff(&base, 2.0, p, &StepSchedule::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.disagreement - 2.0).abs() < 1e-8);
        assert!(matches!(
            witness_sphere_nondiff(&(0.5 * &base), 2.0, p, &StepSchedule::default()),
            Err(Error::OffBoundary { .. })
        ));
    }

    #[test]
    fn cylinder() {
        let p = exp(1.5);
        let m = IndexSet::finite([1, 3]).unwrap();
        let ring = on_sphere(&mut seeded_rng(4), 2, 1.0, p);
        let base = LpVector::from_entries([(1, ring.get(1)), (2, 7.0), (3, ring.get(2))]).unwrap();
        let r = witness_cylinder_nondiff(&base, 1.0, &m, p, &StepSchedule::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(witness_cylinder_nondiff(&(2.0 * &base), 1.0, &m, p, &StepSchedule::default()).is_err());
    }

    #[test]
    fn cone_inside() {
        let space = Arc::new(MeasureSpace::geometric(16));
        for p in [1.5, 2.0, 3.0] {
            let p = exp(p);
            let zero = witness_cone_nondiff_in_cone(&StepFunction::zero(space.clone()), 1.0, 8, p).unwrap();
            assert!(zero.ratios.iter().all(|&r| r == 1.0), "{zero:?}");
            let flat = witness_cone_nondiff_in_cone(&StepFunction::constant(space.clone(), 0.7), 0.7, 8, p).unwrap();
            assert!(flat.ratios.iter().all(|&r| r == 0.5), "{flat:?}");
            assert!(flat.measures.windows(2).all(|w| w[1] < w[0]));
            let mixed = StepFunction::new(space.clone(), (0..16).map(|k| (k as f64 * 0.37).sin().abs()).collect()).unwrap();
            let r = witness_cone_nondiff_in_cone(&mixed, 1.0, 8, p).unwrap();
            assert!(r.pass && r.ratios.iter().all(|&x| x <= 1.0));
        }
        let tall = StepFunction::constant(Arc::new(MeasureSpace::geometric(4)), 5.0);
        assert!(witness_cone_nondiff_in_cone(&tall, 1.0, 2, exp(3.0)).is_err());
    }

    #[test]
    fn cone_outside() {
        let p = exp(3.0);
        let space = Arc::new(MeasureSpace::geometric(16));
        let f = StepFunction::new(space.clone(), (0..16).map(|k| if k % 3 == 0 { 1.0 } else { -0.25 }).collect()).unwrap();
        let r = witness_cone_nondiff_outside(&f, 0.5, 6, p).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(witness_cone_nondiff_outside(&f, 0.1, 6, p).is_err());
        assert!(witness_cone_nondiff_outside(&f, 0.5, 11, p).is_err());
    }
}
