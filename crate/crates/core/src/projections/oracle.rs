//! Direct numerical minimization of `||x - z||` over each target.
//!
//! Nothing here touches the duality map or the closed forms: balls and
//! cylinders are searched over the radial parametrization
//! `z = r s / ||s||`, lines over the scalar coefficient, and the cone atom
//! by atom.

use crate::lp_space::{Exponent, LpVector, StepFunction};
use crate::{Error, Result};

use super::{Point, ProjectionTarget};

pub const ORACLE_DIMENSION_CAP: usize = 6;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizer of a unimodal `f` on `[a, b]`.
fn golden_section(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, iterations: usize) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iterations {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn dense_norm_pow(values: &[f64], p: Exponent) -> f64 {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = values.iter().map(|v| (v.abs() / scale).powf(p.p())).sum();
    scale.powf(p.p()) * sum
}

fn dense_norm(values: &[f64], p: Exponent) -> f64 {
    dense_norm_pow(values, p).powf(1.0 / p.p())
}

/// Cyclic coordinate search with golden-section line minimization, a
/// shrinking step and an extrapolation move along each sweep's
/// displacement. `renormalize` runs after every sweep.
fn coordinate_search(
    params: &mut [f64],
    initial_steps: &[f64],
    objective: &dyn Fn(&[f64]) -> f64,
    renormalize: &dyn Fn(&mut [f64]),
) {
    let mut steps = initial_steps.to_vec();
    let mut value = objective(params);
    let mut trial = params.to_vec();
    for _ in 0..4000 {
        let start = params.to_vec();
        let before = value;
        for i in 0..params.len() {
            trial.copy_from_slice(params);
            let (t, v) = golden_section(
                |t| {
                    trial[i] = t;
                    objective(&trial)
                },
                params[i] - steps[i],
                params[i] + steps[i],
                60,
            );
            if v < value {
                params[i] = t;
                value = v;
            }
        }
        let displacement: Vec<f64> = params.iter().zip(&start).map(|(a, b)| a - b).collect();
        if displacement.iter().any(|&d| d != 0.0) {
            let base = params.to_vec();
            let (alpha, v) = golden_section(
                |alpha| {
                    for ((t, b), d) in trial.iter_mut().zip(&base).zip(&displacement) {
                        *t = b + alpha * d;
                    }
                    objective(&trial)
                },
                0.0,
                8.0,
                60,
            );
            if v < value {
                for ((t, b), d) in params.iter_mut().zip(&base).zip(&displacement) {
                    *t = b + alpha * d;
                }
            }
        }
        renormalize(params);
        value = objective(params);
        if before - value <= 1e-15 * before.abs().max(1e-300) {
            for s in &mut steps {
                *s *= 0.5;
            }
            if steps.iter().all(|&s| s < 1e-11) {
                break;
            }
        }
    }
}

fn radial_point(s: &[f64], r: f64, p: Exponent) -> Vec<f64> {
    let n = dense_norm(s, p);
    s.iter().map(|v| r * v / n).collect()
}

/// `coords` are the 0-based positions in `xs` constrained by the radius;
/// the remaining positions are free.
fn radial_search(xs: &[f64], coords: &[usize], r: f64, p: Exponent) -> Vec<f64> {
    let free: Vec<usize> = (0..xs.len()).filter(|i| !coords.contains(i)).collect();
    let k = coords.len();
    let spread = xs.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    // sign pattern of x, not x itself, so the search does not start on the
    // answer's ray
    let mut params: Vec<f64> = coords
        .iter()
        .map(|&i| if xs[i] > 0.0 { 1.0 } else if xs[i] < 0.0 { -1.0 } else { 0.0 })
        .chain(free.iter().map(|_| 0.0))
        .collect();
    let steps: Vec<f64> = (0..k).map(|_| 1.0).chain(free.iter().map(|_| 2.0 * spread)).collect();
    let assemble = |params: &[f64]| -> Vec<f64> {
        let mut z = vec![0.0; xs.len()];
        let ring = radial_point(&params[..k], r, p);
        for (&i, v) in coords.iter().zip(ring) {
            z[i] = v;
        }
        for (&i, v) in free.iter().zip(&params[k..]) {
            z[i] = *v;
        }
        z
    };
    let objective = |params: &[f64]| -> f64 {
        if params[..k].iter().all(|&v| v == 0.0) {
            return f64::INFINITY;
        }
        let z = assemble(params);
        let diff: Vec<f64> = xs.iter().zip(&z).map(|(a, b)| a - b).collect();
        dense_norm_pow(&diff, p)
    };
    let renormalize = |params: &mut [f64]| {
        let m = params[..k].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if m > 0.0 {
            for v in &mut params[..k] {
                *v /= m;
            }
        }
    };
    coordinate_search(&mut params, &steps, &objective, &renormalize);
    assemble(&params)
}

fn line_search(x: &LpVector, base: &LpVector, dim: usize, p: Exponent) -> f64 {
    let xs = x.to_dense(dim);
    let bs = base.to_dense(dim);
    let objective = |t: f64| {
        let diff: Vec<f64> = xs.iter().zip(&bs).map(|(a, b)| a - t * b).collect();
        dense_norm_pow(&diff, p)
    };
    let span = 2.0 * dense_norm(&xs, p) / dense_norm(&bs, p) + 1.0;
    let (t, _) = golden_section(objective, -span, span, 120);
    // sharpen with bisection on the sign of a central difference, which
    // has no bias for p = 2 and a bias of order delta^2 otherwise
    let delta = 1e-5 * span;
    let slope = |t: f64| objective(t + delta) - objective(t - delta);
    let width = 1e-4 * span;
    let (mut lo, mut hi) = (t - width, t + width);
    if !(slope(lo) < 0.0 && slope(hi) > 0.0) {
        return t;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn cone_search(f: &StepFunction, p: Exponent) -> StepFunction {
    let weights: Vec<f64> = f.space().weights().collect();
    let mut k = 0;
    f.map(|v| {
        let w = weights[k];
        k += 1;
        let cost = |c: f64| (v - c).abs().powf(p.p()) * w;
        [0.0, v]
            .into_iter()
            .filter(|&c| c >= 0.0)
            .min_by(|a, b| cost(*a).total_cmp(&cost(*b)))
            .unwrap_or(0.0)
    })
}

fn check_dimension(dim: usize) -> Result<()> {
    if dim > ORACLE_DIMENSION_CAP {
        Err(Error::DimensionCap {
            dim,
            cap: ORACLE_DIMENSION_CAP,
        })
    } else {
        Ok(())
    }
}

/// Nearest point of `target` to `x` by direct search, for sequences with
/// support in the first [`ORACLE_DIMENSION_CAP`] coordinates and cones
/// over any finite space.
pub fn brute_force_project(x: &Point, target: &ProjectionTarget) -> Result<Point> {
    match (target, x) {
        (ProjectionTarget::Ball { radius, p }, Point::Sequence(x)) => {
            let dim = x.dimension();
            check_dimension(dim)?;
            if x.norm(*p) <= *radius {
                return Ok(x.clone().into());
            }
            let xs = x.to_dense(dim);
            let coords: Vec<usize> = (0..dim).collect();
            Ok(LpVector::from_dense(&radial_search(&xs, &coords, *radius, *p)).into())
        }
        (ProjectionTarget::Cylinder { radius, mask, p }, Point::Sequence(x)) => {
            let dim = x.dimension();
            check_dimension(dim)?;
            if x.mask(mask).norm(*p) <= *radius {
                return Ok(x.clone().into());
            }
            let xs = x.to_dense(dim);
            let coords: Vec<usize> = (0..dim).filter(|&i| mask.contains(i + 1)).collect();
            Ok(LpVector::from_dense(&radial_search(&xs, &coords, *radius, *p)).into())
        }
        (ProjectionTarget::Line { base, p }, Point::Sequence(x)) => {
            let dim = x.dimension().max(base.dimension());
            check_dimension(dim)?;
            Ok((line_search(x, base, dim, *p) * base).into())
        }
        (ProjectionTarget::PositiveCone { space, p }, Point::Function(f)) => {
            if **space != **f.space() {
                return Err(Error::SpaceMismatch);
            }
            Ok(cone_search(f, *p).into())
        }
        _ => Err(Error::UnsupportedTarget("input kind does not match the target")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_space::{IndexSet, MeasureSpace};
    use crate::projections::{project_ball, project_cone, project_cylinder};
    use std::sync::Arc;

    fn exp(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn golden_section_parabola() {
        let (x, fx) = golden_section(|t| (t - 0.3).powi(2), -2.0, 2.0, 100);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx < 1e-16);
    }

    #[test]
    fn ball_matches_closed_form() {
        let p = exp(3.0);
        let x = LpVector::from_dense(&[2.0, -1.0, 0.5, 0.0]);
        let target = ProjectionTarget::ball(1.0, p).unwrap();
        let got = brute_force_project(&x.clone().into(), &target).unwrap();
        let got = got.as_sequence().unwrap();
        assert!((got - &project_ball(&x, 1.0, p)).max_abs() < 1e-6, "{got:?}");
    }

    #[test]
    fn cylinder_matches_closed_form() {
        let p = exp(1.5);
        let m = IndexSet::finite([2, 3]).unwrap();
        let x = LpVector::from_dense(&[2.0, -1.0, 0.5, 4.0]);
        let target = ProjectionTarget::cylinder(0.5, m.clone(), p).unwrap();
        let got = brute_force_project(&x.clone().into(), &target).unwrap();
        let got = got.as_sequence().unwrap();
        assert!((got - &project_cylinder(&x, 0.5, &m, p)).max_abs() < 1e-6, "{got:?}");
    }

    #[test]
    fn line_hilbert_formula() {
        let p = exp(2.0);
        let base = LpVector::from_dense(&[1.0, 2.0, 1.0]);
        let x = LpVector::from_dense(&[3.0, -2.0, 1.0]);
        let target = ProjectionTarget::line(base.clone(), p).unwrap();
        let got = brute_force_project(&x.clone().into(), &target).unwrap();
        let want = (base.dot(&x) / 6.0) * &base;
        assert!((got.as_sequence().unwrap() - &want).max_abs() < 1e-8);
    }

    #[test]
    fn cone_is_exact_clamp() {
        let space = Arc::new(MeasureSpace::geometric(5));
        let f = StepFunction::new(space.clone(), vec![1.0, -2.0, 0.0, 0.25, -1e-300]).unwrap();
        let target = ProjectionTarget::cone(space, exp(3.0));
        let got = brute_force_project(&f.clone().into(), &target).unwrap();
        assert_eq!(got.as_function().unwrap(), &project_cone(&f));
    }

    #[test]
    fn dimension_cap() {
        let x = LpVector::basis(7);
        let target = ProjectionTarget::ball(0.5, exp(3.0)).unwrap();
        assert_eq!(
            brute_force_project(&x.into(), &target),
            Err(Error::DimensionCap { dim: 7, cap: 6 })
        );
    }
}
