//! First-order behaviour of the projections: closed-form Fréchet
//! derivatives away from boundaries, one-sided directional derivatives on
//! them, finite difference oracles and non-differentiability witnesses.

use rand::Rng;
use serde::Serialize;

use crate::duality::dual_pairing;
use crate::lp_space::{Exponent, IndexSet, LpVector, StepFunction};
use crate::projections::{ProjectionTarget, BOUNDARY_TOL};
use crate::sample::{self, seeded_rng};
use crate::{Error, Result};

mod numeric;
mod witness;

pub use numeric::{
    ball_pair_sampler, frechet_residual, numerical_gateaux, strict_frechet_residual, GateauxEstimate,
    ResidualRow, ResidualTable, StepSchedule, DIVERGENCE_THRESHOLD,
};
pub use witness::{
    witness_cone_nondiff_in_cone, witness_cone_nondiff_outside, witness_cylinder_nondiff, witness_sphere_nondiff,
    ConeInsideReport, ConeOutsideReport, SphereReport,
};

/// A bounded linear map on `l_p`, as produced by [`frechet_ball`] and
/// [`frechet_cylinder`].
#[derive(Debug, Clone, PartialEq)]
pub enum LinearOperator {
    Identity,
    Zero,
    /// `x -> (r / ||b||) (x - <J(b), x> / ||b||^2 b)`.
    BallOutside { base: LpVector, radius: f64, p: Exponent },
    /// The ball formula on the `M` coordinates, identity on the rest.
    CylinderOutside {
        base: LpVector,
        radius: f64,
        mask: IndexSet,
        p: Exponent,
    },
}

fn scaled_tangent(base: &LpVector, x: &LpVector, radius: f64, p: Exponent) -> LpVector {
    let n = base.norm(p);
    let a = dual_pairing(base, x, p) / (n * n);
    (radius / n) * &(x - &(a * base))
}

impl LinearOperator {
    pub fn apply(&self, x: &LpVector) -> LpVector {
        match self {
            Self::Identity => x.clone(),
            Self::Zero => LpVector::zero(),
            Self::BallOutside { base, radius, p } => scaled_tangent(base, x, *radius, *p),
            Self::CylinderOutside {
                base,
                radius,
                mask,
                p,
            } => {
                let inner = scaled_tangent(&base.mask(mask), &x.mask(mask), *radius, *p);
                &inner + &x.mask(&mask.complement())
            }
        }
    }

    /// An upper bound on the operator norm: `1 + 2r / ||b||` for the ball
    /// and `1 + 2r / ||b_M||` for the cylinder.
    pub fn bound(&self) -> f64 {
        match self {
            Self::Identity => 1.0,
            Self::Zero => 0.0,
            Self::BallOutside { base, radius, p } => 1.0 + 2.0 * radius / base.norm(*p),
            Self::CylinderOutside {
                base,
                radius,
                mask,
                p,
            } => 1.0 + 2.0 * radius / base.mask(mask).norm(*p),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Zero => "zero",
            Self::BallOutside { .. } => "ball-outside",
            Self::CylinderOutside { .. } => "cylinder-outside",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrechetDerivative {
    Operator(LinearOperator),
    /// The base lies on the boundary, where no Fréchet derivative exists.
    NotDifferentiable,
}

impl FrechetDerivative {
    pub fn operator(&self) -> Option<&LinearOperator> {
        match self {
            Self::Operator(op) => Some(op),
            Self::NotDifferentiable => None,
        }
    }
}

fn near_radius(norm: f64, radius: f64) -> bool {
    (norm - radius).abs() <= BOUNDARY_TOL * radius
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRadius(radius))
    }
}

pub fn frechet_ball(base: &LpVector, r: f64, p: Exponent) -> Result<FrechetDerivative> {
    check_radius(r)?;
    let n = base.norm(p);
    Ok(if near_radius(n, r) {
        FrechetDerivative::NotDifferentiable
    } else if n < r {
        FrechetDerivative::Operator(LinearOperator::Identity)
    } else {
        FrechetDerivative::Operator(LinearOperator::BallOutside {
            base: base.clone(),
            radius: r,
            p,
        })
    })
}

pub fn frechet_cylinder(base: &LpVector, r: f64, mask: &IndexSet, p: Exponent) -> Result<FrechetDerivative> {
    check_radius(r)?;
    let n = base.mask(mask).norm(p);
    Ok(if near_radius(n, r) {
        FrechetDerivative::NotDifferentiable
    } else if n < r {
        FrechetDerivative::Operator(LinearOperator::Identity)
    } else {
        FrechetDerivative::Operator(LinearOperator::CylinderOutside {
            base: base.clone(),
            radius: r,
            mask: mask.clone(),
            p,
        })
    })
}

/// Whether `base + t w` leaves the target for small `t > 0` or stays in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionClass {
    Upward,
    Downward,
}

fn require_boundary(norm: f64, radius: f64) -> Result<()> {
    check_radius(radius)?;
    if near_radius(norm, radius) {
        Ok(())
    } else {
        Err(Error::OffBoundary { norm, radius })
    }
}

/// Upward iff `<J(b), w> >= 0`. For `<J(b), w> = 0` and `w != 0`, strict
/// convexity gives `||b + t w|| > ||b||` for every `t > 0`. Pairings within
/// roundoff of zero, relative to `||b|| ||w||`, count as tangent.
fn classify_on_sphere(base: &LpVector, w: &LpVector, p: Exponent) -> DirectionClass {
    if dual_pairing(base, w, p) < -BOUNDARY_TOL * base.norm(p) * w.norm(p) {
        DirectionClass::Downward
    } else {
        DirectionClass::Upward
    }
}

pub fn classify_direction(base: &LpVector, w: &LpVector, target: &ProjectionTarget) -> Result<DirectionClass> {
    if w.is_zero() {
        return Err(Error::ZeroDirection);
    }
    match target {
        ProjectionTarget::Ball { radius, p } => {
            require_boundary(base.norm(*p), *radius)?;
            Ok(classify_on_sphere(base, w, *p))
        }
        ProjectionTarget::Cylinder { radius, mask, p } => {
            let bm = base.mask(mask);
            require_boundary(bm.norm(*p), *radius)?;
            let wm = w.mask(mask);
            Ok(if wm.is_zero() {
                DirectionClass::Downward
            } else {
                classify_on_sphere(&bm, &wm, *p)
            })
        }
        _ => Err(Error::UnsupportedTarget(
            "direction classes are defined for balls and cylinders",
        )),
    }
}

/// One-sided directional derivative of the ball projection at a sphere
/// point.
pub fn gateaux_ball(base: &LpVector, w: &LpVector, r: f64, p: Exponent) -> Result<LpVector> {
    require_boundary(base.norm(p), r)?;
    if w.is_zero() {
        return Err(Error::ZeroDirection);
    }
    Ok(match classify_on_sphere(base, w, p) {
        DirectionClass::Upward => w - &((dual_pairing(base, w, p) / (r * r)) * base),
        DirectionClass::Downward => w.clone(),
    })
}

/// One-sided directional derivative of the cylinder projection at a point
/// with `||base_M|| = r`.
pub fn gateaux_cylinder(base: &LpVector, u: &LpVector, r: f64, mask: &IndexSet, p: Exponent) -> Result<LpVector> {
    let bm = base.mask(mask);
    require_boundary(bm.norm(p), r)?;
    if u.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let um = u.mask(mask);
    if um.is_zero() {
        return Ok(u.clone());
    }
    Ok(match classify_on_sphere(&bm, &um, p) {
        DirectionClass::Upward => u - &((dual_pairing(&bm, &um, p) / (r * r)) * &bm),
        DirectionClass::Downward => u.clone(),
    })
}

/// Directional derivative of the positive part: `g` where `f > 0`, `0`
/// where `f < 0` and `max(g, 0)` where `f = 0`.
pub fn gateaux_cone(f: &StepFunction, g: &StepFunction) -> Result<StepFunction> {
    if !f.same_space(g) {
        return Err(Error::SpaceMismatch);
    }
    Ok(f.zip_with(g, |fv, gv| {
        if fv > 0.0 {
            gv
        } else if fv < 0.0 {
            0.0
        } else {
            gv.max(0.0)
        }
    }))
}

/// Worst relative defects seen by [`probe_operator`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorProbe {
    pub probes: usize,
    /// `max ||A(ax + by) - aA(x) - bA(y)|| / (1 + |a| ||x|| + |b| ||y||)`.
    pub linearity_defect: f64,
    /// `max ||A(x)|| / ||x||`.
    pub observed_norm: f64,
    pub bound: f64,
}

impl OperatorProbe {
    pub fn passes(&self, tol: f64) -> bool {
        self.linearity_defect <= tol && self.observed_norm <= self.bound * (1.0 + tol)
    }
}

/// Random linearity and boundedness checks in the first `dim` coordinates.
pub fn probe_operator(op: &LinearOperator, dim: usize, p: Exponent, probes: usize, seed: u64) -> OperatorProbe {
    let mut rng = seeded_rng(seed);
    let mut linearity_defect = 0.0_f64;
    let mut observed_norm = 0.0_f64;
    for _ in 0..probes {
        let x = sample::gaussian_vector(&mut rng, dim);
        let y = sample::gaussian_vector(&mut rng, dim);
        let a: f64 = rng.random_range(-3.0..3.0);
        let b: f64 = rng.random_range(-3.0..3.0);
        let combo = op.apply(&(&(a * &x) + &(b * &y)));
        let split = &(a * &op.apply(&x)) + &(b * &op.apply(&y));
        let scale = 1.0 + a.abs() * x.norm(p) + b.abs() * y.norm(p);
        linearity_defect = linearity_defect.max((&combo - &split).norm(p) / scale);
        let nx = x.norm(p);
        if nx > 0.0 {
            observed_norm = observed_norm.max(op.apply(&x).norm(p) / nx);
        }
    }
    OperatorProbe {
        probes,
        linearity_defect,
        observed_norm,
        bound: op.bound(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{project_ball, project_cone, project_cylinder};
    use crate::lp_space::MeasureSpace;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn exp(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    fn v(values: &[f64]) -> LpVector {
        LpVector::from_dense(values)
    }

    fn forward(f: impl Fn(&LpVector) -> LpVector, x: &LpVector, w: &LpVector, h: f64) -> LpVector {
        (1.0 / h) * &(&f(&(x + &(h * w))) - &f(x))
    }

    #[test]
    fn ball_derivative_regions() {
        let p = exp(3.0);
        assert_eq!(
            frechet_ball(&v(&[0.1, 0.2]), 1.0, p).unwrap(),
            FrechetDerivative::Operator(LinearOperator::Identity)
        );
        assert_eq!(frechet_ball(&v(&[1.0]), 1.0, p).unwrap(), FrechetDerivative::NotDifferentiable);
        assert_eq!(frechet_ball(&v(&[1.0]), 0.0, p), Err(Error::InvalidRadius(0.0)));

        let base = v(&[2.0, 0.0, 0.0]);
        let d = frechet_ball(&base, 1.0, p).unwrap();
        let op = d.operator().unwrap();
        assert!((&op.apply(&v(&[0.0, 1.0, 0.0])) - &v(&[0.0, 0.5, 0.0])).max_abs() < 1e-15);
        assert!(op.apply(&base).max_abs() < 1e-15);
        let fd = forward(|x| project_ball(x, 1.0, p), &base, &v(&[0.0, 1.0, 0.0]), 1e-6);
        assert!((&fd - &v(&[0.0, 0.5, 0.0])).max_abs() < 1e-4);
    }

    #[test]
    fn cylinder_derivative_regions() {
        let p = exp(3.0);
        let m = IndexSet::finite([1, 2]).unwrap();
        let base = v(&[2.0, -1.0, 4.0]);
        let op = frechet_cylinder(&base, 1.0, &m, p).unwrap();
        let op = op.operator().unwrap();
        assert!((&op.apply(&base) - &v(&[0.0, 0.0, 4.0])).max_abs() < 1e-14);
        let u = v(&[0.3, 0.7, -1.0]);
        let fd = forward(|x| project_cylinder(x, 1.0, &m, p), &base, &u, 1e-6);
        assert!((&fd - &op.apply(&u)).max_abs() < 1e-4);
        assert_eq!(
            frechet_cylinder(&v(&[0.1, 0.0, 40.0]), 1.0, &m, p).unwrap(),
            FrechetDerivative::Operator(LinearOperator::Identity)
        );
        assert_eq!(
            frechet_cylinder(&v(&[1.0, 0.0, 40.0]), 1.0, &m, p).unwrap(),
            FrechetDerivative::NotDifferentiable
        );
    }

    #[test]
    fn full_cylinder_operator_is_ball_operator() {
        let p = exp(1.5);
        let base = v(&[1.0, -2.0, 0.5]);
        let ball = frechet_ball(&base, 0.8, p).unwrap();
        let cyl = frechet_cylinder(&base, 0.8, &IndexSet::all(), p).unwrap();
        let mut rng = seeded_rng(4);
        for _ in 0..50 {
            let x = sample::gaussian_vector(&mut rng, 4);
            let a = ball.operator().unwrap().apply(&x);
            let b = cyl.operator().unwrap().apply(&x);
            assert!((&a - &b).max_abs() < 1e-14);
        }
    }

    #[test]
    fn hilbert_ball_operator() {
        // with J the identity the operator is (r/||b||) times the orthogonal
        // projection onto the complement of b
        let p = exp(2.0);
        let base = v(&[3.0, 4.0]);
        let op = frechet_ball(&base, 1.0, p).unwrap();
        let x = v(&[1.0, 2.0]);
        let coef = base.dot(&x) / 25.0;
        let want = 0.2 * &(&x - &(coef * &base));
        assert!((&op.operator().unwrap().apply(&x) - &want).max_abs() < 1e-15);
    }

    #[test]
    fn direction_classes() {
        let p = exp(3.0);
        let ball = ProjectionTarget::ball(1.0, p).unwrap();
        let base = crate::sample::on_sphere(&mut seeded_rng(5), 3, 1.0, p);
        assert_eq!(classify_direction(&base, &base, &ball).unwrap(), DirectionClass::Upward);
        assert_eq!(classify_direction(&base, &(-&base), &ball).unwrap(), DirectionClass::Downward);
        assert_eq!(classify_direction(&base, &LpVector::zero(), &ball), Err(Error::ZeroDirection));
        assert!(matches!(
            classify_direction(&(2.0 * &base), &base, &ball),
            Err(Error::OffBoundary { .. })
        ));

        // tangent directions leave the ball
        let mut rng = seeded_rng(6);
        for _ in 0..20 {
            let base = crate::sample::on_sphere(&mut rng, 3, 1.0, p);
            let raw = sample::gaussian_vector(&mut rng, 3);
            let t = crate::decomp::semi_orthogonal(&base, &raw, p).unwrap().o;
            assert_eq!(classify_direction(&base, &t, &ball).unwrap(), DirectionClass::Upward);
            for step in [1e-3, 1e-4] {
                assert!((&base + &(step * &t)).norm(p) - 1.0 > 0.0);
            }
        }

        let m = IndexSet::finite([1]).unwrap();
        let cyl = ProjectionTarget::cylinder(1.0, m, p).unwrap();
        let b = v(&[1.0, 5.0]);
        assert_eq!(classify_direction(&b, &v(&[0.0, 1.0]), &cyl).unwrap(), DirectionClass::Downward);
        assert_eq!(classify_direction(&b, &v(&[1.0, 0.0]), &cyl).unwrap(), DirectionClass::Upward);
        assert_eq!(classify_direction(&b, &v(&[-1.0, 0.0]), &cyl).unwrap(), DirectionClass::Downward);
    }

    #[test]
    fn sphere_directional_derivatives() {
        let p = exp(3.0);
        let base = crate::sample::on_sphere(&mut seeded_rng(7), 4, 1.5, p);
        assert!(gateaux_ball(&base, &base, 1.5, p).unwrap().max_abs() < 1e-14);
        assert_eq!(gateaux_ball(&base, &(-&base), 1.5, p).unwrap(), -&base);
        assert!(matches!(
            gateaux_ball(&(2.0 * &base), &base, 1.5, p),
            Err(Error::OffBoundary { .. })
        ));
        assert_eq!(gateaux_ball(&base, &LpVector::zero(), 1.5, p), Err(Error::ZeroDirection));

        let mut rng = seeded_rng(8);
        for _ in 0..20 {
            let w = sample::gaussian_vector(&mut rng, 4);
            let fd = forward(|x| project_ball(x, 1.5, p), &base, &w, 1e-6);
            let got = gateaux_ball(&base, &w, 1.5, p).unwrap();
            assert!((&fd - &got).norm(p) < 1e-4 * (1.0 + w.norm(p)));
            // no linear extension: D(w) and D(-w) are not negatives
        }
        let up = gateaux_ball(&base, &base, 1.5, p).unwrap();
        let down = gateaux_ball(&base, &(-&base), 1.5, p).unwrap();
        assert!((&down + &up).norm(p) > 1.0);
    }

    #[test]
    fn cylinder_directional_derivatives() {
        let p = exp(3.0);
        let m = IndexSet::finite([1, 2]).unwrap();
        let base = &crate::sample::on_sphere(&mut seeded_rng(9), 2, 1.0, p) + &v(&[0.0, 0.0, 3.0]);
        let got = gateaux_cylinder(&base, &base, 1.0, &m, p).unwrap();
        assert!((&got - &base.mask(&m.complement())).max_abs() < 1e-14);
        let off = v(&[0.0, 0.0, 2.0, -1.0]);
        assert_eq!(gateaux_cylinder(&base, &off, 1.0, &m, p).unwrap(), off);
        let mut rng = seeded_rng(10);
        for _ in 0..20 {
            let u = sample::gaussian_vector(&mut rng, 4);
            let fd = forward(|x| project_cylinder(x, 1.0, &m, p), &base, &u, 1e-6);
            let got = gateaux_cylinder(&base, &u, 1.0, &m, p).unwrap();
            assert!((&fd - &got).norm(p) < 1e-4 * (1.0 + u.norm(p)));
        }
    }

    #[test]
    fn cone_directional_derivatives() {
        let space = Arc::new(MeasureSpace::geometric(6));
        let f = StepFunction::new(space.clone(), vec![1.0, -2.0, 0.0, 0.5, -0.1, 0.0]).unwrap();
        assert_eq!(gateaux_cone(&f, &f).unwrap(), project_cone(&f));
        let g = StepFunction::new(space.clone(), vec![0.3, 4.0, -1.0, -2.0, 1.0, 2.0]).unwrap();
        let d = gateaux_cone(&f, &g).unwrap();
        assert_eq!(d.values(), &[0.3, 0.0, 0.0, -2.0, 0.0, 2.0]);
        let h = 1e-6;
        let fd = project_cone(&f.zip_with(&g, |a, b| a + h * b)).zip_with(&project_cone(&f), |a, b| (a - b) / h);
        for (a, b) in fd.values().iter().zip(d.values()) {
            assert!((a - b).abs() < 1e-4);
        }
        let positive = StepFunction::constant(space.clone(), 2.0);
        assert_eq!(gateaux_cone(&positive, &g).unwrap(), g);
        let neg = StepFunction::constant(space.clone(), -1.0);
        assert!(gateaux_cone(&neg, &neg).unwrap().is_zero());
        let other = StepFunction::zero(Arc::new(MeasureSpace::geometric(3)));
        assert_eq!(gateaux_cone(&f, &other), Err(Error::SpaceMismatch));
    }

    #[test]
    fn operator_probes() {
        let p = exp(3.0);
        let base = v(&[2.0, -1.0, 0.5, 3.0]);
        let m = IndexSet::finite([1, 4]).unwrap();
        let ops = [
            LinearOperator::Identity,
            LinearOperator::Zero,
            frechet_ball(&base, 1.0, p).unwrap().operator().unwrap().clone(),
            frechet_cylinder(&base, 1.0, &m, p).unwrap().operator().unwrap().clone(),
        ];
        for op in &ops {
            let probe = probe_operator(op, 5, p, 1000, 11);
            assert!(probe.passes(1e-10), "{} {probe:?}", op.name());
        }
    }

    fn exponent() -> impl Strategy<Value = Exponent> {
        prop_oneof![Just(1.5), Just(2.0), Just(3.0), Just(4.0)].prop_map(exp)
    }

    proptest! {
        #[test]
        fn positively_homogeneous_in_direction(seed in 0u64..1000, lambda in 0.01..10.0f64, p in exponent()) {
            let mut rng = seeded_rng(seed);
            let base = crate::sample::on_sphere(&mut rng, 4, 1.3, p);
            let w = sample::gaussian_vector(&mut rng, 4);
            let a = gateaux_ball(&base, &(lambda * &w), 1.3, p).unwrap();
            let b = lambda * &gateaux_ball(&base, &w, 1.3, p).unwrap();
            prop_assert!((&a - &b).max_abs() <= 1e-12 * (1.0 + b.max_abs()));

            let m = IndexSet::finite([2, 3]).unwrap();
            let cbase = &base.mask(&m) + &v(&[5.0]);
            let cbase = {
                let bm = cbase.mask(&m);
                &((1.3 / bm.norm(p)) * &bm) + &cbase.mask(&m.complement())
            };
            let a = gateaux_cylinder(&cbase, &(lambda * &w), 1.3, &m, p).unwrap();
            let b = lambda * &gateaux_cylinder(&cbase, &w, 1.3, &m, p).unwrap();
            prop_assert!((&a - &b).max_abs() <= 1e-12 * (1.0 + b.max_abs()));

            let space = Arc::new(MeasureSpace::geometric(6));
            let f = crate::sample::gaussian_function(&mut rng, &space).map(|x| if x.abs() < 0.3 { 0.0 } else { x });
            let g = crate::sample::gaussian_function(&mut rng, &space);
            let a = gateaux_cone(&f, &g.map(|x| lambda * x)).unwrap();
            let b = gateaux_cone(&f, &g).unwrap().map(|x| lambda * x);
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }
    }
}
