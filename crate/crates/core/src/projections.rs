//! Metric projections onto balls, cylinders, the positive cone and lines.

use std::sync::Arc;

use rand::Rng;

use crate::duality::{dual_pairing, duality_map_function, pairing_function};
use crate::lp_space::{Exponent, IndexSet, LpVector, MeasureSpace, StepFunction};
use crate::root::{bracketed_root, RootOptions};
use crate::sample::{self, seeded_rng};
use crate::{Error, Result};

mod oracle;
mod witness;

pub use oracle::{brute_force_project, ORACLE_DIMENSION_CAP};
pub use witness::{
    witness_cone_empty_interior, witness_line_nonlinearity, witness_line_split, witness_null_cone,
    EmptyInteriorWitness, LineNonlinearityReport, LineSplitReport, NullConeReport,
};

/// Membership slack used by [`ProjectionTarget::contains`].
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Relative tolerance on `| ||x|| - r |` for boundary detection.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// An element of either kind of space the targets live in.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Sequence(LpVector),
    Function(StepFunction),
}

impl Point {
    pub fn as_sequence(&self) -> Option<&LpVector> {
        match self {
            Point::Sequence(x) => Some(x),
            Point::Function(_) => None,
        }
    }

    pub fn as_function(&self) -> Option<&StepFunction> {
        match self {
            Point::Function(f) => Some(f),
            Point::Sequence(_) => None,
        }
    }

    pub fn norm(&self, p: Exponent) -> f64 {
        match self {
            Point::Sequence(x) => x.norm(p),
            Point::Function(f) => f.lp_norm(p),
        }
    }
}

impl From<LpVector> for Point {
    fn from(x: LpVector) -> Self {
        Point::Sequence(x)
    }
}

impl From<StepFunction> for Point {
    fn from(f: StepFunction) -> Self {
        Point::Function(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionTarget {
    Ball { radius: f64, p: Exponent },
    Cylinder { radius: f64, mask: IndexSet, p: Exponent },
    PositiveCone { space: Arc<MeasureSpace>, p: Exponent },
    Line { base: LpVector, p: Exponent },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub point: Point,
    /// Coefficient of the projection along the base, for lines.
    pub t_star: Option<f64>,
    /// Whether the input lay on the boundary of the target.
    pub boundary: bool,
}

fn check_radius(radius: f64) -> Result<f64> {
    if radius.is_finite() && radius > 0.0 {
        Ok(radius)
    } else {
        Err(Error::InvalidRadius(radius))
    }
}

fn on_sphere(norm: f64, radius: f64) -> bool {
    (norm - radius).abs() <= BOUNDARY_TOL * radius
}

impl ProjectionTarget {
    pub fn ball(radius: f64, p: Exponent) -> Result<Self> {
        Ok(Self::Ball {
            radius: check_radius(radius)?,
            p,
        })
    }

    pub fn cylinder(radius: f64, mask: IndexSet, p: Exponent) -> Result<Self> {
        Ok(Self::Cylinder {
            radius: check_radius(radius)?,
            mask,
            p,
        })
    }

    pub fn cone(space: Arc<MeasureSpace>, p: Exponent) -> Self {
        Self::PositiveCone { space, p }
    }

    pub fn line(base: LpVector, p: Exponent) -> Result<Self> {
        if base.is_zero() {
            return Err(Error::ZeroBase);
        }
        Ok(Self::Line { base, p })
    }

    pub fn p(&self) -> Exponent {
        match self {
            Self::Ball { p, .. }
            | Self::Cylinder { p, .. }
            | Self::PositiveCone { p, .. }
            | Self::Line { p, .. } => *p,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ball { .. } => "ball",
            Self::Cylinder { .. } => "cylinder",
            Self::PositiveCone { .. } => "cone",
            Self::Line { .. } => "line",
        }
    }

    fn sequence<'a>(&self, x: &'a Point) -> Result<&'a LpVector> {
        x.as_sequence().ok_or(Error::UnsupportedTarget(
            "sequence targets need a sequence input",
        ))
    }

    fn function<'a>(&self, x: &'a Point) -> Result<&'a StepFunction> {
        let f = x
            .as_function()
            .ok_or(Error::UnsupportedTarget("the cone needs a step function input"))?;
        match self {
            Self::PositiveCone { space, .. } if **space != **f.space() => Err(Error::SpaceMismatch),
            _ => Ok(f),
        }
    }

    pub fn project(&self, x: &Point) -> Result<ProjectionResult> {
        let boundary = self.on_boundary(x)?;
        let (point, t_star) = match self {
            Self::Ball { radius, p } => (project_ball(self.sequence(x)?, *radius, *p).into(), None),
            Self::Cylinder { radius, mask, p } => (
                project_cylinder(self.sequence(x)?, *radius, mask, *p).into(),
                None,
            ),
            Self::PositiveCone { .. } => (project_cone(self.function(x)?).into(), None),
            Self::Line { base, p } => {
                let line = project_line(self.sequence(x)?, base, *p, RootOptions::default())?;
                (line.point.into(), Some(line.t_star))
            }
        };
        Ok(ProjectionResult {
            point,
            t_star,
            boundary,
        })
    }

    /// Membership up to `tol`, relative to the scale of the target.
    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        Ok(match self {
            Self::Ball { radius, p } => self.sequence(x)?.norm(*p) <= radius * (1.0 + tol),
            Self::Cylinder { radius, mask, p } => {
                self.sequence(x)?.mask(mask).norm(*p) <= radius * (1.0 + tol)
            }
            Self::PositiveCone { p, .. } => {
                let f = self.function(x)?;
                let floor = -tol * f.lp_norm(*p).max(1.0);
                f.values().iter().all(|&v| v >= floor)
            }
            Self::Line { base, p } => {
                let x = self.sequence(x)?;
                // coefficient read off the largest entry of the base
                let (k, bk) = base
                    .iter()
                    .fold((0, 0.0_f64), |m, (i, v)| if v.abs() > m.1.abs() { (i, v) } else { m });
                let t = x.get(k) / bk;
                (x - &(t * base)).norm(*p) <= tol * x.norm(*p).max(1.0)
            }
        })
    }

    /// Whether `x` lies on the topological boundary. The cone has empty
    /// interior and so does a line in dimension two or more, so for those
    /// targets the boundary is the target itself.
    pub fn on_boundary(&self, x: &Point) -> Result<bool> {
        Ok(match self {
            Self::Ball { radius, p } => on_sphere(self.sequence(x)?.norm(*p), *radius),
            Self::Cylinder { radius, mask, p } => {
                on_sphere(self.sequence(x)?.mask(mask).norm(*p), *radius)
            }
            Self::PositiveCone { .. } => self.function(x)?.is_nonnegative(),
            Self::Line { .. } => self.contains(x, MEMBERSHIP_TOL)?,
        })
    }
}

/// `x` inside the ball, `(r / ||x||) x` outside. Assumes `r > 0`.
pub fn project_ball(x: &LpVector, r: f64, p: Exponent) -> LpVector {
    let n = x.norm(p);
    if n <= r {
        x.clone()
    } else {
        (r / n) * x
    }
}

/// Scales the `M`-part of `x` back to radius `r` and leaves the other
/// coordinates alone. Assumes `r > 0`.
pub fn project_cylinder(x: &LpVector, r: f64, mask: &IndexSet, p: Exponent) -> LpVector {
    let inside = x.mask(mask);
    let n = inside.norm(p);
    if n <= r {
        x.clone()
    } else {
        &((r / n) * &inside) + &x.mask(&mask.complement())
    }
}

/// Pointwise positive part.
pub fn project_cone(f: &StepFunction) -> StepFunction {
    f.map(|v| v.max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineProjection {
    pub t_star: f64,
    pub point: LpVector,
    pub iterations: usize,
    /// `|<J(x - t* base), base>|` at the returned coefficient.
    pub residual: f64,
}

/// Nearest point to `x` on `span(base)`, found as the root of the strictly
/// decreasing `phi(t) = <J(x - t base), base>`.
pub fn project_line(x: &LpVector, base: &LpVector, p: Exponent, opts: RootOptions) -> Result<LineProjection> {
    let nb = base.norm(p);
    if nb == 0.0 {
        return Err(Error::ZeroBase);
    }
    let bound = 2.0 * x.norm(p) / nb + 1.0;
    let root = bracketed_root(
        |t| dual_pairing(&(x - &(t * base)), base, p),
        -bound,
        bound,
        opts,
    )?;
    Ok(LineProjection {
        t_star: root.x,
        point: root.x * base,
        iterations: root.iterations,
        residual: root.residual,
    })
}

fn sample_target_point<R: Rng>(
    rng: &mut R,
    target: &ProjectionTarget,
    dim: usize,
    x: &Point,
) -> Point {
    match target {
        ProjectionTarget::Ball { radius, p } => sample::in_ball(rng, dim, *radius, *p).into(),
        ProjectionTarget::Cylinder { radius, mask, p } => {
            let coords: Vec<usize> = (1..=dim).filter(|&i| mask.contains(i)).collect();
            let inner = sample::in_ball(rng, coords.len().max(1), *radius, *p);
            let spread = 1.0 + x.norm(*p);
            let outer = sample::gaussian_vector(rng, dim);
            let entries = (1..=dim).map(|i| {
                let v = match coords.iter().position(|&c| c == i) {
                    Some(k) => inner.get(k + 1),
                    None => spread * outer.get(i),
                };
                (i, v)
            });
            LpVector::from_entries(entries)
                .expect("sampled entries are finite")
                .into()
        }
        ProjectionTarget::PositiveCone { space, .. } => {
            sample::nonnegative_function(rng, space).into()
        }
        ProjectionTarget::Line { base, p } => {
            let xn = x.norm(*p);
            let t_max = if xn > 0.0 { 4.0 * xn / base.norm(*p) } else { 1.0 };
            (rng.random_range(-t_max..=t_max) * base).into()
        }
    }
}

/// `min_z <J(x - u), u - z>` over `samples` random points `z` of the
/// target. Nonnegative for all `z` exactly when `u` is the projection of
/// `x`, so a clearly negative value refutes `u`.
pub fn variational_margin(
    x: &Point,
    u: &Point,
    target: &ProjectionTarget,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if !target.contains(u, MEMBERSHIP_TOL)? {
        return Err(Error::NotInTarget);
    }
    let p = target.p();
    let mut rng = seeded_rng(seed);
    match (x, u) {
        (Point::Sequence(x), Point::Sequence(u)) => {
            let residual = x - u;
            let dim = x.dimension().max(u.dimension()).max(1);
            let point = Point::Sequence(x.clone());
            let mut margin = f64::INFINITY;
            for _ in 0..samples {
                let z = sample_target_point(&mut rng, target, dim, &point);
                let z = z.as_sequence().expect("sequence target");
                margin = margin.min(dual_pairing(&residual, &(u - z), p));
            }
            Ok(margin)
        }
        (Point::Function(f), Point::Function(u)) => {
            if !f.same_space(u) {
                return Err(Error::SpaceMismatch);
            }
            let j = duality_map_function(&f.zip_with(u, |a, b| a - b), p);
            let point = Point::Function(f.clone());
            let mut margin = f64::INFINITY;
            for _ in 0..samples {
                let z = sample_target_point(&mut rng, target, 0, &point);
                let z = z.as_function().expect("function target");
                margin = margin.min(pairing_function(&j, &u.zip_with(z, |a, b| a - b)));
            }
            Ok(margin)
        }
        _ => Err(Error::UnsupportedTarget("input and candidate are different kinds of point")),
    }
}
