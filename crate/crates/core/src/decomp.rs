//! Semi-orthogonal splitting `x = a(base; x) base + o(base; x)` with
//! `<J(base), o> = 0`.

use crate::duality::{dual_pairing, duality_map, pairing};
use crate::lp_space::{Exponent, LpVector};
use crate::{Error, Result};

/// Relative tolerance used when a caller does not supply one.
pub const DEFAULT_TANGENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Coefficient along the base, `<J(base), x> / ||base||^2`.
    pub a: f64,
    /// Component in the tangent hyperplane `O(base)`.
    pub o: LpVector,
}

impl Decomposition {
    pub fn radial(&self, base: &LpVector) -> LpVector {
        self.a * base
    }

    pub fn reconstruct(&self, base: &LpVector) -> LpVector {
        &self.radial(base) + &self.o
    }
}

fn nonzero_norm(base: &LpVector, p: Exponent) -> Result<f64> {
    let n = base.norm(p);
    if n == 0.0 {
        Err(Error::ZeroBase)
    } else {
        Ok(n)
    }
}

pub fn semi_orthogonal(base: &LpVector, x: &LpVector, p: Exponent) -> Result<Decomposition> {
    let n = nonzero_norm(base, p)?;
    let a = dual_pairing(base, x, p) / (n * n);
    Ok(Decomposition {
        a,
        o: x - &(a * base),
    })
}

/// Membership in `O(base) = {v : <J(base), v> = 0}`, tested relative to
/// `||base|| ||v||`.
pub fn in_tangent_set(base: &LpVector, v: &LpVector, p: Exponent, tol: f64) -> Result<bool> {
    let n = nonzero_norm(base, p)?;
    Ok(dual_pairing(base, v, p).abs() <= tol * n * v.norm(p))
}

/// Membership in the cone `{v : <J(v), base> = 0}`: the points whose
/// nearest point on the line through `base` is the origin. Unlike the
/// tangent hyperplane this set is generally not convex.
pub fn in_null_cone(base: &LpVector, v: &LpVector, p: Exponent, tol: f64) -> Result<bool> {
    let n = nonzero_norm(base, p)?;
    Ok(pairing(&duality_map(v, p), base).abs() <= tol * n * v.norm(p))
}

/// `(||base + v|| - ||base||) / ||v||` for a tangent direction `v`.
///
/// Tends to zero as `v -> 0` inside `O(base)`; off the hyperplane it tends
/// to the nonzero slope of the norm, so non-tangent input is rejected.
pub fn strong_smoothness_ratio(base: &LpVector, v: &LpVector, p: Exponent) -> Result<f64> {
    let n = nonzero_norm(base, p)?;
    let nv = v.norm(p);
    if nv == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let rel = dual_pairing(base, v, p) / (n * nv);
    if rel.abs() > DEFAULT_TANGENT_TOL {
        return Err(Error::NotTangent(rel));
    }
    Ok(((base + v).norm(p) - n) / nv)
}
