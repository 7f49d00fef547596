//! The normalized duality mapping of `l_p` and `L_p` and the quantities
//! built from it.
//!
//! For `x != 0` the mapping is `(Jx)_i = |x_i|^(p-1) sign(x_i) / ||x||_p^(p-2)`,
//! the unique functional with `<Jx, x> = ||x||^2` and `||Jx||_q = ||x||_p`.
//! The origin maps to the origin.

use serde::Serialize;

use crate::lp_space::{Exponent, LpVector, StepFunction};

/// An element of the dual sequence space `l_q`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DualVector(LpVector);

impl DualVector {
    pub fn new(entries: LpVector) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &LpVector {
        &self.0
    }

    pub fn into_inner(self) -> LpVector {
        self.0
    }

    /// `||y||_q`, where `q` is the conjugate of the primal exponent `p`.
    pub fn norm(&self, p: Exponent) -> f64 {
        self.0.norm(p.dual())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// `n * sign(v) * (|v| / n)^(e - 1)`: the signed power written relative to
/// the norm `n`, which equals `|v|^(e-1) sign(v) / n^(e-2)` but never
/// forms `0^negative` or overflows.
fn signed_power(v: f64, norm: f64, e: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        norm * v.signum() * (v.abs() / norm).powf(e - 1.0)
    }
}

fn duality_entries(x: &LpVector, e: Exponent) -> LpVector {
    let n = x.norm(e);
    if n == 0.0 {
        return LpVector::zero();
    }
    x.map(|_, v| signed_power(v, n, e.p()))
}

/// `J : l_p -> l_q`.
pub fn duality_map(x: &LpVector, p: Exponent) -> DualVector {
    DualVector(duality_entries(x, p))
}

/// `J* : l_q -> l_p`, the inverse of [`duality_map`]. `p` is the primal
/// exponent; the formula is evaluated with its conjugate.
pub fn duality_map_star(y: &DualVector, p: Exponent) -> LpVector {
    duality_entries(&y.0, p.dual())
}

/// `<y, x> = sum y_i x_i`.
pub fn pairing(y: &DualVector, x: &LpVector) -> f64 {
    y.0.dot(x)
}

/// `<J(x), y>` without materializing the dual vector twice at call sites.
pub fn dual_pairing(x: &LpVector, y: &LpVector, p: Exponent) -> f64 {
    pairing(&duality_map(x, p), y)
}

/// `J : L_p(S) -> L_q(S)`; the dual element is stored on the same atoms.
pub fn duality_map_function(f: &StepFunction, p: Exponent) -> StepFunction {
    let n = f.lp_norm(p);
    if n == 0.0 {
        return StepFunction::zero(f.space().clone());
    }
    f.map(|v| signed_power(v, n, p.p()))
}

/// `<g, f> = integral g f dmu`.
pub fn pairing_function(g: &StepFunction, f: &StepFunction) -> f64 {
    g.integral_product(f)
}

/// Directional derivative of the norm: `<J(x), y> / ||x||`, and `||y||` at
/// the origin.
pub fn smoothness_psi(x: &LpVector, y: &LpVector, p: Exponent) -> f64 {
    let nx = x.norm(p);
    if nx == 0.0 {
        y.norm(p)
    } else {
        dual_pairing(x, y, p) / nx
    }
}

/// The three sides of `2<J(y), x - y> <= ||x||^2 - ||y||^2 <= 2<J(x), x - y>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sandwich {
    pub lower: f64,
    pub mid: f64,
    pub upper: f64,
}

impl Sandwich {
    /// Largest amount by which either inequality fails, relative to
    /// `max(1, |lower|, |mid|, |upper|)`; nonpositive when both hold.
    pub fn violation(&self) -> f64 {
        let scale = 1f64.max(self.lower.abs()).max(self.mid.abs()).max(self.upper.abs());
        ((self.lower - self.mid).max(self.mid - self.upper)) / scale
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.violation() <= rel_tol
    }
}

pub fn norm_square_sandwich(x: &LpVector, y: &LpVector, p: Exponent) -> Sandwich {
    let diff = x - y;
    let (nx, ny) = (x.norm(p), y.norm(p));
    Sandwich {
        lower: 2.0 * dual_pairing(y, &diff, p),
        mid: nx * nx - ny * ny,
        upper: 2.0 * dual_pairing(x, &diff, p),
    }
}
