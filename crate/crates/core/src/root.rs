//! Scalar root finding on a sign-changing bracket.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Residual `|f(x)|` accepted if the bracket has not collapsed within
    /// `max_iter` iterations.
    pub tol: f64,
    /// The bracket is narrowed until its width is at most
    /// `x_tol * max(1, |lo|, |hi|)`.
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            x_tol: 1e-15,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds a root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` differ in
/// sign. Secant steps through the bracket endpoints alternate with plain
/// bisection, so the bracket at least halves every second iteration.
///
/// The bracket is narrowed to `x_tol` rather than stopping at the first
/// small residual: a root of multiplicity above one has `|f| <= tol` on a
/// wide interval, and a root with infinite slope may never reach `tol` at
/// all. The returned point is the bracket endpoint with the smaller
/// residual. Running out of iterations is an error only if that residual
/// still exceeds `tol`.
pub fn bracketed_root<F>(mut f: F, lo: f64, hi: f64, opts: RootOptions) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (mut fa, mut fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) || fa * fb > 0.0 {
        return Err(Error::NoSignChange {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let best = |a: f64, fa: f64, b: f64, fb: f64, iterations: usize| {
        let (x, r) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
        Root {
            x,
            residual: r.abs(),
            iterations,
        }
    };
    if fa == 0.0 || fb == 0.0 {
        return Ok(best(a, fa, b, fb, 0));
    }

    for iteration in 1..=opts.max_iter {
        let mid = 0.5 * (a + b);
        let x = if iteration % 2 == 0 {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a && s < b {
                s
            } else {
                mid
            }
        } else {
            mid
        };
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::NotConverged {
                iterations: iteration,
                residual: fx,
            });
        }
        if fx == 0.0 {
            return Ok(Root {
                x,
                residual: 0.0,
                iterations: iteration,
            });
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        let width = b - a;
        let scale = 1f64.max(a.abs()).max(b.abs());
        let next_mid = 0.5 * (a + b);
        if width <= opts.x_tol * scale || next_mid <= a || next_mid >= b {
            return Ok(best(a, fa, b, fb, iteration));
        }
    }
    let root = best(a, fa, b, fb, opts.max_iter);
    if root.residual <= opts.tol {
        Ok(root)
    } else {
        Err(Error::NotConverged {
            iterations: opts.max_iter,
            residual: root.residual,
        })
    }
}
