//! Worked counterexamples about lines and the positive cone.

use serde::Serialize;

use crate::decomp::semi_orthogonal;
use crate::duality::{duality_map, pairing};
use crate::lp_space::{Exponent, LpVector, StepFunction};
use crate::root::RootOptions;
use crate::{Error, Result};

use super::project_line;

fn cubic() -> Exponent {
    Exponent::new(3.0).expect("3 is a valid exponent")
}

/// The split coefficient `a(base; x)` versus the actual line projection,
/// for `base = (1, 2, 1)`, `x = (3, -2, 1)` in `l_3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineSplitReport {
    pub p: f64,
    pub base: LpVector,
    pub x: LpVector,
    /// `<J(base), x> / ||base||^2`.
    pub split_coefficient: f64,
    pub tangent_part: LpVector,
    /// `<J(o), base>`; positive, so `o` is not projected to the origin.
    pub tangent_pairing: f64,
    pub t_star: f64,
    pub pass: bool,
}

pub fn witness_line_split() -> Result<LineSplitReport> {
    let p = cubic();
    let base = LpVector::from_dense(&[1.0, 2.0, 1.0]);
    let x = LpVector::from_dense(&[3.0, -2.0, 1.0]);
    let d = semi_orthogonal(&base, &x, p)?;
    let tangent_pairing = pairing(&duality_map(&d.o, p), &base);
    let t_star = project_line(&x, &base, p, RootOptions::default())?.t_star;
    let want_o = [17.0 / 5.0, -6.0 / 5.0, 7.0 / 5.0];
    let pass = (d.a + 0.4).abs() <= 1e-12
        && want_o
            .iter()
            .enumerate()
            .all(|(i, w)| (d.o.get(i + 1) - w).abs() <= 1e-12)
        && tangent_pairing > 1e-2
        && (t_star - d.a).abs() > 1e-3;
    Ok(LineSplitReport {
        p: p.p(),
        base,
        x,
        split_coefficient: d.a,
        tangent_part: d.o,
        tangent_pairing,
        t_star,
        pass,
    })
}

/// Two points whose duality images annihilate `base = (25, 37, 77)` in
/// `l_3`, and a convex combination of them whose image does not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullConeReport {
    pub p: f64,
    pub base: LpVector,
    pub v: LpVector,
    pub w: LpVector,
    pub g: LpVector,
    pub pairing_v: f64,
    pub pairing_w: f64,
    pub pairing_g: f64,
    /// `-14 * 4^(1/3)`.
    pub expected_pairing_g: f64,
    pub pass: bool,
}

fn null_cone_vectors() -> (LpVector, LpVector, LpVector, LpVector) {
    let base = LpVector::from_dense(&[25.0, 37.0, 77.0]);
    let v = LpVector::from_dense(&[3.0, -2.0, -1.0]);
    let w = LpVector::from_dense(&[1.0, -3.0, 2.0]);
    let g = &((2.0 / 3.0) * &v) + &((1.0 / 3.0) * &w);
    (base, v, w, g)
}

pub fn witness_null_cone() -> NullConeReport {
    let p = cubic();
    let (base, v, w, g) = null_cone_vectors();
    let pair = |y: &LpVector| pairing(&duality_map(y, p), &base);
    let (pairing_v, pairing_w, pairing_g) = (pair(&v), pair(&w), pair(&g));
    let expected_pairing_g = -14.0 * 4f64.cbrt();
    let pass = pairing_v.abs() <= 1e-10
        && pairing_w.abs() <= 1e-10
        && (pairing_g - expected_pairing_g).abs() <= 1e-6;
    NullConeReport {
        p: p.p(),
        base,
        v,
        w,
        g,
        pairing_v,
        pairing_w,
        pairing_g,
        expected_pairing_g,
        pass,
    }
}

/// The projection onto `span(base)` sends `v + base` and `w + base` to
/// `base` but not their convex combination `g + base`: the map is not
/// linear and the preimage of `base` is not convex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineNonlinearityReport {
    pub p: f64,
    pub base: LpVector,
    pub t_star_v: f64,
    pub t_star_w: f64,
    pub t_star_g: f64,
    pub pairing_g: f64,
    pub expected_pairing_g: f64,
    pub pass: bool,
}

pub fn witness_line_nonlinearity() -> Result<LineNonlinearityReport> {
    let p = cubic();
    let (base, v, w, g) = null_cone_vectors();
    let solve = |y: &LpVector| -> Result<f64> {
        Ok(project_line(&(y + &base), &base, p, RootOptions::default())?.t_star)
    };
    let (t_star_v, t_star_w, t_star_g) = (solve(&v)?, solve(&w)?, solve(&g)?);
    let pairing_g = pairing(&duality_map(&g, p), &base);
    let expected_pairing_g = -14.0 * 4f64.cbrt();
    let pass = (t_star_v - 1.0).abs() <= 1e-8
        && (t_star_w - 1.0).abs() <= 1e-8
        && t_star_g < 1.0 - 1e-3
        && (pairing_g - expected_pairing_g).abs() <= 1e-6;
    Ok(LineNonlinearityReport {
        p: p.p(),
        base,
        t_star_v,
        t_star_w,
        t_star_g,
        pairing_g,
        expected_pairing_g,
        pass,
    })
}

/// A function outside the cone within `eps` of a given cone member.
#[derive(Debug, Clone, PartialEq)]
pub struct EmptyInteriorWitness {
    pub g: StepFunction,
    /// 0-based atom positions where `g = -1`.
    pub atoms: Vec<usize>,
    pub distance: f64,
    /// `(sum_atoms |f|^p mu)^(1/p) + mu(atoms)^(1/p)`.
    pub distance_bound: f64,
}

/// Replaces `f` by `-1` on one atom of small enough weight and mass.
/// Fails when no atom of the space is light enough for `eps`.
pub fn witness_cone_empty_interior(f: &StepFunction, eps: f64, p: Exponent) -> Result<EmptyInteriorWitness> {
    if !f.is_nonnegative() {
        return Err(Error::WitnessPrecondition("f must lie in the positive cone".into()));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::WitnessPrecondition(format!("eps must be positive, got {eps}")));
    }
    let half = eps / 2.0;
    let space = f.space();
    let mass = |k: usize| f.values()[k].abs() * space.weight(k).powf(1.0 / p.p());
    let atom = (0..space.len())
        .filter(|&k| space.weight(k) < half.powf(p.p()) && mass(k) < half)
        .min_by(|&a, &b| space.weight(a).total_cmp(&space.weight(b)))
        .ok_or_else(|| {
            Error::WitnessPrecondition(format!("no atom is light enough for eps = {eps}"))
        })?;
    let mut values = f.values().to_vec();
    values[atom] = -1.0;
    let g = StepFunction::new(space.clone(), values)?;
    let distance = f.zip_with(&g, |a, b| a - b).lp_norm(p);
    let distance_bound = mass(atom) + space.weight(atom).powf(1.0 / p.p());
    Ok(EmptyInteriorWitness {
        g,
        atoms: vec![atom],
        distance,
        distance_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_space::MeasureSpace;
    use std::sync::Arc;

    #[test]
    fn line_split() {
        let r = witness_line_split().unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.tangent_pairing - 3.018_998_769_824_475).abs() < 1e-9);
    }

    #[test]
    fn null_cone() {
        let r = witness_null_cone();
        assert!(r.pass, "{r:?}");
        assert!((r.pairing_g + 22.223_614_727_554_79).abs() < 1e-9);
    }

    #[test]
    fn line_nonlinearity() {
        let r = witness_line_nonlinearity().unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.t_star_g - 0.994_399_638_546_758_7).abs() < 1e-8, "{}", r.t_star_g);
    }

    #[test]
    fn empty_interior() {
        let p = Exponent::new(3.0).unwrap();
        let space = Arc::new(MeasureSpace::geometric(16));
        let f = StepFunction::zero(space.clone());
        let wit = witness_cone_empty_interior(&f, 0.1, p).unwrap();
        assert!(!wit.g.is_nonnegative());
        assert!(wit.distance < 0.1);
        assert_eq!(wit.atoms, vec![15]);
        assert!(wit.distance <= wit.distance_bound * (1.0 + 1e-12));

        let f = StepFunction::constant(space.clone(), 2.0);
        let wit = witness_cone_empty_interior(&f, 0.5, p).unwrap();
        assert!(wit.distance < 0.5 && wit.distance <= wit.distance_bound * (1.0 + 1e-12));

        let coarse = Arc::new(MeasureSpace::geometric(2));
        assert!(matches!(
            witness_cone_empty_interior(&StepFunction::zero(coarse), 0.1, p),
            Err(Error::WitnessPrecondition(_))
        ));
        let negative = StepFunction::constant(space, -1.0);
        assert!(witness_cone_empty_interior(&negative, 0.1, p).is_err());
    }
}
