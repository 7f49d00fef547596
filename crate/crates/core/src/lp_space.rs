//! Exponents, finite-support sequences, index masks and discrete measure
//! spaces.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A norm exponent `p` together with its conjugate `q = p / (p - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent {
    p: f64,
    q: f64,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        Ok(Self {
            p,
            q: conjugate_exponent(p)?,
        })
    }

    pub fn p(self) -> f64 {
        self.p
    }

    pub fn q(self) -> f64 {
        self.q
    }

    /// The exponent of the dual space.
    pub fn dual(self) -> Self {
        Self {
            p: self.q,
            q: self.p,
        }
    }

    pub fn is_hilbert(self) -> bool {
        self.p == 2.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.p)
    }
}

pub fn conjugate_exponent(p: f64) -> Result<f64> {
    if !p.is_finite() || p <= 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let q = p / (p - 1.0);
    if !q.is_finite() {
        return Err(Error::InvalidExponent(p));
    }
    Ok(q)
}

/// `(sum |v|^p w)^(1/p)`, rescaled by the largest magnitude so that large
/// or tiny entries neither overflow nor underflow.
pub(crate) fn weighted_lp_norm<I>(items: I, p: f64) -> f64
where
    I: Iterator<Item = (f64, f64)> + Clone,
{
    let scale = items.clone().fold(0.0_f64, |m, (v, _)| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = items.map(|(v, w)| (v.abs() / scale).powf(p) * w).sum();
    scale * sum.powf(1.0 / p)
}

/// Minimal vector-space surface shared by sequences and step functions, so
/// the derivative oracles can be written once.
pub trait LinearSpace: Clone {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, factor: f64) -> Self;
    fn norm(&self, p: Exponent) -> f64;

    fn axpy(&self, factor: f64, other: &Self) -> Self {
        self.add(&other.scale(factor))
    }
}

/// A finitely supported real sequence `(x_1, x_2, ...)`.
///
/// Indices are 1-based and strictly increasing; exact zeros are never
/// stored, so two vectors are equal iff their entry lists are equal.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, f64)>", into = "Vec<(usize, f64)>")]
pub struct LpVector {
    entries: Vec<(usize, f64)>,
}

impl LpVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a vector from `(index, value)` pairs in any order.
    ///
    /// Rejects index 0, duplicate indices and non-finite values. Zero
    /// values are dropped.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut entries: Vec<(usize, f64)> = entries.into_iter().collect();
        entries.sort_by_key(|&(i, _)| i);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidEntries(format!("duplicate index {}", pair[0].0)));
            }
        }
        if let Some(&(i, _)) = entries.first() {
            if i == 0 {
                return Err(Error::InvalidEntries("indices start at 1".into()));
            }
        }
        if let Some(&(i, v)) = entries.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidEntries(format!("non-finite value {v} at index {i}")));
        }
        entries.retain(|&(_, v)| v != 0.0);
        Ok(Self { entries })
    }

    /// Dense slice `[x_1, ..., x_n]`; panics on non-finite input.
    pub fn from_dense(values: &[f64]) -> Self {
        assert!(values.iter().all(|v| v.is_finite()), "non-finite entry");
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, &v)| (i + 1, v))
                .collect(),
        }
    }

    /// Unit basis vector `e_index`.
    pub fn basis(index: usize) -> Self {
        assert!(index >= 1, "indices start at 1");
        Self {
            entries: vec![(index, 1.0)],
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + Clone + '_ {
        self.entries.iter().copied()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|k| self.entries[k].1)
            .unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest index with a nonzero value, 0 for the origin.
    pub fn dimension(&self) -> usize {
        self.entries.last().map_or(0, |&(i, _)| i)
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for &(i, v) in &self.entries {
            if i <= dim {
                out[i - 1] = v;
            }
        }
        out
    }

    pub fn norm(&self, p: Exponent) -> f64 {
        weighted_lp_norm(self.iter().map(|(_, v)| (v, 1.0)), p.p())
    }

    /// `sum |x_i|^p`.
    pub fn norm_pow(&self, p: Exponent) -> f64 {
        self.iter().map(|(_, v)| v.abs().powf(p.p())).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    pub fn mask(&self, set: &IndexSet) -> Self {
        Self {
            entries: self.iter().filter(|&(i, _)| set.contains(i)).collect(),
        }
    }

    /// Applies `f` to each entry, dropping results that are exactly zero.
    pub fn map(&self, mut f: impl FnMut(usize, f64) -> f64) -> Self {
        Self {
            entries: self
                .iter()
                .map(|(i, v)| (i, f(i, v)))
                .filter(|&(_, v)| v != 0.0)
                .collect(),
        }
    }

    /// Merges two supports with `f(a_i, b_i)`; absent entries read as zero
    /// and `f(0, 0)` is assumed to be zero.
    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len().max(b.len()));
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let (index, value) = match (a.get(i), b.get(j)) {
                (Some(&(ia, va)), Some(&(ib, _))) if ia < ib => {
                    i += 1;
                    (ia, f(va, 0.0))
                }
                (Some(&(ia, _)), Some(&(ib, vb))) if ib < ia => {
                    j += 1;
                    (ib, f(0.0, vb))
                }
                (Some(&(ia, va)), Some(&(_, vb))) => {
                    i += 1;
                    j += 1;
                    (ia, f(va, vb))
                }
                (Some(&(ia, va)), None) => {
                    i += 1;
                    (ia, f(va, 0.0))
                }
                (None, Some(&(ib, vb))) => {
                    j += 1;
                    (ib, f(0.0, vb))
                }
                (None, None) => unreachable!(),
            };
            if value != 0.0 {
                out.push((index, value));
            }
        }
        Self { entries: out }
    }

    /// `sum a_i b_i` over the common support.
    pub fn dot(&self, other: &Self) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut sum) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }
}

impl TryFrom<Vec<(usize, f64)>> for LpVector {
    type Error = Error;

    fn try_from(entries: Vec<(usize, f64)>) -> Result<Self> {
        Self::from_entries(entries)
    }
}

impl From<LpVector> for Vec<(usize, f64)> {
    fn from(v: LpVector) -> Self {
        v.entries
    }
}

impl Add for &LpVector {
    type Output = LpVector;
    fn add(self, rhs: &LpVector) -> LpVector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &LpVector {
    type Output = LpVector;
    fn sub(self, rhs: &LpVector) -> LpVector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &LpVector {
    type Output = LpVector;
    fn neg(self) -> LpVector {
        self.map(|_, v| -v)
    }
}

impl Mul<&LpVector> for f64 {
    type Output = LpVector;
    fn mul(self, rhs: &LpVector) -> LpVector {
        rhs.map(|_, v| self * v)
    }
}

impl LinearSpace for LpVector {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, factor: f64) -> Self {
        factor * self
    }
    fn norm(&self, p: Exponent) -> f64 {
        LpVector::norm(self, p)
    }
}

pub fn norm(x: &LpVector, p: Exponent) -> f64 {
    x.norm(p)
}

/// `x_M`: keeps coordinates in `set`, zeroes the rest.
pub fn mask(x: &LpVector, set: &IndexSet) -> LpVector {
    x.mask(set)
}

/// A finite or cofinite set of positive integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    members: BTreeSet<usize>,
    complement: bool,
}

impl IndexSet {
    /// The whole of `N`.
    pub fn all() -> Self {
        Self {
            members: BTreeSet::new(),
            complement: true,
        }
    }

    pub fn finite<I: IntoIterator<Item = usize>>(members: I) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if members.contains(&0) {
            return Err(Error::InvalidEntries("indices start at 1".into()));
        }
        Ok(Self {
            members,
            complement: false,
        })
    }

    /// `N` minus the listed indices.
    pub fn cofinite<I: IntoIterator<Item = usize>>(excluded: I) -> Result<Self> {
        Ok(Self::finite(excluded)?.complement())
    }

    pub fn contains(&self, index: usize) -> bool {
        index >= 1 && (self.members.contains(&index) != self.complement)
    }

    pub fn complement(&self) -> Self {
        Self {
            members: self.members.clone(),
            complement: !self.complement,
        }
    }

    pub fn is_all(&self) -> bool {
        self.complement && self.members.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        !self.complement && self.members.is_empty()
    }
}

impl FromStr for IndexSet {
    type Err = Error;

    /// `"all"` or a comma-separated list such as `"1,3"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Self::all());
        }
        let members = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidEntries(format!("bad index {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::finite(members)
    }
}

/// A finite measure space: labelled atoms with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    atoms: Vec<(i64, f64)>,
}

impl MeasureSpace {
    pub fn new(atoms: Vec<(i64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasureSpace("no atoms".into()));
        }
        let mut labels = BTreeSet::new();
        for &(label, weight) in &atoms {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidMeasureSpace(format!(
                    "atom {label} has non-positive weight {weight}"
                )));
            }
            if !labels.insert(label) {
                return Err(Error::InvalidMeasureSpace(format!("duplicate label {label}")));
            }
        }
        Ok(Self { atoms })
    }

    /// Atoms `1..=n` with weights `2^-i`.
    pub fn geometric(n: usize) -> Self {
        assert!((1..=1000).contains(&n), "geometric space size out of range");
        Self {
            atoms: (1..=n).map(|i| (i as i64, 0.5_f64.powi(i as i32))).collect(),
        }
    }

    /// Built-in spaces by name; `geoN` is [`MeasureSpace::geometric`].
    pub fn named(name: &str) -> Option<Self> {
        let n: usize = name.strip_prefix("geo")?.parse().ok()?;
        (1..=1000).contains(&n).then(|| Self::geometric(n))
    }

    pub fn atoms(&self) -> &[(i64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.atoms[atom].1
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + Clone + '_ {
        self.atoms.iter().map(|&(_, w)| w)
    }

    pub fn measure_of(&self, atoms: &[usize]) -> f64 {
        atoms.iter().map(|&k| self.atoms[k].1).sum()
    }
}

/// A real function on the atoms of a [`MeasureSpace`], i.e. an element of
/// `L_p` of that space.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    space: Arc<MeasureSpace>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(space: Arc<MeasureSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::InvalidEntries(format!(
                "{} values for {} atoms",
                values.len(),
                space.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidEntries("non-finite value".into()));
        }
        Ok(Self { space, values })
    }

    pub fn zero(space: Arc<MeasureSpace>) -> Self {
        let values = vec![0.0; space.len()];
        Self { space, values }
    }

    pub fn constant(space: Arc<MeasureSpace>, value: f64) -> Self {
        let values = vec![value; space.len()];
        Self { space, values }
    }

    /// `value` on the listed atoms, zero elsewhere.
    pub fn indicator(space: Arc<MeasureSpace>, atoms: &[usize], value: f64) -> Self {
        let mut values = vec![0.0; space.len()];
        for &k in atoms {
            values[k] = value;
        }
        Self { space, values }
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn same_space(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space
    }

    pub fn lp_norm(&self, p: Exponent) -> f64 {
        weighted_lp_norm(self.values.iter().copied().zip(self.space.weights()), p.p())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Nonnegative everywhere, i.e. a member of the positive cone.
    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Self {
        Self {
            space: Arc::clone(&self.space),
            values: self.values.iter().copied().map(f).collect(),
        }
    }

    /// Pointwise combination; panics if the spaces differ.
    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        assert!(self.same_space(other), "step functions on different spaces");
        Self {
            space: Arc::clone(&self.space),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `integral y f dmu`.
    pub fn integral_product(&self, other: &Self) -> f64 {
        assert!(self.same_space(other), "step functions on different spaces");
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.space.weights())
            .map(|((a, b), w)| a * b * w)
            .sum()
    }
}

impl LinearSpace for StepFunction {
    fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }
    fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }
    fn scale(&self, factor: f64) -> Self {
        self.map(|v| factor * v)
    }
    fn norm(&self, p: Exponent) -> f64 {
        self.lp_norm(p)
    }
}

pub fn lp_norm_function(f: &StepFunction, p: Exponent) -> f64 {
    f.lp_norm(p)
}

/// `{"p": 3.0, "entries": [[1, 1.0], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedVector {
    pub p: f64,
    pub entries: LpVector,
}

impl EncodedVector {
    pub fn new(x: &LpVector, p: Exponent) -> Self {
        Self {
            p: p.p(),
            entries: x.clone(),
        }
    }

    pub fn decode(self) -> Result<(Exponent, LpVector)> {
        Ok((Exponent::new(self.p)?, self.entries))
    }
}

/// `{"p": 3.0, "atoms": [[1, 0.5], ...], "values": [1.0, ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedStepFunction {
    pub p: f64,
    pub atoms: Vec<(i64, f64)>,
    pub values: Vec<f64>,
}

impl EncodedStepFunction {
    pub fn new(f: &StepFunction, p: Exponent) -> Self {
        Self {
            p: p.p(),
            atoms: f.space().atoms().to_vec(),
            values: f.values().to_vec(),
        }
    }

    pub fn decode(self) -> Result<(Exponent, StepFunction)> {
        let p = Exponent::new(self.p)?;
        let space = Arc::new(MeasureSpace::new(self.atoms)?);
        Ok((p, StepFunction::new(space, self.values)?))
    }
}
