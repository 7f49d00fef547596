//! Metric projections in `l_p` and discrete `L_p` spaces.
//!
//! The crate covers four closed convex targets (balls, cylinders, the
//! positive cone and one-dimensional subspaces), the normalized duality
//! mapping that characterizes nearest points in these spaces, and the
//! first-order behaviour of the projections: closed-form Fréchet
//! derivatives, Gâteaux directional derivatives on boundaries, finite
//! difference oracles and explicit non-differentiability witnesses.
//!
//! Every exponent is a runtime [`Exponent`] with `1 < p < ∞`. Sequences
//! are finite-support [`LpVector`]s; function spaces are
//! [`StepFunction`]s over a finite weighted [`MeasureSpace`].

pub mod decomp;
pub mod derivatives;
pub mod duality;
mod error;
pub mod lp_space;
pub mod projections;
pub mod root;
pub mod sample;

pub use error::{Error, Result};
pub use lp_space::{Exponent, IndexSet, LinearSpace, LpVector, MeasureSpace, StepFunction};
