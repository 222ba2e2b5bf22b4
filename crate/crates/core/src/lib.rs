//! Counterexamples to Borsuk's conjecture on spheres of radius r > 1/2:
//! parameter pipelines, the tensor-power construction, the polynomial
//! rank argument over GF(p), count bounds, and the matching upper and
//! optimality numerics.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod bounds;
pub mod construction;
pub mod error;
pub mod exactnum;
pub mod optimality;
pub mod params;
pub mod ser;
pub mod upper;

pub use error::{Error, Result};
pub use exactnum::{BigInt, BigRational, DoubleDouble, LogReal};

pub use algebra::{AvoidingFamily, LemmaCertificate, ReducedPolynomial};
pub use bounds::{CountBound, InequalityCheck, Theorem3Report};
pub use construction::{GeometryReport, SignVector, TensorImage};
pub use optimality::{CandidatePolynomial, RatioValue};
pub use params::{Mode, ParamSet, Phi};
pub use upper::SimplexPartitionReport;
