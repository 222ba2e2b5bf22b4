//! The polynomial rank argument over GF(p) and its brute-force oracles.

pub mod lemma;
pub mod mis;
pub mod poly;
pub mod rank;

pub use lemma::{
    dimension_bound, independence_verify, lemma_bound_check, lemma_bound_check_with, polynomial_rows, property_check,
    property_sweep, AvoidingFamily, LemmaCertificate, LemmaOptions, PropertySweep,
};
pub use mis::{max_avoiding_exact, max_avoiding_exact_with, MisOptions, MisResult};
pub use poly::{build_P, build_reduced, reduce_multilinear, residue_product, Polynomial, ReducedPolynomial};
pub use rank::rank_gfp;
