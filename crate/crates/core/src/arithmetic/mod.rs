//! Integer polynomials, Mahler measures and volume-driven bound chains.

pub mod bounds;
pub mod dd;
pub mod poly;
pub mod roots;

use thiserror::Error;

pub use bounds::{
    charpoly_degree_bound, degree_bound, dobrowolski_bound, dobrowolski_sweep, epsilon_choice, q_bound, rinj_bound, simplex_budget,
    translation_length_lower, BoundConstants, BoundPipelineReport,
};
pub use poly::{cyclotomic, is_cyclotomic_product, kronecker_factorization, IntPolynomial};
pub use roots::{mahler_measure, MahlerResult};

#[derive(Debug, Error)]
pub enum ArithmeticError {
    #[error("polynomial must be monic of degree >= 1: {0}")]
    NotMonic(String),
    #[error("requested precision {requested:e} not reached (got {achieved:e})")]
    Precision { requested: f64, achieved: f64 },
    #[error("outside the domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, ArithmeticError>;
