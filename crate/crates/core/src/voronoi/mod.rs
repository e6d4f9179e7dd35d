//! Equivariant Voronoi decompositions of orbifolds and their barycentric
//! subdivisions.

pub mod barycenter;
pub mod complex;
pub mod orbit;
pub mod pipeline;
pub mod separated;
pub mod triangulation;

use thiserror::Error;

use crate::group::GroupError;
use crate::polytope::PolytopeError;

pub use barycenter::{barycenter, barycenter_with_stats, BarycenterResult};
pub use complex::{build_voronoi, lift_sites, LiftedSite, VoronoiComplex};
pub use orbit::{OrbitReducer, OrbitTable};
pub use pipeline::{triangulate, PipelineOutput, PipelineParams};
pub use separated::{build_separated_set, SeparatedSet, SeparatedSetParams};
pub use triangulation::{barycentric_subdivision, check_good, degree_and_count_report, sample_singular_points, GoodTriangulation};

#[derive(Debug, Error)]
pub enum VoronoiError {
    #[error("empty vertex list")]
    EmptyInput,
    #[error("barycenter did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("no non-singular point found after {attempts} samples")]
    NoNonsingularPoint { attempts: usize },
    #[error("packing violated: {count} separated sites need more than the volume {bound:.4}; the quotient metric is wrong")]
    PackingViolated { count: usize, bound: f64 },
    #[error("ball of radius {radius} too small: {reason}; enlarge the ball")]
    BallTooSmall { radius: f64, reason: String },
    #[error("cell of site {site} is not bounded within the lift window")]
    UnboundedCell { site: usize },
    #[error("structural error: {0}")]
    Structure(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

pub type Result<T> = std::result::Result<T, VoronoiError>;
