//! Computational hyperbolic geometry for orbifold triangulations, thick graph
//! embeddings and Mahler-measure volume bounds.

pub mod hyperbolic;
pub mod constructions;
pub mod group;
pub mod polytope;
pub mod cell;
pub mod domain;
pub mod voronoi;
pub mod skeleton;
pub mod embedding;
pub mod arithmetic;
pub mod io;
pub mod scaling;
