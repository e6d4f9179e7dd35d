//! Stratified Monte Carlo volume of the radius-neighborhood of an embedding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::index::{Pieces, SegmentIndex};
use super::{point_segment_distance, EmbeddedGraph, EmbeddingError, Result};

pub const DEFAULT_SAMPLES: usize = 2_000_000;
/// Strata per axis, applied to at most `MAX_STRATIFIED_AXES` axes.
const STRATA_PER_AXIS: usize = 8;
const MAX_STRATIFIED_AXES: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub radius: f64,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
}

impl VolumeEstimate {
    pub fn box_volume(&self) -> f64 {
        self.box_lo.iter().zip(&self.box_hi).map(|(a, b)| b - a).product()
    }
}

/// Point-in-neighborhood test backed by a spatial hash.
pub(crate) struct Neighborhood {
    pub pieces: Pieces,
    index: SegmentIndex,
    pub radius: f64,
}

impl Neighborhood {
    pub fn new(g: &EmbeddedGraph, radius: f64) -> Self {
        let pieces = Pieces::from_graph(g);
        let index = SegmentIndex::build(&pieces, (2.0 * radius).max(4.0), radius);
        Self { pieces, index, radius }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.index
            .query(x)
            .iter()
            .any(|&i| point_segment_distance(x, self.pieces.p(i as usize), self.pieces.q(i as usize)) <= self.radius)
    }
}

pub fn neighborhood_volume(g: &EmbeddedGraph, radius: f64, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    if !(radius > 0.0) {
        return Err(EmbeddingError::BadRadius(radius));
    }
    let nb = Neighborhood::new(g, radius);
    if nb.pieces.is_empty() {
        return Err(EmbeddingError::Empty);
    }
    let n = g.dim;
    let (lo, hi) = nb.pieces.bounds(radius);
    let per_axis: Vec<usize> = (0..n)
        .map(|k| if k < MAX_STRATIFIED_AXES { STRATA_PER_AXIS } else { 1 })
        .collect();
    let strata: usize = per_axis.iter().product();
    let per = samples.div_ceil(strata).max(2);
    let width: Vec<f64> = (0..n).map(|k| (hi[k] - lo[k]) / per_axis[k] as f64).collect();
    let cell_vol: f64 = width.iter().product();

    let (value, var) = (0..strata)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let mut corner = vec![0.0; n];
            let mut r = s;
            for k in 0..n {
                corner[k] = lo[k] + (r % per_axis[k]) as f64 * width[k];
                r /= per_axis[k];
            }
            let mut x = vec![0.0; n];
            let mut hits = 0usize;
            for _ in 0..per {
                for k in 0..n {
                    x[k] = corner[k] + rng.gen::<f64>() * width[k];
                }
                hits += nb.contains(&x) as usize;
            }
            let p = hits as f64 / per as f64;
            (cell_vol * p, cell_vol * cell_vol * p * (1.0 - p) / per as f64)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(VolumeEstimate {
        value,
        stderr: var.sqrt(),
        samples: per * strata,
        radius,
        box_lo: lo,
        box_hi: hi,
    })
}
