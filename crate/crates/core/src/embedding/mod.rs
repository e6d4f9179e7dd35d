//! Thick embeddings of graphs in R^N: construction, exact thickness checks,
//! neighborhood volumes and slab statistics.

pub mod index;
pub mod kb;
pub mod slab;
pub mod thickness;
pub mod volume;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kb::{kb_embed, KbEmbedding, KbParams};
pub use slab::{falconer_direction, family_stats, slab_counts, theorem1_report, FalconerParams, FamilyStats, SlabAnalysis, Theorem1Ratio};
pub use thickness::{verify_thickness, verify_thickness_bruteforce, ThicknessReport};
pub use volume::{neighborhood_volume, VolumeEstimate};

/// Endpoint mismatch tolerance for polylines.
pub const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("invalid embedding: {0}")]
    Invalid(String),
    #[error("routing failed after {attempts} attempts: {diagnostics}")]
    RoutingFailed { attempts: usize, diagnostics: String },
    #[error("ambient dimension must be at least 3, got {0}")]
    BadDimension(usize),
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("direction must be a nonzero vector of length {0}")]
    BadDirection(usize),
    #[error("empty embedding")]
    Empty,
}

pub type Result<T> = std::result::Result<T, EmbeddingError>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedEdge {
    pub a: usize,
    pub b: usize,
    /// Polyline from vertex `a` to vertex `b`, endpoints included.
    pub path: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedGraph {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub edges: Vec<EmbeddedEdge>,
}

impl EmbeddedGraph {
    /// Straight edges between the given vertices.
    pub fn straight(dim: usize, vertices: Vec<Vec<f64>>, edges: &[(usize, usize)]) -> Result<Self> {
        let edges = edges
            .iter()
            .map(|&(a, b)| {
                let path = vec![
                    vertices.get(a).cloned().unwrap_or_default(),
                    vertices.get(b).cloned().unwrap_or_default(),
                ];
                EmbeddedEdge { a, b, path }
            })
            .collect();
        let g = Self { dim, vertices, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(EmbeddingError::Invalid(s));
        if let Some(i) = self.vertices.iter().position(|v| v.len() != self.dim) {
            return bad(format!("vertex {i} has wrong dimension"));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.a >= self.vertices.len() || e.b >= self.vertices.len() {
                return bad(format!("edge {i} references a missing vertex"));
            }
            if e.path.len() < 2 || e.path.iter().any(|p| p.len() != self.dim) {
                return bad(format!("edge {i} has a malformed polyline"));
            }
            if dist(&e.path[0], &self.vertices[e.a]) > ENDPOINT_TOL
                || dist(e.path.last().unwrap(), &self.vertices[e.b]) > ENDPOINT_TOL
            {
                return bad(format!("edge {i} polyline does not end at its vertices"));
            }
            if e.path.windows(2).map(|w| dist(&w[0], &w[1])).sum::<f64>() <= 0.0 {
                return bad(format!("edge {i} has zero length"));
            }
            if e.path.iter().flatten().any(|x| !x.is_finite()) {
                return bad(format!("edge {i} has non-finite coordinates"));
            }
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.edges
            .iter()
            .flat_map(|e| e.path.windows(2).map(|w| dist(&w[0], &w[1])))
            .sum()
    }

    /// Coordinate-wise bounding box of all vertices and waypoints.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.vertices.iter().chain(self.edges.iter().flat_map(|e| e.path.iter())) {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Applies `x -> s * R x + t` to every point.
    pub fn transform(&self, rot: &[Vec<f64>], scale: f64, shift: &[f64]) -> Self {
        let f = |p: &Vec<f64>| -> Vec<f64> {
            (0..self.dim)
                .map(|i| scale * rot[i].iter().zip(p).map(|(a, b)| a * b).sum::<f64>() + shift[i])
                .collect()
        };
        Self {
            dim: self.dim,
            vertices: self.vertices.iter().map(f).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EmbeddedEdge {
                    a: e.a,
                    b: e.b,
                    path: e.path.iter().map(f).collect(),
                })
                .collect(),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Distance from `x` to the segment `[p, q]`.
pub fn point_segment_distance(x: &[f64], p: &[f64], q: &[f64]) -> f64 {
    let mut dd = 0.0;
    let mut dx = 0.0;
    for k in 0..x.len() {
        let d = q[k] - p[k];
        dd += d * d;
        dx += d * (x[k] - p[k]);
    }
    let t = if dd > 0.0 { (dx / dd).clamp(0.0, 1.0) } else { 0.0 };
    let mut s = 0.0;
    for k in 0..x.len() {
        let c = p[k] + t * (q[k] - p[k]) - x[k];
        s += c * c;
    }
    s.sqrt()
}

/// Minimum distance between segments `[p1, q1]` and `[p2, q2]` by clamped
/// minimization of the two-parameter quadratic. Point segments are allowed.
pub fn segment_distance(p1: &[f64], q1: &[f64], p2: &[f64], q2: &[f64]) -> f64 {
    let n = p1.len();
    let (mut a, mut e, mut f, mut c, mut b) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 0..n {
        let d1 = q1[k] - p1[k];
        let d2 = q2[k] - p2[k];
        let r = p1[k] - p2[k];
        a += d1 * d1;
        e += d2 * d2;
        f += d2 * r;
        c += d1 * r;
        b += d1 * d2;
    }
    let (s, t);
    if a <= 0.0 && e <= 0.0 {
        (s, t) = (0.0, 0.0);
    } else if a <= 0.0 {
        (s, t) = (0.0, (f / e).clamp(0.0, 1.0));
    } else if e <= 0.0 {
        (s, t) = ((-c / a).clamp(0.0, 1.0), 0.0);
    } else {
        let denom = a * e - b * b;
        let mut s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
        let mut t0 = (b * s0 + f) / e;
        if t0 < 0.0 {
            t0 = 0.0;
            s0 = (-c / a).clamp(0.0, 1.0);
        } else if t0 > 1.0 {
            t0 = 1.0;
            s0 = ((b - c) / a).clamp(0.0, 1.0);
        }
        (s, t) = (s0, t0);
    }
    let mut sum = 0.0;
    for k in 0..n {
        let x = p1[k] + s * (q1[k] - p1[k]) - p2[k] - t * (q2[k] - p2[k]);
        sum += x * x;
    }
    sum.sqrt()
}
