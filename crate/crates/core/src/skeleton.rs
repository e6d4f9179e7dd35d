//! 1-skeleton graphs, edge expansion and the spectral sandwich.
//!
//! The Cheeger constant here is the unweighted edge expansion
//! `min |E(A, A^c)| / min(|A|, |A^c|)` of the graph, a proxy for the
//! isoperimetric constant of the underlying space.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::voronoi::GoodTriangulation;

/// Largest vertex count for exhaustive cut enumeration.
pub const EXACT_LIMIT: usize = 22;
/// Residual tolerance for the Lanczos eigenvalue.
pub const EIGEN_TOL: f64 = 1e-8;
/// Graphs up to this size use a dense eigensolver.
const DENSE_LIMIT: usize = 200;

#[derive(Debug, Error)]
pub enum SkeletonError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {0}-{1} references a vertex >= {2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("vertex {vertex} has degree {degree} above the declared bound {bound}")]
    DegreeTooLarge { vertex: usize, degree: usize, bound: usize },
    #[error("{0} vertices exceeds the exact limit of {EXACT_LIMIT}; use the spectral estimate")]
    TooLarge(usize),
    #[error("graph needs at least two vertices")]
    TooSmall,
    #[error("could not sample a simple {degree}-regular graph on {n} vertices")]
    RegularSampling { n: usize, degree: usize },
    #[error("Lanczos did not reach residual {EIGEN_TOL:e} (got {0:e})")]
    NoConvergence(f64),
}

pub type Result<T> = std::result::Result<T, SkeletonError>;

#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonGraph {
    n: usize,
    /// Normalized `(a, b)` with `a < b`, sorted.
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    pub lengths: Option<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
}

impl SkeletonGraph {
    /// Rejects self-loops and duplicate edges.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(SkeletonError::SelfLoop(a));
            }
            if a >= n || b >= n {
                return Err(SkeletonError::VertexOutOfRange(a, b, n));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(SkeletonError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &norm {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Ok(Self {
            n,
            edges: norm,
            adj,
            lengths: None,
            weights: None,
        })
    }

    pub fn with_max_degree(self, bound: usize) -> Result<Self> {
        if let Some((v, l)) = self.adj.iter().enumerate().find(|(_, l)| l.len() > bound) {
            return Err(SkeletonError::DegreeTooLarge {
                vertex: v,
                degree: l.len(),
                bound,
            });
        }
        Ok(self)
    }

    pub fn complete(m: usize) -> Self {
        let e: Vec<_> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
        Self::new(m, &e).expect("complete graph is simple")
    }

    pub fn cycle(m: usize) -> Self {
        let e: Vec<_> = (0..m).map(|a| (a, (a + 1) % m)).collect();
        Self::new(m, &e).expect("cycle of length >= 3 is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(|l| l.len()).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|l| l.len()).max().unwrap_or(0)
    }

    /// Component label per vertex, labels in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Number of edges with exactly one endpoint in `side`.
    pub fn cut_size(&self, side: &[bool]) -> usize {
        self.edges.iter().filter(|(a, b)| side[*a] != side[*b]).count()
    }

    /// Graph with vertices renamed by `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let e: Vec<_> = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        Self::new(self.n, &e).expect("relabeling preserves simplicity")
    }

    /// Combinatorial Laplacian `D - A`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for (v, nb) in self.adj.iter().enumerate() {
            l[(v, v)] = nb.len() as f64;
            for &w in nb {
                l[(v, w)] = -1.0;
            }
        }
        l
    }

    fn laplacian_apply(&self, x: &[f64], out: &mut [f64]) {
        for (v, nb) in self.adj.iter().enumerate() {
            let mut s = nb.len() as f64 * x[v];
            for &w in nb {
                s -= x[w];
            }
            out[v] = s;
        }
    }
}

/// Vertices and edge orbits of a triangulation, with geodesic edge lengths.
pub fn extract_skeleton(t: &GoodTriangulation) -> SkeletonGraph {
    let mut pairs: Vec<((usize, usize), f64)> = Vec::new();
    if let Some(edges) = t.simplices.get(1) {
        for e in edges {
            let (a, b) = (e.vertices[0], e.vertices[1]);
            let (top, mask) = e.origin;
            let idx: Vec<usize> = (0..=t.dim).filter(|i| mask >> i & 1 == 1).collect();
            let len = t.top_point(top, idx[0]).dist(&t.top_point(top, idx[1]));
            pairs.push(((a.min(b), a.max(b)), len));
        }
    }
    pairs.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
    // distinct edge orbits may join the same pair of vertex orbits
    pairs.dedup_by(|x, y| x.0 == y.0);
    let edges: Vec<_> = pairs.iter().map(|p| p.0).collect();
    let mut g = SkeletonGraph::new(t.vertices.len(), &edges).expect("deduplicated edges between distinct vertices");
    g.lengths = Some(pairs.iter().map(|p| p.1).collect());
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheegerMethod {
    ExactBruteforce,
    Spectral,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheegerEstimate {
    pub lower: f64,
    pub upper: f64,
    pub method: CheegerMethod,
    /// Smaller side of an optimal cut (exact), or a disconnected component.
    pub witness: Option<Vec<usize>>,
    /// Second Laplacian eigenvalue (spectral).
    pub lambda2: Option<f64>,
    /// Always true: graph edge expansion, not the continuous constant.
    pub graph_proxy: bool,
}

/// Exact edge expansion by Gray-code enumeration of all cuts.
pub fn cheeger_exact(g: &SkeletonGraph) -> Result<CheegerEstimate> {
    let n = g.n;
    if n > EXACT_LIMIT {
        return Err(SkeletonError::TooLarge(n));
    }
    if n < 2 {
        return Err(SkeletonError::TooSmall);
    }
    let nb: Vec<u32> = g.adj.iter().map(|l| l.iter().fold(0u32, |m, &w| m | 1 << w)).collect();
    let deg: Vec<i64> = g.adj.iter().map(|l| l.len() as i64).collect();
    // vertex n-1 stays outside A, so each cut is visited once
    let free = n - 1;
    let high = free.min(6);
    let low = free - high;
    let best = (0u32..1 << high)
        .into_par_iter()
        .map(|h| {
            let base = h << low;
            let mut set = base;
            let mut cut: i64 = (0..n)
                .filter(|&v| set >> v & 1 == 1)
                .map(|v| (nb[v] & !set).count_ones() as i64)
                .sum();
            let mut best: Option<(i64, i64, u32)> = None;
            let consider = |set: u32, cut: i64, best: &mut Option<(i64, i64, u32)>| {
                let a = set.count_ones() as i64;
                if a == 0 {
                    return;
                }
                let m = a.min(n as i64 - a);
                let cand = (cut, m, set);
                if best.map_or(true, |b| better(cand, b)) {
                    *best = Some(cand);
                }
            };
            consider(set, cut, &mut best);
            for i in 1u32..1 << low {
                let v = i.trailing_zeros() as usize;
                let bit = 1u32 << v;
                if set & bit == 0 {
                    cut += deg[v] - 2 * (nb[v] & set).count_ones() as i64;
                    set |= bit;
                } else {
                    set &= !bit;
                    cut -= deg[v] - 2 * (nb[v] & set).count_ones() as i64;
                }
                consider(set, cut, &mut best);
            }
            best
        })
        .reduce(|| None, |a, b| match (a, b) {
            (Some(x), Some(y)) => Some(if better(y, x) { y } else { x }),
            (x, None) => x,
            (None, y) => y,
        })
        .expect("at least one nonempty proper subset");
    let (cut, m, set) = best;
    let h = cut as f64 / m as f64;
    let inside: Vec<usize> = (0..n).filter(|&v| set >> v & 1 == 1).collect();
    let witness = if inside.len() as i64 == m {
        inside
    } else {
        (0..n).filter(|&v| set >> v & 1 == 0).collect()
    };
    Ok(CheegerEstimate {
        lower: h,
        upper: h,
        method: CheegerMethod::ExactBruteforce,
        witness: Some(witness),
        lambda2: None,
        graph_proxy: true,
    })
}

/// Smaller ratio `cut/m` first, then smaller mask.
fn better(a: (i64, i64, u32), b: (i64, i64, u32)) -> bool {
    let (l, r) = (a.0 * b.1, b.0 * a.1);
    l < r || (l == r && a.2 < b.2)
}

/// Second-smallest Laplacian eigenvalue of a connected graph.
pub fn lambda2(g: &SkeletonGraph) -> Result<f64> {
    if g.n <= DENSE_LIMIT {
        let e = SymmetricEigen::new(g.laplacian());
        let mut v: Vec<f64> = e.eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        return Ok(v.get(1).copied().unwrap_or(0.0));
    }
    lanczos_lambda2(g)
}

/// Lanczos with full reorthogonalization on the complement of constants.
pub fn lanczos_lambda2(g: &SkeletonGraph) -> Result<f64> {
    let n = g.n;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let ones = 1.0 / (n as f64).sqrt();
    let project = |x: &mut Vec<f64>| {
        let s: f64 = x.iter().sum::<f64>() * ones;
        for v in x.iter_mut() {
            *v -= s * ones;
        }
    };
    let normalize = |x: &mut Vec<f64>| {
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in x.iter_mut() {
            *v /= nrm;
        }
        nrm
    };
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    project(&mut q);
    normalize(&mut q);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let (mut alpha, mut beta): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let max_steps = n.saturating_sub(1).min(600);
    let mut w = vec![0.0; n];
    let mut last_res = f64::INFINITY;
    for k in 0..max_steps {
        g.laplacian_apply(&basis[k], &mut w);
        let a: f64 = w.iter().zip(&basis[k]).map(|(x, y)| x * y).sum();
        alpha.push(a);
        let mut r = w.clone();
        for _ in 0..2 {
            project(&mut r);
            for b in &basis {
                let c: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let bnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let m = alpha.len();
        if m >= 5 && (m % 5 == 0 || bnorm < 1e-12 || k + 1 == max_steps) {
            let mut t = DMatrix::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alpha[i];
                if i + 1 < m {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let e = SymmetricEigen::new(t);
            let (imin, theta) = e
                .eigenvalues
                .iter()
                .copied()
                .enumerate()
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("nonempty");
            let res = (bnorm * e.eigenvectors[(m - 1, imin)]).abs();
            last_res = res;
            if res < EIGEN_TOL * theta.abs().max(1.0) || bnorm < 1e-12 {
                return Ok(theta);
            }
        }
        if bnorm < 1e-12 {
            break;
        }
        beta.push(bnorm);
        for v in r.iter_mut() {
            *v /= bnorm;
        }
        basis.push(r);
    }
    Err(SkeletonError::NoConvergence(last_res))
}

/// `lambda2 / 2 <= h <= sqrt(2 d_max lambda2)`; zero with a component witness if disconnected.
pub fn cheeger_spectral(g: &SkeletonGraph) -> Result<CheegerEstimate> {
    if g.n < 2 {
        return Err(SkeletonError::TooSmall);
    }
    let comp = g.components();
    if comp.iter().any(|&c| c != 0) {
        return Ok(CheegerEstimate {
            lower: 0.0,
            upper: 0.0,
            method: CheegerMethod::Spectral,
            witness: Some((0..g.n).filter(|&v| comp[v] == 0).collect()),
            lambda2: Some(0.0),
            graph_proxy: true,
        });
    }
    let l2 = lambda2(g)?.max(0.0);
    Ok(CheegerEstimate {
        lower: l2 / 2.0,
        upper: (2.0 * g.max_degree() as f64 * l2).sqrt(),
        method: CheegerMethod::Spectral,
        witness: None,
        lambda2: Some(l2),
        graph_proxy: true,
    })
}

/// `(h/(h+1) * vol)^{N/(N-1)}`; the unknown constant factor is excluded.
pub fn theorem1_rhs(h: f64, vol: f64, big_n: usize) -> f64 {
    let ratio = if h.is_infinite() { 1.0 } else { h / (h + 1.0) };
    let e = big_n as f64 / (big_n as f64 - 1.0);
    (ratio * vol).powf(e)
}

/// Uniform simple `degree`-regular graph by the pairing model with restarts.
pub fn random_regular(n: usize, degree: usize, seed: u64) -> Result<SkeletonGraph> {
    if n * degree % 2 == 1 || degree >= n {
        return Err(SkeletonError::RegularSampling { n, degree });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(degree)).collect();
        stubs.shuffle(&mut rng);
        let edges: Vec<(usize, usize)> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();
        if let Ok(g) = SkeletonGraph::new(n, &edges) {
            return Ok(g);
        }
    }
    Err(SkeletonError::RegularSampling { n, degree })
}

/// Random connected simple `degree`-regular graph (resampled until connected).
pub fn random_connected_regular(n: usize, degree: usize, seed: u64) -> Result<SkeletonGraph> {
    for k in 0..100u64 {
        let g = random_regular(n, degree, seed.wrapping_add(k.wrapping_mul(0x9e37_79b9)))?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(SkeletonError::RegularSampling { n, degree })
}
