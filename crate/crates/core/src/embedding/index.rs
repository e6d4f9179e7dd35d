//! Uniform spatial hash over segment pieces.
//!
//! Each piece is cut into chunks no longer than the cell size and registered
//! in every cell its padded chunk box touches. Two pieces closer than twice
//! the padding then share at least one cell. Hash collisions only merge cells.

use serde::Serialize;

use super::{dist, EmbeddedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PieceRef {
    Vertex(usize),
    Segment { edge: usize, index: usize },
}

/// Vertices as point segments and polyline pieces, flattened.
#[derive(Clone, Debug)]
pub struct Pieces {
    pub dim: usize,
    start: Vec<f64>,
    end: Vec<f64>,
    pub owner: Vec<PieceRef>,
}

impl Pieces {
    pub fn from_graph(g: &EmbeddedGraph) -> Self {
        let mut out = Self {
            dim: g.dim,
            start: Vec::new(),
            end: Vec::new(),
            owner: Vec::new(),
        };
        for (v, x) in g.vertices.iter().enumerate() {
            out.push(x, x, PieceRef::Vertex(v));
        }
        for (e, edge) in g.edges.iter().enumerate() {
            for (i, w) in edge.path.windows(2).enumerate() {
                out.push(&w[0], &w[1], PieceRef::Segment { edge: e, index: i });
            }
        }
        out
    }

    fn push(&mut self, p: &[f64], q: &[f64], owner: PieceRef) {
        self.start.extend_from_slice(p);
        self.end.extend_from_slice(q);
        self.owner.push(owner);
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn p(&self, i: usize) -> &[f64] {
        &self.start[i * self.dim..(i + 1) * self.dim]
    }

    pub fn q(&self, i: usize) -> &[f64] {
        &self.end[i * self.dim..(i + 1) * self.dim]
    }

    /// Coordinate box of all pieces, padded.
    pub fn bounds(&self, pad: f64) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for i in 0..self.len() {
            for pt in [self.p(i), self.q(i)] {
                for k in 0..self.dim {
                    lo[k] = lo[k].min(pt[k] - pad);
                    hi[k] = hi[k].max(pt[k] + pad);
                }
            }
        }
        (lo, hi)
    }
}

#[derive(Clone, Debug)]
pub struct SegmentIndex {
    pub cell: f64,
    keys: Vec<u64>,
    starts: Vec<usize>,
    ids: Vec<u32>,
}

fn mix(mut h: u64, c: i64) -> u64 {
    h ^= (c as u64).wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb)
}

fn key(coords: &[i64]) -> u64 {
    coords.iter().fold(0x243f_6a88_85a3_08d3, |h, &c| mix(h, c))
}

impl SegmentIndex {
    pub fn build(pieces: &Pieces, cell: f64, pad: f64) -> Self {
        let n = pieces.dim;
        let mut entries: Vec<(u64, u32)> = Vec::new();
        let mut lo_c = vec![0i64; n];
        let mut hi_c = vec![0i64; n];
        let mut cur = vec![0i64; n];
        for i in 0..pieces.len() {
            let (p, q) = (pieces.p(i), pieces.q(i));
            let chunks = (dist(p, q) / cell).ceil().max(1.0) as usize;
            for j in 0..chunks {
                let (s0, s1) = (j as f64 / chunks as f64, (j + 1) as f64 / chunks as f64);
                for k in 0..n {
                    let a = p[k] + s0 * (q[k] - p[k]);
                    let b = p[k] + s1 * (q[k] - p[k]);
                    lo_c[k] = ((a.min(b) - pad) / cell).floor() as i64;
                    hi_c[k] = ((a.max(b) + pad) / cell).floor() as i64;
                }
                cur.copy_from_slice(&lo_c);
                loop {
                    entries.push((key(&cur), i as u32));
                    let mut k = 0;
                    while k < n {
                        if cur[k] < hi_c[k] {
                            cur[k] += 1;
                            break;
                        }
                        cur[k] = lo_c[k];
                        k += 1;
                    }
                    if k == n {
                        break;
                    }
                }
            }
        }
        entries.sort_unstable();
        entries.dedup();
        let mut keys = Vec::new();
        let mut starts = Vec::new();
        for (i, &(k, _)) in entries.iter().enumerate() {
            if keys.last() != Some(&k) {
                keys.push(k);
                starts.push(i);
            }
        }
        starts.push(entries.len());
        Self {
            cell,
            keys,
            starts,
            ids: entries.into_iter().map(|e| e.1).collect(),
        }
    }

    /// Pieces registered in the cell containing `x`.
    pub fn query(&self, x: &[f64]) -> &[u32] {
        let c: Vec<i64> = x.iter().map(|v| (v / self.cell).floor() as i64).collect();
        match self.keys.binary_search(&key(&c)) {
            Ok(g) => &self.ids[self.starts[g]..self.starts[g + 1]],
            Err(_) => &[],
        }
    }

    pub fn cell_count(&self) -> usize {
        self.keys.len()
    }

    pub fn group(&self, g: usize) -> &[u32] {
        &self.ids[self.starts[g]..self.starts[g + 1]]
    }
}
