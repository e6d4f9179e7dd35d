//! Grid-and-track thick embeddings of bounded-degree graphs.
//!
//! Vertices sit on a square grid in the plate `x_N = 0`. Each edge rises from
//! its first endpoint to a track level, steps into the lane grid (coordinates
//! offset by half a spacing), runs along lanes axis by axis, steps back out
//! and descends onto its second endpoint. Same-level routes of disjoint edges
//! are kept apart by first-fit level assignment.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::thickness::{verify_thickness, ThicknessReport};
use super::{segment_distance, EmbeddedEdge, EmbeddedGraph, EmbeddingError, Result};
use crate::skeleton::SkeletonGraph;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct KbParams {
    /// Grid spacing of vertices in the plate.
    pub spacing: f64,
    /// Offset of lanes from vertex rows; half the spacing.
    pub lane: f64,
    /// Height between consecutive track levels.
    pub level_gap: f64,
    /// Minimum plate distance between same-level routes of disjoint edges.
    pub clearance: f64,
    /// Placement reshuffles tried after the first failure.
    pub retries: usize,
}

impl Default for KbParams {
    fn default() -> Self {
        Self {
            spacing: 8.0,
            lane: 4.0,
            level_gap: 3.0,
            clearance: 2.5,
            retries: 8,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KbEmbedding {
    pub graph: EmbeddedGraph,
    pub levels: usize,
    pub plate_side: usize,
    pub attempts: usize,
    /// Volume of the bounding box padded by 1.
    pub box_volume: f64,
    /// `box_volume / |V|^{N/(N-1)}`.
    pub box_constant: f64,
    pub thickness: ThicknessReport,
}

pub fn kb_embed(g: &SkeletonGraph, big_n: usize, seed: u64) -> Result<KbEmbedding> {
    kb_embed_with(g, big_n, seed, &KbParams::default())
}

pub fn kb_embed_with(g: &SkeletonGraph, big_n: usize, seed: u64, params: &KbParams) -> Result<KbEmbedding> {
    if big_n < 3 {
        return Err(EmbeddingError::BadDimension(big_n));
    }
    let n = g.vertex_count();
    if n == 0 {
        return Err(EmbeddingError::Empty);
    }
    let m = big_n - 1;
    let side = plate_side(n, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots: Vec<usize> = (0..n).collect();
    let mut last = String::new();
    for attempt in 0..=params.retries {
        if attempt > 0 {
            slots.shuffle(&mut rng);
        }
        let plate: Vec<Vec<f64>> = slots
            .iter()
            .map(|&s| {
                let mut r = s;
                (0..m)
                    .map(|_| {
                        let d = r % side;
                        r /= side;
                        d as f64 * params.spacing
                    })
                    .collect()
            })
            .collect();
        let (graph, levels) = route_all(g, &plate, params);
        let report = verify_thickness(&graph);
        if report.pass {
            let (lo, hi) = graph.bounding_box();
            let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a + 2.0).product();
            return Ok(KbEmbedding {
                levels,
                plate_side: side,
                attempts: attempt + 1,
                box_volume,
                box_constant: box_volume / (n as f64).powf(big_n as f64 / m as f64),
                graph,
                thickness: report,
            });
        }
        last = format!(
            "{} violations, closest {:?}",
            report.violation_count,
            report.violations.first()
        );
    }
    Err(EmbeddingError::RoutingFailed {
        attempts: params.retries + 1,
        diagnostics: last,
    })
}

/// Smallest `k` with `k^m >= n`.
fn plate_side(n: usize, m: usize) -> usize {
    let mut k = (n as f64).powf(1.0 / m as f64).round().max(1.0) as usize;
    while k.pow(m as u32) < n {
        k += 1;
    }
    while k > 1 && (k - 1).pow(m as u32) >= n {
        k -= 1;
    }
    k
}

/// Waypoints in the plate, excluding the vertical legs.
fn plate_route(xu: &[f64], xv: &[f64], lane: f64) -> Vec<Vec<f64>> {
    let m = xu.len();
    let mut p = xu.to_vec();
    let mut pts = vec![p.clone()];
    for a in 0..m {
        p[a] += lane;
        pts.push(p.clone());
    }
    for a in 0..m {
        if p[a] != xv[a] + lane {
            p[a] = xv[a] + lane;
            pts.push(p.clone());
        }
    }
    for a in 0..m {
        p[a] -= lane;
        pts.push(p.clone());
    }
    pts
}

fn route_all(g: &SkeletonGraph, plate: &[Vec<f64>], params: &KbParams) -> (EmbeddedGraph, usize) {
    let m = plate[0].len();
    let edges = g.edges();
    let routes: Vec<Vec<Vec<f64>>> = edges
        .iter()
        .map(|&(a, b)| plate_route(&plate[a], &plate[b], params.lane))
        .collect();
    let l1 = |e: usize| -> f64 {
        let (a, b) = edges[e];
        plate[a].iter().zip(&plate[b]).map(|(x, y)| (x - y).abs()).sum()
    };
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&x, &y| l1(y).total_cmp(&l1(x)).then(x.cmp(&y)));

    // plate cells -> (level, edge, piece start)
    let cell = params.spacing;
    let mut grid: HashMap<Vec<i64>, Vec<(usize, usize, usize)>> = HashMap::new();
    let mut level = vec![0usize; edges.len()];
    let cells_of = |p: &[f64], q: &[f64]| -> Vec<Vec<i64>> {
        let lo: Vec<i64> = (0..m).map(|k| ((p[k].min(q[k]) - params.clearance) / cell).floor() as i64).collect();
        let hi: Vec<i64> = (0..m).map(|k| ((p[k].max(q[k]) + params.clearance) / cell).floor() as i64).collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            out.push(cur.clone());
            let mut k = 0;
            while k < m {
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = lo[k];
                k += 1;
            }
            if k == m {
                return out;
            }
        }
    };
    for &e in &order {
        let (a, b) = edges[e];
        let r = &routes[e];
        let mut blocked: Vec<usize> = Vec::new();
        for w in r.windows(2) {
            for c in cells_of(&w[0], &w[1]) {
                for &(lv, f, i) in grid.get(&c).map_or(&[][..], |v| v.as_slice()) {
                    let (fa, fb) = edges[f];
                    if fa == a || fa == b || fb == a || fb == b {
                        continue;
                    }
                    let s = &routes[f];
                    if segment_distance(&w[0], &w[1], &s[i], &s[i + 1]) < params.clearance {
                        blocked.push(lv);
                    }
                }
            }
        }
        blocked.sort_unstable();
        blocked.dedup();
        let lv = (1..).find(|l| blocked.binary_search(l).is_err()).expect("unbounded levels");
        level[e] = lv;
        for (i, w) in r.windows(2).enumerate() {
            for c in cells_of(&w[0], &w[1]) {
                grid.entry(c).or_default().push((lv, e, i));
            }
        }
    }

    let lift = |p: &[f64], z: f64| -> Vec<f64> {
        let mut v = p.to_vec();
        v.push(z);
        v
    };
    let vertices: Vec<Vec<f64>> = plate.iter().map(|p| lift(p, 0.0)).collect();
    let out_edges = edges
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            let z = level[e] as f64 * params.level_gap;
            let mut path = vec![vertices[a].clone()];
            path.extend(routes[e].iter().map(|p| lift(p, z)));
            path.push(vertices[b].clone());
            EmbeddedEdge { a, b, path }
        })
        .collect();
    let levels = level.iter().copied().max().unwrap_or(0);
    (
        EmbeddedGraph {
            dim: m + 1,
            vertices,
            edges: out_edges,
        },
        levels,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plate_sides() {
        assert_eq!(plate_side(1, 2), 1);
        assert_eq!(plate_side(64, 2), 8);
        assert_eq!(plate_side(65, 2), 9);
        assert_eq!(plate_side(27, 3), 3);
    }

    #[test]
    fn route_shape() {
        let r = plate_route(&[0.0, 0.0], &[16.0, 8.0], 4.0);
        assert_eq!(r.len(), 7);
        assert_eq!(r.last().unwrap(), &vec![16.0, 8.0]);
    }
}
