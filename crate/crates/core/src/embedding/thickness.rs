//! Thickness verification: distinct vertices, disjoint edges and
//! non-incident vertex/edge pairs must all be at distance at least 2.

use rayon::prelude::*;
use serde::Serialize;

use super::index::{PieceRef, Pieces, SegmentIndex};
use super::{dist, segment_distance, EmbeddedGraph};

/// Required separation for unit neighborhoods to be disjoint.
pub const THICKNESS: f64 = 2.0;
/// Violations kept in a report.
pub const MAX_WITNESSES: usize = 64;
/// Cell size of the first hashing round.
pub const HASH_CELL: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    VertexVertex,
    EdgeEdge,
    VertexEdge,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairWitness {
    pub kind: PairKind,
    pub a: PieceRef,
    pub b: PieceRef,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThicknessReport {
    pub pass: bool,
    /// `None` when the family has no pairs.
    pub min_vertex_vertex: Option<f64>,
    pub min_edge_edge: Option<f64>,
    pub min_vertex_edge: Option<f64>,
    /// Closest pair of each nonempty family.
    pub closest: Vec<PairWitness>,
    /// Closest violating pairs, at most `MAX_WITNESSES`.
    pub violations: Vec<PairWitness>,
    pub violation_count: usize,
    /// Hashing rounds needed to pin down every minimum.
    pub rounds: usize,
}

impl ThicknessReport {
    pub fn min_distance(&self) -> Option<f64> {
        [self.min_vertex_vertex, self.min_edge_edge, self.min_vertex_edge]
            .into_iter()
            .flatten()
            .reduce(f64::min)
    }
}

fn classify(g: &EmbeddedGraph, a: PieceRef, b: PieceRef) -> Option<PairKind> {
    use PieceRef::*;
    match (a, b) {
        (Vertex(v), Vertex(w)) => (v != w).then_some(PairKind::VertexVertex),
        (Vertex(v), Segment { edge, .. }) | (Segment { edge, .. }, Vertex(v)) => {
            let e = &g.edges[edge];
            (v != e.a && v != e.b).then_some(PairKind::VertexEdge)
        }
        (Segment { edge: e, .. }, Segment { edge: f, .. }) => {
            let (e, f) = (&g.edges[e], &g.edges[f]);
            (e.a != f.a && e.a != f.b && e.b != f.a && e.b != f.b).then_some(PairKind::EdgeEdge)
        }
    }
}

type Best = Option<(f64, u32, u32)>;

#[derive(Default)]
struct Acc {
    best: [Best; 3],
    violations: Vec<(u32, u32, f64)>,
}

fn improve(slot: &mut Best, cand: (f64, u32, u32)) {
    let better = match slot {
        None => true,
        Some(b) => cand.0.total_cmp(&b.0).then((cand.1, cand.2).cmp(&(b.1, b.2))).is_lt(),
    };
    if better {
        *slot = Some(cand);
    }
}

impl Acc {
    fn visit(&mut self, g: &EmbeddedGraph, pieces: &Pieces, i: u32, j: u32) {
        let (i, j) = (i.min(j), i.max(j));
        let (a, b) = (pieces.owner[i as usize], pieces.owner[j as usize]);
        let Some(kind) = classify(g, a, b) else { return };
        let d = segment_distance(pieces.p(i as usize), pieces.q(i as usize), pieces.p(j as usize), pieces.q(j as usize));
        improve(&mut self.best[kind as usize], (d, i, j));
        if d < THICKNESS {
            self.violations.push((i, j, d));
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        for k in 0..3 {
            if let Some(c) = other.best[k] {
                improve(&mut self.best[k], c);
            }
        }
        self.violations.extend(other.violations);
        self
    }
}

/// Whether each family has at least one pair.
fn families_present(g: &EmbeddedGraph) -> [bool; 3] {
    let n = g.vertices.len();
    let m = g.edges.len();
    let vv = n >= 2;
    let ve = g.edges.iter().any(|e| n > if e.a == e.b { 1 } else { 2 });
    let mut deg = vec![0usize; n];
    let mut pairs = std::collections::HashMap::new();
    for e in &g.edges {
        deg[e.a] += 1;
        if e.b != e.a {
            deg[e.b] += 1;
        }
        *pairs.entry((e.a.min(e.b), e.a.max(e.b))).or_insert(0usize) += 1;
    }
    let sharing_vertex: usize = deg.iter().map(|d| d * d.saturating_sub(1) / 2).sum();
    let sharing_both: usize = pairs
        .iter()
        .filter(|((a, b), _)| a != b)
        .map(|(_, c)| c * c.saturating_sub(1) / 2)
        .sum();
    let total = m * m.saturating_sub(1) / 2;
    let ee = total > sharing_vertex - sharing_both;
    // indexed like PairKind
    [vv, ee, ve]
}

fn finish(g: &EmbeddedGraph, pieces: &Pieces, acc: Acc, rounds: usize) -> ThicknessReport {
    let kinds = [PairKind::VertexVertex, PairKind::EdgeEdge, PairKind::VertexEdge];
    let closest: Vec<PairWitness> = kinds
        .iter()
        .filter_map(|&k| {
            acc.best[k as usize].map(|(d, i, j)| PairWitness {
                kind: k,
                a: pieces.owner[i as usize],
                b: pieces.owner[j as usize],
                distance: d,
            })
        })
        .collect();
    let mut viol = acc.violations;
    viol.sort_by(|x, y| x.2.total_cmp(&y.2).then((x.0, x.1).cmp(&(y.0, y.1))));
    viol.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
    let count = viol.len();
    let violations = viol
        .into_iter()
        .take(MAX_WITNESSES)
        .map(|(i, j, d)| {
            let (a, b) = (pieces.owner[i as usize], pieces.owner[j as usize]);
            PairWitness {
                kind: classify(g, a, b).expect("classified when recorded"),
                a,
                b,
                distance: d,
            }
        })
        .collect();
    let min = |k: PairKind| acc.best[k as usize].map(|b| b.0);
    ThicknessReport {
        pass: count == 0,
        min_vertex_vertex: min(PairKind::VertexVertex),
        min_edge_edge: min(PairKind::EdgeEdge),
        min_vertex_edge: min(PairKind::VertexEdge),
        closest,
        violations,
        violation_count: count,
        rounds,
    }
}

/// Hashed verifier. The first round registers pieces with padding 1 in cells
/// of size 4, which finds every pair closer than 2. Minima above the current
/// reach are resolved by doubling the reach.
pub fn verify_thickness(g: &EmbeddedGraph) -> ThicknessReport {
    let pieces = Pieces::from_graph(g);
    let present = families_present(g);
    let (lo, hi) = pieces.bounds(0.0);
    let diag = if pieces.is_empty() { 0.0 } else { dist(&lo, &hi) };
    let mut reach = THICKNESS;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let idx = SegmentIndex::build(&pieces, reach.max(HASH_CELL), reach / 2.0);
        let acc = (0..idx.cell_count())
            .into_par_iter()
            .fold(Acc::default, |mut acc, c| {
                let ids = idx.group(c);
                for (x, &i) in ids.iter().enumerate() {
                    for &j in &ids[x + 1..] {
                        acc.visit(g, &pieces, i, j);
                    }
                }
                acc
            })
            .reduce(Acc::default, Acc::merge);
        let resolved = (0..3).all(|k| !present[k] || acc.best[k].is_some_and(|b| b.0 < reach));
        if resolved || reach > diag {
            return finish(g, &pieces, acc, rounds);
        }
        reach *= 2.0;
    }
}

/// All-pairs reference verifier.
pub fn verify_thickness_bruteforce(g: &EmbeddedGraph) -> ThicknessReport {
    let pieces = Pieces::from_graph(g);
    let n = pieces.len() as u32;
    let acc = (0..n)
        .into_par_iter()
        .fold(Acc::default, |mut acc, i| {
            for j in i + 1..n {
                acc.visit(g, &pieces, i, j);
            }
            acc
        })
        .reduce(Acc::default, Acc::merge);
    finish(g, &pieces, acc, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_distance() {
        let g = EmbeddedGraph::straight(3, vec![vec![0.0; 3], vec![2.0, 0.0, 0.0]], &[]).unwrap();
        let r = verify_thickness(&g);
        assert!(r.pass);
        assert_eq!(r.min_vertex_vertex, Some(2.0));
        let g = EmbeddedGraph::straight(3, vec![vec![0.0; 3], vec![1.999, 0.0, 0.0]], &[]).unwrap();
        let r = verify_thickness(&g);
        assert!(!r.pass);
        assert_eq!(r.violations[0].a, PieceRef::Vertex(0));
        assert_eq!(r.violations[0].b, PieceRef::Vertex(1));
    }

    #[test]
    fn far_minima_are_exact() {
        let g = EmbeddedGraph::straight(3, vec![vec![0.0; 3], vec![37.0, 0.0, 0.0]], &[]).unwrap();
        let r = verify_thickness(&g);
        assert_eq!(r.min_vertex_vertex, Some(37.0));
        assert!(r.rounds > 1);
    }

    #[test]
    fn family_presence() {
        // path a-b-c has no disjoint edge pair
        let v = vec![vec![0.0; 3], vec![3.0, 0.0, 0.0], vec![6.0, 0.0, 0.0], vec![9.0, 0.0, 0.0]];
        let g = EmbeddedGraph::straight(3, v.clone(), &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(families_present(&g), [true, false, true]);
        let g = EmbeddedGraph::straight(3, v, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(families_present(&g), [true, true, true]);
    }
}
