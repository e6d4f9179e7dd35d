use hypthick::constructions::triangle_group;
use hypthick::polytope::Polytope;
use hypthick::skeleton::*;
use hypthick::voronoi::triangulation::flags;
use hypthick::voronoi::{triangulate, PipelineParams};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Plain enumeration over all nonempty proper subsets, no Gray code.
fn expansion_oracle(g: &SkeletonGraph) -> f64 {
    let n = g.vertex_count();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) - 1 {
        let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        let a = side.iter().filter(|&&s| s).count();
        let h = g.cut_size(&side) as f64 / a.min(n - a) as f64;
        best = best.min(h);
    }
    best
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> SkeletonGraph {
    let e: Vec<_> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|_| rng.gen::<f64>() < p)
        .collect();
    SkeletonGraph::new(n, &e).unwrap()
}

#[test]
fn exact_matches_enumeration_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.gen_range(2..=12);
        let g = random_graph(&mut rng, n, 0.4);
        let e = cheeger_exact(&g).unwrap();
        assert_eq!(e.lower, expansion_oracle(&g));
        assert_eq!(e.lower, e.upper);
        let w = e.witness.unwrap();
        let side: Vec<bool> = (0..n).map(|v| w.contains(&v)).collect();
        assert!(w.len() * 2 <= n);
        assert_eq!(g.cut_size(&side) as f64 / w.len() as f64, e.lower);
    }
}

#[test]
fn complete_graph_sandwich() {
    for m in 2..=10 {
        let g = SkeletonGraph::complete(m);
        let exact = cheeger_exact(&g).unwrap().lower;
        assert_eq!(exact, m.div_ceil(2) as f64);
        let s = cheeger_spectral(&g).unwrap();
        assert!((s.lambda2.unwrap() - m as f64).abs() < 1e-9);
        assert!(s.lower <= exact + 1e-12 && exact <= s.upper + 1e-12);
    }
}

#[test]
fn spectral_sandwich_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.gen_range(2..=20);
        let p = rng.gen_range(0.15..0.8);
        let g = random_graph(&mut rng, n, p);
        let exact = cheeger_exact(&g).unwrap().lower;
        let s = cheeger_spectral(&g).unwrap();
        assert!(s.lower <= exact + 1e-9 && exact <= s.upper + 1e-9, "{} {exact} {}", s.lower, s.upper);
    }
}

#[test]
fn disconnected_is_zero() {
    let g = SkeletonGraph::new(4, &[(0, 1), (2, 3)]).unwrap();
    let s = cheeger_spectral(&g).unwrap();
    assert_eq!((s.lower, s.upper), (0.0, 0.0));
    assert_eq!(s.witness.unwrap(), vec![0, 1]);
    assert_eq!(cheeger_exact(&g).unwrap().lower, 0.0);
}

#[test]
fn regular_expander_gap() {
    let g = random_connected_regular(1024, 4, 1).unwrap();
    assert!(g.degrees().iter().all(|&d| d == 4));
    let s = cheeger_spectral(&g).unwrap();
    // random 4-regular graphs have lambda2 close to 4 - 2 sqrt(3)
    let l2 = s.lambda2.unwrap();
    assert!(l2 > 0.3 && l2 < 0.6, "{l2}");
}

proptest! {
    #[test]
    fn exact_is_isomorphism_invariant(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=12);
        let g = random_graph(&mut rng, n, 0.5);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        prop_assert_eq!(cheeger_exact(&g).unwrap().lower, cheeger_exact(&g.relabel(&perm)).unwrap().lower);
    }

    #[test]
    fn adding_an_edge_never_decreases(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=12);
        let g = random_graph(&mut rng, n, 0.4);
        let missing: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|e| !g.edges().contains(e))
            .collect();
        if let Some(&extra) = missing.choose(&mut rng) {
            let mut e = g.edges().to_vec();
            e.push(extra);
            let g2 = SkeletonGraph::new(n, &e).unwrap();
            prop_assert!(cheeger_exact(&g2).unwrap().lower >= cheeger_exact(&g).unwrap().lower);
        }
    }
}

#[test]
fn subdivided_triangle_skeleton() {
    let mut p = Polytope::bounding_simplex(2, 10.0, 1e-10);
    p.clip(vec![0.0, -1.0], 0.5, Some(0)).unwrap();
    p.clip(vec![1.0, 1.0], 0.5, Some(1)).unwrap();
    p.clip(vec![-1.0, 0.2], 0.5, Some(2)).unwrap();
    let faces = p.faces();
    let offset: Vec<usize> = faces.iter().scan(0, |s, f| {
        let o = *s;
        *s += f.len();
        Some(o)
    }).collect();
    let mut edges = Vec::new();
    for chain in flags(&faces) {
        for a in 0..chain.len() {
            for b in a + 1..chain.len() {
                let (x, y) = (offset[a] + chain[a], offset[b] + chain[b]);
                if !edges.contains(&(x, y)) {
                    edges.push((x, y));
                }
            }
        }
    }
    let g = SkeletonGraph::new(7, &edges).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (7, 12));

    let k3 = SkeletonGraph::complete(3);
    assert_eq!((k3.vertex_count(), k3.edge_count()), (3, 3));
}

#[test]
fn skeleton_of_237_matches_degrees() {
    let t = triangle_group(2, 3, 7);
    let mut p = PipelineParams::new(0.05, 1);
    p.basepoint = Some(t.incenter.clone());
    let out = triangulate(&t.spec, &p).unwrap();
    let tri = &out.triangulation;
    let g = extract_skeleton(tri);
    assert_eq!(g.vertex_count(), tri.vertices.len());
    // recount neighbor orbits from the top simplices alone
    let mut nbrs = vec![Vec::new(); tri.vertices.len()];
    for top in &tri.top {
        for &(a, _) in &top.vertices {
            for &(b, _) in &top.vertices {
                if a != b {
                    nbrs[a].push(b);
                }
            }
        }
    }
    let recount: Vec<usize> = nbrs
        .into_iter()
        .map(|mut x| {
            x.sort_unstable();
            x.dedup();
            x.len()
        })
        .collect();
    assert_eq!(g.degrees(), recount);
    assert_eq!(g.degrees(), tri.degrees());
    assert!(g.lengths.as_ref().unwrap().iter().all(|&l| l > 0.0));
    assert!(g.is_connected());
}
