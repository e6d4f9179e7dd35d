use std::f64::consts::PI;

use hypthick::constructions::{cyclic_boost, schottky, triangle_group};
use hypthick::domain::dirichlet_domain_auto;
use hypthick::group::enumerate_ball;
use hypthick::hyperbolic::{HyperbolicPoint, LorentzIsometry};
use hypthick::polytope::Polytope;
use hypthick::voronoi::barycenter::{gradient, objective};
use hypthick::voronoi::complex::{build_voronoi, lift_sites};
use hypthick::voronoi::pipeline::PipelineOutput;
use hypthick::voronoi::separated::{build_separated_set, SeparatedSet, SeparatedSetParams};
use hypthick::voronoi::triangulation::{flags, GoodTriangulation};
use hypthick::voronoi::*;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn run_237(eps: f64, seed: u64) -> PipelineOutput {
    let t = triangle_group(2, 3, 7);
    let mut p = PipelineParams::new(eps, seed);
    p.basepoint = Some(t.incenter.clone());
    triangulate(&t.spec, &p).unwrap()
}

fn random_point<R: Rng>(rng: &mut R, scale: f64) -> HyperbolicPoint {
    HyperbolicPoint::from_spatial(&[rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)])
}

/// Rank over GF(2) by elimination on bit rows.
fn rank_gf2(rows: &[Vec<u8>]) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<u8>> = rows.to_vec();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] == 1) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][c] == 1 {
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn end_to_end_237() {
    let out = run_237(0.05, 1);
    let t = &out.triangulation;
    assert!(t.verify_pseudomanifold().ok);
    assert_eq!(t.euler_characteristic(), 2);
    let sing = sample_singular_points(t, 200, out.complex.neighbor_radius, 3);
    let good = check_good(t, &sing).unwrap();
    assert!(good.ok);
    let mut orders: Vec<usize> = good.singular_points.iter().map(|w| w.stabilizer_order).collect();
    orders.sort_unstable();
    assert_eq!(orders, vec![2, 3, 7]);
    for w in &good.singular_points {
        assert_eq!(w.simplex_dim, Some(0));
        assert!(w.nearest_vertex_distance < 1e-8);
    }
    let vol = PI / 21.0;
    assert!((out.volume - vol).abs() < 1e-12);
    let rep = degree_and_count_report(t, &out.complex, 7, vol, 0.1);
    assert!(rep.all_hold, "{:?}", rep.inequalities);
    assert!(out.set.packing.holds && out.set.packing.consistent);
}

#[test]
fn membership_agrees_with_nearest_site() {
    let out = run_237(0.05, 2);
    let c = &out.complex;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut disagree = 0;
    for _ in 0..10_000 {
        let x = out.domain.cell.sample_uniform(&mut rng);
        let near = c.nearest_lift(&x);
        let inside = c.containing_cells(&x, 1e-9);
        let strict: Vec<usize> = inside.iter().copied().filter(|&i| c.violation(i, &x) < -1e-9).collect();
        if !inside.contains(&near) || strict.iter().any(|&i| i != near) {
            disagree += 1;
        }
    }
    assert_eq!(disagree, 0);
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-5;
    for _ in 0..100 {
        let m = rng.gen_range(1..6);
        let vs: Vec<HyperbolicPoint> = (0..m).map(|_| random_point(&mut rng, 1.5)).collect();
        let x = random_point(&mut rng, 1.0);
        let raw = DVector::from_vec(vec![0.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        let v = x.project_tangent(&raw);
        let fd = (objective(&x.exp(&(&v * h)), &vs) - objective(&x.exp(&(&v * -h)), &vs)) / (2.0 * h);
        let g = gradient(&x, &vs);
        let an = hypthick::hyperbolic::lorentz_inner(g.as_slice(), v.as_slice()).unwrap();
        assert!((fd - an).abs() <= 1e-5 * an.abs().max(1e-3), "{fd} vs {an}");
    }
}

/// Coarse grid over spatial coordinates, then compass search.
fn grid_minimizer(vs: &[HyperbolicPoint]) -> HyperbolicPoint {
    let f = |u: &[f64; 2]| objective(&HyperbolicPoint::from_spatial(u), vs);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in vs {
        for i in 0..2 {
            lo[i] = lo[i].min(v.as_slice()[i + 1]);
            hi[i] = hi[i].max(v.as_slice()[i + 1]);
        }
    }
    let k = 40;
    let mut best = ([0.0; 2], f64::INFINITY);
    for a in 0..=k {
        for b in 0..=k {
            let u = [
                lo[0] + (hi[0] - lo[0]) * a as f64 / k as f64,
                lo[1] + (hi[1] - lo[1]) * b as f64 / k as f64,
            ];
            let fu = f(&u);
            if fu < best.1 {
                best = (u, fu);
            }
        }
    }
    let mut step = ((hi[0] - lo[0]).max(hi[1] - lo[1]) / k as f64).max(1e-3);
    while step > 1e-13 {
        let mut moved = false;
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let u = [best.0[0] + dx * step, best.0[1] + dy * step];
            let fu = f(&u);
            if fu < best.1 {
                best = (u, fu);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    HyperbolicPoint::from_spatial(&best.0)
}

#[test]
fn barycenter_matches_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..30 {
        let vs: Vec<HyperbolicPoint> = (0..3).map(|_| random_point(&mut rng, 1.2)).collect();
        let b = barycenter(&vs).unwrap();
        let o = grid_minimizer(&vs);
        assert!(b.dist(&o) < 1e-6, "{}", b.dist(&o));
        let r = barycenter_with_stats(&vs).unwrap();
        assert!(r.grad_norm < 1e-8);
    }
}

#[test]
fn barycenter_symmetry_fixtures() {
    let o = HyperbolicPoint::origin(2);
    for k in 2..9 {
        let p = HyperbolicPoint::from_spatial(&[0.9, -0.2]);
        let pts: Vec<_> = (0..k)
            .map(|i| LorentzIsometry::rotation(2, 1, 2, 2.0 * PI * i as f64 / k as f64).apply(&p))
            .collect();
        assert!(barycenter(&pts).unwrap().dist(&o) < 1e-8);
    }
    // equivariance under an isometry
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let vs: Vec<HyperbolicPoint> = (0..4).map(|_| random_point(&mut rng, 1.0)).collect();
    let g = LorentzIsometry::boost(2, 1, 0.8).compose(&LorentzIsometry::rotation(2, 1, 2, 0.3));
    let moved: Vec<_> = vs.iter().map(|v| g.apply(v)).collect();
    assert!(g.apply(&barycenter(&vs).unwrap()).dist(&barycenter(&moved).unwrap()) < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn objective_is_convex_along_geodesics(seed in 0u64..10_000, s in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vs: Vec<HyperbolicPoint> = (0..3).map(|_| random_point(&mut rng, 1.0)).collect();
        let x = random_point(&mut rng, 0.5);
        let raw = DVector::from_vec(vec![0.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        let v = x.project_tangent(&raw);
        let h = 1e-3;
        let at = |t: f64| objective(&x.exp(&(&v * t)), &vs);
        let second = at(s + h) - 2.0 * at(s) + at(s - h);
        prop_assert!(second > 0.0);
    }
}

#[test]
fn triangle_subdivision_counts() {
    let mut p = Polytope::bounding_simplex(2, 10.0, 1e-10);
    p.clip(vec![0.0, -1.0], 0.5, Some(0)).unwrap();
    p.clip(vec![1.0, 1.0], 0.5, Some(1)).unwrap();
    p.clip(vec![-1.0, 0.2], 0.5, Some(2)).unwrap();
    let faces = p.faces();
    assert_eq!(faces.iter().map(|f| f.len()).collect::<Vec<_>>(), vec![3, 3, 1]);
    assert_eq!(flags(&faces).len(), 6);
    assert_eq!(faces.iter().map(|f| f.len()).sum::<usize>(), 7);
}

#[test]
fn flags_match_incidence_count() {
    // in a polygon every flag is a vertex-edge incidence; in a 3-polytope,
    // each facet contributes twice its number of edges
    let out = run_237(0.05, 1);
    for faces in &out.complex.faces {
        let incidences: usize = faces[1].iter().map(|e| e.vertices.len()).sum();
        assert_eq!(flags(faces).len(), incidences);
    }
    let mut p = Polytope::bounding_simplex(3, 10.0, 1e-10);
    for (i, a) in [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.3, 0.3, -1.0]]
        .into_iter()
        .enumerate()
    {
        p.clip(a.to_vec(), 1.0, Some(i)).unwrap();
    }
    let faces = p.faces();
    let per_facet: usize = faces[2]
        .iter()
        .map(|f| 2 * faces[1].iter().filter(|e| e.vertices.iter().all(|v| f.vertices.contains(v))).count())
        .sum();
    assert_eq!(flags(&faces).len(), per_facet);
}

#[test]
fn boundary_rank_mod2() {
    let out = run_237(0.05, 1);
    let t = &out.triangulation;
    let m = t.boundary_matrix_mod2();
    // connected closed pseudomanifold: the cycle space is spanned by the sum of all tops
    assert_eq!(rank_gf2(&m), t.top.len() - 1);
    let parity_ok = m.iter().all(|row| row.iter().map(|&x| x as usize).sum::<usize>() % 2 == 0);
    assert_eq!(parity_ok, t.verify_pseudomanifold().ok);
    let mut active = vec![true; t.top.len()];
    active[3] = false;
    let rep = t.verify_pseudomanifold_subset(&active);
    assert!(!rep.ok);
    let w = rep.witness.unwrap();
    let full = (1u32 << 3) - 1;
    assert!((0..3).any(|i| t.simplex_faces[3][(full & !(1 << i)) as usize] == w));
    let reduced: Vec<Vec<u8>> = m
        .iter()
        .map(|r| r.iter().enumerate().filter(|(c, _)| *c != 3).map(|(_, x)| *x).collect())
        .collect();
    assert_eq!(rank_gf2(&reduced), t.top.len() - 1);
}

#[test]
fn perturbed_cone_vertex_fails_goodness() {
    let out = run_237(0.05, 1);
    let mut t: GoodTriangulation = out.triangulation.clone();
    let sing = sample_singular_points(&t, 50, out.complex.neighbor_radius, 3);
    let v = t.vertices.iter().position(|v| v.stabilizer_order == 7).unwrap();
    t.perturb_vertex(v, &DVector::from_vec(vec![0.0, 1e-3, 5e-4]));
    let rep = check_good(&t, &sing).unwrap();
    assert!(!rep.ok);
    assert!(rep.singular_points.iter().any(|w| w.stabilizer_order == 7 && !w.ok));
}

#[test]
fn large_epsilon_gives_one_site() {
    let out = run_237(3.0, 4);
    assert_eq!(out.set.len(), 1);
    assert!(out.set.packing.consistent);
    let t = &out.triangulation;
    assert!(t.verify_pseudomanifold().ok);
    assert_eq!(t.euler_characteristic(), 2);
    // the single cell is the Dirichlet domain of its site
    let cell = &out.complex.cells[0];
    assert!((cell.area_exact().unwrap() - PI / 21.0).abs() < 1e-9);
    // its barycenter sees every vertex and edge of the polygon
    let k = out.complex.faces[0][0].len();
    let top = t.vertices.iter().position(|v| v.source_dim == 2).unwrap();
    assert_eq!(t.lifted_degrees()[top], 2.0 * k as f64);
}

#[test]
fn doubling_epsilon_does_not_add_sites() {
    let t = triangle_group(2, 3, 7);
    let (dom, _) = dirichlet_domain_auto(&t.spec, &t.incenter, 2.0, 8.0, 200).unwrap();
    let ball = enumerate_ball(&t.spec, &t.incenter, 2.0 * dom.radius + 1.0, 200).unwrap();
    for seed in 0..4 {
        let a = build_separated_set(&t.spec, &dom, &ball, &SeparatedSetParams::new(0.05, seed)).unwrap();
        let b = build_separated_set(&t.spec, &dom, &ball, &SeparatedSetParams::new(0.1, seed)).unwrap();
        assert!(b.len() <= a.len());
        assert!(a.covering.uncovered_fraction_upper95 < 0.01);
    }
}

fn check_separation(t: &hypthick::constructions::TriangleGroup, set: &SeparatedSet) {
    let ball = enumerate_ball(&t.spec, &t.incenter, 4.0, 200).unwrap();
    for (i, a) in set.sites.iter().enumerate() {
        assert!(!hypthick::group::is_singular(&ball, a, set.singular_margin * 0.999));
        for b in &set.sites[i + 1..] {
            let d = ball.isometries().map(|g| a.dist(&g.apply(b))).fold(f64::INFINITY, f64::min);
            assert!(d >= 2.0 * set.epsilon - 1e-9);
        }
    }
}

#[test]
fn separated_set_invariants() {
    let t = triangle_group(2, 3, 7);
    let out = run_237(0.05, 6);
    check_separation(&t, &out.set);
    assert!(out.set.covering.covering_radius_estimate < 2.0 * 0.05 + out.set.singular_margin + 1e-9);
}

#[test]
fn lift_counts() {
    let s = cyclic_boost(2, 1.0);
    let o = HyperbolicPoint::origin(2);
    let ball = enumerate_ball(&s, &o, 3.5, 20).unwrap();
    let lifts = lift_sites(&[o.clone()], &ball, 3.0 + 1e-9);
    assert_eq!(lifts.len(), 7);
    let id = enumerate_ball(&s, &o, 0.5, 20).unwrap();
    let site = HyperbolicPoint::from_spatial(&[0.1, 0.2]);
    assert_eq!(lift_sites(&[site.clone()], &id, 1.0).len(), 1);
    // brute-force dedup oracle on a triangle group
    let t = triangle_group(2, 3, 7);
    let ball = enumerate_ball(&t.spec, &t.incenter, 3.0, 200).unwrap();
    let sites = vec![
        LorentzIsometry::boost(2, 1, 0.05).apply(&t.incenter),
        LorentzIsometry::boost(2, 2, 0.07).apply(&t.incenter),
    ];
    let lifts = lift_sites(&sites, &ball, 1.5);
    let mut all: Vec<HyperbolicPoint> = Vec::new();
    for s in &sites {
        for g in ball.isometries() {
            let y = g.apply(s);
            if y.dist(&t.incenter) <= 1.5 && all.iter().all(|z| z.dist(&y) >= 1e-9) {
                all.push(y);
            }
        }
    }
    assert_eq!(lifts.len(), all.len());
}

#[test]
fn deck_transformation_gives_same_complex() {
    let t = triangle_group(2, 3, 7);
    let out = run_237(0.05, 9);
    let g = &t.spec.generators()[0];
    let reducer = OrbitReducer::new(&out.complex.ball);
    let mut moved = out.set.clone();
    moved.sites = out.set.sites.iter().map(|s| reducer.reduce(&g.apply(s)).1).collect();
    let c2 = build_voronoi(&t.spec, &out.domain, &moved).unwrap();
    let t2 = barycentric_subdivision(&c2).unwrap();
    let t1 = &out.triangulation;
    assert_eq!(t1.counts(), t2.counts());
    let strata = |t: &GoodTriangulation| {
        let mut v: Vec<(usize, usize, usize)> =
            t.vertices.iter().map(|v| (v.source_dim, v.stratum, v.stabilizer_order)).collect();
        v.sort_unstable();
        v
    };
    assert_eq!(strata(t1), strata(&t2));
}

#[test]
fn torsion_free_group_has_no_singular_points() {
    let s = schottky(3.0);
    let ball = enumerate_ball(&s, &HyperbolicPoint::origin(2), 6.5, 4).unwrap();
    assert!(ball.elliptic_elements().is_empty());
    let out = run_237(0.05, 1);
    let rep = check_good(&out.triangulation, &[]).unwrap();
    assert!(rep.ok && rep.singular_points.is_empty());
}

#[test]
fn pipeline_is_deterministic() {
    let a = run_237(0.05, 12);
    let b = run_237(0.05, 12);
    assert_eq!(a.set.sites, b.set.sites);
    assert_eq!(a.triangulation.counts(), b.triangulation.counts());
    for (x, y) in a.triangulation.vertices.iter().zip(&b.triangulation.vertices) {
        assert_eq!(x.rep, y.rep);
    }
}
