use std::f64::consts::PI;

use hypthick::constructions::{schottky, triangle_group};
use hypthick::domain::{dirichlet_cell, dirichlet_domain, dirichlet_domain_auto};
use hypthick::group::*;
use hypthick::hyperbolic::{HyperbolicPoint, LorentzIsometry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Depth-first enumeration with a flat list for deduplication.
fn dfs_oracle(spec: &GroupSpec, p: &HyperbolicPoint, r: f64, limit: f64, depth: usize) -> Vec<LorentzIsometry> {
    fn go(
        spec: &GroupSpec,
        p: &HyperbolicPoint,
        g: &LorentzIsometry,
        limit: f64,
        depth: usize,
        found: &mut Vec<(LorentzIsometry, usize)>,
    ) {
        if depth == 0 {
            return;
        }
        for h in spec.generators() {
            let gh = g.compose(h);
            if gh.displacement_at(p) > limit {
                continue;
            }
            // revisit only if reached with more remaining depth
            match found.iter_mut().find(|(e, _)| e.max_abs_diff(&gh) < 1e-7) {
                Some((_, d)) if *d >= depth - 1 => continue,
                Some((_, d)) => *d = depth - 1,
                None => found.push((gh.clone(), depth - 1)),
            }
            go(spec, p, &gh, limit, depth - 1, found);
        }
    }
    let mut found = vec![(LorentzIsometry::identity(2), depth)];
    go(spec, p, &LorentzIsometry::identity(2), limit, depth, &mut found);
    found
        .into_iter()
        .map(|(g, _)| g)
        .filter(|g| g.displacement_at(p) <= r)
        .collect()
}

#[test]
fn schottky_words_of_length_two() {
    let s = schottky(3.0);
    let o = HyperbolicPoint::origin(2);
    let b = enumerate_ball(&s, &o, 6.5, 2).unwrap();
    assert_eq!(b.len(), 17);
    assert!(!b.certified);
}

#[test]
fn triangle_ball_matches_dfs_oracle() {
    let t = triangle_group(2, 3, 7);
    let p = &t.incenter;
    let b = enumerate_ball(&t.spec, p, 2.0, 40).unwrap();
    assert!(b.certified);
    let limit = 2.0 + b.margin;
    let oracle = dfs_oracle(&t.spec, p, 2.0, limit, 12);
    assert_eq!(b.len(), oracle.len());
    for g in &oracle {
        assert!(b.find(g).is_some());
    }
}

#[test]
fn incenter_is_equidistant_from_sides() {
    let t = triangle_group(2, 3, 7);
    let c = &t.cone_points;
    let side = |a: &HyperbolicPoint, b: &HyperbolicPoint| {
        let basis = nalgebra::DMatrix::from_columns(&[a.coords().clone(), b.coords().clone()]);
        hypthick::hyperbolic::distance_to_subspace(&basis, &t.incenter).unwrap().0
    };
    let d = [side(&c[0], &c[1]), side(&c[1], &c[2]), side(&c[2], &c[0])];
    assert!((d[0] - d[1]).abs() < 1e-12 && (d[1] - d[2]).abs() < 1e-12);
}

#[test]
fn ball_closed_under_inverse_and_products() {
    let t = triangle_group(2, 3, 7);
    let p = &t.incenter;
    let b = enumerate_ball(&t.spec, p, 3.0, 60).unwrap();
    for e in b.elements() {
        assert!(b.find(&e.element.inverse()).is_some());
        assert!(e.displacement <= 3.0);
    }
    let els = b.elements();
    for i in (0..els.len()).step_by(7) {
        for j in (0..els.len()).step_by(11) {
            let g = els[i].element.compose(&els[j].element);
            if g.displacement_at(p) <= 3.0 - 1e-9 {
                assert!(b.find(&g).is_some());
            }
        }
    }
}

#[test]
fn injectivity_radius_matches_scan_and_is_monotone() {
    let t = triangle_group(2, 3, 7);
    let p = &t.incenter;
    let mut last = f64::INFINITY;
    for r in [2.0, 3.0, 4.0] {
        let b = enumerate_ball(&t.spec, p, r, 80).unwrap();
        let inj = injectivity_radius_lower(&b, None);
        let scan = b
            .elements()
            .iter()
            .filter_map(|e| e.element.translation_length().ok())
            .fold(f64::INFINITY, f64::min)
            / 2.0;
        assert_eq!(inj.value, scan);
        assert!(inj.value <= last);
        last = inj.value;
    }
    assert!(last.is_finite());
}

#[test]
fn cone_point_stabilizers() {
    for (p, q, r) in [(2, 3, 7), (2, 3, 8)] {
        let t = triangle_group(p, q, r);
        let b = enumerate_ball(&t.spec, &t.incenter, 3.0, 80).unwrap();
        for (c, k) in t.cone_points.iter().zip(t.orders) {
            let s = stabilizer(&b, c).unwrap();
            assert_eq!(s.order, k as usize);
            assert_eq!(s.stratum, 0);
            assert!(is_singular(&b, c, SINGULAR_MARGIN));
        }
        let st = stabilizer(&b, &t.incenter).unwrap();
        assert_eq!(st.order, 1);
        assert!(!is_singular(&b, &t.incenter, 1e-3));
        let (dom, big) = dirichlet_domain_auto(&t.spec, &t.incenter, 2.0, 8.0, 200).unwrap();
        let samples: Vec<_> = dom.cell.vertex_points().unwrap();
        let q_obs = max_finite_order(&big, &samples, 1e-6).unwrap();
        assert_eq!(q_obs, r as usize);
    }
}

#[test]
fn singular_band_matches_fixed_point_distance() {
    let t = triangle_group(2, 3, 7);
    let b = enumerate_ball(&t.spec, &t.incenter, 3.0, 80).unwrap();
    let c = &t.cone_points[2];
    let margin = 1e-3;
    for k in 0..20 {
        let phi = k as f64 * 0.3;
        let near = LorentzIsometry::rotation(2, 1, 2, phi).apply(&HyperbolicPoint::on_axis(2, 0.5 * margin));
        assert!(is_singular(&b, &near, margin));
        let far = LorentzIsometry::rotation(2, 1, 2, phi).apply(&HyperbolicPoint::on_axis(2, 10.0 * margin));
        assert!(!is_singular(&b, &far, margin) || far.dist(c) < margin);
    }
}

#[test]
fn dirichlet_area_matches_gauss_bonnet() {
    for (p, q, r) in [(2, 3, 7), (2, 3, 8)] {
        let t = triangle_group(p, q, r);
        let (dom, _) = dirichlet_domain_auto(&t.spec, &t.incenter, 2.0, 8.0, 200).unwrap();
        let area = t.spec.volume.unwrap();
        let exact = dom.cell.area_exact().unwrap();
        assert!((exact - area).abs() < 1e-9, "{exact} vs {area}");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mc, _) = dom.cell.volume_mc(200_000, &mut rng).unwrap();
        assert!((mc - area).abs() < 0.02 * area);
    }
    assert!((2.0 * PI / 42.0 - PI / 21.0).abs() < 1e-15);
}

#[test]
fn dirichlet_area_invariant_under_basepoint_move() {
    let t = triangle_group(2, 3, 7);
    let a = t.spec.volume.unwrap();
    let moved = LorentzIsometry::boost(2, 2, 0.07).apply(&t.incenter);
    let (dom, _) = dirichlet_domain_auto(&t.spec, &moved, 2.0, 8.0, 200).unwrap();
    assert!((dom.cell.area_exact().unwrap() - a).abs() < 1e-9);
}

#[test]
fn cyclic_domain_is_unbounded_slab() {
    let s = hypthick::constructions::cyclic_boost(2, 1.0);
    let o = HyperbolicPoint::origin(2);
    let b = enumerate_ball(&s, &o, 3.5, 20).unwrap();
    let cell = dirichlet_cell(&b).unwrap();
    assert!(!cell.is_bounded());
    assert_eq!(cell.facet_tags().len(), 2);
    assert!(matches!(dirichlet_domain(&b), Err(GroupError::UnboundedDomain { .. })));
}

#[test]
fn bad_generator_is_named() {
    let text = r#"{"dimension": 2, "label": "bad", "generators": [[1,0,0,0,1,0,0,0,1],[2,0,0,0,1,0,0,0,1]]}"#;
    match GroupSpec::from_json(text) {
        Err(GroupError::InvalidGenerator { index, .. }) => assert_eq!(index, 1),
        other => panic!("{other:?}"),
    }
}
