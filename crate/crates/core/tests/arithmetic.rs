use hypthick::arithmetic::bounds::{find_v0, rinj_log_threshold, simplex_budget_with, V0Window};
use hypthick::arithmetic::poly::euler_phi;
use hypthick::arithmetic::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LEHMER: [i64; 11] = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1];
const LEHMER_M: f64 = 1.1762808182599175;

fn p(c: &[i64]) -> IntPolynomial {
    IntPolynomial::from_i64(c).unwrap()
}

/// Companion-matrix eigenvalues, no refinement.
fn companion_mahler(c: &[i64]) -> f64 {
    let n = c.len() - 1;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] as f64;
    }
    m.complex_eigenvalues().iter().map(|z| z.norm().max(1.0)).product()
}

fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize, span: i64) -> Vec<i64> {
    let d = rng.gen_range(1..=max_deg);
    let mut c: Vec<i64> = (0..d).map(|_| rng.gen_range(-span..=span)).collect();
    c.push(1);
    c
}

#[test]
fn trivial_measures() {
    assert!((mahler_measure(&p(&[-2, 1]), 1e-12).unwrap().value - 2.0).abs() < 1e-14);
    assert!((mahler_measure(&p(&[1, 1, 1]), 1e-12).unwrap().value - 1.0).abs() < 1e-14);
    assert!((mahler_measure(&p(&[0, 0, 1]), 1e-12).unwrap().value - 1.0).abs() < 1e-14);
}

#[test]
fn lehmer_value() {
    let m = mahler_measure(&p(&LEHMER), 1e-12).unwrap();
    assert!((m.value - LEHMER_M).abs() < 1e-8, "{}", m.value);
    assert!(m.lower <= LEHMER_M + 1e-15 && LEHMER_M - 1e-15 <= m.upper);
    assert!(m.precision < 1e-12);
    assert_eq!(m.roots.len(), 10);
    let tl = translation_length_lower(&p(&LEHMER), 1e-12).unwrap();
    assert!((tl - 0.0811788060038691).abs() < 1e-9);
}

#[test]
fn translation_lengths() {
    let t = translation_length_lower(&p(&[1, -3, 1]), 1e-12).unwrap();
    assert!((t - 0.4812118250596034).abs() < 1e-12);
    assert!(translation_length_lower(&cyclotomic(9), 1e-12).unwrap().abs() < 1e-12);
}

#[test]
fn matches_companion_oracle_and_constant_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let c = random_poly(&mut rng, 20, 5);
        let m = mahler_measure(&p(&c), 1e-6).unwrap();
        let o = companion_mahler(&c);
        assert!((m.value - o).abs() <= 1e-8 * o, "{c:?}: {} vs {o}", m.value);
        assert!(m.value >= 1.0 - 1e-12);
        assert!(m.lower <= m.value && m.value <= m.upper);
        if c[0] != 0 {
            let prod: f64 = m.roots.iter().map(|r| r.abs().powi(r.multiplicity as i32)).product();
            let want = c[0].unsigned_abs() as f64;
            assert!((prod - want).abs() <= 1e-8 * want, "{c:?}: {prod}");
        }
    }
}

#[test]
fn cyclotomic_detector_exact() {
    let ms: Vec<usize> = (1..=400).filter(|&m| euler_phi(m) <= 30).collect();
    // phi(m) <= 30 forces m <= 2 * 30^2
    assert!((401..=1800).all(|m| euler_phi(m) > 30));
    for &m in &ms {
        let c = cyclotomic(m);
        assert!(is_cyclotomic_product(&c), "Phi_{m}");
        let k = kronecker_factorization(&c).unwrap();
        assert_eq!(k.factors, vec![(m, 1)]);
        let mm = mahler_measure(&c, 1e-9).unwrap();
        assert!((mm.value - 1.0).abs() < 1e-8);
        assert!(mm.roots.iter().all(|r| (r.abs() - 1.0).abs() < 1e-8));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let a = ms[rng.gen_range(0..ms.len())];
        let b = ms[rng.gen_range(0..ms.len())];
        let f = cyclotomic(a).mul(&cyclotomic(b));
        if f.degree() <= 30 {
            assert!(is_cyclotomic_product(&f));
        }
        // a perturbed constant term leaves the class
        let mut c = f.to_i64().unwrap();
        c[0] += 1;
        if let Ok(g) = IntPolynomial::from_i64(&c) {
            let mm = mahler_measure(&g, 1e-6).unwrap();
            assert_eq!(is_cyclotomic_product(&g), (mm.value - 1.0).abs() < 1e-8 && c[0].abs() == 1, "{c:?}");
        }
    }
    assert!(!is_cyclotomic_product(&p(&LEHMER)));
}

#[test]
fn multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let a = p(&random_poly(&mut rng, 12, 3));
        let b = p(&random_poly(&mut rng, 12, 3));
        let ma = mahler_measure(&a, 1e-6).unwrap();
        let mb = mahler_measure(&b, 1e-6).unwrap();
        let mab = mahler_measure(&a.mul(&b), 1e-6).unwrap();
        let want = ma.value * mb.value;
        assert!((mab.value - want).abs() <= 1e-9 * want, "{a} * {b}");
        assert!(mab.lower <= ma.upper * mb.upper && ma.lower * mb.lower <= mab.upper);
    }
}

#[test]
fn dobrowolski_values() {
    let d3 = dobrowolski_bound(3, 1.0).unwrap();
    let l3 = 3f64.ln();
    assert!((d3 - (l3.ln() / l3).powi(3)).abs() < 1e-16);
    assert!((dobrowolski_bound(16, 0.25).unwrap() - 0.01243955838782412425).abs() < 1e-15);
    // (log log d / log d) peaks at d = e^e, so the bound rises until 15
    for d in 3..15 {
        assert!(dobrowolski_bound(d, 0.25).unwrap() < dobrowolski_bound(d + 1, 0.25).unwrap());
    }
    for d in 16..2000 {
        assert!(dobrowolski_bound(d, 0.25).unwrap() > dobrowolski_bound(d + 1, 0.25).unwrap());
    }
    assert!(dobrowolski_bound(2, 0.25).is_err());
}

#[test]
fn dobrowolski_sweep_small() {
    let s = dobrowolski_sweep(2000, 30, 0.25, 17);
    assert!(s.violations.is_empty(), "{:?}", s.violations);
    assert_eq!(s.precision_failures, 0);
    assert!(s.min_margin > 0.0);
    let again = dobrowolski_sweep(2000, 30, 0.25, 17);
    assert_eq!(again.min_margin, s.min_margin);
}

#[test]
fn composition_with_unit_constants() {
    let c = BoundConstants::units();
    let r = simplex_budget(10f64.exp(), 2, 0.5, &c).unwrap();
    // q = 10, r = (1/4) 10^-3, eps = r/2, v_eps = 4 pi sinh^2(eps/2)
    let eps: f64 = 0.25e-3 / 2.0;
    let v = 4.0 * std::f64::consts::PI * (eps / 2.0).sinh().powi(2);
    let want = 10.0 * 10f64.exp() / v;
    assert!((r.budget - want).abs() <= 1e-12 * want, "{} vs {want}", r.budget);
    assert!((r.budget - 4487194759069.992418).abs() <= 1e-12 * want);
    assert_eq!(r.epsilon, eps);
    assert_eq!(r.q_bound, 10.0);
    assert!((r.deg_k_bound - 11.0).abs() < 1e-14);
    assert!((r.charpoly_degree_bound - 33.0).abs() < 1e-13);
    assert!(r.v_eps_lower <= r.v_eps);
    assert_eq!(r.constants, c);
}

#[test]
fn pipeline_monotone() {
    let c = BoundConstants::default();
    let w = V0Window { log_hi: 100.0, points: 64 };
    let mut prev: Option<BoundPipelineReport> = None;
    for k in 0..200 {
        let x = 3.0 + 0.5 * k as f64;
        let r = simplex_budget_with(x.exp(), 3, 0.5, &c, &w).unwrap();
        assert!(r.epsilon <= c.mu_n / 2.0);
        assert!(r.budget > 0.0 && r.v_eps > 0.0 && r.rinj_simplified > 0.0);
        if let Some(p) = prev {
            assert!(r.rinj_simplified < p.rinj_simplified);
            assert!(r.q_bound > p.q_bound);
            assert!(r.epsilon <= p.epsilon);
            assert!(r.v_eps <= p.v_eps);
            assert!(r.log_budget > p.log_budget);
        }
        prev = Some(r);
    }
}

#[test]
fn triple_log_dominates_past_crossover() {
    let c = BoundConstants::default();
    assert!(rinj_bound(60.0, &c).map(|r| r.triple_log < r.simplified).unwrap());
    for k in 0..400 {
        let vol = 60.3 * 1.1f64.powi(k);
        let r = rinj_bound(vol, &c).unwrap();
        assert!(r.triple_log >= r.simplified, "{vol}");
    }
}

#[test]
fn v0_threshold() {
    let c = BoundConstants::default();
    let w = V0Window::default();
    let none = find_v0(3, 0.0, &c, &w);
    assert!(!none.found && none.log_v0.is_none());
    let big = find_v0(3, 3.0, &c, &w);
    let small = find_v0(3, 0.5, &c, &w);
    assert!(big.found && small.found);
    assert!(big.log_v0.unwrap() <= small.log_v0.unwrap());
    assert!(big.log_v0.unwrap() < 20.0);
    // past V0 the bound holds, just before it fails
    let x = small.log_v0.unwrap();
    if x > rinj_log_threshold(&c) * 1.01 {
        let before = simplex_budget_with((x * 0.999).exp(), 3, 0.5, &c, &w).unwrap();
        assert!(!before.within_target);
    }
    let after = simplex_budget_with((x * 1.001).min(700.0).exp(), 3, 0.5, &c, &w).unwrap();
    assert!(after.within_target);
}
