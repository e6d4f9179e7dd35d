//! Volume-driven bounds: field degree, injectivity radius, torsion order,
//! packing scale and the simplex budget of a good triangulation.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poly::{kronecker_factorization, IntPolynomial};
use super::roots::mahler_measure;
use super::{ArithmeticError, Result};
use crate::hyperbolic::{ball_volume, unit_ball_volume};

/// Constants of the bound chain. Only `c1` has a literature value; the rest
/// are placeholders to be set per application.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundConstants {
    /// Dobrowolski constant.
    pub c1: f64,
    /// `deg(k) <= c2 log Vol + c3`.
    pub c2: f64,
    pub c3: f64,
    /// `q <= c4 deg(k)^c5`.
    pub c4: f64,
    pub c5: f64,
    /// `q <= c6 (log Vol)^c5`.
    pub c6: f64,
    /// Margulis constant.
    pub mu_n: f64,
    /// Margulis index bound.
    pub m_n: u32,
    /// Exponent `c` in `Vol^c` inside the injectivity radius bound.
    pub c_exponent: f64,
    /// `C(n)` in the simplex count.
    pub simplex_constant: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            c1: 0.25,
            c2: 1.0,
            c3: 0.0,
            c4: 1.0,
            c5: 1.0,
            c6: 1.0,
            mu_n: 0.1,
            m_n: 1,
            c_exponent: 1.0,
            simplex_constant: 1.0,
        }
    }
}

impl BoundConstants {
    pub fn units() -> Self {
        Self {
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
            c5: 1.0,
            c6: 1.0,
            mu_n: 1.0,
            m_n: 1,
            c_exponent: 1.0,
            simplex_constant: 1.0,
        }
    }
}

/// `c1 (log log d / log d)^3`, defined for `d >= 3`.
pub fn dobrowolski_bound(d: u64, c1: f64) -> Result<f64> {
    if d < 3 {
        return Err(ArithmeticError::Domain(format!("degree {d}: log log d <= 0")));
    }
    let l = (d as f64).ln();
    Ok(c1 * (l.ln() / l).powi(3))
}

/// Half the log Mahler measure of the characteristic polynomial of `g^2`.
pub fn translation_length_lower(charpoly_of_square: &IntPolynomial, precision: f64) -> Result<f64> {
    Ok(0.5 * mahler_measure(charpoly_of_square, precision)?.value.ln())
}

pub fn charpoly_degree_bound(n: u64, deg_k: u64) -> u64 {
    (n + 1) * deg_k
}

fn log_vol(vol: f64) -> Result<f64> {
    if !(vol > 1.0) {
        return Err(ArithmeticError::Domain(format!("volume {vol}: log Vol <= 0")));
    }
    Ok(vol.ln())
}

pub fn degree_bound(vol: f64, c2: f64, c3: f64) -> Result<f64> {
    Ok(c2 * log_vol(vol)? + c3)
}

pub fn q_bound(vol: f64, c5: f64, c6: f64) -> Result<f64> {
    Ok(c6 * log_vol(vol)?.powf(c5))
}

pub fn epsilon_choice(mu_n: f64, m_n: u32, r: f64) -> f64 {
    (0.5 * mu_n).min(r / (2.0 * m_n as f64))
}

#[derive(Clone, Debug, Serialize)]
pub struct RinjBound {
    /// `(c1/4) (log log log Vol^c / log log Vol^c)^3`.
    pub triple_log: f64,
    /// `(c1/4) (1 / log Vol)^3`, the value used downstream.
    pub simplified: f64,
}

/// Smallest `log Vol` for which every logarithm in the triple-log form is positive.
pub fn rinj_log_threshold(c: &BoundConstants) -> f64 {
    std::f64::consts::E / c.c_exponent
}

fn rinj_from_log(x: f64, c: &BoundConstants) -> Result<RinjBound> {
    let l1 = c.c_exponent * x;
    if !(l1 > 0.0) {
        return Err(ArithmeticError::Domain("log Vol^c <= 0".into()));
    }
    let l2 = l1.ln();
    if !(l2 > 0.0) {
        return Err(ArithmeticError::Domain("log log Vol^c <= 0".into()));
    }
    let l3 = l2.ln();
    if !(l3 > 0.0) {
        return Err(ArithmeticError::Domain("log log log Vol^c <= 0".into()));
    }
    Ok(RinjBound {
        triple_log: 0.25 * c.c1 * (l3 / l2).powi(3),
        simplified: 0.25 * c.c1 * x.powi(-3),
    })
}

pub fn rinj_bound(vol: f64, c: &BoundConstants) -> Result<RinjBound> {
    rinj_from_log(log_vol(vol)?, c)
}

#[derive(Clone, Debug, Serialize)]
pub struct V0Report {
    pub found: bool,
    /// `log V0`; volumes themselves overflow quickly.
    pub log_v0: Option<f64>,
    pub v0: Option<f64>,
    /// Scanned range of `log Vol`.
    pub window: (f64, f64),
    pub grid_points: usize,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundPipelineReport {
    pub vol: f64,
    pub log_vol: f64,
    pub n: usize,
    pub delta: f64,
    pub constants: BoundConstants,
    pub deg_k_bound: f64,
    pub charpoly_degree_bound: f64,
    /// Injectivity radius via Dobrowolski at the degree bound, when it is at least 3.
    pub rinj_via_degree: Option<f64>,
    pub rinj_triple_log: f64,
    pub rinj_simplified: f64,
    pub q_bound: f64,
    pub q_via_degree: f64,
    pub epsilon: f64,
    pub v_eps: f64,
    /// Euclidean `omega_n eps^n`, a lower bound for `v_eps`.
    pub v_eps_lower: f64,
    pub log_budget: f64,
    pub budget: f64,
    /// `(1 + delta) log Vol`.
    pub log_target: f64,
    pub within_target: bool,
    pub v0: V0Report,
}

struct Chain {
    q: f64,
    epsilon: f64,
    v_eps: f64,
    log_budget: f64,
}

fn chain(x: f64, n: usize, c: &BoundConstants) -> Chain {
    let r = 0.25 * c.c1 * x.powi(-3);
    let epsilon = epsilon_choice(c.mu_n, c.m_n, r);
    let v_eps = ball_volume(n, epsilon);
    let q = c.c6 * x.powf(c.c5);
    let log_budget = c.simplex_constant.ln() + q.ln() + x - v_eps.ln();
    Chain {
        q,
        epsilon,
        v_eps,
        log_budget,
    }
}

#[derive(Clone, Debug)]
pub struct V0Window {
    pub log_hi: f64,
    pub points: usize,
}

impl Default for V0Window {
    fn default() -> Self {
        Self {
            log_hi: 1e6,
            points: 4096,
        }
    }
}

/// Least `Vol` in the window past which `budget <= Vol^{1+delta}` holds on the whole scanned grid.
pub fn find_v0(n: usize, delta: f64, c: &BoundConstants, w: &V0Window) -> V0Report {
    let lo = rinj_log_threshold(c) * (1.0 + 1e-9);
    let hi = w.log_hi.max(lo * 2.0);
    let k = w.points.max(2);
    let grid: Vec<f64> = (0..k).map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64)).collect();
    let slack = |x: f64| (1.0 + delta) * x - chain(x, n, c).log_budget;
    let last_fail = grid.iter().rposition(|&x| slack(x) < 0.0);
    let mk = |found: bool, log_v0: Option<f64>, note: &str| V0Report {
        found,
        log_v0,
        v0: log_v0.map(f64::exp).filter(|v| v.is_finite()),
        window: (lo, hi),
        grid_points: k,
        note: note.into(),
    };
    match last_fail {
        None => mk(true, Some(lo), "bound holds on the whole window; V0 is at most its start"),
        Some(i) if i + 1 == k => mk(false, None, "bound fails at the end of the window; no threshold found"),
        Some(i) => {
            let (mut a, mut b) = (grid[i], grid[i + 1]);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if slack(m) < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            mk(true, Some(b), "last sign change on the grid, refined by bisection")
        }
    }
}

pub fn simplex_budget(vol: f64, n: usize, delta: f64, c: &BoundConstants) -> Result<BoundPipelineReport> {
    simplex_budget_with(vol, n, delta, c, &V0Window::default())
}

pub fn simplex_budget_with(vol: f64, n: usize, delta: f64, c: &BoundConstants, w: &V0Window) -> Result<BoundPipelineReport> {
    if n < 2 {
        return Err(ArithmeticError::Domain(format!("dimension {n} < 2")));
    }
    let x = log_vol(vol)?;
    let rinj = rinj_from_log(x, c)?;
    let deg_k = c.c2 * x + c.c3;
    let d = (n as f64 + 1.0) * deg_k;
    let rinj_via_degree = (d.is_finite() && d >= 3.0)
        .then(|| dobrowolski_bound(d.floor() as u64, c.c1).ok().map(|b| 0.25 * b))
        .flatten();
    let ch = chain(x, n, c);
    let log_target = (1.0 + delta) * x;
    Ok(BoundPipelineReport {
        vol,
        log_vol: x,
        n,
        delta,
        constants: c.clone(),
        deg_k_bound: deg_k,
        charpoly_degree_bound: d,
        rinj_via_degree,
        rinj_triple_log: rinj.triple_log,
        rinj_simplified: rinj.simplified,
        q_bound: ch.q,
        q_via_degree: c.c4 * deg_k.max(0.0).powf(c.c5),
        epsilon: ch.epsilon,
        v_eps: ch.v_eps,
        v_eps_lower: unit_ball_volume(n) * ch.epsilon.powi(n as i32),
        log_budget: ch.log_budget,
        budget: ch.log_budget.exp(),
        log_target,
        within_target: ch.log_budget <= log_target,
        v0: find_v0(n, delta, c, w),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DobrowolskiSweep {
    pub samples: usize,
    pub max_degree: usize,
    pub c1: f64,
    pub seed: u64,
    /// Cyclotomic draws, resampled.
    pub rejected: usize,
    pub violations: Vec<String>,
    pub precision_failures: usize,
    /// Smallest `log M - bound` seen.
    pub min_margin: f64,
}

/// Checks `log M(P) >= c1 (log log d / log d)^3` on random non-cyclotomic
/// monic polynomials with coefficients in {-1, 0, 1} and constant term +-1,
/// where small measures are most likely.
pub fn dobrowolski_sweep(samples: usize, max_degree: usize, c1: f64, seed: u64) -> DobrowolskiSweep {
    let max_degree = max_degree.max(3);
    let draws: Vec<(IntPolynomial, usize)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut rejected = 0;
            loop {
                let d = rng.gen_range(3..=max_degree);
                let mut c: Vec<BigInt> = (0..d).map(|_| BigInt::from(rng.gen_range(-1i64..=1))).collect();
                c[0] = BigInt::from(if rng.gen::<bool>() { 1 } else { -1 });
                c.push(BigInt::from(1));
                let p = IntPolynomial::new(c).expect("monic");
                if kronecker_factorization(&p).is_none() {
                    return (p, rejected);
                }
                rejected += 1;
            }
        })
        .collect();
    let checks: Vec<Option<(f64, String)>> = draws
        .par_iter()
        .map(|(p, _)| {
            let bound = dobrowolski_bound(p.degree() as u64, c1).expect("degree >= 3");
            mahler_measure(p, 1e-9).ok().map(|m| (m.lower.ln() - bound, p.to_string()))
        })
        .collect();
    let mut out = DobrowolskiSweep {
        samples,
        max_degree,
        c1,
        seed,
        rejected: draws.iter().map(|d| d.1).sum(),
        violations: Vec::new(),
        precision_failures: 0,
        min_margin: f64::INFINITY,
    };
    for c in checks {
        match c {
            None => out.precision_failures += 1,
            Some((margin, p)) => {
                out.min_margin = out.min_margin.min(margin);
                if margin < 0.0 {
                    out.violations.push(p);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(charpoly_degree_bound(2, 1), 3);
        assert_eq!(charpoly_degree_bound(3, 2), 8);
        assert_eq!(charpoly_degree_bound(7, 3), 24);
        assert!((degree_bound(std::f64::consts::E, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((q_bound(std::f64::consts::E, 2.7, 5.0).unwrap() - 5.0).abs() < 1e-15);
        assert_eq!(epsilon_choice(0.2, 3, 1e9), 0.1);
        assert_eq!(epsilon_choice(0.2, 3, 1e-3), 1e-3 / 6.0);
        assert_eq!(epsilon_choice(0.2, 3, 0.7), 0.1);
        assert!(dobrowolski_bound(2, 0.25).is_err());
    }

    #[test]
    fn rinj_domain_errors() {
        let c = BoundConstants::default();
        assert!(rinj_bound(1.0, &c).is_err());
        let e = rinj_bound(10.0, &c).unwrap_err().to_string();
        assert!(e.contains("log log log"), "{e}");
        let r = rinj_bound(10f64.exp(), &c).unwrap();
        assert!((r.simplified - 6.25e-5).abs() < 1e-18);
    }
}
