//! Identifying points up to the group action: reduction into the Dirichlet
//! domain and a table of orbit representatives.

use std::collections::HashMap;

use crate::group::OrbitBall;
use crate::hyperbolic::{lorentz_dot, HyperbolicPoint};

/// Quotient distance below which two points are the same orbit.
pub const ORBIT_TOL: f64 = 1e-7;

/// Maps points into the Dirichlet domain of the ball's basepoint.
#[derive(Clone, Debug)]
pub struct OrbitReducer<'a> {
    ball: &'a OrbitBall,
    orbit: Vec<HyperbolicPoint>,
}

impl<'a> OrbitReducer<'a> {
    pub fn new(ball: &'a OrbitBall) -> Self {
        let p0 = ball.basepoint();
        let orbit = ball.isometries().map(|g| g.apply(p0)).collect();
        Self { ball, orbit }
    }

    pub fn ball(&self) -> &OrbitBall {
        self.ball
    }

    /// `(k, g_k^{-1} x, dist(x, g_k p0))` for the orbit point `g_k p0` nearest to `x`.
    pub fn reduce(&self, x: &HyperbolicPoint) -> (usize, HyperbolicPoint, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (k, y) in self.orbit.iter().enumerate() {
            let c = -lorentz_dot(x.as_slice(), y.as_slice());
            if c < best.1 - 1e-13 * c.abs() {
                best = (k, c);
            }
        }
        let k = best.0;
        let rep = self.ball.elements()[k].element.inverse().apply(x);
        let inv = x.dist(&self.orbit[k]);
        (k, rep, inv)
    }

    /// Smallest-index `h` in the ball with `dist(a, h b) < tol`.
    pub fn match_points(&self, a: &HyperbolicPoint, b: &HyperbolicPoint, tol: f64) -> Option<usize> {
        let p0 = self.ball.basepoint();
        let reach = a.dist(p0) + b.dist(p0) + tol;
        for (h, e) in self.ball.elements().iter().enumerate() {
            if e.displacement > reach {
                continue;
            }
            if a.dist(&e.element.apply(b)) < tol {
                return Some(h);
            }
        }
        None
    }

    /// Quotient distance between points (exact when both lie in the domain and
    /// the ball covers twice the domain radius plus the distance).
    pub fn quotient_distance(&self, a: &HyperbolicPoint, b: &HyperbolicPoint) -> f64 {
        self.ball
            .isometries()
            .map(|g| a.dist(&g.apply(b)))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug)]
pub struct OrbitEntry {
    /// Representative inside the domain.
    pub rep: HyperbolicPoint,
    /// Distance from the representative to the basepoint.
    pub invariant: f64,
}

#[derive(Clone, Debug)]
pub struct Lookup {
    pub id: usize,
    /// Ball index of `g` with `x = g . rep`; `None` when the product left the ball.
    pub lift: Option<usize>,
    pub is_new: bool,
}

/// Orbit representatives, bucketed by their distance to the basepoint.
#[derive(Clone, Debug, Default)]
pub struct OrbitTable {
    pub entries: Vec<OrbitEntry>,
    buckets: HashMap<i64, Vec<usize>>,
}

impl OrbitTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn key(inv: f64) -> i64 {
        (inv * 1e5).round() as i64
    }

    /// Finds the orbit of `x`, inserting a new one if needed.
    pub fn lookup(&mut self, reducer: &OrbitReducer, x: &HyperbolicPoint) -> Lookup {
        let (k, rep, inv) = reducer.reduce(x);
        let key = Self::key(inv);
        for kk in [key - 1, key, key + 1] {
            let Some(ids) = self.buckets.get(&kk) else { continue };
            for &id in ids {
                let e = &self.entries[id];
                if (e.invariant - inv).abs() > ORBIT_TOL {
                    continue;
                }
                if let Some(h) = reducer.match_points(&rep, &e.rep, ORBIT_TOL) {
                    // x = g_k rep = g_k h rep_id
                    let ball = reducer.ball();
                    let g = ball.elements()[k].element.compose(&ball.elements()[h].element);
                    return Lookup {
                        id,
                        lift: ball.find(&g),
                        is_new: false,
                    };
                }
            }
        }
        let id = self.entries.len();
        self.entries.push(OrbitEntry { rep, invariant: inv });
        self.buckets.entry(key).or_default().push(id);
        Lookup {
            id,
            lift: Some(k),
            is_new: true,
        }
    }

    /// Finds the orbit of `x` without inserting.
    pub fn find(&self, reducer: &OrbitReducer, x: &HyperbolicPoint) -> Option<usize> {
        let (_, rep, inv) = reducer.reduce(x);
        let key = Self::key(inv);
        for kk in [key - 1, key, key + 1] {
            let Some(ids) = self.buckets.get(&kk) else { continue };
            for &id in ids {
                let e = &self.entries[id];
                if (e.invariant - inv).abs() <= ORBIT_TOL && reducer.match_points(&rep, &e.rep, ORBIT_TOL).is_some() {
                    return Some(id);
                }
            }
        }
        None
    }
}
