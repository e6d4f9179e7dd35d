//! Squared-distance barycenters on H^n by Riemannian gradient descent.

use nalgebra::DVector;

use super::VoronoiError;
use crate::hyperbolic::{lorentz_dot, HyperbolicPoint};

pub const GRAD_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 10_000;
/// Gradient norm accepted when no step can be taken at all.
pub const FLOOR_GRAD_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct BarycenterResult {
    pub point: HyperbolicPoint,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// `sum_i dist(x, v_i)^2`.
pub fn objective(x: &HyperbolicPoint, vertices: &[HyperbolicPoint]) -> f64 {
    vertices.iter().map(|v| x.dist(v).powi(2)).sum()
}

/// Riemannian gradient `-2 sum_i log_x(v_i)` as an ambient tangent vector.
pub fn gradient(x: &HyperbolicPoint, vertices: &[HyperbolicPoint]) -> DVector<f64> {
    let mut g = DVector::zeros(x.coords().len());
    for v in vertices {
        g -= x.log(v) * 2.0;
    }
    g
}

pub fn tangent_norm(v: &DVector<f64>) -> f64 {
    lorentz_dot(v.as_slice(), v.as_slice()).max(0.0).sqrt()
}

/// Normalized ambient mean, a starting point inside the convex hull.
pub fn euclidean_mean(vertices: &[HyperbolicPoint]) -> HyperbolicPoint {
    let mut s = DVector::zeros(vertices[0].coords().len());
    for v in vertices {
        s += v.coords();
    }
    HyperbolicPoint::from_timelike(&s).expect("sum of future timelike vectors is future timelike")
}

pub fn barycenter(vertices: &[HyperbolicPoint]) -> Result<HyperbolicPoint, VoronoiError> {
    barycenter_with_stats(vertices).map(|r| r.point)
}

/// Descent with step `1/(2m)` and backtracking halving, from the ambient mean.
pub fn barycenter_with_stats(vertices: &[HyperbolicPoint]) -> Result<BarycenterResult, VoronoiError> {
    if vertices.is_empty() {
        return Err(VoronoiError::EmptyInput);
    }
    if vertices.len() == 1 {
        return Ok(BarycenterResult {
            point: vertices[0].clone(),
            iterations: 0,
            grad_norm: 0.0,
        });
    }
    let m = vertices.len() as f64;
    let mut x = euclidean_mean(vertices);
    let mut f = objective(&x, vertices);
    let mut gnorm = f64::INFINITY;
    for it in 0..MAX_ITER {
        let g = gradient(&x, vertices);
        gnorm = tangent_norm(&g);
        if gnorm < GRAD_TOL {
            return Ok(BarycenterResult {
                point: x,
                iterations: it,
                grad_norm: gnorm,
            });
        }
        let mut step = 1.0 / (2.0 * m);
        // near the minimum the decrease drops below the rounding of f
        let slack = 4.0 * f64::EPSILON * f.abs();
        let mut moved = false;
        for _ in 0..60 {
            let y = x.exp(&(&g * -step));
            let fy = objective(&y, vertices);
            if fy <= f - 0.25 * step * gnorm * gnorm + slack {
                x = y;
                f = fy;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            if gnorm < FLOOR_GRAD_TOL {
                return Ok(BarycenterResult {
                    point: x,
                    iterations: it,
                    grad_norm: gnorm,
                });
            }
            break;
        }
    }
    Err(VoronoiError::NoConvergence {
        iterations: MAX_ITER,
        grad_norm: gnorm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{GeodesicSegment, LorentzIsometry};

    #[test]
    fn single_and_pair() {
        let a = HyperbolicPoint::from_spatial(&[0.3, -1.0]);
        assert_eq!(barycenter(&[a.clone()]).unwrap(), a);
        let b = HyperbolicPoint::from_spatial(&[-0.7, 0.4]);
        let mid = GeodesicSegment::new(a.clone(), b.clone()).unwrap().midpoint();
        let c = barycenter(&[a, b]).unwrap();
        assert!(c.dist(&mid) < 1e-9);
    }

    #[test]
    fn rotation_orbit_gives_center() {
        let p = HyperbolicPoint::from_spatial(&[0.8, 0.3]);
        let k = 5;
        let pts: Vec<_> = (0..k)
            .map(|i| LorentzIsometry::rotation(2, 1, 2, 2.0 * std::f64::consts::PI * i as f64 / k as f64).apply(&p))
            .collect();
        let c = barycenter(&pts).unwrap();
        assert!(c.dist(&HyperbolicPoint::origin(2)) < 1e-8);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(barycenter(&[]), Err(VoronoiError::EmptyInput)));
    }
}
