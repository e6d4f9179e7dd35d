//! Dirichlet fundamental domains.

use crate::cell::HyperbolicCell;
use crate::group::{enumerate_ball, GroupError, GroupSpec, OrbitBall, Result};
use crate::hyperbolic::HyperbolicPoint;

#[derive(Clone, Debug)]
pub struct DirichletDomain {
    pub cell: HyperbolicCell,
    /// Largest distance from the basepoint to a vertex.
    pub radius: f64,
    /// Radius of the ball the domain was cut from.
    pub ball_radius: f64,
}

impl DirichletDomain {
    pub fn basepoint(&self) -> &HyperbolicPoint {
        self.cell.site()
    }

    /// The domain equals the true Dirichlet domain once the ball reaches twice its radius.
    pub fn is_exact(&self) -> bool {
        self.ball_radius >= 2.0 * self.radius
    }

    pub fn contains(&self, x: &HyperbolicPoint, tol: f64) -> bool {
        self.cell.contains(x, tol)
    }
}

/// The cell of the basepoint among its orbit points, bounded or not.
pub fn dirichlet_cell(ball: &OrbitBall) -> Result<HyperbolicCell> {
    let p0 = ball.basepoint();
    let mut others = Vec::with_capacity(ball.len());
    for (i, e) in ball.elements().iter().enumerate().skip(1) {
        let y = e.element.apply(p0);
        let d = y.dist(p0);
        if d < 1e-7 {
            return Err(GroupError::SingularBasepoint { distance: d / 2.0 });
        }
        others.push((i, y));
    }
    HyperbolicCell::build(p0, &others).map_err(|e| GroupError::BallTooSmall {
        radius: ball.radius(),
        reason: e.to_string(),
    })
}

/// Bisector intersection over the ball; errors when the result is unbounded.
pub fn dirichlet_domain(ball: &OrbitBall) -> Result<DirichletDomain> {
    let cell = dirichlet_cell(ball)?;
    if !cell.is_bounded() {
        return Err(GroupError::UnboundedDomain {
            radius: ball.radius(),
            suggested: 2.0 * ball.radius(),
        });
    }
    let radius = cell.radius();
    Ok(DirichletDomain {
        cell,
        radius,
        ball_radius: ball.radius(),
    })
}

/// Doubles the ball radius from `start` until the domain is exact, up to `max_radius`.
pub fn dirichlet_domain_auto(
    spec: &GroupSpec,
    basepoint: &HyperbolicPoint,
    start: f64,
    max_radius: f64,
    max_word_len: usize,
) -> Result<(DirichletDomain, OrbitBall)> {
    let mut r = start;
    loop {
        let ball = enumerate_ball(spec, basepoint, r, max_word_len)?;
        match dirichlet_domain(&ball) {
            Ok(d) if d.is_exact() => return Ok((d, ball)),
            Ok(d) if 2.0 * d.radius <= max_radius => r = (2.0 * d.radius + 1e-3).max(r * 1.25),
            Ok(_) | Err(GroupError::UnboundedDomain { .. }) if 2.0 * r <= max_radius => r *= 2.0,
            Ok(_) => {
                return Err(GroupError::UnboundedDomain {
                    radius: r,
                    suggested: 2.0 * r,
                })
            }
            Err(e) => return Err(e),
        }
    }
}
