//! Voronoi cells of the lifted separated set.

use rayon::prelude::*;

use super::separated::SeparatedSet;
use super::{Result, VoronoiError};
use crate::cell::HyperbolicCell;
use crate::domain::DirichletDomain;
use crate::group::{enumerate_ball, GroupSpec, OrbitBall};
use crate::hyperbolic::HyperbolicPoint;
use crate::polytope::Face;

/// Word-length cap for working balls; enumeration normally stops by certification.
pub const MAX_WORD_LEN: usize = 10_000;
/// Lifts closer than this are the same point.
const LIFT_DEDUP_TOL: f64 = 1e-9;
/// Doublings of the neighbor radius before giving up.
const MAX_DOUBLINGS: usize = 6;

#[derive(Clone, Debug)]
pub struct LiftedSite {
    pub site: usize,
    /// Ball index of the element carrying the representative to `point`.
    pub element: usize,
    pub point: HyperbolicPoint,
}

/// Lifts `g s` of the sites with `dist(p0, g s) <= window`, deduplicated.
pub fn lift_sites(sites: &[HyperbolicPoint], ball: &OrbitBall, window: f64) -> Vec<LiftedSite> {
    let p0 = ball.basepoint();
    let mut out: Vec<LiftedSite> = Vec::new();
    for (j, s) in sites.iter().enumerate() {
        let reach = s.dist(p0) + window;
        let first = out.len();
        for (k, e) in ball.elements().iter().enumerate() {
            if e.displacement > reach {
                continue;
            }
            let y = e.element.apply(s);
            if y.dist(p0) > window {
                continue;
            }
            // distinct sites are separated, so only lifts of the same site can collide
            if out[first..].iter().any(|l| l.point.dist(&y) < LIFT_DEDUP_TOL) {
                continue;
            }
            out.push(LiftedSite {
                site: j,
                element: k,
                point: y,
            });
        }
    }
    out
}

/// Cell of `site` against the lifted sites within `reach` of it, tagged by lift index.
pub fn voronoi_cell(site: &HyperbolicPoint, lifted: &[LiftedSite], reach: f64) -> Result<HyperbolicCell> {
    let others: Vec<(usize, HyperbolicPoint)> = lifted
        .iter()
        .enumerate()
        .filter(|(_, l)| {
            let d = l.point.dist(site);
            d > LIFT_DEDUP_TOL && d <= reach
        })
        .map(|(i, l)| (i, l.point.clone()))
        .collect();
    Ok(HyperbolicCell::build(site, &others)?)
}

#[derive(Clone, Debug)]
pub struct VoronoiComplex {
    pub epsilon: f64,
    /// Site representatives in the Dirichlet domain.
    pub sites: Vec<HyperbolicPoint>,
    pub lifted: Vec<LiftedSite>,
    /// One cell per representative; constraint tags index `lifted`.
    pub cells: Vec<HyperbolicCell>,
    /// Face lattice of each cell, by dimension.
    pub faces: Vec<Vec<Vec<Face>>>,
    /// Bisectors are taken against lifts within this distance of a site.
    pub neighbor_radius: f64,
    pub domain_radius: f64,
    pub ball: OrbitBall,
}

/// Builds all representative cells, doubling the neighbor radius until every
/// cell is bounded and has radius at most half of it.
pub fn build_voronoi(spec: &GroupSpec, domain: &DirichletDomain, set: &SeparatedSet) -> Result<VoronoiComplex> {
    let eps = set.epsilon;
    let rad = domain.radius;
    let p0 = domain.basepoint();
    // a cell lies within twice the domain radius of its site
    let mut reach = (5.0 * eps).min(4.0 * rad + 1e-3);
    let mut bad = 0;
    for _ in 0..=MAX_DOUBLINGS {
        let ball = enumerate_ball(spec, p0, 2.0 * rad + reach + 0.1, MAX_WORD_LEN)?;
        let lifted = lift_sites(&set.sites, &ball, rad + reach);
        let cells: Vec<HyperbolicCell> = set
            .sites
            .par_iter()
            .map(|s| voronoi_cell(s, &lifted, reach))
            .collect::<Result<_>>()?;
        let fail = cells.iter().position(|c| !(c.is_bounded() && c.radius() <= 0.5 * reach));
        if let Some(j) = fail {
            bad = j;
        } else {
            let faces = cells.par_iter().map(|c| c.faces()).collect();
            return Ok(VoronoiComplex {
                epsilon: eps,
                sites: set.sites.clone(),
                lifted,
                cells,
                faces,
                neighbor_radius: reach,
                domain_radius: rad,
                ball,
            });
        }
        reach *= 2.0;
    }
    Err(VoronoiError::UnboundedCell { site: bad })
}

impl VoronoiComplex {
    pub fn dim(&self) -> usize {
        self.sites.first().map_or(0, |s| s.dim())
    }

    /// Index of the lifted site nearest to `x`, ties to the lower index.
    pub fn nearest_lift(&self, x: &HyperbolicPoint) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, l) in self.lifted.iter().enumerate() {
            let d = x.dist(&l.point);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Bisector violation of `x` against the cell of lifted site `i`.
    pub fn violation(&self, i: usize, x: &HyperbolicPoint) -> f64 {
        let l = &self.lifted[i];
        let g = &self.ball.elements()[l.element].element;
        self.cells[l.site].violation(&g.inverse().apply(x))
    }

    /// Lifted sites whose cell contains `x` within `tol`.
    pub fn containing_cells(&self, x: &HyperbolicPoint, tol: f64) -> Vec<usize> {
        let cut = 2.0 * self.neighbor_radius;
        (0..self.lifted.len())
            .filter(|&i| self.lifted[i].point.dist(x) <= cut && self.violation(i, x) <= tol)
            .collect()
    }

    /// Distinct site indices across the facets of cell `j`.
    pub fn neighbor_sites(&self, j: usize) -> Vec<usize> {
        let mut s: Vec<usize> = self.cells[j].facet_tags().iter().map(|&t| self.lifted[t].site).collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}
