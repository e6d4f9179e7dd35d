//! Greedy maximal 2ε-separated sets of non-singular points in the quotient.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Result, VoronoiError};
use crate::domain::DirichletDomain;
use crate::group::{max_finite_order, GroupSpec, OrbitBall, SingularIndex};
use crate::hyperbolic::{ball_volume, HyperbolicPoint};

/// Samples drawn before giving up on finding a non-singular first site.
const SEED_ATTEMPTS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct SeparatedSetParams {
    pub epsilon: f64,
    pub seed: u64,
    /// Stop after `stop_factor * max(|S|, 1)` consecutive rejections.
    pub stop_factor: usize,
    /// Uniform probes used for the covering certificate.
    pub probes: usize,
    /// Required distance from singular strata; defaults to `min(eps/4, 1e-3)`.
    pub singular_margin: Option<f64>,
    /// Hard cap on candidates drawn.
    pub max_candidates: usize,
}

impl SeparatedSetParams {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            seed,
            stop_factor: 64,
            probes: 4096,
            singular_margin: None,
            max_candidates: 2_000_000,
        }
    }

    pub fn margin(&self) -> f64 {
        self.singular_margin.unwrap_or((self.epsilon / 4.0).min(1e-3))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoveringCertificate {
    pub probes: usize,
    /// Largest quotient distance from a probe to the nearest site.
    pub covering_radius_estimate: f64,
    /// Non-singular probes farther than 2ε from every site.
    pub uncovered: usize,
    /// 95% upper confidence bound on the uncovered volume fraction.
    pub uncovered_fraction_upper95: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PackingCheck {
    pub count: usize,
    pub q: usize,
    pub volume: f64,
    pub v_eps: f64,
    /// `q * volume / v_eps`; meaningful when ε is below the injectivity scale.
    pub bound: f64,
    pub holds: bool,
    /// `sum_j v_r / N_j` with `r = min(ε, domain radius)` and `N_j` the orbit
    /// points of site `j` within `2r`; never exceeds the volume for a true
    /// quotient-separated set.
    pub covered_volume_lower: f64,
    pub consistent: bool,
}

#[derive(Clone, Debug)]
pub struct SeparatedSet {
    pub epsilon: f64,
    pub singular_margin: f64,
    /// Representatives inside the Dirichlet domain.
    pub sites: Vec<HyperbolicPoint>,
    pub candidates: usize,
    pub rejected_singular: usize,
    pub rejected_close: usize,
    pub covering: CoveringCertificate,
    pub packing: PackingCheck,
}

impl SeparatedSet {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Lifts of sites near the domain, for quotient-distance queries from domain points.
#[derive(Clone, Debug, Default)]
pub struct SiteLifts {
    pub points: Vec<(usize, HyperbolicPoint)>,
    window: f64,
}

impl SiteLifts {
    /// Lifts within `window` of the ball's basepoint.
    pub fn new(window: f64) -> Self {
        Self {
            points: Vec::new(),
            window,
        }
    }

    pub fn push(&mut self, ball: &OrbitBall, site: usize, x: &HyperbolicPoint) {
        let p0 = ball.basepoint();
        let reach = x.dist(p0) + self.window;
        for e in ball.elements() {
            if e.displacement > reach {
                continue;
            }
            let y = e.element.apply(x);
            if y.dist(p0) <= self.window {
                self.points.push((site, y));
            }
        }
    }

    /// Nearest lift as `(site, distance)`.
    pub fn nearest(&self, x: &HyperbolicPoint) -> Option<(usize, f64)> {
        self.points
            .iter()
            .map(|(s, y)| (*s, x.dist(y)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
    }
}

/// Greedy insertion of uniformly sampled domain points; see [`SeparatedSetParams`].
pub fn build_separated_set(
    spec: &GroupSpec,
    domain: &DirichletDomain,
    ball: &OrbitBall,
    params: &SeparatedSetParams,
) -> Result<SeparatedSet> {
    let eps = params.epsilon;
    if !(eps > 0.0) {
        return Err(VoronoiError::BadEpsilon(eps));
    }
    let rad = domain.radius;
    // quotient distances never exceed twice the domain radius
    let eff = eps.min(rad);
    let need = 2.0 * rad + 4.0 * eff;
    if ball.radius() < need {
        return Err(VoronoiError::BallTooSmall {
            radius: ball.radius(),
            reason: format!("separated set needs radius {need:.4}"),
        });
    }
    let n = spec.dimension();
    let p0 = ball.basepoint();
    let margin = params.margin();
    let singular = SingularIndex::near(ball, p0, rad + margin);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut sites: Vec<HyperbolicPoint> = Vec::new();
    let mut lifts = SiteLifts::new(rad + 2.0 * eff);
    let (mut candidates, mut rej_sing, mut rej_close, mut streak) = (0usize, 0usize, 0usize, 0usize);
    while candidates < params.max_candidates {
        if !sites.is_empty() && streak >= params.stop_factor * sites.len().max(1) {
            break;
        }
        let x = domain.cell.sample_uniform(&mut rng);
        candidates += 1;
        if singular.is_singular(ball, &x, margin) {
            rej_sing += 1;
            streak += 1;
            if sites.is_empty() && candidates >= SEED_ATTEMPTS {
                return Err(VoronoiError::NoNonsingularPoint { attempts: candidates });
            }
            continue;
        }
        if lifts.nearest(&x).is_some_and(|(_, d)| d < 2.0 * eps) {
            rej_close += 1;
            streak += 1;
            continue;
        }
        lifts.push(ball, sites.len(), &x);
        sites.push(x);
        streak = 0;
    }

    // covering certificate from fresh probes
    let mut probe_lifts = SiteLifts::new(rad + 4.0 * eff);
    for (i, s) in sites.iter().enumerate() {
        probe_lifts.push(ball, i, s);
    }
    let mut worst: f64 = 0.0;
    let mut uncovered = 0;
    for _ in 0..params.probes {
        let x = domain.cell.sample_uniform(&mut rng);
        let d = probe_lifts.nearest(&x).map_or(f64::INFINITY, |(_, d)| d);
        worst = worst.max(d);
        if d >= 2.0 * eps && !singular.is_singular(ball, &x, margin) {
            uncovered += 1;
        }
    }
    let k = params.probes.max(1) as f64;
    let upper = if uncovered == 0 {
        3.0 / k
    } else {
        let p = uncovered as f64 / k;
        (p + 1.96 * (p * (1.0 - p) / k).sqrt()).min(1.0)
    };
    let covering = CoveringCertificate {
        probes: params.probes,
        covering_radius_estimate: worst,
        uncovered,
        uncovered_fraction_upper95: upper,
    };

    let packing = packing_check(spec, domain, ball, &sites, eps, n)?;
    if !packing.consistent {
        return Err(VoronoiError::PackingViolated {
            count: packing.count,
            bound: packing.volume,
        });
    }
    Ok(SeparatedSet {
        epsilon: eps,
        singular_margin: margin,
        sites,
        candidates,
        rejected_singular: rej_sing,
        rejected_close: rej_close,
        covering,
        packing,
    })
}

/// Orbifold volume: the declared value, else the exact or sampled domain volume.
pub fn orbifold_volume(spec: &GroupSpec, domain: &DirichletDomain) -> f64 {
    if let Some(v) = spec.volume {
        return v;
    }
    if let Some(a) = domain.cell.area_exact() {
        return a;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    domain.cell.volume_mc(200_000, &mut rng).map_or(f64::NAN, |(v, _)| v)
}

/// Maximal finite stabilizer order: declared, else observed at domain vertices.
pub fn orbifold_q(spec: &GroupSpec, domain: &DirichletDomain, ball: &OrbitBall) -> Result<usize> {
    if let Some(q) = spec.q {
        return Ok(q as usize);
    }
    let pts = domain.cell.vertex_points().unwrap_or_default();
    Ok(max_finite_order(ball, &pts, 1e-6)?)
}

fn packing_check(
    spec: &GroupSpec,
    domain: &DirichletDomain,
    ball: &OrbitBall,
    sites: &[HyperbolicPoint],
    eps: f64,
    n: usize,
) -> Result<PackingCheck> {
    let count = sites.len();
    let q = orbifold_q(spec, domain, ball)?;
    let volume = orbifold_volume(spec, domain);
    let v_eps = ball_volume(n, eps);
    let bound = q as f64 * volume / v_eps;
    let r = eps.min(domain.radius);
    let v_r = ball_volume(n, r);
    let covered: f64 = sites
        .iter()
        .map(|s| {
            let fiber = ball.isometries().filter(|g| g.apply(s).dist(s) < 2.0 * r).count().max(1);
            v_r / fiber as f64
        })
        .sum();
    Ok(PackingCheck {
        count,
        q,
        volume,
        v_eps,
        bound,
        holds: count as f64 <= bound,
        covered_volume_lower: covered,
        consistent: covered <= volume * (1.0 + 1e-9),
    })
}
