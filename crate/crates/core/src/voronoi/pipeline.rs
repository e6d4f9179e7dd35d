//! Group to good triangulation in one call.

use super::complex::{build_voronoi, VoronoiComplex, MAX_WORD_LEN};
use super::separated::{build_separated_set, orbifold_q, orbifold_volume, SeparatedSet, SeparatedSetParams};
use super::triangulation::{barycentric_subdivision, GoodTriangulation};
use super::Result;
use crate::domain::{dirichlet_domain_auto, DirichletDomain};
use crate::group::{enumerate_ball, GroupSpec, OrbitBall};
use crate::hyperbolic::{HyperbolicPoint, LorentzIsometry};

/// Basepoints closer than this to a fixed set are nudged away.
const BASEPOINT_MARGIN: f64 = 1e-2;

#[derive(Clone, Debug)]
pub struct PipelineParams {
    pub epsilon: f64,
    pub seed: u64,
    pub probes: usize,
    pub basepoint: Option<HyperbolicPoint>,
    /// Largest ball radius tried for the Dirichlet domain.
    pub max_domain_ball: f64,
}

impl PipelineParams {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            seed,
            probes: 4096,
            basepoint: None,
            max_domain_ball: 12.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub domain: DirichletDomain,
    pub set: SeparatedSet,
    pub complex: VoronoiComplex,
    pub triangulation: GoodTriangulation,
    pub q: usize,
    pub volume: f64,
}

/// The origin, or the first point of a fixed spiral that is clear of every fixed set.
pub fn choose_basepoint(spec: &GroupSpec) -> Result<HyperbolicPoint> {
    let n = spec.dimension();
    let o = HyperbolicPoint::origin(n);
    let ball = enumerate_ball(spec, &o, 2.0, MAX_WORD_LEN)?;
    let clear = |x: &HyperbolicPoint| !crate::group::is_singular(&ball, x, BASEPOINT_MARGIN);
    if clear(&o) {
        return Ok(o);
    }
    for k in 1..200 {
        let t = 0.013 * k as f64;
        let mut g = LorentzIsometry::boost(n, 1, t);
        for axis in 2..=n {
            g = LorentzIsometry::rotation(n, 1, axis, 0.7 * k as f64 + axis as f64).compose(&g);
        }
        let x = g.apply(&o);
        if clear(&x) {
            return Ok(x);
        }
    }
    Ok(o)
}

pub fn triangulate(spec: &GroupSpec, params: &PipelineParams) -> Result<PipelineOutput> {
    let p0 = match &params.basepoint {
        Some(p) => p.clone(),
        None => choose_basepoint(spec)?,
    };
    let (domain, _) = dirichlet_domain_auto(spec, &p0, 2.0, params.max_domain_ball, MAX_WORD_LEN)?;
    let ball: OrbitBall = enumerate_ball(spec, &p0, 2.0 * domain.radius + 4.0 * params.epsilon.min(domain.radius) + 0.1, MAX_WORD_LEN)?;
    let mut sp = SeparatedSetParams::new(params.epsilon, params.seed);
    sp.probes = params.probes;
    let set = build_separated_set(spec, &domain, &ball, &sp)?;
    let complex = build_voronoi(spec, &domain, &set)?;
    let triangulation = barycentric_subdivision(&complex)?;
    let q = orbifold_q(spec, &domain, &ball)?;
    let volume = orbifold_volume(spec, &domain);
    Ok(PipelineOutput {
        domain,
        set,
        complex,
        triangulation,
        q,
        volume,
    })
}
