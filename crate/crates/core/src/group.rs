//! Discrete isometry groups given by generators: bounded-displacement
//! enumeration, stabilizers, singular points and injectivity-radius bounds.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hyperbolic::{
    fixed_set_dim, GeometryError, HyperbolicPoint, IsometryClass, LorentzIsometry, REORTHO_PERIOD,
};

/// Max-abs entry difference under which two matrices are the same element.
pub const DEDUP_TOL: f64 = 1e-7;
/// Displacement below which an element fixes a point.
pub const FIX_TOL: f64 = 1e-7;
/// Default distance to a fixed set that counts as singular.
pub const SINGULAR_MARGIN: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("generator {index}: {source}")]
    InvalidGenerator { index: usize, source: GeometryError },
    #[error("group has no generators")]
    NoGenerators,
    #[error("generator {index} has dimension {got}, expected {expected}")]
    GeneratorDimension { index: usize, expected: usize, got: usize },
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("ball of radius {radius} is too small: {reason}")]
    BallTooSmall { radius: f64, reason: String },
    #[error("domain is unbounded with ball radius {radius}; try radius {suggested}")]
    UnboundedDomain { radius: f64, suggested: f64 },
    #[error("basepoint is singular (distance {distance:e} to a fixed set)")]
    SingularBasepoint { distance: f64 },
    #[error("group file: {0}")]
    Parse(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, GroupError>;

/// Group definition file contents.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub dimension: usize,
    pub label: String,
    pub generators: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deg_k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct GroupSpec {
    dimension: usize,
    pub label: String,
    generators: Vec<LorentzIsometry>,
    /// `inverse_of[i]` is the index of the inverse of generator `i`.
    inverse_of: Vec<usize>,
    pub volume: Option<f64>,
    pub deg_k: Option<u32>,
    pub q: Option<u32>,
}

impl GroupSpec {
    /// Appends missing inverses and drops duplicate generators.
    pub fn new(dimension: usize, label: impl Into<String>, generators: Vec<LorentzIsometry>) -> Result<Self> {
        if generators.is_empty() {
            return Err(GroupError::NoGenerators);
        }
        for (index, g) in generators.iter().enumerate() {
            if g.dim() != dimension {
                return Err(GroupError::GeneratorDimension {
                    index,
                    expected: dimension,
                    got: g.dim(),
                });
            }
        }
        let mut gens: Vec<LorentzIsometry> = Vec::new();
        let push = |gens: &mut Vec<LorentzIsometry>, g: LorentzIsometry| {
            if !gens.iter().any(|h| h.max_abs_diff(&g) < DEDUP_TOL) {
                gens.push(g);
            }
        };
        for g in &generators {
            push(&mut gens, g.clone());
        }
        for g in &generators {
            push(&mut gens, g.inverse());
        }
        let inverse_of = gens
            .iter()
            .map(|g| {
                let gi = g.inverse();
                gens.iter()
                    .position(|h| h.max_abs_diff(&gi) < DEDUP_TOL)
                    .expect("inverse appended above")
            })
            .collect();
        Ok(Self {
            dimension,
            label: label.into(),
            generators: gens,
            inverse_of,
            volume: None,
            deg_k: None,
            q: None,
        })
    }

    pub fn from_file(file: &GroupFile) -> Result<Self> {
        let n = file.dimension;
        let mut gens = Vec::with_capacity(file.generators.len());
        for (index, entries) in file.generators.iter().enumerate() {
            let g = LorentzIsometry::from_row_major(n, entries)
                .map_err(|source| GroupError::InvalidGenerator { index, source })?;
            gens.push(g);
        }
        let mut spec = Self::new(n, file.label.clone(), gens)?;
        spec.volume = file.volume;
        spec.deg_k = file.deg_k;
        spec.q = file.q;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GroupFile = serde_json::from_str(text).map_err(|e| GroupError::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    /// Generators as stored, including appended inverses.
    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            dimension: self.dimension,
            label: self.label.clone(),
            generators: self.generators.iter().map(|g| g.row_major()).collect(),
            volume: self.volume,
            deg_k: self.deg_k,
            q: self.q,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn generators(&self) -> &[LorentzIsometry] {
        &self.generators
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverse_of[i]
    }

    pub fn max_generator_displacement(&self, x: &HyperbolicPoint) -> f64 {
        self.generators
            .iter()
            .map(|g| g.displacement_at(x))
            .fold(0.0, f64::max)
    }

    /// The isometry spelled by a word of generator indices, applied right to left.
    pub fn evaluate(&self, word: &[u16]) -> LorentzIsometry {
        let mut g = LorentzIsometry::identity(self.dimension);
        for (k, &i) in word.iter().enumerate() {
            g = g.compose(&self.generators[i as usize]);
            if (k + 1) % REORTHO_PERIOD == 0 {
                g = g.reorthonormalize();
            }
        }
        g
    }
}

#[derive(Clone, Debug)]
pub struct BallElement {
    pub element: LorentzIsometry,
    /// Generator indices; the element is their product in order.
    pub word: Vec<u16>,
    pub displacement: f64,
}

#[derive(Clone, Debug)]
pub struct OrbitBall {
    basepoint: HyperbolicPoint,
    radius: f64,
    elements: Vec<BallElement>,
    pub certified: bool,
    pub max_word_len: usize,
    /// Displacement explored beyond `radius` during the search.
    pub margin: f64,
    index: ElementIndex,
}

/// Bucketed near-duplicate detection for group elements.
#[derive(Clone, Debug)]
struct ElementIndex {
    buckets: HashMap<i64, Vec<usize>>,
}

impl ElementIndex {
    fn new() -> Self {
        Self {
            buckets: HashMap::new(),
        }
    }

    fn key(g: &LorentzIsometry) -> i64 {
        (g.matrix()[(0, 0)] * 1e5).round() as i64
    }

    fn find(&self, g: &LorentzIsometry, pool: &[BallElement]) -> Option<usize> {
        let k = Self::key(g);
        for kk in [k - 1, k, k + 1] {
            if let Some(ids) = self.buckets.get(&kk) {
                for &i in ids {
                    if pool[i].element.max_abs_diff(g) < DEDUP_TOL {
                        return Some(i);
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, g: &LorentzIsometry, id: usize) {
        self.buckets.entry(Self::key(g)).or_default().push(id);
    }
}

/// Breadth-first word search keeping elements of displacement at most `radius`
/// at `basepoint`. Words are pruned once their displacement passes
/// `radius + 2 * max generator displacement`.
pub fn enumerate_ball(
    spec: &GroupSpec,
    basepoint: &HyperbolicPoint,
    radius: f64,
    max_word_len: usize,
) -> Result<OrbitBall> {
    if !(radius > 0.0) {
        return Err(GroupError::NonPositiveRadius(radius));
    }
    let margin = 2.0 * spec.max_generator_displacement(basepoint);
    let limit = radius + margin;
    let id = LorentzIsometry::identity(spec.dimension());
    let mut pool = vec![BallElement {
        element: id,
        word: Vec::new(),
        displacement: 0.0,
    }];
    let mut index = ElementIndex::new();
    index.insert(&pool[0].element, 0);
    let mut frontier = vec![0usize];
    let mut certified = false;
    for len in 1..=max_word_len {
        let candidates: Vec<Vec<(LorentzIsometry, Vec<u16>, f64)>> = frontier
            .par_iter()
            .map(|&f| {
                let base = &pool[f];
                let mut out = Vec::new();
                for (gi, g) in spec.generators().iter().enumerate() {
                    // skip immediate cancellation
                    if let Some(&last) = base.word.last() {
                        if spec.inverse_index(last as usize) == gi {
                            continue;
                        }
                    }
                    let mut h = base.element.compose(g);
                    if len % REORTHO_PERIOD == 0 {
                        h = h.reorthonormalize();
                    }
                    let d = h.displacement_at(basepoint);
                    if d <= limit {
                        let mut w = base.word.clone();
                        w.push(gi as u16);
                        out.push((h, w, d));
                    }
                }
                out
            })
            .collect();
        let mut next = Vec::new();
        for (h, w, d) in candidates.into_iter().flatten() {
            if index.find(&h, &pool).is_none() {
                let id = pool.len();
                index.insert(&h, id);
                pool.push(BallElement {
                    element: h,
                    word: w,
                    displacement: d,
                });
                next.push(id);
            }
        }
        if next.is_empty() {
            certified = true;
            break;
        }
        frontier = next;
    }
    let mut elements: Vec<BallElement> = pool.into_iter().filter(|e| e.displacement <= radius).collect();
    // Close under inverses; only adds anything for uncertified balls.
    let mut index = ElementIndex::new();
    for (i, e) in elements.iter().enumerate() {
        index.insert(&e.element, i);
    }
    let count = elements.len();
    for i in 0..count {
        let inv = elements[i].element.inverse();
        if index.find(&inv, &elements).is_none() {
            let word = elements[i]
                .word
                .iter()
                .rev()
                .map(|&g| spec.inverse_index(g as usize) as u16)
                .collect();
            let d = elements[i].displacement;
            let id = elements.len();
            index.insert(&inv, id);
            elements.push(BallElement {
                element: inv,
                word,
                displacement: d,
            });
        }
    }
    Ok(OrbitBall {
        basepoint: basepoint.clone(),
        radius,
        elements,
        certified,
        max_word_len,
        margin,
        index,
    })
}

impl OrbitBall {
    pub fn basepoint(&self) -> &HyperbolicPoint {
        &self.basepoint
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn elements(&self) -> &[BallElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn isometries(&self) -> impl Iterator<Item = &LorentzIsometry> {
        self.elements.iter().map(|e| &e.element)
    }

    /// Index of an element equal to `g` within [`DEDUP_TOL`].
    pub fn find(&self, g: &LorentzIsometry) -> Option<usize> {
        self.index.find(g, &self.elements)
    }

    /// Non-identity elliptic elements with their fixed subspaces.
    pub fn elliptic_elements(&self) -> Vec<(usize, nalgebra::DMatrix<f64>)> {
        self.elements
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, e)| e.element.classify() == IsometryClass::Elliptic)
            .map(|(i, e)| (i, e.element.fixed_subspace()))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InjectivityBound {
    /// Half the least translation length found; infinite if none.
    pub value: f64,
    pub certified: bool,
    /// Ball index of the shortest hyperbolic element.
    pub witness: Option<usize>,
}

/// Half the minimal translation length over hyperbolic ball elements.
///
/// Certified only when the ball is certified, `domain_radius` (the radius of
/// a fundamental domain around the basepoint) is known, and the ball reaches
/// `2 * value + 2 * domain_radius`, so every conjugacy class of shorter
/// elements has a representative in the ball.
pub fn injectivity_radius_lower(ball: &OrbitBall, domain_radius: Option<f64>) -> InjectivityBound {
    let mut best = f64::INFINITY;
    let mut witness = None;
    for (i, e) in ball.elements.iter().enumerate() {
        if let Ok(l) = e.element.translation_length() {
            if 0.5 * l < best {
                best = 0.5 * l;
                witness = Some(i);
            }
        }
    }
    let certified = match (witness, domain_radius) {
        (Some(_), Some(rad)) => ball.certified && ball.radius >= 2.0 * best + 2.0 * rad,
        _ => false,
    };
    InjectivityBound {
        value: best,
        certified,
        witness,
    }
}

#[derive(Clone, Debug)]
pub struct StabilizerReport {
    pub point: HyperbolicPoint,
    /// Ball indices of the fixing elements (identity first).
    pub elements: Vec<usize>,
    pub order: usize,
    /// Dimension of the common fixed set, `n` for the trivial group.
    pub stratum: usize,
}

/// Elements of `ball` fixing `x` within `tol`, checked for closure.
pub fn stabilizer_with_tol(ball: &OrbitBall, x: &HyperbolicPoint, tol: f64) -> Result<StabilizerReport> {
    let reach = 2.0 * ball.basepoint.dist(x);
    if ball.radius < reach {
        return Err(GroupError::BallTooSmall {
            radius: ball.radius,
            reason: format!("stabilizer at distance {:.4} needs radius {:.4}", reach / 2.0, reach),
        });
    }
    let ids: Vec<usize> = ball
        .elements
        .iter()
        .enumerate()
        .filter(|(_, e)| e.element.displacement_at(x) < tol)
        .map(|(i, _)| i)
        .collect();
    for &a in &ids {
        for &b in &ids {
            let ab = ball.elements[a].element.compose(&ball.elements[b].element);
            let scale = ab.matrix().amax().max(1.0);
            let found = ids
                .iter()
                .any(|&c| ball.elements[c].element.max_abs_diff(&ab) < 1e-6 * scale);
            if !found {
                return Err(GroupError::BallTooSmall {
                    radius: ball.radius,
                    reason: "stabilizer is not closed under composition".into(),
                });
            }
        }
    }
    let gens: Vec<LorentzIsometry> = ids.iter().map(|&i| ball.elements[i].element.clone()).collect();
    let stratum = if ids.len() <= 1 {
        x.dim()
    } else {
        fixed_set_dim(&gens).unwrap_or(0)
    };
    Ok(StabilizerReport {
        point: x.clone(),
        order: ids.len(),
        elements: ids,
        stratum,
    })
}

pub fn stabilizer(ball: &OrbitBall, x: &HyperbolicPoint) -> Result<StabilizerReport> {
    stabilizer_with_tol(ball, x, FIX_TOL)
}

/// Fixed sets of the elliptic elements of a ball, for repeated singularity queries.
#[derive(Clone, Debug)]
pub struct SingularIndex {
    fixed: Vec<(usize, nalgebra::DMatrix<f64>)>,
}

impl SingularIndex {
    pub fn new(ball: &OrbitBall) -> Self {
        Self {
            fixed: ball.elliptic_elements(),
        }
    }

    /// Only elements whose fixed set passes within `reach` of `center`.
    pub fn near(ball: &OrbitBall, center: &HyperbolicPoint, reach: f64) -> Self {
        let fixed = ball
            .elliptic_elements()
            .into_iter()
            .filter(|(_, basis)| {
                crate::hyperbolic::distance_to_subspace(basis, center).is_some_and(|(d, _)| d <= reach)
            })
            .collect();
        Self { fixed }
    }

    pub fn is_empty(&self) -> bool {
        self.fixed.is_empty()
    }

    /// Ball indices of the indexed elliptic elements.
    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.fixed.iter().map(|(i, _)| *i)
    }

    /// Distance from `x` to the nearest fixed set, with its foot and element.
    /// Only elements moving `x` by at most `2 * cutoff` are examined.
    pub fn nearest(&self, ball: &OrbitBall, x: &HyperbolicPoint, cutoff: f64) -> Option<(f64, HyperbolicPoint, usize)> {
        let mut best: Option<(f64, HyperbolicPoint, usize)> = None;
        for (i, basis) in &self.fixed {
            // a point within d of Fix(g) is moved by at most 2d
            if ball.elements[*i].element.displacement_at(x) > 2.0 * cutoff + 1e-12 {
                continue;
            }
            if let Some((d, foot)) = crate::hyperbolic::distance_to_subspace(basis, x) {
                if d <= cutoff && best.as_ref().map_or(true, |b| d < b.0) {
                    best = Some((d, foot, *i));
                }
            }
        }
        best
    }

    pub fn is_singular(&self, ball: &OrbitBall, x: &HyperbolicPoint, margin: f64) -> bool {
        self.nearest(ball, x, margin).is_some()
    }
}

/// True iff `x` is within `margin` of the fixed set of a non-identity elliptic element.
pub fn is_singular(ball: &OrbitBall, x: &HyperbolicPoint, margin: f64) -> bool {
    SingularIndex::new(ball).is_singular(ball, x, margin)
}

/// Largest stabilizer order found by projecting samples onto nearby fixed
/// sets; a lower bound on the true maximal finite subgroup order.
pub fn max_finite_order(ball: &OrbitBall, samples: &[HyperbolicPoint], reach: f64) -> Result<usize> {
    let index = SingularIndex::new(ball);
    let mut q = 1;
    for x in samples {
        for (i, basis) in &index.fixed {
            if ball.elements[*i].element.displacement_at(x) > 2.0 * reach {
                continue;
            }
            if let Some((d, foot)) = crate::hyperbolic::distance_to_subspace(basis, x) {
                if d <= reach {
                    q = q.max(stabilizer(ball, &foot)?.order);
                }
            }
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(t: f64) -> GroupSpec {
        GroupSpec::new(2, "cyclic", vec![LorentzIsometry::boost(2, 1, t)]).unwrap()
    }

    #[test]
    fn inverses_appended() {
        let s = cyclic(1.0);
        assert_eq!(s.generators().len(), 2);
        assert_eq!(s.inverse_index(0), 1);
        assert_eq!(s.inverse_index(1), 0);
        // an involution is its own inverse
        let r = GroupSpec::new(2, "r", vec![LorentzIsometry::rotation(2, 1, 2, std::f64::consts::PI)]).unwrap();
        assert_eq!(r.generators().len(), 1);
        assert_eq!(r.inverse_index(0), 0);
    }

    #[test]
    fn small_radius_gives_identity_only() {
        let s = cyclic(1.0);
        let b = enumerate_ball(&s, &HyperbolicPoint::origin(2), 0.5, 10).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b.certified);
    }

    #[test]
    fn cyclic_ball_counts() {
        let s = cyclic(1.0);
        let b = enumerate_ball(&s, &HyperbolicPoint::origin(2), 3.5, 20).unwrap();
        assert_eq!(b.len(), 7);
        assert!(b.certified);
        let inj = injectivity_radius_lower(&b, Some(0.5));
        assert!((inj.value - 0.5).abs() < 1e-12);
        assert!(inj.certified);
    }

    #[test]
    fn elliptic_elements_ignored_for_injectivity() {
        let r = LorentzIsometry::rotation(3, 2, 3, std::f64::consts::PI / 2.0);
        let s = GroupSpec::new(3, "boost x rot", vec![LorentzIsometry::boost(3, 1, 0.8), r]).unwrap();
        let b = enumerate_ball(&s, &HyperbolicPoint::origin(3), 2.0, 12).unwrap();
        let inj = injectivity_radius_lower(&b, None);
        assert!((inj.value - 0.4).abs() < 1e-12);
        assert!(!inj.certified);
    }

    #[test]
    fn torsion_free_has_no_singular_points() {
        let s = cyclic(1.0);
        let b = enumerate_ball(&s, &HyperbolicPoint::origin(2), 4.0, 20).unwrap();
        assert!(!is_singular(&b, &HyperbolicPoint::origin(2), 0.1));
        let st = stabilizer(&b, &HyperbolicPoint::origin(2)).unwrap();
        assert_eq!(st.order, 1);
        assert_eq!(st.stratum, 2);
        assert_eq!(max_finite_order(&b, &[HyperbolicPoint::origin(2)], 1.0).unwrap(), 1);
    }
}
