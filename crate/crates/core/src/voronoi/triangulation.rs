//! Barycentric subdivision of the quotient Voronoi complex and its checks.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::barycenter::barycenter;
use super::complex::{LiftedSite, VoronoiComplex};
use super::orbit::{OrbitReducer, OrbitTable};
use super::{Result, VoronoiError};
use crate::group::{stabilizer, OrbitBall};
use crate::hyperbolic::{ball_volume, HyperbolicPoint, LorentzIsometry};

/// Barycentric coordinates below this count as zero.
pub const BARY_TOL: f64 = 1e-7;
/// A stabilizer element fixes a vertex when it moves it less than this.
const RIGID_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct TriVertex {
    /// Representative in the Dirichlet domain.
    pub rep: HyperbolicPoint,
    /// Dimension of the Voronoi face this is the barycenter of.
    pub source_dim: usize,
    /// Dimension of the fixed set of the stabilizer (`n` when trivial).
    pub stratum: usize,
    pub stabilizer_order: usize,
}

#[derive(Clone, Debug)]
pub struct TopSimplex {
    /// Representative cell the simplex lies in.
    pub cell: usize,
    /// `(vertex id, ball index)` ordered by source dimension; the vertex sits at `ball[k] . rep`.
    pub vertices: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct QuotientSimplex {
    /// Vertex ids ordered by source dimension.
    pub vertices: Vec<usize>,
    /// Top simplex and vertex mask this orbit was first seen in.
    pub origin: (usize, u32),
    pub stabilizer_order: usize,
}

#[derive(Clone, Debug)]
pub struct GoodTriangulation {
    pub dim: usize,
    pub vertices: Vec<TriVertex>,
    pub top: Vec<TopSimplex>,
    /// Orbits of simplices by dimension; `simplices[0][i]` is vertex `i`.
    pub simplices: Vec<Vec<QuotientSimplex>>,
    /// `simplex_faces[t][mask]`: orbit id of the face of top simplex `t` spanned by `mask`.
    pub simplex_faces: Vec<Vec<usize>>,
    /// Site representatives and their lifts, for locating points.
    pub sites: Vec<HyperbolicPoint>,
    pub lifted: Vec<LiftedSite>,
    pub ball: OrbitBall,
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
    }
    true
}

/// Normalized Lorentz sum.
fn centroid(points: &[HyperbolicPoint]) -> HyperbolicPoint {
    let mut s = DVector::zeros(points[0].coords().len());
    for p in points {
        s += p.coords();
    }
    HyperbolicPoint::from_timelike(&s).expect("sum of future timelike vectors")
}

/// Chains `F_0 < F_1 < ... < F_n` of a face lattice, as face indices per dimension.
pub fn flags(faces: &[Vec<crate::polytope::Face>]) -> Vec<Vec<usize>> {
    let n = faces.len() - 1;
    let mut out = Vec::new();
    let mut chain = vec![0usize; n + 1];
    fn go(faces: &[Vec<crate::polytope::Face>], d: usize, chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if d == 0 {
            out.push(chain.clone());
            return;
        }
        let upper = &faces[d][chain[d]].vertices;
        for (i, f) in faces[d - 1].iter().enumerate() {
            if is_subset(&f.vertices, upper) {
                chain[d - 1] = i;
                go(faces, d - 1, chain, out);
            }
        }
    }
    for top in 0..faces[n].len() {
        chain[n] = top;
        go(faces, n, &mut chain, &mut out);
    }
    out
}

/// One vertex per face orbit at its barycenter, one top simplex per flag of a
/// representative cell, and all lower simplices identified up to the group.
pub fn barycentric_subdivision(complex: &VoronoiComplex) -> Result<GoodTriangulation> {
    let n = complex.dim();
    let ball = &complex.ball;
    let reducer = OrbitReducer::new(ball);

    // face barycenters, parallel over cells
    let bary: Vec<Vec<Vec<HyperbolicPoint>>> = complex
        .cells
        .par_iter()
        .zip(complex.faces.par_iter())
        .map(|(cell, faces)| {
            let pts = cell
                .vertex_points()
                .ok_or_else(|| VoronoiError::Structure("cell vertex outside the Klein ball".into()))?;
            faces
                .iter()
                .map(|fs| {
                    fs.iter()
                        .map(|f| {
                            let vs: Vec<HyperbolicPoint> = f.vertices.iter().map(|&v| pts[v].clone()).collect();
                            barycenter(&vs)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    // vertex orbits, deterministic merge
    let mut table = OrbitTable::new();
    let mut vertices: Vec<TriVertex> = Vec::new();
    let mut face_vertex: Vec<Vec<Vec<(usize, usize)>>> = Vec::with_capacity(bary.len());
    for (j, cell_b) in bary.iter().enumerate() {
        let mut per_dim = Vec::with_capacity(n + 1);
        for (d, pts) in cell_b.iter().enumerate() {
            let mut row = Vec::with_capacity(pts.len());
            for b in pts {
                let look = table.lookup(&reducer, b);
                let lift = look.lift.ok_or_else(|| VoronoiError::BallTooSmall {
                    radius: ball.radius(),
                    reason: format!("lift of a face barycenter of cell {j} left the ball"),
                })?;
                if look.is_new {
                    vertices.push(TriVertex {
                        rep: table.entries[look.id].rep.clone(),
                        source_dim: d,
                        stratum: n,
                        stabilizer_order: 1,
                    });
                } else if vertices[look.id].source_dim != d {
                    return Err(VoronoiError::Structure(format!(
                        "face barycenters of dimensions {} and {d} share an orbit",
                        vertices[look.id].source_dim
                    )));
                }
                row.push((look.id, lift));
            }
            per_dim.push(row);
        }
        face_vertex.push(per_dim);
    }
    let stabs: Vec<(usize, usize)> = vertices
        .par_iter()
        .map(|v| stabilizer(ball, &v.rep).map(|s| (s.order, s.stratum)))
        .collect::<std::result::Result<_, _>>()?;
    for (v, (order, stratum)) in vertices.iter_mut().zip(stabs) {
        v.stabilizer_order = order;
        v.stratum = stratum;
    }

    // top simplices
    let mut top = Vec::new();
    for (j, faces) in complex.faces.iter().enumerate() {
        if faces.iter().any(|f| f.is_empty()) {
            return Err(VoronoiError::Structure(format!("cell {j} has an empty face dimension")));
        }
        for chain in flags(faces) {
            let verts = (0..=n).map(|d| face_vertex[j][d][chain[d]]).collect();
            top.push(TopSimplex { cell: j, vertices: verts });
        }
    }

    let mut t = GoodTriangulation {
        dim: n,
        simplices: vec![Vec::new(); n + 1],
        simplex_faces: Vec::new(),
        vertices,
        top,
        sites: complex.sites.clone(),
        lifted: complex.lifted.clone(),
        ball: ball.clone(),
    };
    t.simplices[0] = (0..t.vertices.len())
        .map(|i| QuotientSimplex {
            vertices: vec![i],
            origin: (usize::MAX, 0),
            stabilizer_order: t.vertices[i].stabilizer_order,
        })
        .collect();
    t.identify_faces(&reducer)?;
    Ok(t)
}

impl GoodTriangulation {
    /// Position of the `i`-th vertex of top simplex `t` in its cell's frame.
    pub fn top_point(&self, t: usize, i: usize) -> HyperbolicPoint {
        let (v, k) = self.top[t].vertices[i];
        self.ball.elements()[k].element.apply(&self.vertices[v].rep)
    }

    pub fn top_points(&self, t: usize) -> Vec<HyperbolicPoint> {
        (0..=self.dim).map(|i| self.top_point(t, i)).collect()
    }

    fn identify_faces(&mut self, reducer: &OrbitReducer) -> Result<()> {
        let n = self.dim;
        let masks = 1u32 << (n + 1);
        let mut tables: Vec<OrbitTable> = (0..=n).map(|_| OrbitTable::new()).collect();
        let mut faces = Vec::with_capacity(self.top.len());
        for t in 0..self.top.len() {
            let pts = self.top_points(t);
            let mut row = vec![usize::MAX; masks as usize];
            for mask in 1..masks {
                let idx: Vec<usize> = (0..=n).filter(|i| mask >> i & 1 == 1).collect();
                let d = idx.len() - 1;
                let verts: Vec<usize> = idx.iter().map(|&i| self.top[t].vertices[i].0).collect();
                if d == 0 {
                    row[mask as usize] = verts[0];
                    continue;
                }
                let sub: Vec<HyperbolicPoint> = idx.iter().map(|&i| pts[i].clone()).collect();
                let look = tables[d].lookup(reducer, &centroid(&sub));
                if look.is_new {
                    self.simplices[d].push(QuotientSimplex {
                        vertices: verts,
                        origin: (t, mask),
                        stabilizer_order: 1,
                    });
                } else if self.simplices[d][look.id].vertices != verts {
                    return Err(VoronoiError::Structure(format!(
                        "{d}-simplices with the same centroid orbit have different vertices"
                    )));
                }
                row[mask as usize] = look.id;
            }
            faces.push(row);
        }
        self.simplex_faces = faces;
        for d in 1..=n {
            let orders: Vec<usize> = tables[d]
                .entries
                .par_iter()
                .map(|e| stabilizer(&self.ball, &e.rep).map(|s| s.order))
                .collect::<std::result::Result<_, _>>()?;
            for (s, o) in self.simplices[d].iter_mut().zip(orders) {
                s.stabilizer_order = o;
            }
        }
        Ok(())
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(|s| s.len()).collect()
    }

    /// Alternating sum of orbit counts of simplices.
    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(d, s)| if d % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }

    /// Geodesic edge lengths of top simplex `t`, in mask order of vertex pairs.
    pub fn edge_lengths(&self, t: usize) -> Vec<f64> {
        let p = self.top_points(t);
        let mut out = Vec::new();
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                out.push(p[i].dist(&p[j]));
            }
        }
        out
    }

    /// Distinct neighbor orbits of each vertex in the quotient 1-skeleton.
    pub fn degrees(&self) -> Vec<usize> {
        let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for e in self.simplices.get(1).map_or(&[][..], |v| v.as_slice()) {
            let (a, b) = (e.vertices[0], e.vertices[1]);
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        nbrs.into_iter()
            .map(|mut x| {
                x.sort_unstable();
                x.dedup();
                x.len()
            })
            .collect()
    }

    /// Degree of a lift in H^n: edge orbits weighted by `|Stab v| / |Stab e|`.
    pub fn lifted_degrees(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.vertices.len()];
        for e in self.simplices.get(1).map_or(&[][..], |v| v.as_slice()) {
            for &v in &e.vertices {
                out[v] += self.vertices[v].stabilizer_order as f64 / e.stabilizer_order as f64;
            }
        }
        out
    }

    /// Moves a vertex representative; every lift moves with it.
    pub fn perturb_vertex(&mut self, v: usize, tangent: &DVector<f64>) {
        let rep = &self.vertices[v].rep;
        let t = rep.project_tangent(tangent);
        self.vertices[v].rep = rep.exp(&t);
    }

    /// Top simplices whose facets each lie in an even number of top simplices.
    pub fn verify_pseudomanifold(&self) -> PseudomanifoldReport {
        self.verify_pseudomanifold_subset(&vec![true; self.top.len()])
    }

    /// As [`Self::verify_pseudomanifold`] restricted to the active top simplices.
    pub fn verify_pseudomanifold_subset(&self, active: &[bool]) -> PseudomanifoldReport {
        let n = self.dim;
        let full = (1u32 << (n + 1)) - 1;
        let mut count = vec![0usize; self.simplices[n - 1].len()];
        for (t, row) in self.simplex_faces.iter().enumerate() {
            if !active[t] {
                continue;
            }
            for i in 0..=n {
                count[row[(full & !(1 << i)) as usize]] += 1;
            }
        }
        let odd: Vec<usize> = (0..count.len()).filter(|&f| count[f] % 2 == 1).collect();
        let max_incidence = count.iter().copied().max().unwrap_or(0);
        let mut distinct_dims = true;
        for top in &self.top {
            let mut dims: Vec<usize> = top.vertices.iter().map(|(v, _)| self.vertices[*v].source_dim).collect();
            dims.dedup();
            distinct_dims &= dims.len() == n + 1;
        }
        PseudomanifoldReport {
            ok: odd.is_empty() && distinct_dims,
            facets: count.len(),
            odd_facets: odd.len(),
            witness: odd.first().copied(),
            max_incidence,
            distinct_source_dims: distinct_dims,
        }
    }

    /// Mod-2 boundary matrix from top simplices to codimension-one orbits.
    pub fn boundary_matrix_mod2(&self) -> Vec<Vec<u8>> {
        let n = self.dim;
        let full = (1u32 << (n + 1)) - 1;
        let mut m = vec![vec![0u8; self.top.len()]; self.simplices[n - 1].len()];
        for (t, row) in self.simplex_faces.iter().enumerate() {
            for i in 0..=n {
                m[row[(full & !(1 << i)) as usize]][t] ^= 1;
            }
        }
        m
    }

    /// Lifted site nearest to `x`.
    fn nearest_lift(&self, x: &HyperbolicPoint) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, l) in self.lifted.iter().enumerate() {
            let d = x.dist(&l.point);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Top simplex containing `x` and its barycentric coordinates there.
    pub fn locate(&self, reducer: &OrbitReducer, x: &HyperbolicPoint) -> Option<(usize, Vec<f64>)> {
        let (_, rep, _) = reducer.reduce(x);
        let l = &self.lifted[self.nearest_lift(&rep)];
        let y = self.ball.elements()[l.element].element.inverse().apply(&rep);
        let chart = LorentzIsometry::translation_to(&y).inverse();
        let mut best: Option<(usize, Vec<f64>)> = None;
        for (t, top) in self.top.iter().enumerate() {
            if top.cell != l.site {
                continue;
            }
            let klein: Vec<Vec<f64>> = self.top_points(t).iter().map(|p| chart.apply(p).klein()).collect();
            let Some(lam) = barycentric_of_origin(&klein) else { continue };
            let m = lam.iter().copied().fold(f64::INFINITY, f64::min);
            if best.as_ref().map_or(true, |(_, b)| m > b.iter().copied().fold(f64::INFINITY, f64::min)) {
                best = Some((t, lam));
            }
        }
        best
    }
}

/// Barycentric coordinates of `0` with respect to `n + 1` points of R^n.
fn barycentric_of_origin(pts: &[Vec<f64>]) -> Option<Vec<f64>> {
    let k = pts.len();
    let mut a = DMatrix::zeros(k, k);
    for (j, p) in pts.iter().enumerate() {
        for (i, x) in p.iter().enumerate() {
            a[(i, j)] = *x;
        }
        a[(k - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(k);
    b[k - 1] = 1.0;
    a.lu().solve(&b).map(|v| v.iter().copied().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudomanifoldReport {
    pub ok: bool,
    pub facets: usize,
    pub odd_facets: usize,
    /// A codimension-one orbit lying in an odd number of top simplices.
    pub witness: Option<usize>,
    pub max_incidence: usize,
    pub distinct_source_dims: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularWitness {
    pub point: Vec<f64>,
    pub stratum: usize,
    pub stabilizer_order: usize,
    /// Dimension of the smallest simplex containing the point; `None` if no simplex does.
    pub simplex_dim: Option<usize>,
    pub nearest_vertex_distance: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodnessReport {
    pub ok: bool,
    /// Simplex orbits whose centroid stabilizer moves one of their vertices.
    pub non_rigid: Vec<(usize, usize)>,
    pub singular_points: Vec<SingularWitness>,
    pub failures: usize,
}

/// Singular points sampled by projecting probes onto nearby fixed sets,
/// deduplicated up to the group; vertex representatives are always probed.
pub fn sample_singular_points(t: &GoodTriangulation, samples: usize, reach: f64, seed: u64) -> Vec<HyperbolicPoint> {
    let ball = &t.ball;
    let reducer = OrbitReducer::new(ball);
    let elliptic = ball.elliptic_elements();
    let mut probes: Vec<HyperbolicPoint> = t.vertices.iter().map(|v| v.rep.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        if t.top.is_empty() {
            break;
        }
        let s = rng.gen_range(0..t.top.len());
        let pts = t.top_points(s);
        let w: Vec<f64> = (0..pts.len()).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let mut v = DVector::zeros(pts[0].coords().len());
        for (p, wi) in pts.iter().zip(&w) {
            v += p.coords() * *wi;
        }
        probes.push(HyperbolicPoint::from_timelike(&v).expect("positive combination"));
    }
    let mut table = OrbitTable::new();
    for x in &probes {
        for (i, basis) in &elliptic {
            if ball.elements()[*i].element.displacement_at(x) > 2.0 * reach {
                continue;
            }
            if let Some((d, foot)) = crate::hyperbolic::distance_to_subspace(basis, x) {
                if d <= reach {
                    table.lookup(&reducer, &foot);
                }
            }
        }
    }
    table.entries.into_iter().map(|e| e.rep).collect()
}

/// Goodness: centroid stabilizers fix their simplices, and every sampled
/// singular point lies in a simplex of dimension at most its stratum.
pub fn check_good(t: &GoodTriangulation, singular: &[HyperbolicPoint]) -> Result<GoodnessReport> {
    let ball = &t.ball;
    let reducer = OrbitReducer::new(ball);
    let mut non_rigid = Vec::new();
    for d in 1..=t.dim {
        for (s, simplex) in t.simplices[d].iter().enumerate() {
            let (top, mask) = simplex.origin;
            let pts: Vec<HyperbolicPoint> = (0..=t.dim)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| t.top_point(top, i))
                .collect();
            let (k, c, _) = reducer.reduce(&centroid(&pts));
            let g = &ball.elements()[k].element;
            let st = stabilizer(ball, &c)?;
            let rigid = st.elements.iter().all(|&h| {
                let h = &ball.elements()[h].element;
                pts.iter().all(|p| {
                    let q = g.inverse().apply(p);
                    h.apply(&q).dist(&q) < RIGID_TOL
                })
            });
            if !rigid {
                non_rigid.push((d, s));
            }
        }
    }
    let mut witnesses = Vec::new();
    for x in singular {
        let st = stabilizer(ball, x)?;
        let (simplex_dim, near) = match t.locate(&reducer, x) {
            Some((top, lam)) => {
                let inside = lam.iter().all(|&l| l >= -BARY_TOL);
                let dim = inside.then(|| lam.iter().filter(|&&l| l > BARY_TOL).count().saturating_sub(1));
                let (_, rep, _) = reducer.reduce(x);
                let l = &t.lifted[t.nearest_lift(&rep)];
                let y = ball.elements()[l.element].element.inverse().apply(&rep);
                let near = t.top_points(top).iter().map(|p| p.dist(&y)).fold(f64::INFINITY, f64::min);
                (dim, near)
            }
            None => (None, f64::INFINITY),
        };
        witnesses.push(SingularWitness {
            point: x.as_slice().to_vec(),
            stratum: st.stratum,
            stabilizer_order: st.order,
            simplex_dim,
            nearest_vertex_distance: near,
            ok: simplex_dim.is_some_and(|d| d <= st.stratum),
        });
    }
    let failures = witnesses.iter().filter(|w| !w.ok).count() + non_rigid.len();
    Ok(GoodnessReport {
        ok: failures == 0,
        non_rigid,
        singular_points: witnesses,
        failures,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Inequality {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            holds: lhs <= rhs,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PackingBounds {
    /// Radius used for packing counts: `max(eps, mu/2)`.
    pub eps_star: f64,
    pub d1: f64,
    pub d2: f64,
    pub degree_bound: f64,
    /// Packing counts are estimates from volume ratios, not sharp constants.
    pub estimate: bool,
}

/// Volume-ratio packing counts in `H^n`.
pub fn packing_bounds(n: usize, eps: f64, mu: f64) -> PackingBounds {
    let e = eps.max(mu / 2.0);
    let v = ball_volume(n, e);
    let d1 = (ball_volume(n, 5.0 * e) / v).floor() - 1.0;
    let d2 = (ball_volume(n, 3.0 * e) / v).floor();
    PackingBounds {
        eps_star: e,
        d1,
        d2,
        degree_bound: d2 * 2f64.powf(2.0 * d1),
        estimate: true,
    }
}

/// `binom(m, k)` in floating point.
pub fn binomial(m: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m - i as f64) / (i as f64 + 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub bounds: PackingBounds,
    pub max_facets_per_cell: usize,
    pub max_neighbor_sites: usize,
    pub max_faces_per_cell: usize,
    pub max_cells_per_vertex: usize,
    pub max_degree: usize,
    pub max_lifted_degree: f64,
    pub top_simplices: usize,
    pub vertices: usize,
    pub inequalities: Vec<Inequality>,
    pub all_hold: bool,
}

/// Observed degrees and counts against the packing-number budget.
pub fn degree_and_count_report(
    t: &GoodTriangulation,
    complex: &VoronoiComplex,
    q: usize,
    volume: f64,
    mu: f64,
) -> DegreeReport {
    let n = t.dim;
    let eps = complex.epsilon;
    let b = packing_bounds(n, eps, mu);

    let max_facets = complex.faces.iter().map(|f| f[n - 1].len()).max().unwrap_or(0);
    let max_neigh = (0..complex.cells.len())
        .map(|j| complex.neighbor_sites(j).into_iter().filter(|&s| s != j).count())
        .max()
        .unwrap_or(0);
    let max_faces = complex
        .faces
        .iter()
        .map(|f| f.iter().map(|x| x.len()).sum::<usize>())
        .max()
        .unwrap_or(0);

    let nv = t.vertices.len();
    let mut cells_at: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for top in &t.top {
        for (v, _) in &top.vertices {
            cells_at[*v].push(top.cell);
        }
    }
    let max_cells = cells_at
        .iter_mut()
        .map(|c| {
            c.sort_unstable();
            c.dedup();
            c.len()
        })
        .max()
        .unwrap_or(0);

    let max_deg = t.degrees().into_iter().max().unwrap_or(0);
    let max_lifted = t.lifted_degrees().into_iter().fold(0.0, f64::max);

    let ntop = t.top.len();
    let budget = binomial(b.degree_bound, n);
    let v_eps = ball_volume(n, eps);
    let ineq = vec![
        Inequality::new("facets per cell <= 2 d1", max_facets as f64, 2.0 * b.d1),
        Inequality::new("neighbor site orbits <= d1", max_neigh as f64, b.d1),
        Inequality::new("faces per cell <= 2^(2 d1)", max_faces as f64, 2f64.powf(2.0 * b.d1)),
        Inequality::new("top cells per vertex <= d2", max_cells as f64, b.d2),
        Inequality::new("quotient degree <= D", max_deg as f64, b.degree_bound),
        Inequality::new("lifted degree <= D", max_lifted, b.degree_bound),
        Inequality::new(
            "top simplices <= binom(D, n) |S|",
            ntop as f64,
            budget * complex.sites.len() as f64,
        ),
        Inequality::new(
            "top simplices <= binom(D, n) q Vol / v_eps",
            ntop as f64,
            budget * q as f64 * volume / v_eps,
        ),
        Inequality::new("|S| <= q Vol / v_eps", complex.sites.len() as f64, q as f64 * volume / v_eps),
        Inequality::new("vertices <= (n + 1) top simplices", nv as f64, ((n + 1) * ntop) as f64),
    ];
    let all_hold = ineq.iter().all(|i| i.holds);
    DegreeReport {
        bounds: b,
        max_facets_per_cell: max_facets,
        max_neighbor_sites: max_neigh,
        max_faces_per_cell: max_faces,
        max_cells_per_vertex: max_cells,
        max_degree: max_deg,
        max_lifted_degree: max_lifted,
        top_simplices: ntop,
        vertices: nv,
        inequalities: ineq,
        all_hold,
    }
}
