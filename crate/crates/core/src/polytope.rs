//! Convex polytopes in R^n as halfspace intersections, built by incremental
//! clipping with combinatorial vertex bookkeeping. Used in the Klein chart,
//! where hyperbolic bisectors are affine.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error("clipping removed every vertex")]
    Empty,
    #[error("clipping left a lower-dimensional set")]
    Degenerate,
}

/// `normal . v <= offset`; `tag` identifies the caller's generator of the constraint.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub normal: Vec<f64>,
    pub offset: f64,
    /// `None` for the initial bounding simplex.
    pub tag: Option<usize>,
}

impl Constraint {
    pub fn eval(&self, p: &[f64]) -> f64 {
        dot(&self.normal, p) - self.offset
    }
}

#[derive(Clone, Debug)]
pub struct PolyVertex {
    pub pos: Vec<f64>,
    /// Sorted indices of constraints tight at this vertex.
    pub tight: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    /// Sorted vertex indices.
    pub vertices: Vec<usize>,
    /// Constraints tight on the whole face.
    pub constraints: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    constraints: Vec<Constraint>,
    vertices: Vec<PolyVertex>,
    tol: f64,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Numerical rank of a set of row vectors.
pub(crate) fn rank(rows: &[&[f64]], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > tol * max.max(1.0)).count()
}

/// Dimension of the affine hull of the given points.
pub fn affine_dim(points: &[&[f64]], tol: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = points[0];
    let diffs: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let rows: Vec<&[f64]> = diffs.iter().map(|d| d.as_slice()).collect();
    let n = base.len();
    let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    m.singular_values().iter().filter(|&&s| s > tol).count()
}

impl Polytope {
    /// Simplex `{x_i >= -r, sum x_i <= r sqrt(n)}`, which contains the ball of radius `r`.
    pub fn bounding_simplex(dim: usize, r: f64, tol: f64) -> Self {
        let mut constraints = Vec::with_capacity(dim + 1);
        for i in 0..dim {
            let mut a = vec![0.0; dim];
            a[i] = -1.0;
            constraints.push(Constraint {
                normal: a,
                offset: r,
                tag: None,
            });
        }
        let s = (dim as f64).sqrt();
        constraints.push(Constraint {
            normal: vec![1.0 / s; dim],
            offset: r,
            tag: None,
        });
        let mut vertices = Vec::with_capacity(dim + 1);
        vertices.push(PolyVertex {
            pos: vec![-r; dim],
            tight: (0..dim).collect(),
        });
        // the sum constraint reads sum x_i <= r sqrt(n)
        let top = r * s + (dim as f64 - 1.0) * r;
        for k in 0..dim {
            let mut p = vec![-r; dim];
            p[k] = top;
            let mut tight: Vec<usize> = (0..dim).filter(|&i| i != k).collect();
            tight.push(dim);
            vertices.push(PolyVertex { pos: p, tight });
        }
        Self {
            dim,
            constraints,
            vertices,
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn vertices(&self) -> &[PolyVertex] {
        &self.vertices
    }

    /// Intersects with `normal . v <= offset`. Returns whether anything was cut;
    /// constraints that cut nothing are not recorded.
    pub fn clip(&mut self, normal: Vec<f64>, offset: f64, tag: Option<usize>) -> Result<bool, PolytopeError> {
        let c = Constraint { normal, offset, tag };
        let s: Vec<f64> = self.vertices.iter().map(|v| c.eval(&v.pos)).collect();
        let tol = self.tol;
        let any_out = s.iter().any(|&x| x > tol);
        if !any_out {
            return Ok(false);
        }
        let any_in = s.iter().any(|&x| x < -tol);
        if !any_in {
            return Err(if s.iter().any(|&x| x.abs() <= tol) {
                PolytopeError::Degenerate
            } else {
                PolytopeError::Empty
            });
        }
        let idx = self.constraints.len();
        let mut fresh: Vec<PolyVertex> = Vec::new();
        for (u, su) in self.vertices.iter().zip(&s) {
            if *su >= -tol {
                continue;
            }
            for (w, sw) in self.vertices.iter().zip(&s) {
                if *sw <= tol {
                    continue;
                }
                let common = intersect_sorted(&u.tight, &w.tight);
                if common.len() + 1 < self.dim {
                    continue;
                }
                let rows: Vec<&[f64]> = common.iter().map(|&k| self.constraints[k].normal.as_slice()).collect();
                if rank(&rows, 1e-9) != self.dim - 1 {
                    continue;
                }
                let t = su / (su - sw);
                let pos: Vec<f64> = u.pos.iter().zip(&w.pos).map(|(a, b)| a + t * (b - a)).collect();
                let mut tight = common;
                tight.push(idx);
                tight.sort_unstable();
                if let Some(existing) = fresh
                    .iter_mut()
                    .find(|v| v.pos.iter().zip(&pos).all(|(a, b)| (a - b).abs() <= 10.0 * tol))
                {
                    existing.tight = union_sorted(&existing.tight, &tight);
                } else {
                    fresh.push(PolyVertex { pos, tight });
                }
            }
        }
        let mut kept: Vec<PolyVertex> = Vec::with_capacity(self.vertices.len() + fresh.len());
        for (mut v, sv) in self.vertices.drain(..).zip(s) {
            if sv > tol {
                continue;
            }
            if sv >= -tol {
                v.tight.push(idx);
            }
            kept.push(v);
        }
        kept.extend(fresh);
        self.vertices = kept;
        self.constraints.push(c);
        Ok(true)
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.constraints.iter().all(|c| c.eval(p) <= tol)
    }

    /// True if no vertex touches the bounding simplex.
    pub fn avoids_bounding_simplex(&self) -> bool {
        self.vertices
            .iter()
            .all(|v| v.tight.iter().all(|&k| self.constraints[k].tag.is_some()))
    }

    /// Bounded inside the open unit ball (the Klein model).
    pub fn is_klein_bounded(&self) -> bool {
        self.avoids_bounding_simplex() && self.vertices.iter().all(|v| dot(&v.pos, &v.pos) < 1.0 - 1e-12)
    }

    /// Constraints that are tight on some vertex, i.e. support a face.
    pub fn active_constraints(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.vertices.iter().flat_map(|v| v.tight.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// All faces, indexed by dimension `0..=dim`.
    pub fn faces(&self) -> Vec<Vec<Face>> {
        let n = self.dim;
        let mut by_dim: Vec<Vec<Face>> = vec![Vec::new(); n + 1];
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        by_dim[n].push(Face {
            dim: n,
            constraints: self.common_constraints(&all),
            vertices: all,
        });
        let aff_tol = self.tol * 100.0;
        for d in (1..=n).rev() {
            let mut next: Vec<Face> = Vec::new();
            for f in &by_dim[d] {
                let mut candidates: Vec<usize> = f
                    .vertices
                    .iter()
                    .flat_map(|&v| self.vertices[v].tight.iter().copied())
                    .filter(|c| !f.constraints.contains(c))
                    .collect();
                candidates.sort_unstable();
                candidates.dedup();
                for c in candidates {
                    let sub: Vec<usize> = f
                        .vertices
                        .iter()
                        .copied()
                        .filter(|&v| self.vertices[v].tight.binary_search(&c).is_ok())
                        .collect();
                    if sub.len() < d || next.iter().any(|g| g.vertices == sub) {
                        continue;
                    }
                    let pts: Vec<&[f64]> = sub.iter().map(|&v| self.vertices[v].pos.as_slice()).collect();
                    if affine_dim(&pts, aff_tol) == d - 1 {
                        next.push(Face {
                            dim: d - 1,
                            constraints: self.common_constraints(&sub),
                            vertices: sub,
                        });
                    }
                }
            }
            next.sort_by(|a, b| a.vertices.cmp(&b.vertices));
            by_dim[d - 1] = next;
        }
        by_dim
    }

    fn common_constraints(&self, verts: &[usize]) -> Vec<usize> {
        let mut it = verts.iter();
        let Some(&first) = it.next() else {
            return Vec::new();
        };
        let mut acc = self.vertices[first].tight.clone();
        for &v in it {
            acc = intersect_sorted(&acc, &self.vertices[v].tight);
        }
        acc
    }
}
