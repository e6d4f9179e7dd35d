//! Hyperboloid-model geometry of H^n.
//!
//! Points live on the upper sheet `{x : <x,x> = -1, x0 > 0}` of the Lorentz
//! form with signature (-,+,...,+), time coordinate first. Isometries are
//! (n+1)x(n+1) matrices preserving the form and the sheet. The Klein chart
//! `x -> (x1/x0, ..., xn/x0)` is used wherever flat convexity is needed.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on `<x,x> = -1` for accepted points.
pub const POINT_TOL: f64 = 1e-10;
/// Entrywise tolerance on `M^T J M = J`.
pub const ISOMETRY_TOL: f64 = 1e-9;
/// `-<x,y>` may fall this far below 1 before it is an error.
pub const DIST_CLAMP_TOL: f64 = 1e-9;
/// Eigenvalue modulus above `1 + HYPERBOLIC_TOL` marks a hyperbolic element.
pub const HYPERBOLIC_TOL: f64 = 1e-8;
/// Compositions between Lorentz re-orthonormalizations.
pub const REORTHO_PERIOD: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("point is off the hyperboloid: <x,x> + 1 = {residual:e}")]
    OffHyperboloid { residual: f64 },
    #[error("point lies on the lower sheet")]
    LowerSheet,
    #[error("matrix does not preserve the Lorentz form (max deviation {deviation:e})")]
    NotAnIsometry { deviation: f64 },
    #[error("matrix swaps the sheets of the hyperboloid")]
    SwapsSheets,
    #[error("-<x,y> = {value} is below 1 beyond tolerance")]
    InvalidPair { value: f64 },
    #[error("isometry is {0:?}, translation length needs a hyperbolic element")]
    NotHyperbolic(IsometryClass),
    #[error("Klein coordinates have norm {norm} >= 1")]
    OutsideKleinBall { norm: f64 },
    #[error("vector is not timelike future-pointing")]
    NotTimelike,
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Lorentz product `-a0 b0 + sum_{i>=1} ai bi`.
pub fn lorentz_inner(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(lorentz_dot(a, b))
}

#[inline]
pub(crate) fn lorentz_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = -a[0] * b[0];
    for i in 1..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// The diagonal form `J = diag(-1, 1, ..., 1)` of size `n + 1`.
pub fn lorentz_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(n + 1, n + 1);
    j[(0, 0)] = -1.0;
    j
}

/// Volume of the unit sphere `S^{k}` embedded in R^{k+1}.
pub fn sphere_volume(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_volume(k - 2),
    }
}

/// Volume of the Euclidean unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    sphere_volume(n - 1) / n as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicPoint {
    coords: DVector<f64>,
}

impl HyperbolicPoint {
    /// Validates `<x,x> = -1` and `x0 > 0`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(GeometryError::DimensionTooSmall(coords.len().saturating_sub(1)));
        }
        let residual = lorentz_dot(&coords, &coords) + 1.0;
        let scale = coords[0] * coords[0];
        if residual.abs() > POINT_TOL * scale.max(1.0) {
            return Err(GeometryError::OffHyperboloid { residual });
        }
        if coords[0] <= 0.0 {
            return Err(GeometryError::LowerSheet);
        }
        Ok(Self {
            coords: DVector::from_vec(coords),
        })
    }

    /// Rescales a future-pointing timelike vector onto the hyperboloid.
    pub fn from_timelike(v: &DVector<f64>) -> Result<Self> {
        let q = lorentz_dot(v.as_slice(), v.as_slice());
        if !(q < 0.0) || v[0] <= 0.0 {
            return Err(GeometryError::NotTimelike);
        }
        Ok(Self {
            coords: v / (-q).sqrt(),
        })
    }

    /// Rescales when clearly off the sheet, then recomputes `x0` from the
    /// spatial part so the result sits on the hyperboloid to rounding.
    pub(crate) fn from_timelike_unchecked(v: DVector<f64>) -> Self {
        let q = lorentz_dot(v.as_slice(), v.as_slice());
        let mut c = if (q + 1.0).abs() > 1e-6 * v[0] * v[0] {
            v / (-q).sqrt()
        } else {
            v
        };
        let s2: f64 = c.iter().skip(1).map(|x| x * x).sum();
        c[0] = (1.0 + s2).sqrt();
        Self { coords: c }
    }

    /// Lifts spatial coordinates `(x1..xn)` by solving for `x0`.
    pub fn from_spatial(spatial: &[f64]) -> Self {
        let mut c = Vec::with_capacity(spatial.len() + 1);
        c.push((1.0 + spatial.iter().map(|x| x * x).sum::<f64>()).sqrt());
        c.extend_from_slice(spatial);
        Self {
            coords: DVector::from_vec(c),
        }
    }

    pub fn origin(n: usize) -> Self {
        let mut c = DVector::zeros(n + 1);
        c[0] = 1.0;
        Self { coords: c }
    }

    /// Point reached from `o` by the boost of length `t` along axis `x1`.
    pub fn on_axis(n: usize, t: f64) -> Self {
        let mut c = DVector::zeros(n + 1);
        c[0] = t.cosh();
        c[1] = t.sinh();
        Self { coords: c }
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    /// Inverse of [`HyperbolicPoint::klein`].
    pub fn from_klein(v: &[f64]) -> Result<Self> {
        let r2: f64 = v.iter().map(|x| x * x).sum();
        if r2 >= 1.0 {
            return Err(GeometryError::OutsideKleinBall { norm: r2.sqrt() });
        }
        let x0 = 1.0 / (1.0 - r2).sqrt();
        let mut c = Vec::with_capacity(v.len() + 1);
        c.push(x0);
        c.extend(v.iter().map(|x| x * x0));
        Ok(Self {
            coords: DVector::from_vec(c),
        })
    }

    /// Klein-chart coordinates `x_i / x_0`.
    pub fn klein(&self) -> Vec<f64> {
        let x0 = self.coords[0];
        self.coords.iter().skip(1).map(|x| x / x0).collect()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        dist(self, other)
    }

    /// Tangent vector at `self` pointing to `other` with length `dist`.
    pub fn log(&self, other: &Self) -> DVector<f64> {
        let d = self.dist(other);
        if d < 1e-300 {
            return DVector::zeros(self.coords.len());
        }
        // other + <x,y> x, written to avoid cancellation for close points.
        let diff = &other.coords - &self.coords;
        let cosh_m1 = 0.5 * lorentz_dot(diff.as_slice(), diff.as_slice());
        let tangent = diff - &self.coords * cosh_m1;
        let s = d.sinh();
        tangent * (d / s)
    }

    /// Exponential map at `self`; `v` must be tangent (`<x,v> = 0`).
    pub fn exp(&self, v: &DVector<f64>) -> Self {
        let nv2 = lorentz_dot(v.as_slice(), v.as_slice()).max(0.0);
        let nv = nv2.sqrt();
        if nv < 1e-300 {
            return self.clone();
        }
        let p = &self.coords * nv.cosh() + v * (nv.sinh() / nv);
        Self::from_timelike_unchecked(p)
    }

    /// Projects an ambient vector to the tangent space at `self`.
    pub fn project_tangent(&self, v: &DVector<f64>) -> DVector<f64> {
        let ip = lorentz_dot(self.coords.as_slice(), v.as_slice());
        v + &self.coords * ip
    }
}

/// Hyperbolic distance `arccosh(-<x,y>)`, computed from the chord for close points.
pub fn dist(x: &HyperbolicPoint, y: &HyperbolicPoint) -> f64 {
    try_dist(x, y).unwrap_or(0.0)
}

/// Like [`dist`] but reports pairs whose product is below 1 beyond tolerance.
pub fn try_dist(x: &HyperbolicPoint, y: &HyperbolicPoint) -> Result<f64> {
    if x.coords.len() != y.coords.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: x.coords.len(),
            got: y.coords.len(),
        });
    }
    let c = -lorentz_dot(x.as_slice(), y.as_slice());
    if c < 1.0 - DIST_CLAMP_TOL * x.coords[0].abs().max(y.coords[0].abs()).powi(2) {
        return Err(GeometryError::InvalidPair { value: c });
    }
    if c > 1.5 {
        return Ok(c.acosh());
    }
    let diff = &x.coords - &y.coords;
    let chord2 = lorentz_dot(diff.as_slice(), diff.as_slice()).max(0.0);
    Ok(2.0 * (0.5 * chord2.sqrt()).asinh())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsometryClass {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

#[derive(Clone, Debug)]
pub struct LorentzIsometry {
    matrix: DMatrix<f64>,
    class: OnceLock<IsometryClass>,
}

impl PartialEq for LorentzIsometry {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl LorentzIsometry {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let m = matrix.nrows();
        if matrix.ncols() != m {
            return Err(GeometryError::DimensionMismatch {
                expected: m,
                got: matrix.ncols(),
            });
        }
        if m < 3 {
            return Err(GeometryError::DimensionTooSmall(m.saturating_sub(1)));
        }
        let j = lorentz_form(m - 1);
        let dev = (matrix.transpose() * &j * &matrix - &j).amax();
        let scale = matrix.amax().powi(2).max(1.0);
        if dev > ISOMETRY_TOL * scale {
            return Err(GeometryError::NotAnIsometry { deviation: dev });
        }
        if matrix[(0, 0)] <= 0.0 {
            return Err(GeometryError::SwapsSheets);
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    /// Row-major `(n+1)^2` entries.
    pub fn from_row_major(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != (n + 1) * (n + 1) {
            return Err(GeometryError::DimensionMismatch {
                expected: (n + 1) * (n + 1),
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n + 1, n + 1, entries))
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        Self {
            matrix,
            class: OnceLock::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::identity(n + 1, n + 1))
    }

    /// Boost of length `t` along spatial axis `axis` (1-based, as in the coordinates).
    pub fn boost(n: usize, axis: usize, t: f64) -> Self {
        let mut m = DMatrix::identity(n + 1, n + 1);
        m[(0, 0)] = t.cosh();
        m[(axis, axis)] = t.cosh();
        m[(0, axis)] = t.sinh();
        m[(axis, 0)] = t.sinh();
        Self::from_matrix_unchecked(m)
    }

    /// Rotation by `theta` in the spatial plane `(i, j)`, fixing `o`.
    pub fn rotation(n: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut m = DMatrix::identity(n + 1, n + 1);
        let (s, c) = theta.sin_cos();
        m[(i, i)] = c;
        m[(j, j)] = c;
        m[(i, j)] = -s;
        m[(j, i)] = s;
        Self::from_matrix_unchecked(m)
    }

    /// An isometry taking `o` to `x`: rotate `x1` onto the direction of `x`, then boost.
    pub fn translation_to(x: &HyperbolicPoint) -> Self {
        let n = x.dim();
        let d = HyperbolicPoint::origin(n).dist(x);
        let spatial: Vec<f64> = x.as_slice()[1..].to_vec();
        let norm = spatial.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Self::identity(n);
        }
        // Householder-free construction: the pure boost with rapidity d in unit direction u.
        let u: Vec<f64> = spatial.iter().map(|v| v / norm).collect();
        let (ch, sh) = (d.cosh(), d.sinh());
        let mut m = DMatrix::identity(n + 1, n + 1);
        m[(0, 0)] = ch;
        for i in 0..n {
            m[(0, i + 1)] = sh * u[i];
            m[(i + 1, 0)] = sh * u[i];
            for k in 0..n {
                m[(i + 1, k + 1)] += (ch - 1.0) * u[i] * u[k];
            }
        }
        Self::from_matrix_unchecked(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn row_major(&self) -> Vec<f64> {
        self.matrix.transpose().as_slice().to_vec()
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::from_matrix_unchecked(&self.matrix * &other.matrix)
    }

    /// `J M^T J`, exact for form-preserving matrices.
    pub fn inverse(&self) -> Self {
        let j = lorentz_form(self.dim());
        Self::from_matrix_unchecked(&j * self.matrix.transpose() * &j)
    }

    pub fn apply(&self, x: &HyperbolicPoint) -> HyperbolicPoint {
        HyperbolicPoint::from_timelike_unchecked(&self.matrix * x.coords())
    }

    pub fn apply_vector(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }

    /// Deviation of `M^T J M` from `J`.
    pub fn form_deviation(&self) -> f64 {
        let j = lorentz_form(self.dim());
        (self.matrix.transpose() * &j * &self.matrix - &j).amax()
    }

    /// Gram-Schmidt of the columns with respect to the Lorentz form.
    pub fn reorthonormalize(&self) -> Self {
        let m = self.matrix.nrows();
        let mut cols: Vec<DVector<f64>> = (0..m).map(|c| self.matrix.column(c).into_owned()).collect();
        for k in 0..m {
            for i in 0..k {
                let sign = if i == 0 { -1.0 } else { 1.0 };
                let proj = lorentz_dot(cols[k].as_slice(), cols[i].as_slice()) * sign;
                let ci = cols[i].clone();
                cols[k] -= ci * proj;
            }
            let q = lorentz_dot(cols[k].as_slice(), cols[k].as_slice()).abs().sqrt();
            cols[k] /= q;
        }
        if cols[0][0] < 0.0 {
            cols[0] = -cols[0].clone();
        }
        Self::from_matrix_unchecked(DMatrix::from_columns(&cols))
    }

    pub fn displacement_at(&self, x: &HyperbolicPoint) -> f64 {
        x.dist(&self.apply(x))
    }

    pub fn classify(&self) -> IsometryClass {
        *self.class.get_or_init(|| classify_matrix(&self.matrix))
    }

    /// `log` of the largest eigenvalue modulus; only defined for hyperbolic elements.
    pub fn translation_length(&self) -> Result<f64> {
        match self.classify() {
            IsometryClass::Hyperbolic => {
                let ev = self.matrix.clone().complex_eigenvalues();
                let lmax = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
                Ok(lmax.ln())
            }
            c => Err(GeometryError::NotHyperbolic(c)),
        }
    }

    /// Basis (columns) of `ker(M - I)`.
    pub fn fixed_subspace(&self) -> DMatrix<f64> {
        common_kernel(std::slice::from_ref(self))
    }

    /// Dimension of the fixed-point set in H^n, or `None` if there is no fixed point.
    pub fn fixed_set_dim(&self) -> Option<usize> {
        fixed_set_dim(std::slice::from_ref(self))
    }

    /// Distance from `x` to the fixed-point set and the closest fixed point.
    pub fn distance_to_fixed_set(&self, x: &HyperbolicPoint) -> Option<(f64, HyperbolicPoint)> {
        distance_to_subspace(&self.fixed_subspace(), x)
    }
}

fn classify_matrix(m: &DMatrix<f64>) -> IsometryClass {
    let iso = LorentzIsometry::from_matrix_unchecked(m.clone());
    if iso.fixed_set_dim().is_some() {
        return IsometryClass::Elliptic;
    }
    let ev = m.clone().complex_eigenvalues();
    let (imax, lmax) = ev
        .iter()
        .enumerate()
        .map(|(i, z)| (i, z.norm()))
        .fold((0, 0.0), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    if lmax > 1.0 + HYPERBOLIC_TOL {
        let top = ev[imax];
        let real_top = top.im.abs() <= 1e-9 * lmax && top.re > 0.0;
        let inv = 1.0 / lmax;
        let has_inverse = ev
            .iter()
            .any(|z| z.im.abs() <= 1e-9 * lmax && (z.re - inv).abs() <= 1e-6 * inv.max(1e-12) + 1e-12);
        if real_top && has_inverse {
            return IsometryClass::Hyperbolic;
        }
    }
    IsometryClass::Parabolic
}

/// Basis of the common kernel of `g - I` over the given isometries.
pub fn common_kernel(gs: &[LorentzIsometry]) -> DMatrix<f64> {
    let m = gs[0].matrix.nrows();
    let mut stacked = DMatrix::zeros(m * gs.len(), m);
    let mut scale: f64 = 1.0;
    for (k, g) in gs.iter().enumerate() {
        let d = &g.matrix - DMatrix::identity(m, m);
        scale = scale.max(g.matrix.amax());
        stacked.view_mut((k * m, 0), (m, m)).copy_from(&d);
    }
    // Kernel from the eigen-decomposition of the Gram matrix A^T A.
    let gram = stacked.transpose() * &stacked;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let tol = (1e-7 * scale).powi(2);
    let cols: Vec<DVector<f64>> = (0..m)
        .filter(|&i| eig.eigenvalues[i] <= tol)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(m, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Fixed-set dimension of a collection of isometries (their common fixed set in H^n).
pub fn fixed_set_dim(gs: &[LorentzIsometry]) -> Option<usize> {
    let basis = common_kernel(gs);
    lorentzian_rank(&basis).map(|k| k - 1)
}

/// If the span of `basis` contains a timelike vector, its dimension.
fn lorentzian_rank(basis: &DMatrix<f64>) -> Option<usize> {
    let k = basis.ncols();
    if k == 0 {
        return None;
    }
    let j = lorentz_form(basis.nrows() - 1);
    let g = basis.transpose() * j * basis;
    let eig = nalgebra::SymmetricEigen::new(g);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-9 {
        Some(k)
    } else {
        None
    }
}

/// Distance from `x` to `H^n ∩ span(basis)` and the foot of the perpendicular.
pub fn distance_to_subspace(basis: &DMatrix<f64>, x: &HyperbolicPoint) -> Option<(f64, HyperbolicPoint)> {
    lorentzian_rank(basis)?;
    let j = lorentz_form(basis.nrows() - 1);
    let gram = basis.transpose() * &j * basis;
    let inv = gram.try_inverse()?;
    let coeff = inv * basis.transpose() * &j * x.coords();
    let xv = basis * coeff;
    let perp = x.coords() - &xv;
    let s2 = lorentz_dot(perp.as_slice(), perp.as_slice()).max(0.0);
    let foot = if xv[0] > 0.0 {
        HyperbolicPoint::from_timelike(&xv).ok()?
    } else {
        HyperbolicPoint::from_timelike(&(-xv)).ok()?
    };
    Some((s2.sqrt().asinh(), foot))
}

#[derive(Clone, Debug)]
pub struct GeodesicSegment {
    start: HyperbolicPoint,
    end: HyperbolicPoint,
    length: f64,
    tangent: DVector<f64>,
}

impl GeodesicSegment {
    pub fn new(start: HyperbolicPoint, end: HyperbolicPoint) -> Result<Self> {
        if start.dim() != end.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: start.dim(),
                got: end.dim(),
            });
        }
        let length = start.dist(&end);
        let tangent = if length > 0.0 {
            start.log(&end) / length
        } else {
            DVector::zeros(start.coords().len())
        };
        Ok(Self {
            start,
            end,
            length,
            tangent,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn start(&self) -> &HyperbolicPoint {
        &self.start
    }

    pub fn end(&self) -> &HyperbolicPoint {
        &self.end
    }

    /// Point at arclength `s` from the start.
    pub fn point_at(&self, s: f64) -> HyperbolicPoint {
        let p = self.start.coords() * s.cosh() + &self.tangent * s.sinh();
        HyperbolicPoint::from_timelike_unchecked(p)
    }

    pub fn midpoint(&self) -> HyperbolicPoint {
        self.point_at(0.5 * self.length)
    }
}

/// Ball volumes in H^n by composite Gauss-Legendre quadrature of `sinh^{n-1}`.
#[derive(Clone, Debug)]
pub struct BallVolumeTable {
    n: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    sphere: f64,
}

impl BallVolumeTable {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(16);
        Self {
            n,
            nodes,
            weights,
            sphere: sphere_volume(n - 1),
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    fn panel(&self, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let p = (self.n - 1) as i32;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * (mid + half * x).sinh().powi(p))
            .sum::<f64>()
            * half
    }

    fn adaptive(&self, a: f64, b: f64, whole: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        let left = self.panel(a, m);
        let right = self.panel(m, b);
        let sum = left + right;
        if depth == 0 || (sum - whole).abs() <= 1e-15 * sum.abs() {
            return sum;
        }
        self.adaptive(a, m, left, depth - 1) + self.adaptive(m, b, right, depth - 1)
    }

    /// `Vol(S^{n-1}) * ∫_0^r sinh^{n-1}(s) ds`.
    pub fn volume(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        // unit-length panels keep the integrand well resolved for large r
        let panels = r.ceil().max(1.0) as usize;
        let h = r / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            let a = k as f64 * h;
            let b = a + h;
            total += self.adaptive(a, b, self.panel(a, b), 20);
        }
        self.sphere * total
    }
}

/// Volume of a hyperbolic ball of radius `r` in H^n.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    BallVolumeTable::new(n).volume(r)
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub(crate) fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}
