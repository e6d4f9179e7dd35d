//! Hyperbolic Voronoi-type cells: the set of points closer to a site than to
//! a list of other points, computed as a Klein-chart polytope in a chart
//! centered at the site.

use std::f64::consts::PI;

use rand::Rng;

use crate::hyperbolic::{lorentz_dot, HyperbolicPoint, LorentzIsometry};
use crate::polytope::{dot, Face, Polytope, PolytopeError};

/// Klein-chart tolerance for classifying polytope vertices against a cut.
pub const CELL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct HyperbolicCell {
    site: HyperbolicPoint,
    /// Maps `o` to the site; the polytope lives in the Klein chart of its inverse image.
    chart: LorentzIsometry,
    chart_inv: LorentzIsometry,
    polytope: Polytope,
}

/// Klein halfspace `{v : a.v <= b}` of points closer to `o` than to `y`.
pub fn bisector_from_origin(y: &HyperbolicPoint) -> (Vec<f64>, f64) {
    let c = y.as_slice();
    let a: Vec<f64> = c[1..].to_vec();
    let norm = dot(&a, &a).sqrt();
    let b = c[0] - 1.0;
    (a.iter().map(|x| x / norm).collect(), b / norm)
}

impl HyperbolicCell {
    /// Clips against the bisector with each `(tag, point)`, nearest first.
    pub fn build(site: &HyperbolicPoint, others: &[(usize, HyperbolicPoint)]) -> Result<Self, PolytopeError> {
        let n = site.dim();
        let chart = LorentzIsometry::translation_to(site);
        let chart_inv = chart.inverse();
        let mut local: Vec<(usize, HyperbolicPoint)> = others
            .iter()
            .map(|(t, y)| (*t, chart_inv.apply(y)))
            .filter(|(_, y)| y.as_slice()[0] > 1.0 + 1e-14)
            .collect();
        local.sort_by(|a, b| a.1.as_slice()[0].total_cmp(&b.1.as_slice()[0]).then(a.0.cmp(&b.0)));
        let mut polytope = Polytope::bounding_simplex(n, 1.0, CELL_TOL);
        for (tag, y) in &local {
            let (a, b) = bisector_from_origin(y);
            polytope.clip(a, b, Some(*tag))?;
        }
        Ok(Self {
            site: site.clone(),
            chart,
            chart_inv,
            polytope,
        })
    }

    pub fn site(&self) -> &HyperbolicPoint {
        &self.site
    }

    pub fn dim(&self) -> usize {
        self.site.dim()
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn chart(&self) -> &LorentzIsometry {
        &self.chart
    }

    pub fn is_bounded(&self) -> bool {
        self.polytope.is_klein_bounded()
    }

    /// Klein coordinates of `x` in the site-centered chart.
    pub fn to_chart(&self, x: &HyperbolicPoint) -> Vec<f64> {
        self.chart_inv.apply(x).klein()
    }

    pub fn from_chart(&self, v: &[f64]) -> Option<HyperbolicPoint> {
        HyperbolicPoint::from_klein(v).ok().map(|p| self.chart.apply(&p))
    }

    /// Cell vertices as points of H^n; `None` if some vertex is ideal or beyond.
    pub fn vertex_points(&self) -> Option<Vec<HyperbolicPoint>> {
        self.polytope
            .vertices()
            .iter()
            .map(|v| self.from_chart(&v.pos))
            .collect()
    }

    /// Signed slack of the most violated bisector constraint (`<= 0` inside).
    pub fn violation(&self, x: &HyperbolicPoint) -> f64 {
        let v = self.to_chart(x);
        self.polytope
            .constraints()
            .iter()
            .map(|c| c.eval(&v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &HyperbolicPoint, tol: f64) -> bool {
        self.violation(x) <= tol
    }

    /// Largest distance from the site to a vertex.
    pub fn radius(&self) -> f64 {
        match self.vertex_points() {
            Some(pts) => pts.iter().map(|p| p.dist(&self.site)).fold(0.0, f64::max),
            None => f64::INFINITY,
        }
    }

    /// Tags of constraints supporting a facet.
    pub fn facet_tags(&self) -> Vec<usize> {
        let faces = self.polytope.faces();
        let n = self.dim();
        let mut tags: Vec<usize> = faces[n - 1]
            .iter()
            .flat_map(|f| f.constraints.iter().filter_map(|&c| self.polytope.constraints()[c].tag))
            .collect();
        tags.sort_unstable();
        tags.dedup();
        tags
    }

    pub fn faces(&self) -> Vec<Vec<Face>> {
        self.polytope.faces()
    }

    /// Area by angle defect (n = 2 only).
    pub fn area_exact(&self) -> Option<f64> {
        if self.dim() != 2 || !self.is_bounded() {
            return None;
        }
        let pts = self.vertex_points()?;
        let cycle = self.vertex_cycle()?;
        let k = cycle.len();
        let mut angle_sum = 0.0;
        for i in 0..k {
            let v = &pts[cycle[i]];
            let a = v.log(&pts[cycle[(i + k - 1) % k]]);
            let b = v.log(&pts[cycle[(i + 1) % k]]);
            let c = lorentz_dot(a.as_slice(), b.as_slice())
                / (lorentz_dot(a.as_slice(), a.as_slice()) * lorentz_dot(b.as_slice(), b.as_slice())).sqrt();
            angle_sum += c.clamp(-1.0, 1.0).acos();
        }
        Some((k as f64 - 2.0) * PI - angle_sum)
    }

    /// Vertex indices around the boundary polygon (n = 2).
    pub fn vertex_cycle(&self) -> Option<Vec<usize>> {
        let faces = self.polytope.faces();
        let edges = &faces[1];
        let k = faces[0].len();
        if edges.len() != k || k < 3 {
            return None;
        }
        let mut cycle = vec![faces[0][0].vertices[0]];
        let mut prev_edge = usize::MAX;
        while cycle.len() < k {
            let cur = *cycle.last().unwrap();
            let (ei, e) = edges
                .iter()
                .enumerate()
                .find(|(i, e)| *i != prev_edge && e.vertices.contains(&cur))?;
            let next = if e.vertices[0] == cur { e.vertices[1] } else { e.vertices[0] };
            prev_edge = ei;
            cycle.push(next);
        }
        Some(cycle)
    }

    /// Monte Carlo volume in the Klein chart with density `(1-|v|^2)^{-(n+1)/2}`.
    /// Returns `(estimate, standard error)`.
    pub fn volume_mc<R: Rng>(&self, samples: usize, rng: &mut R) -> Option<(f64, f64)> {
        if !self.is_bounded() {
            return None;
        }
        let n = self.dim();
        let (lo, hi) = self.klein_box();
        let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let (mut s1, mut s2) = (0.0, 0.0);
        let mut v = vec![0.0; n];
        for _ in 0..samples {
            for i in 0..n {
                v[i] = rng.gen_range(lo[i]..hi[i]);
            }
            if self.polytope.contains(&v, 0.0) {
                let w = (1.0 - dot(&v, &v)).powf(-0.5 * (n as f64 + 1.0));
                s1 += w;
                s2 += w * w;
            }
        }
        let m = samples as f64;
        let mean = s1 / m;
        let var = (s2 / m - mean * mean).max(0.0);
        Some((box_vol * mean, box_vol * (var / m).sqrt()))
    }

    /// Axis-aligned Klein-chart box around the vertices.
    pub fn klein_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for v in self.polytope.vertices() {
            for i in 0..n {
                lo[i] = lo[i].min(v.pos[i]);
                hi[i] = hi[i].max(v.pos[i]);
            }
        }
        (lo, hi)
    }

    /// Hyperbolic-uniform sample from the cell by rejection in the Klein box.
    pub fn sample_uniform<R: Rng>(&self, rng: &mut R) -> HyperbolicPoint {
        let n = self.dim();
        let (lo, hi) = self.klein_box();
        let rmax2 = self
            .polytope
            .vertices()
            .iter()
            .map(|v| dot(&v.pos, &v.pos))
            .fold(0.0, f64::max);
        let exponent = -0.5 * (n as f64 + 1.0);
        let wmax = (1.0 - rmax2).powf(exponent);
        let mut v = vec![0.0; n];
        loop {
            for i in 0..n {
                v[i] = rng.gen_range(lo[i]..hi[i]);
            }
            if !self.polytope.contains(&v, 0.0) {
                continue;
            }
            let w = (1.0 - dot(&v, &v)).powf(exponent);
            if rng.gen::<f64>() * wmax <= w {
                return self.from_chart(&v).expect("inside the unit ball");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_sites_give_unbounded_halfplane() {
        let o = HyperbolicPoint::origin(2);
        let y = HyperbolicPoint::on_axis(2, 1.0);
        let c = HyperbolicCell::build(&o, &[(0, y.clone())]).unwrap();
        assert!(!c.is_bounded());
        let mid = HyperbolicPoint::on_axis(2, 0.5);
        assert!(c.violation(&mid).abs() < 1e-12);
        assert!(c.contains(&HyperbolicPoint::on_axis(2, 0.4), 0.0));
        assert!(!c.contains(&HyperbolicPoint::on_axis(2, 0.6), 0.0));
    }

    #[test]
    fn regular_polygon_area() {
        // sites around o at distance 2d: the cell is a regular k-gon with inradius d
        let (k, d) = (6usize, 0.4f64);
        let others: Vec<(usize, HyperbolicPoint)> = (0..k)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / k as f64;
                let r = LorentzIsometry::rotation(2, 1, 2, phi);
                (i, r.apply(&HyperbolicPoint::on_axis(2, 2.0 * d)))
            })
            .collect();
        let c = HyperbolicCell::build(&HyperbolicPoint::origin(2), &others).unwrap();
        assert!(c.is_bounded());
        assert_eq!(c.facet_tags(), (0..k).collect::<Vec<_>>());
        // right triangle with legs: angle pi/k at o, inradius d; its other angle beta
        // satisfies cos(beta) = cosh(d) sin(pi/k)
        let beta = (d.cosh() * (PI / k as f64).sin()).acos();
        let tri = PI / 2.0 - PI / k as f64 - beta;
        let exact = c.area_exact().unwrap();
        assert!((exact - 2.0 * k as f64 * tri).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mc, se) = c.volume_mc(200_000, &mut rng).unwrap();
        assert!((mc - exact).abs() < 4.0 * se, "{mc} {exact} {se}");
    }
}
