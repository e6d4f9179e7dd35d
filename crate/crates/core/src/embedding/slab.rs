//! Unit slabs along a direction: edge counts, slice areas and the search for
//! a direction with small slices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::volume::{neighborhood_volume, Neighborhood, DEFAULT_SAMPLES};
use super::{dot, EmbeddedGraph, EmbeddingError, Result, VolumeEstimate};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct FalconerParams {
    pub trials: usize,
    pub refine_steps: usize,
    /// Band width used for slice areas.
    pub band: f64,
    /// Samples per level in the screening pass.
    pub coarse_samples: usize,
    /// Samples per level when re-estimating the largest slices.
    pub fine_samples: usize,
    pub fine_levels: usize,
    /// Neighborhood volume, computed with `volume_samples` if absent.
    pub volume: Option<f64>,
    pub volume_samples: usize,
}

impl Default for FalconerParams {
    fn default() -> Self {
        Self {
            trials: 256,
            refine_steps: 64,
            band: 0.05,
            coarse_samples: 1024,
            fine_samples: 16384,
            fine_levels: 3,
            volume: None,
            volume_samples: DEFAULT_SAMPLES,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SlabAnalysis {
    pub direction: Vec<f64>,
    /// Index `j` of the first slab `{j <= x.dir <= j+1}` in the tables.
    pub first_slab: i64,
    pub edge_counts: Vec<usize>,
    /// Top simplices with an edge meeting the slab, when incidence is given.
    pub simplex_counts: Option<Vec<usize>>,
    pub max_count: usize,
    /// Sum over edges of the number of slabs each meets.
    pub incidences: usize,
    pub volume: Option<f64>,
    /// `max_count / V^{(N-1)/N}`.
    pub count_ratio: Option<f64>,
    /// Slice areas at integer levels, starting at `first_level`.
    pub first_level: i64,
    pub slice_areas: Vec<f64>,
    pub max_slice: Option<f64>,
    /// `max_slice / V^{(N-1)/N}`.
    pub slice_ratio: Option<f64>,
    pub directions_tried: usize,
}

fn unit(dir: &[f64], dim: usize) -> Result<Vec<f64>> {
    let nrm = dot(dir, dir).sqrt();
    if dir.len() != dim || !(nrm > 0.0) || !nrm.is_finite() {
        return Err(EmbeddingError::BadDirection(dim));
    }
    Ok(dir.iter().map(|x| x / nrm).collect())
}

/// Closed slabs `[j, j+1]` met by an edge: its projection is an interval.
pub fn edge_slab_range(g: &EmbeddedGraph, edge: usize, dir: &[f64]) -> (i64, i64) {
    let (mut a, mut b) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &g.edges[edge].path {
        let t = dot(p, dir);
        a = a.min(t);
        b = b.max(t);
    }
    (a.ceil() as i64 - 1, b.floor() as i64)
}

pub fn slab_counts(
    g: &EmbeddedGraph,
    dir: &[f64],
    incidence: Option<&[Vec<usize>]>,
    volume: Option<f64>,
) -> Result<SlabAnalysis> {
    let d = unit(dir, g.dim)?;
    let ranges: Vec<(i64, i64)> = (0..g.edges.len()).map(|e| edge_slab_range(g, e, &d)).collect();
    let lo = ranges.iter().map(|r| r.0).min().unwrap_or(0);
    let hi = ranges.iter().map(|r| r.1).max().unwrap_or(-1);
    let len = (hi - lo + 1).max(0) as usize;
    let mut diff = vec![0i64; len + 1];
    for &(a, b) in &ranges {
        diff[(a - lo) as usize] += 1;
        diff[(b - lo + 1) as usize] -= 1;
    }
    let mut counts = Vec::with_capacity(len);
    let mut run = 0i64;
    for x in &diff[..len] {
        run += x;
        counts.push(run as usize);
    }
    let simplex_counts = incidence.map(|inc| {
        let mut per: Vec<Vec<usize>> = vec![Vec::new(); len];
        for (e, &(a, b)) in ranges.iter().enumerate() {
            for j in a..=b {
                per[(j - lo) as usize].extend_from_slice(&inc[e]);
            }
        }
        per.into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s.len()
            })
            .collect()
    });
    let max_count = counts.iter().copied().max().unwrap_or(0);
    let scale = volume.map(|v| v.powf((g.dim as f64 - 1.0) / g.dim as f64));
    Ok(SlabAnalysis {
        direction: d,
        first_slab: lo,
        incidences: counts.iter().sum(),
        edge_counts: counts,
        simplex_counts,
        max_count,
        volume,
        count_ratio: scale.map(|s| max_count as f64 / s),
        first_level: 0,
        slice_areas: Vec::new(),
        max_slice: None,
        slice_ratio: None,
        directions_tried: 0,
    })
}

/// Orthonormal basis of the complement of a unit vector.
fn complement(d: &[f64]) -> Vec<Vec<f64>> {
    let n = d.len();
    let skip = (0..n).max_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs())).unwrap();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in (0..n).filter(|&k| k != skip) {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for b in std::iter::once(d).chain(basis.iter().map(|b| b.as_slice())) {
            let c = dot(&v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let nrm = dot(&v, &v).sqrt();
        basis.push(v.into_iter().map(|x| x / nrm).collect());
    }
    basis
}

struct Profile {
    first_level: i64,
    areas: Vec<f64>,
    max: f64,
}

/// Slice areas at every integer level along `d`, estimated as band volume
/// over band width with sampling stratified along the first plane axis.
fn slice_profile(nb: &Neighborhood, lo: &[f64], hi: &[f64], d: &[f64], p: &FalconerParams, seed: u64) -> Profile {
    let n = d.len();
    let plane = complement(d);
    let corners: Vec<Vec<f64>> = (0..1usize << n)
        .map(|m| (0..n).map(|k| if m >> k & 1 == 1 { hi[k] } else { lo[k] }).collect())
        .collect();
    let range = |v: &[f64]| {
        corners
            .iter()
            .map(|c| dot(c, v))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), t| (a.min(t), b.max(t)))
    };
    let (tmin, tmax) = range(d);
    let rect: Vec<(f64, f64)> = plane.iter().map(|u| range(u)).collect();
    let area: f64 = rect.iter().map(|(a, b)| b - a).product();
    let first = tmin.floor() as i64;
    let levels = (tmax.floor() as i64 - first + 1) as usize;

    let estimate = |t: i64, samples: usize, stream: u64| -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut x = vec![0.0; n];
        let mut hits = 0usize;
        for s in 0..samples {
            let h = t as f64 + p.band * rng.gen::<f64>();
            for k in 0..n {
                x[k] = h * d[k];
            }
            for (i, (u, &(a, b))) in plane.iter().zip(&rect).enumerate() {
                let f = if i == 0 {
                    (s as f64 + rng.gen::<f64>()) / samples as f64
                } else {
                    rng.gen::<f64>()
                };
                let c = a + f * (b - a);
                for k in 0..n {
                    x[k] += c * u[k];
                }
            }
            hits += nb.contains(&x) as usize;
        }
        area * hits as f64 / samples as f64
    };
    let stream = |t: i64, fine: bool| (t as u64) << 1 | fine as u64;
    let mut areas: Vec<f64> = (0..levels)
        .into_par_iter()
        .map(|i| {
            let t = first + i as i64;
            estimate(t, p.coarse_samples, stream(t, false))
        })
        .collect();
    let mut order: Vec<usize> = (0..levels).collect();
    order.sort_by(|&a, &b| areas[b].total_cmp(&areas[a]).then(a.cmp(&b)));
    let mut max = 0.0f64;
    for &i in order.iter().take(p.fine_levels.max(1)) {
        let t = first + i as i64;
        areas[i] = estimate(t, p.fine_samples, stream(t, true));
        max = max.max(areas[i]);
    }
    Profile {
        first_level: first,
        areas,
        max,
    }
}

/// Searches random directions, then refines the best by a shrinking compass
/// search on the sphere, minimizing the largest slice area.
pub fn falconer_direction(g: &EmbeddedGraph, radius: f64, params: &FalconerParams, seed: u64) -> Result<SlabAnalysis> {
    if !(radius > 0.0) {
        return Err(EmbeddingError::BadRadius(radius));
    }
    let nb = Neighborhood::new(g, radius);
    if nb.pieces.is_empty() {
        return Err(EmbeddingError::Empty);
    }
    let n = g.dim;
    let (lo, hi) = nb.pieces.bounds(radius);
    let volume = match params.volume {
        Some(v) => v,
        None => neighborhood_volume(g, radius, params.volume_samples, seed)?.value,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfa1c_0e5);
    let mut tried = 0usize;
    let mut eval = |d: &[f64]| {
        tried += 1;
        slice_profile(&nb, &lo, &hi, d, params, seed)
    };
    let mut best: Option<(Vec<f64>, Profile)> = None;
    for _ in 0..params.trials.max(1) {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let d = unit(&v, n)?;
        let prof = eval(&d);
        if best.as_ref().map_or(true, |b| prof.max < b.1.max) {
            best = Some((d, prof));
        }
    }
    let (mut d, mut prof) = best.expect("at least one trial");
    let mut step = 0.25;
    for _ in 0..params.refine_steps {
        let mut improved: Option<(Vec<f64>, Profile)> = None;
        for u in complement(&d) {
            for sgn in [1.0, -1.0] {
                let cand: Vec<f64> = d.iter().zip(&u).map(|(a, b)| a + sgn * step * b).collect();
                let cand = unit(&cand, n)?;
                let pr = eval(&cand);
                let bar = improved.as_ref().map_or(prof.max, |b| b.1.max);
                if pr.max < bar {
                    improved = Some((cand, pr));
                }
            }
        }
        match improved {
            Some((c, p)) => {
                d = c;
                prof = p;
            }
            None => step *= 0.5,
        }
    }
    let mut out = slab_counts(g, &d, None, Some(volume))?;
    let scale = volume.powf((n as f64 - 1.0) / n as f64);
    out.first_level = prof.first_level;
    out.slice_ratio = Some(prof.max / scale);
    out.max_slice = Some(prof.max);
    out.slice_areas = prof.areas;
    out.directions_tried = tried;
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Ratio {
    pub measured: f64,
    pub stderr: f64,
    pub rhs: f64,
    /// `measured / rhs`, infinite when `rhs = 0`.
    pub ratio: f64,
    pub degenerate: bool,
}

pub fn theorem1_report(v: &VolumeEstimate, rhs: f64) -> Theorem1Ratio {
    let degenerate = rhs <= 0.0;
    Theorem1Ratio {
        measured: v.value,
        stderr: v.stderr,
        rhs,
        ratio: if degenerate { f64::INFINITY } else { v.value / rhs },
        degenerate,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyStats {
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub min_over_median: f64,
}

/// Statistics over the finite ratios of a family.
pub fn family_stats(ratios: &[f64]) -> Option<FamilyStats> {
    let mut r: Vec<f64> = ratios.iter().copied().filter(|x| x.is_finite()).collect();
    if r.is_empty() {
        return None;
    }
    r.sort_by(f64::total_cmp);
    let k = r.len();
    let median = if k % 2 == 1 { r[k / 2] } else { 0.5 * (r[k / 2 - 1] + r[k / 2]) };
    Some(FamilyStats {
        count: k,
        min: r[0],
        median,
        max: r[k - 1],
        min_over_median: r[0] / median,
    })
}
