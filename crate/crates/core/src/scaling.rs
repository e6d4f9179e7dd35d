//! Size families of random regular graphs: thick embedding, neighborhood
//! volume, slicing and the Cheeger-based lower-bound ratio per size, with a
//! log-log fit of volume against vertex count.

use serde::{Deserialize, Serialize};

use crate::embedding::{
    falconer_direction, family_stats, kb::kb_embed_with, neighborhood_volume, theorem1_report, EmbeddingError,
    FalconerParams, FamilyStats, KbParams, Theorem1Ratio,
};
use crate::skeleton::{cheeger_spectral, random_connected_regular, theorem1_rhs, SkeletonError};

#[derive(Debug, thiserror::Error)]
pub enum ScalingError {
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error("need at least two sizes for a fit")]
    TooFewSizes,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalingParams {
    pub sizes: Vec<usize>,
    pub degree: usize,
    pub dim: usize,
    pub seed: u64,
    pub volume_samples: usize,
    pub falconer: FalconerParams,
    pub kb: KbParams,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self {
            sizes: vec![64, 256, 1024, 4096],
            degree: 4,
            dim: 3,
            seed: 1,
            volume_samples: 2_000_000,
            falconer: FalconerParams::default(),
            kb: KbParams::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingRow {
    pub vertices: usize,
    pub edges: usize,
    pub levels: usize,
    pub attempts: usize,
    pub box_volume: f64,
    pub thickness_pass: bool,
    pub min_distance: Option<f64>,
    pub volume: f64,
    pub volume_stderr: f64,
    pub lambda2: Option<f64>,
    pub cheeger_lower: f64,
    pub cheeger_upper: f64,
    pub theorem1: Theorem1Ratio,
    pub max_slice: Option<f64>,
    /// `max_slice / V^{(N-1)/N}`.
    pub slice_ratio: Option<f64>,
    pub max_count: usize,
    pub direction: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least squares for `ln y = slope ln x + intercept`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Option<LogLogFit> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LogLogFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub params: ScalingParams,
    pub rows: Vec<ScalingRow>,
    /// Volume against vertex count.
    pub fit: Option<LogLogFit>,
    pub all_thick: bool,
    /// Largest over smallest slice ratio.
    pub slice_ratio_spread: Option<f64>,
    pub theorem1: Option<FamilyStats>,
}

fn mix(seed: u64, n: usize, salt: u64) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt.wrapping_mul(0xbf58_476d_1ce4_e5b9)
}

pub fn scaling_row(n: usize, p: &ScalingParams) -> Result<ScalingRow, ScalingError> {
    let g = random_connected_regular(n, p.degree, mix(p.seed, n, 1))?;
    let kb = kb_embed_with(&g, p.dim, mix(p.seed, n, 2), &p.kb)?;
    let v = neighborhood_volume(&kb.graph, 1.0, p.volume_samples, mix(p.seed, n, 3))?;
    let mut fp = p.falconer.clone();
    fp.volume = Some(v.value);
    let s = falconer_direction(&kb.graph, 1.0, &fp, mix(p.seed, n, 4))?;
    let h = cheeger_spectral(&g)?;
    let rhs = theorem1_rhs(h.lower, n as f64, p.dim);
    Ok(ScalingRow {
        vertices: n,
        edges: g.edge_count(),
        levels: kb.levels,
        attempts: kb.attempts,
        box_volume: kb.box_volume,
        thickness_pass: kb.thickness.pass,
        min_distance: kb.thickness.min_distance(),
        volume: v.value,
        volume_stderr: v.stderr,
        lambda2: h.lambda2,
        cheeger_lower: h.lower,
        cheeger_upper: h.upper,
        theorem1: theorem1_report(&v, rhs),
        max_slice: s.max_slice,
        slice_ratio: s.slice_ratio,
        max_count: s.max_count,
        direction: s.direction,
    })
}

pub fn scaling_family(p: &ScalingParams) -> Result<ScalingReport, ScalingError> {
    if p.sizes.len() < 2 {
        return Err(ScalingError::TooFewSizes);
    }
    let rows = p.sizes.iter().map(|&n| scaling_row(n, p)).collect::<Result<Vec<_>, _>>()?;
    Ok(summarize(p.clone(), rows))
}

pub fn summarize(params: ScalingParams, rows: Vec<ScalingRow>) -> ScalingReport {
    let x: Vec<f64> = rows.iter().map(|r| r.vertices as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.volume).collect();
    let sr: Vec<f64> = rows.iter().filter_map(|r| r.slice_ratio).collect();
    let spread = (sr.len() == rows.len() && !sr.is_empty()).then(|| {
        let (lo, hi) = sr.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        hi / lo
    });
    let ratios: Vec<f64> = rows.iter().map(|r| r.theorem1.ratio).collect();
    ScalingReport {
        fit: loglog_fit(&x, &y),
        all_thick: rows.iter().all(|r| r.thickness_pass),
        slice_ratio_spread: spread,
        theorem1: family_stats(&ratios),
        params,
        rows,
    }
}
