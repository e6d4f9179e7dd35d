//! Run configuration, read from TOML. Every section is optional.

use std::path::{Path, PathBuf};

use hypthick::arithmetic::BoundConstants;
use hypthick::embedding::{FalconerParams, KbParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Halfspace slack for Voronoi membership probes.
    pub membership: f64,
    /// Requested half-width of Mahler measure enclosures.
    pub mahler_precision: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            membership: 1e-9,
            mahler_precision: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TriangulateConfig {
    /// Fixed packing scale; derived from the group when absent.
    pub epsilon: Option<f64>,
    pub probes: usize,
    pub singular_samples: usize,
    pub membership_probes: usize,
}

impl Default for TriangulateConfig {
    fn default() -> Self {
        Self {
            epsilon: None,
            probes: 4096,
            singular_samples: 200,
            membership_probes: 10_000,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedConfig {
    pub dim: usize,
    pub kb: KbParams,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            kb: KbParams::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub sizes: Vec<usize>,
    pub degree: usize,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            sizes: vec![64, 256, 1024, 4096],
            degree: 4,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Base directory for relative output paths.
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Monte Carlo samples for neighborhood volumes.
    pub samples: usize,
    pub tolerances: Tolerances,
    pub constants: BoundConstants,
    pub triangulate: TriangulateConfig,
    pub embed: EmbedConfig,
    pub slices: FalconerParams,
    pub family: FamilyConfig,
    pub paths: Paths,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            samples: 2_000_000,
            tolerances: Tolerances::default(),
            constants: BoundConstants::default(),
            triangulate: TriangulateConfig::default(),
            embed: EmbedConfig::default(),
            slices: FalconerParams::default(),
            family: FamilyConfig::default(),
            paths: Paths::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let c: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::from_toml(&crate::read(path)?)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Config(format!("{what} must be positive")));
        let t = &self.tolerances;
        if !(t.membership > 0.0) {
            return bad("tolerances.membership");
        }
        if !(t.mahler_precision > 0.0) {
            return bad("tolerances.mahler_precision");
        }
        if self.samples == 0 {
            return bad("samples");
        }
        if let Some(e) = self.triangulate.epsilon {
            if !(e > 0.0) {
                return bad("triangulate.epsilon");
            }
        }
        if !(self.slices.band > 0.0) {
            return bad("slices.band");
        }
        let c = &self.constants;
        for (name, v) in [
            ("constants.c1", c.c1),
            ("constants.c2", c.c2),
            ("constants.c4", c.c4),
            ("constants.c6", c.c6),
            ("constants.mu_n", c.mu_n),
            ("constants.c_exponent", c.c_exponent),
            ("constants.simplex_constant", c.simplex_constant),
        ] {
            if !(v > 0.0) {
                return bad(name);
            }
        }
        if c.m_n == 0 {
            return bad("constants.m_n");
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        match &self.paths.out_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        }
    }
}
