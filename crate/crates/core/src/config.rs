//! Run configuration, loadable from TOML. Every field has a default so
//! a partial (or absent) config file is fine.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};
use crate::gabor::{make_lattice, Lattice};
use crate::grid::{make_grid, Grid};
use crate::wavefront::{RadialConfig, SectorPartition};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Grid size; power of two.
    pub n: usize,
    /// Spatial period L; the grid covers [-L/2, L/2).
    pub length: f64,
    /// Number of conic sectors (even).
    pub k_sectors: usize,
    /// Decay-order threshold separating regular from singular sectors.
    pub n_thr: f64,
    /// Requested lattice density αβ. The time step is taken twice the
    /// frequency step (α = sqrt(2·αβ), β = sqrt(αβ/2) before snapping):
    /// the finer frequency rows are needed to resolve line singularities
    /// passing close to the time axis.
    pub alpha_beta: f64,
    /// Relative residual target for the conjugate-gradient dual solve.
    pub cg_tol: f64,
    /// Inner radius of the decay-fit annulus.
    pub r_min: f64,
    /// Number of geometric shells in the annulus.
    pub n_shells: usize,
    /// Sector slack allowed when comparing singular sets.
    pub margin: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n: 1024,
            length: 64.0,
            k_sectors: 72,
            n_thr: 4.0,
            alpha_beta: std::f64::consts::FRAC_PI_2,
            cg_tol: 1e-12,
            r_min: 6.0,
            n_shells: 12,
            margin: 1,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| GaborError::Parse(format!("config: {e}")))
    }

    pub fn grid(&self) -> Result<Grid> {
        make_grid(self.n, self.length)
    }

    pub fn partition(&self) -> Result<SectorPartition> {
        SectorPartition::new(self.k_sectors)
    }

    pub fn radial(&self, grid: Grid) -> Result<RadialConfig> {
        let r_max = 0.8 * (grid.length() / 2.0).min(grid.freq_max());
        RadialConfig::new(self.r_min, r_max, self.n_shells)
    }

    pub fn lattice(&self, grid: Grid) -> Result<Lattice> {
        let alpha = (2.0 * self.alpha_beta).sqrt();
        let beta = (self.alpha_beta / 2.0).sqrt();
        make_lattice(alpha, beta, grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_consistent() {
        let cfg = Config::default();
        let grid = cfg.grid().unwrap();
        let radial = cfg.radial(grid).unwrap();
        assert!(radial.r_max <= grid.freq_max());
        let lat = cfg.lattice(grid).unwrap();
        // Snapped density must stay at or below the frame bound.
        assert!(lat.density_product() <= 2.0 * std::f64::consts::PI * (1.0 + 1e-9));
        cfg.partition().unwrap();
    }

    #[test]
    fn partial_toml_fills_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "n = 256\nlength = 32.0\n").unwrap();
        let cfg = Config::load(&path).unwrap();
        assert_eq!(cfg.n, 256);
        assert_eq!(cfg.length, 32.0);
        assert_eq!(cfg.k_sectors, 72);
        assert_eq!(cfg.n_thr, 4.0);
    }

    #[test]
    fn shipped_default_file_matches_compiled_defaults() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../config/default.toml");
        let cfg = Config::load(Path::new(path)).unwrap();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(text, toml::to_string(&Config::default()).unwrap());
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "grid_points = 256\n").unwrap();
        assert!(Config::load(&path).is_err());
    }
}
