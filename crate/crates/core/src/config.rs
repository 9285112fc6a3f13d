use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{EngineConfig, FlowEngine};
use crate::graph::RadialGraph;
use crate::grid::{GridKind, SphereGrid};
use crate::shapes::{make_shape, ShapeSpec};
use crate::speed::{SpeedFamily, SpeedFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "N")]
    pub nodes: usize,
}

/// Run description, read from a TOML file:
///
/// ```toml
/// n = 1
/// out_dir = "out"
///
/// [grid]
/// N = 256
///
/// [shape]
/// kind = "perturbed"
/// r = 1.0
/// eps = 0.1
/// l = 2
///
/// [speed]
/// family = "power"
/// alpha = 1.0
///
/// [engine]
/// cfl = 0.4
/// projection = true
/// t_max = 20.0
/// conv_tol = 1e-9
/// record_every = 50
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Records between snapshot files; 0 writes only the first and last.
    #[serde(default)]
    pub snapshot_every: usize,
    pub grid: GridConfig,
    pub shape: ShapeSpec,
    pub speed: SpeedFamily,
    #[serde(default)]
    pub engine: EngineConfig,
}

fn default_seed() -> u64 {
    0
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        GridKind::from_dimension(self.n).map_err(|e| Error::Config(e.to_string()))?;
        if self.grid.nodes < crate::grid::MIN_NODES {
            return Err(Error::Config(format!(
                "grid.N must be at least {}",
                crate::grid::MIN_NODES
            )));
        }
        self.engine.validate()?;
        self.speed_function()?;
        Ok(())
    }

    pub fn sphere_grid(&self) -> Result<SphereGrid> {
        SphereGrid::new(GridKind::from_dimension(self.n)?, self.grid.nodes)
    }

    pub fn speed_function(&self) -> Result<SpeedFunction> {
        SpeedFunction::new(self.speed.clone()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn initial_graph(&self) -> Result<RadialGraph> {
        make_shape(&self.shape, self.sphere_grid()?)
    }

    pub fn engine(&self) -> Result<FlowEngine> {
        FlowEngine::new(self.speed_function()?, self.engine.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
n = 2
out_dir = "runs/a"

[grid]
N = 64

[shape]
kind = "perturbed"
r = 1.0
eps = 0.05
l = 2

[speed]
family = "power_sum"
terms = [{ a = 1.0, k = 1.0 }, { a = 0.5, k = 2.0 }]

[engine]
cfl = 0.3
t_max = 2.5
record_every = 10
"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = RunConfig::from_toml_str(EXAMPLE).unwrap();
        assert_eq!(cfg.grid.nodes, 64);
        assert_eq!(cfg.engine.cfl, 0.3);
        assert!(cfg.engine.projection);
        assert_eq!(cfg.engine.conv_tol, 1e-9);
        assert_eq!(cfg.seed, 0);
        assert!(cfg.initial_graph().is_ok());
    }

    #[test]
    fn round_trips_field_identical() {
        let cfg = RunConfig::from_toml_str(EXAMPLE).unwrap();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_toml_str(&EXAMPLE.replace("n = 2", "n = 3")).is_err());
        assert!(RunConfig::from_toml_str(&EXAMPLE.replace("N = 64", "N = 8")).is_err());
        assert!(RunConfig::from_toml_str(&EXAMPLE.replace("cfl = 0.3", "cfl = -1.0")).is_err());
        assert!(RunConfig::from_toml_str(&EXAMPLE.replace("k = 2.0", "k = 0.0")).is_err());
        assert!(RunConfig::from_toml_str(&EXAMPLE.replace("t_max", "tmax")).is_err());
    }
}
