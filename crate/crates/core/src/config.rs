//! Run configuration read from TOML.
//!
//! Every table and key is optional; omitted values take the defaults of the
//! corresponding library type:
//!
//! ```toml
//! output_dir = "out"
//! seed = 7
//! workers = 4
//!
//! [model]
//! g = 2.5
//! omega_d = 10.0
//! phi = 1.5707963267948966
//!
//! [lattice]
//! width = 15
//! height = 15
//! boundary = "open"
//!
//! [sweep]
//! j_min = 0.5
//! j_max = 3.5
//! j_step = 0.05
//! delta_j = 0.05
//! mode = "one_site_same_site"
//! directions = ["up", "down"]
//!
//! [solver]
//! mixing = 0.5
//! tol = 1e-8
//! max_iter = 500
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bdg::SolverOptions;
use crate::error::{Error, Result};
use crate::lattice::LatticeConfig;
use crate::model::ModelParams;
use crate::sweep::SweepPlan;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    pub lattice: LatticeConfig,
    pub sweep: SweepPlan,
    pub solver: SolverOptions,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Worker threads for independent grid points; `None` uses all cores.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::default(),
            lattice: LatticeConfig::default(),
            sweep: SweepPlan::default(),
            solver: SolverOptions::default(),
            output_dir: PathBuf::from("output"),
            seed: 0,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks every nested invariant; failures surface as [`Error::Config`].
    pub fn validate(&self) -> Result<()> {
        fn wrap<T>(r: Result<T>) -> Result<T> {
            r.map_err(|e| Error::Config(e.to_string()))
        }
        wrap(self.model.validate())?;
        wrap(self.lattice.validate())?;
        wrap(self.sweep.validate())?;
        wrap(self.solver.validate())?;
        wrap(self.model.impurity(&self.lattice))?;
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Additionally checks that every site the sweep plan probes lies on the lattice.
    pub fn validate_sweep(&self) -> Result<()> {
        self.validate()?;
        let check = || -> Result<()> {
            let impurity = self.model.impurity(&self.lattice)?;
            self.sweep.probe(&self.lattice, impurity)?;
            self.sweep.reference(&self.lattice, impurity)?;
            Ok(())
        };
        check().map_err(|e| Error::Config(e.to_string()))
    }

    /// Creates the output directory if needed and confirms it is writable.
    pub fn prepare_output_dir(&self) -> Result<&Path> {
        let dir = self.output_dir.as_path();
        fs::create_dir_all(dir).map_err(|e| Error::Config(format!("{}: {e}", dir.display())))?;
        let meta = fs::metadata(dir).map_err(|e| Error::Config(format!("{}: {e}", dir.display())))?;
        if meta.permissions().readonly() {
            return Err(Error::Config(format!("{} is not writable", dir.display())));
        }
        Ok(dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::SweepMode;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn partial_tables_and_round_trip() {
        let cfg = RunConfig::from_toml("[model]\ng = 1.5\n[sweep]\nmode = \"c2\"\n[lattice]\nwidth = 9\nheight = 9\n")
            .unwrap();
        assert_eq!(cfg.model.g, 1.5);
        assert_eq!(cfg.model.t, 1.0);
        assert_eq!(cfg.sweep.mode, SweepMode::C2);
        assert_eq!(cfg.lattice.num_sites(), 81);
        let again = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn bad_values_are_config_errors() {
        assert!(matches!(RunConfig::from_toml("[model]\ng = \"x\""), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_toml("unknown = 1"), Err(Error::Config(_))));
        let cfg = RunConfig::from_toml("[solver]\nmixing = 2.0").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg = RunConfig::from_toml("[lattice]\nwidth = 1").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg = RunConfig::from_toml("[lattice]\nwidth = 7\nheight = 7\n[sweep]\nsite_offsets = [[4, 4]]").unwrap();
        assert!(cfg.validate().is_ok());
        assert!(matches!(cfg.validate_sweep(), Err(Error::Config(_))));
    }
}
