//! TOML run configuration. Unknown keys are rejected.
//!
//! ```toml
//! seed = 1
//! output = "scan.csv"
//!
//! [model]
//! kind = "dephasing"        # or "random", "file"
//! g = 1.0
//! a = 1.0
//! r_s = [0.0, 0.0, 0.0]
//! r_e = [0.0, 0.0, 0.0]
//!
//! [preparation1]
//! type = "identity"
//!
//! [preparation2]
//! type = "rotation"
//! axis = [1.0, 0.0, 0.0]
//! angle = 1.5707963267948966
//!
//! [grid]
//! t_start = 0.0
//! t_end = 6.283185307179586
//! n_points = 200
//!
//! [witness]
//! h = 1e-5
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::Deserialize;

use nmwitness::catalog::{dephasing_preparations, model_dephasing, model_random, model_uncorrelated_control, ModelInstance};
use nmwitness::io::{read_schedule, read_state};
use nmwitness::preparation::{pin_to_basis, PreparationProcedure};
use nmwitness::state::qubit_from_bloch;
use nmwitness::witness::{linear_grid, WitnessOptions, DEFAULT_FD_STEP, DETECTION_THRESHOLD, SLACK_TOL};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub model: ModelSpec,
    pub preparation1: Option<PreparationSpec>,
    pub preparation2: Option<PreparationSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub witness: WitnessSpec,
    #[serde(default)]
    pub search: SearchSpec,
    /// Directory that relative file paths in the config are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Dephasing {
        g: f64,
        a: f64,
        #[serde(default)]
        r_s: [f64; 3],
        #[serde(default)]
        r_e: [f64; 3],
        #[serde(default)]
        uncorrelated: bool,
    },
    Random {
        #[serde(default = "two")]
        d_s: usize,
        #[serde(default = "two")]
        d_e: usize,
        rank: Option<usize>,
        /// Defaults to the run seed.
        seed: Option<u64>,
        #[serde(default)]
        uncorrelated: bool,
    },
    File {
        state: PathBuf,
        hamiltonian: PathBuf,
        #[serde(default)]
        uncorrelated: bool,
    },
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PreparationSpec {
    Identity {},
    /// Qubit rotation `exp(−i angle n·σ/2)`.
    Rotation { axis: [f64; 3], angle: f64 },
    /// Pin to the computational basis state `|index⟩`.
    Basis { index: usize },
    /// Pin to the qubit state with the given Bloch vector.
    Bloch { bloch: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { t_start: 0.0, t_end: std::f64::consts::TAU, n_points: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WitnessSpec {
    pub h: f64,
    pub threshold: f64,
    pub slack_tolerance: f64,
    pub n_steps: usize,
}

impl Default for WitnessSpec {
    fn default() -> Self {
        let o = WitnessOptions::default();
        Self { h: DEFAULT_FD_STEP, threshold: DETECTION_THRESHOLD, slack_tolerance: SLACK_TOL, n_steps: o.n_steps }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSpec {
    pub t: f64,
    pub budget: usize,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self { t: 0.0, budget: 2000 }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).context("invalid config")?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        ensure!(g.n_points >= 1, "grid.n_points must be at least 1");
        ensure!(g.t_start.is_finite() && g.t_end.is_finite(), "grid bounds must be finite");
        ensure!(g.n_points == 1 || g.t_start < g.t_end, "grid.t_start must be below grid.t_end");
        self.options().validate()?;
        Ok(())
    }

    pub fn options(&self) -> WitnessOptions {
        WitnessOptions {
            h: self.witness.h,
            n_steps: self.witness.n_steps,
            threshold: self.witness.threshold,
            guard: WitnessOptions::default().guard,
            slack_tol: self.witness.slack_tolerance,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        linear_grid(self.grid.t_start, self.grid.t_end, self.grid.n_points)
    }

    pub fn build_model(&self) -> Result<ModelInstance> {
        let (model, uncorrelated) = match &self.model {
            ModelSpec::Dephasing { g, a, r_s, r_e, uncorrelated } => (model_dephasing(*g, *a, *r_s, *r_e)?, *uncorrelated),
            ModelSpec::Random { d_s, d_e, rank, seed, uncorrelated } => {
                let rank = rank.unwrap_or(d_s * d_e);
                (model_random(*d_s, *d_e, rank, seed.unwrap_or(self.seed))?, *uncorrelated)
            }
            ModelSpec::File { state, hamiltonian, uncorrelated } => {
                let state_path = self.base_dir.join(state);
                let ham_path = self.base_dir.join(hamiltonian);
                let rho = read_state(&state_path).with_context(|| format!("loading {}", state_path.display()))?;
                let sched = read_schedule(&ham_path).with_context(|| format!("loading {}", ham_path.display()))?;
                (ModelInstance::custom("file", rho, sched)?, *uncorrelated)
            }
        };
        Ok(if uncorrelated { model_uncorrelated_control(&model)? } else { model })
    }

    /// The two preparations; when both are absent on the dephasing model the
    /// default pair (identity, quarter turn about x) is used.
    pub fn preparations(&self, d_s: usize) -> Result<(PreparationProcedure, PreparationProcedure)> {
        match (&self.preparation1, &self.preparation2) {
            (Some(p1), Some(p2)) => Ok((p1.build(d_s)?, p2.build(d_s)?)),
            (None, None) if matches!(self.model, ModelSpec::Dephasing { .. }) => Ok(dephasing_preparations()),
            _ => bail!("both [preparation1] and [preparation2] are required"),
        }
    }
}

impl PreparationSpec {
    pub fn build(&self, d_s: usize) -> Result<PreparationProcedure> {
        Ok(match self {
            PreparationSpec::Identity {} => PreparationProcedure::identity(d_s),
            PreparationSpec::Rotation { axis, angle } => {
                ensure!(d_s == 2, "rotation preparations need a qubit system, got dimension {d_s}");
                PreparationProcedure::qubit_rotation(*axis, *angle)?
            }
            PreparationSpec::Basis { index } => pin_to_basis(d_s, *index)?,
            PreparationSpec::Bloch { bloch } => {
                ensure!(d_s == 2, "Bloch-vector pins need a qubit system, got dimension {d_s}");
                PreparationProcedure::pin(qubit_from_bloch(*bloch)?)
            }
        })
    }
}
