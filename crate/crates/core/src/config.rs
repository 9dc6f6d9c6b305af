//! JSON scenario files.
//!
//! Loading fills every default, so emitting a loaded config and loading the
//! result again reproduces the same bytes.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::breather::BreatherOptions;
use crate::diagnostics::DimensionOptions;
use crate::driving::DrivingSpec;
use crate::error::{Error, Result};
use crate::init;
use crate::integrator::IntegratorConfig;
use crate::lattice::{Boundary, Lattice, LatticeState};
use crate::model::{Dnls, ModelParams};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub sites: usize,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
}

fn default_boundary() -> Boundary {
    Boundary::Dirichlet
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { sites: 256, boundary: Boundary::Dirichlet }
    }
}

/// How an initial state is produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    Zero,
    /// Uniform direction on the sphere of the given radius, from `seed`.
    Random { radius: f64 },
    /// As `Random`, with the radius a multiple of the absorbing radius K.
    RandomAbsorbing { multiple: f64 },
    /// Explicit amplitudes, left to right.
    Values { values: Vec<Complex64> },
}

impl InitialState {
    pub fn build(&self, model: &Dnls, seed: u64) -> Result<LatticeState> {
        let lat = model.lattice();
        match self {
            InitialState::Zero => Ok(LatticeState::zeros(lat)),
            InitialState::Random { radius } => init::seeded_state(lat, *radius, seed),
            InitialState::RandomAbsorbing { multiple } => {
                let k = std::f64::consts::SQRT_2 * model.driving_spec().sup_norm().0 / model.effective_damping()?;
                init::seeded_state(lat, multiple * k, seed)
            }
            InitialState::Values { values } => {
                if values.len() != lat.sites {
                    return Err(Error::Config(format!(
                        "initial state has {} values, lattice has {} sites",
                        values.len(),
                        lat.sites
                    )));
                }
                LatticeState::from_values(values.clone(), lat.boundary).map_err(|e| Error::Config(e.to_string()))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = match self {
            InitialState::Random { radius } => !(radius.is_finite() && *radius >= 0.0),
            InitialState::RandomAbsorbing { multiple } => !(multiple.is_finite() && *multiple >= 0.0),
            _ => false,
        };
        if bad {
            return Err(Error::Config("initial radius must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Poincaré sampling for the dimension estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DimensionScenario {
    /// Time discarded before sampling.
    pub transient: f64,
    /// Time between samples; the driving period when absent.
    pub stride: Option<f64>,
    pub points: usize,
    /// The estimate passes when its confidence interval is narrower than this.
    pub max_ci_width: f64,
    pub options: DimensionOptions,
}

impl Default for DimensionScenario {
    fn default() -> Self {
        Self { transient: 100.0, stride: None, points: 2000, max_ci_width: 0.5, options: DimensionOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    pub t0: f64,
    /// Integration length for simulate, verify-bounds, contraction and
    /// continuity; extra time after T(ξ, r) for tail.
    pub horizon: f64,
    pub initial: InitialState,
    /// Second orbit for contraction and continuity; the first one's recipe
    /// with `seed + 1` (contraction) or the same state (continuity) when absent.
    pub second_initial: Option<InitialState>,
    pub seed: u64,
    /// Absorbing check runs over this many multiples of T_entry.
    pub horizon_factor: f64,
    /// Relative slack on radii and on the a-priori bound.
    pub slack: f64,
    /// Relative slack on the predicted contraction rate.
    pub rate_slack: f64,
    pub xi: f64,
    /// Breather seeds; `null` is the zero state.
    pub seeds: Vec<Option<u64>>,
    pub phases: usize,
    pub breather: BreatherOptions,
    /// Second driving for the continuity check.
    pub perturbation: Option<DrivingSpec>,
    pub dimension: DimensionScenario,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            t0: 0.0,
            horizon: 50.0,
            initial: InitialState::Random { radius: 1.0 },
            second_initial: None,
            seed: 0,
            horizon_factor: 5.0,
            slack: 1e-6,
            rate_slack: 0.05,
            xi: 1e-4,
            seeds: vec![None],
            phases: 8,
            breather: BreatherOptions::default(),
            perturbation: None,
            dimension: DimensionScenario::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub model: ModelParams,
    #[serde(default)]
    pub lattice: LatticeConfig,
    pub driving: DrivingSpec,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub scenario: ScenarioParams,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        self.model.validate()?;
        self.lattice()?;
        self.driving.validate()?;
        self.integrator.validate()?;
        let s = &self.scenario;
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;
        if !s.t0.is_finite() || !(s.horizon.is_finite() && s.horizon >= 0.0) {
            return Err(Error::Config("t0 and horizon must be finite, horizon non-negative".into()));
        }
        if !finite_pos(s.horizon_factor) || !(s.slack.is_finite() && s.slack >= 0.0)
            || !(0.0..1.0).contains(&s.rate_slack) || !finite_pos(s.xi) {
            return Err(Error::Config("horizon_factor and xi must be positive, slack non-negative".into()));
        }
        if s.phases == 0 || s.seeds.is_empty() {
            return Err(Error::Config("phases and seeds must be non-empty".into()));
        }
        s.initial.validate()?;
        if let Some(i) = &s.second_initial {
            i.validate()?;
        }
        if let Some(p) = &s.perturbation {
            p.validate()?;
        }
        s.breather.integrator.validate()?;
        let d = &s.dimension;
        if !(d.transient.is_finite() && d.transient >= 0.0) || d.stride.is_some_and(|h| !finite_pos(h)) || d.points < 2 {
            return Err(Error::Config("dimension transient, stride and points are out of range".into()));
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.lattice.sites, self.lattice.boundary).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build_model(&self) -> Result<Dnls> {
        Dnls::new(self.model, self.lattice()?, &self.driving)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.scenario.seed = seed;
        self
    }
}
