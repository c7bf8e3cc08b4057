//! Experiment configuration files (TOML, strict keys).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::QuenchKind;
use crate::freefermion::GapDefinition;
use crate::model::{Boundary, DisorderScaling, ModelSpec};
use crate::oracle::MAX_SITES;
use crate::records::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "statics_sweep")]
    StaticsSweep,
    #[serde(rename = "fidelity_sweep")]
    FidelitySweep,
    #[serde(rename = "gap_crossing")]
    GapCrossing,
    #[serde(rename = "collapse")]
    Collapse,
    #[serde(rename = "central_charge")]
    CentralCharge,
    #[serde(rename = "quench_zero_T", alias = "quench_zero_t")]
    QuenchZeroT,
    #[serde(rename = "quench_thermal")]
    QuenchThermal,
    #[serde(rename = "oracle_validate")]
    OracleValidate,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::StaticsSweep => "statics_sweep",
            Experiment::FidelitySweep => "fidelity_sweep",
            Experiment::GapCrossing => "gap_crossing",
            Experiment::Collapse => "collapse",
            Experiment::CentralCharge => "central_charge",
            Experiment::QuenchZeroT => "quench_zero_T",
            Experiment::QuenchThermal => "quench_thermal",
            Experiment::OracleValidate => "oracle_validate",
        }
    }
}

/// Either an explicit list or `{ start, stop, count }` (both ends included).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Default for Grid {
    fn default() -> Self {
        Grid::List(Vec::new())
    }
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub coupling: f64,
    pub gamma: f64,
    pub seed: u64,
    pub scaling: DisorderScaling,
    pub gap: GapDefinition,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            coupling: 1.0,
            gamma: 1.0,
            seed: 1,
            scaling: DisorderScaling::Prefactor,
            gap: GapDefinition::MinQuasiparticle,
        }
    }
}

impl ModelSection {
    /// Spec for chain length `length`, field `lambda J` and disorder `r`.
    pub fn spec(&self, length: usize, lambda: f64, r: f64) -> ModelSpec {
        ModelSpec {
            length,
            coupling: self.coupling,
            field: lambda * self.coupling,
            gamma: self.gamma,
            disorder: r,
            boundary: Boundary::Open,
            seed: self.seed,
            scaling: self.scaling,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    pub lengths: Vec<usize>,
    pub lambdas: Grid,
    pub disorders: Vec<f64>,
    pub times: Grid,
    pub temperatures: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Global,
    Local,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseAt {
    /// Every size at `collapse_lambda`.
    #[default]
    Fixed,
    /// Each size at its gap-crossing pseudo-critical point.
    PseudoCritical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    /// Dynamical exponent in `1 / (L^zeta Delta)`.
    pub zeta: f64,
    pub quench_kinds: Vec<KindName>,
    /// Site of a local quench (0-based); defaults to `L / 2`.
    pub site: Option<usize>,
    pub delta_lambda: f64,
    /// Time window averaged for asymptotic values; defaults to the second
    /// half of the time grid.
    pub asymptotic_window: Option<[f64; 2]>,
    pub collapse_at: CollapseAt,
    pub collapse_lambda: f64,
    pub nu_range: [f64; 2],
    pub x_window: [f64; 2],
    /// Number of cuts per entropy profile; 0 means every cut.
    pub cuts: usize,
    /// Streams per ensemble chunk; defaults to `ceil(n / 256)`.
    pub chunk_size: Option<u64>,
    pub checkpoint: bool,
    pub max_failure_fraction: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            zeta: 1.0,
            quench_kinds: vec![KindName::Global, KindName::Local],
            site: None,
            delta_lambda: 0.5,
            asymptotic_window: None,
            collapse_at: CollapseAt::Fixed,
            collapse_lambda: 1.0,
            nu_range: [0.2, 3.0],
            x_window: [0.125, 0.375],
            cuts: 0,
            chunk_size: None,
            checkpoint: false,
            max_failure_fraction: 0.01,
        }
    }
}

impl Options {
    pub fn quench_kind(&self, name: KindName, length: usize) -> QuenchKind {
        match name {
            KindName::Global => QuenchKind::Global,
            KindName::Local => QuenchKind::Local(self.site.unwrap_or(length / 2)),
        }
    }
}

fn default_realizations() -> u64 {
    100
}

fn default_output() -> PathBuf {
    PathBuf::from("output")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default = "default_realizations")]
    pub realizations: u64,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub options: Options,
}

/// Problem with a config file; the message names the offending key and,
/// for syntax errors, the line.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn require(ok: bool, key: &str, what: &str, errors: &mut Vec<String>) {
    if !ok {
        errors.push(format!("`{key}`: {what}"));
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.grids.lambdas.values()
    }

    pub fn times(&self) -> Vec<f64> {
        self.grids.times.values()
    }

    /// Time window for asymptotic averages.
    pub fn asymptotic_window(&self) -> (f64, f64) {
        match self.options.asymptotic_window {
            Some([a, b]) => (a, b),
            None => {
                let t_max = self.times().last().copied().unwrap_or(0.0);
                (0.5 * t_max, t_max)
            }
        }
    }

    /// Checks that the grids this experiment needs are present and sane.
    pub fn validate(&self) -> Result<(), ConfigError> {
        use Experiment::*;
        let mut errors = Vec::new();
        let g = &self.grids;
        let lambdas = self.lambdas();
        let times = self.times();
        let m = &self.model;

        require(m.coupling > 0.0 && m.coupling.is_finite(), "model.coupling", "must be positive", &mut errors);
        require(m.gamma.is_finite(), "model.gamma", "must be finite", &mut errors);
        require(self.realizations > 0, "realizations", "must be positive", &mut errors);
        require(self.workers != Some(0), "workers", "must be positive", &mut errors);
        require(!g.lengths.is_empty(), "grids.lengths", "required", &mut errors);
        require(g.lengths.iter().all(|&l| l >= 2), "grids.lengths", "every L must be at least 2", &mut errors);
        require(
            g.disorders.iter().all(|&r| r >= 0.0 && r.is_finite()),
            "grids.disorders",
            "every r must be nonnegative",
            &mut errors,
        );
        require(lambdas.iter().all(|x| x.is_finite()), "grids.lambdas", "must be finite", &mut errors);
        let o = &self.options;
        require(
            (0.0..=1.0).contains(&o.max_failure_fraction),
            "options.max_failure_fraction",
            "must lie in [0, 1]",
            &mut errors,
        );
        require(o.chunk_size != Some(0), "options.chunk_size", "must be positive", &mut errors);

        let needs_disorders = !matches!(self.experiment, OracleValidate);
        if needs_disorders {
            require(!g.disorders.is_empty(), "grids.disorders", "required", &mut errors);
        }
        match self.experiment {
            StaticsSweep | FidelitySweep | CentralCharge => {
                require(!lambdas.is_empty(), "grids.lambdas", "required", &mut errors);
            }
            GapCrossing => {
                require(g.lengths.len() >= 2, "grids.lengths", "needs at least 2 sizes", &mut errors);
                require(lambdas.len() >= 2, "grids.lambdas", "needs at least 2 points", &mut errors);
                require(
                    lambdas.windows(2).all(|w| w[1] > w[0]),
                    "grids.lambdas",
                    "must be strictly increasing",
                    &mut errors,
                );
                require(
                    g.lengths.windows(2).all(|w| w[1] > w[0]),
                    "grids.lengths",
                    "must be strictly increasing",
                    &mut errors,
                );
            }
            Collapse => {
                require(g.lengths.len() >= 3, "grids.lengths", "needs at least 3 sizes", &mut errors);
                require(o.nu_range[1] > o.nu_range[0], "options.nu_range", "must be increasing", &mut errors);
                require(
                    o.x_window[1] > o.x_window[0] && o.x_window[0] >= 0.0,
                    "options.x_window",
                    "must be an increasing pair of nonnegative numbers",
                    &mut errors,
                );
                if o.collapse_at == CollapseAt::PseudoCritical {
                    require(lambdas.len() >= 2, "grids.lambdas", "pseudo-critical collapse needs a lambda grid", &mut errors);
                    require(
                        lambdas.windows(2).all(|w| w[1] > w[0]),
                        "grids.lambdas",
                        "must be strictly increasing",
                        &mut errors,
                    );
                }
            }
            QuenchZeroT | QuenchThermal => {
                require(!lambdas.is_empty(), "grids.lambdas", "required (initial couplings)", &mut errors);
                require(!times.is_empty(), "grids.times", "required", &mut errors);
                require(times.iter().all(|&t| t >= 0.0), "grids.times", "must be nonnegative", &mut errors);
                require(
                    times.windows(2).all(|w| w[1] > w[0]),
                    "grids.times",
                    "must be strictly increasing",
                    &mut errors,
                );
                if let Some([a, b]) = o.asymptotic_window {
                    require(b >= a, "options.asymptotic_window", "must be increasing", &mut errors);
                }
                if self.experiment == QuenchThermal {
                    require(!g.temperatures.is_empty(), "grids.temperatures", "required", &mut errors);
                    require(
                        g.temperatures.iter().all(|&t| t > 0.0 && t.is_finite()),
                        "grids.temperatures",
                        "must be positive",
                        &mut errors,
                    );
                } else {
                    require(!o.quench_kinds.is_empty(), "options.quench_kinds", "required", &mut errors);
                    if let Some(site) = o.site {
                        require(
                            g.lengths.iter().all(|&l| site < l),
                            "options.site",
                            "must be a site of every chain (0-based)",
                            &mut errors,
                        );
                    }
                }
            }
            OracleValidate => {
                require(
                    g.lengths.iter().all(|&l| l <= MAX_SITES),
                    "grids.lengths",
                    "the dense oracle handles at most 12 sites",
                    &mut errors,
                );
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(format!(
                "invalid {} config: {}",
                self.experiment.name(),
                errors.join("; ")
            )))
        }
    }
}
