//! TOML scenario files.
//!
//! ```toml
//! estimators = ["map", "esprit"]
//!
//! [model]
//! d = 3
//! m = 32            # with an SNR sweep; use `snr_db` with a samples sweep
//!
//! [[priors]]
//! mu_over_pi = 0.45
//! kappa = 2000.0
//!
//! [[priors]]
//! mu_over_pi = 0.60
//! kappa = 200.0
//!
//! [[priors]]
//! fixed_over_pi = 0.75
//!
//! [signal]
//! alpha = [1.0, 1.0, 1.0]
//! phase = "uniform" # or a list of fixed phases in radians
//!
//! [sweep]
//! type = "snr"      # or "samples"
//! values = [-10, 0, 10, 20]
//!
//! [mc]
//! trials = 500
//! seed = 1
//!
//! [solver]
//! g = 500
//! L = 10
//! max_sweeps = 50
//! ```
//!
//! Frequencies are given as multiples of pi. Unknown keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::{Estimator, FrequencySpec, Scenario};
use crate::circular::VonMisesPrior;
use crate::error::{Error, Result};
use crate::map::SolverConfig;
use crate::signal::PhaseLaw;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub model: ModelSection,
    pub priors: Vec<PriorEntry>,
    #[serde(default)]
    pub signal: Option<SignalSection>,
    pub sweep: SweepSection,
    pub mc: McSection,
    #[serde(default)]
    pub solver: Option<SolverSection>,
    #[serde(default)]
    pub estimators: Option<Vec<Estimator>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub d: usize,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub snr_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorEntry {
    #[serde(default)]
    pub mu_over_pi: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub fixed_over_pi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseSpec {
    Named(String),
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    #[serde(default)]
    pub phase: Option<PhaseSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepType {
    Snr,
    Samples,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(rename = "type")]
    pub kind: SweepType,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default)]
    pub g: Option<usize>,
    #[serde(default, rename = "L")]
    pub levels: Option<usize>,
    #[serde(default)]
    pub max_sweeps: Option<usize>,
}

impl PriorEntry {
    fn to_spec(&self, index: usize) -> Result<FrequencySpec> {
        let field = |name: &str| format!("priors[{index}].{name}");
        let finite = |v: f64, name: &str| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::config(field(name), "must be finite"))
            }
        };
        let prior = |mu: f64, kappa: f64| {
            if !(kappa >= 0.0 && kappa.is_finite()) {
                return Err(Error::config(field("kappa"), "must be finite and >= 0"));
            }
            VonMisesPrior::new(mu * PI, kappa).map_err(|e| Error::config(field("mu_over_pi"), e.to_string()))
        };
        match (self.fixed_over_pi, self.mu_over_pi, self.kappa) {
            (Some(fixed), mu, kappa) => Ok(FrequencySpec::Fixed {
                omega: crate::circular::wrap_angle(finite(fixed, "fixed_over_pi")? * PI),
                prior: prior(finite(mu.unwrap_or(0.0), "mu_over_pi")?, kappa.unwrap_or(0.0))?,
            }),
            (None, Some(mu), Some(kappa)) => Ok(FrequencySpec::Random {
                prior: prior(finite(mu, "mu_over_pi")?, kappa)?,
            }),
            (None, None, _) => Err(Error::config(
                field("mu_over_pi"),
                "required unless `fixed_over_pi` is given",
            )),
            (None, Some(_), None) => Err(Error::config(
                field("kappa"),
                "required unless `fixed_over_pi` is given",
            )),
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("scenario", e.message().to_string()))
    }

    pub fn into_scenario(self) -> Result<Scenario> {
        let d = self.model.d;
        if d == 0 {
            return Err(Error::config("model.d", "must be at least 1"));
        }
        if self.priors.len() != d {
            return Err(Error::config(
                "priors",
                format!("model.d = {d} but {} priors are listed", self.priors.len()),
            ));
        }
        let frequencies = self
            .priors
            .iter()
            .enumerate()
            .map(|(i, p)| p.to_spec(i))
            .collect::<Result<Vec<_>>>()?;

        if self.sweep.values.is_empty() {
            return Err(Error::config("sweep.values", "must not be empty"));
        }
        let (m_values, snr_db_values) = match self.sweep.kind {
            SweepType::Snr => {
                let m = self
                    .model
                    .m
                    .ok_or_else(|| Error::config("model.m", "required for an SNR sweep"))?;
                if self.model.snr_db.is_some() {
                    return Err(Error::config("model.snr_db", "not allowed with an SNR sweep"));
                }
                if self.sweep.values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
                    return Err(Error::config("sweep.values", "SNR values must be numbers"));
                }
                (vec![m], self.sweep.values.clone())
            }
            SweepType::Samples => {
                let snr = self
                    .model
                    .snr_db
                    .ok_or_else(|| Error::config("model.snr_db", "required for a samples sweep"))?;
                if self.model.m.is_some() {
                    return Err(Error::config("model.m", "not allowed with a samples sweep"));
                }
                let ms = self
                    .sweep
                    .values
                    .iter()
                    .map(|&v| {
                        if v.fract() == 0.0 && (1.0..1e9).contains(&v) {
                            Ok(v as usize)
                        } else {
                            Err(Error::config("sweep.values", format!("{v} is not a sample count")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                (ms, vec![snr])
            }
        };

        let signal = self.signal.unwrap_or(SignalSection {
            alpha: None,
            phase: None,
        });
        let amplitudes = signal.alpha.unwrap_or_else(|| vec![1.0; d]);
        let phases = match signal.phase {
            None => PhaseLaw::Uniform,
            Some(PhaseSpec::Named(n)) if n == "uniform" => PhaseLaw::Uniform,
            Some(PhaseSpec::Named(n)) => {
                return Err(Error::config(
                    "signal.phase",
                    format!("expected \"uniform\" or a list of phases, got \"{n}\""),
                ))
            }
            Some(PhaseSpec::Fixed(p)) => PhaseLaw::Fixed(p),
        };

        let defaults = SolverConfig::default();
        let solver = match self.solver {
            None => defaults,
            Some(s) => SolverConfig {
                grid_points: s.g.unwrap_or(defaults.grid_points),
                levels: s.levels.unwrap_or(defaults.levels),
                max_sweeps_per_level: s.max_sweeps.unwrap_or(defaults.max_sweeps_per_level),
                ..defaults
            },
        };

        let estimators = self
            .estimators
            .unwrap_or_else(|| vec![Estimator::Map, Estimator::Esprit]);
        let mut unique = estimators.clone();
        unique.dedup();
        if unique.len() != estimators.len() || estimators.len() > 2 {
            return Err(Error::config("estimators", "each estimator may be listed once"));
        }

        let scenario = Scenario {
            frequencies,
            m_values,
            snr_db_values,
            amplitudes,
            phases,
            trials: self.mc.trials,
            seed: self.mc.seed,
            estimators,
            solver,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    ScenarioFile::parse(text)?.into_scenario()
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("scenario", format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// The three-tone SNR sweep at `m = 32`, in scenario-file form.
pub const THREE_TONE_SNR_SWEEP: &str = r#"estimators = ["map", "esprit"]

[model]
d = 3
m = 32

[[priors]]
mu_over_pi = 0.45
kappa = 2000.0

[[priors]]
mu_over_pi = 0.60
kappa = 200.0

[[priors]]
fixed_over_pi = 0.75

[signal]
alpha = [1.0, 1.0, 1.0]
phase = "uniform"

[sweep]
type = "snr"
values = [-10, -5, 0, 5, 10, 15, 20]

[mc]
trials = 500
seed = 1

[solver]
g = 500
L = 10
max_sweeps = 50
"#;
