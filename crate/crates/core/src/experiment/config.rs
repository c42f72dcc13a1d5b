use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    NoisyOutput,
    NoisyInput,
    Counter,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::NoisyOutput => "noisy-output",
            NoiseKind::NoisyInput => "noisy-input",
            NoiseKind::Counter => "counter",
        }
    }

    /// Noise levels swept by default for each kind; empty for the counter.
    pub fn default_p_values(self) -> Vec<f64> {
        match self {
            NoiseKind::NoisyOutput => vec![0.01, 0.005, 0.0025, 0.0015, 0.001],
            NoiseKind::NoisyInput => vec![1e-4, 5e-4, 1e-3, 5e-3],
            NoiseKind::Counter => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// Full-scale settings: 15.2M-word distance estimates, 250 rounds, 50 DFAs.
    Paper,
    /// Laptop-scale: ~10^5-word distances, 100 rounds, 5 DFAs.
    Desk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub noise_kind: NoiseKind,
    pub p_values: Vec<f64>,
    pub num_dfas: usize,
    pub mu: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub maxround: usize,
    pub master_seed: u64,
    pub trajectory: bool,
    pub eld_partition: bool,
    pub max_states: usize,
    pub max_alphabet: usize,
    /// Writes measured wall time into records; off gives byte-stable output.
    #[serde(default = "default_true")]
    pub record_timing: bool,
    /// Permits p = 0 for degenerate-noise checks.
    #[serde(default)]
    pub allow_zero_noise: bool,
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn new(noise_kind: NoiseKind, profile: Profile) -> Self {
        let base = ExperimentConfig {
            noise_kind,
            p_values: noise_kind.default_p_values(),
            num_dfas: 50,
            mu: 1e-2,
            alpha: 5e-4,
            gamma: 1e-3,
            epsilon: 0.005,
            delta: 0.005,
            maxround: 250,
            master_seed: 0,
            trajectory: false,
            eld_partition: false,
            max_states: 50,
            max_alphabet: 20,
            record_timing: true,
            allow_zero_noise: false,
        };
        match profile {
            Profile::Paper => base,
            Profile::Desk => ExperimentConfig {
                alpha: 5e-3,
                gamma: 1e-2,
                num_dfas: 5,
                maxround: 100,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be in (0, 1), got {v}")))
            }
        };
        open_unit("mu", self.mu)?;
        open_unit("epsilon", self.epsilon)?;
        open_unit("delta", self.delta)?;
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::config(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::config(format!(
                "gamma must be in (0, 1), got {}",
                self.gamma
            )));
        }
        if self.num_dfas == 0 {
            return Err(Error::config("num_dfas must be positive"));
        }
        if self.max_states < 10 || self.max_alphabet < 3 {
            return Err(Error::config(
                "max_states must be >= 10 and max_alphabet >= 3",
            ));
        }
        match self.noise_kind {
            NoiseKind::Counter => {}
            _ => {
                if self.p_values.is_empty() {
                    return Err(Error::config("at least one noise probability is required"));
                }
                for &p in &self.p_values {
                    let ok = if self.allow_zero_noise {
                        (0.0..1.0).contains(&p)
                    } else {
                        p > 0.0 && p < 1.0
                    };
                    if !ok {
                        return Err(Error::config(format!("noise probability {p} out of range")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Noise levels actually run: one `None` entry for the counter device.
    pub fn noise_levels(&self) -> Vec<Option<f64>> {
        match self.noise_kind {
            NoiseKind::Counter => vec![None],
            _ => self.p_values.iter().map(|&p| Some(p)).collect(),
        }
    }
}
