use serde::{Deserialize, Serialize};

use super::config::NoiseKind;
use crate::error::{Error, Result};
use crate::lstar::Termination;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainClass {
    Low,
    Medium,
    High,
}

impl GainClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GainClass::Low => "low",
            GainClass::Medium => "medium",
            GainClass::High => "high",
        }
    }
}

/// `d(A, M_N) / d(A, A_E)`.
///
/// A zero denominator gives `+∞` when the numerator is positive and `1`
/// when both are zero.
pub fn information_gain(d_a_mn: f64, d_a_ae: f64) -> f64 {
    if d_a_ae == 0.0 {
        if d_a_mn == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        d_a_mn / d_a_ae
    }
}

/// Low on `[0, 0.9)`, medium on `[0.9, 1.5)`, high on `[1.5, ∞]`.
pub fn classify_gain(gain: f64) -> Result<GainClass> {
    if gain.is_nan() || gain < 0.0 {
        return Err(Error::domain(format!(
            "gain must be nonnegative, got {gain}"
        )));
    }
    Ok(if gain < 0.9 {
        GainClass::Low
    } else if gain < 1.5 {
        GainClass::Medium
    } else {
        GainClass::High
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub dfa_id: usize,
    pub noise_kind: NoiseKind,
    /// Noise probability; `None` for the counter device.
    pub p: Option<f64>,
    pub d_a_mn: f64,
    pub d_a_ae: f64,
    pub d_mn_ae: f64,
    pub gain: f64,
    pub gain_class: GainClass,
    pub rounds: usize,
    pub terminated_by: Termination,
    pub eld: Option<bool>,
    pub wall_ms: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gain_examples() {
        assert_eq!(information_gain(0.001, 0.001), 1.0);
        assert_eq!(information_gain(0.5, 0.0), f64::INFINITY);
        assert_eq!(information_gain(0.0, 0.0), 1.0);
        assert_eq!(information_gain(0.0, 0.2), 0.0);
        // One record with the magnitudes of the p = 0.001 row: 0.001 / 0.00006.
        let g = information_gain(0.001, 0.00006);
        assert!((g - 16.6667).abs() < 1e-3);
        assert_eq!(classify_gain(g).unwrap(), GainClass::High);
    }

    #[test]
    fn class_boundaries() {
        assert_eq!(classify_gain(0.0).unwrap(), GainClass::Low);
        assert_eq!(classify_gain(0.89999).unwrap(), GainClass::Low);
        assert_eq!(classify_gain(0.9).unwrap(), GainClass::Medium);
        assert_eq!(classify_gain(1.49999).unwrap(), GainClass::Medium);
        assert_eq!(classify_gain(1.5).unwrap(), GainClass::High);
        assert_eq!(classify_gain(f64::INFINITY).unwrap(), GainClass::High);
        assert!(classify_gain(-0.1).is_err());
        assert!(classify_gain(f64::NAN).is_err());
    }
}
