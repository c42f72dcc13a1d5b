//! PAC L* learning of regular languages behind noisy membership devices.
//!
//! The crate is organised around one membership contract, [`LanguageOracle`],
//! implemented by exact [`Dfa`]s and by the three noisy devices in
//! [`oracle`]. The [`lstar`] learner and the [`distribution`] distance
//! estimator only ever see that trait. [`structure`] holds the bottom-SCC
//! analysis and the equal-length-distinguishing check, and [`experiment`]
//! wires everything into the generate / perturb / learn / measure pipeline.

pub mod automaton;
pub mod distribution;
pub mod error;
pub mod experiment;
pub mod lstar;
pub mod oracle;
pub mod seed;
pub mod structure;

pub use automaton::{Alphabet, Dfa, Letter, Word};
pub use distribution::{estimate_distance, required_sample_size, DistanceEstimate, MuDistribution};
pub use error::{Error, Result};
pub use lstar::{LearnResult, LearnerConfig, Termination};
pub use oracle::{
    CounterDfaOracle, CounterFunction, LanguageOracle, NoisyInputOracle, NoisyOutputOracle,
};
pub use seed::{RandomLanguageKey, RngKey};
