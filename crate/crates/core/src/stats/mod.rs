//! Statistical machinery behind the attacks: the Gaussian likelihood ratio
//! test, Monte-Carlo accuracy curves, and the sample-variance classifier
//! with its σ* calibration.
//!
//! The exact error probability of the test is a tail of a linear combination
//! of noncentral chi-squared variables with no closed form; everything here
//! is Monte-Carlo with reported standard errors, deterministic for a fixed
//! seed (counter-based substream per trial, safe to parallelize).

mod accuracy;
mod calibrate;
mod lrt;

pub use accuracy::{
    simulated_rounded_accuracy, theoretical_accuracy, theoretical_accuracy_chi2,
    MonteCarloEstimate,
};
pub use calibrate::{calibrate_sigma_star, default_threshold_grid, CalibrationRow};
pub use lrt::{
    log_likelihood_ratio, log_likelihood_ratio_tagged, lrt, sample_variance,
    GaussianHypothesisPair, SampleSet, TaggedSample,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no samples survived the positivity filter")]
    NoSamples,
    #[error("sample variance needs at least 2 values, got {got}")]
    TooFewValues { got: usize },
    #[error("bad parameters: {detail}")]
    BadParameters { detail: String },
}
