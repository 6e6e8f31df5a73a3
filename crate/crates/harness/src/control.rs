//! The randomized-secret control: run the same attack on the original
//! dataset and on a copy whose secret column is resampled uniformly,
//! destroying any attribute/secret correlation.

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::experiment::{materialize_dataset, run_experiment_on};
use crate::report::ExperimentReport;
use crate::HarnessError;

/// Paired reports plus the headline accuracy gaps.
#[derive(Debug, Serialize)]
pub struct ControlReport {
    pub original: ExperimentReport,
    pub randomized: ExperimentReport,
    pub acc_pvu_gap: Option<f64>,
    pub acc_all_gap: f64,
    /// Secret mean of the randomized copy; ~0.5 by construction.
    pub randomized_secret_mean: f64,
}

/// Runs the configured attack on the original and the secret-randomized
/// dataset under the same harness seed.
pub fn randomized_control(config: &ExperimentConfig) -> Result<ControlReport, HarnessError> {
    let mut original_cfg = config.clone();
    original_cfg.randomize_secret = false;
    let mut randomized_cfg = config.clone();
    randomized_cfg.randomize_secret = true;

    let original_data = materialize_dataset(&original_cfg)?;
    let randomized_data = materialize_dataset(&randomized_cfg)?;
    let secret_mean = (0..randomized_data.len())
        .map(|i| randomized_data.secret_value(i) as u64)
        .sum::<u64>() as f64
        / randomized_data.len() as f64;

    let original = run_experiment_on(&original_cfg, &original_data)?;
    let randomized = run_experiment_on(&randomized_cfg, &randomized_data)?;
    let acc_pvu_gap = match (original.aggregates.acc_pvu, randomized.aggregates.acc_pvu) {
        (Some(a), Some(b)) => Some((a - b).abs()),
        _ => None,
    };
    let acc_all_gap = (original.aggregates.acc_all - randomized.aggregates.acc_all).abs();
    Ok(ControlReport {
        original,
        randomized,
        acc_pvu_gap,
        acc_all_gap,
        randomized_secret_mean: secret_mean,
    })
}
