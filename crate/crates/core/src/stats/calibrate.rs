//! Empirical calibration of the variance cutoff σ* for the cloning attack.

use crate::prng::{substream, Stream};
use crate::stats::lrt::sample_variance;
use crate::stats::StatsError;

/// One row of the calibration table.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CalibrationRow {
    pub sigma_star: f64,
    pub true_positive_rate: f64,
    pub true_negative_rate: f64,
}

/// Default cutoff grid: 0.05 steps covering (0, 2].
pub fn default_threshold_grid() -> Vec<f64> {
    (1..=40).map(|i| i as f64 * 0.05).collect()
}

/// Simulates cloning-attack sample variances and sweeps the cutoff σ*.
///
/// For each truth value, `mc_trials` trials simulate the `|Δ|` rounded
/// answer pairs of the amplified attack at per-condition granularity:
/// `k` shared conditions (the pinned equalities plus the secret condition),
/// `|Δ| − 1` dummy conditions per query, and the distinguishing condition on
/// the primed side. True counts are `true_count` and, on the differing side,
/// `true_count − 1`. The returned table reports, per cutoff, the true
/// positive rate (secret matches, `S² <= σ*`) and true negative rate.
pub fn calibrate_sigma_star(
    delta_count: usize,
    k: usize,
    true_count: u64,
    mc_trials: u64,
    seed: u64,
    thresholds: &[f64],
) -> Result<Vec<CalibrationRow>, StatsError> {
    if delta_count < 2 {
        return Err(StatsError::BadParameters {
            detail: format!("calibration needs at least 2 dummy conditions, got {delta_count}"),
        });
    }
    if k < 1 || mc_trials < 2 || thresholds.is_empty() {
        return Err(StatsError::BadParameters {
            detail: "need k >= 1, trials >= 2 and a nonempty threshold grid".into(),
        });
    }

    // only runs the attack would actually classify count: a run whose
    // answers are all zero on either side fails the no-bucket-suppression
    // validation and never reaches the variance test
    let mut positive_variances = Vec::with_capacity(mc_trials as usize);
    let mut negative_variances = Vec::with_capacity(mc_trials as usize);
    for trial in 0..mc_trials {
        let mut stream = Stream::new(substream(seed, trial));
        if let Some(v) = simulate_variance(&mut stream, delta_count, k, true_count, true) {
            positive_variances.push(v);
        }
        if let Some(v) = simulate_variance(&mut stream, delta_count, k, true_count, false) {
            negative_variances.push(v);
        }
    }
    if positive_variances.is_empty() || negative_variances.is_empty() {
        return Err(StatsError::BadParameters {
            detail: "every simulated run failed the suppression validation".into(),
        });
    }

    Ok(thresholds
        .iter()
        .map(|&sigma_star| {
            let tp = positive_variances.iter().filter(|&&v| v <= sigma_star).count();
            let tn = negative_variances.iter().filter(|&&v| v > sigma_star).count();
            CalibrationRow {
                sigma_star,
                true_positive_rate: tp as f64 / positive_variances.len() as f64,
                true_negative_rate: tn as f64 / negative_variances.len() as f64,
            }
        })
        .collect())
}

/// Sample variance of the `|Δ|` rounded answer differences of one simulated
/// attack run, or `None` when the run would fail the no-bucket-suppression
/// validation (every answer zero on one side).
fn simulate_variance(
    stream: &mut Stream,
    delta_count: usize,
    k: usize,
    true_count: u64,
    secret_matches: bool,
) -> Option<f64> {
    let round = |x: f64| x.round().max(0.0);
    let n = true_count as f64;

    // statics are shared across every query of the run
    let dummy_static: Vec<f64> = (0..delta_count).map(|_| stream.next_normal()).collect();
    let shared_static: f64 = (0..k).map(|_| stream.next_normal()).sum();
    let u_static = stream.next_normal();

    // dynamics per query set: all Q_j share one set; all Q'_j share one set,
    // which is the same set when the secret matches
    let dummy_dyn_q: Vec<f64> = (0..delta_count).map(|_| stream.next_normal()).collect();
    let shared_dyn_q: f64 = (0..k).map(|_| stream.next_normal()).sum();
    let (dummy_dyn_qp, shared_dyn_qp) = if secret_matches {
        (dummy_dyn_q.clone(), shared_dyn_q)
    } else {
        (
            (0..delta_count).map(|_| stream.next_normal()).collect(),
            (0..k).map(|_| stream.next_normal()).sum(),
        )
    };
    let u_dyn = stream.next_normal();

    let mut any_plain = false;
    let mut any_negated = false;
    let diffs: Vec<f64> = (0..delta_count)
        .map(|j| {
            let dummies_q: f64 = (0..delta_count)
                .filter(|&l| l != j)
                .map(|l| dummy_static[l] + dummy_dyn_q[l])
                .sum();
            let dummies_qp: f64 = (0..delta_count)
                .filter(|&l| l != j)
                .map(|l| dummy_static[l] + dummy_dyn_qp[l])
                .sum();
            let q = round(n + dummies_q + shared_static + shared_dyn_q);
            let qp_count = if secret_matches { n } else { n - 1.0 };
            let qp =
                round(qp_count + dummies_qp + shared_static + shared_dyn_qp + u_static + u_dyn);
            any_plain |= q > 0.0;
            any_negated |= qp > 0.0;
            q - qp
        })
        .collect();
    (any_plain && any_negated).then(|| sample_variance(&diffs).expect("delta_count >= 2"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_cutoff_says_always_equal() {
        let rows =
            calibrate_sigma_star(10, 2, 10, 400, 3, &[1e9]).unwrap();
        assert_eq!(rows[0].true_positive_rate, 1.0);
        assert_eq!(rows[0].true_negative_rate, 0.0);
    }

    #[test]
    fn calibration_is_deterministic() {
        let a = calibrate_sigma_star(10, 2, 10, 300, 9, &[0.7]).unwrap();
        let b = calibrate_sigma_star(10, 2, 10, 300, 9, &[0.7]).unwrap();
        assert_eq!(a[0].true_positive_rate, b[0].true_positive_rate);
        assert_eq!(a[0].true_negative_rate, b[0].true_negative_rate);
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(calibrate_sigma_star(1, 2, 10, 100, 0, &[0.7]).is_err());
        assert!(calibrate_sigma_star(10, 0, 10, 100, 0, &[0.7]).is_err());
    }
}
