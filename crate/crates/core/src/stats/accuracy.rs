//! Monte-Carlo accuracy of the likelihood ratio test, with and without
//! rounding, plus the noncentral chi-squared cross-check.

use crate::prng::{substream, Stream};
use crate::stats::lrt::{log_likelihood_ratio, GaussianHypothesisPair, SampleSet};
use crate::stats::StatsError;

/// A Monte-Carlo probability estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl MonteCarloEstimate {
    fn from_hits(hits: u64, trials: u64) -> MonteCarloEstimate {
        let p = hits as f64 / trials as f64;
        MonteCarloEstimate {
            value: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }
}

/// Accuracy of the test for `k` known attributes and `2k` independent
/// samples (`k` from each distribution), exact sampling process: no
/// rounding, no suppression. Balanced truth values; deterministic for a
/// fixed `seed`; trials may be distributed over substreams.
pub fn theoretical_accuracy(
    k: usize,
    mc_trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate, StatsError> {
    if k < 1 || mc_trials < 2 {
        return Err(StatsError::BadParameters {
            detail: format!("need k >= 1 and at least 2 trials, got k={k}, trials={mc_trials}"),
        });
    }
    let pair = GaussianHypothesisPair::for_known_attributes(k);
    let sd0 = pair.var0.sqrt();
    let sd1 = pair.var1.sqrt();
    let mut hits = 0u64;
    for trial in 0..mc_trials {
        let mut stream = Stream::new(substream(seed, trial));
        let secret_is_one = trial % 2 == 0;
        let mut samples = SampleSet::default();
        for _ in 0..k {
            let (q, r) = if secret_is_one {
                // dynamic layers cancel on the q side
                (
                    pair.mu0 + sd0 * stream.next_normal(),
                    pair.mu1 + sd1 * stream.next_normal(),
                )
            } else {
                (
                    pair.mu1 + sd1 * stream.next_normal(),
                    pair.mu0 + sd0 * stream.next_normal(),
                )
            };
            samples.q_samples.push(q);
            samples.r_samples.push(r);
        }
        let verdict = log_likelihood_ratio(&samples, k) >= 0.0;
        if verdict == secret_is_one {
            hits += 1;
        }
    }
    Ok(MonteCarloEstimate::from_hits(hits, mc_trials))
}

/// As [`theoretical_accuracy`], but every answer is rounded to the nearest
/// nonnegative integer before differencing.
///
/// Simulates the two answers of each pair with the correct shared-layer
/// structure (statics cancel in the difference; dynamics cancel only when
/// the secret matches), on a base count large enough that the nonnegative
/// clamp never binds — the no-suppression regime.
pub fn simulated_rounded_accuracy(
    k: usize,
    mc_trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate, StatsError> {
    if k < 1 || mc_trials < 2 {
        return Err(StatsError::BadParameters {
            detail: format!("need k >= 1 and at least 2 trials, got k={k}, trials={mc_trials}"),
        });
    }
    const BASE_COUNT: f64 = 1000.0;
    let round = |x: f64| x.round().max(0.0);
    let mut hits = 0u64;
    for trial in 0..mc_trials {
        let mut stream = Stream::new(substream(seed, trial));
        let secret_is_one = trial % 2 == 0;
        let mut samples = SampleSet::default();
        for side in 0..2u8 {
            // side 0 probes s = 0 (q samples), side 1 probes s = 1 (r samples)
            let counts_equal = (side == 0) == secret_is_one;
            for _ in 0..k {
                let (a, b) = if counts_equal {
                    // same query set: both answers share all 2k layers, the
                    // negated condition adds two more to the primed query
                    let shared: f64 = (0..2 * k).map(|_| stream.next_normal()).sum();
                    let extra = stream.next_normal() + stream.next_normal();
                    (BASE_COUNT + shared, BASE_COUNT + shared + extra)
                } else {
                    // sets differ: statics cancel, dynamics do not
                    let statics: f64 = (0..k).map(|_| stream.next_normal()).sum();
                    let dyn_q: f64 = (0..k).map(|_| stream.next_normal()).sum();
                    let dyn_qp: f64 = (0..k).map(|_| stream.next_normal()).sum();
                    let extra = stream.next_normal() + stream.next_normal();
                    (
                        BASE_COUNT + statics + dyn_q,
                        BASE_COUNT - 1.0 + statics + dyn_qp + extra,
                    )
                };
                let diff = round(a) - round(b);
                if side == 0 {
                    samples.q_samples.push(diff);
                } else {
                    samples.r_samples.push(diff);
                }
            }
        }
        let verdict = log_likelihood_ratio(&samples, k) >= 0.0;
        if verdict == secret_is_one {
            hits += 1;
        }
    }
    Ok(MonteCarloEstimate::from_hits(hits, mc_trials))
}

/// Cross-check of [`theoretical_accuracy`] through the noncentral
/// chi-squared route: the error probability equals
/// `Pr[α₀·Z₀ − α₁·Z₁ < 0]` with `Z_i` noncentral chi-squared with `k`
/// degrees of freedom and noncentrality `λ_i`.
pub fn theoretical_accuracy_chi2(
    k: usize,
    mc_trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate, StatsError> {
    if k < 1 || mc_trials < 2 {
        return Err(StatsError::BadParameters {
            detail: format!("need k >= 1 and at least 2 trials, got k={k}, trials={mc_trials}"),
        });
    }
    let pair = GaussianHypothesisPair::for_known_attributes(k);
    let (mu0, var0, mu1, var1) = (pair.mu0, pair.var0, pair.mu1, pair.var1);
    let n = k as f64;
    let shift = (mu0 * var1 - mu1 * var0) / (var0 - var1);
    let lambda = |mu: f64, var: f64| {
        let sd = var.sqrt();
        n * (mu / sd + shift / sd).powi(2)
    };
    let lambda0 = lambda(mu0, var0);
    let lambda1 = lambda(mu1, var1);
    let alpha0 = (var0 - var1) / (2.0 * var1);
    let alpha1 = (var0 - var1) / (2.0 * var0);

    let mut err_hits = 0u64;
    for trial in 0..mc_trials {
        let mut stream = Stream::new(substream(seed ^ 0x5CA1_AB1E, trial));
        let z0 = noncentral_chi2(&mut stream, k, lambda0);
        let z1 = noncentral_chi2(&mut stream, k, lambda1);
        if alpha0 * z0 - alpha1 * z1 < 0.0 {
            err_hits += 1;
        }
    }
    let err = MonteCarloEstimate::from_hits(err_hits, mc_trials);
    Ok(MonteCarloEstimate {
        value: 1.0 - err.value,
        std_error: err.std_error,
        trials: mc_trials,
    })
}

/// One draw from a noncentral chi-squared with `dof` degrees of freedom and
/// noncentrality `lambda`: sum of squared unit normals, one offset by √λ.
fn noncentral_chi2(stream: &mut Stream, dof: usize, lambda: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..dof {
        let mean = if i == 0 { lambda.sqrt() } else { 0.0 };
        let x = mean + stream.next_normal();
        total += x * x;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimates_are_deterministic() {
        let a = theoretical_accuracy(3, 2000, 77).unwrap();
        let b = theoretical_accuracy(3, 2000, 77).unwrap();
        assert_eq!(a.value, b.value);
        let a = simulated_rounded_accuracy(3, 2000, 77).unwrap();
        let b = simulated_rounded_accuracy(3, 2000, 77).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn accuracy_beats_random_at_k1() {
        let acc = theoretical_accuracy(1, 20_000, 5).unwrap();
        assert!(acc.value > 0.55, "k=1 accuracy {}", acc.value);
        let rounded = simulated_rounded_accuracy(1, 20_000, 5).unwrap();
        assert!(rounded.value > 0.5, "rounded k=1 accuracy {}", rounded.value);
    }

    #[test]
    fn accuracy_grows_with_k() {
        let a2 = theoretical_accuracy(2, 40_000, 11).unwrap();
        let a5 = theoretical_accuracy(5, 40_000, 11).unwrap();
        let a8 = theoretical_accuracy(8, 40_000, 11).unwrap();
        assert!(a5.value >= a2.value - 2.0 * (a2.std_error + a5.std_error));
        assert!(a8.value >= a5.value - 2.0 * (a5.std_error + a8.std_error));
    }

    #[test]
    fn chi2_route_agrees_with_direct_simulation() {
        for k in [1usize, 3, 5] {
            let direct = theoretical_accuracy(k, 60_000, 13).unwrap();
            let chi2 = theoretical_accuracy_chi2(k, 60_000, 13).unwrap();
            let tol = 4.0 * (direct.std_error + chi2.std_error);
            assert!(
                (direct.value - chi2.value).abs() < tol,
                "k={k}: direct {} vs chi2 {} (tol {tol})",
                direct.value,
                chi2.value
            );
        }
    }

    #[test]
    fn rounding_changes_little() {
        let plain = theoretical_accuracy(5, 30_000, 21).unwrap();
        let rounded = simulated_rounded_accuracy(5, 30_000, 21).unwrap();
        assert!(
            (plain.value - rounded.value).abs() < 0.03,
            "plain {} vs rounded {}",
            plain.value,
            rounded.value
        );
    }
}
