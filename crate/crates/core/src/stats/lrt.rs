//! Likelihood ratio test between two Gaussian hypotheses.

use serde::Serialize;

use crate::stats::StatsError;

/// The hypothesis pair discriminated by the differential attack for `k`
/// known attributes: answer differences are `N(0, 2)` when the secret
/// matches the probed value (all dynamic layers cancel) and `N(1, 2k+2)`
/// when it does not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianHypothesisPair {
    pub mu0: f64,
    pub var0: f64,
    pub mu1: f64,
    pub var1: f64,
}

impl GaussianHypothesisPair {
    /// `N(0,2)` vs `N(1, 2k+2)`; `k >= 1`.
    pub fn for_known_attributes(k: usize) -> GaussianHypothesisPair {
        assert!(k >= 1, "k must be at least 1");
        GaussianHypothesisPair {
            mu0: 0.0,
            var0: 2.0,
            mu1: 1.0,
            var1: 2.0 * k as f64 + 2.0,
        }
    }

    /// The pair for inequality-partition samples: `N(0,4)` vs `N(1, 2k+2)`.
    pub fn for_inequality_samples(k: usize) -> GaussianHypothesisPair {
        assert!(k >= 1, "k must be at least 1");
        GaussianHypothesisPair {
            mu0: 0.0,
            var0: 4.0,
            mu1: 1.0,
            var1: 2.0 * k as f64 + 2.0,
        }
    }

    /// `ln f(x) - ln g(x)` with `f = N(mu0, var0)`, `g = N(mu1, var1)`.
    pub fn log_density_ratio(&self, x: f64) -> f64 {
        log_normal_pdf(x, self.mu0, self.var0) - log_normal_pdf(x, self.mu1, self.var1)
    }
}

fn log_normal_pdf(x: f64, mu: f64, var: f64) -> f64 {
    let d = x - mu;
    -0.5 * (2.0 * std::f64::consts::PI * var).ln() - d * d / (2.0 * var)
}

/// Paired answer differences feeding the test: `q` samples from the `s = 0`
/// probes, `r` samples from the `s = 1` probes (distributions swapped).
#[derive(Debug, Clone, Default)]
pub struct SampleSet {
    pub q_samples: Vec<f64>,
    pub r_samples: Vec<f64>,
}

impl SampleSet {
    pub fn is_empty(&self) -> bool {
        self.q_samples.is_empty() && self.r_samples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.q_samples.len() + self.r_samples.len()
    }
}

/// One sample with its own hypothesis pair, for mixing plain and
/// inequality-partition samples in a single test. `inverted` marks samples
/// whose distributions are swapped (the `r` side).
#[derive(Debug, Clone, Copy)]
pub struct TaggedSample {
    pub value: f64,
    pub pair: GaussianHypothesisPair,
    pub inverted: bool,
}

/// Log likelihood ratio over heterogeneous samples.
pub fn log_likelihood_ratio_tagged(samples: &[TaggedSample]) -> f64 {
    samples
        .iter()
        .map(|s| {
            let lr = s.pair.log_density_ratio(s.value);
            if s.inverted {
                -lr
            } else {
                lr
            }
        })
        .sum()
}

/// `ln Λ` for the standard differential-attack sample set at `k` known
/// attributes.
pub fn log_likelihood_ratio(samples: &SampleSet, k: usize) -> f64 {
    let pair = GaussianHypothesisPair::for_known_attributes(k);
    let q = samples.q_samples.iter().map(|&v| pair.log_density_ratio(v));
    let r = samples.r_samples.iter().map(|&v| -pair.log_density_ratio(v));
    q.chain(r).sum()
}

/// The likelihood ratio test: `true` concludes the secret is 1.
///
/// Evaluated in log space; ties (`Λ = 1`) go to the positive hypothesis.
/// Errors with `NoSamples` when both sample lists are empty.
pub fn lrt(samples: &SampleSet, k: usize) -> Result<bool, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::NoSamples);
    }
    Ok(log_likelihood_ratio(samples, k) >= 0.0)
}

/// Unbiased sample variance. Errors below two values.
pub fn sample_variance(values: &[f64]) -> Result<f64, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewValues { got: values.len() });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    Ok(values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct density-ratio product, the independent oracle for the
    /// log-space implementation.
    fn lambda_direct(samples: &SampleSet, k: usize) -> f64 {
        let pdf = |x: f64, mu: f64, var: f64| {
            (-(x - mu) * (x - mu) / (2.0 * var)).exp()
                / (2.0 * std::f64::consts::PI * var).sqrt()
        };
        let k = k as f64;
        let f = |x: f64| pdf(x, 0.0, 2.0);
        let g = |x: f64| pdf(x, 1.0, 2.0 * k + 2.0);
        let mut lambda = 1.0;
        for &q in &samples.q_samples {
            lambda *= f(q) / g(q);
        }
        for &r in &samples.r_samples {
            lambda *= g(r) / f(r);
        }
        lambda
    }

    #[test]
    fn single_zero_sample_concludes_positive() {
        let s = SampleSet {
            q_samples: vec![0.0],
            r_samples: vec![],
        };
        let lambda = lambda_direct(&s, 1);
        assert!((lambda - 1.6025).abs() < 1e-3, "Λ = {lambda}");
        assert!(lrt(&s, 1).unwrap());
        assert!((log_likelihood_ratio(&s, 1) - lambda.ln()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_samples_tie_goes_positive() {
        let s = SampleSet {
            q_samples: vec![0.7],
            r_samples: vec![0.7],
        };
        assert_eq!(log_likelihood_ratio(&s, 3), 0.0);
        assert!(lrt(&s, 3).unwrap());
    }

    #[test]
    fn clear_negative_case() {
        let s = SampleSet {
            q_samples: vec![1.0, 1.0, 1.0],
            r_samples: vec![0.0, 0.0, 0.0],
        };
        let log_lambda = log_likelihood_ratio(&s, 2);
        assert!((log_lambda - lambda_direct(&s, 2).ln()).abs() < 1e-12);
        assert!(log_lambda < 0.0, "log Λ = {log_lambda}");
        assert!(!lrt(&s, 2).unwrap());
    }

    #[test]
    fn no_samples_is_an_error() {
        assert!(matches!(
            lrt(&SampleSet::default(), 4),
            Err(StatsError::NoSamples)
        ));
    }

    #[test]
    fn swapping_lists_negates_the_statistic() {
        let s = SampleSet {
            q_samples: vec![0.3, -1.2, 4.0],
            r_samples: vec![2.5, 0.1],
        };
        let swapped = SampleSet {
            q_samples: s.r_samples.clone(),
            r_samples: s.q_samples.clone(),
        };
        let a = log_likelihood_ratio(&s, 5);
        let b = log_likelihood_ratio(&swapped, 5);
        assert!((a + b).abs() < 1e-12);
    }

    #[test]
    fn log_space_stays_finite_at_scale() {
        let s = SampleSet {
            q_samples: (0..10_000).map(|i| (i % 2001) as f64 - 1000.0).collect(),
            r_samples: (0..10_000).map(|i| 1000.0 - (i % 2001) as f64).collect(),
        };
        assert!(log_likelihood_ratio(&s, 3).is_finite());
    }

    #[test]
    fn sample_variance_basics() {
        assert_eq!(sample_variance(&[3.0, 3.0, 3.0, 3.0]).unwrap(), 0.0);
        let v = sample_variance(&[0.0, 5.0, 2.0, 9.0]).unwrap();
        assert!((v - 46.0 / 3.0).abs() < 1e-12);
        assert_eq!(sample_variance(&[7.0, 8.0]).unwrap(), 0.5);
        assert!(sample_variance(&[1.0]).is_err());
    }

    #[test]
    fn sample_variance_shift_invariant() {
        let xs = [0.4, 1.7, -2.2, 3.3, 0.0];
        let shifted: Vec<f64> = xs.iter().map(|x| x + 123.25).collect();
        let a = sample_variance(&xs).unwrap();
        let b = sample_variance(&shifted).unwrap();
        assert!((a - b).abs() < 1e-9);
    }
}
