//! Ground-truth uniqueness analytics: per-k uniqueness and value-uniqueness
//! rates and the value-unique class-size histogram.

use std::collections::BTreeMap;

use serde::Serialize;
use stickyq_core::engine::hash64;
use stickyq_core::prng::{substream, Stream};
use stickyq_core::tabular::{
    is_unique, is_value_unique, value_unique_class_size, Dataset,
};

use crate::HarnessError;

/// One `k` row of the uniqueness report.
#[derive(Debug, Clone, Serialize)]
pub struct UniquenessRow {
    pub k: usize,
    pub sampled_users: usize,
    pub unique_fraction: f64,
    pub value_unique_fraction: f64,
    pub mean_class_size: f64,
    pub max_class_size: usize,
    /// class size -> number of sampled value-unique users in one
    pub class_size_histogram: BTreeMap<usize, usize>,
}

/// Samples `samples` users (and one random size-`k` attribute subset each)
/// per `k` value and measures uniqueness, value-uniqueness, and the
/// value-unique class sizes.
pub fn uniqueness_report(
    dataset: &Dataset,
    k_values: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<UniquenessRow>, HarnessError> {
    let non_secret = dataset.non_secret_attributes();
    let samples = samples.min(dataset.len());
    if samples == 0 {
        return Err(HarnessError::Config {
            detail: "uniqueness report needs at least one sampled user".into(),
        });
    }
    let mut rows = Vec::with_capacity(k_values.len());
    for &k in k_values {
        if k == 0 || k > non_secret.len() {
            return Err(HarnessError::Config {
                detail: format!(
                    "k = {k} out of range (1..={} non-secret attributes)",
                    non_secret.len()
                ),
            });
        }
        let mut sampler = Stream::new(substream(seed, k as u64));
        let users = sampler.sample_indices(dataset.len(), samples);
        let mut unique = 0usize;
        let mut value_unique = 0usize;
        let mut class_sizes: Vec<usize> = Vec::new();
        for row in users {
            let record = dataset.record(row);
            let mut chooser =
                Stream::new(substream(seed ^ k as u64, hash64(record.uid())));
            let attrs: Vec<String> = chooser
                .sample_indices(non_secret.len(), k)
                .into_iter()
                .map(|i| non_secret[i].clone())
                .collect();
            if is_unique(dataset, record, &attrs)? {
                unique += 1;
            }
            if is_value_unique(dataset, record, &attrs)? {
                value_unique += 1;
                class_sizes.push(value_unique_class_size(dataset, record, &attrs)?);
            }
        }
        let mut histogram = BTreeMap::new();
        for &size in &class_sizes {
            *histogram.entry(size).or_insert(0usize) += 1;
        }
        rows.push(UniquenessRow {
            k,
            sampled_users: samples,
            unique_fraction: unique as f64 / samples as f64,
            value_unique_fraction: value_unique as f64 / samples as f64,
            mean_class_size: if class_sizes.is_empty() {
                0.0
            } else {
                class_sizes.iter().sum::<usize>() as f64 / class_sizes.len() as f64
            },
            max_class_size: class_sizes.iter().copied().max().unwrap_or(0),
            class_size_histogram: histogram,
        });
    }
    Ok(rows)
}

/// The report as a plot-ready CSV; the histogram column is
/// `size:count` pairs joined with `;`.
pub fn uniqueness_csv(rows: &[UniquenessRow]) -> String {
    let mut out = String::from(
        "k,sampled_users,unique_fraction,value_unique_fraction,mean_class_size,max_class_size,\
         class_size_histogram\n",
    );
    for r in rows {
        let histogram = r
            .class_size_histogram
            .iter()
            .map(|(size, count)| format!("{size}:{count}"))
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            r.sampled_users,
            r.unique_fraction,
            r.value_unique_fraction,
            r.mean_class_size,
            r.max_class_size,
            histogram
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use stickyq_core::tabular::generate_complete_k;

    #[test]
    fn complete_k_is_fully_unique_at_full_width() {
        let d = generate_complete_k(4, 3, 2).unwrap();
        let rows = uniqueness_report(&d, &[3], 40, 7).unwrap();
        assert_eq!(rows[0].unique_fraction, 1.0);
        assert_eq!(rows[0].value_unique_fraction, 1.0);
        assert_eq!(rows[0].max_class_size, 1);
    }

    #[test]
    fn unique_implies_value_unique_in_rates() {
        let d = generate_complete_k(3, 3, 5).unwrap();
        for row in uniqueness_report(&d, &[1, 2, 3], 30, 11).unwrap() {
            assert!(row.value_unique_fraction >= row.unique_fraction);
        }
    }

    #[test]
    fn rejects_out_of_range_k() {
        let d = generate_complete_k(3, 2, 1).unwrap();
        assert!(uniqueness_report(&d, &[9], 10, 0).is_err());
        assert!(uniqueness_report(&d, &[0], 10, 0).is_err());
    }
}
