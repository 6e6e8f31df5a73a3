//! Experiment orchestration: dataset materialization, user sampling,
//! parallel attack execution, ground-truth joining, aggregation.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use stickyq_core::attacks::{
    strategy_by_name, AttackParams, BackgroundKnowledge, UniqueOracle, ValueDomains,
};
use stickyq_core::engine::{EngineAnswerer, EngineConfig, Rounding};
use stickyq_core::query::{Condition, Query};
use stickyq_core::engine::hash64;
use stickyq_core::prng::{substream, Stream};
use stickyq_core::tabular::{
    self, generate_census_like, generate_complete_k, generate_sparse_binary, is_value_unique,
    load_csv, Dataset, Value,
};

use crate::config::{DatasetSource, ExperimentConfig};
use crate::report::{ExperimentReport, UserRow};
use crate::runner::attack_one;
use crate::HarnessError;

/// Materializes the configured dataset (generator or CSV), applying the
/// randomized-secret control resample when requested.
pub fn materialize_dataset(config: &ExperimentConfig) -> Result<Dataset, HarnessError> {
    let dataset = match &config.dataset {
        DatasetSource::Csv {
            path,
            uid_column,
            secret_column,
        } => load_csv(path, uid_column, secret_column)?,
        DatasetSource::CompleteK { b, k } => generate_complete_k(*b, *k, config.dataset_seed)?,
        DatasetSource::Census { records } => {
            generate_census_like(*records, config.dataset_seed)?
        }
        DatasetSource::SparseBinary {
            records,
            attrs,
            positive_rate,
        } => generate_sparse_binary(*records, *attrs, *positive_rate, config.dataset_seed)?,
    };
    Ok(if config.randomize_secret {
        dataset.randomize_secret(substream(config.dataset_seed, 0x5EC2E7))
    } else {
        dataset
    })
}

/// The ground-truth uniqueness oracle handed to the differential attack:
/// true iff exactly one record matches the restricted values. Indexed, so
/// subset exploration stays cheap on wide tables.
pub struct DatasetOracle<'a> {
    index: stickyq_core::query::DatasetIndex<'a>,
}

impl<'a> DatasetOracle<'a> {
    pub fn new(dataset: &'a Dataset) -> Self {
        DatasetOracle {
            index: stickyq_core::query::DatasetIndex::build(dataset),
        }
    }
}

impl UniqueOracle for DatasetOracle<'_> {
    fn is_unique(&self, attrs: &[String], values: &[Value]) -> bool {
        let conditions: Vec<Condition> = attrs
            .iter()
            .zip(values)
            .map(|(a, v)| Condition::eq(a, v.clone()))
            .collect();
        let Ok(query) = Query::new(conditions) else {
            return false;
        };
        match self.index.evaluate(&query) {
            Ok((n, _)) => n == 1,
            Err(_) => false,
        }
    }
}

fn engine_config(config: &ExperimentConfig) -> EngineConfig {
    let mut engine = EngineConfig::new(config.salt);
    engine.rounding = if config.rounding {
        Rounding::NearestNonnegative
    } else {
        Rounding::None
    };
    engine.suppression = config.suppression;
    engine.hard_floor = config.hard_floor;
    engine
}

/// Runs one configured experiment. Deterministic for a fixed config: user
/// sampling, per-user attribute subsets, attack exploration, and coin flips
/// all derive from the config seed, and worker scheduling cannot reorder
/// results.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let dataset = materialize_dataset(config)?;
    run_experiment_on(config, &dataset)
}

/// As [`run_experiment`] with the dataset already materialized (the
/// randomized-secret control reuses this to attack a resampled copy).
pub fn run_experiment_on(
    config: &ExperimentConfig,
    dataset: &Dataset,
) -> Result<ExperimentReport, HarnessError> {
    let strategy = strategy_by_name(&config.attack).ok_or_else(|| HarnessError::Config {
        detail: format!("unknown attack {:?}", config.attack),
    })?;
    let non_secret = dataset.non_secret_attributes();
    if config.known_attributes > non_secret.len() {
        return Err(HarnessError::Config {
            detail: format!(
                "known_attributes = {} exceeds the {} non-secret attributes",
                config.known_attributes,
                non_secret.len()
            ),
        });
    }
    if config.users > dataset.len() {
        return Err(HarnessError::Config {
            detail: format!(
                "users = {} exceeds the dataset's {} records",
                config.users,
                dataset.len()
            ),
        });
    }

    // sample users without replacement
    let mut sampler = Stream::new(substream(config.seed, 0xA55));
    let user_rows = sampler.sample_indices(dataset.len(), config.users);

    let domains = ValueDomains::new(dataset.value_domains());
    let engine = EngineAnswerer::new(dataset, engine_config(config));
    let oracle = DatasetOracle::new(dataset);

    struct Attacked {
        row: usize,
        known_idx: Vec<usize>,
        outcome: stickyq_core::attacks::AttackOutcome,
    }

    let attack_user = |row: usize| -> Result<Attacked, HarnessError> {
        let uid_hash = hash64(dataset.uid(row));
        // per-user attribute subset A*
        let mut chooser = Stream::new(substream(config.seed ^ 0xA77, uid_hash));
        let known_idx = chooser.sample_indices(non_secret.len(), config.known_attributes);
        let attrs: Vec<String> = known_idx.iter().map(|&i| non_secret[i].clone()).collect();
        let record = dataset.record(row);
        let values: Vec<Value> = attrs
            .iter()
            .map(|a| record.value(a).expect("known attribute exists").clone())
            .collect();
        let knowledge = BackgroundKnowledge::new(attrs, values, dataset.secret_attribute())?;
        let params = AttackParams {
            delta_count: config.delta,
            sigma_star: config.sigma_star,
            target_value: config.target_value,
            level_tries: config.level_tries,
            seed: substream(config.seed, uid_hash),
            augment_inequality: false,
        };
        let outcome = attack_one(
            strategy,
            &engine,
            &domains,
            Some(&oracle),
            &knowledge,
            &params,
        )?;
        Ok(Attacked {
            row,
            known_idx,
            outcome,
        })
    };

    // bounded worker pool with deterministic result placement
    let workers = if config.workers == 0 {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    } else {
        config.workers
    };
    let workers = workers.min(user_rows.len()).max(1);
    let slots: Vec<OnceLock<Result<Attacked, HarnessError>>> =
        user_rows.iter().map(|_| OnceLock::new()).collect();
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                let Some(&row) = user_rows.get(i) else { break };
                let _ = slots[i].set(attack_user(row));
            });
        }
    });

    // join ground truth onto the recorded verdicts
    let mut rows = Vec::with_capacity(user_rows.len());
    for slot in slots {
        let attacked = slot.into_inner().expect("worker filled every slot")?;
        let record = dataset.record(attacked.row);
        let attrs: Vec<String> = attacked
            .known_idx
            .iter()
            .map(|&i| non_secret[i].clone())
            .collect();
        let uid_hash = hash64(record.uid());
        let coin = (Stream::new(substream(config.seed ^ 0xC0117, uid_hash)).next_u64() & 1) as u8;
        rows.push(UserRow {
            uid: record.uid().to_string(),
            truth: dataset.secret_value(attacked.row),
            verdict: attacked.outcome.verdict,
            queries_issued: attacked.outcome.queries_issued,
            value_unique: is_value_unique(dataset, record, &attrs)?,
            predicted_attackable: attacked.outcome.verdict.is_inference(),
            coin,
            known_attrs: attrs,
        });
    }
    Ok(ExperimentReport::new(config.canonical(), rows))
}

/// One report per `k` value, plus a tidy (k, metric, value) CSV.
pub fn sweep_k(
    config: &ExperimentConfig,
    k_values: &[usize],
) -> Result<(Vec<ExperimentReport>, String), HarnessError> {
    let mut reports = Vec::with_capacity(k_values.len());
    let mut csv = String::from("k,metric,value\n");
    for &k in k_values {
        let mut cfg = config.clone();
        cfg.known_attributes = k;
        let report = run_experiment(&cfg)?;
        for metric in [
            "value_unique_fraction",
            "predicted_attackable_fraction",
            "acc_pvu",
            "acc_all",
            "queries_median",
        ] {
            if let Some(value) = report.metric(metric) {
                csv.push_str(&format!("{k},{metric},{value}\n"));
            }
        }
        reports.push(report);
    }
    Ok((reports, csv))
}

/// Tolerates errors the core layers surface while keeping `?` ergonomic.
impl From<tabular::TabularError> for HarnessError {
    fn from(e: tabular::TabularError) -> Self {
        HarnessError::Tabular(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            dataset: DatasetSource::CompleteK { b: 6, k: 3 },
            users: 12,
            known_attributes: 3,
            attack: "cloning".into(),
            workers: 2,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn runs_and_aggregates() {
        let report = run_experiment(&tiny_config()).unwrap();
        assert_eq!(report.rows.len(), 12);
        assert_eq!(report.aggregates.users, 12);
        // Complete_k: everyone is unique on all attributes
        assert_eq!(report.aggregates.value_unique_fraction, 1.0);
    }

    #[test]
    fn replay_is_byte_identical() {
        let a = run_experiment(&tiny_config()).unwrap();
        let mut serial = tiny_config();
        serial.workers = 1;
        let b = run_experiment(&serial).unwrap();
        // worker count must not affect report bytes
        assert_eq!(a.summary_json(), b.summary_json());
        assert_eq!(a.rows_csv(), b.rows_csv());
    }

    #[test]
    fn rejects_oversampling() {
        let mut cfg = tiny_config();
        cfg.users = 10_000;
        assert!(run_experiment(&cfg).is_err());
        let mut cfg = tiny_config();
        cfg.known_attributes = 99;
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn oracle_counts_exact_matches() {
        let d = generate_complete_k(3, 2, 1).unwrap();
        let oracle = DatasetOracle::new(&d);
        // every record is unique on (a1, a2)
        assert!(oracle.is_unique(
            &["a1".into(), "a2".into()],
            &[Value::Int(1), Value::Int(1)]
        ));
        // but shares a1 with B^(k-1) others
        assert!(!oracle.is_unique(&["a1".into()], &[Value::Int(1)]));
        // unknown attribute is never unique
        assert!(!oracle.is_unique(&["zz".into()], &[Value::Int(1)]));
    }
}
