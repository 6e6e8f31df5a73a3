//! Experiment reports: per-user rows, aggregate metrics, and the JSON/CSV
//! writers. Report bytes are a pure function of config + seed.

use std::fs;
use std::path::Path;

use serde::Serialize;
use stickyq_core::attacks::Verdict;
use stickyq_core::engine::hash64;

use crate::HarnessError;

/// One attacked user, with ground truth joined in after the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct UserRow {
    pub uid: String,
    pub truth: u8,
    pub verdict: Verdict,
    pub queries_issued: u64,
    pub value_unique: bool,
    pub predicted_attackable: bool,
    /// The fair-coin guess scored for non-inference verdicts.
    pub coin: u8,
    /// The known-attribute set the attacker was given.
    pub known_attrs: Vec<String>,
}

impl UserRow {
    /// Whether this user counts as correctly inferred under coin-flip
    /// scoring for NonAttackable/NoSamples.
    pub fn scored_correct(&self) -> bool {
        match self.verdict {
            Verdict::True => self.truth == 1,
            Verdict::False => self.truth == 0,
            Verdict::NonAttackable | Verdict::NoSamples => self.coin == self.truth,
        }
    }

    /// Correctness over inferences only; `None` when no inference was made.
    pub fn inference_correct(&self) -> Option<bool> {
        match self.verdict {
            Verdict::True => Some(self.truth == 1),
            Verdict::False => Some(self.truth == 0),
            _ => None,
        }
    }
}

/// Aggregate metrics over the sampled users.
#[derive(Debug, Clone, Serialize)]
pub struct Aggregates {
    pub users: usize,
    /// Fraction of sampled users value-unique on their known attributes.
    pub value_unique_fraction: f64,
    /// Predicted-attackable count over the value-unique count (the
    /// "predicted attackable" column of the tables).
    pub predicted_attackable_of_value_unique: Option<f64>,
    /// Predicted-attackable fraction over all sampled users.
    pub predicted_attackable_fraction: f64,
    /// Accuracy over predicted-attackable users only.
    pub acc_pvu: Option<f64>,
    /// Accuracy over all sampled users, coin-flip scoring for the rest.
    pub acc_all: f64,
    pub queries_median: u64,
    pub queries_max: u64,
    pub queries_total: u64,
}

/// Recomputes every aggregate from the rows; the emitted aggregates are
/// exactly this function's output so reports stay self-consistent.
pub fn aggregates_from_rows(rows: &[UserRow]) -> Aggregates {
    let users = rows.len();
    let value_unique = rows.iter().filter(|r| r.value_unique).count();
    let predicted = rows.iter().filter(|r| r.predicted_attackable).count();
    let correct_pvu = rows
        .iter()
        .filter(|r| r.predicted_attackable && r.inference_correct() == Some(true))
        .count();
    let correct_all = rows.iter().filter(|r| r.scored_correct()).count();
    let mut queries: Vec<u64> = rows.iter().map(|r| r.queries_issued).collect();
    queries.sort_unstable();
    Aggregates {
        users,
        value_unique_fraction: ratio(value_unique, users),
        predicted_attackable_of_value_unique: (value_unique > 0)
            .then(|| ratio(predicted, value_unique)),
        predicted_attackable_fraction: ratio(predicted, users),
        acc_pvu: (predicted > 0).then(|| ratio(correct_pvu, predicted)),
        acc_all: ratio(correct_all, users),
        queries_median: queries.get(users.saturating_sub(1) / 2).copied().unwrap_or(0),
        queries_max: queries.last().copied().unwrap_or(0),
        queries_total: queries.iter().sum(),
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// A full experiment report: config echo, fingerprint, aggregates, rows.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    /// Canonical config rendering this run is a pure function of.
    pub config: String,
    /// Hash of crate version + canonical config, for replay bookkeeping.
    pub fingerprint: String,
    pub aggregates: Aggregates,
    pub rows: Vec<UserRow>,
}

impl ExperimentReport {
    pub fn new(config_canonical: String, rows: Vec<UserRow>) -> ExperimentReport {
        let fingerprint = format!(
            "{:016x}",
            hash64(&format!(
                "{} {}",
                env!("CARGO_PKG_VERSION"),
                config_canonical
            ))
        );
        ExperimentReport {
            config: config_canonical,
            fingerprint,
            aggregates: aggregates_from_rows(&rows),
            rows,
        }
    }

    /// Aggregates + config as pretty JSON (rows excluded; they go to CSV).
    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            config: &'a str,
            fingerprint: &'a str,
            aggregates: &'a Aggregates,
        }
        serde_json::to_string_pretty(&Summary {
            config: &self.config,
            fingerprint: &self.fingerprint,
            aggregates: &self.aggregates,
        })
        .expect("report serialization")
    }

    /// Per-user rows as CSV, one line per user, uid-ordered as sampled.
    pub fn rows_csv(&self) -> String {
        let mut out = String::from(
            "uid,truth,verdict,queries_issued,value_unique,predicted_attackable,coin,known_attrs\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:?},{},{},{},{},{}\n",
                r.uid,
                r.truth,
                r.verdict,
                r.queries_issued,
                r.value_unique,
                r.predicted_attackable,
                r.coin,
                r.known_attrs.join(";"),
            ));
        }
        out
    }

    /// Writes `summary.json` and `users.csv` under `dir`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<(), HarnessError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        for (name, contents) in [
            ("summary.json", self.summary_json()),
            ("users.csv", self.rows_csv()),
        ] {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|source| HarnessError::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
        Ok(())
    }

    /// Looks an aggregate metric up by name, for `--assert` expressions.
    pub fn metric(&self, name: &str) -> Option<f64> {
        let a = &self.aggregates;
        match name {
            "users" => Some(a.users as f64),
            "value_unique_fraction" => Some(a.value_unique_fraction),
            "predicted_attackable_of_value_unique" => a.predicted_attackable_of_value_unique,
            "predicted_attackable_fraction" => Some(a.predicted_attackable_fraction),
            "acc_pvu" => a.acc_pvu,
            "acc_all" => Some(a.acc_all),
            "queries_median" => Some(a.queries_median as f64),
            "queries_max" => Some(a.queries_max as f64),
            "queries_total" => Some(a.queries_total as f64),
            _ => None,
        }
    }
}

/// One `metric>=value` / `metric<=value` assertion against a report.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAssertion {
    pub metric: String,
    pub at_least: bool,
    pub bound: f64,
}

impl MetricAssertion {
    pub fn parse(text: &str) -> Result<MetricAssertion, HarnessError> {
        let (metric, at_least, bound) = if let Some((m, b)) = text.split_once(">=") {
            (m, true, b)
        } else if let Some((m, b)) = text.split_once("<=") {
            (m, false, b)
        } else {
            return Err(HarnessError::Config {
                detail: format!("assertion {text:?} must use >= or <="),
            });
        };
        Ok(MetricAssertion {
            metric: metric.trim().to_string(),
            at_least,
            bound: bound.trim().parse().map_err(|e| HarnessError::Config {
                detail: format!("bad assertion bound in {text:?}: {e}"),
            })?,
        })
    }

    /// `Ok(())` when the report satisfies the assertion.
    pub fn check(&self, report: &ExperimentReport) -> Result<(), String> {
        let value = report
            .metric(&self.metric)
            .ok_or_else(|| format!("metric {:?} unavailable in this report", self.metric))?;
        let ok = if self.at_least {
            value >= self.bound
        } else {
            value <= self.bound
        };
        if ok {
            Ok(())
        } else {
            Err(format!(
                "{} = {value:.4} violates {} {}",
                self.metric,
                if self.at_least { ">=" } else { "<=" },
                self.bound
            ))
        }
    }
}
