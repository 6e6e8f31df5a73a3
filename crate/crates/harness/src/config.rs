//! Experiment configuration: a small `key = value` file format, documented
//! in the README, plus validation and a canonical rendering used for the
//! report fingerprint.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::HarnessError;

/// Where the dataset comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DatasetSource {
    Csv {
        path: String,
        uid_column: String,
        secret_column: String,
    },
    CompleteK {
        b: u32,
        k: u32,
    },
    Census {
        records: u64,
    },
    SparseBinary {
        records: u64,
        attrs: u32,
        positive_rate: f64,
    },
}

/// One experiment: dataset, attack, engine policy, sampling sizes, seeds.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    /// Seed for dataset generators.
    pub dataset_seed: u64,
    /// Resample the secret column uniformly before attacking.
    pub randomize_secret: bool,
    /// Registered attack strategy name.
    pub attack: String,
    /// Attributes known to the attacker (k*).
    pub known_attributes: usize,
    /// Users sampled per run, without replacement.
    pub users: usize,
    pub delta: usize,
    pub sigma_star: f64,
    pub target_value: i64,
    pub level_tries: usize,
    /// Engine salt (16 hex digits in the file).
    pub salt: u64,
    pub rounding: bool,
    pub suppression: bool,
    pub hard_floor: u64,
    /// Harness seed: user sampling, subset exploration, coin flips.
    pub seed: u64,
    /// Worker threads; 0 means available parallelism.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetSource::Census { records: 30_162 },
            dataset_seed: 1,
            randomize_secret: false,
            attack: "cloning".into(),
            known_attributes: 10,
            users: 1000,
            delta: 10,
            sigma_star: 0.7,
            target_value: 1,
            level_tries: 100,
            salt: 0x5EED_5A17_0000_0001,
            rounding: true,
            suppression: true,
            hard_floor: 2,
            seed: 42,
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<ExperimentConfig, HarnessError> {
        let text = fs::read_to_string(path.as_ref()).map_err(|source| HarnessError::Io {
            path: path.as_ref().display().to_string(),
            source,
        })?;
        ExperimentConfig::from_str_cfg(&text)
    }

    /// Parses the `key = value` format. Unknown keys are errors, so typos
    /// fail fast instead of silently running defaults.
    pub fn from_str_cfg(text: &str) -> Result<ExperimentConfig, HarnessError> {
        let mut pairs: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| HarnessError::Config {
                detail: format!("line {}: expected key = value, got {raw:?}", lineno + 1),
            })?;
            pairs.insert(key.trim().to_string(), value.trim().to_string());
        }

        let mut cfg = ExperimentConfig::default();
        let mut dataset: Option<DatasetSource> = None;
        let mut csv_uid = "uid".to_string();
        let mut csv_secret: Option<String> = None;
        let mut csv_path: Option<String> = None;

        for (key, value) in &pairs {
            let bad = |detail: String| HarnessError::Config { detail };
            match key.as_str() {
                "dataset.csv" => csv_path = Some(value.clone()),
                "dataset.uid_column" => csv_uid = value.clone(),
                "dataset.secret_column" => csv_secret = Some(value.clone()),
                "dataset.complete_k" => {
                    let (b, k) = value.split_once(',').ok_or_else(|| {
                        bad(format!("dataset.complete_k wants B,k — got {value:?}"))
                    })?;
                    dataset = Some(DatasetSource::CompleteK {
                        b: parse(b.trim(), key)?,
                        k: parse(k.trim(), key)?,
                    });
                }
                "dataset.census" => {
                    dataset = Some(DatasetSource::Census {
                        records: parse(value, key)?,
                    });
                }
                "dataset.sparse" => {
                    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(bad(format!(
                            "dataset.sparse wants records,attrs,rate — got {value:?}"
                        )));
                    }
                    dataset = Some(DatasetSource::SparseBinary {
                        records: parse(parts[0], key)?,
                        attrs: parse(parts[1], key)?,
                        positive_rate: parse(parts[2], key)?,
                    });
                }
                "dataset.seed" => cfg.dataset_seed = parse(value, key)?,
                "dataset.randomize_secret" => cfg.randomize_secret = parse_bool(value, key)?,
                "attack" => cfg.attack = value.clone(),
                "known_attributes" => cfg.known_attributes = parse(value, key)?,
                "users" => cfg.users = parse(value, key)?,
                "delta" => cfg.delta = parse(value, key)?,
                "sigma_star" => cfg.sigma_star = parse(value, key)?,
                "target_value" => cfg.target_value = parse(value, key)?,
                "level_tries" => cfg.level_tries = parse(value, key)?,
                "salt" => cfg.salt = parse_salt(value)?,
                "rounding" => cfg.rounding = parse_bool(value, key)?,
                "suppression" => cfg.suppression = parse_bool(value, key)?,
                "hard_floor" => cfg.hard_floor = parse(value, key)?,
                "seed" => cfg.seed = parse(value, key)?,
                "workers" => cfg.workers = parse(value, key)?,
                other => {
                    return Err(bad(format!("unknown configuration key {other:?}")));
                }
            }
        }

        if let Some(path) = csv_path {
            let secret_column = csv_secret.ok_or_else(|| HarnessError::Config {
                detail: "dataset.csv requires dataset.secret_column".into(),
            })?;
            dataset = Some(DatasetSource::Csv {
                path,
                uid_column: csv_uid,
                secret_column,
            });
        }
        if let Some(dataset) = dataset {
            cfg.dataset = dataset;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.users == 0 {
            return Err(HarnessError::Config {
                detail: "users must be at least 1".into(),
            });
        }
        if self.known_attributes == 0 {
            return Err(HarnessError::Config {
                detail: "known_attributes must be at least 1".into(),
            });
        }
        if stickyq_core::attacks::strategy_by_name(&self.attack).is_none() {
            return Err(HarnessError::Config {
                detail: format!(
                    "unknown attack {:?}; available: {}",
                    self.attack,
                    stickyq_core::attacks::strategy_names().join(", ")
                ),
            });
        }
        if !(self.target_value == 0 || self.target_value == 1) {
            return Err(HarnessError::Config {
                detail: format!("target_value must be 0 or 1, got {}", self.target_value),
            });
        }
        Ok(())
    }

    /// Canonical one-line-per-key rendering; hashed into the fingerprint
    /// and echoed in reports.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let dataset = match &self.dataset {
            DatasetSource::Csv {
                path,
                uid_column,
                secret_column,
            } => format!(
                "dataset.csv = {path}\ndataset.uid_column = {uid_column}\n\
                 dataset.secret_column = {secret_column}"
            ),
            DatasetSource::CompleteK { b, k } => format!("dataset.complete_k = {b},{k}"),
            DatasetSource::Census { records } => format!("dataset.census = {records}"),
            DatasetSource::SparseBinary {
                records,
                attrs,
                positive_rate,
            } => {
                format!("dataset.sparse = {records},{attrs},{positive_rate}")
            }
        };
        out.push_str(&dataset);
        out.push('\n');
        out.push_str(&format!(
            "dataset.seed = {}\ndataset.randomize_secret = {}\nattack = {}\n\
             known_attributes = {}\nusers = {}\ndelta = {}\nsigma_star = {}\n\
             target_value = {}\nlevel_tries = {}\nsalt = {:016X}\nrounding = {}\n\
             suppression = {}\nhard_floor = {}\nseed = {}\n",
            self.dataset_seed,
            self.randomize_secret,
            self.attack,
            self.known_attributes,
            self.users,
            self.delta,
            self.sigma_star,
            self.target_value,
            self.level_tries,
            self.salt,
            self.rounding,
            self.suppression,
            self.hard_floor,
            self.seed,
        ));
        out
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// 16 hex digits, the engine's secret salt.
pub fn parse_salt(text: &str) -> Result<u64, HarnessError> {
    let text = text.trim();
    if text.len() != 16 || !text.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(HarnessError::Config {
            detail: format!("salt must be exactly 16 hex digits, got {text:?}"),
        });
    }
    u64::from_str_radix(text, 16).map_err(|e| HarnessError::Config {
        detail: format!("bad salt {text:?}: {e}"),
    })
}

fn parse<T: std::str::FromStr>(value: &str, key: &str) -> Result<T, HarnessError>
where
    T::Err: fmt::Display,
{
    value.trim().parse().map_err(|e| HarnessError::Config {
        detail: format!("bad value for {key}: {e}"),
    })
}

fn parse_bool(value: &str, key: &str) -> Result<bool, HarnessError> {
    match value.trim() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => Err(HarnessError::Config {
            detail: format!("bad boolean for {key}: {other:?}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_file() {
        let cfg = ExperimentConfig::from_str_cfg(
            "# cloning on the bundled census table\n\
             dataset.census = 5000\n\
             dataset.seed = 7\n\
             attack = cloning\n\
             known_attributes = 10\n\
             users = 200\n\
             delta = 10\n\
             sigma_star = 0.7\n\
             salt = 00DEADBEEF00F00D\n\
             seed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.dataset, DatasetSource::Census { records: 5000 });
        assert_eq!(cfg.salt, 0x00DE_ADBE_EF00_F00D);
        assert_eq!(cfg.users, 200);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ExperimentConfig::from_str_cfg("attacc = cloning\n").is_err());
        assert!(ExperimentConfig::from_str_cfg("users = -3\n").is_err());
        assert!(ExperimentConfig::from_str_cfg("users = 0\n").is_err());
        assert!(ExperimentConfig::from_str_cfg("attack = siege\n").is_err());
        assert!(ExperimentConfig::from_str_cfg("salt = 123\n").is_err());
    }

    #[test]
    fn csv_source_requires_secret_column() {
        assert!(ExperimentConfig::from_str_cfg("dataset.csv = x.csv\n").is_err());
        let cfg = ExperimentConfig::from_str_cfg(
            "dataset.csv = x.csv\ndataset.secret_column = hiv\n",
        )
        .unwrap();
        assert_eq!(
            cfg.dataset,
            DatasetSource::Csv {
                path: "x.csv".into(),
                uid_column: "uid".into(),
                secret_column: "hiv".into()
            }
        );
    }

    #[test]
    fn canonical_rendering_roundtrips() {
        let cfg = ExperimentConfig::default();
        let reparsed = ExperimentConfig::from_str_cfg(&cfg.canonical()).unwrap();
        assert_eq!(cfg.canonical(), reparsed.canonical());
    }
}
