//! `stickyq` — anonymizing count-query engine, noise-exploitation attacks,
//! and the experiment harness around them.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use stickyq_core::attacks::{
    strategy_by_name, strategy_names, AttackParams, BackgroundKnowledge, ValueDomains,
};
use stickyq_core::engine::{answer, answer_debug, EngineAnswerer, EngineConfig, Rounding};
use stickyq_core::prng::substream;
use stickyq_core::query::parse_query;
use stickyq_core::stats::{
    calibrate_sigma_star, default_threshold_grid, simulated_rounded_accuracy,
    theoretical_accuracy, theoretical_accuracy_chi2,
};
use stickyq_core::tabular::load_csv;

use stickyq_harness::config::{parse_salt, ExperimentConfig};
use stickyq_harness::control::randomized_control;
use stickyq_harness::experiment::{run_experiment, sweep_k, DatasetOracle};
use stickyq_harness::report::MetricAssertion;
use stickyq_harness::runner::attack_one;
use stickyq_harness::uniqueness::{uniqueness_csv, uniqueness_report};

#[derive(Parser)]
#[command(
    name = "stickyq",
    about = "Sticky-noise anonymizing count queries and the attacks that break them",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DatasetArgs {
    /// CSV dataset path (UTF-8, header row)
    #[arg(long)]
    dataset: PathBuf,
    /// Column holding the unique user id
    #[arg(long, default_value = "uid")]
    uid_column: String,
}

#[derive(Args)]
struct SaltArg {
    /// Engine salt, 16 hex digits (or set STICKYQ_SALT)
    #[arg(long)]
    salt: Option<String>,
}

impl SaltArg {
    fn resolve(&self) -> Result<u64> {
        let text = match &self.salt {
            Some(s) => s.clone(),
            None => std::env::var("STICKYQ_SALT")
                .map_err(|_| anyhow!("provide --salt or set STICKYQ_SALT (16 hex digits)"))?,
        };
        Ok(parse_salt(&text)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Answer one query through the anonymizing engine
    Answer {
        #[command(flatten)]
        data: DatasetArgs,
        /// Column holding the binary secret attribute
        #[arg(long)]
        secret_column: String,
        #[command(flatten)]
        salt: SaltArg,
        /// The SQL count query to answer
        #[arg(long)]
        query: String,
        /// Return the raw noisy value instead of rounding
        #[arg(long)]
        no_round: bool,
        /// Disable bucket suppression
        #[arg(long)]
        no_suppress: bool,
        /// Include the per-condition noise layer breakdown
        #[arg(long)]
        debug_layers: bool,
    },
    /// Run one attack against one victim
    Attack {
        /// Attack strategy name
        kind: String,
        #[command(flatten)]
        data: DatasetArgs,
        #[command(flatten)]
        salt: SaltArg,
        /// Victim uid
        #[arg(long)]
        victim: String,
        /// Comma-separated known attribute names (the background knowledge)
        #[arg(long)]
        known: String,
        /// The secret attribute to infer
        #[arg(long)]
        secret: String,
        /// Number of dummy conditions
        #[arg(long, default_value_t = 10)]
        delta: usize,
        /// Variance cutoff for the cloning classifier
        #[arg(long, default_value_t = 0.7)]
        sigma_star: f64,
        /// Probed secret value v
        #[arg(long, default_value_t = 1)]
        target_value: i64,
        /// Subset exploration tries per level
        #[arg(long, default_value_t = 100)]
        level_tries: usize,
        /// Exploration seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte-Carlo statistics of the attack machinery
    Stats {
        #[command(subcommand)]
        which: StatsCommand,
    },
    /// Run a configured experiment and write reports
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
    /// Ground-truth uniqueness analytics over a dataset
    Uniqueness {
        #[command(flatten)]
        data: DatasetArgs,
        /// Column holding the binary secret attribute
        #[arg(long)]
        secret_column: String,
        /// Comma-separated k values
        #[arg(long, default_value = "1,2,4,6,8,10")]
        k: String,
        /// Users sampled per k
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Accuracy of the likelihood ratio test for k known attributes
    Accuracy {
        #[arg(long)]
        k: usize,
        /// Simulate rounding to the nearest nonnegative integer
        #[arg(long)]
        rounded: bool,
        /// Cross-check through the noncentral chi-squared route
        #[arg(long)]
        chi2: bool,
        #[arg(long, default_value_t = 200_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sweep the cloning variance cutoff and report TPR/TNR
    Calibrate {
        /// Number of dummy conditions
        #[arg(long, default_value_t = 10)]
        delta: usize,
        /// Shared conditions in the simulated queries
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Simulated query set size (the true count)
        #[arg(long, default_value_t = 10)]
        qsize: u64,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// One experiment from a config file
    Run {
        /// Key-value config file (schema in the README)
        #[arg(long)]
        config: PathBuf,
        /// Output directory for summary.json and users.csv
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        /// Metric assertions (e.g. acc_pvu>=0.9); nonzero exit on violation
        #[arg(long = "assert")]
        assertions: Vec<String>,
    },
    /// The same experiment across a range of known-attribute counts
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Range `2..6` (inclusive) or comma list `2,4,6`
        #[arg(long)]
        k: String,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
    /// Paired run on original and secret-randomized data
    Control {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Answer {
            data,
            secret_column,
            salt,
            query,
            no_round,
            no_suppress,
            debug_layers,
        } => {
            let dataset = load_csv(&data.dataset, &data.uid_column, &secret_column)?;
            let mut config = EngineConfig::new(salt.resolve()?);
            if no_round {
                config.rounding = Rounding::None;
            }
            if no_suppress {
                config.suppression = false;
            }
            let parsed = parse_query(&query)?;
            let result = if debug_layers {
                answer_debug(&dataset, &parsed, &config)?
            } else {
                answer(&dataset, &parsed, &config)?
            };
            println!("{}", serde_json::to_string_pretty(&result)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Attack {
            kind,
            data,
            salt,
            victim,
            known,
            secret,
            delta,
            sigma_star,
            target_value,
            level_tries,
            seed,
        } => {
            let strategy = strategy_by_name(&kind).ok_or_else(|| {
                anyhow!("unknown attack {kind:?}; available: {}", strategy_names().join(", "))
            })?;
            let dataset = load_csv(&data.dataset, &data.uid_column, &secret)?;
            let record = dataset
                .record_by_uid(&victim)
                .ok_or_else(|| anyhow!("victim {victim:?} not found"))?;
            let attrs: Vec<String> = known
                .split(',')
                .map(|a| a.trim().to_ascii_lowercase())
                .filter(|a| !a.is_empty())
                .collect();
            let values = attrs
                .iter()
                .map(|a| {
                    record
                        .value(a)
                        .cloned()
                        .ok_or_else(|| anyhow!("victim has no attribute {a:?}"))
                })
                .collect::<Result<Vec<_>>>()?;
            let truth = dataset.secret_value(record.row());
            let knowledge = BackgroundKnowledge::new(attrs, values, &secret)?;
            let engine = EngineAnswerer::new(&dataset, EngineConfig::new(salt.resolve()?));
            let domains = ValueDomains::new(dataset.value_domains());
            let oracle = DatasetOracle::new(&dataset);
            let params = AttackParams {
                delta_count: delta,
                sigma_star,
                target_value,
                level_tries,
                seed: substream(seed, 1),
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
            #[derive(serde::Serialize)]
            struct AttackCliOutput<'a> {
                #[serde(flatten)]
                outcome: &'a stickyq_core::attacks::AttackOutcome,
                truth: u8,
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&AttackCliOutput {
                    outcome: &outcome,
                    truth,
                })?
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { which } => {
            match which {
                StatsCommand::Accuracy {
                    k,
                    rounded,
                    chi2,
                    trials,
                    seed,
                } => {
                    let (mode, est) = if rounded {
                        ("rounded", simulated_rounded_accuracy(k, trials, seed)?)
                    } else if chi2 {
                        ("chi2", theoretical_accuracy_chi2(k, trials, seed)?)
                    } else {
                        ("theoretical", theoretical_accuracy(k, trials, seed)?)
                    };
                    println!("k,mode,accuracy,std_error,trials");
                    println!("{k},{mode},{},{},{}", est.value, est.std_error, est.trials);
                }
                StatsCommand::Calibrate {
                    delta,
                    k,
                    qsize,
                    trials,
                    seed,
                } => {
                    let rows = calibrate_sigma_star(
                        delta,
                        k,
                        qsize,
                        trials,
                        seed,
                        &default_threshold_grid(),
                    )?;
                    println!("sigma_star,true_positive_rate,true_negative_rate");
                    for row in rows {
                        println!(
                            "{},{},{}",
                            row.sigma_star, row.true_positive_rate, row.true_negative_rate
                        );
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment { which } => match which {
            ExperimentCommand::Run {
                config,
                out,
                assertions,
            } => {
                let config = ExperimentConfig::from_file(&config)?;
                let assertions = assertions
                    .iter()
                    .map(|a| MetricAssertion::parse(a))
                    .collect::<Result<Vec<_>, _>>()?;
                let report = run_experiment(&config)?;
                report.write_to(&out)?;
                println!("{}", report.summary_json());
                let mut failed = false;
                for assertion in &assertions {
                    if let Err(violation) = assertion.check(&report) {
                        eprintln!("assertion failed: {violation}");
                        failed = true;
                    }
                }
                Ok(if failed {
                    ExitCode::FAILURE
                } else {
                    ExitCode::SUCCESS
                })
            }
            ExperimentCommand::Sweep { config, k, out } => {
                let config = ExperimentConfig::from_file(&config)?;
                let k_values = parse_k_values(&k)?;
                let (reports, csv) = sweep_k(&config, &k_values)?;
                std::fs::create_dir_all(&out)
                    .with_context(|| format!("creating {}", out.display()))?;
                std::fs::write(out.join("sweep.csv"), &csv)
                    .with_context(|| "writing sweep.csv")?;
                for (k, report) in k_values.iter().zip(&reports) {
                    report.write_to(out.join(format!("k{k}")))?;
                }
                print!("{csv}");
                Ok(ExitCode::SUCCESS)
            }
            ExperimentCommand::Control { config, out } => {
                let config = ExperimentConfig::from_file(&config)?;
                let control = randomized_control(&config)?;
                std::fs::create_dir_all(&out)
                    .with_context(|| format!("creating {}", out.display()))?;
                control.original.write_to(out.join("original"))?;
                control.randomized.write_to(out.join("randomized"))?;
                #[derive(serde::Serialize)]
                struct Paired {
                    acc_pvu_gap: Option<f64>,
                    acc_all_gap: f64,
                    randomized_secret_mean: f64,
                }
                let paired = serde_json::to_string_pretty(&Paired {
                    acc_pvu_gap: control.acc_pvu_gap,
                    acc_all_gap: control.acc_all_gap,
                    randomized_secret_mean: control.randomized_secret_mean,
                })?;
                std::fs::write(out.join("paired.json"), &paired)
                    .with_context(|| "writing paired.json")?;
                println!("{paired}");
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Uniqueness {
            data,
            secret_column,
            k,
            samples,
            seed,
        } => {
            let dataset = load_csv(&data.dataset, &data.uid_column, &secret_column)?;
            let k_values = parse_k_values(&k)?;
            let rows = uniqueness_report(&dataset, &k_values, samples, seed)?;
            print!("{}", uniqueness_csv(&rows));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_k_values(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().context("bad k range start")?;
        let hi: usize = hi.trim().parse().context("bad k range end")?;
        if lo == 0 || hi < lo {
            bail!("bad k range {text:?}");
        }
        return Ok((lo..=hi).collect());
    }
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .context("bad k list")?;
    if values.is_empty() || values.contains(&0) {
        bail!("k values must be positive");
    }
    Ok(values)
}
