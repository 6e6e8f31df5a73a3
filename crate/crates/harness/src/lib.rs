//! Experiment harness: configuration, orchestration, reports, and the
//! ground-truth analytics that sit outside the attacker-visible interface.

pub mod config;
pub mod control;
pub mod experiment;
pub mod report;
pub mod runner;
pub mod uniqueness;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {detail}")]
    Config { detail: String },
    #[error(transparent)]
    Tabular(stickyq_core::tabular::TabularError),
    #[error(transparent)]
    Attack(#[from] stickyq_core::attacks::AttackError),
    #[error(transparent)]
    Engine(#[from] stickyq_core::engine::EngineError),
    #[error(transparent)]
    Stats(#[from] stickyq_core::stats::StatsError),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
