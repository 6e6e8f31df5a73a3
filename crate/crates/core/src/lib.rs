//! Sticky-noise anonymizing count-query engine, the noise-exploitation
//! attacks against it, and the statistical machinery the attacks rest on.

pub mod prng;
pub mod attacks;
pub mod engine;
pub mod query;
pub mod stats;
pub mod tabular;
