//! Retrieval, decoding and harmonisation of on-chain DAO governance data,
//! sustainability KPI scoring, and the statistical tests used to compare
//! KPI categories.

pub mod abi;
pub mod chain;
pub mod harmonize;
pub mod kpi;
pub mod pipeline;
pub mod primitives;
pub mod report;
pub mod rng;
pub mod stats;
pub mod synth;
