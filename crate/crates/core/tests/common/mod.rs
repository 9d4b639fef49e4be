#![allow(dead_code)]

pub mod balance;
pub mod closure;
pub mod gates;
pub mod invariance;
pub mod kpi_table;
pub mod logs;
pub mod oracle;
pub mod pipeline;

/// Runs `cases` cases without writing regression files; integration test
/// binaries have no `lib.rs` for proptest to anchor them to.
pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases, failure_persistence: None, ..Default::default() }
}
