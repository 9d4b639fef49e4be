use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::abi::DecodedEvent;
use crate::chain::LogKey;

/// Counts per validation check. Anomalies are reported, never thrown.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub input: u64,
    pub retained: u64,
    pub duplicates: u64,
    /// Events whose block timestamp is older than an earlier block's.
    pub timestamp_regressions: u64,
    /// Events never enriched with a block timestamp.
    pub missing_timestamps: u64,
}

impl ValidationReport {
    pub fn anomalies(&self) -> u64 {
        self.duplicates + self.timestamp_regressions + self.missing_timestamps
    }

    pub fn merge(&mut self, other: &ValidationReport) {
        self.input += other.input;
        self.retained += other.retained;
        self.duplicates += other.duplicates;
        self.timestamp_regressions += other.timestamp_regressions;
        self.missing_timestamps += other.missing_timestamps;
    }
}

/// Drops repeated `(block_number, tx_hash, log_index)` entries and checks
/// that timestamps never decrease with block height. The first copy of a
/// duplicate wins; output is sorted by `(block_number, log_index)`.
pub fn dedup_and_validate(events: Vec<DecodedEvent>) -> (Vec<DecodedEvent>, ValidationReport) {
    let mut report = ValidationReport { input: events.len() as u64, ..Default::default() };
    let mut unique: BTreeMap<(u64, u64, LogKey), DecodedEvent> = BTreeMap::new();
    for ev in events {
        let key = ev.key();
        match unique.entry((ev.block_number, ev.log_index, key)) {
            Entry::Occupied(_) => report.duplicates += 1,
            Entry::Vacant(slot) => {
                slot.insert(ev);
            }
        }
    }

    let clean: Vec<DecodedEvent> = unique.into_values().collect();
    let mut newest: Option<(u64, i64)> = None;
    for ev in &clean {
        if ev.timestamp_utc <= 0 {
            report.missing_timestamps += 1;
            continue;
        }
        match newest {
            Some((block, ts)) if block < ev.block_number && ev.timestamp_utc < ts => report.timestamp_regressions += 1,
            Some((_, ts)) if ev.timestamp_utc <= ts => {}
            _ => newest = Some((ev.block_number, ev.timestamp_utc)),
        }
    }
    report.retained = clean.len() as u64;
    (clean, report)
}

/// Fills `timestamp_utc` from a block → UTC map; unknown blocks stay at zero.
pub fn enrich_timestamps(events: &mut [DecodedEvent], timestamps: &BTreeMap<u64, i64>) {
    for ev in events {
        if let Some(ts) = timestamps.get(&ev.block_number) {
            ev.timestamp_utc = *ts;
        }
    }
}
