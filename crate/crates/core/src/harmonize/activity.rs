use serde::{Deserialize, Serialize};

use super::DaoRecord;

pub const DAY: i64 = 86_400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityTier {
    HighlyActive,
    ModeratelyActive,
    MinimallyActive,
    TestOrDormant,
}

/// Tier for a timeline of governance transaction times (UTC seconds).
/// Entries after `now` are ignored.
///
/// * at least 5 in the last 30 days: highly active
/// * at least 1 in the last 90 days: moderately active
/// * fewer than 2 ever: test or dormant
/// * otherwise minimally active
pub fn classify_timeline(timeline: &[i64], now: i64) -> ActivityTier {
    let seen: Vec<i64> = timeline.iter().copied().filter(|t| *t <= now).collect();
    let within = |days: i64| seen.iter().filter(|t| **t >= now - days * DAY).count();
    if within(30) >= 5 {
        ActivityTier::HighlyActive
    } else if within(90) >= 1 {
        ActivityTier::ModeratelyActive
    } else if seen.len() < 2 {
        ActivityTier::TestOrDormant
    } else {
        ActivityTier::MinimallyActive
    }
}

pub fn classify_activity(record: &DaoRecord, now: i64) -> ActivityTier {
    classify_timeline(&record.activity, now)
}
