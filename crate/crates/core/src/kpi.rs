//! The four sustainability KPIs, their level bands and scores.
//!
//! Scores are kept in hundredths so the composite is an exact integer sum.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::harmonize::DaoRecord;
use crate::primitives::big_ratio;

/// Level boundaries, shared with the chart threshold lines.
pub mod thresholds {
    pub const PARTICIPATION_LOW: f64 = 0.10;
    pub const PARTICIPATION_HIGH: f64 = 0.40;
    pub const TREASURY_LOW_USD: f64 = 1e8;
    pub const TREASURY_HIGH_USD: f64 = 1e9;
    pub const CIRCULATION_SPLIT: f64 = 0.50;
    pub const APPROVAL_LOW: f64 = 0.30;
    pub const APPROVAL_HIGH: f64 = 0.70;
    pub const DURATION_MIN_DAYS: f64 = 3.0;
    pub const DURATION_MAX_DAYS: f64 = 14.0;
    pub const HOLDER_HIGH: f64 = 0.10;
    pub const HOLDER_MEDIUM: f64 = 0.33;
    pub const HOLDER_LOW: f64 = 0.66;
}

use thresholds::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    Low,
    #[serde(rename = "Medium-Low")]
    MediumLow,
    Medium,
    #[serde(rename = "Medium-High")]
    MediumHigh,
    High,
}

impl Level {
    pub fn label(self) -> &'static str {
        match self {
            Level::Low => "Low",
            Level::MediumLow => "Medium-Low",
            Level::Medium => "Medium",
            Level::MediumHigh => "Medium-High",
            Level::High => "High",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kpi {
    Participation,
    Funds,
    Voting,
    Decentralisation,
}

impl Kpi {
    pub const ALL: [Kpi; 4] = [Kpi::Participation, Kpi::Funds, Kpi::Voting, Kpi::Decentralisation];

    pub fn name(self) -> &'static str {
        match self {
            Kpi::Participation => "participation",
            Kpi::Funds => "funds",
            Kpi::Voting => "voting",
            Kpi::Decentralisation => "decentralisation",
        }
    }

    /// Levels the KPI can take, lowest first.
    pub fn levels(self) -> &'static [Level] {
        match self {
            Kpi::Participation | Kpi::Voting => &[Level::Low, Level::Medium, Level::High],
            Kpi::Funds => &[Level::Low, Level::MediumLow, Level::MediumHigh, Level::High],
            Kpi::Decentralisation => &[Level::Low, Level::MediumLow, Level::Medium, Level::MediumHigh, Level::High],
        }
    }

    /// Score in hundredths for `level`, or `None` if the KPI has no such level.
    pub fn score_centi(self, level: Level) -> Option<u32> {
        let s = match (self, level) {
            (Kpi::Participation | Kpi::Voting, Level::Low) => 100,
            (Kpi::Participation | Kpi::Voting, Level::Medium) => 200,
            (Kpi::Participation | Kpi::Voting, Level::High) => 300,
            (Kpi::Funds, Level::Low) => 75,
            (Kpi::Funds, Level::MediumLow) => 150,
            (Kpi::Funds, Level::MediumHigh) => 225,
            (Kpi::Funds, Level::High) => 300,
            (Kpi::Decentralisation, Level::Low) => 60,
            (Kpi::Decentralisation, Level::MediumLow) => 120,
            (Kpi::Decentralisation, Level::Medium) => 180,
            (Kpi::Decentralisation, Level::MediumHigh) => 240,
            (Kpi::Decentralisation, Level::High) => 300,
            _ => return None,
        };
        Some(s)
    }
}

/// A KPI level with its score, or the reason it could not be assessed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KpiResult {
    Assessed { level: Level, score_centi: u32 },
    NotAssessable { reason: String },
}

impl KpiResult {
    fn of(kpi: Kpi, level: Level) -> Self {
        KpiResult::Assessed { level, score_centi: kpi.score_centi(level).expect("level belongs to KPI") }
    }

    fn missing(reason: &str) -> Self {
        KpiResult::NotAssessable { reason: reason.to_string() }
    }

    pub fn level(&self) -> Option<Level> {
        match self {
            KpiResult::Assessed { level, .. } => Some(*level),
            KpiResult::NotAssessable { .. } => None,
        }
    }

    pub fn score_centi(&self) -> Option<u32> {
        match self {
            KpiResult::Assessed { score_centi, .. } => Some(*score_centi),
            KpiResult::NotAssessable { .. } => None,
        }
    }

    pub fn score(&self) -> Option<f64> {
        self.score_centi().map(|c| f64::from(c) / 100.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticipationMetrics {
    pub active_members: u64,
    pub total_members: u64,
    /// `active / total`, capped at 1; `None` when there are no members.
    pub rate: Option<f64>,
}

impl ParticipationMetrics {
    pub fn new(active_members: u64, total_members: u64) -> Self {
        let rate = (total_members > 0).then(|| (active_members as f64 / total_members as f64).min(1.0));
        ParticipationMetrics { active_members, total_members, rate }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreasuryMetrics {
    pub treasury_usd: Option<f64>,
    /// Circulating over total supply.
    pub circulating_pct: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VotingMetrics {
    pub approved: u64,
    pub total_proposals: u64,
    pub approval_rate: Option<f64>,
    /// Mean of per-proposal voting windows, in days.
    pub avg_duration_days: Option<f64>,
}

impl VotingMetrics {
    pub fn new(approved: u64, durations_days: &[f64]) -> Self {
        let n = durations_days.len() as u64;
        VotingMetrics {
            approved,
            total_proposals: n,
            approval_rate: (n > 0).then(|| approved as f64 / n as f64),
            avg_duration_days: (n > 0).then(|| durations_days.iter().sum::<f64>() / n as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecentralisationMetrics {
    pub largest_holder_share: Option<f64>,
    pub participation_level: Option<Level>,
    pub fully_automated: bool,
}

pub fn assess_participation(m: &ParticipationMetrics) -> KpiResult {
    let Some(rate) = m.rate else {
        return KpiResult::missing("no token holders at snapshot");
    };
    let level = if rate < PARTICIPATION_LOW {
        Level::Low
    } else if rate <= PARTICIPATION_HIGH {
        Level::Medium
    } else {
        Level::High
    };
    KpiResult::of(Kpi::Participation, level)
}

pub fn assess_funds(m: &TreasuryMetrics) -> KpiResult {
    let Some(usd) = m.treasury_usd else {
        return KpiResult::missing("no treasury valuation configured");
    };
    let level = if usd < TREASURY_LOW_USD {
        Level::Low
    } else if usd > TREASURY_HIGH_USD {
        Level::High
    } else {
        match m.circulating_pct {
            Some(c) if c <= CIRCULATION_SPLIT => Level::MediumLow,
            Some(_) => Level::MediumHigh,
            None => return KpiResult::missing("circulating share undefined for zero supply"),
        }
    };
    KpiResult::of(Kpi::Funds, level)
}

/// Durations outside 3–14 days are Low whatever the approval rate.
pub fn assess_voting(m: &VotingMetrics) -> KpiResult {
    let (Some(approval), Some(days)) = (m.approval_rate, m.avg_duration_days) else {
        return KpiResult::missing("no proposals");
    };
    let level = if approval < APPROVAL_LOW || !(DURATION_MIN_DAYS..=DURATION_MAX_DAYS).contains(&days) {
        Level::Low
    } else if approval <= APPROVAL_HIGH {
        Level::Medium
    } else {
        Level::High
    };
    KpiResult::of(Kpi::Voting, level)
}

/// In the 10–33% holder band, Low participation falls back to Medium-Low.
pub fn assess_decentralisation(m: &DecentralisationMetrics) -> KpiResult {
    let Some(share) = m.largest_holder_share else {
        return KpiResult::missing("no circulating supply");
    };
    let engaged = matches!(m.participation_level, Some(Level::Medium | Level::High));
    let level = if share >= HOLDER_LOW {
        Level::Low
    } else if share >= HOLDER_MEDIUM {
        Level::MediumLow
    } else if share >= HOLDER_HIGH {
        match (engaged, m.fully_automated) {
            (true, true) => Level::MediumHigh,
            (true, false) => Level::Medium,
            (false, _) => Level::MediumLow,
        }
    } else {
        Level::High
    };
    KpiResult::of(Kpi::Decentralisation, level)
}

/// Sum of the four scores in hundredths; `None` if any KPI is missing.
pub fn composite_centi(results: [&KpiResult; 4]) -> Option<u32> {
    results.iter().map(|r| r.score_centi()).sum()
}

pub fn composite(results: [&KpiResult; 4]) -> Option<f64> {
    composite_centi(results).map(|c| f64::from(c) / 100.0)
}

/// Raw KPI inputs kept alongside the levels, for tables and charts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiMetrics {
    pub participation: ParticipationMetrics,
    pub treasury: TreasuryMetrics,
    pub voting: VotingMetrics,
    pub decentralisation: DecentralisationMetrics,
    pub proposer_concentration: Option<f64>,
}

impl KpiMetrics {
    pub fn from_record(r: &DaoRecord) -> Self {
        let participation = ParticipationMetrics::new(r.active_members, r.total_members);
        let durations: Vec<f64> = r.proposals.iter().map(|p| p.duration_days()).collect();
        KpiMetrics {
            participation,
            treasury: TreasuryMetrics {
                treasury_usd: r.treasury_usd,
                circulating_pct: big_ratio(&r.circulating_supply, &r.total_supply),
            },
            voting: VotingMetrics::new(r.approved_count() as u64, &durations),
            decentralisation: DecentralisationMetrics {
                largest_holder_share: r.largest_holder_share,
                participation_level: assess_participation(&participation).level(),
                fully_automated: r.fully_automated,
            },
            proposer_concentration: r.proposer_concentration,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiAssessment {
    pub dao_id: String,
    pub participation: KpiResult,
    pub funds: KpiResult,
    pub voting: KpiResult,
    pub decentralisation: KpiResult,
    pub composite: Option<f64>,
    pub metrics: KpiMetrics,
}

impl KpiAssessment {
    pub fn get(&self, kpi: Kpi) -> &KpiResult {
        match kpi {
            Kpi::Participation => &self.participation,
            Kpi::Funds => &self.funds,
            Kpi::Voting => &self.voting,
            Kpi::Decentralisation => &self.decentralisation,
        }
    }
}

pub fn assess_metrics(dao_id: &str, metrics: KpiMetrics) -> KpiAssessment {
    let participation = assess_participation(&metrics.participation);
    let funds = assess_funds(&metrics.treasury);
    let voting = assess_voting(&metrics.voting);
    let decentralisation = assess_decentralisation(&metrics.decentralisation);
    KpiAssessment {
        dao_id: dao_id.to_string(),
        composite: composite([&participation, &funds, &voting, &decentralisation]),
        participation,
        funds,
        voting,
        decentralisation,
        metrics,
    }
}

pub fn assess_record(r: &DaoRecord) -> KpiAssessment {
    assess_metrics(&r.dao_id, KpiMetrics::from_record(r))
}
