//! The 40-case KPI boundary table in `fixtures/kpi_boundaries.json`, with
//! hand-assigned levels and scores.

use daokpi_core::kpi::{
    assess_decentralisation, assess_funds, assess_participation, assess_voting, DecentralisationMetrics, KpiResult,
    Level, ParticipationMetrics, TreasuryMetrics, VotingMetrics,
};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Deserialize)]
pub struct Case {
    pub id: u32,
    pub kpi: String,
    pub case: String,
    pub inputs: Value,
    pub level: Option<Level>,
    pub score: Option<f64>,
}

pub fn cases() -> Vec<Case> {
    serde_json::from_str(include_str!("../fixtures/kpi_boundaries.json")).expect("boundary table parses")
}

fn u(v: &Value, k: &str) -> u64 {
    v[k].as_u64().unwrap_or_else(|| panic!("field {k}"))
}

fn f(v: &Value, k: &str) -> Option<f64> {
    v[k].as_f64()
}

pub fn evaluate(c: &Case) -> KpiResult {
    let v = &c.inputs;
    match c.kpi.as_str() {
        "participation" => {
            assess_participation(&ParticipationMetrics::new(u(v, "active_members"), u(v, "total_members")))
        }
        "funds" => assess_funds(&TreasuryMetrics {
            treasury_usd: f(v, "treasury_usd"),
            circulating_pct: f(v, "circulating_pct"),
        }),
        "voting" => {
            let (approved, n) = (u(v, "approved"), u(v, "total_proposals"));
            assess_voting(&VotingMetrics {
                approved,
                total_proposals: n,
                approval_rate: (n > 0).then(|| approved as f64 / n as f64),
                avg_duration_days: f(v, "avg_duration_days"),
            })
        }
        "decentralisation" => assess_decentralisation(&DecentralisationMetrics {
            largest_holder_share: f(v, "largest_holder_share"),
            participation_level: serde_json::from_value(v["participation_level"].clone()).expect("level"),
            fully_automated: v["fully_automated"].as_bool().expect("flag"),
        }),
        other => panic!("unknown KPI {other}"),
    }
}

/// Whether the classifier's level and score match the hand-assigned ones.
pub fn agrees(c: &Case, r: &KpiResult) -> bool {
    r.level() == c.level && r.score_centi() == c.score.map(|s| (s * 100.0).round() as u32)
}
