use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::analysis::{correlations, grouped_by_level, response_metric, CorrelationResult};
use crate::harmonize::DaoRecord;
use crate::kpi::{Kpi, KpiAssessment, Level};
use crate::primitives::Address;
use crate::stats::median;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Totals {
    pub proposals: u64,
    /// Distinct (chain, address) pairs that voted anywhere.
    pub unique_voters: u64,
    pub members: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelHistogram {
    pub kpi: Kpi,
    pub counts: Vec<(Level, u64)>,
    pub not_assessable: u64,
}

impl LevelHistogram {
    pub fn assessed(&self) -> u64 {
        self.counts.iter().map(|(_, c)| c).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryMedian {
    pub kpi: Kpi,
    pub level: String,
    pub metric: String,
    pub n: usize,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcosystemSummary {
    pub dao_count: usize,
    pub totals: Totals,
    pub histograms: Vec<LevelHistogram>,
    pub medians: Vec<CategoryMedian>,
    pub correlations: Vec<CorrelationResult>,
}

pub fn level_histogram(kpi: Kpi, assessments: &[KpiAssessment]) -> LevelHistogram {
    let mut counts: BTreeMap<Level, u64> = kpi.levels().iter().map(|&l| (l, 0)).collect();
    let mut not_assessable = 0;
    for a in assessments {
        match a.get(kpi).level() {
            Some(l) => *counts.entry(l).or_default() += 1,
            None => not_assessable += 1,
        }
    }
    LevelHistogram { kpi, counts: counts.into_iter().collect(), not_assessable }
}

pub fn summarize_ecosystem(records: &[DaoRecord], assessments: &[KpiAssessment]) -> EcosystemSummary {
    let voters: BTreeSet<(u64, Address)> =
        records.iter().flat_map(|r| r.voters.iter().map(move |v| (r.chain_id, *v))).collect();
    let totals = Totals {
        proposals: records.iter().map(|r| r.proposals.len() as u64).sum(),
        unique_voters: voters.len() as u64,
        members: records.iter().map(|r| r.total_members).sum(),
    };
    let medians = Kpi::ALL
        .iter()
        .flat_map(|&kpi| {
            grouped_by_level(kpi, assessments).groups.into_iter().map(move |(level, values)| CategoryMedian {
                kpi,
                level,
                metric: response_metric(kpi).to_string(),
                n: values.len(),
                median: median(&values),
            })
        })
        .collect();
    EcosystemSummary {
        dao_count: records.len().max(assessments.len()),
        totals,
        histograms: Kpi::ALL.iter().map(|&k| level_histogram(k, assessments)).collect(),
        medians,
        correlations: correlations(assessments),
    }
}
