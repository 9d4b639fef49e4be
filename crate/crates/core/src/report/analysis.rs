use serde::{Deserialize, Serialize};

use crate::kpi::{Kpi, KpiAssessment};
use crate::stats::{pearson, select_test, spearman, GroupedSamples, TestPlan, TestResult};

/// The per-DAO quantity compared across a KPI's categories.
pub fn response_metric(kpi: Kpi) -> &'static str {
    match kpi {
        Kpi::Participation => "participation_rate",
        Kpi::Funds => "treasury_usd",
        Kpi::Voting => "approval_rate",
        Kpi::Decentralisation => "proposer_concentration",
    }
}

pub fn response_value(kpi: Kpi, a: &KpiAssessment) -> Option<f64> {
    let m = &a.metrics;
    match kpi {
        Kpi::Participation => m.participation.rate,
        Kpi::Funds => m.treasury.treasury_usd,
        Kpi::Voting => m.voting.approval_rate,
        Kpi::Decentralisation => m.proposer_concentration,
    }
}

/// Response values grouped by assessed level, lowest level first. Empty
/// levels are left out.
pub fn grouped_by_level(kpi: Kpi, assessments: &[KpiAssessment]) -> GroupedSamples {
    let groups = kpi
        .levels()
        .iter()
        .filter_map(|&level| {
            let values: Vec<f64> = assessments
                .iter()
                .filter(|a| a.get(kpi).level() == Some(level))
                .filter_map(|a| response_value(kpi, a))
                .filter(|v| v.is_finite())
                .collect();
            (!values.is_empty()).then(|| (level.label().to_string(), values))
        })
        .collect();
    GroupedSamples::new(groups)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiComparison {
    pub kpi: Kpi,
    pub metric: String,
    pub groups: GroupedSamples,
    pub plan: Option<TestPlan>,
    /// Why no test was run, when `plan` is absent.
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub x: String,
    pub y: String,
    pub n: usize,
    pub pearson: Option<TestResult>,
    pub spearman: Option<TestResult>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub alpha: f64,
    pub comparisons: Vec<KpiComparison>,
    pub correlations: Vec<CorrelationResult>,
}

pub fn compare_kpi(kpi: Kpi, assessments: &[KpiAssessment], alpha: f64) -> KpiComparison {
    let groups = grouped_by_level(kpi, assessments);
    let (plan, skipped) = if groups.k() < 2 {
        (None, Some(format!("{} populated categories; at least 2 needed", groups.k())))
    } else {
        match select_test(&groups, alpha) {
            Ok(plan) => (Some(plan), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    KpiComparison { kpi, metric: response_metric(kpi).to_string(), groups, plan, skipped }
}

type Extract = fn(&KpiAssessment) -> Option<f64>;

const PAIRS: [(&str, Extract, &str, Extract); 4] = [
    (
        "total_members",
        |a| Some(a.metrics.participation.total_members as f64),
        "participation_rate",
        |a| a.metrics.participation.rate,
    ),
    ("treasury_usd", |a| a.metrics.treasury.treasury_usd, "circulating_pct", |a| a.metrics.treasury.circulating_pct),
    ("avg_duration_days", |a| a.metrics.voting.avg_duration_days, "approval_rate", |a| a.metrics.voting.approval_rate),
    (
        "largest_holder_share",
        |a| a.metrics.decentralisation.largest_holder_share,
        "participation_rate",
        |a| a.metrics.participation.rate,
    ),
];

pub fn correlations(assessments: &[KpiAssessment]) -> Vec<CorrelationResult> {
    PAIRS
        .iter()
        .map(|&(xn, fx, yn, fy)| {
            let (x, y): (Vec<f64>, Vec<f64>) = assessments
                .iter()
                .filter_map(|a| Some((fx(a)?, fy(a)?)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .unzip();
            let p = pearson(&x, &y);
            let s = spearman(&x, &y);
            let note = p.as_ref().err().or(s.as_ref().err()).map(ToString::to_string);
            CorrelationResult { x: xn.into(), y: yn.into(), n: x.len(), pearson: p.ok(), spearman: s.ok(), note }
        })
        .collect()
}

/// Category comparisons for all four KPIs plus the cross-metric correlations.
pub fn analyze(assessments: &[KpiAssessment], alpha: f64) -> StatReport {
    StatReport {
        alpha,
        comparisons: Kpi::ALL.iter().map(|&k| compare_kpi(k, assessments, alpha)).collect(),
        correlations: correlations(assessments),
    }
}
