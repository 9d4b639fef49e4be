//! Cross-DAO summaries, statistical comparisons, charts and file export.

mod analysis;
mod chart;
mod emit;
mod format;
mod summary;
mod svg;

use serde::{Deserialize, Serialize};

pub use analysis::{
    analyze, compare_kpi, correlations, grouped_by_level, response_metric, response_value, CorrelationResult,
    KpiComparison, StatReport,
};
pub use chart::{
    kpi_box, kpi_scatter, make_chart, radar, scatter_thresholds, Axis, ChartData, ChartError, ChartInputs, ChartKind,
    LabeledBox, NamedChart, Omission, Point, Scale, Series, Threshold, RADAR_MAX,
};
pub use emit::{bundle_json, emit, Format, BUNDLE_FILE, CHART_DIR, HISTOGRAM_TABLE, KPI_TABLE, OMISSIONS_TABLE};
pub use format::{round6, round_json, sig6};
pub use summary::{level_histogram, summarize_ecosystem, CategoryMedian, EcosystemSummary, LevelHistogram, Totals};
pub use svg::render_svg;

use crate::harmonize::DaoRecord;
use crate::kpi::{Kpi, KpiAssessment};

pub const BUNDLE_SCHEMA_VERSION: u32 = 1;

/// Radar charts show at most this many DAOs when no list is given.
pub const DEFAULT_RADAR_DAOS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub schema_version: u32,
    pub summary: EcosystemSummary,
    pub assessments: Vec<KpiAssessment>,
    pub stats: StatReport,
    pub charts: Vec<NamedChart>,
    pub omissions: Vec<Omission>,
}

/// Assembles everything the report stage writes. Without an explicit
/// `radar_daos` list the first DAOs (by id) with all four KPIs assessed
/// are used.
pub fn build_bundle(
    records: &[DaoRecord],
    assessments: &[KpiAssessment],
    stats: StatReport,
    radar_daos: Option<&[String]>,
) -> ReportBundle {
    let mut assessments = assessments.to_vec();
    assessments.sort_by(|a, b| a.dao_id.cmp(&b.dao_id));
    let mut records = records.to_vec();
    records.sort_by(|a, b| a.dao_id.cmp(&b.dao_id));

    let mut omissions = Vec::new();
    let mut charts = Vec::new();
    for kpi in Kpi::ALL {
        charts.extend(kpi_scatter(kpi, &assessments, &mut omissions));
        charts.extend(kpi_box(kpi, &assessments, &mut omissions));
    }
    let default_radar: Vec<String> = assessments
        .iter()
        .filter(|a| a.composite.is_some())
        .take(DEFAULT_RADAR_DAOS)
        .map(|a| a.dao_id.clone())
        .collect();
    charts.extend(radar(radar_daos.unwrap_or(&default_radar), &assessments, &mut omissions));
    omissions.sort();

    ReportBundle {
        schema_version: BUNDLE_SCHEMA_VERSION,
        summary: summarize_ecosystem(&records, &assessments),
        assessments,
        stats,
        charts,
        omissions,
    }
}
