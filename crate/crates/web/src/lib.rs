//! Browser bindings: KPI classification, test selection and box charts.

use daokpi_core::kpi::{
    assess_metrics, assess_participation, DecentralisationMetrics, KpiMetrics, ParticipationMetrics, TreasuryMetrics,
    VotingMetrics,
};
use daokpi_core::report::{make_chart, radar, render_svg, ChartInputs, ChartKind, Point, Scale, Series};
use daokpi_core::stats::{select_test, GroupedSamples};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::wasm_bindgen;

/// Form fields of the classification panel.
#[derive(Debug, Clone, Deserialize)]
pub struct DaoInputs {
    pub active_members: u64,
    pub total_members: u64,
    pub treasury_usd: Option<f64>,
    pub circulating_pct: Option<f64>,
    pub approved: u64,
    pub total_proposals: u64,
    pub avg_duration_days: Option<f64>,
    pub largest_holder_share: Option<f64>,
    #[serde(default)]
    pub fully_automated: bool,
}

#[derive(Serialize)]
struct Classified {
    assessment: daokpi_core::kpi::KpiAssessment,
    radar_svg: Option<String>,
}

fn metrics(i: &DaoInputs) -> KpiMetrics {
    let participation = ParticipationMetrics::new(i.active_members, i.total_members);
    let n = i.total_proposals;
    KpiMetrics {
        participation,
        treasury: TreasuryMetrics { treasury_usd: i.treasury_usd, circulating_pct: i.circulating_pct },
        voting: VotingMetrics {
            approved: i.approved,
            total_proposals: n,
            approval_rate: (n > 0).then(|| i.approved as f64 / n as f64),
            avg_duration_days: if n > 0 { i.avg_duration_days } else { None },
        },
        decentralisation: DecentralisationMetrics {
            largest_holder_share: i.largest_holder_share,
            participation_level: assess_participation(&participation).level(),
            fully_automated: i.fully_automated,
        },
        proposer_concentration: None,
    }
}

/// Classifies one DAO from a JSON object of [`DaoInputs`]. Returns the
/// assessment and, when all four KPIs are assessable, a radar chart.
#[wasm_bindgen]
pub fn classify(inputs_json: &str) -> Result<String, String> {
    let inputs: DaoInputs = serde_json::from_str(inputs_json).map_err(|e| e.to_string())?;
    if inputs.approved > inputs.total_proposals {
        return Err("approved proposals exceed the total".into());
    }
    let assessment = assess_metrics("dao", metrics(&inputs));
    let radar_svg =
        radar(&["dao".to_string()], std::slice::from_ref(&assessment), &mut Vec::new()).map(|c| render_svg(&c.chart));
    serde_json::to_string(&Classified { assessment, radar_svg }).map_err(|e| e.to_string())
}

/// One group per non-empty line, values separated by commas or whitespace.
pub fn parse_groups(text: &str) -> Result<GroupedSamples, String> {
    let mut groups = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (label, body) = match line.split_once(':') {
            Some((l, b)) => (l.trim().to_string(), b),
            None => (format!("group {}", groups.len() + 1), line),
        };
        let values = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| format!("line {}: bad number {t:?}", lineno + 1))
            })
            .collect::<Result<Vec<f64>, String>>()?;
        groups.push((label, values));
    }
    if groups.len() < 2 {
        return Err("enter at least two groups".into());
    }
    Ok(GroupedSamples::new(groups))
}

/// Runs the normality and variance gates, the chosen omnibus test and,
/// when warranted, Dunn's post-hoc comparisons.
#[wasm_bindgen]
pub fn compare_groups(groups_text: &str, alpha: f64) -> Result<String, String> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    let groups = parse_groups(groups_text)?;
    if groups.groups.iter().any(|(_, v)| v.is_empty()) {
        return Err("every group needs at least one value".into());
    }
    let plan = select_test(&groups, alpha).map_err(|e| e.to_string())?;
    serde_json::to_string(&plan).map_err(|e| e.to_string())
}

/// Notched box plot of the groups as an SVG document.
#[wasm_bindgen]
pub fn box_chart(groups_text: &str, log_scale: bool) -> Result<String, String> {
    let groups = parse_groups(groups_text)?;
    let series = groups
        .groups
        .into_iter()
        .map(|(label, values)| Series {
            label,
            points: values.into_iter().map(|y| Point { id: String::new(), x: 0.0, y }).collect(),
        })
        .collect();
    let inputs = ChartInputs {
        title: "groups".into(),
        x_label: "group".into(),
        y_label: "value".into(),
        x_scale: Scale::Linear,
        y_scale: if log_scale { Scale::Log10 } else { Scale::Linear },
        axes: Vec::new(),
        series,
    };
    let chart = make_chart(ChartKind::NotchedBox, inputs, Vec::new()).map_err(|e| e.to_string())?;
    Ok(render_svg(&chart))
}
