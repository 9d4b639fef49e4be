use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::analysis::{grouped_by_level, response_metric};
use crate::kpi::{thresholds, Kpi, KpiAssessment};
use crate::stats::{box_stats, BoxStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    NotchedBox,
    ScatterThreshold,
    Radar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub axis: Axis,
    pub value: f64,
    pub label: String,
}

impl Threshold {
    fn new(axis: Axis, value: f64, label: &str) -> Self {
        Threshold { axis, value, label: label.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledBox {
    pub label: String,
    pub stats: BoxStats,
}

/// Raw material for a chart before validation and derived statistics.
///
/// For box charts each series is one category and only the `y` values
/// are used. For radar charts each series is one DAO, with `x` the axis
/// index and `y` the raw score.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChartInputs {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub axes: Vec<String>,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartData {
    pub kind: ChartKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub axes: Vec<String>,
    pub series: Vec<Series>,
    pub boxes: Vec<LabeledBox>,
    pub thresholds: Vec<Threshold>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error("chart has no data")]
    Empty,
    #[error("{dao}: {axis:?} value {value} cannot be drawn on a log axis")]
    NonPositiveLog { dao: String, axis: Axis, value: f64 },
    #[error("{dao}: non-finite value")]
    NonFinite { dao: String },
}

/// Highest score any KPI can reach; radar radii are score / RADAR_MAX.
pub const RADAR_MAX: f64 = 3.0;

pub fn make_chart(kind: ChartKind, inputs: ChartInputs, thresholds: Vec<Threshold>) -> Result<ChartData, ChartError> {
    if inputs.series.iter().all(|s| s.points.is_empty()) {
        return Err(ChartError::Empty);
    }
    for p in inputs.series.iter().flat_map(|s| &s.points) {
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(ChartError::NonFinite { dao: p.id.clone() });
        }
        for (axis, scale, v) in [(Axis::X, inputs.x_scale, p.x), (Axis::Y, inputs.y_scale, p.y)] {
            if scale == Scale::Log10 && v <= 0.0 {
                return Err(ChartError::NonPositiveLog { dao: p.id.clone(), axis, value: v });
            }
        }
    }
    let mut series = inputs.series;
    let boxes = match kind {
        ChartKind::NotchedBox => series
            .iter()
            .filter_map(|s| {
                let ys: Vec<f64> = s.points.iter().map(|p| p.y).collect();
                Some(LabeledBox { label: s.label.clone(), stats: box_stats(&ys)? })
            })
            .collect(),
        ChartKind::Radar => {
            for p in series.iter_mut().flat_map(|s| s.points.iter_mut()) {
                p.y = (p.y / RADAR_MAX).clamp(0.0, 1.0);
            }
            Vec::new()
        }
        ChartKind::ScatterThreshold => Vec::new(),
    };
    Ok(ChartData {
        kind,
        title: inputs.title,
        x_label: inputs.x_label,
        y_label: inputs.y_label,
        x_scale: inputs.x_scale,
        y_scale: inputs.y_scale,
        axes: inputs.axes,
        series,
        boxes,
        thresholds,
    })
}

fn participation_lines(axis: Axis) -> [Threshold; 2] {
    [
        Threshold::new(axis, thresholds::PARTICIPATION_LOW, "participation 10%"),
        Threshold::new(axis, thresholds::PARTICIPATION_HIGH, "participation 40%"),
    ]
}

/// Category boundaries drawn on a KPI's scatter chart.
pub fn scatter_thresholds(kpi: Kpi) -> Vec<Threshold> {
    match kpi {
        Kpi::Participation => participation_lines(Axis::Y).to_vec(),
        Kpi::Funds => vec![
            Threshold::new(Axis::X, thresholds::TREASURY_LOW_USD, "$100M"),
            Threshold::new(Axis::X, thresholds::TREASURY_HIGH_USD, "$1B"),
            Threshold::new(Axis::Y, thresholds::CIRCULATION_SPLIT, "50% circulating"),
        ],
        Kpi::Voting => vec![
            Threshold::new(Axis::X, thresholds::DURATION_MIN_DAYS, "3 days"),
            Threshold::new(Axis::X, thresholds::DURATION_MAX_DAYS, "14 days"),
            Threshold::new(Axis::Y, thresholds::APPROVAL_LOW, "approval 30%"),
            Threshold::new(Axis::Y, thresholds::APPROVAL_HIGH, "approval 70%"),
        ],
        Kpi::Decentralisation => {
            let mut t = vec![
                Threshold::new(Axis::X, thresholds::HOLDER_HIGH, "holder 10%"),
                Threshold::new(Axis::X, thresholds::HOLDER_MEDIUM, "holder 33%"),
                Threshold::new(Axis::X, thresholds::HOLDER_LOW, "holder 66%"),
            ];
            t.extend(participation_lines(Axis::Y));
            t
        }
    }
}

/// A DAO left out of a chart and why.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Omission {
    pub chart: String,
    pub dao_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedChart {
    pub name: String,
    pub chart: ChartData,
}

struct ScatterAxes {
    x_label: &'static str,
    y_label: &'static str,
    x_scale: Scale,
    x: fn(&KpiAssessment) -> Option<f64>,
    y: fn(&KpiAssessment) -> Option<f64>,
}

fn scatter_axes(kpi: Kpi) -> ScatterAxes {
    match kpi {
        Kpi::Participation => ScatterAxes {
            x_label: "total members",
            y_label: "participation rate",
            x_scale: Scale::Log10,
            x: |a| Some(a.metrics.participation.total_members as f64),
            y: |a| a.metrics.participation.rate,
        },
        Kpi::Funds => ScatterAxes {
            x_label: "treasury (USD)",
            y_label: "circulating share",
            x_scale: Scale::Log10,
            x: |a| a.metrics.treasury.treasury_usd,
            y: |a| a.metrics.treasury.circulating_pct,
        },
        Kpi::Voting => ScatterAxes {
            x_label: "mean voting window (days)",
            y_label: "approval rate",
            x_scale: Scale::Linear,
            x: |a| a.metrics.voting.avg_duration_days,
            y: |a| a.metrics.voting.approval_rate,
        },
        Kpi::Decentralisation => ScatterAxes {
            x_label: "largest holder share",
            y_label: "participation rate",
            x_scale: Scale::Linear,
            x: |a| a.metrics.decentralisation.largest_holder_share,
            y: |a| a.metrics.participation.rate,
        },
    }
}

fn omit(out: &mut Vec<Omission>, chart: &str, dao: &str, reason: impl Into<String>) {
    out.push(Omission { chart: chart.to_string(), dao_id: dao.to_string(), reason: reason.into() });
}

/// Scatter of a KPI's two defining metrics, coloured by assessed level.
pub fn kpi_scatter(kpi: Kpi, assessments: &[KpiAssessment], omissions: &mut Vec<Omission>) -> Option<NamedChart> {
    let name = format!("{}_scatter", kpi.name());
    let axes = scatter_axes(kpi);
    let mut series: Vec<Series> =
        kpi.levels().iter().map(|l| Series { label: l.label().to_string(), points: Vec::new() }).collect();
    for a in assessments {
        let Some(level) = a.get(kpi).level() else {
            omit(omissions, &name, &a.dao_id, format!("{} not assessable", kpi.name()));
            continue;
        };
        let (Some(x), Some(y)) = ((axes.x)(a), (axes.y)(a)) else {
            omit(omissions, &name, &a.dao_id, "metric missing");
            continue;
        };
        if axes.x_scale == Scale::Log10 && x <= 0.0 {
            omit(omissions, &name, &a.dao_id, format!("{} is {x}; log axis needs a positive value", axes.x_label));
            continue;
        }
        let idx = kpi.levels().iter().position(|l| *l == level).expect("level of KPI");
        series[idx].points.push(Point { id: a.dao_id.clone(), x, y });
    }
    let inputs = ChartInputs {
        title: format!("{}: {} vs {}", kpi.name(), axes.y_label, axes.x_label),
        x_label: axes.x_label.into(),
        y_label: axes.y_label.into(),
        x_scale: axes.x_scale,
        y_scale: Scale::Linear,
        axes: Vec::new(),
        series,
    };
    make_chart(ChartKind::ScatterThreshold, inputs, scatter_thresholds(kpi))
        .ok()
        .map(|chart| NamedChart { name, chart })
}

/// Notched box plot of the KPI's response metric per category.
pub fn kpi_box(kpi: Kpi, assessments: &[KpiAssessment], omissions: &mut Vec<Omission>) -> Option<NamedChart> {
    let name = format!("{}_box", kpi.name());
    for a in assessments {
        if a.get(kpi).level().is_none() {
            omit(omissions, &name, &a.dao_id, format!("{} not assessable", kpi.name()));
        } else if super::analysis::response_value(kpi, a).is_none() {
            omit(omissions, &name, &a.dao_id, format!("{} missing", response_metric(kpi)));
        }
    }
    let groups = grouped_by_level(kpi, assessments);
    let metric = response_metric(kpi);
    let log = kpi == Kpi::Funds;
    let series = groups
        .groups
        .into_iter()
        .map(|(label, values)| Series {
            label,
            points: values.into_iter().map(|y| Point { id: String::new(), x: 0.0, y }).collect(),
        })
        .collect();
    let inputs = ChartInputs {
        title: format!("{}: {} by category", kpi.name(), metric),
        x_label: format!("{} category", kpi.name()),
        y_label: metric.to_string(),
        x_scale: Scale::Linear,
        y_scale: if log { Scale::Log10 } else { Scale::Linear },
        axes: Vec::new(),
        series,
    };
    match make_chart(ChartKind::NotchedBox, inputs.clone(), Vec::new()) {
        Ok(chart) => Some(NamedChart { name, chart }),
        // Zero treasuries cannot sit on a log axis; fall back to linear.
        Err(ChartError::NonPositiveLog { .. }) => {
            make_chart(ChartKind::NotchedBox, ChartInputs { y_scale: Scale::Linear, ..inputs }, Vec::new())
                .ok()
                .map(|chart| NamedChart { name, chart })
        }
        Err(_) => None,
    }
}

/// Radar of the four KPI scores for the listed DAOs, in list order.
pub fn radar(dao_ids: &[String], assessments: &[KpiAssessment], omissions: &mut Vec<Omission>) -> Option<NamedChart> {
    let name = "composite_radar".to_string();
    let mut series = Vec::new();
    for id in dao_ids {
        let Some(a) = assessments.iter().find(|a| &a.dao_id == id) else {
            omit(omissions, &name, id, "unknown DAO");
            continue;
        };
        let scores: Option<Vec<f64>> = Kpi::ALL.iter().map(|&k| a.get(k).score()).collect();
        match scores {
            Some(s) => series.push(Series {
                label: id.clone(),
                points: s.into_iter().enumerate().map(|(i, y)| Point { id: id.clone(), x: i as f64, y }).collect(),
            }),
            None => omit(omissions, &name, id, "not every KPI assessable"),
        }
    }
    let inputs = ChartInputs {
        title: "KPI scores".into(),
        axes: Kpi::ALL.iter().map(|k| k.name().to_string()).collect(),
        series,
        ..Default::default()
    };
    make_chart(ChartKind::Radar, inputs, Vec::new()).ok().map(|chart| NamedChart { name, chart })
}
