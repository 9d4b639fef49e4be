use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::format::{round_json, sig6};
use super::svg::render_svg;
use super::ReportBundle;
use crate::kpi::{Kpi, KpiResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Csv, Format::Json, Format::Svg];
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown output format '{other}' (expected csv, json or svg)")),
        }
    }
}

pub const BUNDLE_FILE: &str = "bundle.json";
pub const KPI_TABLE: &str = "dao_kpis.csv";
pub const HISTOGRAM_TABLE: &str = "level_histograms.csv";
pub const OMISSIONS_TABLE: &str = "omissions.csv";
pub const CHART_DIR: &str = "charts";

fn opt(v: Option<f64>) -> String {
    v.map(sig6).unwrap_or_default()
}

fn level_cells(r: &KpiResult) -> [String; 2] {
    match r {
        KpiResult::Assessed { level, score_centi } => {
            [level.label().to_string(), sig6(f64::from(*score_centi) / 100.0)]
        }
        KpiResult::NotAssessable { .. } => [String::new(), String::new()],
    }
}

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

fn write_kpi_table(b: &ReportBundle, path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec!["dao_id".to_string()];
    for k in Kpi::ALL {
        header.push(format!("{}_level", k.name()));
        header.push(format!("{}_score", k.name()));
    }
    header.extend(
        [
            "composite",
            "total_members",
            "active_members",
            "participation_rate",
            "treasury_usd",
            "circulating_pct",
            "total_proposals",
            "approved",
            "approval_rate",
            "avg_duration_days",
            "largest_holder_share",
            "fully_automated",
            "proposer_concentration",
        ]
        .map(String::from),
    );
    w.write_record(&header).map_err(csv_err)?;
    for a in &b.assessments {
        let m = &a.metrics;
        let mut row = vec![a.dao_id.clone()];
        for k in Kpi::ALL {
            row.extend(level_cells(a.get(k)));
        }
        row.extend([
            opt(a.composite),
            m.participation.total_members.to_string(),
            m.participation.active_members.to_string(),
            opt(m.participation.rate),
            opt(m.treasury.treasury_usd),
            opt(m.treasury.circulating_pct),
            m.voting.total_proposals.to_string(),
            m.voting.approved.to_string(),
            opt(m.voting.approval_rate),
            opt(m.voting.avg_duration_days),
            opt(m.decentralisation.largest_holder_share),
            m.decentralisation.fully_automated.to_string(),
            opt(m.proposer_concentration),
        ]);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()
}

fn write_histograms(b: &ReportBundle, path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["kpi", "level", "count"]).map_err(csv_err)?;
    for h in &b.summary.histograms {
        for (level, count) in &h.counts {
            w.write_record([h.kpi.name(), level.label(), &count.to_string()]).map_err(csv_err)?;
        }
        w.write_record([h.kpi.name(), "not_assessable", &h.not_assessable.to_string()]).map_err(csv_err)?;
    }
    w.flush()
}

fn write_omissions(b: &ReportBundle, path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["chart", "dao_id", "reason"]).map_err(csv_err)?;
    let sorted: BTreeSet<_> = b.omissions.iter().collect();
    for o in sorted {
        w.write_record([&o.chart, &o.dao_id, &o.reason]).map_err(csv_err)?;
    }
    w.flush()
}

/// The bundle as pretty JSON with floats at 6 significant digits.
pub fn bundle_json(b: &ReportBundle) -> String {
    let mut v = serde_json::to_value(b).expect("bundle serialises");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serialises");
    s.push('\n');
    s
}

/// Writes the requested formats under `dir` and returns the files written,
/// in write order.
pub fn emit(b: &ReportBundle, dir: &Path, formats: &BTreeSet<Format>) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if formats.contains(&Format::Csv) {
        for (name, f) in [
            (KPI_TABLE, write_kpi_table as fn(&ReportBundle, &Path) -> io::Result<()>),
            (HISTOGRAM_TABLE, write_histograms),
            (OMISSIONS_TABLE, write_omissions),
        ] {
            let path = dir.join(name);
            f(b, &path)?;
            written.push(path);
        }
    }
    if formats.contains(&Format::Json) {
        let path = dir.join(BUNDLE_FILE);
        fs::write(&path, bundle_json(b))?;
        written.push(path);
    }
    if formats.contains(&Format::Svg) {
        let charts = dir.join(CHART_DIR);
        fs::create_dir_all(&charts)?;
        for c in &b.charts {
            let path = charts.join(format!("{}.svg", c.name));
            fs::write(&path, render_svg(&c.chart))?;
            written.push(path);
        }
    }
    Ok(written)
}
