mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;

use daokpi_core::kpi::{thresholds, Kpi, Level};
use daokpi_core::report::{
    analyze, build_bundle, bundle_json, emit, render_svg, Axis, ChartKind, Format, ReportBundle, CHART_DIR, KPI_TABLE,
};
use daokpi_core::synth::{corpus, SynthDao};

const SVG_NS: &str = "http://www.w3.org/2000/svg";

/// SVG 1.1 presentation attributes the renderer may use.
const PRESENTATION: &[&str] = &[
    "fill",
    "fill-opacity",
    "stroke",
    "stroke-width",
    "stroke-dasharray",
    "stroke-opacity",
    "opacity",
    "font-family",
    "font-size",
    "font-weight",
    "text-anchor",
];

/// Element-specific attributes from the SVG 1.1 element definitions.
fn element_attributes(name: &str) -> Option<&'static [&'static str]> {
    Some(match name {
        "svg" => &["version", "width", "height", "viewBox", "x", "y", "preserveAspectRatio"],
        "title" | "desc" => &[],
        "g" => &["transform"],
        "rect" => &["x", "y", "width", "height", "rx", "ry", "transform"],
        "line" => &["x1", "y1", "x2", "y2", "transform"],
        "circle" => &["cx", "cy", "r", "transform"],
        "polygon" | "polyline" => &["points", "transform"],
        "text" => &["x", "y", "dx", "dy", "rotate", "transform"],
        _ => return None,
    })
}

fn validate_svg(text: &str) -> Result<(), String> {
    if !text.starts_with("<?xml version=\"1.0\"") {
        return Err("missing XML declaration".into());
    }
    let doc = roxmltree::Document::parse(text).map_err(|e| e.to_string())?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" || root.tag_name().namespace() != Some(SVG_NS) {
        return Err("root is not an SVG element".into());
    }
    if root.attribute("version") != Some("1.1") {
        return Err("root lacks version=\"1.1\"".into());
    }
    for node in doc.descendants().filter(|n| n.is_element()) {
        let name = node.tag_name().name();
        if node.tag_name().namespace() != Some(SVG_NS) {
            return Err(format!("<{name}> outside the SVG namespace"));
        }
        let allowed = element_attributes(name).ok_or_else(|| format!("<{name}> is not an allowed SVG 1.1 element"))?;
        for a in node.attributes() {
            if a.namespace().is_some() || !(allowed.contains(&a.name()) || PRESENTATION.contains(&a.name())) {
                return Err(format!("<{name}> has attribute {}", a.name()));
            }
            if matches!(a.name(), "x" | "y" | "x1" | "x2" | "y1" | "y2" | "cx" | "cy" | "r" | "width" | "height")
                && a.value().parse::<f64>().map_or(true, |v| !v.is_finite())
            {
                return Err(format!("<{name}> {}={:?} is not a number", a.name(), a.value()));
            }
        }
    }
    Ok(())
}

fn corpus_bundle(daos: &[SynthDao]) -> ReportBundle {
    let (records, assessments) = common::pipeline::run(daos);
    let stats = analyze(&assessments, 0.05);
    build_bundle(&records, &assessments, stats, None)
}

#[test]
fn charts_are_valid_svg_1_1() {
    let bundle = corpus_bundle(&corpus(5, 10).unwrap());
    assert_eq!(bundle.charts.len(), 9);
    for c in &bundle.charts {
        validate_svg(&render_svg(&c.chart)).unwrap_or_else(|e| panic!("{}: {e}", c.name));
    }
}

#[test]
fn validator_rejects_foreign_markup() {
    let ok = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"><rect x=\"1\" y=\"2\" width=\"3\" height=\"4\"/></svg>";
    assert!(validate_svg(ok).is_ok());
    assert!(validate_svg(&ok.replace("<rect", "<foreignObject")).is_err());
    assert!(validate_svg(&ok.replace("x=\"1\"", "onclick=\"x()\"")).is_err());
    assert!(validate_svg(&ok.replace("x=\"1\"", "x=\"NaN\"")).is_err());
    assert!(validate_svg(&ok.replace(" version=\"1.1\"", "")).is_err());
}

#[test]
fn emitted_files_are_deterministic() {
    let daos = corpus(9, 10).unwrap();
    let (a, b) = (corpus_bundle(&daos), corpus_bundle(&daos));
    assert_eq!(bundle_json(&a), bundle_json(&b));
    let formats: BTreeSet<Format> = Format::ALL.into_iter().collect();
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let f1 = emit(&a, d1.path(), &formats).unwrap();
    let f2 = emit(&b, d2.path(), &formats).unwrap();
    assert_eq!(f1.len(), f2.len());
    for (p1, p2) in f1.iter().zip(&f2) {
        assert_eq!(p1.strip_prefix(d1.path()).unwrap(), p2.strip_prefix(d2.path()).unwrap());
        assert_eq!(fs::read(p1).unwrap(), fs::read(p2).unwrap(), "{}", p1.display());
    }
    let charts = fs::read_dir(d1.path().join(CHART_DIR)).unwrap().count();
    assert_eq!(charts, a.charts.len());

    let table = fs::read_to_string(d1.path().join(KPI_TABLE)).unwrap();
    let mut rdr = csv::Reader::from_reader(table.as_bytes());
    assert!(rdr.headers().unwrap().iter().any(|h| h == "dao_id"));
    assert_eq!(rdr.records().count(), daos.len());
}

#[test]
fn format_selection_limits_output() {
    let bundle = corpus_bundle(&corpus(9, 6).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let files = emit(&bundle, dir.path(), &BTreeSet::from([Format::Csv])).unwrap();
    assert!(!files.is_empty());
    assert!(files.iter().all(|p| p.extension().unwrap() == "csv"));
}

#[test]
fn scatter_thresholds_match_level_boundaries() {
    let bundle = corpus_bundle(&corpus(5, 10).unwrap());
    let lines = |name: &str| -> Vec<(Axis, f64)> {
        let c = bundle.charts.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("{name}"));
        assert_eq!(c.chart.kind, ChartKind::ScatterThreshold);
        c.chart.thresholds.iter().map(|t| (t.axis, t.value)).collect()
    };
    use thresholds::*;
    assert_eq!(lines("participation_scatter"), [(Axis::Y, PARTICIPATION_LOW), (Axis::Y, PARTICIPATION_HIGH)]);
    assert_eq!(
        lines("funds_scatter"),
        [(Axis::X, TREASURY_LOW_USD), (Axis::X, TREASURY_HIGH_USD), (Axis::Y, CIRCULATION_SPLIT)]
    );
    assert_eq!(
        lines("voting_scatter"),
        [(Axis::X, DURATION_MIN_DAYS), (Axis::X, DURATION_MAX_DAYS), (Axis::Y, APPROVAL_LOW), (Axis::Y, APPROVAL_HIGH)]
    );
    assert_eq!(
        lines("decentralisation_scatter"),
        [
            (Axis::X, HOLDER_HIGH),
            (Axis::X, HOLDER_MEDIUM),
            (Axis::X, HOLDER_LOW),
            (Axis::Y, PARTICIPATION_LOW),
            (Axis::Y, PARTICIPATION_HIGH)
        ]
    );
    assert_eq!(
        [PARTICIPATION_LOW, PARTICIPATION_HIGH, TREASURY_LOW_USD, TREASURY_HIGH_USD, CIRCULATION_SPLIT],
        [0.10, 0.40, 1e8, 1e9, 0.50]
    );
    assert_eq!([APPROVAL_LOW, APPROVAL_HIGH, DURATION_MIN_DAYS, DURATION_MAX_DAYS], [0.30, 0.70, 3.0, 14.0]);
    assert_eq!([HOLDER_HIGH, HOLDER_MEDIUM, HOLDER_LOW], [0.10, 0.33, 0.66]);
}

fn oracle_median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Summary figures recomputed from the generator's ground truth alone.
#[test]
fn summary_matches_ground_truth() {
    let daos = corpus(11, 10).unwrap();
    let bundle = corpus_bundle(&daos);
    let s = &bundle.summary;
    let truths: Vec<_> = daos.iter().map(|d| &d.truth).collect();

    assert_eq!(s.dao_count, 10);
    assert_eq!(s.totals.proposals, truths.iter().map(|t| t.proposal_count).sum::<u64>());
    assert_eq!(s.totals.members, truths.iter().map(|t| t.total_members).sum::<u64>());
    let voters: BTreeSet<_> = truths.iter().flat_map(|t| t.voters.iter()).collect();
    assert_eq!(s.totals.unique_voters, voters.len() as u64);

    let truth_level = |k: Kpi, i: usize| match k {
        Kpi::Participation => truths[i].participation,
        Kpi::Funds => truths[i].funds,
        Kpi::Voting => truths[i].voting,
        Kpi::Decentralisation => truths[i].decentralisation,
    };
    let response = |k: Kpi, i: usize| match k {
        Kpi::Participation => Some(truths[i].participation_rate),
        Kpi::Funds => Some(truths[i].treasury_usd),
        Kpi::Voting => truths[i].approval_rate,
        Kpi::Decentralisation => truths[i].proposer_concentration,
    };
    for (h, kpi) in s.histograms.iter().zip(Kpi::ALL) {
        assert_eq!(h.kpi, kpi);
        let mut expected: BTreeMap<Level, u64> = kpi.levels().iter().map(|&l| (l, 0)).collect();
        let mut missing = 0;
        for i in 0..truths.len() {
            match truth_level(kpi, i) {
                Some(l) => *expected.get_mut(&l).unwrap() += 1,
                None => missing += 1,
            }
        }
        assert_eq!(h.counts, expected.into_iter().collect::<Vec<_>>(), "{kpi:?}");
        assert_eq!(h.not_assessable, missing);

        for &level in kpi.levels() {
            let values: Vec<f64> = (0..truths.len())
                .filter(|&i| truth_level(kpi, i) == Some(level))
                .filter_map(|i| response(kpi, i))
                .collect();
            let got = s.medians.iter().find(|m| m.kpi == kpi && m.level == level.label());
            match got {
                None => assert!(values.is_empty(), "{kpi:?} {level} median missing"),
                Some(m) => {
                    assert_eq!(m.n, values.len());
                    let want = oracle_median(values);
                    assert!(
                        (m.median - want).abs() <= 1e-12 * want.abs().max(1.0),
                        "{kpi:?} {level}: {} vs {want}",
                        m.median
                    );
                }
            }
        }
    }
}
