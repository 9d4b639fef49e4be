//! Comparison against scipy / scikit-posthocs outputs recorded in
//! `fixtures/stats_oracle.json` (regenerate with `gen_stats_oracle.py`).

use daokpi_core::stats::{
    anova_oneway, dunn_posthoc, kruskal_wallis, levene, pearson, shapiro_wilk, spearman, Adjust, Center,
    GroupedSamples, StatsError, TestResult,
};
use serde_json::Value;

pub const STAT_TOL: f64 = 1e-6;
pub const P_TOL: f64 = 1e-4;
pub const MIN_FIXTURES: usize = 20;

pub const SUITES: [&str; 8] =
    ["shapiro", "levene_mean", "levene_median", "anova", "kruskal", "dunn", "pearson", "spearman"];

pub fn oracle() -> Value {
    serde_json::from_str(include_str!("../fixtures/stats_oracle.json")).unwrap()
}

pub fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

pub fn grouped(v: &Value) -> GroupedSamples {
    let gs: Vec<Vec<f64>> = v.as_array().unwrap().iter().map(floats).collect();
    let refs: Vec<&[f64]> = gs.iter().map(Vec::as_slice).collect();
    GroupedSamples::from_values(&refs)
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap()
}

pub fn check(name: &str, got: Result<TestResult, StatsError>, case: &Value) -> Result<(), String> {
    let got = got.map_err(|e| format!("{name}: {e}"))?;
    let (ws, wp) = (num(case, "statistic"), num(case, "p_value"));
    if (got.statistic - ws).abs() > STAT_TOL {
        return Err(format!("{name}: statistic {} vs {ws}", got.statistic));
    }
    if (got.p_value - wp).abs() > P_TOL {
        return Err(format!("{name}: p {} vs {wp}", got.p_value));
    }
    Ok(())
}

fn check_dunn(name: &str, case: &Value) -> Result<(), String> {
    let got = dunn_posthoc(&grouped(&case["groups"]), Adjust::Bonferroni).map_err(|e| format!("{name}: {e}"))?;
    let want = case["pairs"].as_array().unwrap();
    if got.len() != want.len() {
        return Err(format!("{name}: {} pairs vs {}", got.len(), want.len()));
    }
    for (g, w) in got.iter().zip(want) {
        let (a, b) = (format!("g{}", w["a"].as_u64().unwrap() + 1), format!("g{}", w["b"].as_u64().unwrap() + 1));
        if g.a != a || g.b != b {
            return Err(format!("{name}: pair {}-{} vs {a}-{b}", g.a, g.b));
        }
        if (g.z.abs() - num(w, "z_abs")).abs() > STAT_TOL
            || (g.p_unadjusted - num(w, "p_unadjusted")).abs() > P_TOL
            || (g.p_adjusted - num(w, "p_adjusted")).abs() > P_TOL
        {
            return Err(format!("{name}: {a} vs {b} differs"));
        }
    }
    Ok(())
}

/// Checks one fixture of `suite`.
pub fn check_case(suite: &str, i: usize, c: &Value) -> Result<(), String> {
    let name = format!("{suite}[{i}]");
    match suite {
        "shapiro" => check(&name, shapiro_wilk(&floats(&c["x"])), c),
        "levene_mean" => check(&name, levene(&grouped(&c["groups"]), Center::Mean), c),
        "levene_median" => check(&name, levene(&grouped(&c["groups"]), Center::Median), c),
        "anova" => check(&name, anova_oneway(&grouped(&c["groups"])), c),
        "kruskal" => check(&name, kruskal_wallis(&grouped(&c["groups"])), c),
        "dunn" => check_dunn(&name, c),
        "pearson" => check(&name, pearson(&floats(&c["x"]), &floats(&c["y"])), c),
        "spearman" => check(&name, spearman(&floats(&c["x"]), &floats(&c["y"])), c),
        _ => Err(format!("unknown suite {suite}")),
    }
}

/// Runs every fixture of `suite`; returns the fixture count.
pub fn check_suite(o: &Value, suite: &str) -> Result<usize, String> {
    let cases = o[suite].as_array().ok_or_else(|| format!("{suite}: no fixtures"))?;
    if cases.len() < MIN_FIXTURES {
        return Err(format!("{suite}: only {} fixtures", cases.len()));
    }
    for (i, c) in cases.iter().enumerate() {
        check_case(suite, i, c)?;
    }
    Ok(cases.len())
}
