//! Test selection on constructed groups against the gate outcomes recorded
//! in `fixtures/gate_fixtures.json` (regenerate with `gen_gate_fixtures.py`).

use daokpi_core::stats::{select_test, GateStatus, OmnibusTest};
use serde_json::Value;

use super::oracle::{floats, grouped, P_TOL, STAT_TOL};

pub fn fixtures() -> Value {
    serde_json::from_str(include_str!("../fixtures/gate_fixtures.json")).unwrap()
}

fn gate(p: f64, alpha: f64) -> GateStatus {
    if p >= alpha {
        GateStatus::Passed
    } else {
        GateStatus::Failed
    }
}

pub fn check_case(c: &Value, alpha: f64) -> Result<(), String> {
    let name = c["name"].as_str().unwrap();
    let plan = select_test(&grouped(&c["groups"]), alpha).map_err(|e| format!("{name}: {e}"))?;
    for (check, p) in plan.normality.iter().zip(floats(&c["shapiro_p"])) {
        if check.status != gate(p, alpha) {
            return Err(format!("{name}: {} normality {:?}, oracle p {p}", check.label, check.status));
        }
    }
    let lev = c["levene_p"].as_f64().unwrap();
    if plan.levene_status != gate(lev, alpha) {
        return Err(format!("{name}: Levene {:?}, oracle p {lev}", plan.levene_status));
    }
    let want = match c["chosen"].as_str().unwrap() {
        "anova" => OmnibusTest::Anova,
        _ => OmnibusTest::KruskalWallis,
    };
    if plan.chosen != want {
        return Err(format!("{name}: chose {:?}, expected {want:?}", plan.chosen));
    }
    let (ws, wp) = (c["statistic"].as_f64().unwrap(), c["p_value"].as_f64().unwrap());
    if (plan.omnibus.statistic - ws).abs() > STAT_TOL * ws.abs().max(1.0) || (plan.omnibus.p_value - wp).abs() > P_TOL {
        return Err(format!("{name}: omnibus {:?} vs ({ws}, {wp})", plan.omnibus));
    }
    if plan.posthoc.is_some() != c["dunn"].as_bool().unwrap() {
        return Err(format!(
            "{name}: Dunn {} with p {} over {} groups",
            plan.posthoc.is_some(),
            plan.omnibus.p_value,
            plan.normality.len()
        ));
    }
    Ok(())
}

/// Returns the number of cases checked.
pub fn check_all() -> Result<usize, String> {
    let f = fixtures();
    let alpha = f["alpha"].as_f64().unwrap();
    let cases = f["cases"].as_array().unwrap();
    for c in cases {
        check_case(c, alpha)?;
    }
    let kinds: Vec<&str> = cases.iter().map(|c| c["chosen"].as_str().unwrap()).collect();
    if !kinds.contains(&"anova") || !kinds.contains(&"kruskal_wallis") {
        return Err("fixtures do not exercise both tests".into());
    }
    Ok(cases.len())
}
