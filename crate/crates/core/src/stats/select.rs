use serde::{Deserialize, Serialize};

use super::compare::{anova_oneway, dunn_posthoc, kruskal_wallis, levene, Adjust, Center, PairwiseResult};
use super::shapiro::shapiro_wilk;
use super::{GroupedSamples, StatsError, TestResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateStatus {
    Passed,
    Failed,
    /// Fewer than 3 observations; the group does not vote on normality.
    Unassessed,
    /// Constant group, counted as a normality failure.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityCheck {
    pub label: String,
    pub n: usize,
    pub status: GateStatus,
    pub result: Option<TestResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmnibusTest {
    Anova,
    KruskalWallis,
}

/// Which comparison was run and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestPlan {
    pub alpha: f64,
    pub normality: Vec<NormalityCheck>,
    pub levene: Option<TestResult>,
    pub levene_status: GateStatus,
    pub chosen: OmnibusTest,
    /// The decision rule that selected `chosen`.
    pub rule: String,
    pub omnibus: TestResult,
    pub posthoc: Option<Vec<PairwiseResult>>,
}

/// Normality per group (Shapiro–Wilk) and homogeneity across groups
/// (Levene, mean-centred). ANOVA runs only when every assessed group is
/// normal and variances are homogeneous at `alpha`; otherwise
/// Kruskal–Wallis. A significant omnibus result over 3+ groups adds Dunn's
/// test with Bonferroni correction.
pub fn select_test(g: &GroupedSamples, alpha: f64) -> Result<TestPlan, StatsError> {
    if g.k() < 2 {
        return Err(StatsError::TooFewGroups { test: "test selection", needed: 2, got: g.k() });
    }
    let normality: Vec<NormalityCheck> = g
        .groups
        .iter()
        .map(|(label, x)| {
            let (status, result) = match shapiro_wilk(x) {
                Ok(r) if r.p_value >= alpha => (GateStatus::Passed, Some(r)),
                Ok(r) => (GateStatus::Failed, Some(r)),
                Err(StatsError::Degenerate { .. }) => (GateStatus::Degenerate, None),
                Err(_) => (GateStatus::Unassessed, None),
            };
            NormalityCheck { label: label.clone(), n: x.len(), status, result }
        })
        .collect();

    // Levene needs two observations per group; smaller groups sit it out.
    let spread = GroupedSamples::new(g.groups.iter().filter(|(_, x)| x.len() >= 2).cloned().collect());
    let levene_result = if spread.k() >= 2 { levene(&spread, Center::Mean).ok() } else { None };
    let levene_status = match &levene_result {
        Some(r) if r.p_value >= alpha => GateStatus::Passed,
        Some(_) => GateStatus::Failed,
        None => GateStatus::Unassessed,
    };

    let assessed = normality.iter().filter(|c| c.status != GateStatus::Unassessed).count();
    let all_normal = normality.iter().all(|c| matches!(c.status, GateStatus::Passed | GateStatus::Unassessed));
    let (chosen, rule) = if assessed == 0 {
        (OmnibusTest::KruskalWallis, "normality could not be assessed in any group; ANOVA not used")
    } else if !all_normal {
        (
            OmnibusTest::KruskalWallis,
            "Shapiro-Wilk p < alpha in at least one group: data deviate from normality; ANOVA not used",
        )
    } else if levene_status == GateStatus::Unassessed {
        (OmnibusTest::KruskalWallis, "variance homogeneity could not be assessed; ANOVA not used")
    } else if levene_status == GateStatus::Failed {
        (OmnibusTest::KruskalWallis, "Levene p < alpha: variances differ; ANOVA not used")
    } else {
        (OmnibusTest::Anova, "all groups normal and variances homogeneous: ANOVA applied")
    };

    let omnibus = match chosen {
        OmnibusTest::Anova => anova_oneway(g)?,
        OmnibusTest::KruskalWallis => kruskal_wallis(g)?,
    };
    let posthoc = if omnibus.p_value < alpha && g.k() >= 3 { Some(dunn_posthoc(g, Adjust::Bonferroni)?) } else { None };
    Ok(TestPlan {
        alpha,
        normality,
        levene: levene_result,
        levene_status,
        chosen,
        rule: rule.to_string(),
        omnibus,
        posthoc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spread(center: f64, scale: f64, n: usize) -> Vec<f64> {
        // Evenly spaced normal quantiles: passes Shapiro–Wilk comfortably.
        (1..=n)
            .map(|i| {
                let p = (i as f64 - 0.375) / (n as f64 + 0.25);
                center + scale * crate::stats::shapiro::ppnd(p)
            })
            .collect()
    }

    #[test]
    fn normal_equal_variance_uses_anova() {
        let g = GroupedSamples::from_values(&[&spread(0.0, 1.0, 20), &spread(0.2, 1.0, 20), &spread(0.1, 1.0, 20)]);
        let plan = select_test(&g, 0.05).unwrap();
        assert_eq!(plan.chosen, OmnibusTest::Anova);
        assert!(plan.omnibus.p_value >= 0.05);
        assert!(plan.posthoc.is_none());
    }

    #[test]
    fn skewed_group_forces_kruskal_wallis() {
        let skewed: Vec<f64> = (0..30).map(|i| (i as f64 / 4.0).exp()).collect();
        let g = GroupedSamples::from_values(&[&spread(0.0, 1.0, 20), &skewed]);
        let plan = select_test(&g, 0.05).unwrap();
        assert_eq!(plan.normality[1].status, GateStatus::Failed);
        assert_eq!(plan.chosen, OmnibusTest::KruskalWallis);
        assert!(plan.rule.contains("normality"));
    }

    #[test]
    fn unequal_variances_force_kruskal_wallis() {
        let g = GroupedSamples::from_values(&[&spread(0.0, 1.0, 20), &spread(0.0, 10.0, 20)]);
        let plan = select_test(&g, 0.05).unwrap();
        assert!(plan.normality.iter().all(|c| c.status == GateStatus::Passed));
        assert_eq!(plan.levene_status, GateStatus::Failed);
        assert_eq!(plan.chosen, OmnibusTest::KruskalWallis);
    }

    #[test]
    fn significant_three_groups_get_dunn() {
        let g = GroupedSamples::from_values(&[&spread(0.0, 1.0, 15), &spread(10.0, 1.0, 15), &spread(20.0, 1.0, 15)]);
        let plan = select_test(&g, 0.05).unwrap();
        assert!(plan.omnibus.p_value < 0.05);
        assert_eq!(plan.posthoc.as_ref().map(Vec::len), Some(3));

        let two = GroupedSamples::from_values(&[&spread(0.0, 1.0, 15), &spread(10.0, 1.0, 15)]);
        let plan = select_test(&two, 0.05).unwrap();
        assert!(plan.omnibus.p_value < 0.05);
        assert!(plan.posthoc.is_none());
    }

    #[test]
    fn small_groups_are_unassessed() {
        let g = GroupedSamples::from_values(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let plan = select_test(&g, 0.05).unwrap();
        assert!(plan.normality.iter().all(|c| c.status == GateStatus::Unassessed));
        assert_eq!(plan.chosen, OmnibusTest::KruskalWallis);
    }
}
