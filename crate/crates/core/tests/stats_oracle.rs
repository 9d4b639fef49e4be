//! Agreement with the recorded scipy / scikit-posthocs outputs.

mod common;

use common::oracle::{check, check_suite, floats, grouped, oracle, P_TOL};
use daokpi_core::stats::{anova_oneway, dunn_posthoc, levene, pearson, shapiro_wilk, Adjust, Center};

#[test]
fn shapiro_wilk_matches_oracle() {
    check_suite(&oracle(), "shapiro").unwrap();
}

#[test]
fn levene_mean_matches_oracle() {
    check_suite(&oracle(), "levene_mean").unwrap();
}

#[test]
fn levene_median_matches_oracle() {
    check_suite(&oracle(), "levene_median").unwrap();
}

#[test]
fn anova_matches_oracle() {
    check_suite(&oracle(), "anova").unwrap();
}

#[test]
fn kruskal_wallis_with_ties_matches_oracle() {
    check_suite(&oracle(), "kruskal").unwrap();
}

#[test]
fn dunn_bonferroni_matches_oracle() {
    check_suite(&oracle(), "dunn").unwrap();
}

#[test]
fn pearson_matches_oracle() {
    check_suite(&oracle(), "pearson").unwrap();
}

#[test]
fn spearman_matches_oracle() {
    check_suite(&oracle(), "spearman").unwrap();
}

#[test]
fn reference_samples() {
    let o = oracle();
    let n = &o["named"];

    let c = &n["shapiro_n12"];
    let r = shapiro_wilk(&floats(&c["x"])).unwrap();
    assert_eq!(r.n, 12);
    check("shapiro_n12", Ok(r.clone()), c).unwrap();

    let c = &n["shapiro_exponential_n30"];
    let r = shapiro_wilk(&floats(&c["x"])).unwrap();
    check("shapiro_exponential_n30", Ok(r.clone()), c).unwrap();
    assert!(r.p_value < 0.05);

    let c = &n["levene_var_1_vs_100"];
    let r = levene(&grouped(&c["groups"]), Center::Mean).unwrap();
    check("levene_var_1_vs_100", Ok(r.clone()), c).unwrap();
    assert!(r.p_value < 0.05);

    let c = &n["levene_median_asymmetric"];
    check("levene_median_asymmetric", levene(&grouped(&c["groups"]), Center::Median), c).unwrap();

    let c = &n["anova_jitter"];
    let r = anova_oneway(&grouped(&c["groups"])).unwrap();
    check("anova_jitter", Ok(r.clone()), c).unwrap();
    assert!(r.p_value < 0.01);

    let c = &n["anova_textbook"];
    let r = anova_oneway(&grouped(&c["groups"])).unwrap();
    assert!((r.statistic - c["statistic"].as_f64().unwrap()).abs() < 1e-6);

    let c = &n["dunn_separated"];
    let got = dunn_posthoc(&grouped(&c["groups"]), Adjust::Bonferroni).unwrap();
    for (g, w) in got.iter().zip(floats(&c["p_adjusted"])) {
        assert!((g.p_adjusted - w).abs() <= P_TOL);
        assert!(g.p_adjusted < 0.05, "{} vs {} not significant", g.a, g.b);
    }

    let c = &n["pearson_n48"];
    let x = floats(&c["x"]);
    assert_eq!(x.len(), 48);
    check("pearson_n48", pearson(&x, &floats(&c["y"])), c).unwrap();
}

#[test]
fn gates_select_the_recorded_test() {
    assert_eq!(common::gates::check_all().unwrap(), 9);
}
