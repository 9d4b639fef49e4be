use serde::{Deserialize, Serialize};

use super::rank::{average_ranks, tie_sum};
use super::{chi2_sf, f_sf, mean, median, normal_sf, GroupedSamples, StatsError, TestName, TestResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Center {
    Mean,
    /// Brown–Forsythe variant.
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjust {
    Bonferroni,
    None,
}

/// Levene's test on absolute deviations `Z_ij = |X_ij − center_i|`:
///
/// ```text
/// W = (N − k) Σ n_i (Z̄_i − Z̄)²  /  ((k − 1) ΣΣ (Z_ij − Z̄_i)²)
/// ```
///
/// referred to F(k − 1, N − k).
pub fn levene(g: &GroupedSamples, center: Center) -> Result<TestResult, StatsError> {
    const TEST: &str = "Levene";
    g.check(TEST, 2, 2)?;
    let z: Vec<Vec<f64>> = g
        .values()
        .map(|x| {
            let c = match center {
                Center::Mean => mean(x),
                Center::Median => median(x),
            };
            x.iter().map(|v| (v - c).abs()).collect()
        })
        .collect();
    let (k, n) = (g.k() as f64, g.total() as f64);
    let zbar_i: Vec<f64> = z.iter().map(|zi| mean(zi)).collect();
    let zbar = z.iter().flatten().sum::<f64>() / n;
    let between: f64 = z.iter().zip(&zbar_i).map(|(zi, m)| zi.len() as f64 * (m - zbar).powi(2)).sum();
    let within: f64 = z.iter().zip(&zbar_i).map(|(zi, m)| zi.iter().map(|v| (v - m).powi(2)).sum::<f64>()).sum();
    if within == 0.0 {
        return Err(StatsError::Degenerate { test: TEST, reason: "no spread in absolute deviations" });
    }
    let w = (n - k) * between / ((k - 1.0) * within);
    let test = match center {
        Center::Mean => TestName::LeveneMean,
        Center::Median => TestName::LeveneMedian,
    };
    Ok(TestResult { test, statistic: w, p_value: f_sf(w, k - 1.0, n - k), df: vec![k - 1.0, n - k], n: g.total() })
}

/// One-way ANOVA: between-group over within-group mean square.
pub fn anova_oneway(g: &GroupedSamples) -> Result<TestResult, StatsError> {
    const TEST: &str = "ANOVA";
    g.check(TEST, 2, 1)?;
    let (k, n) = (g.k() as f64, g.total() as f64);
    if n <= k {
        return Err(StatsError::InsufficientSample { test: TEST, needed: g.k() + 1, got: g.total() });
    }
    let grand = g.values().flatten().sum::<f64>() / n;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for x in g.values() {
        let m = mean(x);
        ssb += x.len() as f64 * (m - grand).powi(2);
        ssw += x.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    if ssw == 0.0 {
        return Err(StatsError::Degenerate { test: TEST, reason: "zero within-group variance" });
    }
    let f = (ssb / (k - 1.0)) / (ssw / (n - k));
    Ok(TestResult {
        test: TestName::Anova,
        statistic: f,
        p_value: f_sf(f, k - 1.0, n - k),
        df: vec![k - 1.0, n - k],
        n: g.total(),
    })
}

struct Ranked {
    mean_ranks: Vec<f64>,
    sizes: Vec<f64>,
    n: f64,
    tie_sum: f64,
}

fn rank_groups(g: &GroupedSamples) -> Ranked {
    let pooled: Vec<f64> = g.values().flatten().copied().collect();
    let ranks = average_ranks(&pooled);
    let mut mean_ranks = Vec::with_capacity(g.k());
    let mut at = 0;
    for x in g.values() {
        mean_ranks.push(mean(&ranks[at..at + x.len()]));
        at += x.len();
    }
    Ranked {
        mean_ranks,
        sizes: g.sizes().into_iter().map(|s| s as f64).collect(),
        n: pooled.len() as f64,
        tie_sum: tie_sum(&pooled),
    }
}

/// Kruskal–Wallis H with the usual tie correction, referred to
/// χ²(k − 1). The chi-square approximation is used for every sample
/// size, so p-values are approximate when groups have fewer than 5 values.
pub fn kruskal_wallis(g: &GroupedSamples) -> Result<TestResult, StatsError> {
    const TEST: &str = "Kruskal-Wallis";
    g.check(TEST, 2, 1)?;
    if g.total() < 3 {
        return Err(StatsError::InsufficientSample { test: TEST, needed: 3, got: g.total() });
    }
    let r = rank_groups(g);
    let n = r.n;
    let correction = 1.0 - r.tie_sum / (n.powi(3) - n);
    if correction <= 0.0 {
        return Err(StatsError::Degenerate { test: TEST, reason: "all values identical" });
    }
    // Σ R_i² / n_i with R_i the rank sum of group i.
    let s: f64 = r.mean_ranks.iter().zip(&r.sizes).map(|(m, ni)| (m * ni).powi(2) / ni).sum();
    let h = (12.0 / (n * (n + 1.0)) * s - 3.0 * (n + 1.0)) / correction;
    let h = h.max(0.0);
    let df = g.k() as f64 - 1.0;
    Ok(TestResult { test: TestName::KruskalWallis, statistic: h, p_value: chi2_sf(h, df), df: vec![df], n: g.total() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub a: String,
    pub b: String,
    /// Mean rank of `b` minus mean rank of `a`, over its standard error.
    pub z: f64,
    pub p_unadjusted: f64,
    pub p_adjusted: f64,
}

/// Dunn's pairwise comparisons of mean ranks, with the tie-corrected
/// standard error
///
/// ```text
/// σ_ij = sqrt((N(N+1)/12 − Σ(t³ − t) / (12(N − 1))) (1/n_i + 1/n_j))
/// ```
///
/// and two-sided normal p-values. Bonferroni multiplies each p by the
/// number of pairs, capped at 1. For `k = 2` the single pair is still
/// returned, though a post-hoc step adds nothing there.
pub fn dunn_posthoc(g: &GroupedSamples, adjust: Adjust) -> Result<Vec<PairwiseResult>, StatsError> {
    const TEST: &str = "Dunn";
    g.check(TEST, 2, 1)?;
    if g.k() < 3 {
        log::warn!("post-hoc comparison of {} groups is redundant with the omnibus test", g.k());
    }
    let r = rank_groups(g);
    let n = r.n;
    let var = n * (n + 1.0) / 12.0 - r.tie_sum / (12.0 * (n - 1.0));
    if var.is_nan() || var <= 0.0 {
        return Err(StatsError::Degenerate { test: TEST, reason: "all values identical" });
    }
    let k = g.k();
    let pairs = (k * (k - 1) / 2) as f64;
    let labels = g.labels();
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let se = (var * (1.0 / r.sizes[i] + 1.0 / r.sizes[j])).sqrt();
            let z = (r.mean_ranks[j] - r.mean_ranks[i]) / se;
            let p = (2.0 * normal_sf(z.abs())).min(1.0);
            let p_adjusted = match adjust {
                Adjust::Bonferroni => (p * pairs).min(1.0),
                Adjust::None => p,
            };
            out.push(PairwiseResult {
                a: labels[i].to_string(),
                b: labels[j].to_string(),
                z,
                p_unadjusted: p,
                p_adjusted,
            });
        }
    }
    Ok(out)
}
