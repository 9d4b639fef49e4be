//! Normality and variance gates, group comparisons, post-hoc tests,
//! correlations and box-plot summaries.
//!
//! Every p-value comes from the reference distribution named in the
//! test; no exact small-sample tables are used.

mod boxplot;
mod compare;
mod correlation;
mod rank;
mod select;
mod shapiro;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};
use thiserror::Error;

pub use boxplot::{box_stats, quantile, BoxStats, NOTCH_FACTOR, WHISKER_FACTOR};
pub use compare::{anova_oneway, dunn_posthoc, kruskal_wallis, levene, Adjust, Center, PairwiseResult};
pub use correlation::{pearson, spearman};
pub use rank::{average_ranks, tie_sizes};
pub use select::{select_test, GateStatus, NormalityCheck, OmnibusTest, TestPlan};
pub use shapiro::shapiro_wilk;

/// Significance level used when none is configured.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("{test} needs at least {needed} observations, got {got}")]
    InsufficientSample { test: &'static str, needed: usize, got: usize },
    #[error("{test}: degenerate sample ({reason})")]
    Degenerate { test: &'static str, reason: &'static str },
    #[error("{test}: sample size {n} exceeds the supported maximum {max}")]
    TooLarge { test: &'static str, n: usize, max: usize },
    #[error("{test} needs at least {needed} groups, got {got}")]
    TooFewGroups { test: &'static str, needed: usize, got: usize },
    #[error("{test}: inputs have different lengths ({x} and {y})")]
    LengthMismatch { test: &'static str, x: usize, y: usize },
    #[error("{test}: non-finite value in input")]
    NonFinite { test: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestName {
    ShapiroWilk,
    LeveneMean,
    LeveneMedian,
    Anova,
    KruskalWallis,
    Pearson,
    Spearman,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: TestName,
    pub statistic: f64,
    pub p_value: f64,
    /// Degrees of freedom of the reference distribution, when it has any.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub df: Vec<f64>,
    pub n: usize,
}

/// Labeled samples, one per category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedSamples {
    pub groups: Vec<(String, Vec<f64>)>,
}

impl GroupedSamples {
    pub fn new(groups: Vec<(String, Vec<f64>)>) -> Self {
        GroupedSamples { groups }
    }

    pub fn from_values(groups: &[&[f64]]) -> Self {
        GroupedSamples { groups: groups.iter().enumerate().map(|(i, g)| (format!("g{}", i + 1), g.to_vec())).collect() }
    }

    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn total(&self) -> usize {
        self.groups.iter().map(|(_, v)| v.len()).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|(_, v)| v.len()).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.groups.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn values(&self) -> impl Iterator<Item = &[f64]> {
        self.groups.iter().map(|(_, v)| v.as_slice())
    }

    fn check(&self, test: &'static str, min_groups: usize, min_size: usize) -> Result<(), StatsError> {
        if self.k() < min_groups {
            return Err(StatsError::TooFewGroups { test, needed: min_groups, got: self.k() });
        }
        if let Some(n) = self.sizes().into_iter().find(|n| *n < min_size) {
            return Err(StatsError::InsufficientSample { test, needed: min_size, got: n });
        }
        check_finite(test, self.values().flatten())
    }
}

fn check_finite<'a>(test: &'static str, values: impl IntoIterator<Item = &'a f64>) -> Result<(), StatsError> {
    if values.into_iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite { test })
    }
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub(crate) fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

fn clamp_p(p: f64) -> f64 {
    if p.is_nan() {
        1.0
    } else {
        p.clamp(0.0, 1.0)
    }
}

pub(crate) fn f_sf(f: f64, d1: f64, d2: f64) -> f64 {
    let dist = FisherSnedecor::new(d1, d2).expect("positive degrees of freedom");
    clamp_p(dist.sf(f))
}

pub(crate) fn chi2_sf(x: f64, df: f64) -> f64 {
    clamp_p(ChiSquared::new(df).expect("positive degrees of freedom").sf(x))
}

pub(crate) fn normal_sf(z: f64) -> f64 {
    clamp_p(Normal::standard().sf(z))
}

pub(crate) fn t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    clamp_p(2.0 * StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom").sf(t.abs()))
}
