//! Rank and affine invariances of the statistical tests, as reusable
//! checks with their input strategies.

use daokpi_core::stats::{kruskal_wallis, shapiro_wilk, spearman, GroupedSamples, StatsError, TestResult};
use proptest::prelude::*;

pub const TOL: f64 = 1e-9;

/// Strictly increasing maps of the real line.
#[derive(Debug, Clone, Copy)]
pub enum Monotone {
    Affine { a: f64, b: f64 },
    Cube,
    Exp,
    Atan,
}

impl Monotone {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Monotone::Affine { a, b } => a * x + b,
            Monotone::Cube => x * x * x,
            Monotone::Exp => (x / 50.0).exp(),
            Monotone::Atan => (x / 10.0).atan(),
        }
    }
}

pub fn monotone() -> impl Strategy<Value = Monotone> {
    prop_oneof![
        (0.01f64..100.0, -1e3f64..1e3).prop_map(|(a, b)| Monotone::Affine { a, b }),
        Just(Monotone::Cube),
        Just(Monotone::Exp),
        Just(Monotone::Atan),
    ]
}

/// Multiples of 0.1 in [-100, 100], so ties are common.
pub fn value() -> impl Strategy<Value = f64> {
    (-1000i32..=1000).prop_map(|k| f64::from(k) / 10.0)
}

pub fn narrow_value() -> impl Strategy<Value = f64> {
    (-30i32..=30).prop_map(|k| f64::from(k) / 10.0)
}

pub fn groups() -> impl Strategy<Value = Vec<Vec<f64>>> {
    let group = prop_oneof![prop::collection::vec(value(), 1..25), prop::collection::vec(narrow_value(), 1..25),];
    prop::collection::vec(group, 2..6)
}

pub fn pairs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((value(), prop_oneof![value(), narrow_value()]), 3..60)
}

pub fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![prop::collection::vec(value(), 3..80), prop::collection::vec(narrow_value(), 3..30)]
}

pub fn affine() -> impl Strategy<Value = (f64, f64)> {
    let scale = prop_oneof![0.01f64..100.0, -100.0f64..-0.01];
    (scale, -100.0f64..100.0)
}

fn same(a: &Result<TestResult, StatsError>, b: &Result<TestResult, StatsError>) -> Result<(), String> {
    match (a, b) {
        (Ok(x), Ok(y)) => {
            for r in [x, y] {
                if !(0.0..=1.0).contains(&r.p_value) {
                    return Err(format!("p-value {} outside [0, 1]", r.p_value));
                }
            }
            let ds = (x.statistic - y.statistic).abs();
            let dp = (x.p_value - y.p_value).abs();
            if ds <= TOL && dp <= TOL {
                Ok(())
            } else {
                Err(format!("statistic {} vs {}, p {} vs {}", x.statistic, y.statistic, x.p_value, y.p_value))
            }
        }
        (Err(_), Err(_)) => Ok(()),
        _ => Err(format!("one side failed: {a:?} vs {b:?}")),
    }
}

fn grouped(g: &[Vec<f64>]) -> GroupedSamples {
    let refs: Vec<&[f64]> = g.iter().map(Vec::as_slice).collect();
    GroupedSamples::from_values(&refs)
}

pub fn kruskal_monotone(g: &[Vec<f64>], t: Monotone) -> Result<(), String> {
    let moved: Vec<Vec<f64>> = g.iter().map(|v| v.iter().map(|&x| t.apply(x)).collect()).collect();
    same(&kruskal_wallis(&grouped(g)), &kruskal_wallis(&grouped(&moved)))
}

pub fn spearman_monotone(xy: &[(f64, f64)], tx: Monotone, ty: Monotone) -> Result<(), String> {
    let (x, y): (Vec<f64>, Vec<f64>) = xy.iter().copied().unzip();
    let mx: Vec<f64> = x.iter().map(|&v| tx.apply(v)).collect();
    let my: Vec<f64> = y.iter().map(|&v| ty.apply(v)).collect();
    same(&spearman(&x, &y), &spearman(&mx, &my))
}

pub fn shapiro_affine(x: &[f64], a: f64, b: f64) -> Result<(), String> {
    let moved: Vec<f64> = x.iter().map(|&v| a * v + b).collect();
    same(&shapiro_wilk(x), &shapiro_wilk(&moved))
}
