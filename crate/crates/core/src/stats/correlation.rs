use super::rank::average_ranks;
use super::{check_finite, mean, t_two_sided, StatsError, TestName, TestResult};

fn prepare(test: &'static str, x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { test, x: x.len(), y: y.len() });
    }
    if x.len() < 3 {
        return Err(StatsError::InsufficientSample { test, needed: 3, got: x.len() });
    }
    check_finite(test, x.iter().chain(y))
}

fn correlation(test: &'static str, name: TestName, x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    let (mx, my) = (mean(x), mean(y));
    let dx: Vec<f64> = x.iter().map(|v| v - mx).collect();
    let dy: Vec<f64> = y.iter().map(|v| v - my).collect();
    let nx = dx.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = dy.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(StatsError::Degenerate { test, reason: "constant input" });
    }
    let r = dx.iter().zip(&dy).map(|(a, b)| (a / nx) * (b / ny)).sum::<f64>().clamp(-1.0, 1.0);
    let df = x.len() as f64 - 2.0;
    let t = r * (df / ((1.0 - r) * (1.0 + r))).sqrt();
    Ok(TestResult { test: name, statistic: r, p_value: t_two_sided(t, df), df: vec![df], n: x.len() })
}

/// Pearson's r with a two-sided t-test on `n − 2` degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    prepare("Pearson", x, y)?;
    correlation("Pearson", TestName::Pearson, x, y)
}

/// Spearman's ρ: Pearson's r on average ranks, same t approximation.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    prepare("Spearman", x, y)?;
    correlation("Spearman", TestName::Spearman, &average_ranks(x), &average_ranks(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson(&x, &y).unwrap().statistic - 1.0).abs() < 1e-12);
        assert_eq!(spearman(&x, &y).unwrap().statistic, 1.0);
        assert_eq!(pearson(&x, &y).unwrap().p_value, 0.0);
    }

    #[test]
    fn cubic_is_monotone_not_linear() {
        let x: Vec<f64> = (-3..=3).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| v.powi(3)).collect();
        assert_eq!(spearman(&x, &y).unwrap().statistic, 1.0);
        assert!(pearson(&x, &y).unwrap().statistic < 1.0);
    }

    #[test]
    fn constant_input() {
        assert!(matches!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(StatsError::Degenerate { .. })));
    }
}
