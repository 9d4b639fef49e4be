use super::{check_finite, normal_sf, StatsError, TestName, TestResult};

const MAX_N: usize = 5000;

/// Polynomial with ascending coefficients.
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ci| acc * x + ci)
}

/// Normal quantile by the AS 111 rational approximation (about 1e-7),
/// the precision the coefficient fit was calibrated against.
pub(crate) fn ppnd(p: f64) -> f64 {
    const A: [f64; 4] = [2.50662823884, -18.61500062529, 41.39119773534, -25.44106049637];
    const B: [f64; 4] = [-8.47351093090, 23.08336743743, -21.06224101826, 3.13082909833];
    const C: [f64; 4] = [-2.78718931138, -2.29796479134, 4.85014127135, 2.32121276858];
    const D: [f64; 2] = [3.54388924762, 1.63706781897];
    let q = p - 0.5;
    if q.abs() <= 0.42 {
        let r = q * q;
        return q * poly(&A, r) / (poly(&B, r) * r + 1.0);
    }
    let tail = if q > 0.0 { 1.0 - p } else { p };
    if tail <= 0.0 {
        return 0.0;
    }
    let r = (-tail.ln()).sqrt();
    let v = poly(&C, r) / (poly(&D, r) * r + 1.0);
    if q < 0.0 {
        -v
    } else {
        v
    }
}

/// Royston's approximation to the upper-half Shapiro–Wilk coefficients
/// `a_n, a_{n-1}, ...` (largest order statistic first).
fn coefficients(n: usize) -> Vec<f64> {
    const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
    const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let half = n / 2;
    let an = n as f64;
    // Expected normal order statistics, lowest first (negative).
    let m: Vec<f64> = (1..=half).map(|i| ppnd((i as f64 - 0.375) / (an + 0.25))).collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();

    let mut a = vec![0.0; half];
    a[0] = poly(&C1, rsn) - m[0] / ssumm2;
    let (fac, first) = if n > 5 {
        a[1] = -m[1] / ssumm2 + poly(&C2, rsn);
        let num = summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1];
        let den = 1.0 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1];
        ((num / den).sqrt(), 2)
    } else {
        let num = summ2 - 2.0 * m[0] * m[0];
        let den = 1.0 - 2.0 * a[0] * a[0];
        ((num / den).sqrt(), 1)
    };
    for i in first..half {
        a[i] = -m[i] / fac;
    }
    a
}

/// Shapiro–Wilk W with Royston's (1995) coefficient and p-value
/// approximations, valid for `3 <= n <= 5000`.
///
/// W is the squared correlation between the ordered sample and the
/// antisymmetric coefficient vector; `1 − W` is formed directly to keep
/// precision when W is close to 1.
pub fn shapiro_wilk(x: &[f64]) -> Result<TestResult, StatsError> {
    const TEST: &str = "Shapiro-Wilk";
    let n = x.len();
    if n < 3 {
        return Err(StatsError::InsufficientSample { test: TEST, needed: 3, got: n });
    }
    if n > MAX_N {
        return Err(StatsError::TooLarge { test: TEST, n, max: MAX_N });
    }
    check_finite(TEST, x)?;

    let mut y = x.to_vec();
    y.sort_by(f64::total_cmp);
    let mid = y[n / 2];
    y.iter_mut().for_each(|v| *v -= mid);
    let range = y[n - 1] - y[0];
    if range.is_nan() || range <= 1e-19 {
        return Err(StatsError::Degenerate { test: TEST, reason: "constant sample" });
    }

    let a = coefficients(n);
    let weight = |i: usize| {
        let j = n - 1 - i;
        match i.cmp(&j) {
            std::cmp::Ordering::Less => -a[i],
            std::cmp::Ordering::Greater => a[j],
            std::cmp::Ordering::Equal => 0.0,
        }
    };
    let z: Vec<f64> = y.iter().map(|v| v / range).collect();
    let za = (0..n).map(weight).sum::<f64>() / n as f64;
    let zx = z.iter().sum::<f64>() / n as f64;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (i, zi) in z.iter().enumerate() {
        let da = weight(i) - za;
        let dx = zi - zx;
        ssa += da * da;
        ssx += dx * dx;
        sax += da * dx;
    }
    let root = (ssa * ssx).sqrt();
    let w1 = (root - sax) * (root + sax) / (ssa * ssx);
    let w = (1.0 - w1).min(1.0);

    let (w, p) = if n == 3 {
        let w = w.max(0.75);
        (w, (1.0 - 6.0 / std::f64::consts::PI * w.sqrt().acos()).max(0.0))
    } else {
        (w, p_value(n, w1))
    };
    Ok(TestResult { test: TestName::ShapiroWilk, statistic: w, p_value: p.clamp(0.0, 1.0), df: vec![], n })
}

fn p_value(n: usize, w1: f64) -> f64 {
    const G: [f64; 2] = [-2.273, 0.459];
    const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
    const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
    const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
    const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
    let an = n as f64;
    let y = w1.ln();
    let (y, m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-19;
        }
        (-(gamma - y).ln(), poly(&C3, an), poly(&C4, an).exp())
    } else {
        let ln_n = an.ln();
        (y, poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    normal_sf((y - m) / s)
}
