use serde::{Deserialize, Serialize};

/// Notch half-width multiplier on `IQR / √n`, an approximate 95% interval
/// for the median.
pub const NOTCH_FACTOR: f64 = 1.57;
pub const WHISKER_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub n: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub notch_low: f64,
    pub notch_high: f64,
    pub outliers: Vec<f64>,
}

/// Quantile by linear interpolation between closest ranks: position
/// `(n − 1)·q` in the sorted sample. Input must be sorted and nonempty.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Box-plot summary. Whiskers reach the most extreme observations within
/// 1.5·IQR of the quartiles; anything beyond is an outlier. Returns `None`
/// for an empty sample.
pub fn box_stats(x: &[f64]) -> Option<BoxStats> {
    if x.is_empty() {
        return None;
    }
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let (q1, median, q3) = (quantile(&s, 0.25), quantile(&s, 0.5), quantile(&s, 0.75));
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - WHISKER_FACTOR * iqr, q3 + WHISKER_FACTOR * iqr);
    let inside = || s.iter().copied().filter(|v| *v >= lo_fence && *v <= hi_fence);
    let half_notch = NOTCH_FACTOR * iqr / (s.len() as f64).sqrt();
    Some(BoxStats {
        n: s.len(),
        median,
        q1,
        q3,
        iqr,
        whisker_low: inside().next().unwrap_or(q1),
        whisker_high: inside().next_back().unwrap_or(q3),
        notch_low: median - half_notch,
        notch_high: median + half_notch,
        outliers: s.iter().copied().filter(|v| *v < lo_fence || *v > hi_fence).collect(),
    })
}
