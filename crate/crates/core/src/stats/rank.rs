/// Average ranks (1-based), ties sharing the mean of the ranks they span.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|a, b| x[*a].total_cmp(&x[*b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for k in &idx[i..=j] {
            ranks[*k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Sizes of each run of tied values (runs of length 1 omitted).
pub fn tie_sizes(x: &[f64]) -> Vec<usize> {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let j = s[i..].iter().take_while(|v| **v == s[i]).count();
        if j > 1 {
            out.push(j);
        }
        i += j;
    }
    out
}

/// `Σ (t³ − t)` over tie runs.
pub(crate) fn tie_sum(x: &[f64]) -> f64 {
    tie_sizes(x).iter().map(|t| (*t as f64).powi(3) - *t as f64).sum()
}
