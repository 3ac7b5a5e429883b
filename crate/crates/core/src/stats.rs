//! Kolmogorov-Smirnov distances and least-squares line fits.

/// Asymptotic 1% critical coefficient `c(alpha) = sqrt(-ln(alpha/2)/2)`.
pub const KS_C_01: f64 = 1.627_636_708_911_280_3;

/// One-sample KS distance between `samples` and a CDF evaluated at the sorted
/// samples (`cdf_at_sorted[i] = F(sorted[i])`).
pub fn ks_one_sample_sorted(cdf_at_sorted: &[f64]) -> f64 {
    let n = cdf_at_sorted.len() as f64;
    cdf_at_sorted
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// One-sample KS distance when only the first `cdf_at_sorted.len()` of
/// `total` samples were observed and the rest are known to lie beyond the
/// horizon, where the CDF is `cdf_at_horizon`.
pub fn ks_one_sample_censored(cdf_at_sorted: &[f64], total: usize, cdf_at_horizon: f64) -> f64 {
    assert!(cdf_at_sorted.len() <= total && total > 0);
    let n = total as f64;
    let seen = cdf_at_sorted.len() as f64;
    let inner = cdf_at_sorted
        .iter()
        .enumerate()
        .map(|(i, &f)| ((i + 1) as f64 / n - f).max(f - i as f64 / n))
        .fold(0.0, f64::max);
    inner.max((cdf_at_horizon - seen / n).abs())
}

/// One-sample KS distance against `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let values: Vec<f64> = sorted.iter().map(|&x| cdf(x)).collect();
    ks_one_sample_sorted(&values)
}

/// Two-sample KS distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// 1% critical value for the one-sample test with `n` samples.
pub fn ks_critical_one_sample(n: usize) -> f64 {
    KS_C_01 / (n as f64).sqrt()
}

/// 1% critical value for the two-sample test.
pub fn ks_critical_two_sample(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    KS_C_01 * ((n + m) / (n * m)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LineFit { slope, intercept, r_squared }
}
