//! Small statistical helpers shared by the harness and the test suites.

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;
/// One-sided 0.999 normal quantile (used for level-0.001 tests).
pub const Z_999: f64 = 3.090_232_306_167_813;
/// Two-sided 99.9% normal quantile.
pub const Z_999_TWO_SIDED: f64 = 3.290_526_731_491_925_5;

/// Compensated (Kahan-Babuska/Neumaier) sum; deterministic left-to-right
/// order.
pub fn kahan_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    kahan_sum(values) / values.len() as f64
}

/// Sample mean and unbiased sample variance (n-1 denominator).
pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n < 2 {
        return (mean(values), 0.0);
    }
    let m = mean(values);
    let sq: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
    (m, kahan_sum(&sq) / (n - 1) as f64)
}

/// Standard error of the sample mean.
pub fn standard_error(values: &[f64]) -> f64 {
    let (_, var) = mean_and_variance(values);
    (var / values.len() as f64).sqrt()
}

/// Median of a sample (averages the central pair for even sizes).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty sample");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-comparable value"));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Median element of a sorted budget grid (upper median for even lengths).
pub fn median_of_ns(ns: &[usize]) -> usize {
    assert!(!ns.is_empty(), "median of empty grid");
    ns[ns.len() / 2]
}

/// Median absolute deviation scaled to be consistent with the normal sd.
pub fn robust_scale(values: &[f64]) -> f64 {
    let m = median(values);
    let devs: Vec<f64> = values.iter().map(|v| (v - m).abs()).collect();
    1.4826 * median(&devs)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    assert!(trials > 0, "wilson interval needs trials > 0");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Least-squares slope of log2(y) against log2(x). Pairs with y <= 0 are
/// floored at 1e-300 so exactly-zero cells cannot poison the fit.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    assert!(points.len() >= 2, "need at least two points for a slope");
    let xs: Vec<f64> = points.iter().map(|&(x, _)| x.log2()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y.max(1e-300).log2()).collect();
    let mx = mean(&xs);
    let my = mean(&ys);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..xs.len() {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    num / den
}

/// Chi-square statistic of `values` in [0,1) against the uniform law over
/// `bins` equal cells.
pub fn chi_square_uniform(values: &[f64], bins: usize) -> f64 {
    let mut counts = vec![0.0f64; bins];
    for &v in values {
        let idx = ((v * bins as f64) as usize).min(bins - 1);
        counts[idx] += 1.0;
    }
    let expected = values.len() as f64 / bins as f64;
    counts
        .iter()
        .map(|&c| (c - expected) * (c - expected) / expected)
        .sum()
}

/// Upper critical value of the chi-square law with `df` degrees of freedom at
/// the one-sided normal quantile `z` (Wilson-Hilferty approximation; accurate
/// to a fraction of a percent for df >= 10, which is plenty for test gates).
pub fn chi_square_critical(df: usize, z: f64) -> f64 {
    let d = df as f64;
    let t = 1.0 - 2.0 / (9.0 * d) + z * (2.0 / (9.0 * d)).sqrt();
    d * t * t * t
}
