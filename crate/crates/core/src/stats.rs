//! Small summary statistics used by the sweeps and their checks.

/// Arithmetic mean; `NaN` for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (`n - 1` denominator); zero for fewer than two
/// values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - mu) * (x - mu)).sum();
    libm::sqrt(ss / (xs.len() - 1) as f64)
}

pub fn standard_error(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    std_dev(xs) / libm::sqrt(xs.len() as f64)
}

/// Counts of positive and negative paired differences; zeros are dropped.
pub fn sign_counts(diffs: &[f64]) -> (usize, usize) {
    diffs.iter().fold((0, 0), |(p, n), &d| {
        if d > 0.0 {
            (p + 1, n)
        } else if d < 0.0 {
            (p, n + 1)
        } else {
            (p, n)
        }
    })
}

/// One-sided sign test: `P(X >= positives)` for `X ~ Binomial(positives +
/// negatives, 1/2)`. Returns 1 when there are no non-zero differences.
pub fn sign_test_p_value(positives: usize, negatives: usize) -> f64 {
    let n = positives + negatives;
    if n == 0 {
        return 1.0;
    }
    let ln_half = -core::f64::consts::LN_2 * n as f64;
    let ln_n_fact = libm::lgamma(n as f64 + 1.0);
    let p: f64 = (positives..=n)
        .map(|k| {
            let ln_choose =
                ln_n_fact - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0);
            libm::exp(ln_choose + ln_half)
        })
        .sum();
    p.min(1.0)
}
