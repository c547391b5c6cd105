//! Interval estimates and small test statistics.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

/// A closed confidence interval inside `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }

    pub fn half_width(&self) -> f64 {
        (self.high - self.low) / 2.0
    }
}

/// Two-sided standard normal quantile for `confidence` (e.g. 0.99 → 2.5758).
pub fn normal_quantile(confidence: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(1.0 - (1.0 - confidence) / 2.0)
}

/// Wilson score interval for `successes` out of `trials`.
///
/// The interval always contains the point estimate; it reaches 0 (resp. 1)
/// exactly when there are no successes (resp. no failures).
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Interval {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z = normal_quantile(confidence);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let spread = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if successes == 0 { 0.0 } else { (center - spread).clamp(0.0, phat) };
    let high = if successes == trials { 1.0 } else { (center + spread).clamp(phat, 1.0) };
    Interval { low, high }
}

/// `ln C(n, k)`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Binomial probability mass `P(X = k)` for `X ~ Bin(n, p)`, computed in
/// log space.
pub fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
}

/// Smallest `k` with `P(Bin(n, alpha) >= k) <= level`: the number of
/// individual rejections among `n` independent level-`alpha` tests that is
/// itself significant at `level`.
pub fn rejection_allowance(n: u64, alpha: f64, level: f64) -> u64 {
    let mut tail = 1.0;
    for k in 0..=n {
        if tail <= level {
            return k;
        }
        tail -= binomial_pmf(n, alpha, k);
    }
    n + 1
}

/// A 2×2 contingency table of two indicator variables.
/// `counts[a][b]` counts trials with first indicator `a`, second `b`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2x2 {
    pub counts: [[u64; 2]; 2],
}

impl Table2x2 {
    /// Pearson chi-squared statistic for independence (one degree of
    /// freedom, no continuity correction). A degenerate margin gives 0.
    pub fn chi_squared(&self) -> f64 {
        let [[a, b], [c, d]] = self.counts.map(|r| r.map(|x| x as f64));
        let n = a + b + c + d;
        let margins = (a + b) * (c + d) * (a + c) * (b + d);
        if margins == 0.0 {
            return 0.0;
        }
        let diff = a * d - b * c;
        n * diff * diff / margins
    }

    pub fn p_value(&self) -> f64 {
        let chi = ChiSquared::new(1.0).expect("one degree of freedom");
        1.0 - chi.cdf(self.chi_squared())
    }
}
