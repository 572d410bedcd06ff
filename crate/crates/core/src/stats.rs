//! Statistical plumbing: deterministic reductions, Monte Carlo estimates,
//! two-sample tests, and the special functions backing their p-values.
//!
//! Reductions are fixed-shape pairwise sums, so an ensemble reduced in
//! parallel reproduces the sequential result exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-shape pairwise summation. The splitting depends only on the length,
/// never on thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Two-pass mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let devs: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&devs) / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// Sample variance (unbiased).
pub fn variance(xs: &[f64]) -> f64 {
    let (mean, _) = mean_stderr(xs);
    let devs: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    pairwise_sum(&devs) / (xs.len() as f64 - 1.0)
}

/// Median of a sample (average of the middle pair for even length).
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Uniform Monte Carlo return type: point estimate with its standard error
/// and the bookkeeping needed to audit it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
    /// Trajectories excluded as undetermined; reported, never silently dropped.
    pub excluded: usize,
}

impl McEstimate {
    pub fn from_samples(xs: &[f64], seed: u64, excluded: usize) -> Self {
        let (value, stderr) = mean_stderr(xs);
        McEstimate { value, stderr, n: xs.len(), seed, excluded }
    }

    /// Binomial proportion estimate from a count.
    pub fn from_count(hits: usize, n: usize, seed: u64, excluded: usize) -> Self {
        let p = hits as f64 / n as f64;
        let stderr = (p * (1.0 - p) / n as f64).sqrt();
        McEstimate { value: p, stderr, n, seed, excluded }
    }
}

// ---------------------------------------------------------------------------
// Special functions for p-values
// ---------------------------------------------------------------------------

/// ln Γ(x) by the Lanczos approximation (g=7, n=9), |rel err| < 3e-15 for x>0.
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection formula
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized upper incomplete gamma Q(s, x) = Γ(s,x)/Γ(s), s > 0, x ≥ 0.
/// Series for x < s+1, Lentz continued fraction otherwise.
pub fn gamma_q(s: f64, x: f64) -> f64 {
    assert!(s > 0.0 && x >= 0.0, "gamma_q domain");
    if x == 0.0 {
        return 1.0;
    }
    if x < s + 1.0 {
        // P(s,x) by series, Q = 1 - P
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut a = s;
        for _ in 0..500 {
            a += 1.0;
            term *= x / a;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        1.0 - sum * (-x + s * x.ln() - ln_gamma(s)).exp()
    } else {
        // Q(s,x) by continued fraction (modified Lentz)
        let tiny = 1e-300;
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x + s * x.ln() - ln_gamma(s)).exp() * h
    }
}

/// Survival function of the chi-squared distribution.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    gamma_q(df / 2.0, x / 2.0).clamp(0.0, 1.0)
}

/// Kolmogorov limit distribution Q_KS(λ) = 2 Σ (-1)^{j-1} exp(-2 j² λ²).
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-8 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let t = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += sign * t;
        if t < 1e-18 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p: f64,
    pub n: usize,
    pub m: usize,
}

/// Two-sample Kolmogorov–Smirnov test with the Stephens-corrected asymptotic
/// p-value. With heavily tied samples the p-value is conservative.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("empty sample in KS test".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        let t = x.min(y);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok(KsResult { statistic: d, p: kolmogorov_q(lambda), n, m })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: f64,
    pub p: f64,
}

/// Two-sample chi-square homogeneity test on matched category counts.
/// Low-expectation cells (pooled expectation < 5) are merged into the last
/// viable cell before computing the statistic.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> Result<ChiSquareResult> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InsufficientData("mismatched chi-square categories".into()));
    }
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return Err(Error::InsufficientData("empty sample in chi-square test".into()));
    }
    let total = (na + nb) as f64;

    // Merge cells until every pooled expectation is at least 5.
    let mut cells: Vec<(f64, f64)> = a.iter().zip(b).map(|(&x, &y)| (x as f64, y as f64)).collect();
    let min_pool = 5.0 * total / (na.min(nb) as f64);
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (x, y) in cells.drain(..) {
        acc.0 += x;
        acc.1 += y;
        if acc.0 + acc.1 >= min_pool {
            merged.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        if let Some(last) = merged.last_mut() {
            last.0 += acc.0;
            last.1 += acc.1;
        } else {
            merged.push(acc);
        }
    }
    if merged.len() < 2 {
        // Everything collapsed into one cell: the samples are indistinguishable
        // at this resolution.
        return Ok(ChiSquareResult { statistic: 0.0, df: 1.0, p: 1.0 });
    }

    let mut stat = 0.0;
    for &(x, y) in &merged {
        let pooled = (x + y) / total;
        let ea = na as f64 * pooled;
        let eb = nb as f64 * pooled;
        stat += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    }
    let df = (merged.len() - 1) as f64;
    Ok(ChiSquareResult { statistic: stat, df, p: chi2_sf(stat, df) })
}

/// Kaplan–Meier survival estimate for event times right-censored at per-item
/// censoring times. Returns (time, survival) steps at each event time.
pub fn kaplan_meier(events: &[f64], censored: &[f64]) -> Vec<(f64, f64)> {
    let mut items: Vec<(f64, bool)> = events
        .iter()
        .map(|&t| (t, true))
        .chain(censored.iter().map(|&t| (t, false)))
        .collect();
    items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(b.1.cmp(&a.1)));
    let mut at_risk = items.len() as f64;
    let mut surv = 1.0;
    let mut curve = Vec::new();
    let mut idx = 0;
    while idx < items.len() {
        let t = items[idx].0;
        let mut deaths = 0.0;
        let mut leaving = 0.0;
        while idx < items.len() && items[idx].0 == t {
            if items[idx].1 {
                deaths += 1.0;
            }
            leaving += 1.0;
            idx += 1;
        }
        if deaths > 0.0 {
            surv *= 1.0 - deaths / at_risk;
            curve.push((t, surv));
        }
        at_risk -= leaving;
    }
    curve
}

/// Empirical CDF evaluated at the sorted sample points.
pub fn empirical_cdf(xs: &[f64]) -> Vec<(f64, f64)> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len() as f64;
    v.into_iter().enumerate().map(|(i, x)| (x, (i + 1) as f64 / n)).collect()
}
