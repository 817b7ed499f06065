//! Deterministic statistical primitives shared by all audits: average
//! ranking with ties, Pearson and Spearman correlation, and per-row sample
//! variances.
//!
//! All accumulation is done in double precision with two-pass
//! (mean-then-deviation) algorithms so results are reproducible across
//! platforms at 1e-12 tolerance.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::expr::FoldChangeMatrix;

/// Which correlation was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrMethod {
    Spearman,
    Pearson,
}

impl std::fmt::Display for CorrMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CorrMethod::Spearman => write!(f, "spearman"),
            CorrMethod::Pearson => write!(f, "pearson"),
        }
    }
}

/// A correlation coefficient together with its sample count and an
/// informational asymptotic p-value.
///
/// The asymptotic p-value comes from the t-approximation
/// `t = r * sqrt((n-2) / (1-r^2))` with `n-2` degrees of freedom. Audit
/// verdicts never use it; significance is always decided against an
/// empirical null.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub method: CorrMethod,
    pub r: f64,
    pub n: usize,
    pub asymptotic_p: Option<f64>,
}

/// Input argument a correlation error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrInput {
    X,
    Y,
}

impl std::fmt::Display for CorrInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CorrInput::X => write!(f, "x"),
            CorrInput::Y => write!(f, "y"),
        }
    }
}

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("input sequences differ in length ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 3 paired observations, got {n}")]
    TooFewSamples { n: usize },
    #[error("non-finite value in input {0}")]
    NonFinite(CorrInput),
    #[error("zero variance in input {0}")]
    ZeroVariance(CorrInput),
}

/// Arithmetic mean. Empty input is a caller bug.
pub fn mean(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "mean of empty slice");
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Two-pass sample variance (n−1 denominator). Requires at least two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    assert!(xs.len() >= 2, "variance needs >= 2 values");
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Ranks 1..n with ties assigned the mean of the rank positions they cover.
///
/// `[5, 5, 7]` ranks as `[1.5, 1.5, 3]`. Input must be nonempty and finite.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    assert!(!xs.is_empty(), "ranking an empty sequence");
    assert!(xs.iter().all(|x| x.is_finite()), "ranking non-finite values");
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());

    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the mean of ranks i+1 ..= j+1
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewSamples { n: x.len() });
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(StatsError::NonFinite(CorrInput::X));
    }
    if !y.iter().all(|v| v.is_finite()) {
        return Err(StatsError::NonFinite(CorrInput::Y));
    }
    Ok(())
}

fn asymptotic_p(r: f64, n: usize) -> Option<f64> {
    let df = (n - 2) as f64;
    if (1.0 - r * r) <= 0.0 {
        return Some(0.0);
    }
    let t = r.abs() * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).ok()?;
    Some(2.0 * (1.0 - dist.cdf(t)))
}

/// Product-moment correlation coefficient of two equal-length sequences.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    check_pair(x, y)?;
    let n = x.len();
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance(CorrInput::X));
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance(CorrInput::Y));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(CorrelationResult { method: CorrMethod::Pearson, r, n, asymptotic_p: asymptotic_p(r, n) })
}

/// Spearman rank correlation: Pearson applied to average ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    check_pair(x, y)?;
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let mut res = pearson_r(&rx, &ry)?;
    res.method = CorrMethod::Spearman;
    Ok(res)
}

/// Sample variance of every fold-change row, aligned with the matrix's gene
/// order. The matrix must have at least two group columns.
pub fn row_variances(fc: &FoldChangeMatrix) -> Vec<f64> {
    assert!(fc.n_groups() >= 2, "row variance needs >= 2 group columns");
    (0..fc.n_genes()).map(|g| sample_variance(fc.row(g))).collect()
}
