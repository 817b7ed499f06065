//! Seeded Monte Carlo machinery: random gene-set sampling, null
//! distributions, and empirical p-values.
//!
//! Draw `i` is a pure function of `(seed, i)`: each draw gets its own ChaCha8
//! stream keyed by a splitmix64 expansion of the claim seed and the draw
//! index. Removing, reordering, or parallelizing draws therefore never
//! changes any other draw, and sequential and parallel execution produce
//! bit-identical samples.

use std::collections::{BTreeSet, HashMap};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Generator identification pinned into every report.
pub const RNG_ALGORITHM: &str = "chacha8/splitmix64-subseed/v1";

/// How many fresh sets a resampling statistic may consume per draw before
/// the draw is declared failed.
const MAX_RESAMPLES_PER_DRAW: u64 = 1000;

/// Configuration of one null-model simulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullConfig {
    pub n_iterations: usize,
    pub set_size: usize,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub exclusions: BTreeSet<String>,
    pub seed: u64,
}

/// A statistic's Monte Carlo sample under randomization, plus the observed
/// value it is judged against.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NullDistribution {
    pub statistic_name: String,
    pub observed: f64,
    pub samples: Vec<f64>,
    pub config: NullConfig,
}

/// Tail convention of an empirical test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// Two-sided on magnitudes: count draws with |s| ≥ |observed|.
    TwoSidedAbs,
    /// One-sided upper tail: count draws with s ≥ observed.
    GreaterEqual,
}

/// p-value smoothing. The plain proportion matches the reported values this
/// artifact reproduces; the add-one variant exists for methodological
/// comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    None,
    AddOne,
}

impl Default for Smoothing {
    fn default() -> Self {
        Smoothing::None
    }
}

/// An empirical test: observed statistic, extreme-draw count, and p-value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalTestResult {
    pub observed: f64,
    pub p: f64,
    pub tail: Tail,
    pub n_iterations: usize,
    pub n_as_extreme: usize,
}

#[derive(Debug, Error)]
pub enum NullError {
    #[error("universe too small: need {needed} genes, have {available} after exclusions")]
    UniverseTooSmall { needed: usize, available: usize },
    #[error("set_size must be positive")]
    EmptySetSize,
    #[error("n_iterations must be positive")]
    NoIterations,
    #[error("statistic failed on draw {draw}: {source}")]
    StatisticFailed {
        draw: usize,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error("draw {draw} still failing after {attempts} resamples: {source}")]
    ResamplesExhausted {
        draw: usize,
        attempts: u64,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// ChaCha8 stream for draw `draw` of a simulation seeded with `seed`.
pub fn draw_rng(seed: u64, draw: u64) -> ChaCha8Rng {
    let mut state = seed;
    let a = splitmix64(&mut state);
    let mut state = a ^ draw.wrapping_add(1).wrapping_mul(0xD1B54A32D192ED03);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Unbiased uniform index in `0..m` by rejection sampling.
fn uniform_index(rng: &mut ChaCha8Rng, m: u64) -> u64 {
    debug_assert!(m > 0);
    let zone = (u64::MAX / m) * m;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % m;
        }
    }
}

/// `k` distinct indices from `0..m`, uniform without replacement (partial
/// Fisher-Yates with a sparse swap table).
pub fn sample_distinct_indices(rng: &mut ChaCha8Rng, m: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= m);
    let mut swapped: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let r = j + uniform_index(rng, (m - j) as u64) as usize;
        let vr = *swapped.get(&r).unwrap_or(&r);
        let vj = *swapped.get(&j).unwrap_or(&j);
        out.push(vr);
        swapped.insert(r, vj);
    }
    out
}

/// The sampling universe: positions of non-excluded genes, in universe order.
pub fn filtered_universe(universe: &[String], exclusions: &BTreeSet<String>) -> Vec<usize> {
    universe
        .iter()
        .enumerate()
        .filter(|(_, g)| !exclusions.contains(*g))
        .map(|(i, _)| i)
        .collect()
}

fn check_config(config: &NullConfig, available: usize) -> Result<(), NullError> {
    if config.set_size == 0 {
        return Err(NullError::EmptySetSize);
    }
    if config.n_iterations == 0 {
        return Err(NullError::NoIterations);
    }
    if config.set_size > available {
        return Err(NullError::UniverseTooSmall { needed: config.set_size, available });
    }
    Ok(())
}

/// Gene indices (into `universe`) for draw `draw`, excluding configured
/// symbols. Pure in `(universe order, config, draw)`.
pub fn sample_index_set_at(
    universe: &[String],
    config: &NullConfig,
    draw: u64,
) -> Result<Vec<usize>, NullError> {
    let pool = filtered_universe(universe, &config.exclusions);
    check_config(config, pool.len())?;
    let mut rng = draw_rng(config.seed, draw);
    Ok(sample_distinct_indices(&mut rng, pool.len(), config.set_size).into_iter().map(|i| pool[i]).collect())
}

/// All `n_iterations` random gene sets, in draw order.
pub fn sample_gene_sets(
    universe: &[String],
    config: &NullConfig,
) -> Result<Vec<Vec<String>>, NullError> {
    let pool = filtered_universe(universe, &config.exclusions);
    check_config(config, pool.len())?;
    let mut sets = Vec::with_capacity(config.n_iterations);
    for draw in 0..config.n_iterations as u64 {
        let mut rng = draw_rng(config.seed, draw);
        let set = sample_distinct_indices(&mut rng, pool.len(), config.set_size)
            .into_iter()
            .map(|i| universe[pool[i]].clone())
            .collect();
        sets.push(set);
    }
    Ok(sets)
}

type BoxErr = Box<dyn std::error::Error + Send + Sync>;

/// Per-draw outcome of a resampling statistic: a value, or a request to
/// draw a fresh set (failed fits are resampled, not dropped), or a fatal
/// error.
pub enum DrawOutcome {
    Value(f64),
    Resample(BoxErr),
}

fn run_draw<F>(
    pool: &[usize],
    config: &NullConfig,
    draw: u64,
    statistic: &F,
) -> Result<(f64, u64), NullError>
where
    F: Fn(&[usize]) -> Result<DrawOutcome, BoxErr> + Sync,
{
    let mut rng = draw_rng(config.seed, draw);
    let mut resamples = 0u64;
    loop {
        let set: Vec<usize> = sample_distinct_indices(&mut rng, pool.len(), config.set_size)
            .into_iter()
            .map(|i| pool[i])
            .collect();
        match statistic(&set) {
            Ok(DrawOutcome::Value(v)) => return Ok((v, resamples)),
            Ok(DrawOutcome::Resample(err)) => {
                resamples += 1;
                if resamples >= MAX_RESAMPLES_PER_DRAW {
                    return Err(NullError::ResamplesExhausted {
                        draw: draw as usize,
                        attempts: resamples,
                        source: err,
                    });
                }
            }
            Err(err) => return Err(NullError::StatisticFailed { draw: draw as usize, source: err }),
        }
    }
}

#[cfg(feature = "parallel")]
fn collect_draws<F>(
    pool: &[usize],
    config: &NullConfig,
    statistic: &F,
) -> Result<Vec<(f64, u64)>, NullError>
where
    F: Fn(&[usize]) -> Result<DrawOutcome, BoxErr> + Sync,
{
    use rayon::prelude::*;
    (0..config.n_iterations as u64)
        .into_par_iter()
        .map(|draw| run_draw(pool, config, draw, statistic))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn collect_draws<F>(
    pool: &[usize],
    config: &NullConfig,
    statistic: &F,
) -> Result<Vec<(f64, u64)>, NullError>
where
    F: Fn(&[usize]) -> Result<DrawOutcome, BoxErr> + Sync,
{
    (0..config.n_iterations as u64)
        .map(|draw| run_draw(pool, config, draw, statistic))
        .collect()
}

/// Recomputes `statistic` on one random gene set per draw. The statistic
/// receives gene indices into `universe`; errors are tagged with the draw
/// index. `observed` is supplied by the caller.
pub fn null_distribution<F, E>(
    statistic_name: &str,
    observed: f64,
    universe: &[String],
    config: &NullConfig,
    statistic: F,
) -> Result<NullDistribution, NullError>
where
    F: Fn(&[usize]) -> Result<f64, E> + Sync,
    E: std::error::Error + Send + Sync + 'static,
{
    let (dist, _) = null_distribution_resampling(statistic_name, observed, universe, config, |set| {
        statistic(set).map(DrawOutcome::Value).map_err(|e| Box::new(e) as BoxErr)
    })?;
    Ok(dist)
}

/// Like [`null_distribution`] but the statistic may ask for a fresh set
/// (e.g. a non-converging model fit); retries stay inside the draw's own
/// RNG stream so other draws are unaffected. Returns the total number of
/// resampled sets alongside the distribution.
pub fn null_distribution_resampling<F>(
    statistic_name: &str,
    observed: f64,
    universe: &[String],
    config: &NullConfig,
    statistic: F,
) -> Result<(NullDistribution, u64), NullError>
where
    F: Fn(&[usize]) -> Result<DrawOutcome, BoxErr> + Sync,
{
    let pool = filtered_universe(universe, &config.exclusions);
    check_config(config, pool.len())?;
    let results = collect_draws(&pool, config, &statistic)?;
    let mut samples = Vec::with_capacity(results.len());
    let mut total_resamples = 0;
    for (v, r) in results {
        samples.push(v);
        total_resamples += r;
    }
    let dist = NullDistribution {
        statistic_name: statistic_name.to_string(),
        observed,
        samples,
        config: config.clone(),
    };
    Ok((dist, total_resamples))
}

/// Empirical p-value of `observed` against `samples` under the given tail.
pub fn empirical_p(
    observed: f64,
    samples: &[f64],
    tail: Tail,
    smoothing: Smoothing,
) -> EmpiricalTestResult {
    assert!(!samples.is_empty(), "empirical p over an empty null");
    let n_as_extreme = samples
        .iter()
        .filter(|&&s| match tail {
            Tail::TwoSidedAbs => s.abs() >= observed.abs(),
            Tail::GreaterEqual => s >= observed,
        })
        .count();
    let n = samples.len();
    let p = match smoothing {
        Smoothing::None => n_as_extreme as f64 / n as f64,
        Smoothing::AddOne => (n_as_extreme + 1) as f64 / (n + 1) as f64,
    };
    EmpiricalTestResult { observed, p, tail, n_iterations: n, n_as_extreme }
}

/// Two-sided empirical p: the plain proportion of draws whose magnitude is
/// at least the observed magnitude.
pub fn empirical_p_two_sided(observed: f64, null: &NullDistribution) -> EmpiricalTestResult {
    empirical_p(observed, &null.samples, Tail::TwoSidedAbs, Smoothing::None)
}

/// One-sided upper-tail empirical p: the plain proportion of draws at least
/// as large as the observed value.
pub fn empirical_p_greater_equal(observed: f64, null: &NullDistribution) -> EmpiricalTestResult {
    empirical_p(observed, &null.samples, Tail::GreaterEqual, Smoothing::None)
}

/// One CSV header cell naming a null sample column.
fn csv_header_cell(dist: &NullDistribution) -> String {
    format!(
        "{};seed={};n_iterations={}",
        dist.statistic_name, dist.config.seed, dist.config.n_iterations
    )
}

/// Renders null samples as CSV: one self-describing header cell per
/// distribution, one draw per row. All distributions must have the same
/// length. Values use shortest round-trip formatting, so the bytes are a
/// stable function of the samples.
pub fn render_null_samples_csv(dists: &[&NullDistribution]) -> String {
    assert!(!dists.is_empty());
    let n = dists[0].samples.len();
    assert!(dists.iter().all(|d| d.samples.len() == n), "column length mismatch");
    let mut out = String::new();
    let headers: Vec<String> = dists.iter().map(|d| csv_header_cell(d)).collect();
    out.push_str(&headers.join(","));
    out.push('\n');
    for i in 0..n {
        let row: Vec<String> = dists.iter().map(|d| format!("{:?}", d.samples[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
