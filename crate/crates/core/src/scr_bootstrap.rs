//! Simulated critical regions for `Δ̂ₙ`.
//!
//! Two sources: with-replacement resampling of the observed data, and
//! simulation from a symmetric null family. Either way the region is the
//! pair of empirical `α/2` and `1−α/2` quantiles of the replicate
//! statistics (type-7 linear interpolation, documented for
//! bit-reproducibility).
//!
//! Replicates are computed in parallel; replicate `b` draws from
//! `stream.substream(b)`, so results do not depend on the schedule.

use rayon::prelude::*;

use crate::distributions::{DistributionSpec, RandomStream};
use crate::estimator::{delta_hat, delta_hat_sorted, SortedSample};
use crate::jel::{check_alpha, Method, TestOutcome};
use crate::{Error, Result};

/// How a [`CriticalRegion`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionSource {
    DataBootstrap,
    NullSimulated,
}

impl RegionSource {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionSource::DataBootstrap => "data-bootstrap",
            RegionSource::NullSimulated => "null-simulated",
        }
    }
}

/// Two-sided critical bounds at level `alpha`.
#[derive(Debug, Clone, Copy)]
pub struct CriticalRegion {
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
    pub replicates: usize,
    pub source: RegionSource,
}

impl CriticalRegion {
    /// Strict two-sided comparison; a statistic exactly on a bound does not
    /// reject.
    pub fn rejects(&self, statistic: f64) -> bool {
        statistic < self.c1 || statistic > self.c2
    }
}

/// Empirical quantile, type 7: linear interpolation at position `p(B−1)`
/// (0-based) between order statistics.
pub(crate) fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

fn region_from_replicates(mut stats: Vec<f64>, alpha: f64, source: RegionSource) -> CriticalRegion {
    stats.sort_unstable_by(f64::total_cmp);
    CriticalRegion {
        c1: quantile_type7(&stats, alpha / 2.0),
        c2: quantile_type7(&stats, 1.0 - alpha / 2.0),
        alpha,
        replicates: stats.len(),
        source,
    }
}

pub(crate) fn bootstrap_replicates(
    sample: &SortedSample,
    b: usize,
    stream: &RandomStream,
) -> Vec<f64> {
    let sorted = sample.sorted();
    let n = sorted.len();
    (0..b as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream.substream(rep);
            let mut resample: Vec<f64> = (0..n)
                .map(|_| sorted[rand::Rng::gen_range(&mut rng, 0..n)])
                .collect();
            resample.sort_unstable_by(f64::total_cmp);
            delta_hat_sorted(&resample)
        })
        .collect()
}

/// Resample the observed data `B` times with replacement and return the
/// empirical `α/2` and `1−α/2` quantiles of the replicate statistics.
pub fn bootstrap_critical_region(
    sample: &SortedSample,
    b: usize,
    alpha: f64,
    stream: &RandomStream,
) -> Result<CriticalRegion> {
    check_alpha(alpha)?;
    if b < 100 {
        return Err(Error::Domain(format!(
            "data bootstrap needs B >= 100, got {b}"
        )));
    }
    let stats = bootstrap_replicates(sample, b, stream);
    Ok(region_from_replicates(
        stats,
        alpha,
        RegionSource::DataBootstrap,
    ))
}

/// Bootstrap symmetry test on observed data.
///
/// The resampling distribution of `Δ̂ₙ*` centers on the observed `Δ̂ₙ`, so
/// the raw quantiles estimate the statistic's sampling spread around its
/// population value, not its null distribution. The test therefore recenters
/// at zero: reject ⇔ `Δ̂ₙ ∉ [c1 − Δ̂ₙ, c2 − Δ̂ₙ]`, and those recentred bounds
/// are the ones recorded in the outcome.
pub fn scr_test(
    sample: &SortedSample,
    b: usize,
    alpha: f64,
    stream: &RandomStream,
) -> Result<TestOutcome> {
    let region = bootstrap_critical_region(sample, b, alpha, stream)?;
    let statistic = delta_hat(sample);
    let lower = region.c1 - statistic;
    let upper = region.c2 - statistic;
    Ok(TestOutcome {
        method: Method::Scr,
        n: sample.n(),
        statistic,
        p_value: None,
        critical_lower: Some(lower),
        critical_upper: Some(upper),
        alpha,
        reject: statistic < lower || statistic > upper,
        hull_violation: false,
    })
}

pub(crate) fn null_statistic_replicates<F>(
    statistic: &F,
    null_spec: &DistributionSpec,
    n: usize,
    b: usize,
    stream: &RandomStream,
) -> Result<Vec<f64>>
where
    F: Fn(&SortedSample) -> Result<f64> + Sync,
{
    (0..b as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream.substream(rep);
            let draw = null_spec.sample(&mut rng, n)?;
            statistic(&SortedSample::new(draw)?)
        })
        .collect()
}

/// Critical region of an arbitrary statistic under samples of size `n`
/// simulated from a symmetric null family.
pub fn null_statistic_region<F>(
    statistic: &F,
    null_spec: &DistributionSpec,
    n: usize,
    b: usize,
    alpha: f64,
    stream: &RandomStream,
) -> Result<CriticalRegion>
where
    F: Fn(&SortedSample) -> Result<f64> + Sync,
{
    check_alpha(alpha)?;
    null_spec.validate()?;
    if !null_spec.is_symmetric() {
        return Err(Error::Domain(format!(
            "null calibration requires a symmetric family, got {null_spec}"
        )));
    }
    if b < 1000 {
        return Err(Error::Domain(format!(
            "null simulation needs B >= 1000, got {b}"
        )));
    }
    if n < 3 {
        return Err(Error::SampleSize { need: 3, got: n });
    }
    let stats = null_statistic_replicates(statistic, null_spec, n, b, stream)?;
    Ok(region_from_replicates(
        stats,
        alpha,
        RegionSource::NullSimulated,
    ))
}

/// Null-simulated critical region for `Δ̂ₙ` itself; this is what the
/// simulation harness calibrates SCR size/power against.
pub fn null_critical_region(
    null_spec: &DistributionSpec,
    n: usize,
    b: usize,
    alpha: f64,
    stream: &RandomStream,
) -> Result<CriticalRegion> {
    null_statistic_region(
        &|s: &SortedSample| Ok(delta_hat(s)),
        null_spec,
        n,
        b,
        alpha,
        stream,
    )
}
