//! Classical mean-median symmetry statistics for side-by-side comparison.
//!
//! - CM: `√n·(mean − median)/s`, `s` the n−1 sample standard deviation.
//! - MGG: `√n·(mean − median)/J`, `J = √(π/2)·(1/n)·Σ|Xᵢ − median|`.
//! - SGN: centered count of exceedances of the sample mean,
//!   `(Σ I(Xᵢ > X̄) − n/2)/√(n/4)`, ties with the mean counting ½.
//!
//! All three are compared against null-simulated two-sided critical values
//! ([`crate::scr_bootstrap::null_statistic_region`] applied to the same
//! statistic), which puts every method on the same calibration footing.

use crate::estimator::SortedSample;
use crate::jel::{check_alpha, Method, TestOutcome};
use crate::scr_bootstrap::CriticalRegion;
use crate::{Error, Result};

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

// midpoint convention for even n
fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Standardized mean-median distance.
pub fn cm_statistic(sample: &SortedSample) -> Result<f64> {
    let x = sample.sorted();
    let n = x.len() as f64;
    let m = mean(x);
    let var = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    if var <= 0.0 {
        return Err(Error::DegenerateSample(
            "zero variance, CM statistic undefined".into(),
        ));
    }
    Ok(n.sqrt() * (m - median_sorted(x)) / var.sqrt())
}

/// Robust-scale analogue of CM using mean absolute deviation from the
/// median.
pub fn mgg_statistic(sample: &SortedSample) -> Result<f64> {
    let x = sample.sorted();
    let n = x.len() as f64;
    let m = mean(x);
    let med = median_sorted(x);
    let j =
        (std::f64::consts::PI / 2.0).sqrt() * x.iter().map(|v| (v - med).abs()).sum::<f64>() / n;
    if j <= 0.0 {
        return Err(Error::DegenerateSample(
            "zero spread, MGG statistic undefined".into(),
        ));
    }
    Ok(n.sqrt() * (m - med) / j)
}

/// Sign statistic: exceedances of the sample mean, ties counting ½.
pub fn sgn_statistic(sample: &SortedSample) -> Result<f64> {
    let x = sample.sorted();
    let n = x.len() as f64;
    let m = mean(x);
    let mut count = 0.0;
    for &v in x {
        if v > m {
            count += 1.0;
        } else if v == m {
            count += 0.5;
        }
    }
    Ok((count - 0.5 * n) / (0.25 * n).sqrt())
}

pub(crate) fn statistic_for(method: Method) -> fn(&SortedSample) -> Result<f64> {
    match method {
        Method::Cm => cm_statistic,
        Method::Mgg => mgg_statistic,
        Method::Sgn => sgn_statistic,
        _ => panic!("{method} is not a competitor statistic"),
    }
}

/// Two-sided decision for SGN/CM/MGG against a pre-computed null-simulated
/// region (strict inequalities; a statistic on the bound does not reject).
pub fn competitor_test(
    method: Method,
    sample: &SortedSample,
    alpha: f64,
    calibration: &CriticalRegion,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    if !matches!(method, Method::Sgn | Method::Cm | Method::Mgg) {
        return Err(Error::Domain(format!(
            "{method} is not a competitor method"
        )));
    }
    let statistic = statistic_for(method)(sample)?;
    Ok(TestOutcome {
        method,
        n: sample.n(),
        statistic,
        p_value: None,
        critical_lower: Some(calibration.c1),
        critical_upper: Some(calibration.c2),
        alpha,
        reject: calibration.rejects(statistic),
        hull_violation: false,
    })
}
