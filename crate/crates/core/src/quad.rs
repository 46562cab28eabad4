//! Adaptive Gauss–Kronrod quadrature (G7, K15).
//!
//! The worst segment (largest error estimate) is bisected until the summed
//! error estimate meets the requested absolute tolerance. Kronrod nodes are
//! strictly interior, so integrands may be singular at the segment
//! endpoints (open rule); bisection refines geometrically into integrable
//! endpoint singularities.

// node/weight constants transcribed verbatim from the reference tables
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

// 15-point Kronrod abscissae on [0,1] (positive half) and weights, with the
// embedded 7-point Gauss weights. QUADPACK dqk15 constants.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One non-adaptive K15 panel over `[a, b]`: (value, error estimate).
pub(crate) fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    kronrod15(f, a, b)
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    // standard QUADPACK error sharpening
    let err = if err != 0.0 {
        let scale = (200.0 * err / (kronrod.abs() * half.abs()).max(1e-300)).powf(1.5);
        if scale < 1.0 {
            err.max(err * scale)
        } else {
            err
        }
    } else {
        err
    };
    (value, err)
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_with_limit(f, a, b, tol, 4096)
}

pub(crate) fn integrate_with_limit<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_segments: usize,
) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }

    let (value, error) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total_value = value;
    let mut total_error = error;

    while total_error > tol && heap.len() < max_segments {
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in f64
            heap.push(worst);
            break;
        }
        total_value -= worst.value;
        total_error -= worst.error;
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (v, e) = kronrod15(&f, lo, hi);
            total_value += v;
            total_error += e;
            heap.push(Segment {
                a: lo,
                b: hi,
                value: v,
                error: e,
            });
        }
    }

    if !total_value.is_finite() {
        return Err(Error::Numeric(format!(
            "quadrature on [{a}, {b}] produced a non-finite value"
        )));
    }
    if total_error > tol.max(1e-14 * total_value.abs()) * 10.0 {
        return Err(Error::Numeric(format!(
            "quadrature on [{a}, {b}] did not converge: achieved error estimate {total_error:.3e}, requested {tol:.3e}"
        )));
    }
    Ok(total_value)
}
