//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! Semi-infinite expectations are mapped onto finite intervals by the
//! distribution module before they get here, so this only ever sees
//! smooth (or piecewise smooth) integrands on a bounded range.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{AoiError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
    /// Number of equal pieces the range is cut into before adapting.
    pub initial_pieces: usize,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            relative: 1e-11,
            absolute: 1e-15,
            initial_pieces: 16,
            max_intervals: 4000,
        }
    }
}

/// Result of a quadrature: value and estimated absolute error.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kron += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    Piece { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(AoiError::InvalidParameter(format!(
            "quadrature bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let pieces = tol.initial_pieces.max(1);
    let width = (hi - lo) / pieces as f64;
    let mut heap = BinaryHeap::with_capacity(tol.max_intervals + pieces);
    let mut total = 0.0;
    let mut total_err = 0.0;
    for k in 0..pieces {
        let pa = lo + width * k as f64;
        let pb = if k + 1 == pieces { hi } else { pa + width };
        let p = kronrod(&f, pa, pb);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }

    loop {
        let target = tol.absolute.max(tol.relative * total.abs());
        if !total.is_finite() {
            return Err(AoiError::Quadrature {
                achieved: f64::INFINITY,
                requested: target,
            });
        }
        if total_err <= target {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(AoiError::Quadrature {
                achieved: total_err,
                requested: target,
            });
        }
        let worst = heap.pop().expect("heap holds at least one piece");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            return Err(AoiError::Quadrature {
                achieved: total_err,
                requested: target,
            });
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift from incremental updates.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(Integral {
        value: sign * value,
        error,
    })
}
