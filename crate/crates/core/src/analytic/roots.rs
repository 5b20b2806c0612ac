//! Bracketing root finder.

use crate::error::{AoiError, Result};

/// A located root with the residual at the returned point.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection on `[lo, hi]`; `f(lo)` and `f(hi)` must have opposite signs.
///
/// Stops once `|f(x)| ≤ residual_tol` and the bracket is narrower than
/// `x_tol`, or when the bracket cannot shrink further.
pub fn bisect<F>(f: F, lo: f64, hi: f64, residual_tol: f64, x_tol: f64) -> Result<Root>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(AoiError::Bracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut best = if fa.abs() < fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    for it in 1..=400 {
        let m = a + 0.5 * (b - a);
        if m <= a || m >= b {
            return Ok(Root {
                x: best.0,
                residual: best.1,
                iterations: it,
            });
        }
        let fm = f(m)?;
        if fm.abs() < best.1.abs() {
            best = (m, fm);
        }
        if fm == 0.0 {
            return Ok(Root {
                x: m,
                residual: 0.0,
                iterations: it,
            });
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if best.1.abs() <= residual_tol && (b - a) <= x_tol {
            return Ok(Root {
                x: best.0,
                residual: best.1,
                iterations: it,
            });
        }
    }
    Ok(Root {
        x: best.0,
        residual: best.1,
        iterations: 400,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-14, 1e-14).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn reports_bracket_residuals() {
        let err = bisect(|x| Ok(x * x + 1.0), -1.0, 2.0, 1e-12, 1e-12).unwrap_err();
        match err {
            AoiError::Bracket { f_lo, f_hi, .. } => {
                assert_eq!(f_lo, 2.0);
                assert_eq!(f_hi, 5.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn propagates_evaluation_errors() {
        let r = bisect(|_| Err(AoiError::Degenerate(0.0)), 0.0, 1.0, 1e-9, 1e-9);
        assert!(matches!(r, Err(AoiError::Degenerate(_))));
    }
}
