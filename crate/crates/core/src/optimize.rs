//! Scalar search routines: golden-section maximization and bisection.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `rel_tol * max(|a|, |b|)` (or
/// `rel_tol` itself near zero). Returns `(x, f(x))`.
pub fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        let scale = a.abs().max(b.abs()).max(1.0e-300);
        if (b - a) <= rel_tol * scale {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    pub iterations: usize,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Bisection for a sign change of `f` on `[lo, hi]`, to absolute width `tol`.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<Bisection>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) || !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "bisection needs lo < hi and tol > 0 (lo = {lo}, hi = {hi}, tol = {tol})"
        )));
    }
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    let done = |root, iterations| Bisection {
        root,
        iterations,
        f_lo,
        f_hi,
    };
    if f_lo == 0.0 {
        return Ok(done(lo, 0));
    }
    if f_hi == 0.0 {
        return Ok(done(hi, 0));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { lo, hi, f_lo, f_hi });
    }
    let (mut a, mut b, mut fa) = (lo, hi, f_lo);
    let mut iterations = 0;
    while b - a > tol && iterations < max_iter {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        iterations += 1;
        if fm == 0.0 {
            return Ok(done(mid, iterations));
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(done(0.5 * (a + b), iterations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 1.3) * (x - 1.3) + 2.0, 0.0, 3.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bisection_root_and_bracket_errors() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-12, 200).unwrap();
        assert!((r.root - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-6, 100),
            Err(Error::NoBracket { .. })
        ));
        assert!(bisect(Ok, 1.0, 0.0, 1e-6, 100).is_err());
    }
}
