#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Whether the first-neighbour pruning recursion started at `tau1` keeps
/// `τ_2..τ_k` inside `[0,1]`.
pub fn pruning_valid(tau1: f64, k: usize) -> bool {
    if !(0.0..=1.0).contains(&tau1) {
        return false;
    }
    let mut prev = 1.0 - tau1;
    let (mut kept, mut lost) = (tau1, prev);
    for _ in 2..=k {
        let next = (lost / kept) * prev / (1.0 - prev);
        if !(0.0..=1.0).contains(&next) {
            return false;
        }
        lost += kept * next;
        kept *= 1.0 - next;
        prev = next;
    }
    true
}

fn check(k: usize, step: f64) -> Result<usize> {
    if k < 2 {
        return Err(Error::ThresholdOrder(k));
    }
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::GridStep(step));
    }
    Ok((1.0 / step).round() as usize)
}

fn scan_index(k: usize, points: usize) -> usize {
    let grid = |i: usize| i as f64 / points as f64;
    let mut lowest = points;
    while lowest > 0 && pruning_valid(grid(lowest - 1), k) {
        lowest -= 1;
    }
    lowest
}

/// Smallest grid value `τ_1 = i·step` such that it and every larger grid value
/// keep the recursion valid up to order `k`.
///
/// The grid is `i / N` with `N = round(1/step)`, so simple fractions such as
/// 1/2 are hit exactly.
pub fn threshold_scan(k: usize, step: f64) -> Result<f64> {
    let points = check(k, step)?;
    Ok(scan_index(k, points) as f64 / points as f64)
}

/// [`threshold_scan`] followed by bisection inside the last grid cell down to
/// width `tolerance`. Returns the valid end of the final bracket.
pub fn threshold_refine(k: usize, step: f64, tolerance: f64) -> Result<f64> {
    let points = check(k, step)?;
    let i = scan_index(k, points);
    let mut hi = i as f64 / points as f64;
    if i == 0 {
        return Ok(hi);
    }
    let mut lo = (i - 1) as f64 / points as f64;
    let tolerance = tolerance.max(f64::EPSILON);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if pruning_valid(mid, k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    /// Exact edge of the valid region for order `k`.
    fn exact(k: usize) -> f64 {
        let c = (PI / (k as f64 + 2.0)).cos();
        1.0 - 1.0 / (4.0 * c * c)
    }

    #[test]
    fn low_orders() {
        assert_eq!(threshold_scan(2, 1e-4).unwrap(), 0.5);
        assert!((threshold_scan(3, 1e-4).unwrap() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-4);
        assert!((threshold_scan(4, 1e-4).unwrap() - 2.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn scan_brackets_exact_edge() {
        for k in [2, 3, 5, 8, 10, 15, 25] {
            let t = threshold_scan(k, 1e-4).unwrap();
            let e = exact(k);
            assert!(t >= e - 1e-12 && t < e + 1e-4 + 1e-12, "k = {k}: {t} vs {e}");
            let r = threshold_refine(k, 1e-4, 1e-10).unwrap();
            assert!((r - e).abs() < 1e-8, "k = {k}: {r} vs {e}");
        }
    }

    #[test]
    fn monotone_and_bounded() {
        let step = 1e-3;
        let mut last = 0.0;
        for k in 2..=40 {
            let t = threshold_scan(k, step).unwrap();
            assert!(t >= last);
            assert!(t <= 0.75 + step);
            last = t;
        }
    }

    #[test]
    fn three_quarters_is_always_valid() {
        for k in [2, 10, 100, 1000] {
            assert!(pruning_valid(0.75, k));
            assert!(pruning_valid(1.0, k));
        }
        assert!(!pruning_valid(0.6, 3));
        assert!(pruning_valid(0.6, 2));
    }

    #[test]
    fn argument_checks() {
        assert_eq!(threshold_scan(1, 1e-3), Err(Error::ThresholdOrder(1)));
        assert_eq!(threshold_scan(3, 0.0), Err(Error::GridStep(0.0)));
        assert!(threshold_scan(3, f64::NAN).is_err());
    }
}
