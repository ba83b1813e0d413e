//! Distinguishing two return-time sets by their spectra.

use num_complex::Complex64;

use super::cesaro::Indicator;
use super::scan::{default_grid, default_threshold, scan_spectrum, spectral_length};
use crate::error::{Error, Result};
use crate::orbit::ReturnSet;

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Identical return sets on the window.
    ConsistentIsomorphic,
    /// Cesàro averages at `theta` differ in modulus by more than the
    /// tolerance.
    Distinguished {
        theta: f64,
        amplitude_1: Complex64,
        amplitude_2: Complex64,
    },
    /// Different sets, but no detected frequency separates them.
    Inconclusive,
}

/// Compares `R₁` and `R₂` over a common window `[1, N]`.
///
/// The peaks of `R₁` and then `R₂` are tried in ranked order; at each, the
/// other set's Cesàro average is evaluated at the same `θ`. The first
/// frequency whose moduli differ by more than `tol` is reported.
pub fn compare_systems(r1: &ReturnSet, r2: &ReturnSet, tol: f64) -> Result<Verdict> {
    if r1.window() != r2.window() {
        return Err(Error::InvalidWindow {
            lo: r2.window().lo,
            hi: r2.window().hi,
        });
    }
    if r1.same_bits(r2) {
        return Ok(Verdict::ConsistentIsomorphic);
    }
    let n = spectral_length(r1)?;
    let (i1, i2) = (Indicator::new(r1, n)?, Indicator::new(r2, n)?);
    let grid = default_grid(n);
    let threshold = default_threshold(n);
    for r in [r1, r2] {
        for p in scan_spectrum(r, grid, threshold)?.ranked() {
            let a1 = i1.average(p.theta, n);
            let a2 = i2.average(p.theta, n);
            if (a1.norm() - a2.norm()).abs() > tol {
                return Ok(Verdict::Distinguished {
                    theta: p.theta,
                    amplitude_1: a1,
                    amplitude_2: a2,
                });
            }
        }
    }
    Ok(Verdict::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::Window;

    #[test]
    fn identical_sets() {
        let r = ReturnSet::from_predicate(Window::first(1000), |n| n % 3 == 0);
        assert_eq!(compare_systems(&r, &r.clone(), 0.05).unwrap(), Verdict::ConsistentIsomorphic);
    }

    #[test]
    fn different_periods_are_distinguished() {
        let a = ReturnSet::from_predicate(Window::first(4096), |n| n % 2 == 0);
        let b = ReturnSet::from_predicate(Window::first(4096), |n| n % 3 == 0);
        match compare_systems(&a, &b, 0.05).unwrap() {
            Verdict::Distinguished { amplitude_1, amplitude_2, .. } => {
                assert!((amplitude_1.norm() - amplitude_2.norm()).abs() > 0.05)
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn shifted_copy_is_inconclusive() {
        let a = ReturnSet::from_predicate(Window::first(4096), |n| n % 4 == 0);
        let b = ReturnSet::from_predicate(Window::first(4096), |n| n % 4 == 1);
        assert_eq!(compare_systems(&a, &b, 0.05).unwrap(), Verdict::Inconclusive);
    }
}
