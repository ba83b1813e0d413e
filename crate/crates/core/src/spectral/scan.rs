//! Spectrum scan: one oversampled FFT, local maxima, golden-section
//! refinement, and the amplitude/convergence acceptance rule.
//!
//! The convergence gap `|A_N − A_{N/2}|` is measured at the refined
//! frequency. Measured at a grid point it would not separate peaks from
//! noise: a true peak that sits `u/N` off the grid has
//! `|A_N − A_{N/2}| ≈ |A|·|tan(πu/2)|`, which is as large as a sidelobe's.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::cesaro::Indicator;
use crate::error::{Error, Result};
use crate::orbit::ReturnSet;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Default acceptance threshold `20/√N`.
pub fn default_threshold(n: u64) -> f64 {
    20.0 / (n as f64).sqrt()
}

/// Default grid: the smallest power of two at least `4N`.
pub fn default_grid(n: u64) -> usize {
    (4 * n as usize).next_power_of_two()
}

/// A detected frequency `λ = e^{2πiθ}` with its Cesàro estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumPeak {
    pub theta: f64,
    pub amplitude: Complex64,
    pub convergence_gap: f64,
    pub n_used: u64,
    /// Set when the refinement bracket was not unimodal or was narrower
    /// than the requested tolerance.
    pub flagged: bool,
}

/// Result of [`scan_spectrum`].
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub n: u64,
    pub grid_size: usize,
    pub threshold: f64,
    /// Accepted peaks in ascending `θ`.
    pub peaks: Vec<SpectrumPeak>,
    pub warnings: Vec<String>,
}

impl Spectrum {
    /// Peaks by descending amplitude, ties by ascending `θ`.
    pub fn ranked(&self) -> Vec<SpectrumPeak> {
        let mut p = self.peaks.clone();
        p.sort_by(|a, b| {
            b.amplitude
                .norm()
                .total_cmp(&a.amplitude.norm())
                .then(a.theta.total_cmp(&b.theta))
        });
        p
    }
}

/// Window length used for spectra: positions `[1, hi]`.
pub fn spectral_length(r: &ReturnSet) -> Result<u64> {
    let w = r.window();
    if w.lo > 1 || w.hi < 1 {
        return Err(Error::WindowTooShort {
            lo: w.lo,
            hi: w.hi,
            needed: 1,
        });
    }
    Ok(w.hi as u64)
}

/// `A_N(j/G)` for `j = 0..G`, by a single inverse FFT.
pub fn spectrum_grid(r: &ReturnSet, n: u64, grid_size: usize) -> Result<Vec<Complex64>> {
    if (grid_size as u128) < 4 * n as u128 {
        return Err(Error::GridTooSmall { grid: grid_size, len: n });
    }
    let ind = Indicator::new(r, n)?;
    let mut buf = vec![Complex64::new(0.0, 0.0); grid_size];
    for k in 1..=n {
        if ind.get(k) {
            buf[k as usize] = Complex64::new(1.0, 0.0);
        }
    }
    FftPlanner::new().plan_fft_inverse(grid_size).process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    Ok(buf)
}

/// Golden-section maximization of `|A_N|` on `[θ₀ − h, θ₀ + h]`.
fn golden_max(ind: &Indicator, n: u64, theta0: f64, half_width: f64, tol: f64) -> (f64, Complex64, bool) {
    let f = |t: f64| ind.average(t, n);
    if tol >= 2.0 * half_width {
        return (theta0.rem_euclid(1.0), f(theta0), true);
    }
    let (mut a, mut b) = (theta0 - half_width, theta0 + half_width);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c).norm(), f(d).norm());
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c).norm();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d).norm();
        }
    }
    let mid = 0.5 * (a + b);
    let edge = theta0 - half_width + tol;
    let flagged = mid <= edge || mid >= theta0 + half_width - tol;
    (mid.rem_euclid(1.0), f(mid), flagged)
}

fn make_peak(ind: &Indicator, n: u64, theta: f64, amplitude: Complex64, flagged: bool) -> SpectrumPeak {
    let half = ind.average(theta, n / 2);
    SpectrumPeak {
        theta,
        amplitude,
        convergence_gap: (amplitude - half).norm(),
        n_used: n,
        flagged,
    }
}

/// Refines a coarse peak within `±1/G` (default grid) to width `tol`.
pub fn refine_peak(r: &ReturnSet, theta0: f64, tol: f64) -> Result<SpectrumPeak> {
    let n = spectral_length(r)?;
    refine_peak_with(r, theta0, 1.0 / default_grid(n) as f64, tol)
}

/// Refines within `±half_width` to width `tol`.
pub fn refine_peak_with(r: &ReturnSet, theta0: f64, half_width: f64, tol: f64) -> Result<SpectrumPeak> {
    let n = spectral_length(r)?;
    let ind = Indicator::new(r, n)?;
    let (theta, amp, flagged) = golden_max(&ind, n, theta0, half_width, tol);
    Ok(make_peak(&ind, n, theta, amp, flagged))
}

/// Detects the spectrum of `R` on `[1, N]`, `N = R.window.hi`.
///
/// Candidates are grid local maxima above `0.9·threshold` (scalloping loss
/// at 4× oversampling is below 3%). Each is refined and accepted iff
/// `|A_N| ≥ threshold` and `|A_N − A_{N/2}| ≤ threshold/2`. Peaks closer
/// than `0.5/N` are merged, keeping the stronger.
pub fn scan_spectrum(r: &ReturnSet, grid_size: usize, threshold: f64) -> Result<Spectrum> {
    let n = spectral_length(r)?;
    let grid = spectrum_grid(r, n, grid_size)?;
    let ind = Indicator::new(r, n)?;
    let mut warnings = Vec::new();
    let count = ind.count();
    if count == 0 {
        warnings.push("return set is empty on [1, N]; spectrum is trivial".to_string());
    } else if count == n {
        warnings.push("return set is all of [1, N]; spectrum is trivial".to_string());
    }

    let g = grid.len();
    let mag: Vec<f64> = grid.iter().map(|c| c.norm()).collect();
    let candidates: Vec<usize> = (0..g)
        .filter(|&j| {
            let m = mag[j];
            m >= 0.9 * threshold && m >= mag[(j + g - 1) % g] && m > mag[(j + 1) % g]
        })
        .collect();
    let step = 1.0 / g as f64;
    let tol = (step * 1e-4).max(1e-14);
    let mut peaks: Vec<SpectrumPeak> = candidates
        .par_iter()
        .map(|&j| {
            let (theta, amp, flagged) = golden_max(&ind, n, j as f64 * step, step, tol);
            make_peak(&ind, n, theta, amp, flagged)
        })
        .filter(|p| p.amplitude.norm() >= threshold && p.convergence_gap <= threshold / 2.0)
        .collect();
    peaks.sort_by(|a, b| a.theta.total_cmp(&b.theta));

    let min_sep = 0.5 / n as f64;
    let mut merged: Vec<SpectrumPeak> = Vec::with_capacity(peaks.len());
    for p in peaks {
        match merged.last_mut() {
            Some(last) if p.theta - last.theta < min_sep => {
                if p.amplitude.norm() > last.amplitude.norm() {
                    *last = p;
                }
            }
            _ => merged.push(p),
        }
    }
    if merged.len() >= 2 {
        let first = merged[0].theta;
        let last = merged[merged.len() - 1].theta;
        if first + 1.0 - last < min_sep {
            let tail = merged.pop().expect("len checked");
            if tail.amplitude.norm() > merged[0].amplitude.norm() {
                merged[0] = tail;
                merged.sort_by(|a, b| a.theta.total_cmp(&b.theta));
            }
        }
    }
    // Snap the peak at the origin so it is recognizable downstream.
    for p in merged.iter_mut() {
        if p.theta.min(1.0 - p.theta) < min_sep {
            p.theta = 0.0;
        }
    }
    merged.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    Ok(Spectrum {
        n,
        grid_size,
        threshold,
        peaks: merged,
        warnings,
    })
}

/// Convergence classification of a Cesàro sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convergence {
    Converged,
    ConvergingToZero,
    NotConverged,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientEstimate {
    /// Average at the largest `N` of the schedule.
    pub value: Complex64,
    pub averages: Vec<(u64, Complex64)>,
    /// `|A_{N_{i+1}} − A_{N_i}|`.
    pub differences: Vec<f64>,
    pub threshold: f64,
    pub verdict: Convergence,
}

/// Evaluates `A_N(θ)` along an increasing schedule of `N`.
///
/// With `t = 20/√N_max`: the verdict is "converging to 0" when the final
/// average is below `t` and the last difference is below `t`; "converged"
/// when the final average is at least `t` and every difference in the second
/// half of the schedule is at most `t/2`; otherwise "not converged".
pub fn estimate_coefficient(r: &ReturnSet, theta: f64, schedule: &[u64]) -> Result<CoefficientEstimate> {
    let n_max = *schedule.last().ok_or(Error::InvalidWindow { lo: 1, hi: 0 })?;
    if schedule.windows(2).any(|w| w[0] >= w[1]) || schedule[0] == 0 {
        return Err(Error::InvalidWindow {
            lo: schedule[0] as i64,
            hi: n_max as i64,
        });
    }
    let ind = Indicator::new(r, n_max)?;
    let averages: Vec<(u64, Complex64)> = schedule.iter().map(|&m| (m, ind.average(theta, m))).collect();
    let differences: Vec<f64> = averages.windows(2).map(|w| (w[1].1 - w[0].1).norm()).collect();
    let value = averages.last().expect("non-empty").1;
    let threshold = default_threshold(n_max);
    let tail = &differences[differences.len() / 2..];
    let verdict = if value.norm() < threshold && differences.last().is_none_or(|&d| d < threshold) {
        Convergence::ConvergingToZero
    } else if value.norm() >= threshold && tail.iter().all(|&d| d <= threshold / 2.0) {
        Convergence::Converged
    } else {
        Convergence::NotConverged
    };
    Ok(CoefficientEstimate {
        value,
        averages,
        differences,
        threshold,
        verdict,
    })
}

/// Dyadic schedule `N_max/2^k, ..., N_max/2, N_max` with `levels` entries.
pub fn dyadic_schedule(n_max: u64, levels: u32) -> Vec<u64> {
    let mut s: Vec<u64> = (0..levels).rev().map(|k| n_max >> k).filter(|&m| m > 0).collect();
    s.dedup();
    s
}
