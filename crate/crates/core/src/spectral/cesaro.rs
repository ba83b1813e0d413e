//! Direct evaluation of `(1/N) Σ_{n=1}^N e^{2πiθn} 1_R(n)`.
//!
//! The indicator is packed 64 positions per word. For a fixed `θ`, each
//! word's contribution is `z^{64w+1} · Σ_b L[b][byte_b]` where `L[b][v]` is
//! the phasor sum of byte value `v` at byte position `b`, so one word costs
//! eight table lookups and one complex multiply. The running phasor
//! `z^{64w+1}` is re-derived exactly from a fixed-point phase every
//! [`RESYNC`] words, which keeps the rounding error from compounding.

use num_complex::Complex64;

use crate::error::Result;
use crate::group::fixed128_to_f64;
use crate::orbit::{CompensatedSum, ReturnSet};

const RESYNC: usize = 64;

/// Packed indicator of `R ∩ [1, N]`.
#[derive(Clone, Debug)]
pub struct Indicator {
    words: Vec<u64>,
    n: u64,
}

/// `θ` as a 128-bit fixed-point phase (exact for any `f64` in `[0, 1)`).
fn theta_fixed(theta: f64) -> u128 {
    let t = theta.rem_euclid(1.0);
    let t = if t >= 1.0 { 0.0 } else { t };
    let hi = (t * 18446744073709551616.0).floor();
    let lo = ((t * 18446744073709551616.0 - hi) * 18446744073709551616.0).floor();
    ((hi as u64 as u128) << 64) | lo as u64 as u128
}

fn phasor(phase: u128) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * fixed128_to_f64(phase)).sin_cos();
    Complex64::new(c, s)
}

impl Indicator {
    pub fn new(r: &ReturnSet, n: u64) -> Result<Self> {
        Ok(Self {
            words: r.indicator_words(n)?,
            n,
        })
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// `1_R(n)` for `1 ≤ n ≤ N`.
    pub fn get(&self, n: u64) -> bool {
        let j = n - 1;
        (self.words[(j / 64) as usize] >> (j % 64)) & 1 == 1
    }

    /// `Σ_{n=1}^{m} e^{2πiθn} 1_R(n)` for `m ≤ N`.
    pub fn sum(&self, theta: f64, m: u64) -> Complex64 {
        let m = m.min(self.n);
        let full_words = (m / 64) as usize;
        let tail_bits = m % 64;
        let tf = theta_fixed(theta);
        let z = phasor(tf);

        let mut table = vec![[Complex64::new(0.0, 0.0); 256]; 8];
        let mut pow = [Complex64::new(1.0, 0.0); 8];
        for (j, p) in pow.iter_mut().enumerate() {
            *p = phasor(tf.wrapping_mul(j as u128));
        }
        for (b, slot) in table.iter_mut().enumerate() {
            let shift = phasor(tf.wrapping_mul(8 * b as u128));
            for v in 1usize..256 {
                let low = v.trailing_zeros() as usize;
                slot[v] = slot[v & (v - 1)] + pow[low];
            }
            for entry in slot.iter_mut() {
                *entry *= shift;
            }
        }

        let step = phasor(tf.wrapping_mul(64));
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        let mut base = z;
        let word_total = full_words + usize::from(tail_bits > 0);
        for w in 0..word_total {
            if w % RESYNC == 0 {
                base = phasor(tf.wrapping_mul(64 * w as u128 + 1));
            }
            let mut word = self.words[w];
            if w == full_words {
                word &= (1u64 << tail_bits) - 1;
            }
            if word != 0 {
                let mut inner = Complex64::new(0.0, 0.0);
                for (b, slot) in table.iter().enumerate() {
                    inner += slot[((word >> (8 * b)) & 0xff) as usize];
                }
                let term = base * inner;
                re.add(term.re);
                im.add(term.im);
            }
            base *= step;
        }
        Complex64::new(re.value(), im.value())
    }

    /// `A_m(θ) = (1/m) Σ_{n=1}^{m} e^{2πiθn} 1_R(n)`.
    pub fn average(&self, theta: f64, m: u64) -> Complex64 {
        if m == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.sum(theta, m) / m as f64
    }
}

/// `(1/N) Σ_{n=1}^N e^{2πiθn} 1_R(n)`; requires `[1, N] ⊆ R.window`.
pub fn cesaro_average(r: &ReturnSet, theta: f64, n: u64) -> Result<Complex64> {
    Ok(Indicator::new(r, n)?.average(theta, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::Window;

    fn naive(r: &ReturnSet, theta: f64, n: u64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 1..=n as i64 {
            if r.contains(k) {
                let (sn, c) = (std::f64::consts::TAU * (theta * k as f64).rem_euclid(1.0)).sin_cos();
                s += Complex64::new(c, sn);
            }
        }
        s / n as f64
    }

    #[test]
    fn all_ones_at_zero() {
        let r = ReturnSet::from_predicate(Window::first(1000), |_| true);
        let a = cesaro_average(&r, 0.0, 1000).unwrap();
        assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn evens_at_half() {
        let r = ReturnSet::from_predicate(Window::first(4096), |n| n % 2 == 0);
        let a = cesaro_average(&r, 0.5, 4096).unwrap();
        assert!((a - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        let theta = 2f64.sqrt() - 1.0;
        let b = cesaro_average(&r, theta, 4096).unwrap();
        let bound = 2.0 / (4096.0 * (Complex64::new(0.0, 2.0 * std::f64::consts::TAU * theta).exp() - 1.0).norm());
        assert!(b.norm() <= bound + 1e-12, "{} > {bound}", b.norm());
    }

    #[test]
    fn matches_naive_with_ragged_tail() {
        let r = ReturnSet::from_predicate(Window::new(-3, 10_000).unwrap(), |n| (n * n + 3 * n) % 7 < 3);
        for &(theta, n) in &[(0.123456789, 10_000u64), (0.5, 777), (0.9999, 6401), (0.0, 65)] {
            let fast = cesaro_average(&r, theta, n).unwrap();
            let slow = naive(&r, theta, n);
            assert!((fast - slow).norm() < 1e-11, "θ={theta} N={n}: {fast} vs {slow}");
        }
    }

    #[test]
    fn window_must_cover_range() {
        let r = ReturnSet::empty(Window::new(2, 100).unwrap());
        assert!(cesaro_average(&r, 0.1, 50).is_err());
    }
}
