//! Observed return-time sets over a finite window, and their text formats.
//!
//! RTS v1 layout:
//!
//! ```text
//! RTS v1 <n_lo> <n_hi> <count>
//! <hex run lengths, comma separated, alternating 0-runs and 1-runs, starting with a 0-run>
//! # provenance: <free text>
//! # ambiguous: <count>
//! ```

use std::fmt::Write as _;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed integer window `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// `[1, n]`, the Cesàro window.
    pub fn first(n: u64) -> Self {
        Self { lo: 1, hi: n as i64 }
    }

    pub fn len(&self) -> u64 {
        (self.hi - self.lo) as u64 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// `R ∩ window`, bit `i` standing for `n = window.lo + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnSet {
    window: Window,
    bits: BitVec<u64, Lsb0>,
    provenance: String,
    ambiguous: u64,
}

impl ReturnSet {
    pub fn empty(window: Window) -> Self {
        Self {
            window,
            bits: bitvec![u64, Lsb0; 0; window.len() as usize],
            provenance: String::new(),
            ambiguous: 0,
        }
    }

    pub(crate) fn from_parts(window: Window, bits: BitVec<u64, Lsb0>, provenance: String, ambiguous: u64) -> Self {
        debug_assert_eq!(bits.len() as u64, window.len());
        Self {
            window,
            bits,
            provenance,
            ambiguous,
        }
    }

    /// Builds a set from explicit members; out-of-window members are rejected.
    pub fn from_members(window: Window, members: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut r = Self::empty(window);
        for n in members {
            if !window.contains(n) {
                return Err(Error::Format(format!("member {n} outside window {window}")));
            }
            r.bits.set((n - window.lo) as usize, true);
        }
        Ok(r)
    }

    /// Set of `n` in the window satisfying `pred`.
    pub fn from_predicate(window: Window, mut pred: impl FnMut(i64) -> bool) -> Self {
        let mut r = Self::empty(window);
        for n in window.lo..=window.hi {
            if pred(n) {
                r.bits.set((n - window.lo) as usize, true);
            }
        }
        r
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Number of orbit points that landed within the float guard band.
    pub fn ambiguous(&self) -> u64 {
        self.ambiguous
    }

    pub fn contains(&self, n: i64) -> bool {
        self.window.contains(n) && self.bits[(n - self.window.lo) as usize]
    }

    pub fn count(&self) -> u64 {
        self.bits.count_ones() as u64
    }

    pub fn members(&self) -> impl Iterator<Item = i64> + '_ {
        let lo = self.window.lo;
        self.bits.iter_ones().map(move |i| lo + i as i64)
    }

    /// Same window and membership, ignoring provenance.
    pub fn same_bits(&self, other: &Self) -> bool {
        self.window == other.window && self.bits == other.bits
    }

    /// Fraction of `[1, n]` in the set.
    pub fn density(&self, n: u64) -> Result<f64> {
        let words = self.indicator_words(n)?;
        let ones: u64 = words.iter().map(|w| w.count_ones() as u64).sum();
        Ok(ones as f64 / n as f64)
    }

    /// Packed indicator of `[1, n]`: bit `j` of word `j / 64` is `1_R(j + 1)`.
    pub fn indicator_words(&self, n: u64) -> Result<Vec<u64>> {
        let w = self.window;
        if w.lo > 1 || (w.hi as i128) < n as i128 {
            return Err(Error::WindowTooShort {
                lo: w.lo,
                hi: w.hi,
                needed: n,
            });
        }
        let start = (1 - w.lo) as usize;
        let slice = &self.bits[start..start + n as usize];
        let mut packed: BitVec<u64, Lsb0> = BitVec::with_capacity(n as usize);
        packed.extend_from_bitslice(slice);
        packed.set_uninitialized(false);
        Ok(packed.into_vec())
    }

    /// Serializes in RTS v1.
    pub fn to_rts(&self) -> String {
        let mut out = format!("RTS v1 {} {} {}\n", self.window.lo, self.window.hi, self.count());
        let mut runs: Vec<u64> = Vec::new();
        let mut current = false;
        let mut len = 0u64;
        for b in self.bits.iter().by_vals() {
            if b == current {
                len += 1;
            } else {
                runs.push(len);
                current = b;
                len = 1;
            }
        }
        runs.push(len);
        let hex: Vec<String> = runs.iter().map(|r| format!("{r:x}")).collect();
        out.push_str(&hex.join(","));
        out.push('\n');
        let provenance = self.provenance.replace(['\n', '\r'], " ");
        let _ = writeln!(out, "# provenance: {provenance}");
        let _ = writeln!(out, "# ambiguous: {}", self.ambiguous);
        out
    }

    /// Parses RTS v1, checking run totals and the header count.
    pub fn from_rts(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Format("missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "RTS" || fields[1] != "v1" {
            return Err(Error::Format(format!("bad header {header:?}")));
        }
        let num = |s: &str| -> Result<i64> { s.parse().map_err(|_| Error::Format(format!("bad integer {s:?}"))) };
        let window = Window::new(num(fields[2])?, num(fields[3])?).map_err(|e| Error::Format(e.to_string()))?;
        let count: u64 = fields[4]
            .parse()
            .map_err(|_| Error::Format(format!("bad count {:?}", fields[4])))?;
        let body = lines.next().ok_or_else(|| Error::Format("missing run-length line".into()))?;
        let mut bits: BitVec<u64, Lsb0> = BitVec::with_capacity(window.len() as usize);
        let mut value = false;
        for tok in body.trim().split(',') {
            let run = u64::from_str_radix(tok.trim(), 16).map_err(|_| Error::Format(format!("bad run {tok:?}")))?;
            if bits.len() as u64 + run > window.len() {
                return Err(Error::Format("runs exceed window".into()));
            }
            bits.resize(bits.len() + run as usize, value);
            value = !value;
        }
        if bits.len() as u64 != window.len() {
            return Err(Error::Format(format!("runs cover {} of {} positions", bits.len(), window.len())));
        }
        if bits.count_ones() as u64 != count {
            return Err(Error::Format(format!("header count {count} but {} members", bits.count_ones())));
        }
        let mut provenance = String::new();
        let mut ambiguous = 0;
        for line in lines {
            if let Some(p) = line.strip_prefix("# provenance: ") {
                provenance = p.to_string();
            } else if let Some(a) = line.strip_prefix("# ambiguous: ") {
                ambiguous = a.trim().parse().map_err(|_| Error::Format(format!("bad ambiguous count {a:?}")))?;
            } else if !line.trim().is_empty() && !line.starts_with('#') {
                return Err(Error::Format(format!("unexpected line {line:?}")));
            }
        }
        Ok(Self {
            window,
            bits,
            provenance,
            ambiguous,
        })
    }

    /// Plain-text import: one integer per line, blank lines and `#` comments
    /// ignored. Without an explicit window the hull of the members is used.
    pub fn from_plain_text(text: &str, window: Option<Window>) -> Result<Self> {
        let mut members = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let n: i64 = t
                .parse()
                .map_err(|_| Error::Format(format!("line {}: not an integer: {t:?}", i + 1)))?;
            members.push(n);
        }
        let window = match window {
            Some(w) => w,
            None => {
                let lo = members.iter().copied().min().ok_or_else(|| Error::Format("no members and no window".into()))?;
                let hi = members.iter().copied().max().unwrap_or(lo);
                Window::new(lo, hi)?
            }
        };
        Self::from_members(window, members)
    }

    pub fn to_plain_text(&self) -> String {
        let mut out = String::new();
        for n in self.members() {
            let _ = writeln!(out, "{n}");
        }
        out
    }
}
