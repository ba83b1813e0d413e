//! Integer relations `Σ kᵢθᵢ − k₀ ≈ 0` among detected frequencies.

use super::lattice::{hnf, lll, Row};
use crate::error::{Error, Result};

/// Largest problem the exhaustive mode accepts.
pub const EXHAUSTIVE_MAX_FREQS: usize = 4;
pub const EXHAUSTIVE_MAX_HEIGHT: u64 = 100;

/// `δ_rel = max(1e-7, 10·resolution)`.
pub fn relation_tolerance(resolution: f64) -> f64 {
    (10.0 * resolution).max(1e-7)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationMode {
    Exhaustive,
    LatticeReduction,
}

/// Lattice of relations found at height `H`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationLattice {
    /// Rows `(k₁, ..., k_m, k₀)` in Hermite normal form.
    pub basis: Vec<Vec<i64>>,
    pub height: u64,
    pub tolerance: f64,
    pub mode: RelationMode,
}

impl RelationLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

fn residual(k: &[i128], thetas: &[f64]) -> (f64, i128) {
    let s: f64 = k.iter().zip(thetas).map(|(&c, &t)| c as f64 * t).sum();
    let k0 = s.round();
    (s - k0, k0 as i128)
}

fn finish(found: Vec<Row>, height: u64, tolerance: f64, mode: RelationMode) -> RelationLattice {
    let basis = hnf(&found)
        .into_iter()
        .map(|r| r.into_iter().map(|x| x as i64).collect())
        .collect();
    RelationLattice {
        basis,
        height,
        tolerance,
        mode,
    }
}

/// Exhaustive search over `|kᵢ| ≤ H` for at most four frequencies: all but
/// the last coefficient are enumerated and the last is looked up in a table
/// of `frac(k_m·θ_m)` sorted by value.
pub fn detect_relations(thetas: &[f64], height: u64, tolerance: f64) -> Result<RelationLattice> {
    let m = thetas.len();
    if m > EXHAUSTIVE_MAX_FREQS || height > EXHAUSTIVE_MAX_HEIGHT {
        return Err(Error::ExhaustiveLimit { count: m, height });
    }
    if m == 0 {
        return Ok(finish(vec![], height, tolerance, RelationMode::Exhaustive));
    }
    let h = height as i128;
    let last = thetas[m - 1];
    let mut table: Vec<(f64, i128)> = (-h..=h)
        .map(|k| ((k as f64 * last).rem_euclid(1.0), k))
        .collect();
    table.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut found: Vec<Row> = Vec::new();
    let mut prefix = vec![-h; m - 1];
    loop {
        let s: f64 = prefix.iter().zip(thetas).map(|(&c, &t)| c as f64 * t).sum();
        // Need frac(k_m θ_m) ≈ frac(−s).
        let target = (-s).rem_euclid(1.0);
        for probe in [target - tolerance, target - 1.0 - tolerance, target + 1.0 - tolerance] {
            let start = table.partition_point(|e| e.0 < probe);
            for &(v, km) in &table[start..] {
                if v > probe + 2.0 * tolerance {
                    break;
                }
                let mut k = prefix.clone();
                k.push(km);
                if k.iter().all(|&x| x == 0) {
                    continue;
                }
                let (res, k0) = residual(&k, thetas);
                if res.abs() < tolerance {
                    k.push(k0);
                    found.push(k);
                }
            }
        }
        let mut i = 0;
        loop {
            if i == prefix.len() {
                return Ok(finish(found, height, tolerance, RelationMode::Exhaustive));
            }
            prefix[i] += 1;
            if prefix[i] <= h {
                break;
            }
            prefix[i] = -h;
            i += 1;
        }
    }
}

/// Lattice-reduction mode: LLL on `[eᵢ | round(W·θᵢ)]` and `[0 | W]` with
/// `W ≈ 1/δ`; each reduced row with `|kᵢ| ≤ H` is verified directly.
pub fn detect_relations_lll(thetas: &[f64], height: u64, tolerance: f64) -> RelationLattice {
    let found = lll_candidates(thetas, height, tolerance);
    finish(found, height, tolerance, RelationMode::LatticeReduction)
}

/// Verified relation rows `(k₁..k_m, k₀)` from one LLL pass.
pub(crate) fn lll_candidates(thetas: &[f64], height: u64, tolerance: f64) -> Vec<Row> {
    let m = thetas.len();
    if m == 0 {
        return vec![];
    }
    let w = (1.0 / tolerance).round().max(1.0) as i128;
    let mut rows: Vec<Row> = (0..m)
        .map(|i| {
            let mut r = vec![0i128; m + 1];
            r[i] = 1;
            r[m] = (thetas[i].rem_euclid(1.0) * w as f64).round() as i128;
            r
        })
        .collect();
    let mut last = vec![0i128; m + 1];
    last[m] = w;
    rows.push(last);
    lll(&rows)
        .into_iter()
        .filter_map(|r| {
            let k: Row = r[..m].to_vec();
            if k.iter().all(|&x| x == 0) || k.iter().any(|&x| x.unsigned_abs() > height as u128) {
                return None;
            }
            let (res, k0) = residual(&k, thetas);
            (res.abs() < tolerance).then(|| {
                let mut v = k;
                v.push(k0);
                v
            })
        })
        .collect()
}

/// Exhaustive when within limits, lattice reduction otherwise.
pub fn detect_relations_auto(thetas: &[f64], height: u64, tolerance: f64) -> RelationLattice {
    detect_relations(thetas, height, tolerance).unwrap_or_else(|_| detect_relations_lll(thetas, height, tolerance))
}
