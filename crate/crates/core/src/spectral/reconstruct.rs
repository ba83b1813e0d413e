//! Rebuilds `(K, α)` from detected frequencies.
//!
//! The closed subgroup of `T` generated by the peaks is built one peak at a
//! time. The current subgroup is kept as `Z^r ⊕ Z/d`: irrational
//! generators `φ₁..φ_r` and the torsion generator `1/d`. Every accepted peak
//! carries its exact coordinates in those generators. A new peak `θ` is
//! either already in the subgroup (`θ ≡ Σaᵢφᵢ + b/d`), independent of it
//! (it becomes a new `φ`), or satisfies `cθ ≡ Σaᵢφᵢ + b/d` only for some
//! `c > 1`, in which case the generators are rebuilt from the Smith form of
//! the relation matrix and all coordinates are transformed along.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;

use super::lattice::{left_kernel, lll, smith, Row};
use super::relations::{lll_candidates, relation_tolerance};
use super::scan::{Spectrum, SpectrumPeak};
use crate::error::{Error, Result};
use crate::group::{char_eval, Character, Coord, GroupDescriptor, GroupPoint};

/// Largest generator count searched exhaustively; beyond it relations come
/// from lattice reduction.
const EXHAUSTIVE_GENERATORS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructOptions {
    /// Coefficient bound `H` for relations.
    pub height: u64,
    /// Number of strongest peaks used.
    pub top_m: usize,
    /// Relation tolerance `δ_rel`.
    pub tolerance: f64,
}

impl ReconstructOptions {
    /// `H = 24`, `M = 25`, `δ_rel` from the grid step of `spectrum`.
    pub fn for_spectrum(spectrum: &Spectrum) -> Self {
        Self {
            height: 24,
            top_m: 25,
            tolerance: relation_tolerance(1.0 / spectrum.grid_size as f64),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeakAssignment {
    pub theta: f64,
    pub amplitude: Complex64,
    pub character: Character,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionResult {
    pub group: GroupDescriptor,
    pub alpha_image: GroupPoint,
    /// In processing order: descending amplitude, ties by ascending `θ`.
    pub peak_assignment: Vec<PeakAssignment>,
    /// Rows `(k₁..k_m, k₀)` with `Σ kⱼθⱼ = k₀` over the assigned peaks.
    pub relation_basis: Vec<Vec<i64>>,
    pub warnings: Vec<String>,
    pub height: u64,
    pub top_m: usize,
    pub tolerance: f64,
}

fn frac(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

struct Builder {
    phis: Vec<f64>,
    d: i128,
    /// Per accepted peak: free coordinates and torsion coordinate mod `d`.
    reps: Vec<(Vec<i128>, i128)>,
    height: i128,
    tolerance: f64,
}

struct Relation {
    c: i128,
    a: Vec<i128>,
    b: i128,
}

impl Builder {
    fn new(height: u64, tolerance: f64) -> Self {
        Self {
            phis: vec![],
            d: 1,
            reps: vec![],
            height: height as i128,
            tolerance,
        }
    }

    /// Smallest `c ≥ 1` with `cθ ≡ Σaᵢφᵢ + b/d`, preferring small `Σ|aᵢ|`.
    fn find_relation(&self, theta: f64) -> Option<Relation> {
        if self.phis.len() > EXHAUSTIVE_GENERATORS {
            return self.find_relation_lll(theta);
        }
        let h = self.height;
        let r = self.phis.len();
        let d = self.d as f64;
        for c in 1..=h {
            let mut best: Option<(i128, Relation)> = None;
            let mut a = vec![-h; r];
            loop {
                let x = c as f64 * theta - a.iter().zip(&self.phis).map(|(&k, &p)| k as f64 * p).sum::<f64>();
                let y = x * d;
                if dist_to_int(y) / d < self.tolerance {
                    let l1: i128 = a.iter().map(|v| v.abs()).sum();
                    if best.as_ref().is_none_or(|(b, _)| l1 < *b) {
                        let b = (y.round() as i128).rem_euclid(self.d);
                        best = Some((l1, Relation { c, a: a.clone(), b }));
                    }
                }
                let mut i = 0;
                loop {
                    if i == r {
                        break;
                    }
                    a[i] += 1;
                    if a[i] <= h {
                        break;
                    }
                    a[i] = -h;
                    i += 1;
                }
                if i == r {
                    break;
                }
            }
            if let Some((_, rel)) = best {
                return Some(rel);
            }
        }
        None
    }

    fn find_relation_lll(&self, theta: f64) -> Option<Relation> {
        let mut values = vec![theta];
        values.extend(&self.phis);
        values.push(1.0 / self.d as f64);
        let r = self.phis.len();
        lll_candidates(&values, self.height as u64, self.tolerance)
            .into_iter()
            .filter(|k| k[0] != 0)
            .map(|k| {
                let s = k[0].signum();
                Relation {
                    c: k[0] * s,
                    a: k[1..=r].iter().map(|&x| -x * s).collect(),
                    b: (-k[r + 1] * s).rem_euclid(self.d),
                }
            })
            .min_by_key(|rel| (rel.c, rel.a.iter().map(|v| v.abs()).sum::<i128>()))
    }

    fn add_peak(&mut self, theta: f64) -> Result<()> {
        match self.find_relation(theta) {
            Some(rel) if rel.c == 1 => {
                self.reps.push((rel.a, rel.b));
                Ok(())
            }
            None => {
                for (a, _) in self.reps.iter_mut() {
                    a.push(0);
                }
                let mut a = vec![0; self.phis.len()];
                a.push(1);
                self.phis.push(theta);
                self.reps.push((a, 0));
                Ok(())
            }
            Some(rel) => self.rebuild(theta, rel),
        }
    }

    /// Re-bases `⟨φ₁..φ_r, 1/d, θ⟩` modulo `d·(1/d) = 0` and
    /// `cθ = Σaᵢφᵢ + b/d` via the Smith form.
    fn rebuild(&mut self, theta: f64, rel: Relation) -> Result<()> {
        let r = self.phis.len();
        let n = r + 2;
        let mut gens: Vec<f64> = self.phis.clone();
        gens.push(1.0 / self.d as f64);
        gens.push(theta);
        let mut r1 = vec![0i128; n];
        r1[r] = self.d;
        let mut r2: Row = rel.a.iter().map(|&x| -x).collect();
        r2.push(-rel.b);
        r2.push(rel.c);
        let s = smith(&[r1, r2], n);
        let diag = |i: usize| s.diagonal.get(i).copied().unwrap_or(0);

        let values: Vec<f64> = (0..n)
            .map(|i| frac(s.v_inv[i].iter().zip(&gens).map(|(&k, &g)| k as f64 * g).sum()))
            .collect();
        let torsion: Vec<usize> = (0..n).filter(|&i| diag(i) > 1).collect();
        if torsion.len() > 1 {
            return Err(Error::InconsistentRelations(format!(
                "peak {theta} makes the torsion part non-cyclic (invariant factors {:?})",
                s.diagonal
            )));
        }
        let check = 1e3 * self.tolerance;
        for i in (0..n).filter(|&i| diag(i) == 1) {
            if dist_to_int(values[i]) > check {
                return Err(Error::InconsistentRelations(format!(
                    "trivial generator evaluates to {} after adding peak {theta}",
                    values[i]
                )));
            }
        }
        let (new_d, scale) = match torsion.first() {
            Some(&t) => {
                let dd = diag(t);
                let y = values[t] * dd as f64;
                if dist_to_int(y) > check * dd as f64 {
                    return Err(Error::InconsistentRelations(format!(
                        "torsion generator {} is not a multiple of 1/{dd}",
                        values[t]
                    )));
                }
                let sres = (y.round() as i128).rem_euclid(dd);
                if sres.gcd(&dd) != 1 {
                    return Err(Error::InconsistentRelations(format!(
                        "torsion generator {} does not generate Z/{dd}",
                        values[t]
                    )));
                }
                (dd, sres)
            }
            None => (1, 0),
        };
        let free: Vec<usize> = (0..n).filter(|&i| diag(i) == 0).collect();

        let transform = |x: &[i128]| -> (Vec<i128>, i128) {
            let y: Vec<i128> = (0..n).map(|j| x.iter().zip(&s.v).map(|(&xi, row)| xi * row[j]).sum()).collect();
            let a = free.iter().map(|&i| y[i]).collect();
            let b = match torsion.first() {
                Some(&t) => (y[t] * scale).rem_euclid(new_d),
                None => 0,
            };
            (a, b)
        };
        let mut reps = Vec::with_capacity(self.reps.len() + 1);
        for (a, b) in &self.reps {
            let mut x = a.clone();
            x.push(*b);
            x.push(0);
            reps.push(transform(&x));
        }
        let mut e = vec![0i128; n];
        e[n - 1] = 1;
        reps.push(transform(&e));
        self.phis = free.iter().map(|&i| values[i]).collect();
        self.d = new_d;
        self.reps = reps;
        Ok(())
    }
}

/// Reconstructs `(K, α)` up to isomorphism from detected peaks.
///
/// Peaks at `θ = 0` are excluded; the strongest `top_m` of the rest are
/// processed by descending amplitude, ties by ascending `θ`. Each assigned
/// character satisfies `χ(α_image) = e^{2πiθ}`; since a peak of `1_U` sits at
/// `e^{2πiθ} = conj(χ(α))`, this absorbs the conjugation into the
/// assignment, which is exactly the automorphism freedom `χ ↦ χ̄`.
pub fn reconstruct_group(peaks: &[SpectrumPeak], opts: &ReconstructOptions) -> Result<ReconstructionResult> {
    let mut ordered: Vec<&SpectrumPeak> = peaks
        .iter()
        .filter(|p| dist_to_int(p.theta) >= opts.tolerance)
        .collect();
    ordered.sort_by(|a, b| {
        b.amplitude
            .norm()
            .total_cmp(&a.amplitude.norm())
            .then(a.theta.total_cmp(&b.theta))
    });
    ordered.truncate(opts.top_m);

    let mut warnings = vec![format!(
        "rank and torsion determined at height {}, top {} peaks, relation tolerance {:e}",
        opts.height, opts.top_m, opts.tolerance
    )];
    if ordered.is_empty() {
        warnings.push(
            "no nonzero frequency detected: stabilizer hypothesis likely violated; reconstructed group is trivial"
                .to_string(),
        );
    }

    let mut b = Builder::new(opts.height, opts.tolerance);
    for p in &ordered {
        b.add_peak(frac(p.theta))?;
    }

    let r = b.phis.len();
    let d = b.d;
    let group = GroupDescriptor::new(r, if d > 1 { vec![d as u64] } else { vec![] })?;
    let alpha_image = GroupPoint::new(
        b.phis.iter().map(|&p| Coord::float(p)).collect(),
        if d > 1 { vec![1] } else { vec![] },
    );
    let mut peak_assignment = Vec::with_capacity(ordered.len());
    for (p, (a, t)) in ordered.iter().zip(&b.reps) {
        let character = Character::new(
            a.iter().map(|&x| x as i64).collect(),
            if d > 1 { vec![t.rem_euclid(d) as u64] } else { vec![] },
        );
        let got = char_eval(&group, &character, &alpha_image)?;
        let want = Complex64::from_polar(1.0, TAU * p.theta);
        if (got - want).norm() > 1e3 * opts.tolerance {
            warnings.push(format!("assignment for θ = {} is off by {:e}", p.theta, (got - want).norm()));
        }
        peak_assignment.push(PeakAssignment {
            theta: frac(p.theta),
            amplitude: p.amplitude,
            character,
        });
    }

    // Relations among the peaks: kernel of θⱼ ↦ (aⱼ, bⱼ mod d).
    let mut m: Vec<Row> = b
        .reps
        .iter()
        .map(|(a, t)| {
            let mut row = a.clone();
            row.push(*t);
            row
        })
        .collect();
    let count = m.len();
    let relation_basis = if count == 0 {
        vec![]
    } else {
        let mut extra = vec![0i128; r + 1];
        extra[r] = d;
        m.push(extra);
        let kernel: Vec<Row> = left_kernel(&m).into_iter().map(|z| z[..count].to_vec()).collect();
        let thetas: Vec<f64> = peak_assignment.iter().map(|p| p.theta).collect();
        lll(&kernel)
            .into_iter()
            .map(|z| {
                let s: f64 = z.iter().zip(&thetas).map(|(&k, &t)| k as f64 * t).sum();
                let mut v: Vec<i64> = z.iter().map(|&x| x as i64).collect();
                v.push(s.round() as i64);
                v
            })
            .collect()
    };

    Ok(ReconstructionResult {
        group,
        alpha_image,
        peak_assignment,
        relation_basis,
        warnings,
        height: opts.height,
        top_m: opts.top_m,
        tolerance: opts.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn peak(theta: f64, amp: f64) -> SpectrumPeak {
        SpectrumPeak {
            theta: frac(theta),
            amplitude: Complex64::new(amp, 0.0),
            convergence_gap: 0.0,
            n_used: 1 << 20,
            flagged: false,
        }
    }

    fn opts() -> ReconstructOptions {
        ReconstructOptions {
            height: 24,
            top_m: 25,
            tolerance: 1e-7,
        }
    }

    #[test]
    fn odd_multiples_give_circle() {
        let a = 2f64.sqrt() - 1.0;
        let mut peaks = vec![peak(0.0, 0.5)];
        for k in [1i32, 3, 5, 7, 9] {
            let amp = 1.0 / (std::f64::consts::PI * k as f64);
            peaks.push(peak(-(k as f64) * a, amp));
            peaks.push(peak(k as f64 * a, amp));
        }
        let res = reconstruct_group(&peaks, &opts()).unwrap();
        assert_eq!(res.group, GroupDescriptor::torus(1));
        let phi = res.alpha_image.torus[0].to_f64();
        assert!(dist_to_int(phi - a) < 1e-12 || dist_to_int(phi + a) < 1e-12);
        for p in &res.peak_assignment {
            let got = char_eval(&res.group, &p.character, &res.alpha_image).unwrap();
            assert!((got - Complex64::from_polar(1.0, TAU * p.theta)).norm() < 1e-9);
        }
        // Ten peaks in a rank-one group: nine independent relations.
        assert_eq!(res.relation_basis.len(), 9);
    }

    #[test]
    fn half_gives_z2() {
        let res = reconstruct_group(&[peak(0.0, 0.5), peak(0.5, 0.5)], &opts()).unwrap();
        assert_eq!(res.group, GroupDescriptor::cyclic(2).unwrap());
        assert_eq!(res.alpha_image.torsion, vec![1]);
        assert_eq!(res.relation_basis, vec![vec![2, 1]]);
    }

    #[test]
    fn only_origin_is_trivial_with_warning() {
        let res = reconstruct_group(&[peak(0.0, 1.0)], &opts()).unwrap();
        assert_eq!(res.group, GroupDescriptor::trivial());
        assert!(res.warnings.iter().any(|w| w.contains("stabilizer hypothesis")));
    }

    #[test]
    fn multiples_three_and_five_rebuild_to_alpha() {
        let a = 3f64.sqrt() - 1.0;
        let res = reconstruct_group(&[peak(3.0 * a, 0.3), peak(5.0 * a, 0.2)], &opts()).unwrap();
        assert_eq!(res.group, GroupDescriptor::torus(1));
        let phi = res.alpha_image.torus[0].to_f64();
        assert!(dist_to_int(phi - a) < 1e-9 || dist_to_int(phi + a) < 1e-9, "{phi}");
    }

    #[test]
    fn torus_times_z2() {
        let a = 2f64.sqrt() - 1.0;
        let peaks = vec![
            peak(0.0, 0.2),
            peak(0.5, 0.2),
            peak(-a, 0.15),
            peak(-a + 0.5, 0.15),
            peak(a, 0.15),
            peak(a + 0.5, 0.15),
            peak(-2.0 * a + 0.5, 0.05),
        ];
        let res = reconstruct_group(&peaks, &opts()).unwrap();
        assert_eq!(res.group, GroupDescriptor::new(1, vec![2]).unwrap());
        for p in &res.peak_assignment {
            let got = char_eval(&res.group, &p.character, &res.alpha_image).unwrap();
            assert!((got - Complex64::from_polar(1.0, TAU * p.theta)).norm() < 1e-9);
        }
    }

    #[test]
    fn quarter_after_half_gives_z4() {
        let res = reconstruct_group(&[peak(0.5, 0.3), peak(0.25, 0.2), peak(0.75, 0.2)], &opts()).unwrap();
        assert_eq!(res.group, GroupDescriptor::cyclic(4).unwrap());
        for p in &res.peak_assignment {
            let got = char_eval(&res.group, &p.character, &res.alpha_image).unwrap();
            assert!((got - Complex64::from_polar(1.0, TAU * p.theta)).norm() < 1e-9);
        }
    }

    #[test]
    fn two_independent_halves_torsion_is_consistent() {
        // 1/2 and 1/3 generate Z/6: cyclic, so no error.
        let res = reconstruct_group(&[peak(0.5, 0.3), peak(1.0 / 3.0, 0.2)], &opts()).unwrap();
        assert_eq!(res.group, GroupDescriptor::cyclic(6).unwrap());
    }
}
