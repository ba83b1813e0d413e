//! Finite-dimensional compact abelian groups `K = T^r × ∏ Z/mᵢ`.
//!
//! Points carry coordinates that are either plain floats or exact quadratic
//! irrationals; the latter survive arbitrarily long orbits without drift.
//! Characters are integer frequency vectors on the torus part and residues
//! on the torsion part.

mod surd;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub use surd::QuadSurd;
pub(crate) use surd::{fixed128_to_f64, mixed_sum_is_integer};

use crate::error::{shape, Error, Result};

const TWO_POW_64: f64 = 18446744073709551616.0;

/// Describes `T^torus_rank × ∏ Z/mᵢ` with the torsion orders kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupDescriptor {
    torus_rank: usize,
    torsion_orders: Vec<u64>,
}

impl GroupDescriptor {
    pub fn new(torus_rank: usize, mut torsion_orders: Vec<u64>) -> Result<Self> {
        if let Some(m) = torsion_orders.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidGroup(format!("torsion order {m} must be at least 2")));
        }
        torsion_orders.sort_unstable();
        Ok(Self {
            torus_rank,
            torsion_orders,
        })
    }

    pub fn torus(rank: usize) -> Self {
        Self {
            torus_rank: rank,
            torsion_orders: Vec::new(),
        }
    }

    pub fn cyclic(m: u64) -> Result<Self> {
        Self::new(0, vec![m])
    }

    pub fn trivial() -> Self {
        Self::torus(0)
    }

    pub fn torus_rank(&self) -> usize {
        self.torus_rank
    }

    pub fn torsion_orders(&self) -> &[u64] {
        &self.torsion_orders
    }

    /// Total number of coordinates, torus first.
    pub fn coord_count(&self) -> usize {
        self.torus_rank + self.torsion_orders.len()
    }

    pub fn is_finite(&self) -> bool {
        self.torus_rank == 0
    }

    /// Order of the torsion part.
    pub fn torsion_size(&self) -> u64 {
        self.torsion_orders.iter().product()
    }

    /// Invariant factors `d₁ | d₂ | …` of the torsion part (all > 1).
    pub fn invariant_factors(&self) -> Vec<u64> {
        invariant_factors(&self.torsion_orders)
    }

    /// Descriptor with the torsion part rewritten in invariant-factor form.
    pub fn canonical(&self) -> Self {
        Self {
            torus_rank: self.torus_rank,
            torsion_orders: self.invariant_factors(),
        }
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.torus_rank > 0 {
            parts.push(format!("T^{}", self.torus_rank));
        }
        parts.extend(self.torsion_orders.iter().map(|m| format!("Z/{m}")));
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// Invariant factors of `∏ Z/mᵢ`, via prime-power decomposition.
fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &m in orders {
        let mut n = m;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                let mut pk = 1;
                while n % p == 0 {
                    n /= p;
                    pk *= p;
                }
                by_prime.entry(p).or_default().push(pk);
            }
            p += 1;
        }
        if n > 1 {
            by_prime.entry(n).or_default().push(n);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; len];
    for powers in by_prime.values_mut() {
        powers.sort_unstable_by(|a, b| b.cmp(a));
        for (i, pk) in powers.iter().enumerate() {
            factors[len - 1 - i] *= pk;
        }
    }
    factors
}

/// A single torus coordinate.
#[derive(Clone, Debug, PartialEq)]
pub enum Coord {
    Exact(QuadSurd),
    Float(f64),
}

fn reduce_f64(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Fixed-point image of a float in `[0, 1)`.
pub(crate) fn f64_to_fixed128(x: f64) -> u128 {
    let x = reduce_f64(x);
    let scaled = x * TWO_POW_64;
    let hi = scaled.floor();
    let lo = ((scaled - hi) * TWO_POW_64).floor();
    ((hi as u64 as u128) << 64) | (lo as u64 as u128)
}

impl Coord {
    pub fn exact(q: QuadSurd) -> Self {
        Coord::Exact(q.fract())
    }

    pub fn float(x: f64) -> Self {
        Coord::Float(reduce_f64(x))
    }

    pub fn zero() -> Self {
        Coord::Exact(QuadSurd::from_integer(0))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coord::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coord::Exact(q) => q.fract().is_zero(),
            Coord::Float(x) => *x == 0.0,
        }
    }

    pub fn as_exact(&self) -> Option<&QuadSurd> {
        match self {
            Coord::Exact(q) => Some(q),
            Coord::Float(_) => None,
        }
    }

    /// Value in `[0, 1)` as a float.
    pub fn to_f64(&self) -> f64 {
        match self {
            Coord::Exact(q) => reduce_f64(q.fract().to_f64()),
            Coord::Float(x) => *x,
        }
    }

    /// `⌊x·2^128⌋ mod 2^128` (exact for exact coordinates).
    pub fn to_fixed128(&self) -> u128 {
        match self {
            Coord::Exact(q) => q.to_fixed128(),
            Coord::Float(x) => f64_to_fixed128(*x),
        }
    }

    /// Sum mod 1; exact when both sides are exact with compatible radicands.
    pub fn add(&self, other: &Self) -> Self {
        if let (Coord::Exact(a), Coord::Exact(b)) = (self, other) {
            if let Some(s) = a.checked_add(b) {
                return Coord::exact(s);
            }
        }
        Coord::float(self.to_f64() + other.to_f64())
    }

    pub fn neg(&self) -> Self {
        match self {
            Coord::Exact(q) => Coord::exact(q.neg()),
            Coord::Float(x) => Coord::float(-x),
        }
    }

    /// `n·x mod 1`; exact path reduces `n·p/q` exactly, the float path
    /// multiplies then reduces.
    pub fn mul_int(&self, n: &BigInt) -> Self {
        match self {
            Coord::Exact(q) => Coord::exact(q.mul_int(n)),
            Coord::Float(x) => Coord::float(n.to_f64().unwrap_or(f64::NAN) * x),
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Exact(q) => write!(f, "{q}"),
            Coord::Float(x) => write!(f, "{x}f"),
        }
    }
}

/// Element of `K`: torus coordinates in `[0,1)` and torsion residues.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPoint {
    pub torus: Vec<Coord>,
    pub torsion: Vec<u64>,
}

impl GroupPoint {
    pub fn new(torus: Vec<Coord>, torsion: Vec<u64>) -> Self {
        Self { torus, torsion }
    }

    pub fn identity(k: &GroupDescriptor) -> Self {
        Self {
            torus: vec![Coord::zero(); k.torus_rank()],
            torsion: vec![0; k.torsion_orders().len()],
        }
    }

    pub fn validate(&self, k: &GroupDescriptor) -> Result<()> {
        if self.torus.len() != k.torus_rank() || self.torsion.len() != k.torsion_orders().len() {
            return Err(shape(
                k,
                format!("point with {} torus and {} torsion coordinates", self.torus.len(), self.torsion.len()),
            ));
        }
        for (&c, &m) in self.torsion.iter().zip(k.torsion_orders()) {
            if c >= m {
                return Err(Error::Residue { residue: c, modulus: m });
            }
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.torus.iter().all(Coord::is_exact)
    }
}

impl fmt::Display for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .torus
            .iter()
            .map(ToString::to_string)
            .chain(self.torsion.iter().map(ToString::to_string))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Character `x ↦ e^{2πi(k·x + Σ aᵢcᵢ/mᵢ)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub torus_freqs: Vec<i64>,
    pub torsion_freqs: Vec<u64>,
}

impl Character {
    pub fn new(torus_freqs: Vec<i64>, torsion_freqs: Vec<u64>) -> Self {
        Self {
            torus_freqs,
            torsion_freqs,
        }
    }

    pub fn trivial(k: &GroupDescriptor) -> Self {
        Self::new(vec![0; k.torus_rank()], vec![0; k.torsion_orders().len()])
    }

    pub fn is_trivial(&self) -> bool {
        self.torus_freqs.iter().all(|&k| k == 0) && self.torsion_freqs.iter().all(|&a| a == 0)
    }

    /// Largest absolute torus frequency.
    pub fn height(&self) -> u64 {
        self.torus_freqs.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn validate(&self, k: &GroupDescriptor) -> Result<()> {
        if self.torus_freqs.len() != k.torus_rank() || self.torsion_freqs.len() != k.torsion_orders().len() {
            return Err(shape(k, format!("character {:?}", self)));
        }
        for (&a, &m) in self.torsion_freqs.iter().zip(k.torsion_orders()) {
            if a >= m {
                return Err(Error::Residue { residue: a, modulus: m });
            }
        }
        Ok(())
    }

    /// Phase `k·x + Σ aᵢcᵢ/mᵢ mod 1` in 128-bit fixed point.
    pub(crate) fn phase_fixed(&self, k: &GroupDescriptor, a: &GroupPoint) -> u128 {
        let mut phase = 0u128;
        for (&freq, x) in self.torus_freqs.iter().zip(&a.torus) {
            let term = match x {
                Coord::Exact(_) => (freq as i128 as u128).wrapping_mul(x.to_fixed128()),
                Coord::Float(v) => f64_to_fixed128(freq as f64 * v),
            };
            phase = phase.wrapping_add(term);
        }
        for ((&freq, &c), &m) in self.torsion_freqs.iter().zip(&a.torsion).zip(k.torsion_orders()) {
            let r = ((freq as u128) * (c as u128)) % (m as u128);
            phase = phase.wrapping_add(residue_fixed(r, m as u128));
        }
        phase
    }
}

/// `⌊r·2^128/m⌋` for `0 ≤ r < m`.
fn residue_fixed(r: u128, m: u128) -> u128 {
    // Long division in two 64-bit steps keeps everything inside u128.
    let hi = (r << 64) / m;
    let rem = (r << 64) % m;
    let lo = (rem << 64) / m;
    (hi << 64) | lo
}

/// Componentwise sum, reduced into canonical range.
pub fn add(k: &GroupDescriptor, a: &GroupPoint, b: &GroupPoint) -> Result<GroupPoint> {
    a.validate(k)?;
    b.validate(k)?;
    let torus = a.torus.iter().zip(&b.torus).map(|(x, y)| x.add(y)).collect();
    let torsion = a
        .torsion
        .iter()
        .zip(&b.torsion)
        .zip(k.torsion_orders())
        .map(|((&x, &y), &m)| (x + y) % m)
        .collect();
    Ok(GroupPoint { torus, torsion })
}

pub fn neg(k: &GroupDescriptor, a: &GroupPoint) -> Result<GroupPoint> {
    a.validate(k)?;
    Ok(GroupPoint {
        torus: a.torus.iter().map(Coord::neg).collect(),
        torsion: a
            .torsion
            .iter()
            .zip(k.torsion_orders())
            .map(|(&c, &m)| (m - c) % m)
            .collect(),
    })
}

/// `n·a`.
pub fn scalar_mul(k: &GroupDescriptor, n: &BigInt, a: &GroupPoint) -> Result<GroupPoint> {
    a.validate(k)?;
    let torus = a.torus.iter().map(|x| x.mul_int(n)).collect();
    let torsion = a
        .torsion
        .iter()
        .zip(k.torsion_orders())
        .map(|(&c, &m)| {
            let m_big = BigInt::from(m);
            (n * BigInt::from(c)).mod_floor(&m_big).to_u64().expect("residue below modulus")
        })
        .collect();
    Ok(GroupPoint { torus, torsion })
}

/// Evaluates `χ(a)` on the unit circle.
pub fn char_eval(k: &GroupDescriptor, chi: &Character, a: &GroupPoint) -> Result<Complex64> {
    chi.validate(k)?;
    a.validate(k)?;
    let turns = fixed128_to_f64(chi.phase_fixed(k, a));
    Ok(Complex64::from_polar(1.0, std::f64::consts::TAU * turns))
}

/// `‖x‖` on the circle, in `[0, 1/2]`.
fn circle_norm(x: f64) -> f64 {
    let r = reduce_f64(x);
    r.min(1.0 - r)
}

/// `d(a, b) = Σ 2^{-i} ‖aᵢ − bᵢ‖`, torus coordinates first, then torsion
/// coordinates with the cyclic distance normalized by the modulus.
pub fn invariant_metric(k: &GroupDescriptor, a: &GroupPoint, b: &GroupPoint) -> Result<f64> {
    a.validate(k)?;
    b.validate(k)?;
    let mut weight = 0.5;
    let mut total = 0.0;
    for (x, y) in a.torus.iter().zip(&b.torus) {
        let diff = x.to_fixed128().wrapping_sub(y.to_fixed128());
        total += weight * circle_norm(fixed128_to_f64(diff));
        weight *= 0.5;
    }
    for ((&x, &y), &m) in a.torsion.iter().zip(&b.torsion).zip(k.torsion_orders()) {
        let d = x.abs_diff(y);
        let cyclic = d.min(m - d) as f64 / m as f64;
        total += weight * cyclic;
        weight *= 0.5;
    }
    Ok(total)
}

/// Outcome of [`is_generator`].
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorCertificate {
    pub generator: bool,
    /// Frequencies were searched up to this height.
    pub height: u64,
    /// First character (by height) with `χ(α) = 1`, if any.
    pub witness: Option<Character>,
    /// True when every test was decided with exact arithmetic.
    pub exact: bool,
}

impl fmt::Display for GeneratorCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.witness, self.exact) {
            (Some(w), _) => write!(f, "not a generator: character {:?} is trivial on alpha", w),
            (None, true) => write!(f, "generator up to height {}", self.height),
            (None, false) => write!(f, "generator up to height {} (float tolerance)", self.height),
        }
    }
}

/// Tolerance used to call a float phase trivial.
const FLOAT_TRIVIAL_PHASE: f64 = 1e-9;

/// Searches for a nontrivial character of height ≤ `height_bound` that is
/// trivial on `alpha`.
///
/// Torsion frequencies are always enumerated in full. Characters are visited
/// by increasing height, and within one height only the representative of
/// `{χ, χ̄}` whose first nonzero torus frequency is positive is tried.
pub fn is_generator(k: &GroupDescriptor, alpha: &GroupPoint, height_bound: u64) -> Result<GeneratorCertificate> {
    alpha.validate(k)?;
    let exact = alpha.is_exact();
    let r = k.torus_rank();
    let h_max = if r == 0 { 0 } else { height_bound as i64 };
    for h in 0..=h_max {
        let mut freqs = vec![-h; r];
        loop {
            let max_abs = freqs.iter().map(|f| f.abs()).max().unwrap_or(0);
            let first_nonzero = freqs.iter().find(|&&f| f != 0).copied().unwrap_or(0);
            if max_abs == h && first_nonzero >= 0 {
                if let Some(w) = trivial_on(k, alpha, &freqs, exact) {
                    return Ok(GeneratorCertificate {
                        generator: false,
                        height: height_bound,
                        witness: Some(w),
                        exact,
                    });
                }
            }
            if !advance(&mut freqs, -h, h) {
                break;
            }
        }
    }
    Ok(GeneratorCertificate {
        generator: true,
        height: height_bound,
        witness: None,
        exact,
    })
}

/// Odometer increment over `[lo, hi]^len`; false once it wraps.
fn advance(v: &mut [i64], lo: i64, hi: i64) -> bool {
    for x in v.iter_mut().rev() {
        if *x < hi {
            *x += 1;
            return true;
        }
        *x = lo;
    }
    false
}

fn trivial_on(k: &GroupDescriptor, alpha: &GroupPoint, freqs: &[i64], exact: bool) -> Option<Character> {
    let orders = k.torsion_orders();
    let mut residues = vec![0u64; orders.len()];
    loop {
        let chi = Character::new(freqs.to_vec(), residues.clone());
        if !chi.is_trivial() && character_is_one(k, &chi, alpha, exact) {
            return Some(chi);
        }
        // Odometer over the torsion residues.
        let mut carried = true;
        for (res, &m) in residues.iter_mut().zip(orders).rev() {
            if *res + 1 < m {
                *res += 1;
                carried = false;
                break;
            }
            *res = 0;
        }
        if carried {
            return None;
        }
    }
}

fn character_is_one(k: &GroupDescriptor, chi: &Character, alpha: &GroupPoint, exact: bool) -> bool {
    let phase = chi.phase_fixed(k, alpha);
    let dist = circle_norm(fixed128_to_f64(phase));
    if !exact {
        return dist < FLOAT_TRIVIAL_PHASE;
    }
    // Cheap fixed-point filter before the exact test.
    if dist > 1e-12 {
        return false;
    }
    let mut terms: Vec<QuadSurd> = chi
        .torus_freqs
        .iter()
        .zip(&alpha.torus)
        .map(|(&f, x)| x.as_exact().expect("exact point").mul_int(&BigInt::from(f)))
        .collect();
    for ((&a, &c), &m) in chi.torsion_freqs.iter().zip(&alpha.torsion).zip(k.torsion_orders()) {
        terms.push(QuadSurd::from_ratio(((a * c) % m) as i64, m as i64));
    }
    mixed_sum_is_integer(terms.iter())
}

/// Size of the orbit `{nα}` in a finite group (used as an oracle in tests).
pub fn finite_orbit_size(k: &GroupDescriptor, alpha: &GroupPoint) -> Result<u64> {
    if !k.is_finite() {
        return Err(Error::InvalidGroup(format!("{k} is not finite")));
    }
    alpha.validate(k)?;
    // Order of α is the lcm of the orders of its residues.
    Ok(alpha
        .torsion
        .iter()
        .zip(k.torsion_orders())
        .map(|(&c, &m)| m / c.gcd(&m))
        .fold(1u64, |acc, o| acc.lcm(&o)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn exact(num: i64, den: i64) -> Coord {
        Coord::exact(QuadSurd::from_ratio(num, den))
    }

    fn sqrt2_minus_1() -> Coord {
        Coord::exact(QuadSurd::new(BigRational::from_integer((-1).into()), BigRational::from_integer(1.into()), 2))
    }

    #[test]
    fn add_examples() {
        let t1 = GroupDescriptor::torus(1);
        let s = add(&t1, &GroupPoint::new(vec![exact(7, 10)], vec![]), &GroupPoint::new(vec![exact(6, 10)], vec![])).unwrap();
        assert_eq!(s.torus[0], exact(3, 10));
        let fs = add(&t1, &GroupPoint::new(vec![Coord::float(0.7)], vec![]), &GroupPoint::new(vec![Coord::float(0.6)], vec![])).unwrap();
        assert!((fs.torus[0].to_f64() - 0.3).abs() < 1e-12);

        let z4 = GroupDescriptor::cyclic(4).unwrap();
        let s = add(&z4, &GroupPoint::new(vec![], vec![3]), &GroupPoint::new(vec![], vec![2])).unwrap();
        assert_eq!(s.torsion, vec![1]);

        let two_minus_sqrt2 = Coord::exact(QuadSurd::new(BigRational::from_integer(2.into()), BigRational::from_integer((-1).into()), 2));
        let s = add(&t1, &GroupPoint::new(vec![sqrt2_minus_1()], vec![]), &GroupPoint::new(vec![two_minus_sqrt2], vec![])).unwrap();
        assert!(s.torus[0].is_zero());
    }

    #[test]
    fn add_rejects_shape_mismatch() {
        let t1 = GroupDescriptor::torus(1);
        let err = add(&t1, &GroupPoint::new(vec![], vec![]), &GroupPoint::identity(&t1));
        assert!(matches!(err, Err(Error::Shape { .. })));
    }

    #[test]
    fn scalar_mul_examples() {
        let t1 = GroupDescriptor::torus(1);
        let a = GroupPoint::new(vec![exact(3, 10)], vec![]);
        assert!(scalar_mul(&t1, &BigInt::from(10), &a).unwrap().torus[0].is_zero());
        assert_eq!(scalar_mul(&t1, &BigInt::from(7), &a).unwrap().torus[0], exact(1, 10));
        assert!(scalar_mul(&t1, &BigInt::from(0), &a).unwrap().torus[0].is_zero());
        let f = GroupPoint::new(vec![Coord::float(0.3)], vec![]);
        let r = scalar_mul(&t1, &BigInt::from(10), &f).unwrap().torus[0].to_f64();
        assert!(r < 1e-12 || r > 1.0 - 1e-12);
    }

    #[test]
    fn char_eval_examples() {
        let z2 = GroupDescriptor::cyclic(2).unwrap();
        let v = char_eval(&z2, &Character::new(vec![], vec![1]), &GroupPoint::new(vec![], vec![1])).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        let t1 = GroupDescriptor::torus(1);
        let v = char_eval(&t1, &Character::new(vec![2], vec![]), &GroupPoint::new(vec![exact(1, 4)], vec![])).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        let triv = char_eval(&t1, &Character::trivial(&t1), &GroupPoint::new(vec![sqrt2_minus_1()], vec![])).unwrap();
        assert!((triv - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn metric_examples() {
        let t1 = GroupDescriptor::torus(1);
        let d = invariant_metric(&t1, &GroupPoint::new(vec![exact(1, 10)], vec![]), &GroupPoint::new(vec![exact(9, 10)], vec![])).unwrap();
        assert!((d - 0.1).abs() < 1e-15);
        let t2 = GroupDescriptor::torus(2);
        let d = invariant_metric(
            &t2,
            &GroupPoint::identity(&t2),
            &GroupPoint::new(vec![exact(1, 2), exact(1, 2)], vec![]),
        )
        .unwrap();
        assert!((d - 0.375).abs() < 1e-15);
        let p = GroupPoint::new(vec![sqrt2_minus_1()], vec![]);
        assert_eq!(invariant_metric(&t1, &p, &p).unwrap(), 0.0);
    }

    #[test]
    fn generator_examples() {
        let t1 = GroupDescriptor::torus(1);
        let cert = is_generator(&t1, &GroupPoint::new(vec![exact(1, 3)], vec![]), 50).unwrap();
        assert!(!cert.generator);
        assert_eq!(cert.witness, Some(Character::new(vec![3], vec![])));

        let z4 = GroupDescriptor::cyclic(4).unwrap();
        assert!(is_generator(&z4, &GroupPoint::new(vec![], vec![1]), 10).unwrap().generator);
        assert!(!is_generator(&z4, &GroupPoint::new(vec![], vec![2]), 10).unwrap().generator);

        let k = GroupDescriptor::new(1, vec![2]).unwrap();
        let cert = is_generator(&k, &GroupPoint::new(vec![sqrt2_minus_1()], vec![1]), 50).unwrap();
        assert!(cert.generator && cert.exact);
        // (√2−1, 0) misses the Z/2 factor.
        let cert = is_generator(&k, &GroupPoint::new(vec![sqrt2_minus_1()], vec![0]), 50).unwrap();
        assert_eq!(cert.witness, Some(Character::new(vec![0], vec![1])));
    }

    #[test]
    fn invariant_factor_canonical_form() {
        let a = GroupDescriptor::new(1, vec![2, 3]).unwrap();
        let b = GroupDescriptor::new(1, vec![6]).unwrap();
        assert_ne!(a, b);
        assert!(a.is_isomorphic(&b));
        assert_eq!(GroupDescriptor::new(0, vec![4, 2, 6]).unwrap().invariant_factors(), vec![2, 2, 12]);
        assert_eq!(GroupDescriptor::new(0, vec![3, 2]).unwrap().torsion_orders(), &[2, 3]);
        assert!(GroupDescriptor::new(0, vec![1]).is_err());
    }

    #[test]
    fn display_round_forms() {
        assert_eq!(GroupDescriptor::new(1, vec![2]).unwrap().to_string(), "T^1 x Z/2");
        assert_eq!(GroupDescriptor::trivial().to_string(), "1");
    }
}
