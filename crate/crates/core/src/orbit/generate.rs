//! Return-time sets of linear, polynomial and skew-product orbits.
//!
//! Every orbit point is an integer combination `Σ cⱼ·bⱼ` of a few fixed
//! base points (`start`, `α`, ...) with coefficients that depend on `n`.
//! For exact bases the combination is first evaluated in 128-bit fixed
//! point, where the error is at most `Σ|cⱼ|` ulps; only points whose
//! error interval touches an arc endpoint are recomputed exactly.

use std::fmt;

use bitvec::prelude::*;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::open_set::{Located, OpenSet};
use super::returns::{ReturnSet, Window};
use crate::error::{shape, Error, Result};
use crate::group::{fixed128_to_f64, Character, Coord, GroupDescriptor, GroupPoint, QuadSurd};

const CHUNK: i64 = 1 << 14;

/// Coefficients beyond this magnitude make the fixed-point filter useless.
const FIXED_LIMIT: u128 = 1 << 100;

/// Integer polynomial with arbitrary-precision coefficients `c₀ + c₁x + ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntegerPolynomial {
    /// Coefficients in ascending degree; trailing zeros are trimmed.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Polynomial with `P(0) = 0` enforced.
    pub fn theorem(coeffs: Vec<BigInt>) -> Result<Self> {
        let p = Self::new(coeffs);
        match p.coeffs.first() {
            Some(c) if !c.is_zero() => Err(Error::NonzeroConstant(c.to_string())),
            _ => Ok(p),
        }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `P(n) = n`.
    pub fn identity() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * n + c)
    }

    fn eval_i128(&self, n: i64) -> Option<i128> {
        let n = n as i128;
        let mut acc: i128 = 0;
        for c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(n)?.checked_add(c.to_i128()?)?;
        }
        Some(acc)
    }

    /// `P(n) mod 2^128`.
    fn eval_wrapping(&self, n: i64) -> u128 {
        let n = n as i128 as u128;
        let coeffs: Vec<u128> = self.coeffs.iter().map(bigint_to_wrapping).collect();
        coeffs.iter().rev().fold(0u128, |acc, &c| acc.wrapping_mul(n).wrapping_add(c))
    }

    fn eval_mod(&self, n: i64, m: u64) -> u64 {
        let mb = BigInt::from(m);
        let nm = (n as i128).rem_euclid(m as i128) as u128;
        let mut acc: u128 = 0;
        for c in self.coeffs.iter().rev() {
            let cm = c.mod_floor(&mb).to_u128().expect("reduced below modulus");
            acc = (acc * nm + cm) % m as u128;
        }
        acc as u64
    }

    fn eval_f64(&self, n: i64) -> f64 {
        let x = n as f64;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

fn bigint_to_wrapping(c: &BigInt) -> u128 {
    let modulus = BigInt::from(1u8) << 128;
    c.mod_floor(&modulus).to_u128().expect("reduced below 2^128")
}

impl fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match d {
                0 => String::new(),
                1 => "n".to_string(),
                _ => format!("n^{d}"),
            };
            let mag = c.magnitude().to_string();
            let body = if mono.is_empty() {
                mag
            } else if mag == "1" {
                mono
            } else {
                format!("{mag}*{mono}")
            };
            let neg = c.sign() == num_bigint::Sign::Minus;
            terms.push((neg, body));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (neg, body)) in terms.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// Skew product `(x, y) ↦ (x + α, y + x)` on `T²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewSystem {
    pub alpha: Coord,
    pub start: (Coord, Coord),
}

impl SkewSystem {
    pub fn new(alpha: Coord, start: (Coord, Coord)) -> Self {
        Self { alpha, start }
    }

    pub fn group() -> GroupDescriptor {
        GroupDescriptor::torus(2)
    }

    pub fn step(&self, p: &(Coord, Coord)) -> (Coord, Coord) {
        (p.0.add(&self.alpha), p.1.add(&p.0))
    }

    pub fn step_back(&self, p: &(Coord, Coord)) -> (Coord, Coord) {
        let x = p.0.add(&self.alpha.neg());
        let y = p.1.add(&x.neg());
        (x, y)
    }

    /// Closed form `(x₀ + nα, y₀ + n·x₀ + C(n,2)·α)`.
    pub fn iterate(&self, n: i64) -> (Coord, Coord) {
        let nb = BigInt::from(n);
        let choose = BigInt::from(n as i128 * (n as i128 - 1) / 2);
        let x = self.start.0.add(&self.alpha.mul_int(&nb));
        let y = self
            .start
            .1
            .add(&self.start.0.mul_int(&nb))
            .add(&self.alpha.mul_int(&choose));
        (x, y)
    }
}

/// Integer combination of base coordinates.
struct Combo {
    fixed: Vec<u128>,
    floats: Vec<f64>,
    /// Exact bases, when every base is exact.
    exact: Option<Vec<QuadSurd>>,
    zero: Vec<bool>,
}

impl Combo {
    fn new(bases: &[Coord]) -> Self {
        let exact = bases
            .iter()
            .map(|b| b.as_exact().cloned())
            .collect::<Option<Vec<_>>>();
        Self {
            fixed: bases.iter().map(Coord::to_fixed128).collect(),
            floats: bases.iter().map(Coord::to_f64).collect(),
            zero: bases.iter().map(|b| b.is_exact() && b.is_zero()).collect(),
            exact,
        }
    }

    fn locate(&self, c: &[Monomial]) -> Located {
        if self.exact.is_some() {
            let mut phase = 0u128;
            let mut err = 0u128;
            for ((m, &b), &z) in c.iter().zip(&self.fixed).zip(&self.zero) {
                if z {
                    continue;
                }
                match m {
                    Monomial::Small(v) => {
                        phase = phase.wrapping_add((*v as u128).wrapping_mul(b));
                        err = err.saturating_add(v.unsigned_abs());
                    }
                    Monomial::Big(_) => err = u128::MAX,
                }
            }
            if err >= FIXED_LIMIT {
                return match self.exact_value(c) {
                    Some(q) => Located::Exact(q),
                    None => Located::Fixed { phase, err },
                };
            }
            Located::Fixed { phase, err: err + 1 }
        } else {
            let s: f64 = c.iter().zip(&self.floats).map(|(m, b)| m.to_f64() * b).sum();
            Located::Float(s.rem_euclid(1.0))
        }
    }

    fn exact_value(&self, c: &[Monomial]) -> Option<QuadSurd> {
        let bases = self.exact.as_ref()?;
        let mut acc = QuadSurd::from_integer(0);
        for (m, b) in c.iter().zip(bases) {
            acc = acc.checked_add(&b.mul_int(&m.to_bigint()))?;
        }
        Some(acc.fract())
    }
}

#[derive(Clone, Debug)]
enum Monomial {
    Small(i128),
    Big(BigInt),
}

impl Monomial {
    fn to_f64(&self) -> f64 {
        match self {
            Monomial::Small(v) => *v as f64,
            Monomial::Big(v) => v.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn to_bigint(&self) -> BigInt {
        match self {
            Monomial::Small(v) => BigInt::from(*v),
            Monomial::Big(v) => v.clone(),
        }
    }

    fn residue(&self, m: u64) -> u64 {
        match self {
            Monomial::Small(v) => v.rem_euclid(m as i128) as u64,
            Monomial::Big(v) => v.mod_floor(&BigInt::from(m)).to_u64().expect("below modulus"),
        }
    }
}

enum Driver<'a> {
    /// `[1, n]`.
    Linear,
    /// `[1, P(n)]`.
    Polynomial(&'a IntegerPolynomial),
    /// `[1, n, C(n,2)]`.
    Skew,
}

impl Driver<'_> {
    fn monomials(&self, n: i64) -> Vec<Monomial> {
        match self {
            Driver::Linear => vec![Monomial::Small(1), Monomial::Small(n as i128)],
            Driver::Polynomial(p) => {
                let v = match p.eval_i128(n) {
                    Some(v) => Monomial::Small(v),
                    None => Monomial::Big(p.eval(&BigInt::from(n))),
                };
                vec![Monomial::Small(1), v]
            }
            Driver::Skew => {
                let n = n as i128;
                vec![Monomial::Small(1), Monomial::Small(n), Monomial::Small(n * (n - 1) / 2)]
            }
        }
    }
}

struct Orbit<'a> {
    driver: Driver<'a>,
    torus: Vec<Combo>,
    /// Residue bases and modulus per torsion coordinate.
    torsion: Vec<(Vec<u64>, u64)>,
}

impl Orbit<'_> {
    fn classify(&self, u: &OpenSet, n: i64) -> super::Membership {
        let c = self.driver.monomials(n);
        let torus: Vec<Located> = self.torus.iter().map(|combo| combo.locate(&c)).collect();
        let torsion: Vec<u64> = self
            .torsion
            .iter()
            .map(|(bases, m)| {
                bases
                    .iter()
                    .zip(&c)
                    .fold(0u64, |acc, (&b, mono)| ((acc as u128 + mono.residue(*m) as u128 * b as u128) % *m as u128) as u64)
            })
            .collect();
        u.classify(&torus, &torsion, &mut |i| self.torus[i].exact_value(&c))
    }

    fn generate(&self, u: &OpenSet, window: Window, provenance: String) -> ReturnSet {
        let starts: Vec<i64> = (0..)
            .map(|k| window.lo + k * CHUNK)
            .take_while(|&s| s <= window.hi)
            .collect();
        let chunks: Vec<(BitVec<u64, Lsb0>, u64)> = starts
            .par_iter()
            .map(|&s| {
                let e = (s + CHUNK - 1).min(window.hi);
                let mut bits: BitVec<u64, Lsb0> = BitVec::with_capacity((e - s + 1) as usize);
                let mut ambiguous = 0;
                for n in s..=e {
                    let m = self.classify(u, n);
                    if m == super::Membership::Ambiguous {
                        ambiguous += 1;
                    }
                    bits.push(m == super::Membership::In);
                }
                (bits, ambiguous)
            })
            .collect();
        let mut bits: BitVec<u64, Lsb0> = BitVec::with_capacity(window.len() as usize);
        let mut ambiguous = 0;
        for (b, a) in chunks {
            bits.extend_from_bitslice(&b);
            ambiguous += a;
        }
        ReturnSet::from_parts(window, bits, provenance, ambiguous)
    }
}

fn check_group(k: &GroupDescriptor, u: &OpenSet) -> Result<()> {
    if u.group() != k {
        return Err(shape(k, format!("open set on {}", u.group())));
    }
    Ok(())
}

fn rotation_orbit<'a>(k: &GroupDescriptor, start: &GroupPoint, alpha: &GroupPoint, driver: Driver<'a>) -> Orbit<'a> {
    Orbit {
        driver,
        torus: start
            .torus
            .iter()
            .zip(&alpha.torus)
            .map(|(s, a)| Combo::new(&[s.clone(), a.clone()]))
            .collect(),
        torsion: start
            .torsion
            .iter()
            .zip(&alpha.torsion)
            .zip(k.torsion_orders())
            .map(|((&s, &a), &m)| (vec![s, a], m))
            .collect(),
    }
}

/// `{n ∈ window : nα ∈ U}`.
pub fn return_set_linear(k: &GroupDescriptor, alpha: &GroupPoint, u: &OpenSet, window: Window) -> Result<ReturnSet> {
    return_set_linear_from(k, alpha, &GroupPoint::identity(k), u, window)
}

/// `{n ∈ window : x₀ + nα ∈ U}`.
pub fn return_set_linear_from(
    k: &GroupDescriptor,
    alpha: &GroupPoint,
    start: &GroupPoint,
    u: &OpenSet,
    window: Window,
) -> Result<ReturnSet> {
    alpha.validate(k)?;
    start.validate(k)?;
    check_group(k, u)?;
    let provenance = format!("linear K={k} alpha={alpha} start={start} U={u} window={window}");
    Ok(rotation_orbit(k, start, alpha, Driver::Linear).generate(u, window, provenance))
}

/// `{n ∈ window : P(n)α ∈ U}` with `P(n)` evaluated exactly.
pub fn return_set_polynomial(
    k: &GroupDescriptor,
    alpha: &GroupPoint,
    p: &IntegerPolynomial,
    u: &OpenSet,
    window: Window,
) -> Result<ReturnSet> {
    alpha.validate(k)?;
    check_group(k, u)?;
    let provenance = format!("polynomial K={k} alpha={alpha} P={p} U={u} window={window}");
    Ok(rotation_orbit(k, &GroupPoint::identity(k), alpha, Driver::Polynomial(p)).generate(u, window, provenance))
}

/// Return times of the skew-product orbit of `s.start` to `U ⊂ T²`.
pub fn return_set_skew(s: &SkewSystem, u: &OpenSet, window: Window) -> Result<ReturnSet> {
    check_group(&SkewSystem::group(), u)?;
    let (x0, y0) = &s.start;
    let orbit = Orbit {
        driver: Driver::Skew,
        torus: vec![
            Combo::new(&[x0.clone(), s.alpha.clone(), Coord::zero()]),
            Combo::new(&[y0.clone(), x0.clone(), s.alpha.clone()]),
        ],
        torsion: vec![],
    };
    let provenance = format!("skew alpha={} start=({x0}, {y0}) U={u} window={window}", s.alpha);
    Ok(orbit.generate(u, window, provenance))
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// `(1/N)|Σ_{n=1}^N χ(P(n)α)|`.
pub fn weyl_discrepancy(
    k: &GroupDescriptor,
    alpha: &GroupPoint,
    p: &IntegerPolynomial,
    chi: &Character,
    n: u64,
) -> Result<f64> {
    alpha.validate(k)?;
    chi.validate(k)?;
    if n == 0 {
        return Err(Error::InvalidWindow { lo: 1, hi: 0 });
    }
    let fixed: Vec<u128> = alpha.torus.iter().map(Coord::to_fixed128).collect();
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for j in 1..=n as i64 {
        let pw = p.eval_wrapping(j);
        let mut phase = 0u128;
        let mut float_phase = 0.0f64;
        for ((&freq, x), &a) in chi.torus_freqs.iter().zip(&alpha.torus).zip(&fixed) {
            match x {
                Coord::Exact(_) => {
                    phase = phase.wrapping_add((freq as i128 as u128).wrapping_mul(pw).wrapping_mul(a));
                }
                Coord::Float(v) => float_phase += freq as f64 * p.eval_f64(j) * v,
            }
        }
        let mut torsion_phase = 0.0f64;
        for ((&freq, &c), &m) in chi.torsion_freqs.iter().zip(&alpha.torsion).zip(k.torsion_orders()) {
            let r = (p.eval_mod(j, m) as u128 * c as u128 % m as u128) * freq as u128 % m as u128;
            torsion_phase += r as f64 / m as f64;
        }
        let turns = fixed128_to_f64(phase) + float_phase.rem_euclid(1.0) + torsion_phase;
        let (s, c) = (std::f64::consts::TAU * turns.rem_euclid(1.0)).sin_cos();
        re.add(c);
        im.add(s);
    }
    Ok(Complex64::new(re.value(), im.value()).norm() / n as f64)
}
