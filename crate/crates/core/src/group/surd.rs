//! Exact quadratic irrationals `a + b·√d` with rational `a`, `b`.
//!
//! Everything the orbit code needs from an exact coordinate reduces to an
//! exact floor, which is computed with integer square roots so no rounding
//! ever enters a membership decision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `rational + irrational·√radicand`, with `radicand` square-free.
///
/// When `irrational` is zero the radicand is normalized to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    rational: BigRational,
    irrational: BigRational,
    radicand: u64,
}

/// Splits `n` into `(s, d)` with `n = s²·d` and `d` square-free.
fn square_free_part(mut n: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            square *= p;
        }
        p += 1;
    }
    (square, n)
}

impl QuadSurd {
    pub fn from_rational(r: BigRational) -> Self {
        Self {
            rational: r,
            irrational: BigRational::zero(),
            radicand: 1,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `√n`, simplified so that the radicand is square-free.
    pub fn sqrt(n: u64) -> Self {
        let (s, d) = square_free_part(n);
        let s = BigRational::from_integer(BigInt::from(s));
        if d == 1 || n == 0 {
            let v = if n == 0 { BigRational::zero() } else { s };
            Self::from_rational(v)
        } else {
            Self {
                rational: BigRational::zero(),
                irrational: s,
                radicand: d,
            }
        }
    }

    /// `a + b·√d` with arbitrary (not necessarily square-free) `d`.
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Self {
        let root = Self::sqrt(d);
        let scaled = root.mul_rational(&b);
        scaled
            .checked_add(&Self::from_rational(a))
            .expect("single radicand always compatible")
    }

    fn normalized(mut self) -> Self {
        if self.irrational.is_zero() {
            self.radicand = 1;
        }
        self
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.irrational
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.irrational.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.irrational.is_zero()
    }

    /// Radicands are compatible when either side is rational or they agree.
    pub fn compatible(&self, other: &Self) -> bool {
        self.is_rational() || other.is_rational() || self.radicand == other.radicand
    }

    fn joint_radicand(&self, other: &Self) -> u64 {
        if self.is_rational() {
            other.radicand
        } else {
            self.radicand
        }
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        if !self.compatible(other) {
            return None;
        }
        Some(
            Self {
                rational: &self.rational + &other.rational,
                irrational: &self.irrational + &other.irrational,
                radicand: self.joint_radicand(other),
            }
            .normalized(),
        )
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            rational: -&self.rational,
            irrational: -&self.irrational,
            radicand: self.radicand,
        }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        let n = BigRational::from_integer(n.clone());
        self.mul_rational(&n)
    }

    pub fn mul_rational(&self, q: &BigRational) -> Self {
        Self {
            rational: &self.rational * q,
            irrational: &self.irrational * q,
            radicand: self.radicand,
        }
        .normalized()
    }

    /// Exact `⌊x⌋`.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.rational.floor().to_integer();
        }
        // x = (p + q√d) / den with den > 0.
        let den = self.rational.denom().lcm(self.irrational.denom());
        let p = self.rational.numer() * (&den / self.rational.denom());
        let q = self.irrational.numer() * (&den / self.irrational.denom());
        let q_sq_d = &q * &q * BigInt::from(self.radicand);
        let root = q_sq_d.sqrt();
        let exact_square = &root * &root == q_sq_d;
        let floor_q_sqrt_d = if q.sign() != Sign::Minus {
            root
        } else if exact_square {
            -root
        } else {
            -root - BigInt::one()
        };
        // ⌊(M + f)/den⌋ = ⌊M/den⌋ for integer M and 0 ≤ f < 1.
        (p + floor_q_sqrt_d).div_floor(&den)
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Self {
        let fl = BigRational::from_integer(self.floor());
        Self {
            rational: &self.rational - fl,
            irrational: self.irrational.clone(),
            radicand: self.radicand,
        }
        .normalized()
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        let a = ratio_sign(&self.rational);
        let b = ratio_sign(&self.irrational);
        match (a, b) {
            (Sign::NoSign, s) | (s, Sign::NoSign) => sign_to_ordering(s),
            (sa, sb) if sa == sb => sign_to_ordering(sa),
            (sa, _) => {
                // a and b√d have opposite signs: compare a² with b²·d.
                let a2 = &self.rational * &self.rational;
                let b2d = &self.irrational
                    * &self.irrational
                    * BigRational::from_integer(BigInt::from(self.radicand));
                match a2.cmp(&b2d) {
                    Ordering::Greater => sign_to_ordering(sa),
                    Ordering::Less => sign_to_ordering(sa).reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// Exact comparison; `None` when the radicands differ.
    pub fn checked_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_sub(other).map(|d| d.signum())
    }

    /// `⌊frac(x)·2^128⌋`, the 128-bit fixed-point image of `x mod 1`.
    pub fn to_fixed128(&self) -> u128 {
        let scale = BigRational::from_integer(BigInt::one() << 128);
        let scaled = self.fract().mul_rational(&scale);
        let fl = scaled.floor();
        let (_, digits) = fl.to_u64_digits();
        let mut out = 0u128;
        for (i, d) in digits.iter().take(2).enumerate() {
            out |= (*d as u128) << (64 * i);
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return self.rational.to_f64().unwrap_or(f64::NAN);
        }
        // Go through the fixed-point image so cancellation (e.g. √2 - 1.414...)
        // does not lose the leading digits.
        let fl = self.floor().to_f64().unwrap_or(f64::NAN);
        fl + fixed128_to_f64(self.to_fixed128())
    }
}

pub(crate) fn fixed128_to_f64(x: u128) -> f64 {
    let hi = (x >> 64) as u64 as f64;
    let lo = (x as u64) as f64;
    (hi + lo / 18446744073709551616.0) / 18446744073709551616.0
}

fn ratio_sign(r: &BigRational) -> Sign {
    if r.is_positive() {
        Sign::Plus
    } else if r.is_negative() {
        Sign::Minus
    } else {
        Sign::NoSign
    }
}

fn sign_to_ordering(s: Sign) -> Ordering {
    match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.rational);
        }
        let b = &self.irrational;
        let radical = if b.is_one() {
            format!("sqrt{}", self.radicand)
        } else if (-b).is_one() {
            format!("-sqrt{}", self.radicand)
        } else {
            format!("{}*sqrt{}", b, self.radicand)
        };
        if self.rational.is_zero() {
            write!(f, "{radical}")
        } else if radical.starts_with('-') {
            write!(f, "{}{}", self.rational, radical)
        } else {
            write!(f, "{}+{}", self.rational, radical)
        }
    }
}

/// Exact check that `Σ qᵢ·√dᵢ` (mixed radicands allowed) is an integer.
///
/// Square roots of distinct square-free integers are linearly independent
/// over the rationals, so the sum is an integer iff every irrational
/// coefficient vanishes and the rational part is integral.
pub(crate) fn mixed_sum_is_integer<'a>(terms: impl IntoIterator<Item = &'a QuadSurd>) -> bool {
    use std::collections::BTreeMap;
    let mut rational = BigRational::zero();
    let mut radicals: BTreeMap<u64, BigRational> = BTreeMap::new();
    for t in terms {
        rational += &t.rational;
        if !t.is_rational() {
            *radicals.entry(t.radicand).or_insert_with(BigRational::zero) += &t.irrational;
        }
    }
    radicals.values().all(Zero::is_zero) && rational.is_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sqrt_simplifies() {
        let s = QuadSurd::sqrt(8);
        assert_eq!(s.radicand(), 2);
        assert_eq!(s.irrational_part(), &r(2, 1));
        assert!(QuadSurd::sqrt(9).is_rational());
    }

    #[test]
    fn floor_matches_float_away_from_integers() {
        for (a, b, d) in [(0, 1, 2), (-1, 1, 2), (3, -2, 5), (-7, -3, 3), (1, 7, 11)] {
            for scale in [1i64, 3, 17, 1000, 123_456_789] {
                let x = QuadSurd::new(r(a, 1), r(b, 1), d).mul_int(&BigInt::from(scale));
                let approx = (a as f64 + b as f64 * (d as f64).sqrt()) * scale as f64;
                assert_eq!(x.floor(), BigInt::from(approx.floor() as i64), "{x}");
            }
        }
    }

    #[test]
    fn exact_cancellation() {
        let a = QuadSurd::new(r(-1, 1), r(1, 1), 2);
        let b = QuadSurd::new(r(2, 1), r(-1, 1), 2);
        let s = a.checked_add(&b).unwrap().fract();
        assert!(s.is_zero());
    }

    #[test]
    fn signum_of_near_cancellation() {
        // 1393/985 approximates √2 from below, 577/408 from above.
        let below = QuadSurd::new(r(-1393, 985), r(1, 1), 2);
        assert_eq!(below.signum(), Ordering::Greater);
        assert_eq!(below.neg().signum(), Ordering::Less);
        let above = QuadSurd::new(r(-577, 408), r(1, 1), 2);
        assert_eq!(above.signum(), Ordering::Less);
    }

    #[test]
    fn fixed_point_image() {
        let half = QuadSurd::from_ratio(1, 2);
        assert_eq!(half.to_fixed128(), 1u128 << 127);
        let x = QuadSurd::new(r(-1, 1), r(1, 1), 2);
        assert!((fixed128_to_f64(x.to_fixed128()) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((x.to_f64() - 0.41421356237309503).abs() < 1e-16);
    }

    #[test]
    fn mixed_integrality() {
        let a = QuadSurd::sqrt(2);
        let b = QuadSurd::sqrt(3);
        assert!(!mixed_sum_is_integer([&a, &b]));
        assert!(mixed_sum_is_integer([&a, &a.neg(), &QuadSurd::from_integer(4)]));
    }
}
