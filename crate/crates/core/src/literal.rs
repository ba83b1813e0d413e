//! Text literals for groups, points, open sets, windows and polynomials.
//!
//! ```text
//! K      = T^1 x Z/2
//! alpha  = (sqrt2-1, 1)
//! U      = (0, 0.4) x {0} | (0.5, 0.6) x *
//! window = [0, 19]        # or N, meaning [1, N]; 2^20 is accepted
//! P      = 0, -1, 0, 0, 0, 1
//! ```
//!
//! Decimal literals are exact rationals (`0.3` is `3/10`); a trailing `f`
//! (`0.3f`) requests a plain float coordinate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group::{Character, Coord, GroupDescriptor, GroupPoint, QuadSurd};
use crate::orbit::{Arc, IntegerPolynomial, OpenBox, OpenSet, ResidueSet, Window};

fn err(what: &str, s: &str) -> Error {
    Error::Parse(format!("invalid {what}: {s:?}"))
}

/// Splits on a separator word surrounded by whitespace, or on `×`.
fn split_product(s: &str) -> Vec<String> {
    let normalized = s.replace('×', " x ");
    let mut parts = Vec::new();
    let mut current = String::new();
    for tok in normalized.split_whitespace() {
        if tok == "x" {
            parts.push(std::mem::take(&mut current));
        } else {
            if !current.is_empty() {
                current.push(' ');
            }
            current.push_str(tok);
        }
    }
    parts.push(current);
    parts
}

pub fn parse_group(s: &str) -> Result<GroupDescriptor> {
    let t = s.trim();
    if t == "1" || t == "0" || t.eq_ignore_ascii_case("trivial") {
        return Ok(GroupDescriptor::trivial());
    }
    let mut rank = 0usize;
    let mut torsion = Vec::new();
    for factor in split_product(t) {
        let f: String = factor.chars().filter(|c| !c.is_whitespace()).collect();
        if f == "T" {
            rank += 1;
        } else if let Some(r) = f.strip_prefix("T^") {
            rank += r.parse::<usize>().map_err(|_| err("group", s))?;
        } else if let Some(m) = f.strip_prefix("Z/") {
            torsion.push(m.parse::<u64>().map_err(|_| err("group", s))?);
        } else {
            return Err(err("group", s));
        }
    }
    GroupDescriptor::new(rank, torsion)
}

/// Integer, with `a^b` powers allowed (`2^20`).
pub fn parse_integer(s: &str) -> Result<i64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
    if let Some(rest) = t.strip_prefix('-') {
        return parse_integer(rest).map(|v| -v);
    }
    if let Some((b, e)) = t.split_once('^') {
        let b: i64 = b.parse().map_err(|_| err("integer", s))?;
        let e: u32 = e.parse().map_err(|_| err("integer", s))?;
        return b.checked_pow(e).ok_or_else(|| err("integer", s));
    }
    t.parse().map_err(|_| err("integer", s))
}

/// Unsigned decimal or fraction: `3`, `3/10`, `0.25`, `1e-3`.
fn parse_unsigned_rational(s: &str) -> Option<BigRational> {
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_unsigned_rational(n)?;
        let d = parse_unsigned_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(num * ten.pow(scale as u32))
    } else {
        BigRational::new(num, ten.pow((-scale) as u32))
    };
    Some(value)
}

/// Exact rational with optional sign.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(&t)),
    };
    let v = parse_unsigned_rational(body).ok_or_else(|| err("rational", s))?;
    Ok(if neg { -v } else { v })
}

enum Term {
    Exact(QuadSurd),
    Float(f64),
}

/// One unsigned term: `3/10`, `0.3`, `0.3f`, `sqrt2`, `sqrt(2)`, `2*sqrt3`, `sqrt2/2`.
fn parse_term(t: &str, whole: &str) -> Result<Term> {
    if let Some(f) = t.strip_suffix('f') {
        if !f.contains("sqrt") {
            return f.parse::<f64>().map(Term::Float).map_err(|_| err("coordinate", whole));
        }
    }
    if let Some(pos) = t.find("sqrt") {
        let coeff = match t[..pos].strip_suffix('*') {
            Some(c) => parse_unsigned_rational(c).ok_or_else(|| err("coordinate", whole))?,
            None if pos == 0 => BigRational::one(),
            None => return Err(err("coordinate", whole)),
        };
        let rest = &t[pos + 4..];
        let (radicand, tail) = if let Some(r) = rest.strip_prefix('(') {
            let close = r.find(')').ok_or_else(|| err("coordinate", whole))?;
            (&r[..close], &r[close + 1..])
        } else {
            let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            (&rest[..end], &rest[end..])
        };
        let d: u64 = radicand.parse().map_err(|_| err("coordinate", whole))?;
        let mut coeff = coeff;
        if let Some(den) = tail.strip_prefix('/') {
            let den = parse_unsigned_rational(den).ok_or_else(|| err("coordinate", whole))?;
            if den.is_zero() {
                return Err(err("coordinate", whole));
            }
            coeff /= den;
        } else if !tail.is_empty() {
            return Err(err("coordinate", whole));
        }
        return Ok(Term::Exact(QuadSurd::new(BigRational::zero(), coeff, d)));
    }
    parse_unsigned_rational(t)
        .map(|r| Term::Exact(QuadSurd::from_rational(r)))
        .ok_or_else(|| err("coordinate", whole))
}

/// A torus coordinate, reduced mod 1.
pub fn parse_coord(s: &str) -> Result<Coord> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(err("coordinate", s));
    }
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut start = 0;
    let bytes = t.as_bytes();
    for i in 1..=bytes.len() {
        let boundary = i == bytes.len()
            || ((bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        if boundary {
            let piece = &t[start..i];
            let (neg, body) = match piece.as_bytes()[0] {
                b'-' => (true, &piece[1..]),
                b'+' => (false, &piece[1..]),
                _ => (false, piece),
            };
            terms.push((neg, body));
            start = i;
        }
    }
    let mut exact = Some(QuadSurd::from_integer(0));
    let mut float = 0.0;
    for (neg, body) in terms {
        match parse_term(body, s)? {
            Term::Exact(q) => {
                let q = if neg { q.neg() } else { q };
                float += q.to_f64();
                if let Some(acc) = exact.as_mut() {
                    *acc = acc
                        .checked_add(&q)
                        .ok_or_else(|| Error::Parse(format!("mixed radicands in {s:?}")))?;
                }
            }
            Term::Float(v) => {
                float += if neg { -v } else { v };
                exact = None;
            }
        }
    }
    Ok(match exact {
        Some(q) => Coord::exact(q),
        None => Coord::float(float),
    })
}

fn strip_parens(s: &str) -> &str {
    let t = s.trim();
    t.strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(t)
}

/// Point literal: torus coordinates first, then torsion residues.
pub fn parse_point(k: &GroupDescriptor, s: &str) -> Result<GroupPoint> {
    let inner = strip_parens(s);
    let parts: Vec<&str> = if inner.trim().is_empty() {
        vec![]
    } else {
        inner.split(',').collect()
    };
    if parts.len() != k.coord_count() {
        return Err(Error::Parse(format!("point {s:?} needs {} coordinates for {k}", k.coord_count())));
    }
    let r = k.torus_rank();
    let torus = parts[..r].iter().map(|p| parse_coord(p)).collect::<Result<Vec<_>>>()?;
    let torsion = parts[r..]
        .iter()
        .map(|p| p.trim().parse::<u64>().map_err(|_| err("residue", p)))
        .collect::<Result<Vec<_>>>()?;
    let p = GroupPoint::new(torus, torsion);
    p.validate(k)?;
    Ok(p)
}

/// Character literal: integer torus frequencies, then torsion residues.
pub fn parse_character(k: &GroupDescriptor, s: &str) -> Result<Character> {
    let inner = strip_parens(s);
    let parts: Vec<&str> = if inner.trim().is_empty() {
        vec![]
    } else {
        inner.split(',').collect()
    };
    if parts.len() != k.coord_count() {
        return Err(Error::Parse(format!("character {s:?} needs {} entries for {k}", k.coord_count())));
    }
    let r = k.torus_rank();
    let torus = parts[..r]
        .iter()
        .map(|p| p.trim().parse::<i64>().map_err(|_| err("frequency", p)))
        .collect::<Result<Vec<_>>>()?;
    let torsion = parts[r..]
        .iter()
        .zip(k.torsion_orders())
        .map(|(p, &m)| {
            p.trim()
                .parse::<i64>()
                .map(|a| a.rem_euclid(m as i64) as u64)
                .map_err(|_| err("frequency", p))
        })
        .collect::<Result<Vec<_>>>()?;
    let chi = Character::new(torus, torsion);
    chi.validate(k)?;
    Ok(chi)
}

fn parse_arc(s: &str) -> Result<Arc> {
    let t = s.trim();
    if t == "T" || t == "*" {
        return Ok(Arc::Full);
    }
    let inner = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| err("arc", s))?;
    let (lo, hi) = inner.split_once(',').ok_or_else(|| err("arc", s))?;
    Arc::open(parse_rational(lo)?, parse_rational(hi)?)
}

fn parse_residues(m: u64, s: &str) -> Result<ResidueSet> {
    let t = s.trim();
    if t == "*" {
        return Ok(ResidueSet::full(m));
    }
    let inner = t
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| err("residue set", s))?;
    let residues = inner
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<u64>().map_err(|_| err("residue", p)))
        .collect::<Result<Vec<_>>>()?;
    ResidueSet::new(m, residues)
}

/// Union of boxes separated by `|`; each box lists one factor per coordinate.
pub fn parse_open_set(k: &GroupDescriptor, s: &str) -> Result<OpenSet> {
    let t = s.trim();
    if t == "*" || t == "K" {
        return Ok(OpenSet::full(k.clone()));
    }
    if t == "empty" {
        return OpenSet::new(k.clone(), vec![]);
    }
    let mut boxes = Vec::new();
    for b in t.split('|') {
        let factors = split_product(b);
        if factors.len() != k.coord_count() {
            return Err(Error::Parse(format!("box {:?} needs {} factors for {k}", b.trim(), k.coord_count())));
        }
        let r = k.torus_rank();
        let arcs = factors[..r].iter().map(|f| parse_arc(f)).collect::<Result<Vec<_>>>()?;
        let residues = factors[r..]
            .iter()
            .zip(k.torsion_orders())
            .map(|(f, &m)| parse_residues(m, f))
            .collect::<Result<Vec<_>>>()?;
        boxes.push(OpenBox::new(arcs, residues));
    }
    OpenSet::new(k.clone(), boxes)
}

/// `[lo, hi]`, or a bare `N` meaning `[1, N]`.
pub fn parse_window(s: &str) -> Result<Window> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let (lo, hi) = inner.split_once(',').ok_or_else(|| err("window", s))?;
        return Window::new(parse_integer(lo)?, parse_integer(hi)?);
    }
    let n = parse_integer(t)?;
    if n < 1 {
        return Err(err("window", s));
    }
    Ok(Window::first(n as u64))
}

/// Comma-separated coefficients in ascending degree, optionally bracketed.
pub fn parse_polynomial(s: &str) -> Result<IntegerPolynomial> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .unwrap_or(t);
    let coeffs = inner
        .split(',')
        .map(|c| c.trim().parse::<BigInt>().map_err(|_| err("polynomial coefficient", c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntegerPolynomial::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::Membership;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn groups() {
        assert_eq!(parse_group("T^1 x Z/2").unwrap(), GroupDescriptor::new(1, vec![2]).unwrap());
        assert_eq!(parse_group("Z/4 × Z/2 x T").unwrap(), GroupDescriptor::new(1, vec![2, 4]).unwrap());
        assert_eq!(parse_group("1").unwrap(), GroupDescriptor::trivial());
        assert!(parse_group("Z/1").is_err());
        assert!(parse_group("R^2").is_err());
    }

    #[test]
    fn coordinates() {
        let c = parse_coord("sqrt2-1").unwrap();
        assert_eq!(c, Coord::exact(QuadSurd::new(q(-1, 1), q(1, 1), 2)));
        assert_eq!(parse_coord("sqrt(2) + 1/5").unwrap(), Coord::exact(QuadSurd::new(q(1, 5), q(1, 1), 2)));
        assert_eq!(parse_coord("0.3").unwrap(), Coord::exact(QuadSurd::from_ratio(3, 10)));
        assert_eq!(parse_coord("2*sqrt8").unwrap(), Coord::exact(QuadSurd::new(q(0, 1), q(4, 1), 2)));
        assert_eq!(parse_coord("sqrt5/2").unwrap(), Coord::exact(QuadSurd::new(q(0, 1), q(1, 2), 5)));
        assert_eq!(parse_coord("-0.25").unwrap(), Coord::exact(QuadSurd::from_ratio(3, 4)));
        assert!(matches!(parse_coord("0.3f").unwrap(), Coord::Float(x) if (x - 0.3).abs() < 1e-15));
        assert!(matches!(parse_coord("1e-3f").unwrap(), Coord::Float(x) if (x - 1e-3).abs() < 1e-18));
        assert!(parse_coord("sqrt2+sqrt3").is_err());
        assert!(parse_coord("abc").is_err());
    }

    #[test]
    fn points_and_characters() {
        let k = parse_group("T^1 x Z/2").unwrap();
        let p = parse_point(&k, "(sqrt2-1, 1)").unwrap();
        assert_eq!(p.torsion, vec![1]);
        assert!(parse_point(&k, "(0.5)").is_err());
        assert!(parse_point(&k, "(0.5, 2)").is_err());
        assert_eq!(parse_character(&k, "(3, -1)").unwrap(), Character::new(vec![3], vec![1]));
    }

    #[test]
    fn open_sets() {
        let k = parse_group("T^1 x Z/2").unwrap();
        let u = parse_open_set(&k, "(0, 0.4) x {0}").unwrap();
        assert_eq!(u.jordan_measure_exact(), q(1, 5));
        let t1 = parse_group("T").unwrap();
        let two = parse_open_set(&t1, "(-0.1, 0.1) | (0.4, 0.6)").unwrap();
        let x = parse_point(&t1, "0.45").unwrap();
        assert_eq!(two.membership(&x).unwrap(), Membership::In);
        let t2 = parse_group("T^2").unwrap();
        let cyl = parse_open_set(&t2, "(0, 0.37) x T").unwrap();
        assert_eq!(cyl.closure_stabilizer().unwrap().full_directions, vec![false, true]);
        assert!(parse_open_set(&t2, "(0, 0.37)").is_err());
        assert!(parse_open_set(&t1, "(0.5, 0.2)").is_err());
    }

    #[test]
    fn windows_and_polynomials() {
        assert_eq!(parse_window("[0, 19]").unwrap(), Window::new(0, 19).unwrap());
        assert_eq!(parse_window("2^20").unwrap(), Window::first(1 << 20));
        assert_eq!(parse_window("[-10^4, 10^4]").unwrap(), Window::new(-10_000, 10_000).unwrap());
        assert!(parse_window("[5, 1]").is_err());
        assert_eq!(parse_polynomial("[0, -1, 0, 0, 0, 1]").unwrap().to_string(), "n^5 - n");
    }
}
