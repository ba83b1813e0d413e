//! Permutations of `{0, .., n-1}` and cycle notation.

use std::fmt;

use crate::error::{Error, Result};

/// A permutation stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::Parse(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Parses `(0 1 2)(3 4)`; commas may separate points. `()` is the
    /// identity. Points beyond the listed ones are fixed.
    pub fn parse(s: &str, degree: usize) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let t = s.trim();
        if t.is_empty() || t == "()" || t == "id" {
            return Ok(Perm(images));
        }
        let mut rest = t;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {s:?}")))?;
            let close = open.find(')').ok_or_else(|| Error::Parse(format!("unclosed cycle in {s:?}")))?;
            let points = open[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad point {p:?} in {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            for &p in &points {
                if p >= degree {
                    return Err(Error::PointOutOfRange { point: p, degree });
                }
            }
            let cycle = Perm::cycle(degree, &points)?;
            images = cycle.compose(&Perm(images)).0;
            rest = open[close + 1..].trim_start();
        }
        Perm::from_images(images)
    }

    /// The cycle `(p₀ p₁ .. p_k)`.
    pub fn cycle(degree: usize, points: &[usize]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut seen = vec![false; degree];
        for (i, &p) in points.iter().enumerate() {
            if p >= degree {
                return Err(Error::PointOutOfRange { point: p, degree });
            }
            if seen[p] {
                return Err(Error::Parse(format!("point {p} repeated in cycle {points:?}")));
            }
            seen[p] = true;
            images[p] = points[(i + 1) % points.len()] as u32;
        }
        Ok(Perm(images))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut any = false;
        for start in 0..n {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.0[x] as usize;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Parses a generator list separated by `;`, e.g. `(0 1 2 3); (0 2)`.
/// The degree defaults to one more than the largest point mentioned.
pub fn parse_generators(s: &str, degree: Option<usize>) -> Result<(usize, Vec<Perm>)> {
    let parts: Vec<&str> = s.split(';').map(str::trim).filter(|p| !p.is_empty()).collect();
    let inferred = parts
        .iter()
        .flat_map(|p| p.split(|c: char| !c.is_ascii_digit()))
        .filter_map(|t| t.parse::<usize>().ok())
        .max()
        .map_or(1, |m| m + 1);
    let degree = degree.unwrap_or(inferred);
    let gens = parts.iter().map(|p| Perm::parse(p, degree)).collect::<Result<Vec<_>>>()?;
    Ok((degree, gens))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_roundtrip() {
        let p = Perm::parse("(0 1 2)(3 4)", 6).unwrap();
        assert_eq!(p.images(), &[1, 2, 0, 4, 3, 5]);
        assert_eq!(p.to_string(), "(0 1 2)(3 4)");
        assert_eq!(Perm::parse(&p.to_string(), 6).unwrap(), p);
        assert_eq!(Perm::identity(3).to_string(), "()");
    }

    #[test]
    fn composition_applies_right_first() {
        let a = Perm::parse("(0 1)", 3).unwrap();
        let b = Perm::parse("(1 2)", 3).unwrap();
        // (a∘b)(1) = a(2) = 2.
        assert_eq!(a.compose(&b).apply(1), 2);
        assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn generator_lists() {
        let (n, g) = parse_generators("(0,1,2,3); (0 2)", None).unwrap();
        assert_eq!(n, 4);
        assert_eq!(g.len(), 2);
        assert!(Perm::parse("(0 5)", 4).is_err());
        assert!(Perm::parse("(0 1 0)", 4).is_err());
    }
}
