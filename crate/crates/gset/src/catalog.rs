//! Built-in groups by name: `C_n`, `D_n`, `S_n`, `A_n` and `Q8`.

use crate::error::{Error, Result};
use crate::perm::Perm;

/// A named group given by generating permutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogGroup {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Perm>,
}

fn cycle(n: usize, points: &[usize]) -> Perm {
    Perm::cycle(n, points).expect("catalog cycles are valid")
}

/// `C4`, `C_4`, `D6`, `S4`, `A4`, `Q8`, ...
pub fn catalog_group(name: &str) -> Result<CatalogGroup> {
    let key: String = name.trim().chars().filter(|&c| c != '_').collect();
    let unknown = || Error::UnknownGroup(name.trim().to_string());
    if key == "Q8" {
        // Left multiplication on {1, -1, i, -i, j, -j, k, -k}.
        let i = Perm::from_images(vec![2, 3, 1, 0, 6, 7, 5, 4]).expect("valid");
        let j = Perm::from_images(vec![4, 5, 7, 6, 1, 0, 2, 3]).expect("valid");
        return Ok(CatalogGroup {
            name: "Q8".into(),
            degree: 8,
            generators: vec![i, j],
        });
    }
    let (family, rest) = key.split_at(key.char_indices().nth(1).map_or(key.len(), |(i, _)| i));
    let n: usize = rest.parse().map_err(|_| unknown())?;
    if n == 0 {
        return Err(unknown());
    }
    let all: Vec<usize> = (0..n).collect();
    let generators = match family {
        "C" => {
            if n == 1 {
                vec![]
            } else {
                vec![cycle(n, &all)]
            }
        }
        "D" => {
            if n < 3 {
                return Err(unknown());
            }
            let reflection: Vec<u32> = (0..n).map(|x| ((n - x) % n) as u32).collect();
            vec![cycle(n, &all), Perm::from_images(reflection).expect("valid")]
        }
        "S" => match n {
            1 => vec![],
            2 => vec![cycle(2, &[0, 1])],
            _ => vec![cycle(n, &[0, 1]), cycle(n, &all)],
        },
        "A" => (2..n).map(|i| cycle(n, &[0, 1, i])).collect(),
        _ => return Err(unknown()),
    };
    Ok(CatalogGroup {
        name: format!("{family}{n}"),
        degree: n,
        generators,
    })
}

/// Comma- or whitespace-separated names; `C2..C12` expands a range.
pub fn parse_catalog(s: &str) -> Result<Vec<CatalogGroup>> {
    let mut out = Vec::new();
    for item in s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            let fa = catalog_group(a)?;
            let fb = catalog_group(b)?;
            let (pa, pb) = (&fa.name[..1], &fb.name[..1]);
            if pa != pb {
                return Err(Error::Parse(format!("range {item:?} mixes families")));
            }
            for n in fa.degree..=fb.degree {
                out.push(catalog_group(&format!("{pa}{n}"))?);
            }
        } else {
            out.push(catalog_group(item)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::enumerate_group;

    fn order(name: &str) -> usize {
        let c = catalog_group(name).unwrap();
        enumerate_group(c.degree, &c.generators, 5040).unwrap().group().order()
    }

    #[test]
    fn orders() {
        assert_eq!(order("C1"), 1);
        assert_eq!(order("C_7"), 7);
        assert_eq!(order("D5"), 10);
        assert_eq!(order("S4"), 24);
        assert_eq!(order("A4"), 12);
        assert_eq!(order("A5"), 60);
        assert_eq!(order("Q8"), 8);
    }

    #[test]
    fn quaternion_relations() {
        let q = catalog_group("Q8").unwrap();
        let (i, j) = (&q.generators[0], &q.generators[1]);
        let minus_one = i.compose(i);
        assert_eq!(j.compose(j), minus_one);
        assert_eq!(i.compose(j).compose(&i.compose(j)), minus_one);
        assert!(minus_one.compose(&minus_one).is_identity());
    }

    #[test]
    fn ranges_and_errors() {
        let c = parse_catalog("C2..C5, D3 S3 Q8").unwrap();
        let names: Vec<&str> = c.iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, vec!["C2", "C3", "C4", "C5", "D3", "S3", "Q8"]);
        assert!(catalog_group("X4").is_err());
        assert!(catalog_group("D2").is_err());
        assert!(parse_catalog("C2..S4").is_err());
    }
}
