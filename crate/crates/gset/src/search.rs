//! Search harness for subsets with trivial setwise stabilizer that are not
//! simple.
//!
//! Whether such subsets exist is an open question; the harness only gathers
//! evidence. Every counterexample carries a certificate that
//! [`verify_certificate`] re-checks from scratch, sharing no code with the
//! block-system computation that produced it.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::blocks::{block_system_generated, point_set};
use crate::catalog::CatalogGroup;
use crate::error::{Error, Result};
use crate::group::{transitive_actions, PermAction, PermGroup, DEFAULT_ORDER_CAP};
use crate::perm::Perm;

pub const OPEN_QUESTION_BANNER: &str = "open question evidence: this search looks for subsets with trivial setwise \
stabilizer that are not simple; finding none does not settle the question, and any certificate below is a \
verified instance, not a proof of a general statement";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchLimits {
    /// Cap on group orders.
    pub cap: usize,
    /// Subsets are enumerated exhaustively up to this degree.
    pub exhaustive_degree: usize,
    /// Random subsets drawn per action above that degree.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ORDER_CAP,
            exhaustive_degree: 16,
            samples: 4096,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Regime {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// A transitive action, a subset `U`, and a nontrivial invariant partition
/// of which `U` is a union of blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub group: String,
    pub degree: usize,
    /// Images of the group generators, in cycle notation.
    pub generators: Vec<String>,
    pub subset: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

/// One subset, up to the group action, of one transitive action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceRecord {
    pub group: String,
    pub action: usize,
    pub degree: usize,
    pub subset: Vec<usize>,
    /// Number of translates `gU`.
    pub orbit_size: usize,
    pub trivial_stabilizer: bool,
    pub simple: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActionSummary {
    pub group: String,
    pub action: usize,
    pub degree: usize,
    pub point_stabilizer_order: usize,
    pub regime: Regime,
    /// Orbit representatives examined.
    pub subsets: usize,
    pub trivial_stabilizer: usize,
    pub simple: usize,
    pub counterexamples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub banner: String,
    pub limits: SearchLimits,
    pub summaries: Vec<ActionSummary>,
    pub records: Vec<InstanceRecord>,
    pub counterexamples: Vec<Certificate>,
}

/// Precomputed point images of one action, for bitmask subsets.
struct MaskAction {
    images: Vec<Vec<u8>>,
    degree: usize,
}

impl MaskAction {
    fn new(a: &PermAction) -> Self {
        Self {
            images: (0..a.group().order())
                .map(|g| a.image(g).images().iter().map(|&x| x as u8).collect())
                .collect(),
            degree: a.degree(),
        }
    }

    fn apply(&self, g: usize, mask: u64) -> u64 {
        let img = &self.images[g];
        let mut out = 0u64;
        let mut m = mask;
        while m != 0 {
            let x = m.trailing_zeros() as usize;
            out |= 1 << img[x];
            m &= m - 1;
        }
        out
    }

    /// Least element of the orbit `G·U`.
    fn canonical(&self, mask: u64) -> u64 {
        (0..self.images.len()).map(|g| self.apply(g, mask)).min().unwrap_or(mask)
    }

    fn stabilizer_order(&self, mask: u64) -> usize {
        (0..self.images.len()).filter(|&g| self.apply(g, mask) == mask).count()
    }

    fn to_set(&self, mask: u64) -> Vec<bool> {
        (0..self.degree).map(|x| mask >> x & 1 == 1).collect()
    }
}

fn mask_members(mask: u64, degree: usize) -> Vec<usize> {
    (0..degree).filter(|&x| mask >> x & 1 == 1).collect()
}

fn search_action(
    name: &str,
    index: usize,
    action: &PermAction,
    point_stabilizer_order: usize,
    limits: &SearchLimits,
) -> Result<(ActionSummary, Vec<InstanceRecord>)> {
    let n = action.degree();
    let ma = MaskAction::new(action);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let (regime, reps): (Regime, Vec<u64>) = if n <= limits.exhaustive_degree {
        let reps = (0..=full).into_par_iter().filter(|&m| ma.canonical(m) == m).collect();
        (Regime::Exhaustive, reps)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(limits.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let drawn: Vec<u64> = (0..limits.samples).map(|_| rng.random::<u64>() & full).collect();
        let reps: BTreeSet<u64> = drawn.par_iter().map(|&m| ma.canonical(m)).collect::<Vec<_>>().into_iter().collect();
        (
            Regime::Sampled {
                samples: limits.samples,
                seed: limits.seed,
            },
            reps.into_iter().collect(),
        )
    };
    let generators: Vec<String> = action.generator_images().iter().map(ToString::to_string).collect();
    let order = action.group().order();
    let records = reps
        .par_iter()
        .map(|&mask| -> Result<InstanceRecord> {
            let stab = ma.stabilizer_order(mask);
            let u = ma.to_set(mask);
            let blocks = block_system_generated(action, &u)?;
            let simple = blocks.is_discrete();
            let trivial_stabilizer = stab == 1;
            let certificate = (trivial_stabilizer && !simple).then(|| Certificate {
                group: name.to_string(),
                degree: n,
                generators: generators.clone(),
                subset: mask_members(mask, n),
                blocks: blocks.blocks(),
            });
            Ok(InstanceRecord {
                group: name.to_string(),
                action: index,
                degree: n,
                subset: mask_members(mask, n),
                orbit_size: order / stab,
                trivial_stabilizer,
                simple,
                certificate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = ActionSummary {
        group: name.to_string(),
        action: index,
        degree: n,
        point_stabilizer_order,
        regime,
        subsets: records.len(),
        trivial_stabilizer: records.iter().filter(|r| r.trivial_stabilizer).count(),
        simple: records.iter().filter(|r| r.simple).count(),
        counterexamples: records.iter().filter(|r| r.certificate.is_some()).count(),
    };
    Ok((summary, records))
}

/// Runs over every transitive action (up to conjugacy of point stabilizers)
/// of every catalog group, and every subset up to the group action.
pub fn search_counterexamples(catalog: &[CatalogGroup], limits: &SearchLimits) -> Result<SearchReport> {
    let mut summaries = Vec::new();
    let mut records = Vec::new();
    for entry in catalog {
        let group = Arc::new(PermGroup::generate(entry.degree, &entry.generators, limits.cap)?);
        for (i, ca) in transitive_actions(&group, true)?.iter().enumerate() {
            if ca.action.degree() > 64 {
                return Err(Error::DegreeMismatch {
                    expected: 64,
                    got: ca.action.degree(),
                });
            }
            let (summary, recs) = search_action(&entry.name, i, &ca.action, ca.subgroup.len(), limits)?;
            summaries.push(summary);
            records.extend(recs);
        }
    }
    let counterexamples = records.iter().filter_map(|r| r.certificate.clone()).collect();
    Ok(SearchReport {
        banner: OPEN_QUESTION_BANNER.to_string(),
        limits: limits.clone(),
        summaries,
        records,
        counterexamples,
    })
}

/// Outcome of re-checking a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub valid: bool,
    pub failures: Vec<String>,
}

/// Re-verifies a certificate from its generators alone: the blocks form a
/// partition that is not all singletons, each generator maps blocks onto
/// blocks, `U` is a union of blocks, and only the identity fixes `U`.
pub fn verify_certificate(c: &Certificate, cap: usize) -> Result<CertificateCheck> {
    let gens = c
        .generators
        .iter()
        .map(|g| Perm::parse(g, c.degree))
        .collect::<Result<Vec<_>>>()?;
    let group = PermGroup::generate(c.degree, &gens, cap)?;
    let mut failures = Vec::new();

    let mut owner = vec![usize::MAX; c.degree];
    for (i, b) in c.blocks.iter().enumerate() {
        for &x in b {
            if x >= c.degree || owner[x] != usize::MAX {
                failures.push(format!("point {x} is out of range or repeated"));
            } else {
                owner[x] = i;
            }
        }
    }
    if owner.contains(&usize::MAX) {
        failures.push("blocks do not cover every point".into());
    }
    if !failures.is_empty() {
        return Ok(CertificateCheck { valid: false, failures });
    }
    if c.blocks.iter().all(|b| b.len() == 1) {
        failures.push("partition is all singletons".into());
    }
    for g in &gens {
        for b in &c.blocks {
            let target = owner[g.apply(b[0])];
            let moved: Vec<usize> = b.iter().map(|&x| owner[g.apply(x)]).collect();
            if moved.iter().any(|&t| t != target) || c.blocks[target].len() != b.len() {
                failures.push(format!("generator {g} does not map block {b:?} onto a block"));
            }
        }
    }
    let u = point_set(c.degree, &c.subset)?;
    for b in &c.blocks {
        if b.iter().any(|&x| u[x] != u[b[0]]) {
            failures.push(format!("subset cuts block {b:?}"));
        }
    }
    let fixers = group
        .elements()
        .iter()
        .filter(|p| (0..c.degree).all(|x| u[p.apply(x)] == u[x]))
        .count();
    if fixers != 1 {
        failures.push(format!("setwise stabilizer has order {fixers}"));
    }
    Ok(CertificateCheck {
        valid: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_group, parse_catalog};

    #[test]
    fn prime_cyclic_groups_have_no_counterexamples() {
        let report = search_counterexamples(&parse_catalog("C2, C3, C5, C7").unwrap(), &SearchLimits::default()).unwrap();
        assert!(report.counterexamples.is_empty());
        assert!(report.banner.starts_with("open question evidence"));
    }

    #[test]
    fn z4_trivial_stabilizer_implies_simple() {
        let report = search_counterexamples(&[catalog_group("C4").unwrap()], &SearchLimits::default()).unwrap();
        assert!(report.counterexamples.is_empty());
        let regular: Vec<&InstanceRecord> = report.records.iter().filter(|r| r.degree == 4).collect();
        // 16 subsets of Z/4 fall into 6 orbits.
        assert_eq!(regular.len(), 6);
        assert_eq!(regular.iter().map(|r| r.orbit_size).sum::<usize>(), 16);
        for r in regular.iter().filter(|r| r.trivial_stabilizer) {
            assert!(r.simple);
        }
    }

    #[test]
    fn empty_catalog() {
        let report = search_counterexamples(&[], &SearchLimits::default()).unwrap();
        assert!(report.records.is_empty() && report.summaries.is_empty());
    }

    #[test]
    fn sampled_regime_is_deterministic() {
        let limits = SearchLimits {
            exhaustive_degree: 4,
            samples: 64,
            seed: 42,
            ..SearchLimits::default()
        };
        let cat = [catalog_group("D4").unwrap()];
        let a = search_counterexamples(&cat, &limits).unwrap();
        let b = search_counterexamples(&cat, &limits).unwrap();
        assert_eq!(a, b);
        assert!(a
            .summaries
            .iter()
            .any(|s| matches!(s.regime, Regime::Sampled { samples: 64, seed: 42 })));
    }

    #[test]
    fn certificate_checker_rejects_bad_certificates() {
        let good_blocks_bad_subset = Certificate {
            group: "C4".into(),
            degree: 4,
            generators: vec!["(0 1 2 3)".into()],
            subset: vec![0, 2],
            blocks: vec![vec![0, 2], vec![1, 3]],
        };
        let check = verify_certificate(&good_blocks_bad_subset, 100).unwrap();
        assert!(!check.valid);
        assert!(check.failures.iter().any(|f| f.contains("stabilizer")));

        let not_invariant = Certificate {
            blocks: vec![vec![0, 1], vec![2, 3]],
            subset: vec![0, 1],
            ..good_blocks_bad_subset.clone()
        };
        let check = verify_certificate(&not_invariant, 100).unwrap();
        assert!(check.failures.iter().any(|f| f.contains("does not map")));
    }
}
