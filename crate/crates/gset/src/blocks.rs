//! Block systems generated by a subset, simplicity, return subsets and the
//! reconstruction of a pointed transitive G-set from its return subset.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{PermAction, PermGroup};
use crate::perm::Perm;

/// Indicator of a subset of `{0, .., n-1}` from a member list.
pub fn point_set(degree: usize, members: &[usize]) -> Result<Vec<bool>> {
    let mut s = vec![false; degree];
    for &x in members {
        if x >= degree {
            return Err(Error::PointOutOfRange { point: x, degree });
        }
        s[x] = true;
    }
    Ok(s)
}

pub fn members(set: &[bool]) -> Vec<usize> {
    set.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

fn check_len(a: &PermAction, u: &[bool]) -> Result<()> {
    if u.len() != a.degree() {
        return Err(Error::DegreeMismatch {
            expected: a.degree(),
            got: u.len(),
        });
    }
    Ok(())
}

/// A partition of `{0, .., n-1}`, stored as block ids numbered by first
/// appearance.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockSystem {
    block_of: Vec<usize>,
    count: usize,
}

impl BlockSystem {
    /// Normalizes arbitrary labels to first-appearance numbering.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: impl IntoIterator<Item = T>) -> Self {
        let mut ids: HashMap<T, usize> = HashMap::new();
        let block_of: Vec<usize> = labels
            .into_iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l).or_insert(next)
            })
            .collect();
        Self {
            count: ids.len(),
            block_of,
        }
    }

    pub fn from_blocks(degree: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut label = vec![usize::MAX; degree];
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            for &x in b {
                if x >= degree {
                    return Err(Error::PointOutOfRange { point: x, degree });
                }
                if label[x] != usize::MAX {
                    return Err(Error::Parse(format!("point {x} in two blocks")));
                }
                label[x] = i;
            }
        }
        if let Some(x) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Parse(format!("point {x} in no block")));
        }
        Ok(Self::from_labels(label))
    }

    pub fn degree(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_count(&self) -> usize {
        self.count
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    /// All blocks are singletons.
    pub fn is_discrete(&self) -> bool {
        self.count == self.block_of.len()
    }

    /// Every generator image maps each block onto a block.
    pub fn is_invariant(&self, generators: &[Perm]) -> bool {
        let blocks = self.blocks();
        generators.iter().all(|g| {
            blocks.iter().all(|b| {
                let target = self.block_of[g.apply(b[0])];
                b.iter().all(|&x| self.block_of[g.apply(x)] == target)
            })
        })
    }

    pub fn is_union_of_blocks(&self, u: &[bool]) -> bool {
        let mut state: Vec<Option<bool>> = vec![None; self.count];
        u.iter().enumerate().all(|(x, &inside)| {
            let s = &mut state[self.block_of[x]];
            match s {
                Some(prev) => *prev == inside,
                None => {
                    *s = Some(inside);
                    true
                }
            }
        })
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &BlockSystem) -> bool {
        let mut target = vec![usize::MAX; self.count];
        self.block_of.iter().zip(&other.block_of).all(|(&a, &b)| {
            if target[a] == usize::MAX {
                target[a] = b;
            }
            target[a] == b
        })
    }
}

/// `{g ∈ G : gU = U}` as element indices.
pub fn setwise_stabilizer(a: &PermAction, u: &[bool]) -> Result<Vec<usize>> {
    a.require_transitive()?;
    check_len(a, u)?;
    Ok((0..a.group().order())
        .filter(|&g| (0..a.degree()).all(|x| u[a.act(g, x)] == u[x]))
        .collect())
}

/// Profile partition: `x ~ y` iff `x ∈ gU ⇔ y ∈ gU` for every `g`. This is
/// the coarsest `G`-invariant partition in which `U` is a union of blocks.
pub fn block_system_generated(a: &PermAction, u: &[bool]) -> Result<BlockSystem> {
    a.require_transitive()?;
    check_len(a, u)?;
    let g = a.group();
    let inverses: Vec<usize> = (0..g.order()).map(|i| g.inv(i)).collect();
    let profiles = (0..a.degree()).map(|x| inverses.iter().map(|&gi| u[a.act(gi, x)]).collect::<Vec<bool>>());
    Ok(BlockSystem::from_labels(profiles))
}

/// `U` admits no nontrivial factor realization.
pub fn is_simple(a: &PermAction, u: &[bool]) -> Result<bool> {
    Ok(block_system_generated(a, u)?.is_discrete())
}

/// A subset of group elements, indexed like the group's element table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReturnSubset {
    pub members: Vec<bool>,
}

impl ReturnSubset {
    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn elements(&self) -> Vec<usize> {
        members(&self.members)
    }
}

/// `{g ∈ G : g·x₀ ∈ U}`.
pub fn return_subset(a: &PermAction, x0: usize, u: &[bool]) -> Result<ReturnSubset> {
    a.require_transitive()?;
    check_len(a, u)?;
    if x0 >= a.degree() {
        return Err(Error::PointOutOfRange {
            point: x0,
            degree: a.degree(),
        });
    }
    Ok(ReturnSubset {
        members: (0..a.group().order()).map(|g| u[a.act(g, x0)]).collect(),
    })
}

/// Rebuilds a pointed `G`-set from `S ⊆ G`: blocks of the left-regular
/// action generated by `S` (`h ~ h'` iff `gh ∈ S ⇔ gh' ∈ S` for all `g`),
/// with `G` acting on blocks; the base point is the block of the identity.
pub fn reconstruct_from_return_subset(group: &Arc<PermGroup>, s: &ReturnSubset) -> Result<(PermAction, usize)> {
    let n = group.order();
    if s.members.len() != n {
        return Err(Error::DegreeMismatch {
            expected: n,
            got: s.members.len(),
        });
    }
    let table = group.mul_table();
    let blocks = BlockSystem::from_labels(
        (0..n).map(|h| (0..n).map(|g| s.members[table[g][h] as usize]).collect::<Vec<bool>>()),
    );
    let reps: Vec<usize> = blocks.blocks().iter().map(|b| b[0]).collect();
    let images = (0..n)
        .map(|a| Perm::from_images(reps.iter().map(|&r| blocks.block_of(table[a][r] as usize) as u32).collect()))
        .collect::<Result<Vec<_>>>()?;
    let action = PermAction::new(group.clone(), blocks.block_count(), images)?;
    Ok((action, blocks.block_of(0)))
}

/// The `G`-map `g·x₁ ↦ g·x₂`, if it is a well-defined bijection.
pub fn actions_isomorphic(a1: &PermAction, x1: usize, a2: &PermAction, x2: usize) -> Result<Option<Vec<usize>>> {
    if a1.group() != a2.group() {
        return Err(Error::DifferentGroups);
    }
    a1.require_transitive()?;
    a2.require_transitive()?;
    for (a, x) in [(a1, x1), (a2, x2)] {
        if x >= a.degree() {
            return Err(Error::PointOutOfRange {
                point: x,
                degree: a.degree(),
            });
        }
    }
    if a1.degree() != a2.degree() {
        return Ok(None);
    }
    let mut phi = vec![usize::MAX; a1.degree()];
    for g in 0..a1.group().order() {
        let (y1, y2) = (a1.act(g, x1), a2.act(g, x2));
        if phi[y1] == usize::MAX {
            phi[y1] = y2;
        } else if phi[y1] != y2 {
            return Ok(None);
        }
    }
    let mut hit = vec![false; a2.degree()];
    for &y in &phi {
        if hit[y] {
            return Ok(None);
        }
        hit[y] = true;
    }
    Ok(Some(phi))
}

/// Unpointed variant: the first base point of `a2` admitting a `G`-map.
pub fn actions_isomorphic_unpointed(a1: &PermAction, a2: &PermAction) -> Result<Option<(usize, Vec<usize>)>> {
    for x2 in 0..a2.degree() {
        if let Some(phi) = actions_isomorphic(a1, 0, a2, x2)? {
            return Ok(Some((x2, phi)));
        }
    }
    Ok(None)
}

/// Every `G`-invariant partition, by brute force over set partitions.
/// Intended as an oracle for small degrees.
pub fn invariant_partitions(a: &PermAction) -> Result<Vec<BlockSystem>> {
    const MAX_DEGREE: usize = 10;
    let n = a.degree();
    if n > MAX_DEGREE {
        return Err(Error::DegreeMismatch {
            expected: MAX_DEGREE,
            got: n,
        });
    }
    let gens = a.generator_images();
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    // Restricted growth strings enumerate each set partition once.
    let mut rgs = vec![0usize; n];
    loop {
        let p = BlockSystem::from_labels(rgs.iter().copied());
        if p.is_invariant(&gens) {
            out.push(p);
        }
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            let max_prefix = *rgs[..i].iter().max().expect("nonempty prefix");
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}
