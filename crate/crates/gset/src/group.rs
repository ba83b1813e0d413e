//! Finite permutation groups with explicit element tables, and their
//! transitive actions as coset spaces.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::perm::Perm;

/// Default cap on `|G|` for element tables.
pub const DEFAULT_ORDER_CAP: usize = 5040;

/// Subgroup lattices are enumerated exhaustively up to this order.
pub const SUBGROUP_ORDER_LIMIT: usize = 24;

/// A permutation group with every element listed; index 0 is the identity.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    generators: Vec<usize>,
    table: OnceLock<Vec<Vec<u32>>>,
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for PermGroup {}

impl PermGroup {
    /// Breadth-first closure of `generators` under left multiplication.
    pub fn generate(degree: usize, generators: &[Perm], cap: usize) -> Result<Self> {
        for g in generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    got: g.degree(),
                });
            }
        }
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for s in generators {
                let p = s.compose(&elements[e]);
                if !index.contains_key(&p) {
                    if elements.len() == cap {
                        return Err(Error::CapExceeded { cap });
                    }
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                }
            }
        }
        let generators = generators.iter().map(|g| index[g]).collect();
        Ok(Self {
            degree,
            elements,
            index,
            generators,
            table: OnceLock::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Indices of the generators the group was built from.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Index of `g_i · g_j`.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.index[&self.elements[i].compose(&self.elements[j])]
    }

    pub fn inv(&self, i: usize) -> usize {
        self.index[&self.elements[i].inverse()]
    }

    /// Full multiplication table, `table[i][j] = g_i · g_j`, built once.
    pub fn mul_table(&self) -> &[Vec<u32>] {
        self.table.get_or_init(|| {
            (0..self.order())
                .map(|i| (0..self.order()).map(|j| self.mul(i, j) as u32).collect())
                .collect()
        })
    }

    /// Subgroup generated by the given elements, as a sorted index list.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for &s in gens {
                let p = self.mul(s, e);
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }

    /// All subgroups, ordered by size then lexicographically.
    pub fn subgroups(&self) -> Result<Vec<Vec<usize>>> {
        if self.order() > SUBGROUP_ORDER_LIMIT {
            return Err(Error::SubgroupLimit {
                order: self.order(),
                limit: SUBGROUP_ORDER_LIMIT,
            });
        }
        let mut found: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        let trivial = vec![0usize];
        found.insert((1, trivial.clone()));
        let mut frontier = vec![trivial];
        while let Some(h) = frontier.pop() {
            let members: BTreeSet<usize> = h.iter().copied().collect();
            for g in 0..self.order() {
                if members.contains(&g) {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(g);
                let k = self.closure(&gens);
                if found.insert((k.len(), k.clone())) {
                    frontier.push(k);
                }
            }
        }
        Ok(found.into_iter().map(|(_, h)| h).collect())
    }

    /// `g H g⁻¹`, sorted.
    pub fn conjugate(&self, h: &[usize], g: usize) -> Vec<usize> {
        let gi = self.inv(g);
        let mut c: Vec<usize> = h.iter().map(|&x| self.mul(self.mul(g, x), gi)).collect();
        c.sort_unstable();
        c
    }

    /// Lexicographically least conjugate of `h`; equal keys iff conjugate.
    pub fn conjugacy_key(&self, h: &[usize]) -> Vec<usize> {
        (0..self.order())
            .map(|g| self.conjugate(h, g))
            .min()
            .expect("group is nonempty")
    }
}

/// A group acting on `{0, .., degree-1}`; `table[g]` is the permutation by
/// which element `g` of the group acts. The action need not be faithful.
#[derive(Clone, Debug)]
pub struct PermAction {
    group: Arc<PermGroup>,
    degree: usize,
    table: Vec<Perm>,
    transitive: bool,
}

impl PermAction {
    /// Builds an action from the image of every group element; see
    /// [`PermAction::is_action`] for checking the homomorphism property.
    pub fn new(group: Arc<PermGroup>, degree: usize, table: Vec<Perm>) -> Result<Self> {
        if table.len() != group.order() {
            return Err(Error::DegreeMismatch {
                expected: group.order(),
                got: table.len(),
            });
        }
        if let Some(p) = table.iter().find(|p| p.degree() != degree) {
            return Err(Error::DegreeMismatch {
                expected: degree,
                got: p.degree(),
            });
        }
        let transitive = orbit_of(&table, degree, 0).len() == degree;
        Ok(Self {
            group,
            degree,
            table,
            transitive,
        })
    }

    /// The defining action of `group` on its own points.
    pub fn natural(group: Arc<PermGroup>) -> Self {
        let table = group.elements().to_vec();
        let degree = group.degree();
        let transitive = orbit_of(&table, degree, 0).len() == degree;
        Self {
            group,
            degree,
            table,
            transitive,
        }
    }

    /// Action on the left cosets `gH`, numbered by first appearance in the
    /// element order; coset 0 is `H` itself.
    pub fn on_cosets(group: Arc<PermGroup>, subgroup: &[usize]) -> Self {
        let n = group.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if coset_of[g] == usize::MAX {
                let c = reps.len();
                reps.push(g);
                for &h in subgroup {
                    coset_of[group.mul(g, h)] = c;
                }
            }
        }
        let degree = reps.len();
        let table = (0..n)
            .map(|a| Perm::from_images(reps.iter().map(|&r| coset_of[group.mul(a, r)] as u32).collect()))
            .collect::<Result<Vec<_>>>()
            .expect("left multiplication permutes cosets");
        Self {
            group,
            degree,
            table,
            transitive: true,
        }
    }

    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive
    }

    pub fn require_transitive(&self) -> Result<()> {
        if self.transitive {
            Ok(())
        } else {
            Err(Error::NotTransitive)
        }
    }

    /// `g · x`.
    #[inline]
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.table[g].apply(x)
    }

    pub fn image(&self, g: usize) -> &Perm {
        &self.table[g]
    }

    /// Images of the group's generators.
    pub fn generator_images(&self) -> Vec<Perm> {
        self.group.generators().iter().map(|&g| self.table[g].clone()).collect()
    }

    pub fn orbit(&self, x: usize) -> Vec<usize> {
        orbit_of(&self.table, self.degree, x)
    }

    /// Point stabilizer as sorted element indices.
    pub fn stabilizer(&self, x: usize) -> Vec<usize> {
        (0..self.group.order()).filter(|&g| self.act(g, x) == x).collect()
    }

    /// Checks the homomorphism property `(gh)·x = g·(h·x)` exhaustively.
    pub fn is_action(&self) -> bool {
        let n = self.group.order();
        (0..n).all(|g| {
            (0..n).all(|h| {
                let gh = self.group.mul(g, h);
                (0..self.degree).all(|x| self.act(gh, x) == self.act(g, self.act(h, x)))
            })
        })
    }
}

fn orbit_of(table: &[Perm], degree: usize, x: usize) -> Vec<usize> {
    if degree == 0 {
        return vec![];
    }
    let mut seen = vec![false; degree];
    seen[x] = true;
    for p in table {
        seen[p.apply(x)] = true;
    }
    (0..degree).filter(|&y| seen[y]).collect()
}

/// Builds the group generated by `generators` on `degree` points with its
/// natural action; fails when the order exceeds `cap`.
pub fn enumerate_group(degree: usize, generators: &[Perm], cap: usize) -> Result<PermAction> {
    Ok(PermAction::natural(Arc::new(PermGroup::generate(degree, generators, cap)?)))
}

/// A transitive action together with the point stabilizer it came from.
#[derive(Clone, Debug)]
pub struct CosetAction {
    /// Stabilizer of point 0, sorted element indices.
    pub subgroup: Vec<usize>,
    pub action: PermAction,
}

/// Every transitive action of `group` as a left-coset action, one per
/// subgroup or one per conjugacy class of subgroups. Ordered by degree, then
/// by subgroup.
pub fn transitive_actions(group: &Arc<PermGroup>, up_to_conjugacy: bool) -> Result<Vec<CosetAction>> {
    let mut subs = group.subgroups()?;
    if up_to_conjugacy {
        let mut seen = BTreeSet::new();
        subs.retain(|h| seen.insert(group.conjugacy_key(h)));
    }
    let mut out: Vec<CosetAction> = subs
        .into_iter()
        .map(|h| CosetAction {
            action: PermAction::on_cosets(group.clone(), &h),
            subgroup: h,
        })
        .collect();
    out.sort_by(|a, b| {
        a.action
            .degree()
            .cmp(&b.action.degree())
            .then_with(|| a.subgroup.cmp(&b.subgroup))
    });
    Ok(out)
}
