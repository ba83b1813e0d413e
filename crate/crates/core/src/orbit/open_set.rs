//! Finite unions of open boxes in `T^r × ∏ Z/mᵢ`.
//!
//! Arc endpoints are rational, so closure, Haar measure and the stabilizer
//! of the closure are all computed exactly on the finite cell grid cut out
//! by the endpoints.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{shape, Error, Result};
use crate::group::{Coord, GroupDescriptor, GroupPoint, QuadSurd};

/// Width of the guard band around arc endpoints on the float path.
pub const MEMBERSHIP_GUARD: f64 = 1e-9;

/// Outcome of a membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Membership {
    In,
    Out,
    /// A float point within [`MEMBERSHIP_GUARD`] of a boundary.
    Ambiguous,
}

/// Position of one torus coordinate as seen by the classifier.
#[derive(Clone, Debug)]
pub(crate) enum Located {
    /// 128-bit fixed-point phase whose true value lies within `err` ulps.
    Fixed { phase: u128, err: u128 },
    Float(f64),
    Exact(QuadSurd),
}

fn frac_rational(x: &BigRational) -> BigRational {
    x - x.floor()
}

fn rational_to_fixed128(x: &BigRational) -> u128 {
    QuadSurd::from_rational(x.clone()).to_fixed128()
}

/// Arc on the circle.
#[derive(Clone, Debug, PartialEq)]
pub enum Arc {
    Full,
    /// `(start, start + len)` mod 1 with `start ∈ [0,1)` and `len ∈ (0,1]`.
    Open {
        start: BigRational,
        len: BigRational,
        start_fixed: u128,
        /// `None` when `len = 1`.
        len_fixed: Option<u128>,
        start_f64: f64,
        len_f64: f64,
    },
}

impl Arc {
    /// Open arc `(lo, hi)`; `lo` may be negative, the arc wraps as needed.
    pub fn open(lo: BigRational, hi: BigRational) -> Result<Self> {
        let len = &hi - &lo;
        if !len.is_positive() || len > BigRational::one() {
            return Err(Error::InvalidOpenSet(format!("arc ({lo}, {hi}) must have length in (0, 1]")));
        }
        let start = frac_rational(&lo);
        let len_fixed = if len.is_one() { None } else { Some(rational_to_fixed128(&len)) };
        Ok(Arc::Open {
            start_fixed: rational_to_fixed128(&start),
            start_f64: start.to_f64().unwrap_or(0.0),
            len_f64: len.to_f64().unwrap_or(1.0),
            start,
            len,
            len_fixed,
        })
    }

    pub fn is_full(&self) -> bool {
        matches!(self, Arc::Full)
    }

    /// Arc length as an exact rational.
    pub fn length(&self) -> BigRational {
        match self {
            Arc::Full => BigRational::one(),
            Arc::Open { len, .. } => len.clone(),
        }
    }

    /// Endpoints in `[0, 1)` (empty for the full circle).
    pub fn endpoints(&self) -> Vec<BigRational> {
        match self {
            Arc::Full => vec![],
            Arc::Open { start, len, .. } => vec![start.clone(), frac_rational(&(start + len))],
        }
    }

    fn translate(&self, s: &BigRational) -> Self {
        match self {
            Arc::Full => Arc::Full,
            Arc::Open { start, len, .. } => {
                let lo = start + s;
                Arc::open(lo.clone(), lo + len).expect("length unchanged")
            }
        }
    }

    fn contains_exact(&self, x: &QuadSurd) -> Membership {
        match self {
            Arc::Full => Membership::In,
            Arc::Open { start, len, .. } => {
                let t = x
                    .checked_sub(&QuadSurd::from_rational(start.clone()))
                    .expect("rational always compatible")
                    .fract();
                let inside = !t.is_zero()
                    && t.checked_cmp(&QuadSurd::from_rational(len.clone())) == Some(Ordering::Less);
                if inside {
                    Membership::In
                } else {
                    Membership::Out
                }
            }
        }
    }

    fn contains_float(&self, x: f64) -> Membership {
        match self {
            Arc::Full => Membership::In,
            Arc::Open { start_f64, len_f64, .. } => {
                let t = (x - start_f64).rem_euclid(1.0);
                let g = MEMBERSHIP_GUARD;
                if t < g || t > 1.0 - g || (*len_f64 < 1.0 && (t - len_f64).abs() < g) {
                    Membership::Ambiguous
                } else if t < *len_f64 {
                    Membership::In
                } else {
                    Membership::Out
                }
            }
        }
    }

    /// `None` when the error bound straddles an endpoint.
    fn contains_fixed(&self, phase: u128, err: u128) -> Option<Membership> {
        match self {
            Arc::Full => Some(Membership::In),
            Arc::Open {
                start_fixed, len_fixed, ..
            } => {
                let e = err.saturating_add(2);
                let t = phase.wrapping_sub(*start_fixed);
                let near_start = t <= e || t >= u128::MAX - e;
                if near_start {
                    return None;
                }
                match len_fixed {
                    None => Some(Membership::In),
                    Some(l) => {
                        if t < l.saturating_sub(e) {
                            Some(Membership::In)
                        } else if t > l.saturating_add(e) {
                            Some(Membership::Out)
                        } else {
                            None
                        }
                    }
                }
            }
        }
    }

    fn contains_closed_rational(&self, x: &BigRational) -> bool {
        match self {
            Arc::Full => true,
            Arc::Open { start, len, .. } => frac_rational(&(x - start)) <= *len,
        }
    }

    fn contains_open_rational(&self, x: &BigRational) -> bool {
        match self {
            Arc::Full => true,
            Arc::Open { start, len, .. } => {
                let t = frac_rational(&(x - start));
                !t.is_zero() && t < *len
            }
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arc::Full => write!(f, "T"),
            Arc::Open { start, len, .. } => write!(f, "({},{})", start, start + len),
        }
    }
}

/// Residues allowed in one torsion coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSet {
    modulus: u64,
    members: Vec<bool>,
}

impl ResidueSet {
    pub fn new(modulus: u64, residues: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut members = vec![false; modulus as usize];
        for r in residues {
            if r >= modulus {
                return Err(Error::Residue { residue: r, modulus });
            }
            members[r as usize] = true;
        }
        Ok(Self { modulus, members })
    }

    pub fn full(modulus: u64) -> Self {
        Self {
            modulus,
            members: vec![true; modulus as usize],
        }
    }

    pub fn contains(&self, r: u64) -> bool {
        self.members.get(r as usize).copied().unwrap_or(false)
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().all(|&b| b)
    }

    pub fn count(&self) -> u64 {
        self.members.iter().filter(|&&b| b).count() as u64
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn translate(&self, s: u64) -> Self {
        let m = self.modulus;
        let mut members = vec![false; m as usize];
        for (r, &inside) in self.members.iter().enumerate() {
            if inside {
                members[((r as u64 + s) % m) as usize] = true;
            }
        }
        Self { modulus: m, members }
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_full() {
            return write!(f, "*");
        }
        let items: Vec<String> = self
            .members
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(r, _)| r.to_string())
            .collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Product of arcs and residue sets.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenBox {
    pub arcs: Vec<Arc>,
    pub residues: Vec<ResidueSet>,
}

impl OpenBox {
    pub fn new(arcs: Vec<Arc>, residues: Vec<ResidueSet>) -> Self {
        Self { arcs, residues }
    }

    fn is_empty(&self) -> bool {
        self.residues.iter().any(ResidueSet::is_empty)
    }
}

impl fmt::Display for OpenBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .arcs
            .iter()
            .map(ToString::to_string)
            .chain(self.residues.iter().map(ToString::to_string))
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Finite union of open boxes.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenSet {
    group: GroupDescriptor,
    boxes: Vec<OpenBox>,
}

/// Exact description of `Stab_K(closure(U))`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerReport {
    /// Torus coordinates along which the closure is a full cylinder.
    pub full_directions: Vec<bool>,
    /// Finite part; entries are zero along full directions.
    pub shifts: Vec<Shift>,
    pub is_trivial: bool,
}

/// Translation vector with rational torus part.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shift {
    pub torus: Vec<BigRational>,
    pub torsion: Vec<u64>,
}

impl Shift {
    pub fn is_zero(&self) -> bool {
        self.torus.iter().all(Zero::is_zero) && self.torsion.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for Shift {
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

impl fmt::Display for StabilizerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shifts: Vec<String> = self.shifts.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", shifts.join(", "))?;
        let full: Vec<String> = self
            .full_directions
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| format!("T in coordinate {i}"))
            .collect();
        if !full.is_empty() {
            write!(f, " + {}", full.join(" + "))?;
        }
        Ok(())
    }
}

impl OpenSet {
    pub fn new(group: GroupDescriptor, boxes: Vec<OpenBox>) -> Result<Self> {
        for b in &boxes {
            if b.arcs.len() != group.torus_rank() || b.residues.len() != group.torsion_orders().len() {
                return Err(shape(&group, format!("box {b}")));
            }
            for (rs, &m) in b.residues.iter().zip(group.torsion_orders()) {
                if rs.modulus() != m {
                    return Err(shape(&group, format!("residue set modulo {}", rs.modulus())));
                }
            }
        }
        let boxes = boxes.into_iter().filter(|b| !b.is_empty()).collect();
        Ok(Self { group, boxes })
    }

    /// The whole group.
    pub fn full(group: GroupDescriptor) -> Self {
        let b = OpenBox::new(
            vec![Arc::Full; group.torus_rank()],
            group.torsion_orders().iter().map(|&m| ResidueSet::full(m)).collect(),
        );
        Self { group, boxes: vec![b] }
    }

    /// Union of open arcs on `T¹`, given as `(lo, hi)` rationals.
    pub fn arcs_t1(arcs: &[(BigRational, BigRational)]) -> Result<Self> {
        let boxes = arcs
            .iter()
            .map(|(lo, hi)| Ok(OpenBox::new(vec![Arc::open(lo.clone(), hi.clone())?], vec![])))
            .collect::<Result<Vec<_>>>()?;
        Self::new(GroupDescriptor::torus(1), boxes)
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn boxes(&self) -> &[OpenBox] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// `U + s`.
    pub fn translate(&self, s: &Shift) -> Result<Self> {
        if s.torus.len() != self.group.torus_rank() || s.torsion.len() != self.group.torsion_orders().len() {
            return Err(shape(&self.group, format!("shift {s}")));
        }
        let boxes = self
            .boxes
            .iter()
            .map(|b| OpenBox {
                arcs: b.arcs.iter().zip(&s.torus).map(|(a, t)| a.translate(t)).collect(),
                residues: b.residues.iter().zip(&s.torsion).map(|(r, &t)| r.translate(t)).collect(),
            })
            .collect();
        Ok(Self {
            group: self.group.clone(),
            boxes,
        })
    }

    /// Membership of a point; exact for exact coordinates, guard-banded for
    /// float coordinates.
    pub fn membership(&self, x: &GroupPoint) -> Result<Membership> {
        x.validate(&self.group)?;
        let torus: Vec<Located> = x
            .torus
            .iter()
            .map(|c| match c {
                Coord::Exact(q) => Located::Exact(q.clone()),
                Coord::Float(v) => Located::Float(*v),
            })
            .collect();
        Ok(self.classify(&torus, &x.torsion, &mut |_| None))
    }

    /// Classifies a located point; `exact(i)` supplies the exact value of
    /// torus coordinate `i` when a fixed-point estimate is inconclusive.
    pub(crate) fn classify(
        &self,
        torus: &[Located],
        torsion: &[u64],
        exact: &mut dyn FnMut(usize) -> Option<QuadSurd>,
    ) -> Membership {
        let mut resolved: Vec<Option<Option<QuadSurd>>> = Vec::new();
        let mut any_ambiguous = false;
        for b in &self.boxes {
            if !b.residues.iter().zip(torsion).all(|(rs, &c)| rs.contains(c)) {
                continue;
            }
            let mut verdict = Membership::In;
            for (i, (arc, loc)) in b.arcs.iter().zip(torus).enumerate() {
                let m = match loc {
                    Located::Exact(q) => arc.contains_exact(q),
                    Located::Float(v) => arc.contains_float(*v),
                    Located::Fixed { phase, err } => match arc.contains_fixed(*phase, *err) {
                        Some(m) => m,
                        None => {
                            if resolved.is_empty() {
                                resolved = vec![None; torus.len()];
                            }
                            let value = resolved[i].get_or_insert_with(|| exact(i));
                            match value {
                                Some(q) => arc.contains_exact(q),
                                None => Membership::Ambiguous,
                            }
                        }
                    },
                };
                match m {
                    Membership::Out => {
                        verdict = Membership::Out;
                        break;
                    }
                    Membership::Ambiguous => verdict = Membership::Ambiguous,
                    Membership::In => {}
                }
            }
            match verdict {
                Membership::In => return Membership::In,
                Membership::Ambiguous => any_ambiguous = true,
                Membership::Out => {}
            }
        }
        if any_ambiguous {
            Membership::Ambiguous
        } else {
            Membership::Out
        }
    }

    fn closed_contains(&self, torus: &[BigRational], torsion: &[u64]) -> bool {
        self.boxes.iter().any(|b| {
            b.residues.iter().zip(torsion).all(|(rs, &c)| rs.contains(c))
                && b.arcs.iter().zip(torus).all(|(a, x)| a.contains_closed_rational(x))
        })
    }

    fn open_contains(&self, torus: &[BigRational], torsion: &[u64]) -> bool {
        self.boxes.iter().any(|b| {
            b.residues.iter().zip(torsion).all(|(rs, &c)| rs.contains(c))
                && b.arcs.iter().zip(torus).all(|(a, x)| a.contains_open_rational(x))
        })
    }

    /// Sorted distinct endpoints in torus coordinate `i`.
    fn endpoints(&self, i: usize) -> Vec<BigRational> {
        let mut e: Vec<BigRational> = self.boxes.iter().flat_map(|b| b.arcs[i].endpoints()).collect();
        e.sort();
        e.dedup();
        e
    }

    /// Haar measure of `U` (equal to that of its closure).
    pub fn jordan_measure_exact(&self) -> BigRational {
        let r = self.group.torus_rank();
        let cells: Vec<Vec<(BigRational, BigRational)>> = (0..r).map(|i| open_cells(&self.endpoints(i))).collect();
        let orders = self.group.torsion_orders().to_vec();
        let mut total = BigRational::zero();
        let mut point = vec![BigRational::zero(); r];
        for_each_index(&cells.iter().map(Vec::len).collect::<Vec<_>>(), |idx| {
            let mut weight = BigRational::one();
            for (i, &j) in idx.iter().enumerate() {
                let (mid, len) = &cells[i][j];
                point[i] = mid.clone();
                weight *= len;
            }
            for_each_index(&orders.iter().map(|&m| m as usize).collect::<Vec<_>>(), |res| {
                let torsion: Vec<u64> = res.iter().map(|&c| c as u64).collect();
                if self.open_contains(&point, &torsion) {
                    let denom: u64 = orders.iter().product();
                    total += &weight / BigRational::from_integer(BigInt::from(denom));
                }
            });
        });
        total
    }

    pub fn jordan_measure(&self) -> f64 {
        self.jordan_measure_exact().to_f64().unwrap_or(f64::NAN)
    }

    /// Grid of representative points for the closed-set comparison of
    /// `closure(U)` and `closure(U) + s`.
    fn representatives(&self, extra: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
        (0..self.group.torus_rank())
            .map(|i| {
                let mut e = self.endpoints(i);
                e.extend(extra.get(i).cloned().unwrap_or_default());
                e.sort();
                e.dedup();
                grid_points(&e)
            })
            .collect()
    }

    fn shift_preserves_closure(&self, s: &Shift) -> bool {
        let shifted_endpoints: Vec<Vec<BigRational>> = (0..self.group.torus_rank())
            .map(|i| self.endpoints(i).iter().map(|e| frac_rational(&(e + &s.torus[i]))).collect())
            .collect();
        let reps = self.representatives(&shifted_endpoints);
        let orders = self.group.torsion_orders().to_vec();
        let mut ok = true;
        let mut p = vec![BigRational::zero(); reps.len()];
        let mut q = vec![BigRational::zero(); reps.len()];
        for_each_index(&reps.iter().map(Vec::len).collect::<Vec<_>>(), |idx| {
            if !ok {
                return;
            }
            for (i, &j) in idx.iter().enumerate() {
                p[i] = reps[i][j].clone();
                q[i] = frac_rational(&(&reps[i][j] - &s.torus[i]));
            }
            for_each_index(&orders.iter().map(|&m| m as usize).collect::<Vec<_>>(), |res| {
                let c: Vec<u64> = res.iter().map(|&c| c as u64).collect();
                let c_minus: Vec<u64> = c
                    .iter()
                    .zip(&orders)
                    .zip(&s.torsion)
                    .map(|((&c, &m), &t)| (c + m - t) % m)
                    .collect();
                if self.closed_contains(&p, &c) != self.closed_contains(&q, &c_minus) {
                    ok = false;
                }
            });
        });
        ok
    }

    /// True when the closure is invariant under every translation in torus
    /// coordinate `i`.
    fn is_cylinder_direction(&self, i: usize) -> bool {
        let reps = self.representatives(&[]);
        let orders = self.group.torsion_orders().to_vec();
        let mut dims: Vec<usize> = reps.iter().map(Vec::len).collect();
        dims[i] = 1;
        let mut constant = true;
        let mut p = vec![BigRational::zero(); reps.len()];
        for_each_index(&dims, |idx| {
            if !constant {
                return;
            }
            for (k, &j) in idx.iter().enumerate() {
                p[k] = reps[k][j].clone();
            }
            for_each_index(&orders.iter().map(|&m| m as usize).collect::<Vec<_>>(), |res| {
                let c: Vec<u64> = res.iter().map(|&c| c as u64).collect();
                let mut first = None;
                for x in &reps[i] {
                    p[i] = x.clone();
                    let v = self.closed_contains(&p, &c);
                    match first {
                        None => first = Some(v),
                        Some(f) if f != v => constant = false,
                        _ => {}
                    }
                }
            });
        });
        constant
    }

    /// Stabilizer of the closure, computed exactly.
    ///
    /// Along a non-cylinder direction every stabilizer element permutes the
    /// finite set of boundary positions, so its coordinate is a difference
    /// of endpoints; each candidate is then checked cell by cell.
    pub fn closure_stabilizer(&self) -> Result<StabilizerReport> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        let r = self.group.torus_rank();
        let full_directions: Vec<bool> = (0..r).map(|i| self.is_cylinder_direction(i)).collect();
        let torus_candidates: Vec<Vec<BigRational>> = (0..r)
            .map(|i| {
                if full_directions[i] {
                    return vec![BigRational::zero()];
                }
                let e = self.endpoints(i);
                let mut d: Vec<BigRational> = e
                    .iter()
                    .flat_map(|a| e.iter().map(move |b| frac_rational(&(a - b))))
                    .collect();
                d.push(BigRational::zero());
                d.sort();
                d.dedup();
                d
            })
            .collect();
        let orders = self.group.torsion_orders().to_vec();
        let mut dims: Vec<usize> = torus_candidates.iter().map(Vec::len).collect();
        dims.extend(orders.iter().map(|&m| m as usize));
        let mut shifts = Vec::new();
        for_each_index(&dims, |idx| {
            let s = Shift {
                torus: (0..r).map(|i| torus_candidates[i][idx[i]].clone()).collect(),
                torsion: idx[r..].iter().map(|&c| c as u64).collect(),
            };
            if self.shift_preserves_closure(&s) {
                shifts.push(s);
            }
        });
        shifts.sort();
        let is_trivial = !full_directions.iter().any(|&b| b) && shifts.len() == 1;
        Ok(StabilizerReport {
            full_directions,
            shifts,
            is_trivial,
        })
    }
}

impl fmt::Display for OpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boxes.is_empty() {
            return write!(f, "empty");
        }
        let parts: Vec<String> = self.boxes.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" | "))
    }
}

/// Open cells `(midpoint, length)` cut out of the circle by sorted endpoints.
fn open_cells(e: &[BigRational]) -> Vec<(BigRational, BigRational)> {
    if e.is_empty() {
        return vec![(BigRational::zero(), BigRational::one())];
    }
    let two = BigRational::from_integer(2.into());
    let mut cells = Vec::with_capacity(e.len());
    for (j, a) in e.iter().enumerate() {
        let b = if j + 1 < e.len() {
            e[j + 1].clone()
        } else {
            &e[0] + BigRational::one()
        };
        let len = &b - a;
        let mid = frac_rational(&((a + &b) / &two));
        cells.push((mid, len));
    }
    cells
}

/// Endpoints plus one interior point per open cell.
fn grid_points(e: &[BigRational]) -> Vec<BigRational> {
    let mut pts: Vec<BigRational> = e.to_vec();
    pts.extend(open_cells(e).into_iter().map(|(m, _)| m));
    pts
}

/// Calls `f` for every index tuple in `∏ [0, dims[i])`.
fn for_each_index(dims: &[usize], mut f: impl FnMut(&[usize])) {
    if dims.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; dims.len()];
    loop {
        f(&idx);
        let mut k = dims.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}
