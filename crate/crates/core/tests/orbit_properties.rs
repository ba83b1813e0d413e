use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rtrecon_core::group::{Coord, GroupDescriptor, GroupPoint, QuadSurd};
use rtrecon_core::literal::{parse_open_set, parse_point};
use rtrecon_core::orbit::{
    return_set_linear, return_set_linear_from, return_set_polynomial, return_set_skew, weyl_discrepancy,
    IntegerPolynomial, Membership, OpenSet, ReturnSet, Shift, SkewSystem, Window,
};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Random arc literal `(a/d, b/d)` with `0 ≤ a < b ≤ d`.
fn random_arc(rng: &mut ChaCha8Rng, d: i64) -> (i64, i64, String) {
    let a = rng.random_range(0..d);
    let b = rng.random_range(a + 1..=d);
    (a, b, format!("({a}/{d},{b}/{d})"))
}

#[test]
fn polynomial_identity_matches_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let alphas = ["sqrt2-1", "sqrt3/2", "3/10", "2*sqrt5+1/7", "0.318f", "sqrt(7)-2"];
    let k = GroupDescriptor::new(1, vec![3]).unwrap();
    for i in 0..100 {
        let alpha = parse_point(&k, &format!("({}, {})", alphas[i % alphas.len()], rng.random_range(0..3))).unwrap();
        let (_, _, arc) = random_arc(&mut rng, 12);
        let u = parse_open_set(&k, &format!("{arc} x {{{}}}", rng.random_range(0..3))).unwrap();
        let w = Window::new(-200, 200).unwrap();
        let lin = return_set_linear(&k, &alpha, &u, w).unwrap();
        let poly = return_set_polynomial(&k, &alpha, &IntegerPolynomial::identity(), &u, w).unwrap();
        assert!(lin.same_bits(&poly), "config {i}");
    }
}

#[test]
fn translation_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let k = GroupDescriptor::new(1, vec![3]).unwrap();
    let alpha = parse_point(&k, "(sqrt2-1, 1)").unwrap();
    for _ in 0..30 {
        let (_, _, arc) = random_arc(&mut rng, 10);
        let u = parse_open_set(&k, &format!("{arc} x {{0,1}}")).unwrap();
        let (bn, bd, bt) = (rng.random_range(0..97), 97, rng.random_range(0..3u64));
        let shift = Shift { torus: vec![q(bn, bd)], torsion: vec![bt] };
        let beta = GroupPoint::new(vec![Coord::exact(QuadSurd::from_ratio(bn, bd))], vec![bt]);
        let w = Window::new(-500, 500).unwrap();
        let base = return_set_linear(&k, &alpha, &u, w).unwrap();
        let moved = return_set_linear_from(&k, &alpha, &beta, &u.translate(&shift).unwrap(), w).unwrap();
        assert!(base.same_bits(&moved));
    }
}

fn add_shift(a: &Shift, b: &Shift, orders: &[u64]) -> Shift {
    Shift {
        torus: a.torus.iter().zip(&b.torus).map(|(x, y)| frac(&(x + y))).collect(),
        torsion: a.torsion.iter().zip(&b.torsion).zip(orders).map(|((x, y), m)| (x + y) % m).collect(),
    }
}

fn neg_shift(a: &Shift, orders: &[u64]) -> Shift {
    Shift {
        torus: a.torus.iter().map(|x| frac(&-x)).collect(),
        torsion: a.torsion.iter().zip(orders).map(|(x, m)| (m - x) % m).collect(),
    }
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Closed-set comparison by membership at the midpoints of a fine rational
/// grid: two finite unions of closed boxes with endpoints on the grid agree
/// iff they agree at every cell midpoint.
fn same_closure(a: &OpenSet, b: &OpenSet, den: i64) -> bool {
    let k = a.group().clone();
    let r = k.torus_rank();
    let orders = k.torsion_orders().to_vec();
    let mut idx = vec![0i64; r];
    loop {
        let torus: Vec<Coord> = idx.iter().map(|&i| Coord::exact(QuadSurd::from_ratio(2 * i + 1, 2 * den))).collect();
        let mut tors = vec![0u64; orders.len()];
        loop {
            let p = GroupPoint::new(torus.clone(), tors.clone());
            let ma = a.membership(&p).unwrap() == Membership::In;
            let mb = b.membership(&p).unwrap() == Membership::In;
            if ma != mb {
                return false;
            }
            if !bump(&mut tors, &orders) {
                break;
            }
        }
        let mut i = 0;
        while i < r {
            idx[i] += 1;
            if idx[i] < den {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == r {
            return true;
        }
    }
}

fn bump(v: &mut [u64], orders: &[u64]) -> bool {
    for (x, &m) in v.iter_mut().zip(orders) {
        *x += 1;
        if *x < m {
            return true;
        }
        *x = 0;
    }
    false
}

#[test]
fn stabilizer_is_a_group_and_preserves_closure() {
    let k1 = GroupDescriptor::torus(1);
    let k2 = GroupDescriptor::new(1, vec![2]).unwrap();
    let cases = [
        (k1.clone(), "(-1/10,1/10) | (2/5,3/5)"),
        (k1.clone(), "(0,1/12) | (1/3,5/12) | (2/3,3/4)"),
        (k1.clone(), "(0,1/6) | (1/4,5/12) | (1/2,2/3) | (3/4,11/12)"),
        (k1, "(0,37/100)"),
        (k2.clone(), "(0,1/4) x {0} | (1/2,3/4) x {1}"),
        (k2, "(0,1/4) x * | (1/2,3/4) x *"),
    ];
    for (k, lit) in cases {
        let u = parse_open_set(&k, lit).unwrap();
        let report = u.closure_stabilizer().unwrap();
        let orders = k.torsion_orders().to_vec();
        assert!(report.shifts.iter().any(Shift::is_zero), "{lit}");
        for a in &report.shifts {
            assert!(report.shifts.contains(&neg_shift(a, &orders)), "{lit}: -{a:?}");
            for b in &report.shifts {
                assert!(report.shifts.contains(&add_shift(a, b, &orders)), "{lit}: {a:?}+{b:?}");
            }
            assert!(same_closure(&u, &u.translate(a).unwrap(), 240), "{lit}: {a:?}");
        }
        assert_eq!(report.is_trivial, report.shifts.len() == 1);
    }
}

/// Measure of an intersection of arcs given as `(a, b)` numerators over a
/// common denominator, by counting covered unit cells.
fn arcs_intersection(arcs: &[(i64, i64)], den: i64) -> BigRational {
    let covered = (0..den)
        .filter(|&c| {
            arcs.iter().all(|&(a, b)| {
                // Cell (c, c+1) lies in the arc (a, b) mod den.
                let off = (c - a).rem_euclid(den);
                off < b - a
            })
        })
        .count();
    q(covered as i64, den)
}

#[test]
fn jordan_measure_by_inclusion_exclusion() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let r = rng.random_range(1..=2usize);
        let den: i64 = [6, 8, 10, 12][rng.random_range(0..4)];
        let count = rng.random_range(1..=4usize);
        let mut boxes: Vec<(Vec<(i64, i64)>, Vec<bool>)> = Vec::new();
        let mut lits = Vec::new();
        for _ in 0..count {
            let mut arcs = Vec::new();
            let mut parts = Vec::new();
            for _ in 0..r {
                let a = rng.random_range(-den / 2..den);
                let len = rng.random_range(1..=den);
                arcs.push((a, a + len));
                parts.push(format!("({a}/{den},{}/{den})", a + len));
            }
            let res: Vec<bool> = (0..2).map(|_| rng.random_bool(0.6)).collect();
            let set: Vec<String> = (0..2).filter(|&i| res[i]).map(|i| i.to_string()).collect();
            parts.push(format!("{{{}}}", set.join(",")));
            lits.push(parts.join(" x "));
            boxes.push((arcs, res));
        }
        let k = GroupDescriptor::new(r, vec![2]).unwrap();
        let u = parse_open_set(&k, &lits.join(" | ")).unwrap();

        let mut expected = BigRational::zero();
        for mask in 1u32..(1 << count) {
            let chosen: Vec<&(Vec<(i64, i64)>, Vec<bool>)> =
                (0..count).filter(|i| mask >> i & 1 == 1).map(|i| &boxes[i]).collect();
            let mut m = BigRational::one();
            for c in 0..r {
                let arcs: Vec<(i64, i64)> = chosen.iter().map(|b| b.0[c]).collect();
                m *= arcs_intersection(&arcs, den);
            }
            let residues = (0..2).filter(|&t| chosen.iter().all(|b| b.1[t])).count();
            m *= q(residues as i64, 2);
            if mask.count_ones().is_odd() {
                expected += m;
            } else {
                expected -= m;
            }
        }
        assert_eq!(u.jordan_measure_exact(), expected, "{}", lits.join(" | "));
    }
}

#[test]
fn density_tracks_measure() {
    let k = GroupDescriptor::torus(1);
    let alpha = parse_point(&k, "(sqrt2-1)").unwrap();
    let n = 100_000u64;
    let tol = 3.0 / (n as f64).sqrt() * (n as f64).ln();
    for lit in ["(0,0.37)", "(0.2,0.9)", "(0,1/10) | (1/2,3/5)"] {
        let u = parse_open_set(&k, lit).unwrap();
        let r = return_set_linear(&k, &alpha, &u, Window::first(n)).unwrap();
        assert!((r.density(n).unwrap() - u.jordan_measure()).abs() < tol, "{lit}");
        assert_eq!(r.ambiguous(), 0);
    }
}

#[test]
fn skew_orbit_is_reversible_and_equidistributed() {
    let a = Coord::exact(QuadSurd::sqrt(2).checked_sub(&QuadSurd::from_integer(1)).unwrap());
    let start = (Coord::exact(QuadSurd::from_ratio(1, 3)), Coord::exact(QuadSurd::from_ratio(1, 7)));
    let s = SkewSystem::new(a.clone(), start.clone());
    let mut p = start.clone();
    for _ in 0..50 {
        p = s.step(&p);
    }
    for _ in 0..50 {
        p = s.step_back(&p);
    }
    assert_eq!(p, start);

    let s0 = SkewSystem::new(a, (Coord::zero(), Coord::zero()));
    let u = parse_open_set(&SkewSystem::group(), "T x (0,1/2)").unwrap();
    let r = return_set_skew(&s0, &u, Window::new(0, 100_000).unwrap()).unwrap();
    let density = r.count() as f64 / 100_001.0;
    assert!((density - 0.5).abs() < 0.01, "{density}");
}

#[test]
fn weyl_sums_decay() {
    let k = GroupDescriptor::torus(1);
    let alpha = parse_point(&k, "(sqrt2-1)").unwrap();
    let p = IntegerPolynomial::from_i64(&[0, 0, 1]);
    let chi = rtrecon_core::group::Character::new(vec![1], vec![]);
    let small = weyl_discrepancy(&k, &alpha, &p, &chi, 10_000).unwrap();
    let large = weyl_discrepancy(&k, &alpha, &p, &chi, 100_000).unwrap();
    assert!(large < 0.05 && large < small, "{small} {large}");
}

proptest! {
    #[test]
    fn rts_roundtrip(lo in -1000i64..1000, len in 1u64..3000, seed in any::<u64>(), ambiguous in 0u64..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Window::new(lo, lo + len as i64 - 1).unwrap();
        let bias: f64 = rng.random();
        let r = ReturnSet::from_predicate(w, |_| rng.random_bool(bias)).with_provenance(format!("random {seed} ambiguous={ambiguous}"));
        let back = ReturnSet::from_rts(&r.to_rts()).unwrap();
        prop_assert!(back.same_bits(&r));
        prop_assert_eq!(back.window(), r.window());
        prop_assert_eq!(back.provenance(), r.provenance());
        let plain = ReturnSet::from_plain_text(&r.to_plain_text(), Some(w)).unwrap();
        prop_assert!(plain.same_bits(&r));
    }
}
