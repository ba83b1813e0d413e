use num_bigint::BigInt;
use proptest::prelude::*;
use rtrecon_core::group::{
    add, char_eval, finite_orbit_size, invariant_metric, is_generator, scalar_mul, Character, Coord, GroupDescriptor,
    GroupPoint, QuadSurd,
};

fn mixed_group() -> GroupDescriptor {
    GroupDescriptor::new(2, vec![3, 4]).unwrap()
}

fn point() -> impl Strategy<Value = GroupPoint> {
    (0.0..1.0f64, 0.0..1.0f64, 0..3u64, 0..4u64)
        .prop_map(|(x, y, a, b)| GroupPoint::new(vec![Coord::float(x), Coord::float(y)], vec![a, b]))
}

fn circle_close(a: &GroupPoint, b: &GroupPoint, tol: f64) -> bool {
    a.torsion == b.torsion
        && a.torus.iter().zip(&b.torus).all(|(x, y)| {
            let d = (x.to_f64() - y.to_f64()).rem_euclid(1.0);
            d.min(1.0 - d) < tol
        })
}

proptest! {
    #[test]
    fn scalar_mul_is_additive(a in point(), n in -5000i64..5000, m in -5000i64..5000) {
        let k = mixed_group();
        let lhs = scalar_mul(&k, &BigInt::from(n + m), &a).unwrap();
        let rhs = add(&k, &scalar_mul(&k, &BigInt::from(n), &a).unwrap(), &scalar_mul(&k, &BigInt::from(m), &a).unwrap()).unwrap();
        prop_assert!(circle_close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn characters_are_homomorphisms(a in point(), b in point(), k1 in -20i64..20, k2 in -20i64..20, t1 in 0..3u64, t2 in 0..4u64) {
        let k = mixed_group();
        let chi = Character::new(vec![k1, k2], vec![t1, t2]);
        let lhs = char_eval(&k, &chi, &add(&k, &a, &b).unwrap()).unwrap();
        let rhs = char_eval(&k, &chi, &a).unwrap() * char_eval(&k, &chi, &b).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn characters_respect_powers(a in point(), n in -10_000i64..10_000, k1 in -5i64..5) {
        let k = mixed_group();
        let chi = Character::new(vec![k1, 1], vec![1, 3]);
        let lhs = char_eval(&k, &chi, &scalar_mul(&k, &BigInt::from(n), &a).unwrap()).unwrap();
        let rhs = char_eval(&k, &chi, &a).unwrap().powi(n as i32);
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn metric_is_invariant(a in point(), b in point(), c in point()) {
        let k = mixed_group();
        let d = invariant_metric(&k, &a, &b).unwrap();
        let shifted = invariant_metric(&k, &add(&k, &a, &c).unwrap(), &add(&k, &b, &c).unwrap()).unwrap();
        prop_assert!((d - shifted).abs() < 1e-12);
    }
}

#[test]
fn metric_triangle_inequality() {
    use rand::{Rng, SeedableRng};
    let k = mixed_group();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut random_point = || {
        GroupPoint::new(
            vec![Coord::float(rng.random()), Coord::float(rng.random())],
            vec![rng.random_range(0..3), rng.random_range(0..4)],
        )
    };
    for _ in 0..1000 {
        let (a, b, c) = (random_point(), random_point(), random_point());
        let ab = invariant_metric(&k, &a, &b).unwrap();
        let bc = invariant_metric(&k, &b, &c).unwrap();
        let ac = invariant_metric(&k, &a, &c).unwrap();
        assert!(ac <= ab + bc + 1e-15);
    }
}

#[test]
fn generator_test_matches_orbit_enumeration() {
    for orders in [vec![4], vec![2, 3], vec![2, 4], vec![6], vec![3, 3], vec![2, 2, 3]] {
        let k = GroupDescriptor::new(0, orders.clone()).unwrap();
        let mut residues = vec![0u64; orders.len()];
        loop {
            let a = GroupPoint::new(vec![], residues.clone());
            let by_orbit = finite_orbit_size(&k, &a).unwrap() == k.torsion_size();
            let cert = is_generator(&k, &a, 12).unwrap();
            assert_eq!(cert.generator, by_orbit, "{k} {residues:?}");
            assert_eq!(cert.witness.is_some(), !by_orbit);
            let mut i = 0;
            while i < orders.len() {
                residues[i] += 1;
                if residues[i] < orders[i] {
                    break;
                }
                residues[i] = 0;
                i += 1;
            }
            if i == orders.len() {
                break;
            }
        }
    }
}

#[test]
fn exact_coordinates_do_not_drift() {
    let k = GroupDescriptor::torus(1);
    let s = QuadSurd::sqrt(2).checked_sub(&QuadSurd::from_integer(1)).unwrap();
    let a = GroupPoint::new(vec![Coord::exact(s)], vec![]);
    let big = scalar_mul(&k, &BigInt::from(1_000_000_007i64), &a).unwrap();
    let back = scalar_mul(&k, &BigInt::from(-1_000_000_007i64), &a).unwrap();
    let sum = add(&k, &big, &back).unwrap();
    assert!(sum.torus[0].is_zero());
}
