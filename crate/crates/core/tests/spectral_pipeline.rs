use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rtrecon_core::group::{char_eval, Coord, GroupDescriptor, GroupPoint, QuadSurd};
use rtrecon_core::literal::{parse_open_set, parse_point};
use rtrecon_core::orbit::{return_set_linear, return_set_skew, ReturnSet, SkewSystem, Window};
use rtrecon_core::spectral::{
    cesaro_average, default_grid, default_threshold, estimate_coefficient, dyadic_schedule, reconstruct_group,
    refine_peak, scan_spectrum, spectrum_grid, Convergence, ReconstructOptions, Spectrum,
};

const N: u64 = 1 << 20;

fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn alpha() -> f64 {
    2f64.sqrt() - 1.0
}

fn half_interval() -> ReturnSet {
    let k = GroupDescriptor::torus(1);
    let a = parse_point(&k, "(sqrt2-1)").unwrap();
    let u = parse_open_set(&k, "(0,1/2)").unwrap();
    return_set_linear(&k, &a, &u, Window::first(N)).unwrap()
}

fn spectrum(r: &ReturnSet) -> Spectrum {
    let n = r.window().hi as u64;
    scan_spectrum(r, default_grid(n), default_threshold(n)).unwrap()
}

fn amplitude_near(s: &Spectrum, theta: f64) -> Option<f64> {
    s.peaks
        .iter()
        .find(|p| circle_dist(p.theta, theta) < 1e-5)
        .map(|p| p.amplitude.norm())
}

#[test]
fn half_interval_coefficients() {
    let s = spectrum(&half_interval());
    let c0 = amplitude_near(&s, 0.0).expect("peak at zero");
    assert!((c0 - 0.5).abs() < 5e-3, "{c0}");
    for k in [1i32, 3, 5, 7, 9] {
        for sign in [-1.0, 1.0] {
            let theta = -sign * k as f64 * alpha();
            let amp = amplitude_near(&s, theta).unwrap_or_else(|| panic!("no peak for k = {}", sign * k as f64));
            assert!((amp - 1.0 / (PI * k as f64)).abs() < 5e-3, "k={k}: {amp}");
        }
    }
    for k in [2i32, 4, 6, 8] {
        let theta = -(k as f64) * alpha();
        assert!(amplitude_near(&s, theta).is_none_or(|a| a <= 0.01));
    }
}

#[test]
fn parseval_and_conjugate_symmetry() {
    let r = half_interval();
    let s = spectrum(&r);
    let energy: f64 = s.peaks.iter().map(|p| p.amplitude.norm_sqr()).sum();
    assert!(energy <= r.density(N).unwrap() + 1e-3);
    for p in &s.peaks {
        let mirror = s
            .peaks
            .iter()
            .find(|q| circle_dist(q.theta, -p.theta) < 1e-6)
            .unwrap_or_else(|| panic!("no mirror for {}", p.theta));
        assert!((mirror.amplitude - p.amplitude.conj()).norm() < 1e-6);
    }
}

#[test]
fn grid_matches_direct_evaluation() {
    use rand::{Rng, SeedableRng};
    let k = GroupDescriptor::torus(1);
    let a = parse_point(&k, "(sqrt3-1)").unwrap();
    let u = parse_open_set(&k, "(0.1,0.45)").unwrap();
    let n = 1 << 14;
    let r = return_set_linear(&k, &a, &u, Window::first(n)).unwrap();
    let g = default_grid(n);
    let grid = spectrum_grid(&r, n, g).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let j = rng.random_range(0..g);
        let direct = cesaro_average(&r, j as f64 / g as f64, n).unwrap();
        assert!((grid[j] - direct).norm() < 1e-9, "j={j}");
    }
}

#[test]
fn refine_recovers_irrational_frequency() {
    let r = half_interval();
    let start = (-alpha()).rem_euclid(1.0) + 0.5 / default_grid(N) as f64;
    let p = refine_peak(&r, start, 1e-12).unwrap();
    assert!(circle_dist(p.theta, -alpha()) < 1e-5, "{}", p.theta);
}

#[test]
fn coefficient_at_zero_is_measure() {
    let k = GroupDescriptor::torus(1);
    let a = parse_point(&k, "(sqrt2-1)").unwrap();
    let u = parse_open_set(&k, "(0,0.37)").unwrap();
    let r = return_set_linear(&k, &a, &u, Window::first(N)).unwrap();
    let est = estimate_coefficient(&r, 0.0, &dyadic_schedule(N, 6)).unwrap();
    assert!((est.value.re - 0.37).abs() < 5e-3);
    let off = estimate_coefficient(&r, 0.123456, &dyadic_schedule(N, 6)).unwrap();
    assert_eq!(off.verdict, Convergence::ConvergingToZero);
}

#[test]
fn roundtrip_circle() {
    let r = half_interval();
    let s = spectrum(&r);
    let res = reconstruct_group(&s.peaks, &ReconstructOptions::for_spectrum(&s)).unwrap();
    assert_eq!(res.group, GroupDescriptor::torus(1));
    let beta = res.alpha_image.torus[0].to_f64();
    assert!(circle_dist(beta, alpha()) < 1e-4 || circle_dist(beta, -alpha()) < 1e-4, "{beta}");
    for p in &res.peak_assignment {
        let got = char_eval(&res.group, &p.character, &res.alpha_image).unwrap();
        assert!((got - Complex64::from_polar(1.0, TAU * p.theta)).norm() < 10.0 / N as f64);
    }
    for row in &res.relation_basis {
        let m = row.len() - 1;
        let sum: f64 = row[..m]
            .iter()
            .zip(&res.peak_assignment)
            .map(|(&k, p)| k as f64 * p.theta)
            .sum();
        assert!((sum - row[m] as f64).abs() < 1e-6);
    }
}

#[test]
fn roundtrip_with_torsion() {
    let k = GroupDescriptor::new(1, vec![2]).unwrap();
    let a = parse_point(&k, "(sqrt2-1, 1)").unwrap();
    let u = parse_open_set(&k, "(0,0.4) x {0}").unwrap();
    let r = return_set_linear(&k, &a, &u, Window::first(N)).unwrap();
    let s = spectrum(&r);
    assert!(amplitude_near(&s, 0.5).is_some());
    let res = reconstruct_group(&s.peaks, &ReconstructOptions::for_spectrum(&s)).unwrap();
    assert_eq!(res.group, k);
}

#[test]
fn skew_product_has_rotation_factor() {
    let k = GroupDescriptor::torus(1);
    let a = parse_point(&k, "(sqrt2-1)").unwrap();
    let u1 = parse_open_set(&k, "(0,0.37)").unwrap();
    let rot = spectrum(&return_set_linear(&k, &a, &u1, Window::first(N)).unwrap());
    let alpha = Coord::exact(QuadSurd::sqrt(2).checked_sub(&QuadSurd::from_integer(1)).unwrap());
    let skew = SkewSystem::new(alpha, (Coord::zero(), Coord::zero()));
    let k2 = SkewSystem::group();
    let u = parse_open_set(&k2, "(0,0.37) x T").unwrap();
    let sk = spectrum(&return_set_skew(&skew, &u, Window::first(N)).unwrap());
    assert_eq!(rot.peaks.len(), sk.peaks.len());
    for (p, q) in rot.peaks.iter().zip(&sk.peaks) {
        assert!(circle_dist(p.theta, q.theta) < 1e-3);
        assert!((p.amplitude - q.amplitude).norm() < 1e-3);
    }
}

#[test]
fn even_numbers_spectrum() {
    let r = ReturnSet::from_predicate(Window::first(N), |n| n % 2 == 0);
    let s = spectrum(&r);
    assert_eq!(s.peaks.len(), 2);
    assert_eq!(s.peaks[0].theta, 0.0);
    assert!((s.peaks[1].theta - 0.5).abs() < 1e-9);
    for p in &s.peaks {
        assert!((p.amplitude.norm() - 0.5).abs() < 1e-9);
    }
    let res = reconstruct_group(&s.peaks, &ReconstructOptions::for_spectrum(&s)).unwrap();
    assert_eq!(res.group, GroupDescriptor::cyclic(2).unwrap());
    assert_eq!(res.alpha_image, GroupPoint::new(vec![], vec![1]));
}
