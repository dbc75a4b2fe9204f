mod support;

use proptest::prelude::*;
use scatter3d::lattice_arith::*;

fn table() -> ShellTable {
    ShellTable::sieve(100_000, DEFAULT_MEMORY_BUDGET).unwrap()
}

#[test]
fn dilation_invariance_of_r3() {
    let t = table();
    for n in 0..=25_000u64 {
        assert_eq!(t.r3(4 * n), t.r3(n), "n = {n}");
    }
}

#[test]
fn sphere_points_count_is_r3() {
    let t = table();
    for n in 0..=5_000u64 {
        let pts = sphere_points(n);
        assert_eq!(pts.len() as u32, t.r3(n).unwrap(), "n = {n}");
        assert!(pts.iter().all(|p| p.norm_sq() == n));
    }
}

#[test]
fn ball_volume_asymptotics() {
    let t = table();
    for x in [10_000u64, 100_000] {
        let total: u64 = t.as_slice()[..=x as usize].iter().map(|&c| c as u64).sum();
        assert_eq!(total, support::ball_count(x));
        let vol = 4.0 * std::f64::consts::PI / 3.0 * (x as f64).powf(1.5);
        assert!((total as f64 / vol - 1.0).abs() < 0.02);
    }
}

#[test]
fn documented_examples() {
    assert_eq!(decompose_four_adic(28).unwrap(), (1, 7));
    assert_eq!(decompose_four_adic(5).unwrap(), (0, 5));
    assert_eq!(decompose_four_adic(64).unwrap(), (3, 1));
    assert!(!is_sum_of_three_squares(7));
    assert!(is_sum_of_three_squares(0));
    assert!(!is_sum_of_three_squares(28));
    assert_eq!(support::brute_r3(28), 0);
    let t = table();
    assert_eq!(t.r3(1), Some(6));
    assert_eq!(t.r3(2), Some(12));
    assert_eq!(t.r3(12), t.r3(3));
    assert_eq!(classify(5).unwrap(), ShellClass::Good);
    assert_eq!(classify(4).unwrap(), ShellClass::Bad);
    assert_eq!(classify(48).unwrap(), ShellClass::Bad);
    assert_eq!(nearest_shell(2.5).unwrap(), 2);
    assert_eq!(nearest_shell(6.9).unwrap(), 6);
    assert_eq!(nearest_shell(0.2).unwrap(), 0);
    // n = 1 has n1 = 1 = √1 and is bad by definition, so it is counted
    assert_eq!(bad_count(3).count, 1);
    assert_eq!(bad_count(4).count, 2);
    let b = bad_count(1_000_000);
    assert!((b.count as f64) <= 1000.0 * 1e6f64.ln());
}

#[test]
fn arithmetic_bad_count_matches_classification() {
    let t = table();
    for x in [10u64, 1_000, 54_321, 100_000] {
        let direct = (1..=x).filter(|&n| t.is_shell(n) && classify(n).unwrap() == ShellClass::Bad).count() as u64;
        assert_eq!(bad_count(x).count, direct);
        assert_eq!(t.bad_count(x).count, direct);
    }
}

proptest! {
    #[test]
    fn gap_bound(lambda in 1.0f64..1e6) {
        let n = nearest_shell(lambda).unwrap();
        prop_assert!(is_sum_of_three_squares(n));
        prop_assert!((n as f64 - lambda).abs() <= 1.5);
    }

    #[test]
    fn nearest_shell_is_nearest(lambda in 0.0f64..5e4) {
        let n = nearest_shell(lambda).unwrap();
        let d = (n as f64 - lambda).abs();
        let lo = (lambda - 2.0).floor().max(0.0) as u64;
        for k in lo..=(lambda + 2.0).ceil() as u64 {
            if is_sum_of_three_squares(k) {
                let dk = (k as f64 - lambda).abs();
                prop_assert!(d < dk || (d == dk && n <= k));
            }
        }
    }

    #[test]
    fn classification_by_recomputation(n in 1u64..10_000_000) {
        prop_assume!(is_sum_of_three_squares(n));
        let (a, n1) = decompose_four_adic(n).unwrap();
        prop_assert_eq!(4u64.pow(a) * n1, n);
        prop_assert!(n1 % 4 != 0);
        let want = if n1 * n1 > n { ShellClass::Good } else { ShellClass::Bad };
        prop_assert_eq!(classify(n).unwrap(), want);
        prop_assert_eq!(classify(n).unwrap(), classify(n).unwrap());
    }

    #[test]
    fn quadrupling_flips_only_when_n1_is_small(n in 2u64..1_000_000) {
        prop_assume!(n % 4 != 0 && is_sum_of_three_squares(n));
        prop_assert_eq!(classify(n).unwrap(), ShellClass::Good);
        let want = if n * n <= 4 * n { ShellClass::Bad } else { ShellClass::Good };
        prop_assert_eq!(classify(4 * n).unwrap(), want);
    }

    #[test]
    fn sieve_agrees_with_brute_force(n in 0u64..2_000) {
        let t = ShellTable::sieve(2_000, DEFAULT_MEMORY_BUDGET).unwrap();
        prop_assert_eq!(t.r3(n).unwrap() as u64, support::brute_r3(n));
    }
}
