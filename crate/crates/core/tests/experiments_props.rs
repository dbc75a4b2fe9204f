mod support;

use std::path::PathBuf;

use num_complex::Complex64;
use proptest::prelude::*;
use scatter3d::experiments::*;
use scatter3d::lattice_arith::{ShellTable, DEFAULT_MEMORY_BUDGET};
use scatter3d::spectrum::{SequenceEntry, SequenceKind};

fn observables() -> Vec<Observable> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("observables");
    load_observables(&[dir]).unwrap()
}

fn config(delta: f64) -> QERunConfig {
    QERunConfig {
        sequence: SequenceKind::Midpoint,
        lambda_max: 200.0,
        delta,
        observables: observables(),
        x0: [0.3, -0.2, 1.7],
    }
}

#[test]
fn fast_path_matches_grid_oracle() {
    let cfg = config(0.2);
    let entries: Vec<SequenceEntry> = [20.5, 41.5, 62.5, 80.5, 101.5]
        .iter()
        .map(|&l| SequenceEntry::tagged(l).unwrap())
        .collect();
    let report = run_qe_on(&entries, &cfg).unwrap();
    assert_eq!(report.rows.len(), 5);
    for row in &report.rows {
        assert!(!row.empty);
        for (k, obs) in cfg.observables.iter().enumerate() {
            let slow = support::grid_matrix_element(&obs.symbol, row.lambda, row.width, cfg.x0, 64);
            let fast = row.elements[k];
            assert!((fast - slow).norm() < 1e-12 * (1.0 + slow.norm()), "{} at {}: {fast} vs {slow}", obs.name, row.lambda);
            let want = (fast - scatter3d::pdo::liouville_average(&obs.symbol)).norm();
            assert_eq!(row.deviations[k], want);
        }
    }
}

#[test]
fn identity_elements_are_one() {
    let report = run_qe_on(
        &(1..40).map(|k| SequenceEntry::tagged(k as f64 * 5.0 + 0.25).unwrap()).collect::<Vec<_>>(),
        &config(0.3),
    )
    .unwrap();
    let id = report.summaries.iter().position(|s| s.name == "identity").unwrap();
    for row in report.rows.iter().filter(|r| !r.empty) {
        assert!((row.elements[id] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let table = ShellTable::sieve(2_000, DEFAULT_MEMORY_BUDGET).unwrap();
    let cfg = QERunConfig {
        lambda_max: 1_500.0,
        ..config(0.25)
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_qe(&cfg, &table).unwrap())
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a.rows.len(), b.rows.len());
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.lambda.to_bits(), y.lambda.to_bits());
        for (p, q) in x.elements.iter().zip(&y.elements) {
            assert!(p.re.to_bits() == q.re.to_bits() && p.im.to_bits() == q.im.to_bits() || (p.re.is_nan() && q.re.is_nan()));
        }
    }
    assert_eq!(a.summaries, b.summaries);
}

#[test]
fn summary_density_column() {
    let table = ShellTable::sieve(2_000, DEFAULT_MEMORY_BUDGET).unwrap();
    let cfg = QERunConfig {
        lambda_max: 1_500.0,
        ..config(0.25)
    };
    let report = run_qe(&cfg, &table).unwrap();
    let ladder = summary_ladder(cfg.lambda_max);
    assert_eq!(ladder, vec![100.0, 1_000.0, 1_500.0]);
    for s in &report.summaries {
        for row in &s.rows {
            let upto: Vec<&QERow> = report.rows.iter().filter(|r| r.lambda <= row.x).collect();
            let inf = upto.iter().filter(|r| r.in_lambda_infinity).count();
            assert_eq!(row.count, upto.len());
            assert_eq!(row.count_inf, inf);
            assert_eq!(row.density, inf as f64 / upto.len() as f64);
            assert!(row.density <= 1.0);
        }
    }
}

#[test]
fn rejects_bad_configs() {
    let mut cfg = config(1.2);
    assert!(cfg.validate().is_err());
    cfg.delta = 0.2;
    cfg.lambda_max = 50.0;
    assert!(cfg.validate().is_err());
    cfg.lambda_max = 200.0;
    cfg.observables.clear();
    assert!(cfg.validate().is_err());
    let unsorted = [SequenceEntry::tagged(30.5).unwrap(), SequenceEntry::tagged(20.5).unwrap()];
    assert!(run_qe_on(&unsorted, &config(0.2)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn regrouping_agrees(lambda in 2.0f64..3_000.0, delta in 0.05f64..0.45, l in 0u32..=6, mf in 0.0f64..1.0) {
        let m = ((mf * (2 * l + 1) as f64).floor() as i32 - l as i32).clamp(-(l as i32), l as i32);
        if let Ok(r) = weyl_vs_element_consistency(l, m, lambda, delta) {
            prop_assert!(r.residual < 1e-12, "{:?}", r);
        }
    }

    #[test]
    fn near_term_bounded_by_weyl_ratio(lambda in 2.0f64..5_000.0, delta in 0.05f64..0.45, l in 1u32..=6) {
        if let Ok(s) = dominant_shell_split(l, 0, lambda, delta) {
            prop_assert!(s.near_term.norm() <= s.weyl_ratio * (1.0 + 1e-12));
            let total = weyl_vs_element_consistency(l, 0, lambda, delta).unwrap().shell_form;
            prop_assert!((s.near_term + s.far_sum - total).norm() < 1e-12 * (1.0 + total.norm()));
        }
    }
}
