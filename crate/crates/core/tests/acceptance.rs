//! Acceptance gate: one test per criterion, each printing a pass line with
//! the measured values so a run can be audited from the log.

mod common;

use common::{random_instance, MeasurementKind};
use kdq_core::kd::bounds::{
    SUM_SQ_LE_MAX_OVERLAP, SUM_SQ_LE_ONE, SUM_SQ_LE_OVERLAP_TIMES_PURITY, SUM_SQ_LE_PURITY,
};
use kdq_core::kd::{
    bipartition, bound_suite, entrywise_bounds_check, kd_distribution, marginals,
    nonclassicality_witness, support_counts, support_uncertainty_check, BoundStatus,
};
use kdq_core::postquantum::{
    complex_saturator_example, make_real_quasi, negative_case_check, real_sup_search_detailed,
    saturating_family_one_negative, saturating_family_two_negative, RealQuasiDistribution,
};
use kdq_core::quantum::{
    diagonal_state, maximally_mixed, nonclassical_qubit_example, Povm, SeededRng,
};
use kdq_core::search::{harvest_violations, maximize_l1};
use kdq_core::tolerances::Tolerances;
use rayon::prelude::*;
use std::time::Instant;

const ALPHAS: [f64; 3] = [2.0, 3.0, 4.5];

#[test]
fn criterion_01_closed_form_example_reproduction() {
    let start = Instant::now();
    let (rho, x, y) = nonclassical_qubit_example();
    let q = kd_distribution(&rho, &x, &y).unwrap();
    let s3 = 3.0_f64.sqrt();
    let expected = [
        (3.0 + s3) / 8.0,
        (1.0 - s3) / 8.0,
        (3.0 - s3) / 8.0,
        (1.0 + s3) / 8.0,
    ];
    for (z, want) in q.table().iter().zip(expected) {
        assert!((z.re - want).abs() < 1e-12);
        assert!(z.im.abs() < 1e-12);
    }
    let m = marginals(&q);
    for (got, want) in m.measurement(0).iter().zip([0.5, 0.5]) {
        assert!((got - want).abs() < 1e-12);
    }
    for (got, want) in m.measurement(1).iter().zip([0.75, 0.25]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!((q.l1_norm() - (3.0 + s3) / 4.0).abs() < 1e-12);
    assert!((q.l2_norm_sq() - 0.5).abs() < 1e-12);
    // The big entry escapes the smaller marginal yet obeys the product bound.
    let modulus = q.at(0, 0).norm();
    assert!(modulus > 0.5);
    assert!(modulus * modulus <= 0.375 + 1e-12);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "took {elapsed:.3}s");
    println!(
        "[PASS] criterion 1: example table, marginals, l1 = {:.6}, sum of squares = {:.6} \
         reproduced to 1e-12 in {elapsed:.3}s",
        q.l1_norm(),
        q.l2_norm_sq()
    );
}

#[test]
fn criterion_02_entrywise_and_sum_bound_campaign() {
    let start = Instant::now();
    let tol = Tolerances::standard();
    let master = SeededRng::new(2);
    let mut total = 0usize;
    for dim in [2usize, 3, 4, 8] {
        let violations: usize = (0..1000u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = master.derive(dim as u64 * 10_000 + i);
                let kind = match i % 3 {
                    0 => MeasurementKind::Projective,
                    1 => MeasurementKind::General,
                    _ => MeasurementKind::Mixed,
                };
                let instance = random_instance(dim, 2, kind, &mut rng);
                let q = instance.distribution().unwrap();
                let entry = entrywise_bounds_check(&q, &tol).unwrap();
                let suite = bound_suite(
                    &instance.state,
                    &instance.measurements[0],
                    &instance.measurements[1],
                    &ALPHAS,
                    &tol,
                )
                .unwrap();
                usize::from(!entry.all_passing()) + usize::from(!suite.all_passing())
            })
            .sum();
        assert_eq!(violations, 0, "violations at dim {dim}");
        total += 1000;
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.1}s");
    println!(
        "[PASS] criterion 2: {total} mixed-rank instances over dims 2,3,4,8 \
         passed every entrywise and sum bound in {elapsed:.1}s"
    );
}

#[test]
fn criterion_03_chain_tables_and_flattening() {
    let start = Instant::now();
    let master = SeededRng::new(3);
    let mut total = 0usize;
    for n in [3usize, 4, 5] {
        for dim in [2usize, 3, 4] {
            (0..500u64).into_par_iter().for_each(|i| {
                let key = (n as u64 * 10 + dim as u64) * 100_000 + i;
                let mut rng = master.derive(key);
                let q = random_instance(dim, n, MeasurementKind::Mixed, &mut rng)
                    .distribution()
                    .unwrap();
                assert!(q.l2_norm_sq() <= 1.0 + 1e-9);
                for split in 1..n {
                    // The grouped table must clear postquantum validation.
                    bipartition(&q, split).unwrap();
                }
            });
            total += 500;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.1}s");
    println!(
        "[PASS] criterion 3: {total} chain instances (3 to 5 measurements) kept the \
         squared sum within 1 and flattened into valid two-index tables in {elapsed:.1}s"
    );
}

#[test]
fn criterion_04_state_and_measurement_dependent_bounds() {
    let tol = Tolerances::standard();
    let master = SeededRng::new(4);
    let applied = std::sync::atomic::AtomicUsize::new(0);
    let skipped = std::sync::atomic::AtomicUsize::new(0);
    (0..900u64).into_par_iter().for_each(|i| {
        let mut rng = master.derive(i);
        let dim = 2 + (i % 3) as usize;
        let instance = random_instance(dim, 2, MeasurementKind::Mixed, &mut rng);
        let suite = bound_suite(
            &instance.state,
            &instance.measurements[0],
            &instance.measurements[1],
            &ALPHAS,
            &tol,
        )
        .unwrap();
        assert!(suite.find(SUM_SQ_LE_OVERLAP_TIMES_PURITY).unwrap().satisfied());
        assert!(suite.find(SUM_SQ_LE_MAX_OVERLAP).unwrap().satisfied());
        let purity_check = suite.find(SUM_SQ_LE_PURITY).unwrap();
        let overlap = suite.metadata.max_overlap.unwrap();
        if overlap <= 1.0 + tol.slack {
            assert!(purity_check.satisfied(), "applicable purity bound failed");
            applied.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        } else {
            assert_eq!(purity_check.status, BoundStatus::NotApplicable);
            skipped.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
    });

    // The caveat pair of trivial measurements: saturates the unit bound and
    // must mark the purity comparison not-applicable, not failed.
    let rho = maximally_mixed(2).unwrap();
    let one = Povm::trivial(2);
    let caveat = bound_suite(&rho, &one, &one, &[], &tol).unwrap();
    assert!(caveat.all_passing());
    assert!(caveat.find(SUM_SQ_LE_ONE).unwrap().slack.abs() < 1e-12);
    assert_eq!(
        caveat.find(SUM_SQ_LE_PURITY).unwrap().status,
        BoundStatus::NotApplicable
    );
    println!(
        "[PASS] criterion 4: purity/overlap bounds held on 900 instances \
         ({} applied, {} not-applicable) and the trivial-measurement caveat is reported",
        applied.into_inner(),
        skipped.into_inner()
    );
}

#[test]
fn criterion_05_three_tier_hierarchy() {
    let mut rng = SeededRng::new(5);
    // Tier 1: classical setups pin the l1 norm to 1.
    let mut classical_max: f64 = 0.0;
    for dim in 2..=4 {
        for _ in 0..20 {
            let raw: Vec<f64> = (0..dim).map(|_| rng.uniform(0.0, 1.0)).collect();
            let total: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
            let rho = diagonal_state(&probs).unwrap();
            let z = Povm::computational(dim);
            let l1 = kd_distribution(&rho, &z, &z).unwrap().l1_norm();
            assert!((l1 - 1.0).abs() < 1e-9);
            classical_max = classical_max.max(l1);
        }
    }
    // Every random instance respects the sqrt(N) cap.
    let master = SeededRng::new(55);
    (0..600u64).into_par_iter().for_each(|i| {
        let mut rng = master.derive(i);
        let dim = 2 + (i % 3) as usize;
        let q = random_instance(dim, 2, MeasurementKind::Mixed, &mut rng)
            .distribution()
            .unwrap();
        assert!(q.l1_norm() <= (q.outcome_count() as f64).sqrt() + 1e-9);
    });
    // Tier 2: the example sits strictly between 1 and the postquantum cap.
    let (rho, x, y) = nonclassical_qubit_example();
    let example_l1 = kd_distribution(&rho, &x, &y).unwrap().l1_norm();
    // Tier 3: the complex saturator reaches the outcome count exactly.
    let saturator = complex_saturator_example();
    let saturator_l1 = saturator.l1_norm();
    assert!((saturator_l1 - 4.0).abs() < 1e-12);
    assert!(classical_max < example_l1 - 0.18);
    assert!(example_l1 < saturator_l1 - 2.8);
    println!(
        "[PASS] criterion 5: hierarchy 1 = {classical_max:.6} < {example_l1:.6} < \
         {saturator_l1:.6} = outcome count, with sqrt(N) respected campaign-wide"
    );
}

#[test]
fn criterion_06_support_bounds() {
    let tol = Tolerances::standard();
    let master = SeededRng::new(6);
    let mut total = 0usize;
    for dim in [2usize, 3, 4] {
        (0..500u64).into_par_iter().for_each(|i| {
            let mut rng = master.derive(dim as u64 * 100_000 + i);
            let instance = random_instance(dim, 2, MeasurementKind::Mixed, &mut rng);
            let q = instance.distribution().unwrap();
            let counts = support_counts(&q, 1e-9).unwrap();
            assert!(q.l1_norm() <= (counts.n_xy as f64).sqrt() + 1e-9);
            assert!(counts.n_xy <= counts.n_x * counts.n_y);
            let report = support_uncertainty_check(
                &instance.state,
                &instance.measurements[0],
                &instance.measurements[1],
                1e-9,
                &tol,
            )
            .unwrap();
            assert!(report.all_passing());
        });
        total += 500;
    }
    println!(
        "[PASS] criterion 6: support-count bounds and the support-product lower bound \
         held on {total} instances at threshold 1e-9"
    );
}

fn shuffled(table: [f64; 4], rng: &mut SeededRng) -> Vec<f64> {
    let mut t = table.to_vec();
    for i in (1..4).rev() {
        let j = rng.index(i + 1);
        t.swap(i, j);
    }
    t
}

fn random_case_one(rng: &mut SeededRng) -> RealQuasiDistribution {
    let v = -rng.uniform(1e-6, 1.0);
    loop {
        let raw = [
            rng.uniform(0.0, 1.0),
            rng.uniform(0.0, 1.0),
            rng.uniform(0.0, 1.0),
        ];
        let total: f64 = raw.iter().sum();
        let scale = (1.0 - v) / total;
        let a = raw[0] * scale;
        let b = raw[1] * scale;
        let last = 1.0 - v - a - b;
        if a <= 1.0 && b <= 1.0 && (0.0..=1.0).contains(&last) {
            return make_real_quasi(2, 2, shuffled([v, a, b, last], rng)).unwrap();
        }
    }
}

fn random_case_two(rng: &mut SeededRng) -> RealQuasiDistribution {
    let a = -rng.uniform(1e-6, 0.5);
    let b = -rng.uniform(1e-6, 0.5);
    let s = 1.0 - a - b;
    let w1 = rng.uniform(s - 1.0, 1.0);
    let last = 1.0 - a - b - w1;
    make_real_quasi(2, 2, shuffled([a, b, w1, last], rng)).unwrap()
}

fn random_case_three(rng: &mut SeededRng) -> RealQuasiDistribution {
    // Three strict negatives force the fourth entry past 1, so such tables
    // only exist inside the validation tolerance around the boundary.
    let a = -rng.uniform(1e-12, 1e-10);
    let b = -rng.uniform(1e-12, 1e-10);
    let c = -rng.uniform(1e-12, 1e-10);
    let last = 1.0 - a - b - c;
    make_real_quasi(2, 2, shuffled([a, b, c, last], rng)).unwrap()
}

#[test]
fn criterion_07_real_table_supremum_oracle() {
    let start = Instant::now();
    let report = real_sup_search_detailed(0.05, 3);
    assert!(report.sup_found <= 3.0 + 1e-9);
    assert!((report.sup_found - 3.0).abs() <= 1e-3);

    for i in 0..=10u32 {
        for j in 0..=10u32 {
            if i + j < 10 {
                continue;
            }
            let q = saturating_family_one_negative(i as f64 / 10.0, j as f64 / 10.0).unwrap();
            assert!((q.l1_norm() - 3.0).abs() < 1e-12);
        }
    }
    for i in 0..=20u32 {
        let q = saturating_family_two_negative(-1.0 + i as f64 / 20.0).unwrap();
        assert!((q.l1_norm() - 3.0).abs() < 1e-12);
    }

    let mut rng = SeededRng::new(7);
    for case in 1..=3usize {
        for _ in 0..1000 {
            let table = match case {
                1 => random_case_one(&mut rng),
                2 => random_case_two(&mut rng),
                _ => random_case_three(&mut rng),
            };
            // The check itself errors if the closed form drifts past 1e-12.
            let check = negative_case_check(&table).unwrap();
            assert_eq!(check.negatives, case);
            if case == 3 {
                assert!(check.direct_value <= 1.0 + 1e-9);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "took {elapsed:.1}s");
    println!(
        "[PASS] criterion 7: grid search found sup = {:.6} <= 3, both saturating \
         families hit 3 to 1e-12, and 3000 random case tables matched their closed \
         forms in {elapsed:.1}s",
        report.sup_found
    );
}

#[test]
fn criterion_08_witness_equivalence_and_harvest() {
    let master = SeededRng::new(8);
    (0..600u64).into_par_iter().for_each(|i| {
        let mut rng = master.derive(i);
        let dim = 2 + (i % 2) as usize;
        let q = random_instance(dim, 2, MeasurementKind::Mixed, &mut rng)
            .distribution()
            .unwrap();
        // Errors here would mean the two witness tests disagreed.
        nonclassicality_witness(&q).unwrap();
        let margin = 1e-6;
        let by_l1 = q.l1_norm() > 1.0 + margin;
        let gap = q
            .table()
            .iter()
            .map(|z| z.norm() - z.re)
            .fold(0.0, f64::max);
        assert_eq!(by_l1, gap > margin / q.outcome_count() as f64);
    });

    let kept = harvest_violations(2, &SeededRng::new(88), 10_000).unwrap();
    assert!(!kept.is_empty());
    let top = &kept[0];
    assert!(top.l1 > 1.15);
    assert!(top.l1 <= 2.0 + 1e-9);
    println!(
        "[PASS] criterion 8: witness tests agreed on 600 instances; harvest of 10000 \
         qubit samples kept {} nonclassical instances, strongest l1 = {:.4}",
        kept.len(),
        top.l1
    );
}

#[test]
fn criterion_09_l1_search_sanity() {
    let result = maximize_l1(2, &SeededRng::new(9), 4, 40).unwrap();
    assert!(result.best_value >= 1.1830);
    assert!(result.best_value <= 2.0 + 1e-9);
    let q = result.best_instance.distribution().unwrap();
    assert!((q.l1_norm() - result.best_value).abs() < 1e-9);
    for w in result.trace.windows(2) {
        assert!(w[1].1 >= w[0].1);
    }
    println!(
        "[PASS] criterion 9: qubit l1 search reached {:.6} within [1.1830, 2], and the \
         stored instance re-evaluates to the reported value",
        result.best_value
    );
}
