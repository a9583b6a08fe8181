mod common;

use ahp_core::consistency::{consistency_ratio, koczkodaj_index};
use ahp_core::eigen::principal_eigen;
use ahp_core::ml::{LogitModel, Verdict};
use ahp_core::reversal::detect_reversals;
use ahp_core::{evaluate, Pcm};
use common::*;

fn assert_events_match_oracle(pcm: &Pcm) {
    let report = detect_reversals(pcm).unwrap();
    let oracle = brute_force_reversals(pcm);
    assert_eq!(report.count, oracle.len());
    for (ev, (p, q, t, m)) in report.events.iter().zip(&oracle) {
        assert_eq!((ev.pair, ev.triad), ([*p, *q], *t));
        assert!((ev.magnitude - m).abs() < 1e-9, "{} vs {m}", ev.magnitude);
    }
}

#[test]
fn five_by_five_eigenvector() {
    let pcm = csv(GOLDEN_5);
    let got = principal_eigen(&pcm).unwrap();
    let (oracle, lambda) = perron_by_squaring(&dense(&pcm));
    for (g, o) in got.eigenvector.iter().zip(&oracle) {
        assert!((g - o).abs() < 1e-9);
    }
    assert!((got.lambda_max - lambda).abs() < 1e-9);
    for (g, printed) in got.eigenvector.iter().zip([0.137, 0.637, 0.335, 0.337, 0.592]) {
        assert!((g - printed).abs() < 1e-3);
    }
}

#[test]
fn five_by_five_reversals() {
    let pcm = csv(GOLDEN_5);
    assert_events_match_oracle(&pcm);
    let r = detect_reversals(&pcm).unwrap();
    assert_eq!((r.count, r.max_possible), (7, 30));
    assert!((r.prop3_rev - 7.0 / 30.0).abs() < 1e-15);
    assert!((r.max3_rev - 4.472).abs() < 0.005);
    let triads: Vec<[usize; 3]> = r.events.iter().map(|e| e.triad).collect();
    assert_eq!(triads, vec![[0, 2, 3], [0, 2, 4], [0, 3, 4], [1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]);
}

#[test]
fn five_by_five_probability() {
    let r = evaluate(&csv(GOLDEN_5), &LogitModel::paper()).unwrap();
    assert!(r.probability_consistent > 4e-11 && r.probability_consistent < 2e-10);
    assert!(!r.pr_consistent);
}

#[test]
fn five_by_five_koczkodaj() {
    let pcm = csv(GOLDEN_5);
    let k = koczkodaj_index(&pcm);
    assert!((k - brute_force_koczkodaj(&pcm)).abs() < 1e-12);
    assert!(k > 0.0 && k < 1.0);
}

#[test]
fn pcm_a_features() {
    let pcm = csv(PCM_A);
    let cr = consistency_ratio(&pcm).unwrap();
    assert!((cr.lambda_max - 6.5636).abs() < 1e-3);
    assert!(cr.cr_consistent);
    assert_events_match_oracle(&pcm);
    let r = detect_reversals(&pcm).unwrap();
    // With exact triad priorities, ten (pair, triad) combinations have a
    // triad ratio of exactly one; they do not count as reversals.
    assert_eq!(r.count, 8);
    assert!((r.max3_rev - 2.0556).abs() < 1e-3);
    let acf: Vec<_> = r.events.iter().filter(|e| e.triad == [0, 2, 5]).collect();
    assert_eq!(acf.len(), 3);
}

#[test]
fn pcm_a_ties_are_exact() {
    let pcm = csv(PCM_A);
    let a = dense(&pcm);
    let (e, _) = perron_by_squaring(&a);
    let mut ties = 0;
    for t in ahp_core::reversal::enumerate_triads(6).unwrap() {
        let e3 = triad_eigenvector(&a, t);
        for (x, y) in [(0, 1), (0, 2), (1, 2)] {
            if (e3[x] / e3[y] - 1.0).abs() < 1e-12 && (e[t[x]] / e[t[y]] - 1.0).abs() > 1e-6 {
                ties += 1;
            }
        }
    }
    assert_eq!(ties, 10);
}

#[test]
fn pcm_b_features() {
    let pcm = csv(PCM_B);
    let cr = consistency_ratio(&pcm).unwrap();
    assert!((cr.lambda_max - 6.6252).abs() < 1e-3);
    assert!(!cr.cr_consistent);
    assert_events_match_oracle(&pcm);
    let r = detect_reversals(&pcm).unwrap();
    assert_eq!(r.count, 4);
    assert!((r.prop3_rev - 0.0667).abs() < 1e-4);
    let mags: Vec<f64> = r.events.iter().map(|e| e.magnitude).collect();
    for (m, printed) in mags.iter().zip([1.270, 1.780, 2.043, 1.780]) {
        assert!((m - printed).abs() < 0.01, "{mags:?}");
    }
    let p = LogitModel::paper().predict(6, r.prop3_rev, r.max3_rev);
    assert!(p >= 0.9999);
    assert_eq!(LogitModel::paper().classify_probability(p), Verdict::Consistent);
}

#[test]
fn reference_model_on_published_features() {
    let m = LogitModel::paper();
    assert!((m.predict(6, 0.2167, 2.0513) - 0.013).abs() < 0.003);
    assert_eq!(m.classify(6, 0.2167, 2.0513), Verdict::Inconsistent);
}
