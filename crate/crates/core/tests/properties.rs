mod common;

use ahp_core::consistency::{consistency_ratio, koczkodaj_index};
use ahp_core::eigen::principal_eigen;
use ahp_core::ml::kmeans::kmeans;
use ahp_core::ml::{fit_standardization, LogitModel};
use ahp_core::pcm::{Format, Pcm};
use ahp_core::reversal::detect_reversals;
use ahp_core::simulate::{harker_coerce, simulate_logical, simulate_random, DatasetRow, Source};
use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn any_pcm(seed: u64, n: usize, logical: bool) -> Pcm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if logical {
        simulate_logical(n, &mut rng).unwrap()
    } else {
        simulate_random(n, &mut rng).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn consistent_matrices_are_clean(seed in any::<u64>(), n in 3usize..=15) {
        let pcm = consistent_pcm(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let eig = principal_eigen(&pcm).unwrap();
        prop_assert!((eig.lambda_max - n as f64).abs() < 1e-9);
        prop_assert_eq!(detect_reversals(&pcm).unwrap().count, 0);
        prop_assert_eq!(koczkodaj_index(&pcm), 0.0);
    }

    #[test]
    fn eigenvector_matches_repeated_squaring(seed in any::<u64>(), n in 3usize..=12, logical in any::<bool>()) {
        let pcm = any_pcm(seed, n, logical);
        let got = principal_eigen(&pcm).unwrap();
        let (oracle, lambda) = perron_by_squaring(&dense(&pcm));
        prop_assert!((got.eigenvector.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-9);
        for (g, o) in got.eigenvector.iter().zip(&oracle) {
            prop_assert!((g - o).abs() < 1e-8);
        }
        prop_assert!((got.lambda_max - lambda).abs() < 1e-8);
        prop_assert!(got.lambda_max >= n as f64 - 1e-9);
    }

    #[test]
    fn reversals_match_brute_force(seed in any::<u64>(), n in 3usize..=8, logical in any::<bool>()) {
        let pcm = any_pcm(seed, n, logical);
        let report = detect_reversals(&pcm).unwrap();
        let oracle = brute_force_reversals(&pcm);
        prop_assert_eq!(report.count, oracle.len());
        for (ev, (p, q, t, m)) in report.events.iter().zip(&oracle) {
            prop_assert_eq!(ev.pair, [*p, *q]);
            prop_assert_eq!(ev.triad, *t);
            prop_assert!((ev.magnitude - m).abs() < 1e-8);
            prop_assert!(ev.magnitude > 1.0);
            prop_assert!((ev.full_ratio - 1.0) * (ev.triad_ratio - 1.0) < 0.0);
        }
        prop_assert!((0.0..=1.0).contains(&report.prop3_rev));
        let expected_max = oracle.iter().map(|o| o.3).fold(1.0, f64::max);
        prop_assert!((report.max3_rev - expected_max).abs() < 1e-8);
    }

    #[test]
    fn relabelling_preserves_everything(seed in any::<u64>(), n in 4usize..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pcm = simulate_logical(n, &mut rng).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let moved = relabel(&pcm, &perm);
        let (a, b) = (consistency_ratio(&pcm).unwrap(), consistency_ratio(&moved).unwrap());
        prop_assert!((a.lambda_max - b.lambda_max).abs() < 1e-9);
        prop_assert!((a.cr - b.cr).abs() < 1e-9);
        let (ra, rb) = (detect_reversals(&pcm).unwrap(), detect_reversals(&moved).unwrap());
        prop_assert_eq!(ra.count, rb.count);
        prop_assert!((ra.max3_rev - rb.max3_rev).abs() < 1e-9);
        let sorted = |r: &ahp_core::ReversalReport| {
            let mut m: Vec<f64> = r.events.iter().map(|e| e.magnitude).collect();
            m.sort_by(f64::total_cmp);
            m
        };
        for (x, y) in sorted(&ra).iter().zip(sorted(&rb)) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        prop_assert_eq!(koczkodaj_index(&pcm), koczkodaj_index(&moved));
    }

    #[test]
    fn koczkodaj_matches_brute_force(seed in any::<u64>(), n in 3usize..=9, logical in any::<bool>()) {
        let pcm = any_pcm(seed, n, logical);
        let k = koczkodaj_index(&pcm);
        prop_assert!((k - brute_force_koczkodaj(&pcm)).abs() < 1e-12);
        prop_assert!((0.0..1.0).contains(&k));
    }

    #[test]
    fn text_formats_round_trip(seed in any::<u64>(), n in 3usize..=10) {
        let pcm = any_pcm(seed, n, false);
        prop_assert_eq!(&Pcm::parse(&pcm.to_csv(), Format::Csv).unwrap(), &pcm);
        prop_assert_eq!(&Pcm::parse(&pcm.to_json(), Format::Json).unwrap(), &pcm);
    }

    #[test]
    fn coercion_lowers_cr_every_step(seed in any::<u64>(), n in 5usize..=9) {
        let pcm = any_pcm(seed, n, false);
        let c = harker_coerce(&pcm, 0.10, 200).unwrap();
        for w in c.cr_trace.windows(2) {
            prop_assert!(w[1] < w[0], "{:?}", c.cr_trace);
        }
        prop_assert_eq!(c.cr_trace.len(), c.iterations + 1);
        prop_assert!(c.converged && c.final_cr() <= 0.10);
    }

    #[test]
    fn predict_is_monotone(n in 4usize..=12, p in 0.0f64..1.0, m in 1.0f64..20.0, dp in 1e-3f64..0.1, dm in 1e-2f64..2.0) {
        let model = LogitModel::paper();
        let s = |n, p, m| model.score(n, p, m);
        prop_assert!(s(n, p + dp, m) < s(n, p, m));
        prop_assert!(s(n, p, m + dm) < s(n, p, m));
        prop_assert!(s(n + 1, p, m) > s(n, p, m));
        let prob = model.predict(n, p, m);
        prop_assert!((0.0..=1.0).contains(&prob));
        prop_assert_eq!(model.classify(n, p, m).is_consistent(), prob >= model.threshold);
    }

    #[test]
    fn standardized_features_are_centred(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<DatasetRow> = (0..60)
            .map(|i| DatasetRow {
                id: i,
                order: 4 + (i as usize % 3),
                prop3_rev: rng.random_range(0.0..0.5),
                max3_rev: rng.random_range(1.0..6.0),
                cr: 0.0,
                source: Source::Logical,
            })
            .collect();
        let params = fit_standardization(&rows).unwrap();
        for order in 4..=6 {
            let z: Vec<[f64; 2]> = rows.iter().filter(|r| r.order == order).map(|r| params.standardize(r).unwrap()).collect();
            for f in 0..2 {
                let mean = z.iter().map(|v| v[f]).sum::<f64>() / z.len() as f64;
                let var = z.iter().map(|v| (v[f] - mean).powi(2)).sum::<f64>() / (z.len() - 1) as f64;
                prop_assert!(mean.abs() < 1e-12);
                prop_assert!((var - 1.0).abs() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn kmeans_reaches_exhaustive_optimum(seed in any::<u64>(), n in 4usize..=11) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<[f64; 2]> = (0..n).map(|_| [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]).collect();
        let fit = kmeans(&points, 2, 20, &mut rng).unwrap();
        let best = exhaustive_two_means(&points);
        prop_assert!((fit.wcss - best).abs() < 1e-9 * (1.0 + best), "{} vs {best}", fit.wcss);
    }
}
