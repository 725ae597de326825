//! Property tests for the structural invariants: fold partitions, tokenizer
//! round trips, streaming-count linearity, adjustment monotonicity, and
//! rank-correlation invariances.

use std::collections::HashSet;

use proptest::prelude::*;

use lexicomp_core::folds::split_folds;
use lexicomp_core::ingest::{count_frequencies, log_cpm, tokenize_ipa};
use lexicomp_core::lexicon::{join_segments, PhonemeInventory};
use lexicomp_core::stats::{benjamini_hochberg, spearman, standardize};

proptest! {
    #[test]
    fn folds_partition_the_units(n in 2usize..200, k in 2usize..20, seed in any::<u64>()) {
        prop_assume!(n >= k);
        let ids: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
        let fa = split_folds(&ids, k, seed).unwrap();

        // Covering and disjoint: every unit has exactly one fold.
        prop_assert_eq!(fa.fold_of.len(), n);
        let mut seen = HashSet::new();
        for id in &ids {
            let fold = fa.fold(id).expect("every unit assigned");
            prop_assert!(fold < k);
            seen.insert(id.clone());
        }
        prop_assert_eq!(seen.len(), n);

        // Balanced: sizes differ by at most one.
        let sizes = fa.fold_sizes();
        let min = sizes.iter().min().unwrap();
        let max = sizes.iter().max().unwrap();
        prop_assert!(max - min <= 1);
    }

    #[test]
    fn tokenizer_round_trips(words in proptest::collection::vec(0usize..6, 1..30)) {
        // Inventory with overlapping multi-codepoint symbols.
        let symbols = ["a", "b", "ts", "t", "s", "tʃ"];
        let inv = PhonemeInventory::from_symbols(symbols).unwrap();
        let input: String = words.iter().map(|&i| symbols[i]).collect();
        let tokens = tokenize_ipa(&input, &inv).unwrap();
        prop_assert_eq!(join_segments(&tokens), input);
    }

    #[test]
    fn counting_is_linear_in_concatenation(a in "[a-zA-Z ,.0-9]{0,200}", b in "[a-zA-Z ,.0-9]{0,200}") {
        // Concatenate with a separator so no token straddles the boundary.
        let joined = format!("{a} {b}");
        let whole = count_frequencies(joined.as_bytes()).unwrap();
        let mut parts = count_frequencies(a.as_bytes()).unwrap();
        parts.merge(count_frequencies(b.as_bytes()).unwrap());
        prop_assert_eq!(whole.total(), parts.total());
        prop_assert_eq!(whole.iter_sorted(), parts.iter_sorted());
    }

    #[test]
    fn log_cpm_is_strictly_increasing_in_count(count in 1u64..1_000_000, total in 1u64..1_000_000_000) {
        prop_assume!(count + 1 <= total);
        let lo = log_cpm(count, total).unwrap();
        let hi = log_cpm(count + 1, total).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn bh_dominates_raw_and_preserves_order(p in proptest::collection::vec(0.0f64..=1.0, 1..40)) {
        let adj = benjamini_hochberg(&p).unwrap();
        for (raw, a) in p.iter().zip(&adj) {
            prop_assert!(*a >= *raw - 1e-15);
            prop_assert!(*a <= 1.0);
        }
        // Monotone in the order statistics: sorting raw p sorts adjusted p.
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&i, &j| p[i].partial_cmp(&p[j]).unwrap());
        for w in order.windows(2) {
            prop_assert!(adj[w[0]] <= adj[w[1]] + 1e-15);
        }
    }

    #[test]
    fn spearman_ignores_monotone_transforms(
        xs in proptest::collection::vec(-50.0f64..50.0, 4..25),
        ys in proptest::collection::vec(-50.0f64..50.0, 4..25),
        scale in 0.1f64..5.0,
    ) {
        let n = xs.len().min(ys.len());
        let xs = &xs[..n];
        let ys = &ys[..n];
        prop_assume!(xs.iter().any(|v| *v != xs[0]));
        prop_assume!(ys.iter().any(|v| *v != ys[0]));
        let (rho, _) = spearman(xs, ys).unwrap();
        // exp is strictly increasing; positive scaling preserves order.
        let tx: Vec<f64> = xs.iter().map(|v| (v * 0.05).exp()).collect();
        let ty: Vec<f64> = ys.iter().map(|v| v * scale).collect();
        let (rho2, _) = spearman(&tx, &ty).unwrap();
        prop_assert!((rho - rho2).abs() < 1e-9, "{} vs {}", rho, rho2);
    }

    #[test]
    fn standardization_is_affine_invariant_in_shape(
        xs in proptest::collection::vec(-100.0f64..100.0, 3..40),
        shift in -50.0f64..50.0,
        scale in 0.01f64..10.0,
    ) {
        prop_assume!(xs.iter().any(|v| *v != xs[0]));
        let z1 = standardize("x", &xs).unwrap();
        let moved: Vec<f64> = xs.iter().map(|v| v * scale + shift).collect();
        let z2 = standardize("x", &moved).unwrap();
        for (a, b) in z1.iter().zip(&z2) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
