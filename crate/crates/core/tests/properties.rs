use mnlss::criteria::{
    criterion_one, criterion_three, criterion_two, nagelkerke_shrinkage_bound, pair_events_required, PairEstimate,
    PrecisionSpec,
};
use mnlss::rsq::{lnl_null_multinomial, max_rcs, max_rcs_from_lnl, OutcomeDistribution};
use proptest::prelude::*;

fn counts() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..10_000, 2..7)
}

fn all_pairs(k: usize) -> Vec<(usize, usize)> {
    (1..k).flat_map(|r| (r + 1..=k).map(move |kk| (kk, r))).collect()
}

/// Smallest `n` whose implied heuristic shrinkage reaches `s`.
fn scan_events(params: u32, r2_app: f64, s: f64, start: u64) -> u64 {
    let shrink = |n: u64| 1.0 + params as f64 / (n as f64 * (1.0 - r2_app).ln());
    let mut n = start.saturating_sub(3).max(1);
    while shrink(n) < s {
        n += 1;
    }
    n
}

proptest! {
    #[test]
    fn max_r2_routes_agree(c in counts()) {
        let d = OutcomeDistribution::from_counts(&c).unwrap();
        let n: u64 = c.iter().sum();
        let a = max_rcs(&d).unwrap();
        let b = max_rcs_from_lnl(lnl_null_multinomial(&d).unwrap(), n as f64);
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(a > 0.0 && a < 1.0);
    }

    #[test]
    fn max_r2_permutation_invariant(c in counts(), seed in any::<u64>()) {
        let d = OutcomeDistribution::from_counts(&c).unwrap();
        let mut perm: Vec<usize> = (0..c.len()).collect();
        perm.rotate_left((seed as usize) % c.len());
        prop_assert!((max_rcs(&d).unwrap() - max_rcs(&d.permuted(&perm)).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn criteria_permutation_invariant(c in counts(), r2 in 0.02f64..0.3, q in 1u32..30, rot in 0usize..6) {
        let k = c.len();
        let d = OutcomeDistribution::from_counts(&c).unwrap();
        let mut perm: Vec<usize> = (0..k).collect();
        perm.rotate_left(rot % k);
        let pd = d.permuted(&perm);
        // new label of old category o (1-based)
        let relabel: Vec<usize> = (0..k).map(|o| perm.iter().position(|&p| p == o).unwrap() + 1).collect();
        let r2_of = |k: usize, r: usize| r2 * (1.0 + 0.01 * (k * 7 + r) as f64);

        let base: Vec<PairEstimate> = all_pairs(k)
            .into_iter()
            .map(|(kk, r)| PairEstimate::new(kk, r, r2_of(kk, r), d.pair_proportion(kk, r)))
            .collect();
        let moved: Vec<PairEstimate> = all_pairs(k)
            .into_iter()
            .map(|(kk, r)| {
                let (a, b) = (relabel[kk - 1], relabel[r - 1]);
                PairEstimate::new(a.max(b), a.min(b), r2_of(kk, r), pd.pair_proportion(a.max(b), a.min(b)))
            })
            .collect();
        let one = criterion_one(&base, q, k).unwrap();
        let one_p = criterion_one(&moved, q, k).unwrap();
        prop_assert_eq!(one.n, one_p.n);

        let max = max_rcs(&d).unwrap();
        let two = criterion_two(q, k, 0.15 * max, max, 0.05).unwrap();
        let two_p = criterion_two(q, k, 0.15 * max_rcs(&pd).unwrap(), max_rcs(&pd).unwrap(), 0.05).unwrap();
        prop_assert_eq!(two.size.n, two_p.size.n);

        let three = criterion_three(&d, PrecisionSpec::default()).unwrap();
        let three_p = criterion_three(&pd, PrecisionSpec::default()).unwrap();
        prop_assert_eq!(three.n, three_p.n);
    }

    #[test]
    fn events_decrease_with_r2_and_grow_with_q(r2 in 0.01f64..0.8, dr in 0.001f64..0.05, q in 1u32..40) {
        prop_assume!(r2 + dr < 0.89);
        let a = pair_events_required(q, r2, 0.9).unwrap();
        let b = pair_events_required(q, r2 + dr, 0.9).unwrap();
        let c = pair_events_required(q + 1, r2, 0.9).unwrap();
        prop_assert!(b.raw < a.raw);
        prop_assert!(c.raw > a.raw);
    }

    #[test]
    fn events_match_brute_force(r2 in 0.01f64..0.85, q in 1u32..40, s in 0.7f64..0.95) {
        prop_assume!(r2 < s);
        let ss = pair_events_required(q, r2, s).unwrap();
        prop_assert_eq!(ss.n, scan_events(q, r2 / s, s, ss.n));
    }

    #[test]
    fn criterion_two_matches_scan(c in counts(), nag in 0.05f64..0.5, q in 1u32..30) {
        let d = OutcomeDistribution::from_counts(&c).unwrap();
        let k = c.len();
        let max = max_rcs(&d).unwrap();
        let r2 = nag * max;
        prop_assume!(r2 + 0.05 * max < 0.99);
        let two = criterion_two(q, k, r2, max, 0.05).unwrap();
        let params = (k as u32 - 1) * q;
        prop_assert_eq!(two.size.n, scan_events(params, r2 + 0.05 * max, two.shrinkage_bound, two.size.n));
    }

    #[test]
    fn fallback_bound_is_three_quarters(max in 0.05f64..0.99) {
        let s = nagelkerke_shrinkage_bound(0.15 * max, max, 0.05);
        prop_assert!((s - 0.75).abs() < 1e-14);
    }

    #[test]
    fn criterion_three_binding_category_is_closest_to_half(c in counts()) {
        let d = OutcomeDistribution::from_counts(&c).unwrap();
        let rep = criterion_three(&d, PrecisionSpec::default()).unwrap();
        let p = d.proportions();
        let best = p.iter().map(|v| v * (1.0 - v)).fold(0.0f64, f64::max);
        let need = rep.chi2 * best / 0.0025;
        prop_assert_eq!(rep.n, need.ceil() as u64);
    }
}
