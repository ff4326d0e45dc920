use proptest::prelude::*;
use towerlab_core::bounds::{
    ci_genus, frey_max_degree, gonality_upper_bounds, lazarsfeld_bound, planar_genus, planar_power_bound,
    pointcount_gonality_bound, tower_report, BoundRecord, BoundRule, GonalityInterval, ReportOptions, Side,
};
use towerlab_core::towers::fibonacci_tower;

#[test]
fn frey_threshold_matches_a_scan() {
    for gamma in 0..=200u64 {
        let scan = (0..=gamma).filter(|&d| 2 * d < gamma).max().unwrap_or(0);
        assert_eq!(frey_max_degree(gamma), scan, "gamma={gamma}");
    }
}

#[test]
fn fibonacci_levels_have_a_tight_interval() {
    let report = tower_report(&fibonacci_tower(), 3, &[3, 5, 7, 11, 13], &ReportOptions::default()).unwrap();
    for row in &report.rows[2..] {
        let degrees = vec![2u32; row.level + 1];
        let laz = lazarsfeld_bound(&degrees).unwrap();
        assert_eq!(laz, 1u64 << row.level);
        assert_eq!(row.interval.lower, laz);
        assert!(row.interval.is_consistent());
        let proj = BoundRule::CiProjection { degrees }.evaluate().unwrap();
        assert_eq!(row.interval.upper, Some(proj));
        assert!(row.interval.provenance.iter().all(BoundRecord::reproducible));
    }
    assert!(report.monotone_divergence);
}

#[test]
fn planar_squaring_chain() {
    for n in 0..=6usize {
        let b = planar_power_bound(2, &vec![2; n]).unwrap();
        assert_eq!(b, (1u64 << (n + 1)) - 1);
        assert!(b >= (1u64 << n) - 1);
    }
}

#[test]
fn small_genera() {
    assert_eq!(ci_genus(&[2, 2]).unwrap(), 1);
    assert_eq!(ci_genus(&[2, 2, 2]).unwrap(), 5);
    assert_eq!(ci_genus(&[3]).unwrap(), planar_genus(3));
    assert_eq!(ci_genus(&[4]).unwrap(), planar_genus(4));
    assert_eq!(ci_genus(&[2, 3]).unwrap(), 4);
}

proptest! {
    #[test]
    fn frey_degree_is_the_largest_below_half(gamma in 0u64..1_000_000) {
        let d = frey_max_degree(gamma);
        if gamma > 0 {
            prop_assert!(2 * d < gamma);
        }
        prop_assert!(2 * (d + 1) >= gamma);
    }

    #[test]
    fn lazarsfeld_is_order_free(mut degrees in prop::collection::vec(2u32..7, 1..5)) {
        let b = lazarsfeld_bound(&degrees).unwrap();
        degrees.reverse();
        prop_assert_eq!(lazarsfeld_bound(&degrees).unwrap(), b);
        // never above the projection from a point, whichever degree is first
        let proj = BoundRule::CiProjection { degrees }.evaluate().unwrap();
        prop_assert!(b <= proj);
    }

    #[test]
    fn ci_genus_matches_the_canonical_degree(degrees in prop::collection::vec(2u32..6, 1..4)) {
        let g = ci_genus(&degrees).unwrap() as i128;
        let prod: i128 = degrees.iter().map(|&d| d as i128).product();
        let sum: i128 = degrees.iter().map(|&d| d as i128).sum();
        prop_assert_eq!(2 * g - 2, prod * (sum - degrees.len() as i128 - 2));
    }

    #[test]
    fn pointcount_bound_covers_the_count(count in 0u64..100_000, q in 2u64..1000) {
        let b = pointcount_gonality_bound(count, q);
        prop_assert!(b * (q + 1) >= count);
        prop_assert!(b == 0 || (b - 1) * (q + 1) < count);
    }

    #[test]
    fn canonical_upper_bound_is_the_minimum(g in 2u64..10_000, has_point: bool, closed: bool) {
        let u = gonality_upper_bounds(g, has_point, closed).unwrap();
        prop_assert!(u <= 2 * g - 2);
        prop_assert!(!has_point || u <= g);
        prop_assert!(!closed || u <= (g + 3) / 2);
    }

    #[test]
    fn interval_keeps_the_best_bounds(records in prop::collection::vec((any::<bool>(), 1u64..50), 1..10)) {
        let mut iv = GonalityInterval::unbounded();
        for &(upper, v) in &records {
            let side = if upper { Side::Upper } else { Side::Lower };
            iv.add(BoundRecord { side, rule: BoundRule::PointCount { count: v, q: 0 }, value: v });
        }
        let lo = records.iter().filter(|r| !r.0).map(|r| r.1).max().unwrap_or(0);
        let hi = records.iter().filter(|r| r.0).map(|r| r.1).min();
        prop_assert_eq!(iv.lower, lo);
        prop_assert_eq!(iv.upper, hi);
        prop_assert_eq!(iv.is_consistent(), hi.is_none_or(|h| lo <= h));
        prop_assert_eq!(iv.provenance.len(), records.len());
    }
}
