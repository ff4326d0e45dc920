use proptest::prelude::*;
use towerlab_core::spectra::{
    cayley_sl2, cayley_zmod, cycle_graph, cycle_spectrum, dsc_check, eigenvalues, jacobi_eigenvalues, laplacian,
    laplacian_spectrum, schreier_graph, sl2_order, unipotent_generators, unramified_check, EigenOptions,
    GraphTowerLevelMap, DEFAULT_ZERO_THRESHOLD,
};

const EIG_TOL: f64 = 1e-9;

fn perm(m: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..m).collect::<Vec<usize>>()).prop_shuffle()
}

fn perm_set() -> impl Strategy<Value = Vec<Vec<usize>>> {
    (2usize..14).prop_flat_map(|m| prop::collection::vec(perm(m), 1..4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn schreier_laplacian_invariants(perms in perm_set()) {
        let g = schreier_graph(&perms, false).unwrap();
        let n = g.num_vertices();
        let r = g.degree();
        prop_assert!(r as usize >= perms.len());
        for (i, row) in g.adjacency().iter().enumerate() {
            prop_assert_eq!(row.iter().sum::<u32>(), r);
            for j in 0..n {
                prop_assert_eq!(row[j], g.adjacency()[j][i]);
            }
        }
        let opts = EigenOptions::default();
        let l = laplacian(&g);
        let spec = eigenvalues(&l, &opts).unwrap();
        prop_assert!(spec.iter().all(|&v| v >= -EIG_TOL));
        prop_assert!(spec.iter().all(|&v| v <= 2.0 * r as f64 + EIG_TOL));
        let zeros = spec.iter().filter(|&&v| v.abs() <= DEFAULT_ZERO_THRESHOLD).count();
        prop_assert_eq!(zeros, g.component_count());
        let sum: f64 = spec.iter().sum();
        prop_assert!((sum - l.trace()).abs() <= 1e-8 * (1.0 + l.trace()));
        let jac = jacobi_eigenvalues(&l, &opts).unwrap();
        for (a, b) in spec.iter().zip(&jac) {
            prop_assert!((a - b).abs() <= 1e-8, "ql {} vs jacobi {}", a, b);
        }
    }

    #[test]
    fn zmod_cayley_spectrum_is_a_character_sum(n in 3usize..40, s in prop::collection::vec(1i64..40, 1..3)) {
        // eigenvalue k: sum over the pairs {t, -t} of 2 - 2cos(2πkt/n)
        let g = cayley_zmod(n, &s, false).unwrap();
        // an unpaired residue t brings -t along; a pair {t, -t} is already closed
        let res: Vec<i64> = s.iter().map(|t| t.rem_euclid(n as i64)).collect();
        let mut closed = Vec::new();
        let mut used = vec![false; res.len()];
        for i in 0..res.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let inv = (n as i64 - res[i]) % n as i64;
            if let Some(j) = (i + 1..res.len()).find(|&j| !used[j] && res[j] == inv) {
                used[j] = true;
            }
            closed.push(res[i]);
        }
        prop_assert_eq!(g.degree() as usize, 2 * closed.len());
        let mut expected: Vec<f64> = (0..n)
            .map(|k| {
                closed
                    .iter()
                    .map(|&t| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * (k as f64) * (t as f64) / n as f64).cos())
                    .sum()
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        let got = laplacian_spectrum(&g, &EigenOptions::default()).unwrap();
        for (a, b) in got.iter().zip(&expected) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }
}

#[test]
fn cycle_spectra_match_the_closed_form() {
    let opts = EigenOptions::default();
    for n in 3..=64 {
        let got = laplacian_spectrum(&cycle_graph(n).unwrap(), &opts).unwrap();
        let mut expected = cycle_spectrum(n).unwrap();
        expected.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() <= EIG_TOL, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn dsc_on_cycles_and_sl2() {
    let opts = EigenOptions::default();
    for n in 3..=48 {
        let c = dsc_check(&cycle_graph(n).unwrap(), 0.0, &opts).unwrap();
        assert_eq!(c.diameter, n / 2);
        assert!(c.holds, "Z/{n}: {c:?}");
    }
    for m in [2u64, 3, 4, 5] {
        let g = cayley_sl2(m, &unipotent_generators()).unwrap();
        assert_eq!(g.num_vertices() as u64, sl2_order(m));
        assert!(g.meta().warning.is_none());
        assert_eq!(g.degree(), 4);
        let c = dsc_check(&g, 0.0, &opts).unwrap();
        assert!(c.holds, "SL2(Z/{m}): {c:?}");
    }
}

#[test]
fn sl2_orders() {
    assert_eq!(
        [2u64, 3, 4, 5, 6, 7, 8, 9].map(sl2_order),
        [6, 24, 48, 120, 144, 336, 384, 648]
    );
}

#[test]
fn dyadic_cycle_tower_is_unramified() {
    for k in 2..=9 {
        let n = 1usize << k;
        let map = GraphTowerLevelMap { vertex_map: (0..n).map(|x| x % (n / 2)).collect(), target_size: n / 2 };
        let check = unramified_check(&map).unwrap();
        assert!(check.unramified);
        assert_eq!(check.fiber_sizes, [(2, n / 2)].into());
        // reduction mod n/2 is a graph map on cycles
        let g = cycle_graph(n).unwrap();
        let h = cycle_graph(n / 2).unwrap();
        if n / 2 >= 3 {
            for (x, y, _) in g.triplets() {
                assert!(h.adjacency()[map.vertex_map[x]][map.vertex_map[y]] > 0);
            }
        }
    }
}
