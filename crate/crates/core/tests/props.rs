//! Property-based invariants for the combinatorial and matrix layers.

use maxkcut::cluster::rand_index;
use maxkcut::elliptope::{
    cut_weight_matrix_form, entry_floor, extract_partition, in_kway_elliptope, partition_matrix,
};
use maxkcut::rounding::clustering_energy;
use maxkcut::{cut_weight, Partition, SymMatrix};
use proptest::prelude::*;

fn labels_strategy(max_n: usize, max_k: usize) -> impl Strategy<Value = (Vec<usize>, usize)> {
    (1..=max_k).prop_flat_map(move |k| {
        (
            proptest::collection::vec(0..k, 1..=max_n),
            Just(k),
        )
    })
}

fn weights_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-10.0f64..10.0, n * (n - 1) / 2)
}

fn weight_matrix(n: usize, upper: &[f64]) -> SymMatrix {
    let mut m = SymMatrix::zeros(n);
    let mut it = upper.iter();
    for i in 0..n {
        for j in (i + 1)..n {
            m.set(i, j, *it.next().unwrap());
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// partition -> matrix -> partition is the identity up to relabeling.
    #[test]
    fn partition_matrix_round_trip((labels, k) in labels_strategy(12, 6)) {
        prop_assume!(k >= 2);
        let p = Partition::new(labels, k).unwrap();
        let x = partition_matrix(&p);
        let q = extract_partition(&x, k, 1e-9).unwrap();
        prop_assert!(q.same_clustering(&p));
    }

    /// Every partition matrix is a member of its k-way elliptope. The floor
    /// -1/(k-1) tightens as k grows, so a matrix with at least two blocks
    /// falls outside the (k+1)-way elliptope.
    #[test]
    fn partition_matrix_is_feasible((labels, k) in labels_strategy(10, 5)) {
        prop_assume!(k >= 2);
        let p = Partition::new(labels, k).unwrap();
        let x = partition_matrix(&p);
        prop_assert!(in_kway_elliptope(&x, k, 1e-9).unwrap());
        if p.block_count() >= 2 {
            prop_assert!(!in_kway_elliptope(&x, k + 1, 1e-9).unwrap());
        }
    }

    /// Pair-sum and matrix-form cut weights agree for arbitrary weights.
    #[test]
    fn cut_weight_identity(((labels, k), raw) in labels_strategy(9, 5)
        .prop_flat_map(|(labels, k)| {
            let n = labels.len();
            (Just((labels, k)), weights_strategy(n.max(2)))
        }))
    {
        prop_assume!(k >= 2 && labels.len() >= 2);
        let n = labels.len();
        let p = Partition::new(labels, k).unwrap();
        let m = weight_matrix(n, &raw[..n * (n - 1) / 2]);
        let a = cut_weight(&p, &m).unwrap();
        let b = cut_weight_matrix_form(&partition_matrix(&p), &m, k).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    /// Rand index is symmetric, lies in [0, 1], and equals 1 exactly for
    /// identical clusterings (n >= 2).
    #[test]
    fn rand_index_properties((la, ka) in labels_strategy(14, 5), kb in 1usize..5) {
        let n = la.len();
        prop_assume!(n >= 2);
        let a = Partition::new(la.clone(), ka).unwrap();
        let lb: Vec<usize> = la.iter().map(|&l| (l * 7 + 3) % kb.max(1)).collect();
        let b = Partition::new(lb, kb.max(1)).unwrap();
        let ab = rand_index(&a, &b).unwrap();
        let ba = rand_index(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(rand_index(&a, &a).unwrap(), 1.0);
    }

    /// The clustering energy of any partition matrix equals the closed form
    /// n^2 ((k/2)/(k-1))^2 and no convex combination exceeds it.
    #[test]
    fn energy_peaks_at_vertices((labels, k) in labels_strategy(8, 5), t in 0.0f64..1.0) {
        prop_assume!(k >= 2);
        let p = Partition::new(labels, k).unwrap();
        let n = p.n() as f64;
        let x = partition_matrix(&p);
        let peak = n * n * ((k as f64 / 2.0) / (k as f64 - 1.0)).powi(2);
        prop_assert!((clustering_energy(&x, k) - peak).abs() <= 1e-9 * (1.0 + peak));
        // Blend toward the identity (also feasible): energy cannot exceed
        // the vertex value.
        let blend = x.scaled(t).add(&SymMatrix::identity(p.n()).scaled(1.0 - t)).unwrap();
        prop_assert!(clustering_energy(&blend, k) <= peak + 1e-9 * (1.0 + peak));
    }

    /// Entry floor and feasibility: scaling a partition matrix's off-diagonal
    /// below the floor leaves the k-way elliptope.
    #[test]
    fn floor_violations_are_detected(k in 2usize..6) {
        let floor = entry_floor(k);
        let bad = SymMatrix::from_fn(3, |i, j| if i == j { 1.0 } else { floor - 0.05 });
        prop_assert!(!in_kway_elliptope(&bad, k, 1e-9).unwrap());
    }

    /// Canonicalization: same_clustering is invariant under label permutation.
    #[test]
    fn same_clustering_is_label_invariant((labels, k) in labels_strategy(10, 4)) {
        let p = Partition::new(labels.clone(), k).unwrap();
        let permuted: Vec<usize> = labels.iter().map(|&l| (l + 1) % k).collect();
        let q = Partition::new(permuted, k).unwrap();
        prop_assert!(p.same_clustering(&q));
    }
}
