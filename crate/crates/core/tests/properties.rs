//! Property tests for the structural invariants of each module.

use ndarray::Array2;
use proptest::prelude::*;

use ssc::eval::misclustered_rate_raw;
use ssc::graph::SparseGraph;
use ssc::kmeans::kmeans;
use ssc::rng::{derive_seed, rng_from_seed};
use ssc::sampling::{dcs, dcs_quotas, initial_partition, srs};
use ssc::sbm::{generate_adjacency, population_adjacency, sample_memberships, BlockMatrix, LabelVector};
use ssc::spectral::{embed, gram_eigen, SubsampledLaplacian, DEFAULT_PINV_TOL};

fn edge_lists() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..40).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..120)))
}

fn graphs() -> impl Strategy<Value = SparseGraph> {
    edge_lists().prop_map(|(n, edges)| SparseGraph::from_edge_list(&edges, n).unwrap())
}

fn assert_graph_invariants(g: &SparseGraph) {
    let mut degree_sum = 0;
    for i in 0..g.n_nodes() {
        let nb = g.neighbors(i);
        assert!(nb.windows(2).all(|w| w[0] < w[1]), "sorted and unique");
        assert!(!nb.contains(&i), "no self-loop");
        for &j in nb {
            assert!(g.neighbors(j).binary_search(&i).is_ok(), "symmetric");
        }
        degree_sum += nb.len();
    }
    assert_eq!(degree_sum, 2 * g.n_edges());
    assert_eq!(g.degrees().total(), 2 * g.n_edges());
}

fn planted_labels(n: usize, k: usize, seed: u64) -> LabelVector {
    sample_memberships(&vec![1.0 / k as f64; k], n, &mut rng_from_seed(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_lists_give_valid_graphs((n, edges) in edge_lists()) {
        let g = SparseGraph::from_edge_list(&edges, n).unwrap();
        assert_graph_invariants(&g);
        for &(u, v) in &edges {
            prop_assert_eq!(g.has_edge(u, v), u != v);
        }
    }

    #[test]
    fn bi_adjacency_matches_adjacency(g in graphs(), seed in any::<u64>()) {
        let n = g.n_nodes();
        let all: Vec<usize> = (0..n).collect();
        let full = g.bi_adjacency(&all).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(full.get(i, j), g.has_edge(i, j));
            }
        }
        let size = 1 + (seed as usize % n);
        let sample = srs(n, size, &mut rng_from_seed(seed)).unwrap();
        let b = g.bi_adjacency(sample.ids()).unwrap();
        for (j, &s) in sample.ids().iter().enumerate() {
            prop_assert!(!b.get(s, j));
            for i in 0..n {
                prop_assert_eq!(b.get(i, j), g.has_edge(i, s));
            }
        }
    }

    #[test]
    fn generated_graphs_are_valid(n in 2usize..120, k in 1usize..4, beta in 0.0f64..1.0, zeta in 0.0f64..1.0, seed in any::<u64>()) {
        let z = planted_labels(n, k, seed);
        prop_assert_eq!(z.sizes().iter().sum::<usize>(), n);
        let b = BlockMatrix::planted(beta, zeta, k).unwrap();
        let g = generate_adjacency(&z, &b, &mut rng_from_seed(seed)).unwrap();
        assert_graph_invariants(&g);
        let again = generate_adjacency(&z, &b, &mut rng_from_seed(seed)).unwrap();
        prop_assert!(g.edges().eq(again.edges()));
    }

    #[test]
    fn population_is_block_constant(n in 1usize..60, k in 1usize..4, beta in 0.0f64..1.0, zeta in 0.0f64..1.0, seed in any::<u64>()) {
        let z = planted_labels(n, k, seed);
        let b = BlockMatrix::planted(beta, zeta, k).unwrap();
        let p = population_adjacency(&z, &b).unwrap();
        // explicit triple product Z B Zᵀ
        let zm = z.membership_matrix();
        let bm = Array2::from_shape_fn((k, k), |(a, c)| b.get(a, c));
        let reference = zm.dot(&bm).dot(&zm.t());
        prop_assert_eq!(&p, &reference);
        for i in 0..n {
            for i2 in 0..n {
                if z.get(i) == z.get(i2) {
                    prop_assert_eq!(p.row(i), p.row(i2));
                }
                prop_assert_eq!(p[[i, i2]], p[[i2, i]]);
            }
        }
    }

    #[test]
    fn srs_samples_are_distinct(n_nodes in 1usize..500, frac in 0.0f64..1.0, seed in any::<u64>()) {
        let n = 1 + ((n_nodes - 1) as f64 * frac) as usize;
        let s = srs(n_nodes, n, &mut rng_from_seed(seed)).unwrap();
        let mut ids = s.ids().to_vec();
        prop_assert_eq!(ids.len(), n);
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(ids.len(), n);
        prop_assert!(ids.iter().all(|&i| i < n_nodes));
    }

    #[test]
    fn quotas_sum_to_n(sizes in prop::collection::vec(0usize..50, 1..8), frac in 0.0f64..=1.0) {
        let total: usize = sizes.iter().sum();
        prop_assume!(total > 0);
        let n = (total as f64 * frac).round() as usize;
        let q = dcs_quotas(&sizes, n);
        prop_assert_eq!(q.iter().sum::<usize>(), n);
        for (qa, &sa) in q.iter().zip(&sizes) {
            prop_assert!(*qa <= sa);
            // each quota is the floor or ceiling of its share
            let share = n as f64 * sa as f64 / total as f64;
            prop_assert!((*qa as f64 - share).abs() < 1.0 + 1e-9);
        }
    }

    #[test]
    fn dcs_takes_highest_degrees(g in graphs(), k in 1usize..4, frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let n_nodes = g.n_nodes();
        prop_assume!(k <= n_nodes);
        let n = 1 + ((n_nodes - 1) as f64 * frac) as usize;
        let s = dcs(&g, n, k, &mut rng_from_seed(seed)).unwrap();
        let mut ids = s.ids().to_vec();
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(ids.len(), n);
        let part = initial_partition(&g, k).unwrap();
        for cluster in &part.clusters {
            let (picked, rest): (Vec<usize>, Vec<usize>) = cluster.iter().partition(|i| ids.binary_search(i).is_ok());
            let lowest = picked.iter().map(|&i| g.degree(i)).min();
            let highest = rest.iter().map(|&i| g.degree(i)).max();
            if let (Some(lo), Some(hi)) = (lowest, highest) {
                prop_assert!(lo >= hi);
            }
        }
    }

    #[test]
    fn subsampled_laplacian_is_contractive(n in 10usize..80, beta in 0.05f64..0.9, size in 2usize..10, seed in any::<u64>()) {
        let z = planted_labels(n, 2, seed);
        let g = generate_adjacency(&z, &BlockMatrix::planted(beta, 0.3, 2).unwrap(), &mut rng_from_seed(seed)).unwrap();
        let sample = srs(n, size, &mut rng_from_seed(seed ^ 1)).unwrap();
        let bi = g.bi_adjacency(sample.ids()).unwrap();
        prop_assume!(bi.nnz() > 0);
        let ls = SubsampledLaplacian::from_bi_adjacency(&bi).unwrap();

        let (dr, dc) = (bi.row_degrees(), bi.col_degrees());
        for i in 0..n {
            for j in 0..size {
                let expected = if bi.get(i, j) { 1.0 / ((dr[i] * dc[j]) as f64).sqrt() } else { 0.0 };
                prop_assert!((ls.matrix().get(i, j) - expected).abs() < 1e-15);
            }
        }

        let eig = gram_eigen(&ls, 1).unwrap();
        prop_assert!(eig.values[0].sqrt() <= 1.0 + 1e-10);
        prop_assert!(eig.values.as_slice().unwrap().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(eig.values.iter().all(|&v| v >= 0.0));

        let k = 2.min(size);
        let e = embed(&ls, k, DEFAULT_PINV_TOL).unwrap();
        let gram_u = e.coords.t().dot(&e.coords);
        for a in 0..k {
            for c in 0..k {
                let expected = if a == c && a < e.rank { 1.0 } else { 0.0 };
                prop_assert!((gram_u[[a, c]] - expected).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn kmeans_invariants(points in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 1..60), k in 1usize..6, seed in any::<u64>()) {
        let n = points.len();
        prop_assume!(k <= n);
        let x = Array2::from_shape_fn((n, 2), |(i, d)| points[i][d]);
        let r = kmeans(x.view(), k, 3, seed).unwrap();
        let again = kmeans(x.view(), k, 3, seed).unwrap();
        prop_assert_eq!(&r.labels, &again.labels);
        prop_assert_eq!(r.wcss, again.wcss);

        let dist = |i: usize, c: usize| (0..2).map(|d| (x[[i, d]] - r.centroids[[c, d]]).powi(2)).sum::<f64>();
        let mut recomputed = 0.0;
        for i in 0..n {
            let own = dist(i, r.labels[i]);
            for c in 0..k {
                prop_assert!(own <= dist(i, c) + 1e-12);
            }
            recomputed += own;
        }
        prop_assert!((recomputed - r.wcss).abs() <= 1e-9 * (1.0 + r.wcss));
        for w in r.wcss_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0]));
        }

        // relabeling the clusters leaves the objective unchanged
        let perm: Vec<usize> = (0..k).map(|c| (c + 1) % k).collect();
        let mut relabeled = 0.0;
        for i in 0..n {
            let c = perm[r.labels[i]];
            let inv = perm.iter().position(|&p| p == c).unwrap();
            relabeled += dist(i, inv);
        }
        prop_assert!((relabeled - r.wcss).abs() <= 1e-9 * (1.0 + r.wcss));
    }

    #[test]
    fn rate_is_symmetric_and_relabeling_invariant(
        pairs in prop::collection::vec((0usize..5, 0usize..5), 1..150),
        shift in 0usize..5,
    ) {
        let k = 5;
        let zhat: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let z: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let rate = misclustered_rate_raw(&zhat, &z, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&rate));
        prop_assert_eq!(rate, misclustered_rate_raw(&z, &zhat, k).unwrap());
        let rotated: Vec<usize> = zhat.iter().map(|&l| (l + shift) % k).collect();
        prop_assert_eq!(rate, misclustered_rate_raw(&rotated, &z, k).unwrap());
        let reversed: Vec<usize> = z.iter().map(|&l| k - 1 - l).collect();
        prop_assert_eq!(rate, misclustered_rate_raw(&zhat, &reversed, k).unwrap());
        prop_assert_eq!(misclustered_rate_raw(&rotated, &zhat, k).unwrap(), 0.0);
    }

    #[test]
    fn zero_rate_only_for_relabelings(pairs in prop::collection::vec((0usize..3, 0usize..3), 1..40)) {
        let zhat: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let z: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let rate = misclustered_rate_raw(&zhat, &z, 3).unwrap();
        // a relabeling exists iff the label pairs form a partial bijection
        let mut map = [None; 3];
        let mut back = [None; 3];
        let mut bijective = true;
        for (&a, &b) in zhat.iter().zip(&z) {
            bijective &= *map[a].get_or_insert(b) == b && *back[b].get_or_insert(a) == a;
        }
        prop_assert_eq!(rate == 0.0, bijective);
    }

    #[test]
    fn derived_seeds_separate_paths(parent in any::<u64>(), a in 0u64..1000, b in 0u64..1000) {
        prop_assume!(a != b);
        prop_assert_ne!(derive_seed(parent, &[a]), derive_seed(parent, &[b]));
        prop_assert_ne!(derive_seed(parent, &[a, b]), derive_seed(parent, &[b, a]));
    }
}
