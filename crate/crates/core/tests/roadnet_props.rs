mod common;

use amod_core::roadnet::{
    graph_centroid, graph_voronoi, r_limited_graph_cell, DistanceOracle, RoadGraph,
};
use amod_core::Point;
use common::{brute_centroid, random_graph, random_masses};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn floyd_warshall_matches_dijkstra(seed in any::<u64>(), n in 2usize..300, extra in 0usize..400) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, extra, 50);
        let fw = DistanceOracle::floyd_warshall(&g);
        let dj = DistanceOracle::from_dijkstra(&g);
        for a in 0..n {
            prop_assert_eq!(fw.dist(a, a), 0.0);
            for b in 0..n {
                prop_assert_eq!(fw.dist(a, b), dj.dist(a, b));
                prop_assert_eq!(fw.dist(a, b), fw.dist(b, a));
            }
        }
    }

    #[test]
    fn next_hops_trace_shortest_paths(seed in any::<u64>(), n in 2usize..80, extra in 0usize..120) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, extra, 20);
        let o = DistanceOracle::floyd_warshall(&g);
        for a in 0..n {
            for b in 0..n {
                let path = o.path(a, b);
                prop_assert_eq!(path[0], a);
                prop_assert_eq!(*path.last().unwrap(), b);
                let walked: f64 = path.windows(2).map(|w| g.edge_length(w[0], w[1]).unwrap()).sum();
                prop_assert_eq!(walked, o.dist(a, b));
                for c in 0..n {
                    prop_assert!(o.dist(a, b) <= o.dist(a, c) + o.dist(c, b));
                }
            }
        }
    }

    #[test]
    fn voronoi_assigns_nearest_generator(seed in any::<u64>(), n in 2usize..200, k in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, n / 2, 10);
        let o = DistanceOracle::floyd_warshall(&g);
        let mut gens: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(gens.as_mut_slice(), &mut rng);
        gens.truncate(k.min(n));
        let vor = graph_voronoi(&o, &gens).unwrap();
        for q in 0..n {
            let owner = vor.owner(q);
            for &gen in &gens {
                let (d_own, d_gen) = (o.dist(q, owner), o.dist(q, gen));
                prop_assert!(d_own < d_gen || (d_own == d_gen && owner <= gen));
            }
        }
        let r_g = 15.0;
        for &gen in &gens {
            let cell = r_limited_graph_cell(&vor, &o, gen, r_g).unwrap();
            let full = vor.cell(gen);
            prop_assert!(cell.members.contains(&gen));
            for q in &cell.members {
                prop_assert!(full.contains(q));
                prop_assert!(o.dist(gen, *q) <= r_g);
            }
        }
    }

    #[test]
    fn centroid_matches_brute_force(seed in any::<u64>(), n in 1usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, n, 10);
        let o = DistanceOracle::floyd_warshall(&g);
        let mass = random_masses(&mut rng, n);
        let vor = graph_voronoi(&o, &[0]).unwrap();
        let cell = r_limited_graph_cell(&vor, &o, 0, f64::INFINITY).unwrap();
        prop_assert_eq!(graph_centroid(&cell, &mass, &o).unwrap(), brute_centroid(&cell.members, &mass, &o));
    }

    #[test]
    fn nearest_node_is_euclidean_argmin(seed in any::<u64>(), n in 1usize..100, x in 0.0f64..1000.0, y in 0.0f64..1000.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0, 10);
        let p = Point::new(x, y);
        let got = g.nearest_node(p);
        for q in 0..n {
            prop_assert!(g.coord(got).dist2(p) <= g.coord(q).dist2(p));
        }
    }
}

#[test]
fn grid_files_round_trip() {
    let g = RoadGraph::grid(20, 250.0).unwrap();
    assert_eq!((g.len(), g.edge_count()), (400, 760));
    let back = RoadGraph::from_file(&g.to_file()).unwrap();
    assert_eq!(back.len(), 400);
    let o = DistanceOracle::floyd_warshall(&back);
    assert_eq!(o.dist(0, 399), 2.0 * 19.0 * 250.0);
}
