#![allow(dead_code)]

use amod_core::roadnet::{DistanceOracle, RoadGraph};
use amod_core::Point;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random connected graph: a random spanning tree plus `extra` chords.
/// Integer lengths in `1..=max_len` keep path sums exact.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize, max_len: u32) -> RoadGraph {
    let nodes: Vec<_> = (0..n)
        .map(|i| {
            (
                i,
                Point::new(rng.random_range(0.0..1000.0), rng.random_range(0.0..1000.0)),
            )
        })
        .collect();
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        seen.insert((u, v));
        edges.push((u, v, rng.random_range(1..=max_len) as f64));
    }
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let (u, v) = (a.min(b), a.max(b));
        if u != v && seen.insert((u, v)) {
            edges.push((u, v, rng.random_range(1..=max_len) as f64));
        }
    }
    RoadGraph::new(&nodes, &edges).unwrap()
}

pub fn random_masses(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|m| m / total).collect()
}

pub fn oracle(graph: &RoadGraph) -> DistanceOracle {
    DistanceOracle::floyd_warshall(graph)
}

/// Exhaustive mass-weighted squared-distance argmin, smallest id on ties.
pub fn brute_centroid(members: &[usize], mass: &[f64], o: &DistanceOracle) -> usize {
    let costs: Vec<(usize, f64)> = members
        .iter()
        .map(|&q| {
            let mut c = 0.0;
            for &p in members {
                let d = o.dist(q, p);
                c += d * d * mass[p];
            }
            (q, c)
        })
        .collect();
    let min = costs.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    costs
        .iter()
        .filter(|c| c.1 <= min + 1e-12 * min.abs())
        .map(|c| c.0)
        .min()
        .unwrap()
}

/// All permutations of `0..n`, for brute-force assignment.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Minimum total cost over all injective row→column matchings of the smaller side.
pub fn brute_assignment(cost: &[Vec<f64>]) -> f64 {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let (small, large) = (rows.min(cols), rows.max(cols));
    let c = |r: usize, k: usize| if rows <= cols { cost[r][k] } else { cost[k][r] };
    let mut best = f64::INFINITY;
    for perm in permutations(large) {
        let total: f64 = (0..small).map(|i| c(i, perm[i])).sum();
        best = best.min(total);
    }
    best
}
