//! Road network: an undirected weighted intersection graph with dense
//! all-pairs shortest paths, graph Voronoi partitions and graph centroids.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum RoadnetError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("node ids must be dense 0..{expected}, found {found}")]
    NonDenseIds { expected: usize, found: usize },
    #[error("edge ({u}, {v}) references unknown node")]
    UnknownNode { u: NodeId, v: NodeId },
    #[error("edge ({u}, {v}) is a self loop")]
    SelfLoop { u: NodeId, v: NodeId },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: NodeId, v: NodeId },
    #[error("edge ({u}, {v}) has non-positive length {length}")]
    NonPositiveLength { u: NodeId, v: NodeId, length: f64 },
    #[error("graph is disconnected: node {unreachable} unreachable from node 0")]
    DisconnectedGraph { unreachable: NodeId },
    #[error("generator set is empty")]
    EmptyGeneratorSet,
    #[error("generator {0} listed more than once")]
    DuplicateGenerator(NodeId),
    #[error("node {0} is not a generator of this partition")]
    UnknownGenerator(NodeId),
    #[error("cell is empty")]
    EmptyCell,
    #[error("reading graph file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing graph file: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }

    /// `self + t·(other − self)`.
    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }
}

/// On-disk graph layout: `nodes: [[id, x_m, y_m], ...]`, `edges: [[u, v, length_m], ...]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub nodes: Vec<(NodeId, f64, f64)>,
    pub edges: Vec<(NodeId, NodeId, f64)>,
}

/// Validated undirected road graph with dense node ids.
#[derive(Debug, Clone)]
pub struct RoadGraph {
    coords: Vec<Point>,
    edges: Vec<(NodeId, NodeId, f64)>,
    adjacency: Vec<Vec<(NodeId, f64)>>,
}

impl RoadGraph {
    pub fn new(
        nodes: &[(NodeId, Point)],
        edges: &[(NodeId, NodeId, f64)],
    ) -> Result<Self, RoadnetError> {
        if nodes.is_empty() {
            return Err(RoadnetError::EmptyGraph);
        }
        let n = nodes.len();
        let mut coords = vec![None; n];
        for &(id, p) in nodes {
            if id >= n || coords[id].is_some() {
                return Err(RoadnetError::NonDenseIds {
                    expected: n,
                    found: id,
                });
            }
            coords[id] = Some(p);
        }
        let coords: Vec<Point> = coords.into_iter().map(|c| c.unwrap()).collect();

        let mut seen = HashSet::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v, length) in edges {
            if u >= n || v >= n {
                return Err(RoadnetError::UnknownNode { u, v });
            }
            if u == v {
                return Err(RoadnetError::SelfLoop { u, v });
            }
            if !(length > 0.0) || !length.is_finite() {
                return Err(RoadnetError::NonPositiveLength { u, v, length });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(RoadnetError::DuplicateEdge { u, v });
            }
            adjacency[u].push((v, length));
            adjacency[v].push((u, length));
        }

        let graph = Self {
            coords,
            edges: edges.to_vec(),
            adjacency,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    /// `k×k` lattice with uniform `spacing`; node `row·k + col` sits at `(col·s, row·s)`.
    pub fn grid(k: usize, spacing: f64) -> Result<Self, RoadnetError> {
        let mut nodes = Vec::with_capacity(k * k);
        let mut edges = Vec::with_capacity(2 * k * k.saturating_sub(1));
        for row in 0..k {
            for col in 0..k {
                let id = row * k + col;
                nodes.push((id, Point::new(col as f64 * spacing, row as f64 * spacing)));
                if col + 1 < k {
                    edges.push((id, id + 1, spacing));
                }
                if row + 1 < k {
                    edges.push((id, id + k, spacing));
                }
            }
        }
        Self::new(&nodes, &edges)
    }

    pub fn from_file(file: &GraphFile) -> Result<Self, RoadnetError> {
        let nodes: Vec<(NodeId, Point)> = file
            .nodes
            .iter()
            .map(|&(id, x, y)| (id, Point::new(x, y)))
            .collect();
        Self::new(&nodes, &file.edges)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RoadnetError> {
        let text = fs::read_to_string(path)?;
        let file: GraphFile = serde_json::from_str(&text)?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            nodes: self
                .coords
                .iter()
                .enumerate()
                .map(|(i, p)| (i, p.x, p.y))
                .collect(),
            edges: self.edges.clone(),
        }
    }

    fn check_connected(&self) -> Result<(), RoadnetError> {
        let mut visited = vec![false; self.len()];
        let mut stack = vec![0];
        visited[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adjacency[u] {
                if !visited[v] {
                    visited[v] = true;
                    stack.push(v);
                }
            }
        }
        match visited.iter().position(|&v| !v) {
            Some(unreachable) => Err(RoadnetError::DisconnectedGraph { unreachable }),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId, f64)] {
        &self.edges
    }

    pub fn coord(&self, node: NodeId) -> Point {
        self.coords[node]
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn neighbors(&self, node: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[node]
    }

    /// Length of the edge `u–v`, if it exists.
    pub fn edge_length(&self, u: NodeId, v: NodeId) -> Option<f64> {
        self.adjacency[u]
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, len)| len)
    }

    /// Axis-aligned extent of the node coordinates as `(min, max)`.
    pub fn extent(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.coords {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Euclidean-nearest node; ties go to the smallest id.
    pub fn nearest_node(&self, point: Point) -> NodeId {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.coords.iter().enumerate() {
            let d = p.dist2(point);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Single-source shortest distances by Dijkstra's algorithm.
    pub fn dijkstra(&self, source: NodeId) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Entry(f64, NodeId);
        impl Eq for Entry {}
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> Ordering {
                other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
            }
        }
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let mut dist = vec![f64::INFINITY; self.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Entry(0.0, source));
        while let Some(Entry(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adjacency[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Entry(nd, v));
                }
            }
        }
        dist
    }
}

/// Dense all-pairs shortest distances and first hops.
#[derive(Debug, Clone)]
pub struct DistanceOracle {
    n: usize,
    dist: Vec<f64>,
    next: Vec<u32>,
}

impl DistanceOracle {
    /// Floyd–Warshall with next-hop tracking. Rows are relaxed in parallel for
    /// each pivot; row `k` is unchanged during pivot `k`, so the result does not
    /// depend on the schedule.
    pub fn floyd_warshall(graph: &RoadGraph) -> Self {
        let n = graph.len();
        let mut dist = vec![f64::INFINITY; n * n];
        let mut next = vec![u32::MAX; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
            next[i * n + i] = i as u32;
            for &(j, w) in graph.neighbors(i) {
                if w < dist[i * n + j] {
                    dist[i * n + j] = w;
                    next[i * n + j] = j as u32;
                }
            }
        }
        let mut pivot_row = vec![0.0; n];
        for k in 0..n {
            pivot_row.copy_from_slice(&dist[k * n..(k + 1) * n]);
            let pivot_row = &pivot_row;
            dist.par_chunks_mut(n)
                .zip(next.par_chunks_mut(n))
                .for_each(|(row, hop)| {
                    let d_ik = row[k];
                    if !d_ik.is_finite() {
                        return;
                    }
                    let hop_k = hop[k];
                    for j in 0..n {
                        let cand = d_ik + pivot_row[j];
                        if cand < row[j] {
                            row[j] = cand;
                            hop[j] = hop_k;
                        }
                    }
                });
        }
        Self { n, dist, next }
    }

    /// Oracle assembled from one Dijkstra run per source. Slower than
    /// Floyd–Warshall for dense queries but handy as an independent check.
    pub fn from_dijkstra(graph: &RoadGraph) -> Self {
        let n = graph.len();
        let mut dist = Vec::with_capacity(n * n);
        for s in 0..n {
            dist.extend(graph.dijkstra(s));
        }
        let mut next = vec![u32::MAX; n * n];
        for i in 0..n {
            next[i * n + i] = i as u32;
            for j in 0..n {
                if i == j {
                    continue;
                }
                // first neighbour lying on a shortest path, smallest id first
                let mut best: Option<(NodeId, f64)> = None;
                for &(v, w) in graph.neighbors(i) {
                    let slack = (w + dist[v * n + j] - dist[i * n + j]).abs();
                    if best.is_none_or(|(b, s)| slack < s || (slack == s && v < b)) {
                        best = Some((v, slack));
                    }
                }
                next[i * n + j] = best.map_or(u32::MAX, |(v, _)| v as u32);
            }
        }
        Self { n, dist, next }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, a: NodeId, b: NodeId) -> f64 {
        self.dist[a * self.n + b]
    }

    #[inline]
    pub fn next_hop(&self, a: NodeId, b: NodeId) -> NodeId {
        self.next[a * self.n + b] as NodeId
    }

    /// Node sequence `a, ..., b` following next hops.
    pub fn path(&self, a: NodeId, b: NodeId) -> Vec<NodeId> {
        let mut path = vec![a];
        let mut cur = a;
        while cur != b {
            cur = self.next_hop(cur, b);
            path.push(cur);
        }
        path
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }
}

/// Assignment of every node to its nearest generator (shortest-path metric).
#[derive(Debug, Clone, PartialEq)]
pub struct GraphVoronoi {
    generators: Vec<NodeId>,
    owner: Vec<NodeId>,
}

impl GraphVoronoi {
    pub fn generators(&self) -> &[NodeId] {
        &self.generators
    }

    /// Generator node owning `node`.
    pub fn owner(&self, node: NodeId) -> NodeId {
        self.owner[node]
    }

    pub fn owners(&self) -> &[NodeId] {
        &self.owner
    }

    /// Full (unlimited) cell of `generator`, ascending node ids.
    pub fn cell(&self, generator: NodeId) -> Vec<NodeId> {
        self.owner
            .iter()
            .enumerate()
            .filter(|&(_, &g)| g == generator)
            .map(|(q, _)| q)
            .collect()
    }
}

/// Graph Voronoi partition. Ties go to the generator with the smallest node id.
pub fn graph_voronoi(
    oracle: &DistanceOracle,
    generators: &[NodeId],
) -> Result<GraphVoronoi, RoadnetError> {
    if generators.is_empty() {
        return Err(RoadnetError::EmptyGeneratorSet);
    }
    let mut sorted = generators.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(RoadnetError::DuplicateGenerator(w[0]));
    }
    // ascending scan with strict `<` realizes the smallest-id tie rule
    let owner = (0..oracle.len())
        .into_par_iter()
        .map(|q| {
            let mut best = sorted[0];
            let mut best_d = oracle.dist(best, q);
            for &g in &sorted[1..] {
                let d = oracle.dist(g, q);
                if d < best_d {
                    best_d = d;
                    best = g;
                }
            }
            best
        })
        .collect();
    Ok(GraphVoronoi {
        generators: generators.to_vec(),
        owner,
    })
}

/// A graph Voronoi cell intersected with the radius-`r_g` shortest-path ball.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphCell {
    pub generator: NodeId,
    /// Ascending node ids.
    pub members: Vec<NodeId>,
}

pub fn r_limited_graph_cell(
    voronoi: &GraphVoronoi,
    oracle: &DistanceOracle,
    generator: NodeId,
    r_g: f64,
) -> Result<GraphCell, RoadnetError> {
    if !voronoi.generators.contains(&generator) {
        return Err(RoadnetError::UnknownGenerator(generator));
    }
    let members = voronoi
        .owner
        .iter()
        .enumerate()
        .filter(|&(q, &g)| g == generator && oracle.dist(generator, q) <= r_g)
        .map(|(q, _)| q)
        .collect();
    Ok(GraphCell { generator, members })
}

/// Mass-weighted squared-distance cost of serving `members` from `candidate`.
pub fn graph_coverage_cost(
    members: &[NodeId],
    mass: &[f64],
    oracle: &DistanceOracle,
    candidate: NodeId,
) -> f64 {
    members
        .iter()
        .map(|&p| {
            let d = oracle.dist(candidate, p);
            d * d * mass[p]
        })
        .sum()
}

/// Costs within this relative margin of the minimum count as tied.
pub const CENTROID_TIE_TOLERANCE: f64 = 1e-12;

/// Member minimizing the mass-weighted squared-distance sum over the cell;
/// ties go to the smallest node id.
pub fn graph_centroid(
    cell: &GraphCell,
    mass: &[f64],
    oracle: &DistanceOracle,
) -> Result<NodeId, RoadnetError> {
    let costs: Vec<(NodeId, f64)> = cell
        .members
        .iter()
        .map(|&q| (q, graph_coverage_cost(&cell.members, mass, oracle, q)))
        .collect();
    let min = costs.iter().map(|&(_, c)| c).fold(f64::INFINITY, f64::min);
    let cutoff = min + CENTROID_TIE_TOLERANCE * min.abs();
    costs
        .iter()
        .filter(|&&(_, c)| c <= cutoff)
        .map(|&(q, _)| q)
        .min()
        .ok_or(RoadnetError::EmptyCell)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(lengths: &[f64]) -> RoadGraph {
        let nodes: Vec<_> = (0..=lengths.len())
            .map(|i| (i, Point::new(i as f64, 0.0)))
            .collect();
        let edges: Vec<_> = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| (i, i + 1, l))
            .collect();
        RoadGraph::new(&nodes, &edges).unwrap()
    }

    #[test]
    fn minimal_graphs_validate() {
        let g = RoadGraph::new(
            &[(0, Point::new(0.0, 0.0)), (1, Point::new(5.0, 0.0))],
            &[(0, 1, 5.0)],
        )
        .unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(path_graph(&[1.0, 1.0]).len(), 3);
    }

    #[test]
    fn rejects_bad_inputs() {
        let nodes: Vec<_> = (0..4).map(|i| (i, Point::new(i as f64, 0.0))).collect();
        assert!(matches!(
            RoadGraph::new(&nodes, &[(0, 1, 1.0)]),
            Err(RoadnetError::DisconnectedGraph { .. })
        ));
        assert!(matches!(
            RoadGraph::new(&nodes[..2], &[(0, 1, 1.0), (1, 0, 2.0)]),
            Err(RoadnetError::DuplicateEdge { .. })
        ));
        assert!(matches!(
            RoadGraph::new(&nodes[..2], &[(0, 1, 0.0)]),
            Err(RoadnetError::NonPositiveLength { .. })
        ));
        assert!(matches!(
            RoadGraph::new(&[(0, Point::default()), (2, Point::default())], &[]),
            Err(RoadnetError::NonDenseIds { .. })
        ));
    }

    #[test]
    fn path_distances_and_hops() {
        let g = path_graph(&[3.0, 4.0]);
        let o = DistanceOracle::floyd_warshall(&g);
        assert_eq!(o.dist(0, 2), 7.0);
        assert_eq!(o.next_hop(0, 2), 1);
        for i in 0..3 {
            assert_eq!(o.dist(i, i), 0.0);
        }
        assert_eq!(o.path(2, 0), vec![2, 1, 0]);
    }

    #[test]
    fn triangle_prefers_two_short_edges() {
        let nodes: Vec<_> = (0..3).map(|i| (i, Point::new(i as f64, 0.0))).collect();
        let g = RoadGraph::new(&nodes, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)]).unwrap();
        let o = DistanceOracle::floyd_warshall(&g);
        assert_eq!(o.dist(0, 2), 2.0);
        assert_eq!(o.next_hop(0, 2), 1);
    }

    #[test]
    fn voronoi_tie_goes_to_smaller_generator() {
        let g = path_graph(&[1.0; 4]);
        let o = DistanceOracle::floyd_warshall(&g);
        let v = graph_voronoi(&o, &[4, 0]).unwrap();
        assert_eq!(v.cell(0), vec![0, 1, 2]);
        assert_eq!(v.cell(4), vec![3, 4]);

        let single = graph_voronoi(&o, &[3]).unwrap();
        assert!(single.owners().iter().all(|&g| g == 3));
        let all: Vec<_> = (0..5).collect();
        let every = graph_voronoi(&o, &all).unwrap();
        assert_eq!(every.owners(), &all[..]);

        assert!(matches!(
            graph_voronoi(&o, &[]),
            Err(RoadnetError::EmptyGeneratorSet)
        ));
        assert!(matches!(
            graph_voronoi(&o, &[1, 1]),
            Err(RoadnetError::DuplicateGenerator(1))
        ));
    }

    #[test]
    fn limited_cells() {
        let g = path_graph(&[1.0; 4]);
        let o = DistanceOracle::floyd_warshall(&g);
        let v = graph_voronoi(&o, &[0]).unwrap();
        assert_eq!(
            r_limited_graph_cell(&v, &o, 0, 2.0).unwrap().members,
            vec![0, 1, 2]
        );
        assert_eq!(
            r_limited_graph_cell(&v, &o, 0, 0.0).unwrap().members,
            vec![0]
        );
        assert_eq!(
            r_limited_graph_cell(&v, &o, 0, o.diameter())
                .unwrap()
                .members,
            vec![0, 1, 2, 3, 4]
        );
        assert!(r_limited_graph_cell(&v, &o, 3, 1.0).is_err());
    }

    #[test]
    fn centroid_of_small_paths() {
        let g = path_graph(&[1.0, 1.0]);
        let o = DistanceOracle::floyd_warshall(&g);
        let mass = [1.0 / 3.0; 3];
        let cell = GraphCell {
            generator: 0,
            members: vec![0, 1, 2],
        };
        let costs: Vec<f64> = (0..3)
            .map(|q| graph_coverage_cost(&cell.members, &mass, &o, q))
            .collect();
        assert!((costs[0] - 5.0 / 3.0).abs() < 1e-12);
        assert!((costs[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((costs[2] - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(graph_centroid(&cell, &mass, &o).unwrap(), 1);

        let single = GraphCell {
            generator: 2,
            members: vec![2],
        };
        assert_eq!(graph_centroid(&single, &mass, &o).unwrap(), 2);

        let pair = GraphCell {
            generator: 1,
            members: vec![0, 1],
        };
        assert_eq!(graph_centroid(&pair, &[0.5, 0.5, 0.0], &o).unwrap(), 0);

        let empty = GraphCell {
            generator: 0,
            members: vec![],
        };
        assert!(matches!(
            graph_centroid(&empty, &mass, &o),
            Err(RoadnetError::EmptyCell)
        ));
    }

    #[test]
    fn nearest_node_rules() {
        let nodes = [
            (0, Point::new(0.0, 0.0)),
            (1, Point::new(10.0, 0.0)),
            (2, Point::new(0.0, 10.0)),
        ];
        let g = RoadGraph::new(&nodes, &[(0, 1, 10.0), (0, 2, 10.0)]).unwrap();
        assert_eq!(g.nearest_node(Point::new(1.0, 2.0)), 0);
        assert_eq!(g.nearest_node(Point::new(10.0, 0.0)), 1);
        // equidistant from 1 and 2
        assert_eq!(g.nearest_node(Point::new(10.0, 10.0)), 1);
    }

    #[test]
    fn grid_counts_and_round_trip() {
        let g = RoadGraph::grid(2, 100.0).unwrap();
        assert_eq!((g.len(), g.edge_count()), (4, 4));
        assert!(g.edges().iter().all(|e| e.2 == 100.0));
        let g = RoadGraph::grid(20, 250.0).unwrap();
        assert_eq!((g.len(), g.edge_count()), (400, 760));
        let text = serde_json::to_string(&g.to_file()).unwrap();
        let back = RoadGraph::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.len(), 400);
        assert_eq!(back.edges(), g.edges());
    }
}
