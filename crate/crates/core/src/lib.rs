//! Coverage-control rebalancing for autonomous mobility-on-demand fleets.
//!
//! The crate is split along the lines of the simulator pipeline:
//!
//! * [`roadnet`] road graph, all-pairs shortest paths, graph Voronoi cells and graph centroids
//! * [`plane`] rasterized demand field, planar Voronoi cells, centroids and polar moments
//! * [`demand`] node-level demand masses, O-D imbalance synthesis and Poisson request streams
//! * [`rebalance`] idle-vehicle controllers (CVR, CVR-graph, CVR-α, CVR-PI, LP, do-nothing)
//! * [`sim`] the discrete-time fleet simulator and its metrics
//! * [`scenario`] the JSON scenario schema and the glue that turns it into a runnable world
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod demand;
pub mod plane;
pub mod rebalance;
pub mod roadnet;
pub mod scenario;
pub mod sim;
pub mod stats;

pub use roadnet::{NodeId, Point};
