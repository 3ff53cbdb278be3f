//! Single-layer graph computations.
//!
//! Flow layers (trade, FDI) are symmetrized as `(W + Wᵀ)/2` when a
//! [`LayerMatrix`] is built, so every centrality and spanning tree in this
//! crate is computed on an undirected graph.

mod bands;
mod centrality;
pub mod export;
mod layer;
mod mst;

pub use bands::{bands_of, tercile_bands, Band};
pub use centrality::{
    apply_normalization, eigenvector_centrality, eigenvector_centrality_with, linked_nodes,
    CentralityVector, Normalization, PowerIteration,
};
pub use layer::{
    correlation_distance, distance_from_correlation, DistanceMatrix, LayerKind, LayerMatrix,
};
pub use mst::{minimum_spanning_tree, spanning_tree_of, Edge, SpanningTree};
