//! Constructive machinery for routing spanning structures through sparse
//! pseudorandom graphs.
//!
//! The crate is organized bottom-up:
//!
//! - [`graph`]: undirected simple graphs, paths, path factors, matchings, and
//!   mutable subgraphs with degree bookkeeping.
//! - [`spectral`]: second-eigenvalue computation (dense and iterative) and the
//!   audits that certify a host graph is pseudorandom enough to route through:
//!   the mixing inequality, joinedness, and small-set expansion.
//! - [`network`]: parallel comparison networks — simulation, sorting
//!   verification, and two concrete builders (odd-even mergesort, brickwall)
//!   behind a provider seam.
//! - [`gadget`]: the comparison gadget — a bounded-degree graph with four
//!   terminals that rewires two incoming lines to two outgoing lines in either
//!   crossed or parallel fashion, plus its constructibility certificate.
//! - [`template`]: the routing template — a network of gadgets glued along a
//!   comparison network, able to realize any bijection between its two
//!   terminal rows as a family of disjoint equal-length paths.
//! - [`matching`]: bipartite perfect matching with Hall-violator certificates.
//! - [`extend`]: the extendability engine — growing a bounded-degree subgraph
//!   of a host by leaf extensions, rollbacks, and exact-length connections
//!   while preserving a neighborhood-expansion invariant.
//! - [`gen`]: seeded generators for regular host graphs and bounded-degree
//!   target trees.
//! - [`pipeline`]: the end-to-end spanning-tree embedding (reserve, template,
//!   bulk tree, connectors, chains, route) and the cycle-factor application.

pub mod extend;
pub mod gadget;
pub mod gen;
pub mod graph;
pub mod matching;
pub mod network;
pub mod pipeline;
pub mod spectral;
pub mod template;

pub use graph::{Graph, Matching, Path, PathFactor, Subgraph};
