//! Sampling, exact enumeration and bound evaluation for d-dependent random
//! graphs: distributions over graphs on `n` vertices in which every edge is
//! present with probability `p` and each edge is independent of all but at
//! most `d` others.

pub mod audit;
pub mod bounds;
pub mod clique;
pub mod dependency;
pub mod error;
pub mod graph;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod pattern;
pub mod predicate;
pub mod probability;
pub mod seed;
pub mod stats;

pub use clique::clique_number;
pub use dependency::DependencySpec;
pub use error::{Error, Result};
pub use graph::{edge_index, EdgeIndex, Graph, VertexSet};
pub use model::{DistributionModel, ModelDescriptor, ModelKind};
pub use pattern::{contains_subgraph, SubgraphPattern};
pub use predicate::{Predicate, Statistic};
pub use probability::Probability;
