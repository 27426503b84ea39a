//! Straight-line embeddings of free trees on point sets inside simple
//! polygons.
//!
//! - [`geometry`]: exact integer predicates.
//! - [`model`]: trees, point sets, instances, embeddings and their files.
//! - [`reduction`]: 3-partition to embedding instance generator and oracle.
//! - [`verifier`]: polynomial-time embedding checker.
//! - [`solver`]: exact backtracking solver and unconstrained embedder.
//! - [`cli`]: the `polyembed` command line.

pub mod cli;
pub mod geometry;
pub mod model;
pub mod reduction;
pub mod render;
pub mod solver;
pub mod verifier;

pub use geometry::{Point, Segment, SimplePolygon};
pub use model::{Embedding, EmbeddingInstance, FreeTree, PointSet};
pub use reduction::{Partition, ReductionMeta, ThreePartitionInstance};
pub use solver::{decide_embedding, SolveOutcome, SolverConfig};
pub use verifier::{verify_embedding, verify_planar_only, VerificationReport};
