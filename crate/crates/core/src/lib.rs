//! Joint inference on a pair of graphs that share a vertex set.
//!
//! The crate covers the numerical side of the pipeline: binarized graph
//! types and preprocessing, an exact linear assignment solver, seeded graph
//! matching by Frank-Wolfe over the doubly stochastic polytope, omnibus and
//! adjacency spectral embedding, nearest-neighbour / RBF-SVM vertex
//! classification with leave-one-out validation, and a correlated stochastic
//! block model generator.
//!
//! Everything here is `no_std` and only needs `alloc`. File formats, the
//! experiment harness and the command line live in the `jointgraph` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod classify;
pub mod eigen;
pub mod embed;
mod error;
pub mod graph;
pub mod lap;
pub mod matrix;
pub mod sgm;
pub mod stats;
pub mod svm;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{GraphPair, SimpleGraph, VertexTable, WeightedDigraph};
pub use matrix::Matrix;
