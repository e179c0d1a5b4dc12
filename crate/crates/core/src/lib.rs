//! Max k-Cut SDP clustering toolkit.
//!
//! The pipeline: build a pairwise weight matrix from points (or take one
//! directly), solve the Max k-Cut semidefinite relaxation over the k-way
//! elliptope with a first-order solver ([`sdp`]), then round the relaxation
//! optimum to a partition either deterministically — fixed point iteration
//! of the shifted linear-optimization map `T'`, which converges to the
//! body's vertices, the k-partition matrices — or by randomized assignment
//! to k random directions ([`rounding`]). [`cluster`] wires these into
//! end-to-end pipelines next to a k-means baseline and Rand-index
//! evaluation; [`data`] covers generators and file formats.
//!
//! Everything randomized draws from named substreams of a master seed
//! ([`rng`]), so results are reproducible bit-for-bit.

pub mod cluster;
pub mod data;
pub mod elliptope;
mod error;
mod linalg;
pub mod matrix;
pub mod partition;
pub mod rng;
pub mod rounding;
pub mod sdp;
pub mod simplex;

pub use error::{Error, Result};
pub use matrix::SymMatrix;
pub use partition::{cut_weight, Partition};
