//! Simulation and decoding toolkit for single-shot surface-code decoding and
//! cluster-state long-range entanglement generation under Pauli noise.
//!
//! The combinatorial engines in [`protocols`] evaluate Bell labels directly
//! from sampled errors; [`oracle`] re-derives them by exact stabilizer
//! simulation on small instances.

pub mod cli;
pub mod converse;
pub mod error;
pub mod geometry;
pub mod graphs;
pub mod matching;
pub mod noise;
pub mod oracle;
pub mod protocols;
pub mod resilience;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{LatticeKind, LatticeParams, Site};
pub use graphs::{BoundaryGraph, EdgeSet, VertexSet};
pub use noise::{NoiseModel, PauliError};
pub use protocols::{Context, Decoder, Outcome, TrialStats};
