//! Exact full counting statistics for non-interacting identical particles
//! scattered by a multi-channel unitary scatterer.
//!
//! The pipeline is:
//!
//! 1. [`config`] describes channels, incoming wave-packet modes and an
//!    energy-resolved S-matrix from [`physics`].
//! 2. [`overlap`] integrates the input overlap matrix Î and the outgoing
//!    overlap matrices Q̂(m) for every exit channel.
//! 3. [`counting`] turns those matrices into outcome probabilities for
//!    bosons (permanents), fermions (determinants) and distinguishable
//!    particles, and audits the bunching inequalities.

pub mod config;
pub mod counting;
pub mod error;
pub mod linalg;
pub mod overlap;
pub mod physics;
pub mod quadrature;

pub use config::{ConfigFile, ExperimentConfig};
pub use counting::{CountingDistribution, InequalityReport};
pub use error::{FcsError, Result};
pub use linalg::{ComplexMatrix, StatisticsKind};
pub use overlap::{OverlapSet, QuadratureSettings};
pub use physics::{ChannelSpec, ScattererModel, WavePacketMode};
