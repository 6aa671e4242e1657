//! Laboratory for the discretized time-harmonic Maxwell scattering problem.
//!
//! The pipeline is mesh → edge-element assembly → complex or split real
//! system → solver strategy. Strategies (direct LU, block low-rank LU, plain
//! GMRES, sparse approximate inverse, restricted additive Schwarz and the
//! Hiptmair-Xu block preconditioner) share one trait and are looked up by
//! name in a [`strategy::StrategyRegistry`].

pub mod bench;
pub mod error;
pub mod fem;
pub mod krylov;
pub mod mesh;
pub mod precond;
pub mod strategy;
pub mod systems;

pub use error::{Error, Result};
pub use maxlab_sparse as sparse;
pub use maxlab_sparse::Complex64;
