//! QUBO solver library and benchmarking harness.
//!
//! Minimizes `y = sum_{i<=j} Q_ij x_i x_j` over binary vectors `x`. The crate
//! provides:
//!
//! - a canonical upper-triangular [`QuboMatrix`] with dense and sparse storage
//!   and an incremental-flip [`EnergyState`] (O(1) flip deltas via cached
//!   local fields),
//! - instance generators: dense Gaussian random matrices and Max-Cut
//!   reductions of G-set graphs,
//! - five classical solvers behind one contract: exhaustive search (`bf`),
//!   simulated annealing (`sa`), steepest descent (`sd`), tabu search (`ts`)
//!   and parallel tempering with isoenergetic cluster moves (`pticm`),
//! - a QBSolv-style decomposition meta-solver (`qbsolv-like:<inner>`),
//! - a benchmarking harness with solve-only timing, relative-accuracy
//!   metrics and CSV/JSON/markdown/SVG reports.
//!
//! Everything downstream of a seed is deterministic; see [`rng`] for the
//! frozen generator and stream-derivation scheme.

pub mod decompose;
pub mod dispatch;
pub mod error;
pub mod generate;
pub mod gset;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod rng;
pub mod solvers;
pub mod state;

pub use error::{Error, Result};
pub use matrix::{BitVector, QuboBuilder, QuboMatrix, StorageKind};
pub use state::EnergyState;
