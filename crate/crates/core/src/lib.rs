//! Numerics for one-shot resource monotones, purification no-go bounds and
//! a Monte-Carlo harness that searches free protocols for counterexamples.

pub mod bounds;
pub mod channels;
pub mod error;
pub mod figures;
pub mod free_models;
pub mod io;
pub mod linalg;
pub mod monotones;
pub mod optim;
pub mod random;
pub mod verifier;

pub use error::{Error, Result};
pub use free_models::{incoherent_polytope, stabilizer_polytope, FreeStatePolytope};
pub use linalg::{CMatrix, HermitianMatrix, QuantumState, Tolerances, C64};
