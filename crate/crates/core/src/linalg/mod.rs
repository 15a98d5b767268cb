//! Dense complex linear algebra and quantum-state primitives.

pub mod eigen;
pub mod matrix;
pub mod state;

pub use eigen::{eigh, EigenDecomposition};
pub use matrix::{CMatrix, C64};
pub use state::{
    eig_hermitian, fidelity, kron, min_eigenvalue, partial_trace, partial_trace_matrix,
    validate_state, HermitianMatrix, QuantumState, Tolerances,
};
