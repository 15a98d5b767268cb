//! Optimization kernels: a dense simplex LP solver and Frank–Wolfe helpers.

pub mod frank_wolfe;
pub mod simplex;

pub use simplex::{LinearProgram, LpSolution, Relation};
