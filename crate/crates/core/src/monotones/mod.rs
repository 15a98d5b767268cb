//! Resource measures with certificates.

pub mod free_dh;
pub mod hypothesis;
pub mod overlap;
pub mod robustness;

pub use free_dh::{min_free_dh, min_free_dh_with, FreeDhOptions, FreeDhResult};
pub use hypothesis::{beta_eps, d_h, d_min, BetaResult, HypothesisTest};
pub use overlap::{free_overlap, FreeOverlap};
pub use robustness::{
    robustness_generalized, robustness_generalized_with, robustness_standard, PrimalDecomposition,
    RobustnessCertificate, RobustnessOptions,
};
