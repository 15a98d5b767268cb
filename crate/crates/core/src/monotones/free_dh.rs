//! min over free ω of D_H^ε(ρ‖ω).
//!
//! ω ↦ β_ε(ρ‖ω) is a pointwise minimum of linear functions of ω, hence
//! concave, and tr(M* ·) at an optimal test M* is a supergradient. Each
//! evaluation gives an upper bound on the minimum of D_H (through the
//! certified lower bound on β), while max_i tr(M* v_i) bounds max β from
//! above, giving the lower end of the interval.

use crate::error::{Error, Result};
use crate::free_models::FreeStatePolytope;
use crate::linalg::QuantumState;
use crate::optim::frank_wolfe::open_loop_step;

use super::hypothesis::{beta_eps, neg_log2};

#[derive(Clone, Copy, Debug)]
pub struct FreeDhOptions {
    pub max_iter: usize,
    /// Stop when the duality gap on β falls below this.
    pub gap_tol: f64,
    /// Width of the D_H interval accepted without error at the iteration cap.
    pub interval_tol: f64,
}

impl Default for FreeDhOptions {
    fn default() -> Self {
        FreeDhOptions {
            max_iter: 50_000,
            gap_tol: 1e-8,
            interval_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FreeDhResult {
    pub lo: f64,
    pub hi: f64,
    /// Vertex weights of the best ω found.
    pub omega_weights: Vec<f64>,
    pub iterations: usize,
}

pub fn min_free_dh(rho: &QuantumState, free: &FreeStatePolytope, eps: f64) -> Result<FreeDhResult> {
    min_free_dh_with(rho, free, eps, FreeDhOptions::default())
}

pub fn min_free_dh_with(
    rho: &QuantumState,
    free: &FreeStatePolytope,
    eps: f64,
    opts: FreeDhOptions,
) -> Result<FreeDhResult> {
    if rho.dim() != free.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {} vs free set of dim {}",
            rho.dim(),
            free.dim()
        )));
    }
    let n = free.len();
    let mut weights = vec![1.0 / n as f64; n];
    let mut best_beta_lower = 0.0_f64;
    let mut best_weights = weights.clone();
    let mut beta_upper = f64::INFINITY;
    let mut iterations = 0;

    for k in 0..opts.max_iter.max(1) {
        iterations = k + 1;
        let omega = QuantumState::from_matrix_unchecked(free.combine(&weights));
        let res = beta_eps(rho, &omega, eps)?;
        if res.lower > best_beta_lower {
            best_beta_lower = res.lower;
            best_weights = weights.clone();
        }
        let m = res.test.operator.matrix();
        let grads: Vec<f64> = free.vertices().iter().map(|v| m.real_inner(v.matrix())).collect();
        let (s, g_max) = grads
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
        beta_upper = beta_upper.min(g_max);
        if beta_upper - best_beta_lower <= opts.gap_tol {
            break;
        }
        let gamma = open_loop_step(k);
        for w in weights.iter_mut() {
            *w *= 1.0 - gamma;
        }
        weights[s] += gamma;
    }

    let lo = neg_log2(beta_upper.min(1.0));
    let hi = neg_log2(best_beta_lower);
    let converged = beta_upper - best_beta_lower <= opts.gap_tol || hi - lo <= opts.interval_tol;
    if !converged {
        return Err(Error::ConvergenceFailure { lo, hi });
    }
    Ok(FreeDhResult {
        lo,
        hi: hi.max(lo),
        omega_weights: best_weights,
        iterations,
    })
}
