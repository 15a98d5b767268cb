//! Hypothesis-testing quantities: β_ε, D_H^ε and D_min.
//!
//! The optimal test is sought in Neyman–Pearson form. For a threshold t ≥ 0
//! let P₊(t) project onto the positive eigenspace of ρ − tσ. The type-I
//! constraint tr(ρP₊(t)) is nonincreasing in t, so bisection brackets the
//! threshold t* where it crosses 1 − ε; the returned test interpolates
//! between the projectors on either side of t* so that the constraint holds
//! with equality. Every threshold t > 0 also yields the Lagrangian lower bound
//!
//! ```text
//!     β_ε ≥ ((1 − ε) − tr(ρ − tσ)₊) / t,
//! ```
//!
//! which is reported alongside the test value as a certificate.

use crate::error::{Error, Result};
use crate::linalg::eigen::eigh;
use crate::linalg::{CMatrix, HermitianMatrix, QuantumState};

const MAX_BISECTIONS: usize = 200;
/// A threshold counts as feasible only when it clears the type-I constraint
/// by this margin. Erring on the infeasible side keeps t_lo at an exactly
/// feasible point; the κ-interpolation recovers the equality afterwards.
const FEASIBILITY_MARGIN: f64 = 1e-15;

/// A two-outcome test 0 ⪯ M ⪯ I with its error probabilities.
#[derive(Clone, Debug)]
pub struct HypothesisTest {
    pub operator: HermitianMatrix,
    /// 1 − tr(ρM)
    pub type_one_error: f64,
    /// tr(σM)
    pub type_two_error: f64,
}

#[derive(Clone, Debug)]
pub struct BetaResult {
    /// tr(σM) for the returned feasible test: an upper bound on β_ε.
    pub beta: f64,
    /// Certified lower bound on β_ε from the Lagrangian dual.
    pub lower: f64,
    /// Neyman–Pearson threshold t*.
    pub threshold: f64,
    pub test: HypothesisTest,
}

struct Split {
    projector: CMatrix,
    rho_mass: f64,
    positive_part_trace: f64,
}

fn split(rho: &CMatrix, sigma: &CMatrix, t: f64) -> Split {
    let mut diff = rho.clone();
    diff.axpy(-t, sigma);
    let e = eigh(&diff);
    let scale = 1.0 + t;
    let cut = 1e-14 * scale;
    let projector = e.spectral_projector(|l| l > cut);
    let positive_part_trace = e.eigenvalues.iter().filter(|&&l| l > 0.0).sum();
    Split {
        rho_mass: projector.real_inner(rho),
        projector,
        positive_part_trace,
    }
}

fn check_pair(rho: &QuantumState, sigma: &QuantumState) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "hypothesis test between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps) || eps.is_nan() {
        return Err(Error::BadEpsilon(eps));
    }
    Ok(())
}

const BETA_NOISE_FLOOR: f64 = 1e-15;

/// β_ε(ρ‖σ) = min { tr(Mσ) : tr(ρM) ≥ 1 − ε, 0 ⪯ M ⪯ I }.
pub fn beta_eps(rho: &QuantumState, sigma: &QuantumState, eps: f64) -> Result<BetaResult> {
    check_pair(rho, sigma)?;
    check_eps(eps)?;
    let r = rho.matrix();
    let s = sigma.matrix();
    let target = 1.0 - eps;
    let feasible = |sp: &Split| sp.rho_mass >= target + FEASIBILITY_MARGIN;

    let lower_at = |t: f64, sp: &Split| -> f64 {
        if t > 0.0 {
            (target - sp.positive_part_trace) / t
        } else {
            0.0
        }
    };

    let mut t_lo = 0.0;
    let mut lo = split(r, s, t_lo);
    // P₊(0) is the support of ρ, feasible for every ε.
    lo.rho_mass = lo.rho_mass.max(target);

    let se = sigma.eig();
    let sigma_min_pos = se
        .eigenvalues
        .iter()
        .copied()
        .filter(|&l| l > 1e-12)
        .fold(f64::INFINITY, f64::min);
    let rho_max = rho.eig().max();
    let mut t_hi = if sigma_min_pos.is_finite() {
        rho_max / sigma_min_pos + 1.0
    } else {
        1.0
    };
    let mut hi = split(r, s, t_hi);
    let mut expansions = 0;
    while feasible(&hi) && expansions < 60 {
        t_lo = t_hi;
        lo = hi;
        t_hi *= 2.0;
        hi = split(r, s, t_hi);
        expansions += 1;
    }
    let mut best_lower = lower_at(t_lo, &lo).max(lower_at(t_hi, &hi)).max(0.0);

    if feasible(&hi) {
        // σ has (almost) no weight where ρ lives: the kernel-side projector wins.
        return Ok(finish(r, s, eps, t_hi, &hi.projector, best_lower));
    }

    for _ in 0..MAX_BISECTIONS {
        if t_hi - t_lo <= 4.0 * f64::EPSILON * t_hi.max(1e-300) {
            break;
        }
        let t_mid = 0.5 * (t_lo + t_hi);
        let mid = split(r, s, t_mid);
        best_lower = best_lower.max(lower_at(t_mid, &mid));
        if feasible(&mid) {
            t_lo = t_mid;
            lo = mid;
        } else {
            t_hi = t_mid;
            hi = mid;
        }
    }

    let denom = lo.rho_mass - hi.rho_mass;
    let kappa = if denom > 1e-300 {
        ((target - hi.rho_mass) / denom).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let mut m = hi.projector.scale(1.0 - kappa);
    m.axpy(kappa, &lo.projector);
    Ok(finish(r, s, eps, 0.5 * (t_lo + t_hi), &m, best_lower))
}

fn finish(r: &CMatrix, s: &CMatrix, eps: f64, t: f64, m: &CMatrix, lower: f64) -> BetaResult {
    // Below the rounding floor of a trace of O(1) matrices β is reported as
    // exactly 0, so D_H does not jump between ∞ and ~50 bits on noise.
    let raw = m.real_inner(s);
    let beta = if raw <= BETA_NOISE_FLOOR { 0.0 } else { raw };
    let type_one = 1.0 - m.real_inner(r);
    debug_assert!(type_one <= eps + 1e-9, "test violates type-I constraint");
    BetaResult {
        beta,
        lower: lower.min(beta),
        threshold: t,
        test: HypothesisTest {
            operator: HermitianMatrix::from_hermitian_unchecked(m.clone()),
            type_one_error: type_one,
            type_two_error: beta,
        },
    }
}

/// D_H^ε(ρ‖σ) = −log₂ β_ε(ρ‖σ).
pub fn d_h(rho: &QuantumState, sigma: &QuantumState, eps: f64) -> Result<f64> {
    let b = beta_eps(rho, sigma, eps)?;
    Ok(neg_log2(b.beta))
}

pub(crate) fn neg_log2(x: f64) -> f64 {
    if x <= 0.0 {
        f64::INFINITY
    } else {
        (-x.log2()).max(0.0)
    }
}

/// Threshold separating the support of ρ from its kernel in D_min.
pub const SUPPORT_TOL: f64 = 1e-9;

/// D_min(ρ‖σ) = −log₂ tr(Π_ρ σ), Π_ρ the support projector of ρ.
pub fn d_min(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    check_pair(rho, sigma)?;
    Ok(d_min_matrices(rho.matrix(), sigma.matrix()))
}

pub(crate) fn d_min_matrices(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let support = eigh(rho).spectral_projector(|l| l > SUPPORT_TOL);
    let overlap = support.real_inner(sigma);
    if overlap <= 1e-12 {
        f64::INFINITY
    } else {
        neg_log2(overlap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;

    fn diag(p: &[f64]) -> QuantumState {
        QuantumState::validate(CMatrix::from_real_diagonal(p)).unwrap()
    }

    #[test]
    fn beta_of_identical_states() {
        let rho = QuantumState::plus().depolarized(0.3);
        for eps in [0.0, 0.1, 0.5] {
            let b = beta_eps(&rho, &rho, eps).unwrap();
            assert!((b.beta - (1.0 - eps)).abs() < 1e-9, "eps {eps}: {}", b.beta);
            assert!(b.lower <= b.beta + 1e-12);
        }
    }

    #[test]
    fn beta_zero_for_full_rank_is_one() {
        let rho = diag(&[0.3, 0.7]);
        let sigma = QuantumState::basis(2, 0);
        let b = beta_eps(&rho, &sigma, 0.0).unwrap();
        assert!((b.beta - 1.0).abs() < 1e-9);
        assert!(d_h(&rho, &sigma, 0.0).unwrap().abs() < 1e-9);
    }

    #[test]
    fn classical_knapsack_small_case() {
        // ρ = (0.5, 0.3, 0.2), σ = (0.2, 0.3, 0.5), ε = 0.3: take outcome 0
        // fully (0.5 of ρ mass) and 2/3 of outcome 1: β = 0.2 + 0.2 = 0.4.
        let b = beta_eps(&diag(&[0.5, 0.3, 0.2]), &diag(&[0.2, 0.3, 0.5]), 0.3).unwrap();
        assert!((b.beta - 0.4).abs() < 1e-12, "{}", b.beta);
        assert!((b.lower - 0.4).abs() < 1e-9);
    }

    #[test]
    fn bad_epsilon() {
        let rho = QuantumState::maximally_mixed(2);
        assert!(matches!(beta_eps(&rho, &rho, 1.0), Err(Error::BadEpsilon(_))));
        assert!(matches!(beta_eps(&rho, &rho, -0.1), Err(Error::BadEpsilon(_))));
    }

    #[test]
    fn d_min_examples() {
        let zero = QuantumState::basis(2, 0);
        let one = QuantumState::basis(2, 1);
        let mixed = QuantumState::maximally_mixed(2);
        assert!(d_min(&mixed, &mixed).unwrap().abs() < 1e-12);
        assert!((d_min(&zero, &mixed).unwrap() - 1.0).abs() < 1e-12);
        assert!(d_min(&zero, &one).unwrap().is_infinite());
    }

    #[test]
    fn pure_rho_with_eps_zero_matches_d_min() {
        let zero = QuantumState::basis(2, 0);
        let sigma = QuantumState::plus().depolarized(0.5);
        let b = beta_eps(&zero, &sigma, 0.0).unwrap();
        let dm = d_min(&zero, &sigma).unwrap();
        assert!((neg_log2(b.beta) - dm).abs() < 1e-8, "{} {} {}", b.beta, dm, b.threshold);
    }
}
