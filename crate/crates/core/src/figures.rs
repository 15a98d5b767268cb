//! Data behind the forbidden-region plot and the qubit coherence example.

use serde::Serialize;

use crate::bounds::{forbidden_region, tradeoff_formula, BoundOptions, RegionTable};
use crate::error::{Error, Result};
use crate::free_models::incoherent_polytope;
use crate::linalg::QuantumState;
use crate::monotones::free_overlap;
use crate::verifier::{run_campaign, CampaignConfig, CampaignReport, Theory};

/// The qubit coherence instance: ρ = 0.8|+⟩⟨+| + 0.2·I/2 and a target at
/// Bloch polar angle 0.9π, close to |1⟩.
pub fn coherence_instance() -> (QuantumState, QuantumState) {
    let rho = QuantumState::plus().depolarized(0.2);
    let psi = QuantumState::bloch_pure(0.9 * std::f64::consts::PI, 0.0);
    (rho, psi)
}

/// (x, y, z) with ρ = (I + x X + y Y + z Z)/2.
pub fn bloch_vector(rho: &QuantumState) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("Bloch vector of a dim-{} state", rho.dim())));
    }
    let m = rho.matrix();
    Ok([2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, m[(0, 0)].re - m[(1, 1)].re])
}

pub struct Fig1Data {
    pub region: RegionTable,
    pub campaign: Option<CampaignReport>,
}

/// Forbidden-region curve on `p_grid`, plus a campaign frontier when
/// `samples > 0`.
pub fn fig1_data(p_grid: &[f64], samples: usize, seed: u64, opts: &BoundOptions) -> Result<Fig1Data> {
    let (rho, psi) = coherence_instance();
    let theory = Theory::coherence(2)?;
    let region = forbidden_region(&rho, theory.free(), &psi, p_grid, opts)?;
    let campaign = if samples > 0 {
        let mut cfg = CampaignConfig::new(theory, rho, psi, samples, seed);
        cfg.tol = opts.tol;
        cfg.rdc = opts.rdc;
        Some(run_campaign(&cfg)?)
    } else {
        None
    };
    Ok(Fig1Data { region, campaign })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig2Row {
    pub theta: f64,
    pub f_psi: f64,
    /// λ_min(ρ)(1 − f_ψ), or 0 when the target is free.
    pub eps_lower: f64,
    pub eps_over_p_lower: f64,
    pub vacuous: bool,
    pub target_bloch: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig2Data {
    pub rho_bloch: [f64; 3],
    /// End points of the incoherent (z) axis.
    pub incoherent_axis: [[f64; 3]; 2],
    pub lambda_min: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub rows: Vec<Fig2Row>,
}

impl Fig2Data {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,f_psi,eps_lower\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r.theta, r.f_psi, r.eps_lower));
        }
        s
    }
}

/// Bound values for targets cos(θ/2)|0⟩ + sin(θ/2)|1⟩ against the instance ρ.
pub fn fig2_data(thetas: &[f64], opts: &BoundOptions) -> Result<Fig2Data> {
    let (rho, _) = coherence_instance();
    let free = incoherent_polytope(2)?;
    let lambda_min = rho.min_eigenvalue();
    let cert = crate::monotones::robustness_generalized(&rho, &free, opts.tol.rob)?;
    let r_hi = if opts.rdc { 0.0 } else { cert.hi };
    let mut rows = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let psi = QuantumState::bloch_pure(theta, 0.0);
        let f = free_overlap(&psi, &free)?.value;
        let vacuous = f >= 1.0 - crate::bounds::FREE_TARGET_TOL;
        let (eps_lower, eps_over_p_lower) = if vacuous {
            (0.0, 0.0)
        } else {
            (lambda_min * (1.0 - f), tradeoff_formula(lambda_min, f, r_hi))
        };
        rows.push(Fig2Row {
            theta,
            f_psi: f,
            eps_lower,
            eps_over_p_lower,
            vacuous,
            target_bloch: bloch_vector(&psi)?,
        });
    }
    Ok(Fig2Data {
        rho_bloch: bloch_vector(&rho)?,
        incoherent_axis: [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]],
        lambda_min,
        r_lo: cert.lo,
        r_hi: cert.hi,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_pi_row_is_vacuous() {
        let d = fig2_data(&[0.5 * std::f64::consts::PI, std::f64::consts::PI], &BoundOptions::default()).unwrap();
        assert!(!d.rows[0].vacuous);
        assert!(d.rows[1].vacuous && d.rows[1].eps_lower == 0.0);
        assert!(d.to_csv().starts_with("theta,f_psi,eps_lower\n"));
    }

    #[test]
    fn bloch_of_instance() {
        let (rho, _) = coherence_instance();
        let b = bloch_vector(&rho).unwrap();
        assert!((b[0] - 0.8).abs() < 1e-15 && b[1].abs() < 1e-15 && b[2].abs() < 1e-15);
    }
}
