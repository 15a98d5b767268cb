//! Standard and generalized robustness against a vertex-enumerated free set.
//!
//! The generalized robustness
//!
//! ```text
//!     1 + R(ρ) = min { Σ y_i : Σ y_i v_i ⪰ ρ, y ≥ 0 }
//!              = max { tr(Wρ) : W ⪰ 0, tr(W v_i) ≤ 1 ∀i }
//! ```
//!
//! is solved by a cutting-plane method on the dual. W is restricted to the
//! cone generated by a growing set of rank-one directions u_k u_k†, which
//! turns the dual into an LP in the cone weights. Any such W, rescaled to
//! satisfy every vertex constraint, certifies a lower bound. The LP duals y
//! give an upper bound once Σ y_i v_i − ρ is repaired into the PSD cone by
//! adding a multiple of the barycenter. Negative eigenvectors of that
//! residual are added as new directions until the interval closes.

use crate::error::{Error, Result};
use crate::free_models::FreeStatePolytope;
use crate::linalg::eigen::eigh;
use crate::linalg::matrix::{normalize, CMatrix, C64};
use crate::linalg::QuantumState;
use crate::optim::{LinearProgram, Relation};

use std::f64::consts::FRAC_1_SQRT_2;

/// Decomposition ρ = (1 + s)ω − sσ with ω ∈ conv(F).
#[derive(Clone, Debug)]
pub struct PrimalDecomposition {
    pub s: f64,
    /// Vertex weights of ω.
    pub omega_weights: Vec<f64>,
    pub omega: CMatrix,
    /// The mixing state σ; `None` when s = 0.
    pub sigma: Option<CMatrix>,
    /// Vertex weights of σ when σ is itself free (standard robustness).
    pub sigma_weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct RobustnessCertificate {
    pub lo: f64,
    pub hi: f64,
    pub primal: PrimalDecomposition,
    /// W ⪰ 0 with tr(W v) ≤ 1 on every vertex; tr(Wρ) − 1 = lo.
    pub witness: Option<CMatrix>,
    pub iterations: usize,
}

impl RobustnessCertificate {
    pub fn gap(&self) -> f64 {
        self.hi - self.lo
    }
}

fn check_dims(rho: &QuantumState, free: &FreeStatePolytope) -> Result<()> {
    if rho.dim() != free.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {} vs free set of dim {}",
            rho.dim(),
            free.dim()
        )));
    }
    Ok(())
}

/// min s with ρ = (1+s)ω − sσ and both ω, σ ∈ conv(F), as an LP in the
/// unnormalized weights a = (1+s)·ω-weights and b = s·σ-weights.
pub fn robustness_standard(rho: &QuantumState, free: &FreeStatePolytope) -> Result<RobustnessCertificate> {
    check_dims(rho, free)?;
    let nv = free.len();
    let coords: Vec<Vec<f64>> = free.vertices().iter().map(|v| v.hermitian_coordinates()).collect();
    let target = rho.hermitian_coordinates();

    let mut objective = vec![0.0; 2 * nv];
    for c in objective.iter_mut().skip(nv) {
        *c = 1.0;
    }
    let mut lp = LinearProgram::minimize(objective);
    for (k, &t) in target.iter().enumerate() {
        let mut row = Vec::with_capacity(2 * nv);
        row.extend(coords.iter().map(|c| c[k]));
        row.extend(coords.iter().map(|c| -c[k]));
        lp.add_constraint(row, Relation::Eq, t);
    }
    let sol = lp.solve()?;
    let s = sol.objective.max(0.0);
    let a = &sol.x[..nv];
    let b = &sol.x[nv..];
    let a_sum: f64 = a.iter().sum();
    let omega_weights: Vec<f64> = a.iter().map(|x| x / a_sum).collect();
    let (sigma, sigma_weights) = if s > 0.0 {
        let w: Vec<f64> = b.iter().map(|x| x / s).collect();
        (Some(free.combine(&w)), Some(w))
    } else {
        (None, None)
    };
    Ok(RobustnessCertificate {
        lo: s,
        hi: s,
        primal: PrimalDecomposition {
            s,
            omega: free.combine(&omega_weights),
            omega_weights,
            sigma,
            sigma_weights,
        },
        witness: None,
        iterations: 1,
    })
}

/// Controls for the cutting-plane solve.
#[derive(Clone, Copy, Debug)]
pub struct RobustnessOptions {
    /// Target interval width.
    pub tol: f64,
    pub max_rounds: usize,
    /// Fail with `ConvergenceFailure` when the target width is missed.
    pub require_tol: bool,
}

impl RobustnessOptions {
    pub fn for_dim(d: usize, tol: f64) -> Self {
        RobustnessOptions {
            tol,
            max_rounds: 400,
            require_tol: d <= 4,
        }
    }
}

/// Generalized robustness with the default options for the state's dimension.
pub fn robustness_generalized(rho: &QuantumState, free: &FreeStatePolytope, tol: f64) -> Result<RobustnessCertificate> {
    robustness_generalized_with(rho, free, RobustnessOptions::for_dim(rho.dim(), tol))
}

fn initial_cuts(rho: &QuantumState, free: &FreeStatePolytope) -> Vec<Vec<C64>> {
    let d = rho.dim();
    let mut cuts = Vec::new();
    let e = rho.eig();
    for k in 0..d {
        cuts.push(e.vector(k));
    }
    for i in 0..d {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[i] = C64::new(1.0, 0.0);
        cuts.push(v);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            for phase in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
                let mut v = vec![C64::new(0.0, 0.0); d];
                v[i] = C64::new(FRAC_1_SQRT_2, 0.0);
                v[j] = phase * FRAC_1_SQRT_2;
                cuts.push(v);
            }
        }
    }
    for v in free.vertices() {
        cuts.push(v.principal_vector());
    }
    cuts
}

/// True when `u` is (up to phase) already among `cuts`.
fn is_duplicate(cuts: &[Vec<C64>], u: &[C64]) -> bool {
    cuts.iter().any(|c| {
        let ov: C64 = c.iter().zip(u).map(|(a, b)| a.conj() * b).sum();
        ov.norm_sqr() > 1.0 - 1e-12
    })
}

pub fn robustness_generalized_with(
    rho: &QuantumState,
    free: &FreeStatePolytope,
    opts: RobustnessOptions,
) -> Result<RobustnessCertificate> {
    check_dims(rho, free)?;
    let nv = free.len();
    let vertices = free.vertices();
    let bary = free.barycenter();
    let bary_min = bary.eig().min();

    let mut cuts = initial_cuts(rho, free);
    let mut best_lo = 0.0;
    let mut best_witness: Option<CMatrix> = None;
    let mut best_hi = f64::INFINITY;
    let mut best_weights: Option<Vec<f64>> = None;
    let mut rounds = 0;

    while rounds < opts.max_rounds {
        rounds += 1;
        let r_vals: Vec<f64> = cuts.iter().map(|u| rho.expectation(u).re).collect();
        let mut lp = LinearProgram::maximize(r_vals.clone());
        for v in vertices {
            let row: Vec<f64> = cuts.iter().map(|u| v.expectation(u).re.max(0.0)).collect();
            lp.add_constraint(row, Relation::Le, 1.0);
        }
        let sol = match lp.solve() {
            Ok(s) => s,
            // A direction invisible to every vertex but seen by ρ: ρ is not
            // in the span of the free cone and no finite mixing works.
            Err(Error::Unbounded) => return Err(Error::Infeasible),
            Err(e) => return Err(e),
        };

        // Lower bound from the cone witness.
        let mut w = CMatrix::zeros(rho.dim(), rho.dim());
        for (c, u) in sol.x.iter().zip(&cuts) {
            if *c > 0.0 {
                w.axpy(*c, &CMatrix::projector(u));
            }
        }
        let worst = vertices
            .iter()
            .map(|v| w.real_inner(v.matrix()))
            .fold(1.0_f64, f64::max);
        let lo = w.real_inner(rho.matrix()) / worst - 1.0;
        if lo > best_lo || best_witness.is_none() {
            best_lo = best_lo.max(lo);
            best_witness = Some(w.scale(1.0 / worst));
        }

        // Upper bound from the LP duals (≤ rows of a max problem).
        let y: Vec<f64> = sol.duals.iter().map(|d| d.abs()).collect();
        let omega = free.combine(&y);
        let residual = &omega - rho.matrix();
        let e = eigh(&residual);
        let delta = (-e.min()).max(0.0);
        if bary_min > 0.0 {
            let mu = if delta > 0.0 {
                delta / bary_min * (1.0 + 1e-12) + 1e-15
            } else {
                0.0
            };
            let total: f64 = y.iter().sum::<f64>() + mu;
            let hi = total - 1.0;
            if hi < best_hi {
                best_hi = hi;
                let mut weights: Vec<f64> = y.iter().map(|x| x + mu / nv as f64).collect();
                for x in weights.iter_mut() {
                    *x /= total;
                }
                best_weights = Some(weights);
            }
        }

        if best_hi - best_lo <= opts.tol {
            break;
        }
        let mut added = 0;
        for k in 0..e.dim() {
            if e.eigenvalues[k] < -1e-14 {
                let mut u = e.vector(k);
                normalize(&mut u);
                if !is_duplicate(&cuts, &u) {
                    cuts.push(u);
                    added += 1;
                }
            }
        }
        if added == 0 {
            break;
        }
    }

    let lo = best_lo.max(0.0);
    let hi = best_hi.max(lo);
    if !hi.is_finite() {
        return Err(Error::ConvergenceFailure { lo, hi });
    }
    if opts.require_tol && hi - lo > opts.tol {
        return Err(Error::ConvergenceFailure { lo, hi });
    }
    let omega_weights = best_weights.expect("finite upper bound has weights");
    let omega = free.combine(&omega_weights);
    let sigma = if hi > 0.0 {
        let mut m = omega.scale(1.0 + hi);
        m -= rho.matrix();
        Some(m.scale(1.0 / hi))
    } else {
        None
    };
    Ok(RobustnessCertificate {
        lo,
        hi,
        primal: PrimalDecomposition {
            s: hi,
            omega_weights,
            omega,
            sigma,
            sigma_weights: None,
        },
        witness: best_witness,
        iterations: rounds,
    })
}
