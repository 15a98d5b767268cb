//! Hermitian operators and density matrices.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::eigen::{eigh, eigh_checked, EigenDecomposition};
use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Numerical tolerances shared by the validation and optimization routines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Entrywise Hermiticity tolerance.
    pub herm: f64,
    /// Allowed negative eigenvalue magnitude for states.
    pub psd: f64,
    /// Allowed trace drift for states.
    pub trace: f64,
    /// Relative eigendecomposition reconstruction tolerance.
    pub eig: f64,
    /// Frobenius distance below which a state counts as a polytope member.
    pub member: f64,
    /// Eigenvalue threshold separating support from kernel.
    pub rank: f64,
    /// Target width of robustness intervals.
    pub rob: f64,
    /// Target accuracy of β_ε.
    pub beta: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-9,
            psd: 1e-9,
            trace: 1e-9,
            eig: 1e-12,
            member: 1e-7,
            rank: 1e-9,
            rob: 1e-6,
            beta: 1e-9,
        }
    }
}

/// A square matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, Tolerances::default().herm)
    }

    pub fn with_tolerance(m: CMatrix, tol_herm: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let defect = m.hermiticity_defect();
        if defect > tol_herm {
            return Err(Error::NonHermitian { deviation: defect });
        }
        Ok(HermitianMatrix(m.hermitian_part()))
    }

    /// Wraps a matrix that is Hermitian by construction, symmetrizing away rounding.
    pub fn from_hermitian_unchecked(m: CMatrix) -> Self {
        debug_assert!(m.hermiticity_defect() < 1e-6);
        HermitianMatrix(m.hermitian_part())
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn eig(&self) -> EigenDecomposition {
        eigh(&self.0)
    }

    pub fn kron(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(self.0.kron(&other.0))
    }
}

impl Deref for HermitianMatrix {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

/// Eigendecomposition with a Hermiticity check at `tol_herm`.
pub fn eig_hermitian(h: &CMatrix, tol_herm: f64) -> Result<EigenDecomposition> {
    eigh_checked(h, tol_herm)
}

/// A density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState(HermitianMatrix);

impl QuantumState {
    /// Checks PSD and unit trace, renormalizing any trace drift within tolerance.
    pub fn validate(m: CMatrix) -> Result<Self> {
        Self::validate_with(m, &Tolerances::default())
    }

    pub fn validate_with(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        let h = HermitianMatrix::with_tolerance(m, tol.herm)?;
        let trace = h.trace().re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::TraceNotOne { trace });
        }
        let lmin = h.eig().min();
        if lmin < -tol.psd {
            return Err(Error::NotPsd {
                min_eigenvalue: lmin,
            });
        }
        Ok(QuantumState(HermitianMatrix(h.0.scale(1.0 / trace))))
    }

    /// Wraps a matrix that is a state by construction.
    pub fn from_matrix_unchecked(m: CMatrix) -> Self {
        QuantumState(HermitianMatrix::from_hermitian_unchecked(m))
    }

    /// Normalizes a nonzero PSD matrix to unit trace.
    pub fn normalized(m: &CMatrix) -> Result<Self> {
        let t = m.trace().re;
        if t <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "cannot normalize operator with trace {t}"
            )));
        }
        Self::validate(m.scale(1.0 / t))
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[C64]) -> Self {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        assert!(norm_sqr > 0.0, "zero vector");
        QuantumState::from_matrix_unchecked(CMatrix::projector(psi).scale(1.0 / norm_sqr))
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = vec![ZERO; d];
        v[i] = C64::new(1.0, 0.0);
        Self::pure(&v)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        QuantumState::from_matrix_unchecked(CMatrix::identity(d).scale(1.0 / d as f64))
    }

    /// Qubit pure state at Bloch polar angle θ and azimuth φ:
    /// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
    pub fn bloch_pure(theta: f64, phi: f64) -> Self {
        Self::pure(&[
            C64::new((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), phi),
        ])
    }

    /// |T⟩ = (|0⟩ + e^{iπ/4}|1⟩)/√2.
    pub fn t_state() -> Self {
        Self::bloch_pure(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_4)
    }

    /// |+⟩ = (|0⟩ + |1⟩)/√2.
    pub fn plus() -> Self {
        Self::bloch_pure(std::f64::consts::FRAC_PI_2, 0.0)
    }

    /// Convex mixture Σ w_k ρ_k. Weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &QuantumState)]) -> Result<Self> {
        let d = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?
            .1
            .dim();
        let mut acc = CMatrix::zeros(d, d);
        for (w, s) in parts {
            if s.dim() != d {
                return Err(Error::DimensionMismatch("mixture of unequal dimensions".into()));
            }
            if *w < 0.0 {
                return Err(Error::InvalidParameter(format!("negative mixture weight {w}")));
            }
            acc.axpy(*w, s.matrix());
        }
        Self::validate(acc)
    }

    /// (1−q)ρ + q·I/d
    pub fn depolarized(&self, q: f64) -> Self {
        let d = self.dim();
        let mut m = self.matrix().scale(1.0 - q);
        m.axpy(q / d as f64, &CMatrix::identity(d));
        QuantumState::from_matrix_unchecked(m)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0 .0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0 .0
    }

    pub fn eig(&self) -> EigenDecomposition {
        self.0.eig()
    }

    /// tr(ρ²)
    pub fn purity(&self) -> f64 {
        self.matrix().real_inner(self.matrix())
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    /// Dominant eigenvector; for a pure state this is |ψ⟩ up to phase.
    pub fn principal_vector(&self) -> Vec<C64> {
        let e = self.eig();
        e.vector(e.dim() - 1)
    }

    pub fn kron(&self, other: &QuantumState) -> QuantumState {
        QuantumState(self.0.kron(&other.0))
    }

    pub fn tensor_power(&self, n: usize) -> QuantumState {
        assert!(n >= 1);
        let mut out = self.clone();
        for _ in 1..n {
            out = out.kron(self);
        }
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self)
    }
}

impl Deref for QuantumState {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        self.matrix()
    }
}

/// Validates a Hermitian matrix as a state.
pub fn validate_state(m: &HermitianMatrix, tol: &Tolerances) -> Result<QuantumState> {
    QuantumState::validate_with(m.matrix().clone(), tol)
}

/// Kronecker product of two Hermitian matrices.
pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    a.kron(b)
}

/// λ_min(ρ), the first entry of the ascending spectrum.
pub fn min_eigenvalue(rho: &QuantumState) -> f64 {
    rho.eig().min()
}

/// Traces out every subsystem not listed in `keep`. Subsystem 0 is the most
/// significant tensor factor.
pub fn partial_trace(rho: &QuantumState, dims: &[usize], keep: &[usize]) -> Result<QuantumState> {
    let m = partial_trace_matrix(rho.matrix(), dims, keep)?;
    Ok(QuantumState::from_matrix_unchecked(m))
}

/// Partial trace on an arbitrary square operator.
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if total != m.rows() || !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not multiply to {}",
            m.rows()
        )));
    }
    let mut keep_mask = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "keep index {k} out of range for {} subsystems",
                dims.len()
            )));
        }
        keep_mask[k] = true;
    }
    let kept_dims: Vec<usize> = (0..dims.len()).filter(|&k| keep_mask[k]).map(|k| dims[k]).collect();
    let traced_dims: Vec<usize> = (0..dims.len()).filter(|&k| !keep_mask[k]).map(|k| dims[k]).collect();
    let d_keep: usize = kept_dims.iter().product();
    let d_trace: usize = traced_dims.iter().product();

    // Compose a full multi-index from kept and traced sub-indices.
    let compose = |ik: usize, it: usize| -> usize {
        let mut digits = vec![0usize; dims.len()];
        let mut rk = ik;
        let mut rt = it;
        for k in (0..dims.len()).rev() {
            if keep_mask[k] {
                digits[k] = rk % dims[k];
                rk /= dims[k];
            } else {
                digits[k] = rt % dims[k];
                rt /= dims[k];
            }
        }
        digits.iter().zip(dims).fold(0, |acc, (&dg, &dm)| acc * dm + dg)
    };

    let mut out = CMatrix::zeros(d_keep, d_keep);
    for i in 0..d_keep {
        for j in 0..d_keep {
            let mut acc = ZERO;
            for t in 0..d_trace {
                acc += m[(compose(i, t), compose(j, t))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// F(ρ,σ) = ‖√ρ√σ‖₁².
///
/// When either argument is pure the value is the overlap tr(ρσ), which is
/// returned directly; otherwise the trace norm is the sum of singular values
/// of √ρ√σ.
pub fn fidelity(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    const PURE_TOL: f64 = 1e-12;
    if rho.is_pure(PURE_TOL) || sigma.is_pure(PURE_TOL) {
        return Ok(rho.matrix().real_inner(sigma.matrix()).clamp(0.0, 1.0));
    }
    let tol_psd = Tolerances::default().psd;
    let sqrt_psd = |l: f64| {
        if l < 0.0 {
            debug_assert!(l >= -tol_psd * 10.0);
            0.0
        } else {
            l.sqrt()
        }
    };
    let sr = rho.eig().map_spectrum(sqrt_psd);
    let ss = sigma.eig().map_spectrum(sqrt_psd);
    let a = sr.matmul(&ss);
    let gram = a.adjoint().matmul(&a);
    let singular_sum: f64 = eigh(&gram).eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((singular_sum * singular_sum).clamp(0.0, 1.0))
}
