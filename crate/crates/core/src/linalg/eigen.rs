//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot A[p][q] with a diagonal
//! unitary and then applies a real Givens rotation, so the combined 2×2
//! unitary on (p, q) is
//!
//! ```text
//!     U = [[ c,            s          ],
//!          [ -s·e^{-iφ},   c·e^{-iφ}  ]]      φ = arg A[p][q]
//! ```
//!
//! and A ← U† A U annihilates the pivot exactly.

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    /// V f(Λ) V†
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(d, d, |i, j| {
            let mut acc = ZERO;
            for (k, &w) in fl.iter().enumerate() {
                if w != 0.0 {
                    acc += v[(i, k)] * v[(j, k)].conj() * w;
                }
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_spectrum(|l| l)
    }

    /// Projector onto the span of the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn spectral_projector(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        self.map_spectrum(|l| if keep(l) { 1.0 } else { 0.0 })
    }
}

/// Eigendecomposition of a Hermitian matrix given as a raw [`CMatrix`].
///
/// Fails with `NonHermitian` if the input deviates from Hermiticity by more
/// than `tol_herm` (absolute, entrywise).
pub fn eigh_checked(h: &CMatrix, tol_herm: f64) -> Result<EigenDecomposition> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermiticity_defect();
    if defect > tol_herm {
        return Err(Error::NonHermitian { deviation: defect });
    }
    Ok(jacobi(&h.hermitian_part()))
}

/// Eigendecomposition of a matrix known to be Hermitian up to rounding.
/// The input is symmetrized before iterating.
pub fn eigh(h: &CMatrix) -> EigenDecomposition {
    debug_assert!(h.is_square());
    jacobi(&h.hermitian_part())
}

fn off_diagonal_norm_sqr(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi(h: &CMatrix) -> EigenDecomposition {
    let n = h.rows();
    let mut a = h.clone();
    let mut v = CMatrix::identity(n);
    let total = a.frobenius_norm();
    let threshold = (f64::EPSILON * total).powi(2);

    if n > 1 && total > 0.0 {
        for _sweep in 0..MAX_SWEEPS {
            if off_diagonal_norm_sqr(&a) <= threshold {
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip pivots that are negligible relative to both diagonal entries.
    if g < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / g; // e^{iφ}
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let ph_conj = phase.conj();
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = ph_conj * (-s);
    let u_qq = ph_conj * c;

    let n = a.rows();
    // A ← A U (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    // A ← U† A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V ← V U
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &CMatrix) -> f64 {
    eigh(h).min()
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue(h: &CMatrix) -> f64 {
    eigh(h).max()
}
