//! Seeded random matrices, states and reproducible per-sample RNG streams.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, QuantumState, C64};

/// Independent RNG stream for sample `index` under `seed`. Streams are keyed
/// by (seed, index) so results do not depend on evaluation order.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Orthonormalizes the columns of `m` (modified Gram–Schmidt, applied twice).
/// Requires rows ≥ cols and full column rank.
fn orthonormalize_columns(m: &mut CMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    for _pass in 0..2 {
        for j in 0..cols {
            for k in 0..j {
                let mut proj = C64::new(0.0, 0.0);
                for i in 0..rows {
                    proj += m[(i, k)].conj() * m[(i, j)];
                }
                for i in 0..rows {
                    let mik = m[(i, k)];
                    m[(i, j)] -= mik * proj;
                }
            }
            let norm = (0..rows).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            for i in 0..rows {
                m[(i, j)] /= norm;
            }
        }
    }
}

/// Haar-distributed isometry C^cols → C^rows (rows ≥ cols).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(rows >= cols);
    let mut g = ginibre(rng, rows, cols);
    orthonormalize_columns(&mut g);
    g
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    random_isometry(rng, d, d)
}

pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    crate::linalg::matrix::normalize(&mut v);
    v
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> QuantumState {
    QuantumState::pure(&random_pure_vector(rng, d))
}

/// Induced-measure mixed state G G†/tr(G G†) with a d×k Ginibre G. k ≥ d
/// gives full rank almost surely.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> QuantumState {
    let g = ginibre(rng, d, k);
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    QuantumState::from_matrix_unchecked(m.scale(1.0 / t))
}

/// Random diagonal state with entries drawn uniformly then normalized.
pub fn random_diagonal_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> QuantumState {
    let p: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = p.iter().sum();
    let diag: Vec<f64> = p.iter().map(|x| x / s).collect();
    QuantumState::from_matrix_unchecked(CMatrix::from_real_diagonal(&diag))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    ginibre(rng, d, d).hermitian_part()
}
