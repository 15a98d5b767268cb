//! Vertex-enumerated free-state polytopes and membership testing.

use std::collections::{HashSet, VecDeque};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io;
use crate::linalg::matrix::{CMatrix, C64, ONE, ZERO};
use crate::linalg::{QuantumState, Tolerances};
use crate::optim::frank_wolfe::simplex_least_squares;

/// Purity tolerance for polytope vertices.
pub const VERTEX_PURITY_TOL: f64 = 1e-9;

/// Iteration cap for the membership least-squares solve.
pub const MEMBERSHIP_MAX_ITER: usize = 10_000;

/// Convex hull of finitely many pure states.
#[derive(Clone, Debug)]
pub struct FreeStatePolytope {
    name: String,
    dim: usize,
    vertices: Vec<QuantumState>,
}

impl FreeStatePolytope {
    pub fn new(name: impl Into<String>, vertices: Vec<QuantumState>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::InvalidParameter("polytope needs at least one vertex".into()))?;
        let dim = first.dim();
        for v in &vertices {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "vertex of dim {} in polytope of dim {dim}",
                    v.dim()
                )));
            }
            let purity = v.purity();
            if (purity - 1.0).abs() > VERTEX_PURITY_TOL {
                return Err(Error::NotPure { purity });
            }
        }
        Ok(FreeStatePolytope {
            name: name.into(),
            dim,
            vertices,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[QuantumState] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Uniform mixture of the vertices.
    pub fn barycenter(&self) -> QuantumState {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        let w = 1.0 / self.vertices.len() as f64;
        for v in &self.vertices {
            m.axpy(w, v.matrix());
        }
        QuantumState::from_matrix_unchecked(m)
    }

    /// Σ w_i v_i
    pub fn combine(&self, weights: &[f64]) -> CMatrix {
        assert_eq!(weights.len(), self.vertices.len());
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (w, v) in weights.iter().zip(&self.vertices) {
            if *w != 0.0 {
                m.axpy(*w, v.matrix());
            }
        }
        m
    }

    /// Vertices of the product polytope {a ⊗ b}.
    pub fn tensor(&self, other: &FreeStatePolytope) -> FreeStatePolytope {
        let mut vertices = Vec::with_capacity(self.len() * other.len());
        for a in &self.vertices {
            for b in &other.vertices {
                vertices.push(a.kron(b));
            }
        }
        FreeStatePolytope {
            name: format!("{}x{}", self.name, other.name),
            dim: self.dim * other.dim,
            vertices,
        }
    }

    /// Same polytope with vertices listed in a different order.
    pub fn permuted(&self, order: &[usize]) -> FreeStatePolytope {
        FreeStatePolytope {
            name: self.name.clone(),
            dim: self.dim,
            vertices: order.iter().map(|&i| self.vertices[i].clone()).collect(),
        }
    }

    /// Real Gram matrix tr(v_i v_j).
    pub fn gram(&self) -> Vec<Vec<f64>> {
        self.vertices
            .iter()
            .map(|a| self.vertices.iter().map(|b| a.matrix().real_inner(b.matrix())).collect())
            .collect()
    }

    pub fn to_json(&self) -> String {
        io::states_to_json(&self.vertices)
    }
}

/// Basis-state vertices |i⟩⟨i| of the incoherent (diagonal) states.
pub fn incoherent_polytope(d: usize) -> Result<FreeStatePolytope> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("coherence theory needs d ≥ 2, got {d}")));
    }
    let vertices = (0..d).map(|i| QuantumState::basis(d, i)).collect();
    FreeStatePolytope::new(format!("coherence-{d}"), vertices)
}

/// 2^n · ∏_{k=1}^{n} (2^k + 1)
pub fn stabilizer_count(n: u32) -> usize {
    (1..=n).fold(1usize << n, |acc, k| acc * ((1usize << k) + 1))
}

/// Pure n-qubit stabilizer states, n ∈ {1, 2, 3}, enumerated as the orbit of
/// |0…0⟩ under H, S and CNOT in breadth-first order.
pub fn stabilizer_polytope(n: usize) -> Result<FreeStatePolytope> {
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedSize(format!(
            "stabilizer polytope supports 1 to 3 qubits, got {n}"
        )));
    }
    let vectors = stabilizer_orbit(n);
    let vertices = vectors.iter().map(|v| QuantumState::pure(v)).collect();
    FreeStatePolytope::new(format!("stabilizer-{n}"), vertices)
}

/// Clifford generators on n qubits as (label, unitary).
pub fn clifford_generators(n: usize) -> Vec<(String, CMatrix)> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_rows(&[
        &[C64::new(r, 0.0), C64::new(r, 0.0)],
        &[C64::new(r, 0.0), C64::new(-r, 0.0)],
    ]);
    let s = CMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, C64::new(0.0, 1.0)]]);
    let mut gens = Vec::new();
    for q in 0..n {
        gens.push((format!("H{q}"), embed_single(&h, q, n)));
        gens.push((format!("S{q}"), embed_single(&s, q, n)));
    }
    for c in 0..n {
        for t in 0..n {
            if c != t {
                gens.push((format!("CX{c}{t}"), cnot(c, t, n)));
            }
        }
    }
    gens
}

/// Embeds a single-qubit gate on qubit `q` (qubit 0 most significant).
pub fn embed_single(g: &CMatrix, q: usize, n: usize) -> CMatrix {
    let mut out = CMatrix::identity(1);
    for k in 0..n {
        out = if k == q { out.kron(g) } else { out.kron(&CMatrix::identity(2)) };
    }
    out
}

pub fn cnot(control: usize, target: usize, n: usize) -> CMatrix {
    let d = 1usize << n;
    let bit = |q: usize| 1usize << (n - 1 - q);
    CMatrix::from_fn(d, d, |i, j| {
        let image = if j & bit(control) != 0 { j ^ bit(target) } else { j };
        if i == image {
            ONE
        } else {
            ZERO
        }
    })
}

/// Rounded projector entries at 1e-8 resolution; invariant under global phase.
fn fingerprint(v: &[C64]) -> Vec<(i64, i64)> {
    let p = CMatrix::projector(v);
    p.data()
        .iter()
        .map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64))
        .collect()
}

fn stabilizer_orbit(n: usize) -> Vec<Vec<C64>> {
    let d = 1usize << n;
    let gens: Vec<CMatrix> = clifford_generators(n).into_iter().map(|(_, g)| g).collect();
    let mut start = vec![ZERO; d];
    start[0] = ONE;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(fingerprint(&start));
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        for g in &gens {
            let w = g.mul_vec(&v);
            let key = fingerprint(&w);
            if seen.insert(key) {
                queue.push_back(w);
            }
        }
        out.push(v);
    }
    out
}

pub fn load_polytope(path: impl AsRef<Path>, tol: &Tolerances) -> Result<FreeStatePolytope> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "polytope".into());
    polytope_from_json(&name, &text, tol)
}

pub fn polytope_from_json(name: &str, text: &str, tol: &Tolerances) -> Result<FreeStatePolytope> {
    let states = io::states_from_json(text, true, tol)?;
    FreeStatePolytope::new(name, states)
}

pub fn save_polytope(path: impl AsRef<Path>, poly: &FreeStatePolytope) -> Result<()> {
    fs::write(path, poly.to_json())?;
    Ok(())
}

/// Distance from an operator to conv(vertices).
#[derive(Clone, Debug)]
pub struct Membership {
    /// Frobenius distance to the closest point found.
    pub distance: f64,
    /// Weights of the closest point found.
    pub weights: Vec<f64>,
    pub is_member: bool,
}

/// Minimal Frobenius distance from ρ to the convex hull of the vertices.
pub fn polytope_membership(rho: &QuantumState, poly: &FreeStatePolytope, tol_member: f64) -> Result<Membership> {
    membership_of_matrix(rho.matrix(), poly, tol_member)
}

/// Membership for any Hermitian operator (used for normalized channel images).
pub fn membership_of_matrix(m: &CMatrix, poly: &FreeStatePolytope, tol_member: f64) -> Result<Membership> {
    if m.rows() != poly.dim() || !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "operator of dim {} vs polytope of dim {}",
            m.rows(),
            poly.dim()
        )));
    }
    let gram = poly.gram();
    let linear: Vec<f64> = poly.vertices().iter().map(|v| v.matrix().real_inner(m)).collect();
    let b_norm = m.real_inner(m);
    let fit = simplex_least_squares(
        &gram,
        &linear,
        b_norm,
        MEMBERSHIP_MAX_ITER,
        1e-17,
        (tol_member * 1e-3).powi(2),
    );
    let closest = poly.combine(&fit.weights);
    let distance = (&closest - m).frobenius_norm();
    Ok(Membership {
        distance,
        is_member: distance <= tol_member,
        weights: fit.weights,
    })
}
