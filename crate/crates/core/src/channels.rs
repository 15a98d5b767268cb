//! Kraus channels, Choi states and the channel-level no-go quantities.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::eigen::eigh;
use crate::linalg::matrix::{CMatrix, C64, ONE, ZERO};
use crate::linalg::QuantumState;
use crate::monotones::hypothesis::d_min_matrices;
use crate::random::stream;
use crate::verifier::{certify_channel, sample_free_channel, Theory, TheoryKind};

/// Completeness tolerance for trace-preserving maps.
pub const TP_TOL: f64 = 1e-9;
/// Eigenvalues of a Choi matrix at or below this are outside its support.
pub const CHOI_RANK_TOL: f64 = 1e-9;

/// A completely positive map ρ ↦ Σ_j K_j ρ K_j†. Trace preservation is not
/// required here; sub-operations only need Σ K_j†K_j ⪯ I.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<CMatrix>,
    din: usize,
    dout: usize,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParameter("channel needs at least one Kraus operator".into()))?;
        let (dout, din) = (first.rows(), first.cols());
        for k in &kraus {
            if k.rows() != dout || k.cols() != din {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {}x{} among {dout}x{din}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        Ok(KrausChannel { kraus, din, dout })
    }

    /// The zero map between the given dimensions.
    pub fn zero(din: usize, dout: usize) -> Self {
        KrausChannel {
            kraus: vec![CMatrix::zeros(dout, din)],
            din,
            dout,
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(CMatrix::identity(d))
    }

    pub fn unitary(u: CMatrix) -> Self {
        let (dout, din) = (u.rows(), u.cols());
        KrausChannel {
            kraus: vec![u],
            din,
            dout,
        }
    }

    /// ρ ↦ tr(ρ)·τ
    pub fn replacer(tau: &QuantumState, din: usize) -> Self {
        let e = tau.eig();
        let dout = tau.dim();
        let mut kraus = Vec::new();
        for k in 0..dout {
            let l = e.eigenvalues[k];
            if l <= 0.0 {
                continue;
            }
            let v = e.vector(k);
            let s = l.sqrt();
            for i in 0..din {
                kraus.push(CMatrix::from_fn(dout, din, |r, c| if c == i { v[r] * s } else { ZERO }));
            }
        }
        KrausChannel { kraus, din, dout }
    }

    /// ρ ↦ (1 − q)ρ + q·tr(ρ)·I/d
    pub fn depolarizing(q: f64, d: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidParameter(format!("depolarizing parameter {q} outside [0, 1]")));
        }
        let mut kraus = vec![CMatrix::identity(d).scale((1.0 - q).sqrt())];
        let s = (q / d as f64).sqrt();
        if q > 0.0 {
            for i in 0..d {
                for j in 0..d {
                    let mut k = CMatrix::zeros(d, d);
                    k[(j, i)] = C64::new(s, 0.0);
                    kraus.push(k);
                }
            }
        }
        Ok(KrausChannel { kraus, din: d, dout: d })
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        assert_eq!(rho.rows(), self.din, "channel input dimension");
        let mut out = CMatrix::zeros(self.dout, self.dout);
        for k in &self.kraus {
            out += &k.conjugate(rho);
        }
        out
    }

    /// Σ_j K_j†K_j
    pub fn completeness(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.din, self.din);
        for k in &self.kraus {
            m += &k.adjoint().matmul(k);
        }
        m
    }

    /// max |(Σ K†K − I)_{ij}|
    pub fn trace_defect(&self) -> f64 {
        self.completeness().max_abs_diff(&CMatrix::identity(self.din))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_defect() <= tol
    }

    /// Largest eigenvalue of Σ K†K; at most 1 for a sub-operation.
    pub fn completeness_norm(&self) -> f64 {
        eigh(&self.completeness()).max()
    }

    /// `next` ∘ `self`
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        if next.din != self.dout {
            return Err(Error::DimensionMismatch(format!(
                "composing output dim {} into input dim {}",
                self.dout, next.din
            )));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for b in &next.kraus {
            for a in &self.kraus {
                kraus.push(b.matmul(a));
            }
        }
        Ok(KrausChannel {
            kraus,
            din: self.din,
            dout: next.dout,
        }
        .compressed())
    }

    /// The map s·N.
    pub fn scaled(&self, s: f64) -> KrausChannel {
        let r = s.max(0.0).sqrt();
        KrausChannel {
            kraus: self.kraus.iter().map(|k| k.scale(r)).collect(),
            din: self.din,
            dout: self.dout,
        }
    }

    /// The map N + M.
    pub fn sum(&self, other: &KrausChannel) -> Result<KrausChannel> {
        if self.din != other.din || self.dout != other.dout {
            return Err(Error::DimensionMismatch("summing maps of different shapes".into()));
        }
        let mut kraus = self.kraus.clone();
        kraus.extend(other.kraus.iter().cloned());
        Ok(KrausChannel {
            kraus,
            din: self.din,
            dout: self.dout,
        }
        .compressed())
    }

    /// N ⊗ id_r
    pub fn tensor_identity(&self, r: usize) -> KrausChannel {
        let id = CMatrix::identity(r);
        KrausChannel {
            kraus: self.kraus.iter().map(|k| k.kron(&id)).collect(),
            din: self.din * r,
            dout: self.dout * r,
        }
    }

    /// Unnormalized Choi matrix Σ_{ij} |i⟩⟨j| ⊗ N(|i⟩⟨j|), reference first.
    pub fn choi_matrix(&self) -> CMatrix {
        let (din, dout) = (self.din, self.dout);
        let n = din * dout;
        let mut j = CMatrix::zeros(n, n);
        for k in &self.kraus {
            // (I ⊗ K)Σ_i |i⟩|i⟩
            let v: Vec<C64> = (0..n).map(|idx| k[(idx % dout, idx / dout)]).collect();
            for a in 0..n {
                if v[a] == ZERO {
                    continue;
                }
                for b in 0..n {
                    j[(a, b)] += v[a] * v[b].conj();
                }
            }
        }
        j
    }

    /// Equivalent Kraus set of minimal length when the current one exceeds
    /// din·dout operators.
    pub fn compressed(self) -> KrausChannel {
        if self.kraus.len() <= self.din * self.dout {
            return self;
        }
        let (din, dout) = (self.din, self.dout);
        let e = eigh(&self.choi_matrix());
        let scale = e.max().max(1e-300);
        let mut kraus = Vec::new();
        for k in 0..e.dim() {
            let l = e.eigenvalues[k];
            if l <= 1e-15 * scale {
                continue;
            }
            let v = e.vector(k);
            let s = l.sqrt();
            kraus.push(CMatrix::from_fn(dout, din, |r, c| v[c * dout + r] * s));
        }
        if kraus.is_empty() {
            kraus.push(CMatrix::zeros(dout, din));
        }
        KrausChannel { kraus, din, dout }
    }
}

/// Normalized Choi state J_N = (id ⊗ N)(Φ).
#[derive(Clone, Debug)]
pub struct ChoiState {
    pub state: QuantumState,
    pub din: usize,
    pub dout: usize,
}

pub fn choi(channel: &KrausChannel) -> Result<ChoiState> {
    let deviation = channel.trace_defect();
    if deviation > TP_TOL {
        return Err(Error::NotTracePreserving { deviation });
    }
    let j = channel.choi_matrix().scale(1.0 / channel.din as f64);
    Ok(ChoiState {
        state: QuantumState::from_matrix_unchecked(j),
        din: channel.din,
        dout: channel.dout,
    })
}

/// Largest p with J_N − p·J_E ⪰ 0.
pub fn max_free_fraction(n: &KrausChannel, e: &KrausChannel) -> Result<f64> {
    let jn = choi(n)?;
    let je = choi(e)?;
    if jn.din != je.din || jn.dout != je.dout {
        return Err(Error::DimensionMismatch("channels of different shapes".into()));
    }
    Ok(free_fraction_of_choi(jn.state.matrix(), je.state.matrix()))
}

/// 1/λ_max(J_N^{−1/2} J_E J_N^{−1/2}) with the inverse taken on the support
/// of J_N; 0 when J_E leaves that support.
pub fn free_fraction_of_choi(jn: &CMatrix, je: &CMatrix) -> f64 {
    let e = eigh(jn);
    let outside = e.spectral_projector(|l| l <= CHOI_RANK_TOL);
    if outside.conjugate(je).trace().re > CHOI_RANK_TOL {
        return 0.0;
    }
    let inv_sqrt = e.map_spectrum(|l| if l > CHOI_RANK_TOL { 1.0 / l.sqrt() } else { 0.0 });
    let m = inv_sqrt.conjugate(je);
    let top = eigh(&m.hermitian_part()).max();
    if top <= 0.0 {
        0.0
    } else {
        (1.0 / top).min(1.0)
    }
}

/// D_min(J_N‖J_M): the channel D_min evaluated on the maximally entangled
/// input, a lower bound on the supremum over inputs.
pub fn d_min_choi(n: &KrausChannel, m: &KrausChannel) -> Result<f64> {
    let jn = choi(n)?;
    let jm = choi(m)?;
    if jn.state.dim() != jm.state.dim() {
        return Err(Error::DimensionMismatch("channels of different shapes".into()));
    }
    Ok(d_min_matrices(jn.state.matrix(), jm.state.matrix()))
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_rows(&[&[C64::new(h, 0.0), C64::new(h, 0.0)], &[C64::new(h, 0.0), C64::new(-h, 0.0)]])
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

/// Evidence for the unitary-simulation no-go: a free component of N and a
/// positive D_min gap between U and every sampled free channel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NogoReport {
    pub theory: String,
    pub seed: u64,
    pub samples: usize,
    /// Largest free fraction of N found and the channel realizing it.
    pub p_star: f64,
    pub free_component: String,
    /// D_min(J_N‖J_E) for that channel (lower bound on the channel D_min).
    pub d_min_n_free_lower_bound: f64,
    /// min over sampled free E of D_min(J_U‖J_E) (each a lower bound).
    pub min_d_min_u_free_lower_bound: f64,
    /// Largest Choi overlap tr(J_U J_E) seen; below 1 for non-free U.
    pub max_choi_overlap: f64,
    /// Positive margin means the two legs contradict a free simulation.
    pub margin: f64,
}

/// Desk-scale evidence that N cannot be turned into the unitary U by a free
/// superchannel: (a) N has a free component, so D_min(N‖E) = 0 for some free
/// E; (b) D_min(U‖E) stays positive over sampled free channels E.
pub fn verify_unitary_nogo(
    n: &KrausChannel,
    u: &CMatrix,
    theory: &Theory,
    samples: usize,
    seed: u64,
    tol_member: f64,
) -> Result<NogoReport> {
    let d = theory.dim();
    if n.din() != d || n.dout() != d || u.rows() != d || u.cols() != d {
        return Err(Error::DimensionMismatch(format!("channels must act on the theory's dimension {d}")));
    }
    if u.adjoint().matmul(u).max_abs_diff(&CMatrix::identity(d)) > TP_TOL {
        return Err(Error::InvalidParameter("target is not unitary".into()));
    }
    let target = KrausChannel::unitary(u.clone());
    if certify_channel(&target, theory.free(), tol_member)? {
        return Err(Error::PreconditionFailed("target unitary is itself free".into()));
    }
    let jn = choi(n)?;
    let ju = choi(&target)?;

    let structured = theory.kind() != TheoryKind::Custom;
    let sampled: Vec<Result<(String, KrausChannel)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let s = sample_free_channel(theory, structured && i % 2 == 0, tol_member, &mut rng)?;
            Ok((format!("sample-{i}:{}", s.family), s.channel))
        })
        .collect();
    let mut candidates = vec![(
        "replacer-barycenter".to_string(),
        KrausChannel::replacer(&theory.free().barycenter(), d),
    )];
    for s in sampled {
        candidates.push(s?);
    }

    let mut p_star = 0.0;
    let mut best = 0;
    let mut min_dmin_u = f64::INFINITY;
    let mut max_overlap = 0.0_f64;
    for (k, (_, e)) in candidates.iter().enumerate() {
        let je = choi(e)?;
        let p = free_fraction_of_choi(jn.state.matrix(), je.state.matrix());
        if p > p_star {
            p_star = p;
            best = k;
        }
        min_dmin_u = min_dmin_u.min(d_min_matrices(ju.state.matrix(), je.state.matrix()));
        max_overlap = max_overlap.max(ju.state.matrix().real_inner(je.state.matrix()));
    }
    if max_overlap >= 1.0 - 1e-12 {
        return Err(Error::PreconditionFailed("a sampled free channel reproduces the target".into()));
    }
    if p_star <= CHOI_RANK_TOL {
        return Err(Error::PreconditionFailed(
            "no free component of the channel found among the sampled free channels".into(),
        ));
    }
    let (label, e_star) = &candidates[best];
    let dn = d_min_matrices(jn.state.matrix(), choi(e_star)?.state.matrix());
    Ok(NogoReport {
        theory: theory.label(),
        seed,
        samples,
        p_star,
        free_component: label.clone(),
        d_min_n_free_lower_bound: dn,
        min_d_min_u_free_lower_bound: min_dmin_u,
        max_choi_overlap: max_overlap,
        margin: min_dmin_u - dn,
    })
}
