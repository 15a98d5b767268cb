//! Monte-Carlo search for purification protocols that beat the no-go bound.
//!
//! Free channels and two-outcome instruments are sampled, certified against
//! the free polytope by their vertex images, and evaluated on a primitive
//! state. A certified sample inside the forbidden region would falsify the
//! bound and is reported as a violation.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{primitives, tradeoff_report};
use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::free_models::{
    clifford_generators, embed_single, incoherent_polytope, membership_of_matrix, stabilizer_polytope,
    FreeStatePolytope,
};
use crate::io::{KrausFile, StateFile};
use crate::linalg::eigen::eigh;
use crate::linalg::matrix::{CMatrix, C64, ONE, ZERO};
use crate::linalg::{QuantumState, Tolerances};
use crate::monotones::{min_free_dh_with, FreeDhOptions};
use crate::random::{random_isometry, stream};

/// Rejection budget per sample.
pub const MAX_ATTEMPTS: usize = 10_000;
/// Success probabilities at or below this count as failure.
pub const P_TOL: f64 = 1e-12;
/// Slack on the trade-off inequality.
pub const BOUND_SLACK: f64 = 1e-7;
/// ε at or below this with p > P_TOL is an exact purification.
pub const EXACT_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoryKind {
    Coherence,
    Stabilizer,
    Custom,
}

/// A resource theory given by its free polytope, with knowledge of which
/// structured free families apply.
#[derive(Clone, Debug)]
pub struct Theory {
    kind: TheoryKind,
    size: usize,
    free: FreeStatePolytope,
}

impl Theory {
    pub fn coherence(d: usize) -> Result<Self> {
        Ok(Theory {
            kind: TheoryKind::Coherence,
            size: d,
            free: incoherent_polytope(d)?,
        })
    }

    pub fn stabilizer(n: usize) -> Result<Self> {
        Ok(Theory {
            kind: TheoryKind::Stabilizer,
            size: n,
            free: stabilizer_polytope(n)?,
        })
    }

    /// A theory known only through its polytope; only generic sampling applies.
    pub fn custom(free: FreeStatePolytope) -> Self {
        Theory {
            kind: TheoryKind::Custom,
            size: free.dim(),
            free,
        }
    }

    pub fn kind(&self) -> TheoryKind {
        self.kind
    }

    pub fn free(&self) -> &FreeStatePolytope {
        &self.free
    }

    pub fn dim(&self) -> usize {
        self.free.dim()
    }

    pub fn label(&self) -> String {
        match self.kind {
            TheoryKind::Coherence => format!("coherence-{}", self.size),
            TheoryKind::Stabilizer => format!("stabilizer-{}", self.size),
            TheoryKind::Custom => self.free.name().to_string(),
        }
    }
}

fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
}

/// Probability vector of length r with a randomly chosen spread, sometimes
/// one-hot, so that both interior and extremal maps are drawn.
fn random_weights<R: Rng + ?Sized>(rng: &mut R, r: usize) -> Vec<f64> {
    if r == 1 {
        return vec![1.0];
    }
    if rng.random::<f64>() < 0.15 {
        let mut w = vec![0.0; r];
        w[rng.random_range(0..r)] = 1.0;
        return w;
    }
    let spread = (rng.random::<f64>() * 4.0 - 1.0).exp();
    let raw: Vec<f64> = (0..r)
        .map(|_| {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            (spread * z).exp()
        })
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// A number in [0, 1] with atoms at both ends.
fn random_fraction<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    match rng.random_range(0..6) {
        0 => 0.0,
        1 => 1.0,
        2 => rng.random::<f64>().powi(4),
        _ => rng.random::<f64>(),
    }
}

fn permutation<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..d).collect();
    if rng.random::<bool>() {
        p.shuffle(rng);
    }
    p
}

/// K_j = Σ_i √w_{j,i} e^{iφ} |π_j(i)⟩⟨i| with Σ_j w_{j,i} = 1: incoherent
/// Kraus operators that never merge two inputs.
fn permutation_kraus<R: Rng + ?Sized>(rng: &mut R, d: usize) -> KrausChannel {
    let r = rng.random_range(1..=d + 1);
    let perms: Vec<Vec<usize>> = (0..r).map(|_| permutation(rng, d)).collect();
    let with_phases = rng.random::<bool>();
    let mut kraus = vec![CMatrix::zeros(d, d); r];
    for i in 0..d {
        let w = random_weights(rng, r);
        for j in 0..r {
            let phase = if with_phases { random_phase(rng) } else { ONE };
            kraus[j][(perms[j][i], i)] = phase * w[j].sqrt();
        }
    }
    KrausChannel::new(kraus).expect("nonempty")
}

/// Classical stochastic map with Kraus operators √P(o|i)|o⟩⟨i|.
fn classical_channel<R: Rng + ?Sized>(rng: &mut R, d: usize) -> KrausChannel {
    let mut kraus = Vec::new();
    for i in 0..d {
        let w = random_weights(rng, d);
        for (o, p) in w.iter().enumerate() {
            if *p > 0.0 {
                let mut k = CMatrix::zeros(d, d);
                k[(o, i)] = C64::new(p.sqrt(), 0.0);
                kraus.push(k);
            }
        }
    }
    KrausChannel::new(kraus).expect("nonempty").compressed()
}

fn dephasing<R: Rng + ?Sized>(rng: &mut R, d: usize) -> KrausChannel {
    let q: f64 = rng.random();
    let mut kraus = vec![CMatrix::identity(d).scale((1.0 - q).sqrt())];
    for i in 0..d {
        let mut k = CMatrix::zeros(d, d);
        k[(i, i)] = C64::new(q.sqrt(), 0.0);
        kraus.push(k);
    }
    KrausChannel::new(kraus).expect("nonempty")
}

fn phased_permutation<R: Rng + ?Sized>(rng: &mut R, d: usize) -> KrausChannel {
    let p = permutation(rng, d);
    let mut u = CMatrix::zeros(d, d);
    for i in 0..d {
        u[(p[i], i)] = random_phase(rng);
    }
    KrausChannel::unitary(u)
}

fn structured_coherence<R: Rng + ?Sized>(rng: &mut R, d: usize, depth: usize) -> (KrausChannel, &'static str) {
    match rng.random_range(0..if depth == 0 { 5 } else { 4 }) {
        0 => (permutation_kraus(rng, d), "permutation-kraus"),
        1 => (classical_channel(rng, d), "classical"),
        2 => (phased_permutation(rng, d), "phased-permutation"),
        3 => (dephasing(rng, d), "dephasing"),
        _ => {
            let (a, _) = structured_coherence(rng, d, depth + 1);
            let (b, _) = structured_coherence(rng, d, depth + 1);
            (a.then(&b).expect("same dims"), "composition")
        }
    }
}

fn pauli(k: usize) -> CMatrix {
    let i = C64::new(0.0, 1.0);
    match k {
        0 => CMatrix::identity(2),
        1 => CMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
        2 => CMatrix::from_rows(&[&[ZERO, -i], &[i, ZERO]]),
        _ => CMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]]),
    }
}

fn pauli_string(code: usize, n: usize) -> CMatrix {
    let mut out = CMatrix::identity(1);
    for q in 0..n {
        out = out.kron(&pauli((code >> (2 * (n - 1 - q))) & 3));
    }
    out
}

fn clifford_walk<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let gens = clifford_generators(n);
    let steps = rng.random_range(1..=24);
    let mut u = CMatrix::identity(1 << n);
    for _ in 0..steps {
        let (_, g) = &gens[rng.random_range(0..gens.len())];
        u = g.matmul(&u);
    }
    u
}

fn pauli_channel<R: Rng + ?Sized>(rng: &mut R, n: usize) -> KrausChannel {
    let count = 1usize << (2 * n);
    let r = rng.random_range(1..=count.min(6));
    let w = random_weights(rng, r);
    let kraus = w
        .iter()
        .map(|x| pauli_string(rng.random_range(0..count), n).scale(x.sqrt()))
        .collect();
    KrausChannel::new(kraus).expect("nonempty").compressed()
}

/// Resets one qubit to a single-qubit stabilizer state.
fn qubit_reset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> KrausChannel {
    let single = stabilizer_polytope(1).expect("n = 1 supported");
    let v = single.vertices()[rng.random_range(0..single.len())].principal_vector();
    let q = rng.random_range(0..n);
    let kraus = (0..2)
        .map(|i| {
            let local = CMatrix::from_fn(2, 2, |r, c| if c == i { v[r] } else { ZERO });
            embed_single(&local, q, n)
        })
        .collect();
    KrausChannel::new(kraus).expect("nonempty")
}

fn structured_stabilizer<R: Rng + ?Sized>(rng: &mut R, n: usize, depth: usize) -> (KrausChannel, &'static str) {
    match rng.random_range(0..if depth == 0 { 4 } else { 3 }) {
        0 => (KrausChannel::unitary(clifford_walk(rng, n)), "clifford"),
        1 => (pauli_channel(rng, n), "pauli"),
        2 => (qubit_reset(rng, n), "reset"),
        _ => {
            let (a, _) = structured_stabilizer(rng, n, depth + 1);
            let (b, _) = structured_stabilizer(rng, n, depth + 1);
            (a.then(&b).expect("same dims"), "composition")
        }
    }
}

fn kraus_from_choi(j: &CMatrix, din: usize, dout: usize) -> KrausChannel {
    let e = eigh(j);
    let mut kraus = Vec::new();
    for k in 0..e.dim() {
        let l = e.eigenvalues[k];
        if l <= 0.0 {
            continue;
        }
        let v = e.vector(k);
        let s = l.sqrt();
        kraus.push(CMatrix::from_fn(dout, din, |r, c| v[c * dout + r] * s));
    }
    if kraus.is_empty() {
        kraus.push(CMatrix::zeros(dout, din));
    }
    KrausChannel::new(kraus).expect("nonempty")
}

/// A Stinespring channel from a Haar isometry, pushed toward the free set:
/// for coherence the off-diagonal output on basis inputs is removed from
/// the Choi matrix, and in all cases the result is mixed with the
/// completely depolarizing channel by a random amount. Candidates that are
/// not completely positive are rejected (`None`).
fn generic_candidate<R: Rng + ?Sized>(rng: &mut R, theory: &Theory) -> Option<KrausChannel> {
    let d = theory.dim();
    let r = rng.random_range(1..=d.min(4));
    let v = random_isometry(rng, d * r, d);
    let kraus: Vec<CMatrix> = (0..r)
        .map(|k| CMatrix::from_fn(d, d, |a, b| v[(a * r + k, b)]))
        .collect();
    let base = KrausChannel::new(kraus).expect("nonempty");
    let mut j = base.choi_matrix();
    if theory.kind == TheoryKind::Coherence {
        for i in 0..d {
            for a in 0..d {
                for b in 0..d {
                    if a != b {
                        j[(i * d + a, i * d + b)] = ZERO;
                    }
                }
            }
        }
    }
    let q: f64 = rng.random();
    let mut mixed = j.scale(1.0 - q);
    mixed.axpy(q / d as f64, &CMatrix::identity(d * d));
    if eigh(&mixed).min() < -1e-12 {
        return None;
    }
    Some(kraus_from_choi(&mixed.hermitian_part(), d, d))
}

/// Largest Frobenius distance from the normalized vertex images L(v)/tr L(v)
/// to the polytope. Images of trace ≤ P_TOL count as proportional to free.
pub fn proportional_free_distance(map: &KrausChannel, free: &FreeStatePolytope, tol_member: f64) -> Result<f64> {
    let mut worst = 0.0_f64;
    for v in free.vertices() {
        let out = map.apply(v.matrix());
        let t = out.trace().re;
        if t <= P_TOL {
            continue;
        }
        let m = membership_of_matrix(&out.scale(1.0 / t), free, tol_member)?;
        worst = worst.max(m.distance);
    }
    Ok(worst)
}

/// A channel is certified free when every vertex image lies in the polytope.
pub fn certify_channel(ch: &KrausChannel, free: &FreeStatePolytope, tol_member: f64) -> Result<bool> {
    if !ch.is_trace_preserving(1e-9) {
        return Ok(false);
    }
    Ok(proportional_free_distance(ch, free, tol_member)? <= tol_member)
}

#[derive(Clone, Debug)]
pub struct SampledChannel {
    pub channel: KrausChannel,
    pub family: String,
    pub attempts: usize,
}

/// Draws a certified free channel.
pub fn sample_free_channel<R: Rng + ?Sized>(
    theory: &Theory,
    structured: bool,
    tol_member: f64,
    rng: &mut R,
) -> Result<SampledChannel> {
    for attempt in 1..=MAX_ATTEMPTS {
        let (candidate, family) = match (structured, theory.kind) {
            (true, TheoryKind::Coherence) => {
                let (c, f) = structured_coherence(rng, theory.dim(), 0);
                (Some(c), f)
            }
            (true, TheoryKind::Stabilizer) => {
                let (c, f) = structured_stabilizer(rng, theory.size, 0);
                (Some(c), f)
            }
            (true, TheoryKind::Custom) => {
                return Err(Error::InvalidParameter(
                    "structured sampling needs a coherence or stabilizer theory".into(),
                ))
            }
            (false, _) => (generic_candidate(rng, theory), "generic"),
        };
        if let Some(c) = candidate {
            if certify_channel(&c, theory.free(), tol_member)? {
                return Ok(SampledChannel {
                    channel: c,
                    family: family.to_string(),
                    attempts: attempt,
                });
            }
        }
    }
    Err(Error::SamplingExhausted { attempts: MAX_ATTEMPTS })
}

/// Two-branch instrument: success sub-operation L and failure G.
#[derive(Clone, Debug)]
pub struct ProbabilisticProtocol {
    pub success: KrausChannel,
    pub failure: KrausChannel,
    pub family: String,
}

impl ProbabilisticProtocol {
    /// L = channel, G = 0.
    pub fn trivial(channel: KrausChannel) -> Self {
        let failure = KrausChannel::zero(channel.din(), channel.dout());
        ProbabilisticProtocol {
            success: channel,
            failure,
            family: "trivial".into(),
        }
    }

    /// max |Σ K†K over both branches − I|
    pub fn trace_defect(&self) -> f64 {
        let total = &self.success.completeness() + &self.failure.completeness();
        total.max_abs_diff(&CMatrix::identity(self.success.din()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InstrumentCertificate {
    pub success_distance: f64,
    pub failure_distance: f64,
    pub trace_defect: f64,
    pub certified: bool,
}

/// Checks that both branches map every vertex to a multiple of a free state
/// and that the branches sum to a channel.
pub fn certify_instrument(
    proto: &ProbabilisticProtocol,
    free: &FreeStatePolytope,
    tol_member: f64,
) -> Result<InstrumentCertificate> {
    let success_distance = proportional_free_distance(&proto.success, free, tol_member)?;
    let failure_distance = proportional_free_distance(&proto.failure, free, tol_member)?;
    let trace_defect = proto.trace_defect();
    Ok(InstrumentCertificate {
        success_distance,
        failure_distance,
        trace_defect,
        certified: success_distance <= tol_member && failure_distance <= tol_member && trace_defect <= 1e-9,
    })
}

/// A free two-outcome measurement as (success, failure) Kraus sets.
fn free_measurement<R: Rng + ?Sized>(rng: &mut R, theory: &Theory) -> (KrausChannel, KrausChannel) {
    let d = theory.dim();
    match theory.kind {
        TheoryKind::Stabilizer => {
            let n = theory.size;
            let code = rng.random_range(1..(1usize << (2 * n)));
            let p = pauli_string(code, n);
            let id = CMatrix::identity(d);
            let plus = (&id + &p).scale(0.5);
            let minus = (&id - &p).scale(0.5);
            let (a, b) = (random_fraction(rng), random_fraction(rng));
            let s = KrausChannel::new(vec![plus.scale(a.sqrt()), minus.scale(b.sqrt())]).expect("nonempty");
            let f = KrausChannel::new(vec![plus.scale((1.0 - a).sqrt()), minus.scale((1.0 - b).sqrt())])
                .expect("nonempty");
            (s, f)
        }
        _ => {
            let mut s = Vec::with_capacity(d);
            let mut f = Vec::with_capacity(d);
            for i in 0..d {
                let a = random_fraction(rng);
                let mut ks = CMatrix::zeros(d, d);
                ks[(i, i)] = C64::new(a.sqrt(), 0.0);
                let mut kf = CMatrix::zeros(d, d);
                kf[(i, i)] = C64::new((1.0 - a).sqrt(), 0.0);
                s.push(ks);
                f.push(kf);
            }
            (
                KrausChannel::new(s).expect("nonempty"),
                KrausChannel::new(f).expect("nonempty"),
            )
        }
    }
}

/// Splits each Kraus operator between the branches with a random weight.
fn kraus_split<R: Rng + ?Sized>(rng: &mut R, ch: &KrausChannel) -> (KrausChannel, KrausChannel) {
    let mut s = Vec::new();
    let mut f = Vec::new();
    for k in ch.kraus() {
        let a = random_fraction(rng);
        s.push(k.scale(a.sqrt()));
        f.push(k.scale((1.0 - a).sqrt()));
    }
    (
        KrausChannel::new(s).expect("nonempty"),
        KrausChannel::new(f).expect("nonempty"),
    )
}

#[derive(Clone, Debug)]
pub struct SampledInstrument {
    pub protocol: ProbabilisticProtocol,
    pub attempts: usize,
}

/// Draws a certified free instrument: a free channel combined with a Kraus
/// split, a free measurement before or after it, or no flag at all, and
/// optionally followed by further free channels on each branch.
pub fn sample_free_instrument<R: Rng + ?Sized>(
    theory: &Theory,
    structured: bool,
    tol_member: f64,
    rng: &mut R,
) -> Result<SampledInstrument> {
    let mut attempts = 0;
    while attempts < MAX_ATTEMPTS {
        let base = sample_free_channel(theory, structured, tol_member, rng)?;
        attempts += base.attempts;
        let c = base.channel;
        let (mut success, mut failure, shape) = match rng.random_range(0..4) {
            0 => (c.clone(), KrausChannel::zero(c.din(), c.dout()), "trivial"),
            1 => {
                let (s, f) = kraus_split(rng, &c);
                (s, f, "kraus-split")
            }
            2 => {
                let (s, f) = free_measurement(rng, theory);
                let other = sample_free_channel(theory, structured, tol_member, rng)?;
                attempts += other.attempts;
                (s.then(&c)?, f.then(&other.channel)?, "measure-then-channel")
            }
            _ => {
                let (s, f) = free_measurement(rng, theory);
                (c.then(&s)?, c.then(&f)?, "channel-then-measure")
            }
        };
        if rng.random::<f64>() < 0.3 {
            let post = sample_free_channel(theory, structured, tol_member, rng)?;
            attempts += post.attempts;
            success = success.then(&post.channel)?;
        }
        if rng.random::<f64>() < 0.3 {
            let post = sample_free_channel(theory, structured, tol_member, rng)?;
            attempts += post.attempts;
            failure = failure.then(&post.channel)?;
        }
        let proto = ProbabilisticProtocol {
            success,
            failure,
            family: format!("{}/{}", base.family, shape),
        };
        if certify_instrument(&proto, theory.free(), tol_member)?.certified {
            return Ok(SampledInstrument {
                protocol: proto,
                attempts,
            });
        }
    }
    Err(Error::SamplingExhausted { attempts })
}

/// Success probability and infidelity of the heralded output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub p: f64,
    pub eps: f64,
}

/// p = tr L(ρ); ε = 1 − ⟨ψ|L(ρ)/p|ψ⟩, or (0, 1) when p ≤ P_TOL.
pub fn evaluate_protocol(proto: &ProbabilisticProtocol, rho: &QuantumState, psi: &QuantumState) -> Result<Outcome> {
    if proto.success.din() != rho.dim() || proto.success.dout() != psi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "protocol {}→{} on state of dim {} with target of dim {}",
            proto.success.din(),
            proto.success.dout(),
            rho.dim(),
            psi.dim()
        )));
    }
    let out = proto.success.apply(rho.matrix());
    let p = out.trace().re;
    if p <= P_TOL {
        return Ok(Outcome { p: 0.0, eps: 1.0 });
    }
    let overlap = out.real_inner(psi.matrix()) / p;
    Ok(Outcome {
        p: p.min(1.0),
        eps: (1.0 - overlap).clamp(0.0, 1.0),
    })
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub theory: Theory,
    pub rho: QuantumState,
    pub target: QuantumState,
    pub samples: usize,
    pub seed: u64,
    pub structured: bool,
    /// Multiplies the bound before checking; 1 for real runs, >1 to check
    /// that the harness can detect violations.
    pub bound_scale: f64,
    /// Number of leading samples that also get the D_H monotone check.
    pub monotone_checks: usize,
    pub rdc: bool,
    pub tol: Tolerances,
}

impl CampaignConfig {
    pub fn new(theory: Theory, rho: QuantumState, target: QuantumState, samples: usize, seed: u64) -> Self {
        CampaignConfig {
            theory,
            rho,
            target,
            samples,
            seed,
            structured: true,
            bound_scale: 1.0,
            monotone_checks: 0,
            rdc: false,
            tol: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRow {
    pub index: usize,
    pub family: String,
    pub attempts: usize,
    pub p: f64,
    pub eps: f64,
    /// ε/p − bound when p > P_TOL.
    pub margin: Option<f64>,
    pub violation: bool,
    pub exact: bool,
    /// Upper end of min_ω D_H^ε(τ‖ω) when the monotone check ran.
    pub free_dh_hi: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub samples: usize,
    pub theory: String,
    pub structured: bool,
    pub rho: StateFile,
    pub target: StateFile,
    pub lambda_min: f64,
    pub f_psi: f64,
    pub r_lo: Option<f64>,
    pub r_hi: Option<f64>,
    pub deterministic_bound: f64,
    /// The ε/p bound actually checked (after `bound_scale`).
    pub eps_over_p_bound: f64,
    pub bound_scale: f64,
    pub slack: f64,
    /// Membership tolerance used to certify proportional-to-free branches.
    pub proportionality_tol: f64,
    pub total_attempts: usize,
    pub recertification_failures: usize,
    pub violation_count: usize,
    pub exact_count: usize,
    pub monotone_checks: usize,
    pub monotone_violations: usize,
    pub min_margin: Option<f64>,
    pub rows: Vec<SampleRow>,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
            && self.exact_count == 0
            && self.monotone_violations == 0
            && self.recertification_failures == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Lower-left Pareto frontier of the sampled (p, ε) points, ascending p.
    pub fn frontier(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = self.rows.iter().filter(|r| r.p > P_TOL).map(|r| (r.p, r.eps)).collect();
        pts.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
        let mut out = Vec::new();
        let mut best = f64::INFINITY;
        for (p, e) in pts {
            if e < best {
                out.push((p, e));
                best = e;
            }
        }
        out.reverse();
        out
    }

    pub fn frontier_csv(&self) -> String {
        let mut s = String::from("p,eps\n");
        for (p, e) in self.frontier() {
            s.push_str(&format!("{p},{e}\n"));
        }
        s
    }
}

struct Evaluated {
    row: SampleRow,
    protocol: ProbabilisticProtocol,
    recertified: bool,
    monotone_ok: bool,
}

/// Samples free instruments and checks each against the trade-off bound and
/// the impossibility of exact purification. Returns `ViolationFound` with
/// the full report when any check fails.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let free = cfg.theory.free();
    if cfg.rho.dim() != free.dim() || cfg.target.dim() != free.dim() {
        return Err(Error::DimensionMismatch("campaign state, target and theory dims differ".into()));
    }
    let prim = primitives(&cfg.rho, free, &cfg.target, !cfg.rdc, &cfg.tol)?;
    let report = tradeoff_report(free.name(), prim.clone(), cfg.rdc);
    let bound = report.eps_over_p_lower.unwrap_or(0.0) * cfg.bound_scale;
    let deterministic = report.eps_lower.unwrap_or(0.0);
    let neg_log_f = -prim.f_psi.log2();
    let tol_member = cfg.tol.member;

    let evaluated: Vec<Result<Evaluated>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, i as u64);
            let sampled = sample_free_instrument(&cfg.theory, cfg.structured, tol_member, &mut rng)?;
            let proto = sampled.protocol;
            let recertified = certify_instrument(&proto, free, tol_member)?.certified;
            let out = evaluate_protocol(&proto, &cfg.rho, &cfg.target)?;
            let margin = (out.p > P_TOL).then(|| out.eps / out.p - bound);
            let violation = margin.is_some_and(|m| m < -BOUND_SLACK);
            let exact = out.p > P_TOL && out.eps <= EXACT_EPS;
            let mut free_dh_hi = None;
            let mut monotone_ok = true;
            if i < cfg.monotone_checks && out.p > P_TOL && out.eps < 1.0 {
                let tau = QuantumState::from_matrix_unchecked(proto.success.apply(cfg.rho.matrix()).scale(1.0 / out.p));
                let opts = FreeDhOptions {
                    max_iter: 200,
                    gap_tol: 1e-8,
                    interval_tol: f64::INFINITY,
                };
                let hi = match min_free_dh_with(&tau, free, out.eps, opts) {
                    Ok(r) => r.hi,
                    Err(Error::ConvergenceFailure { hi, .. }) => hi,
                    Err(e) => return Err(e),
                };
                monotone_ok = hi >= neg_log_f - 1e-6;
                free_dh_hi = Some(hi);
            }
            Ok(Evaluated {
                row: SampleRow {
                    index: i,
                    family: proto.family.clone(),
                    attempts: sampled.attempts,
                    p: out.p,
                    eps: out.eps,
                    margin,
                    violation,
                    exact,
                    free_dh_hi,
                },
                protocol: proto,
                recertified,
                monotone_ok,
            })
        })
        .collect();

    let mut rows = Vec::with_capacity(cfg.samples);
    let mut first_bad: Option<(SampleRow, ProbabilisticProtocol)> = None;
    let mut total_attempts = 0;
    let mut recertification_failures = 0;
    let mut monotone_violations = 0;
    for e in evaluated {
        let e = e?;
        total_attempts += e.row.attempts;
        if !e.recertified {
            recertification_failures += 1;
        }
        if !e.monotone_ok {
            monotone_violations += 1;
        }
        let bad = e.row.violation || e.row.exact || !e.recertified || !e.monotone_ok;
        if bad && first_bad.is_none() {
            first_bad = Some((e.row.clone(), e.protocol));
        }
        rows.push(e.row);
    }
    let min_margin = rows.iter().filter_map(|r| r.margin).reduce(f64::min);
    let report = CampaignReport {
        seed: cfg.seed,
        samples: cfg.samples,
        theory: cfg.theory.label(),
        structured: cfg.structured,
        rho: StateFile::from_state(&cfg.rho),
        target: StateFile::from_state(&cfg.target),
        lambda_min: prim.lambda_min,
        f_psi: prim.f_psi,
        r_lo: prim.r_lo,
        r_hi: prim.r_hi,
        deterministic_bound: deterministic,
        eps_over_p_bound: bound,
        bound_scale: cfg.bound_scale,
        slack: BOUND_SLACK,
        proportionality_tol: tol_member,
        total_attempts,
        recertification_failures,
        violation_count: rows.iter().filter(|r| r.violation).count(),
        exact_count: rows.iter().filter(|r| r.exact).count(),
        monotone_checks: cfg.monotone_checks.min(cfg.samples),
        monotone_violations,
        min_margin,
        rows,
    };
    match first_bad {
        None => Ok(report),
        Some((row, proto)) => {
            let sample = serde_json::json!({
                "row": row,
                "success": KrausFile::from_channel(&proto.success),
                "failure": KrausFile::from_channel(&proto.failure),
            });
            Err(Error::ViolationFound {
                sample: sample.to_string(),
                report: Box::new(report),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::hadamard;

    #[test]
    fn identity_and_hadamard_certification() {
        let th = Theory::coherence(2).unwrap();
        assert!(certify_channel(&KrausChannel::identity(2), th.free(), 1e-7).unwrap());
        assert!(!certify_channel(&KrausChannel::unitary(hadamard()), th.free(), 1e-7).unwrap());
        let st = Theory::stabilizer(1).unwrap();
        assert!(certify_channel(&KrausChannel::unitary(hadamard()), st.free(), 1e-7).unwrap());
    }

    #[test]
    fn evaluate_examples() {
        let psi = QuantumState::plus();
        let id = ProbabilisticProtocol::trivial(KrausChannel::identity(2));
        let o = evaluate_protocol(&id, &psi, &psi).unwrap();
        assert!((o.p - 1.0).abs() < 1e-15 && o.eps < 1e-15);
        let zero = ProbabilisticProtocol::trivial(KrausChannel::zero(2, 2));
        assert_eq!(evaluate_protocol(&zero, &psi, &psi).unwrap(), Outcome { p: 0.0, eps: 1.0 });
    }

    #[test]
    fn empty_campaign_passes() {
        let th = Theory::coherence(2).unwrap();
        let rho = QuantumState::plus().depolarized(0.2);
        let psi = QuantumState::bloch_pure(0.9 * std::f64::consts::PI, 0.0);
        let r = run_campaign(&CampaignConfig::new(th, rho, psi, 0, 1)).unwrap();
        assert!(r.passed() && r.rows.is_empty() && r.min_margin.is_none());
    }

    #[test]
    fn generic_coherence_sampler_produces_certified_channels() {
        let th = Theory::coherence(2).unwrap();
        let mut rng = stream(5, 0);
        for _ in 0..20 {
            let c = sample_free_channel(&th, false, 1e-7, &mut rng).unwrap();
            assert!(certify_channel(&c.channel, th.free(), 1e-7).unwrap());
        }
    }
}
