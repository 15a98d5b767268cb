use purity_core::channels::{
    choi, d_min_choi, hadamard, max_free_fraction, pauli_x, verify_unitary_nogo, KrausChannel,
};
use purity_core::linalg::{CMatrix, QuantumState, C64};
use purity_core::random::{random_isometry, random_unitary, stream};
use purity_core::verifier::{sample_free_channel, Theory};
use purity_core::Error;
use rand::Rng;

/// Channel from a Haar isometry C^din → C^dout ⊗ C^env.
fn random_channel<R: Rng>(rng: &mut R, din: usize, dout: usize, env: usize) -> KrausChannel {
    let v = random_isometry(rng, dout * env, din);
    let kraus = (0..env)
        .map(|e| CMatrix::from_fn(dout, din, |r, c| v[(r * env + e, c)]))
        .collect();
    KrausChannel::new(kraus).unwrap()
}

fn phi(d: usize) -> CMatrix {
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    CMatrix::projector(&v)
}

#[test]
fn choi_examples() {
    let id = choi(&KrausChannel::identity(2)).unwrap();
    assert!(id.state.matrix().max_abs_diff(&phi(2)) <= 1e-15);
    assert!((id.state.purity() - 1.0).abs() <= 1e-12);
    let full = choi(&KrausChannel::depolarizing(1.0, 2).unwrap()).unwrap();
    assert!(full.state.matrix().max_abs_diff(&CMatrix::identity(4).scale(0.25)) <= 1e-15);
    let q = 0.3;
    let dep = choi(&KrausChannel::depolarizing(q, 2).unwrap()).unwrap();
    let mut want = phi(2).scale(1.0 - q);
    want.axpy(q / 4.0, &CMatrix::identity(4));
    assert!(dep.state.matrix().max_abs_diff(&want) <= 1e-12);
    assert!((dep.state.min_eigenvalue() - q / 4.0).abs() <= 1e-10);
}

#[test]
fn choi_marginal_is_maximally_mixed() {
    let mut rng = stream(71, 0);
    for _ in 0..20 {
        let n = random_channel(&mut rng, 3, 2, 2);
        let j = choi(&n).unwrap();
        let marginal = purity_core::linalg::partial_trace(&j.state, &[3, 2], &[0]).unwrap();
        assert!(marginal.matrix().max_abs_diff(&CMatrix::identity(3).scale(1.0 / 3.0)) <= 1e-9);
    }
}

#[test]
fn free_fraction_examples() {
    let dep = KrausChannel::depolarizing(0.1, 2).unwrap();
    assert!((max_free_fraction(&dep, &dep).unwrap() - 1.0).abs() <= 1e-9);
    let rep = KrausChannel::replacer(&QuantumState::maximally_mixed(2), 2);
    assert!(max_free_fraction(&dep, &rep).unwrap() >= 0.1 - 1e-12);
    let h = KrausChannel::unitary(hadamard());
    assert_eq!(max_free_fraction(&h, &rep).unwrap(), 0.0);
    assert_eq!(max_free_fraction(&h, &KrausChannel::identity(2)).unwrap(), 0.0);
}

#[test]
fn free_fraction_leaves_a_channel() {
    let mut rng = stream(72, 0);
    for _ in 0..30 {
        let n = random_channel(&mut rng, 2, 2, 4);
        let e = random_channel(&mut rng, 2, 2, 3);
        let p = max_free_fraction(&n, &e).unwrap();
        assert!((0.0..=1.0).contains(&p));
        let jn = choi(&n).unwrap();
        let je = choi(&e).unwrap();
        let mut rest = jn.state.matrix().clone();
        rest.axpy(-p, je.state.matrix());
        let min = purity_core::linalg::eigh(&rest).min();
        assert!(min >= -1e-9, "J_N − pJ_E has eigenvalue {min}");
        if p < 1.0 {
            // Slightly more and positivity breaks.
            let mut over = jn.state.matrix().clone();
            over.axpy(-(p * 1.001 + 1e-6), je.state.matrix());
            assert!(purity_core::linalg::eigh(&over).min() < 0.0);
        }
    }
}

#[test]
fn d_min_choi_examples() {
    let dep = KrausChannel::depolarizing(0.1, 2).unwrap();
    let rep = KrausChannel::replacer(&QuantumState::maximally_mixed(2), 2);
    assert!(d_min_choi(&dep, &dep).unwrap().abs() <= 1e-12);
    assert!(d_min_choi(&dep, &rep).unwrap().abs() <= 1e-12);
    let h = KrausChannel::unitary(hadamard());
    let x = KrausChannel::unitary(pauli_x());
    for e in [&rep, &dep, &x] {
        let c = choi(&h).unwrap().state.matrix().real_inner(choi(e).unwrap().state.matrix());
        assert!((d_min_choi(&h, e).unwrap() + c.log2()).abs() <= 1e-9);
    }
}

/// post ∘ (N ⊗ id_r) ∘ pre
fn superchannel(n: &KrausChannel, r: usize, pre: &CMatrix, post: &KrausChannel) -> KrausChannel {
    KrausChannel::unitary(pre.clone())
        .then(&n.tensor_identity(r))
        .unwrap()
        .then(post)
        .unwrap()
}

#[test]
fn processing_cannot_increase_choi_d_min() {
    let mut rng = stream(73, 0);
    let mut checked = 0;
    for case in 0..200 {
        let r = 1 + case % 2;
        let n = random_channel(&mut rng, 2, 2, 1 + case % 3);
        let m = random_channel(&mut rng, 2, 2, 2 + case % 3);
        let pre = random_unitary(&mut rng, 2 * r);
        let dd = 2 + case % 2;
        let post = random_channel(&mut rng, 2 * r, dd, 2);
        let before = d_min_choi(&n, &m).unwrap();
        let tn = superchannel(&n, r, &pre, &post);
        let tm = superchannel(&m, r, &pre, &post);
        let after = d_min_choi(&tn, &tm).unwrap();
        if before.is_finite() {
            assert!(after <= before + 1e-9, "case {case}: {after} > {before}");
            checked += 1;
        }
    }
    assert!(checked > 150);
}

#[test]
fn nogo_hadamard_from_noisy_channel() {
    let theory = Theory::coherence(2).unwrap();
    let n = KrausChannel::depolarizing(0.1, 2).unwrap();
    let r = verify_unitary_nogo(&n, &hadamard(), &theory, 200, 10, 1e-7).unwrap();
    assert!(r.p_star >= 0.1 - 1e-12);
    assert!(r.d_min_n_free_lower_bound.abs() <= 1e-12);
    assert!(r.margin > 0.0 && r.max_choi_overlap < 1.0);
}

#[test]
fn nogo_needs_a_free_component() {
    let theory = Theory::coherence(2).unwrap();
    let n = KrausChannel::unitary(hadamard());
    assert!(matches!(
        verify_unitary_nogo(&n, &hadamard(), &theory, 50, 3, 1e-7),
        Err(Error::PreconditionFailed(_))
    ));
    let identity = CMatrix::identity(2);
    assert!(matches!(
        verify_unitary_nogo(&KrausChannel::depolarizing(0.1, 2).unwrap(), &identity, &theory, 10, 3, 1e-7),
        Err(Error::PreconditionFailed(_))
    ));
}

#[test]
fn fully_depolarizing_is_all_free() {
    let theory = Theory::coherence(2).unwrap();
    let n = KrausChannel::depolarizing(1.0, 2).unwrap();
    let r = verify_unitary_nogo(&n, &hadamard(), &theory, 20, 4, 1e-7).unwrap();
    assert!((r.p_star - 1.0).abs() <= 1e-9);
}

#[test]
fn stabilizer_nogo_for_t_gate() {
    let theory = Theory::stabilizer(1).unwrap();
    let t = CMatrix::from_real_diagonal(&[1.0, 0.0]);
    let mut t = t;
    t[(1, 1)] = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let n = KrausChannel::depolarizing(0.2, 2).unwrap();
    let r = verify_unitary_nogo(&n, &t, &theory, 100, 8, 1e-7).unwrap();
    assert!(r.p_star > 0.0 && r.margin > 0.0);
}

#[test]
fn noisy_channels_never_simulate_identity_exactly() {
    // E₂∘N∘E₁ = (1−q)E₂∘E₁ + q·(replacer), and a replacer has entanglement
    // fidelity 1/d², so 1 − F_e ≥ q(1 − 1/d²).
    let theory = Theory::coherence(2).unwrap();
    let target = phi(2);
    for q in [0.01, 0.1, 0.5] {
        let n = KrausChannel::depolarizing(q, 2).unwrap();
        let floor = q * (1.0 - 0.25);
        for i in 0..250 {
            let mut rng = stream(74, i);
            let structured = i % 2 == 0;
            let e1 = sample_free_channel(&theory, structured, 1e-7, &mut rng).unwrap().channel;
            let e2 = sample_free_channel(&theory, structured, 1e-7, &mut rng).unwrap().channel;
            let sim = e1.then(&n).unwrap().then(&e2).unwrap();
            let fe = choi(&sim).unwrap().state.matrix().real_inner(&target);
            assert!(1.0 - fe >= floor - 1e-12, "q {q} sample {i}: infidelity {}", 1.0 - fe);
        }
    }
}
