use purity_core::free_models::{incoherent_polytope, polytope_membership, stabilizer_polytope};
use purity_core::linalg::{eigh, partial_trace_matrix, CMatrix, QuantumState};
use purity_core::monotones::{robustness_generalized, robustness_standard, RobustnessCertificate};
use purity_core::random::{random_isometry, random_state, stream};
use purity_core::FreeStatePolytope;
use rand::Rng;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn noisy_t() -> QuantumState {
    QuantumState::t_state().depolarized(0.2)
}

fn check_certificate(rho: &QuantumState, free: &FreeStatePolytope, c: &RobustnessCertificate) {
    assert!(c.lo <= c.hi + 1e-12, "lo {} above hi {}", c.lo, c.hi);
    let w = c.witness.as_ref().expect("witness");
    assert!(eigh(w).min() >= -1e-9);
    for v in free.vertices() {
        assert!(w.real_inner(v.matrix()) <= 1.0 + 1e-9);
    }
    let dual = w.real_inner(rho.matrix()) - 1.0;
    assert!(dual <= c.hi + 1e-9 && dual >= c.lo - 1e-9, "dual {dual} vs [{}, {}]", c.lo, c.hi);

    let s = c.primal.s;
    let omega = QuantumState::from_matrix_unchecked(c.primal.omega.clone());
    assert!(polytope_membership(&omega, free, 1e-7).unwrap().distance <= 1e-7);
    if let Some(sigma) = &c.primal.sigma {
        assert!(eigh(sigma).min() >= -1e-9);
        assert!((sigma.trace().re - 1.0).abs() <= 1e-9);
        let mut mix = rho.matrix().clone();
        mix.axpy(s, sigma);
        assert!(mix.scale(1.0 / (1.0 + s)).max_abs_diff(&c.primal.omega) <= 1e-9);
    }
    assert!((s - c.hi).abs() <= 1e-12);
}

#[test]
fn t_state_generalized() {
    let free = stabilizer_polytope(1).unwrap();
    let rho = QuantumState::t_state();
    let c = robustness_generalized(&rho, &free, 1e-7).unwrap();
    let want = 3.0 - 2.0 * SQRT2;
    assert!(c.lo <= want + 1e-9 && want <= c.hi + 1e-9 && c.gap() <= 1e-7, "{} {}", c.lo, c.hi);
    check_certificate(&rho, &free, &c);
}

#[test]
fn t_state_standard() {
    let free = stabilizer_polytope(1).unwrap();
    let rho = QuantumState::t_state();
    let c = robustness_standard(&rho, &free).unwrap();
    assert!((c.hi - (SQRT2 - 1.0) / 2.0).abs() <= 1e-9, "{}", c.hi);
    let sigma_w = c.primal.sigma_weights.as_ref().unwrap();
    assert!((sigma_w.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    assert!(sigma_w.iter().all(|&x| x >= -1e-12));
}

#[test]
fn noisy_t_state() {
    let free = stabilizer_polytope(1).unwrap();
    let rho = noisy_t();
    let g = robustness_generalized(&rho, &free, 1e-8).unwrap();
    // Frozen from an external SDP solve.
    assert!((g.hi - 0.054_415_587_7).abs() <= 1e-6, "{} {}", g.lo, g.hi);
    check_certificate(&rho, &free, &g);
    let s = robustness_standard(&rho, &free).unwrap();
    assert!((s.hi - (0.8 * SQRT2 - 1.0) / 2.0).abs() <= 1e-9, "{}", s.hi);
    assert!(g.hi <= s.hi + 1e-9);
}

#[test]
fn two_t_states_against_product_polytope() {
    let one = stabilizer_polytope(1).unwrap();
    let free = one.tensor(&one);
    assert_eq!(free.len(), 36);
    let t = QuantumState::t_state();
    let rho = t.kron(&t);
    let c = robustness_generalized(&rho, &free, 1e-6).unwrap();
    let want = 23.0 - 16.0 * SQRT2;
    assert!(c.lo <= want + 1e-6 && want <= c.hi + 1e-6, "{} {}", c.lo, c.hi);
    check_certificate(&rho, &free, &c);
}

#[test]
fn qubit_coherence_is_l1_norm() {
    let free = incoherent_polytope(2).unwrap();
    let mut rng = stream(91, 0);
    for _ in 0..20 {
        let rho = random_state(&mut rng, 2, 2);
        let c = robustness_generalized(&rho, &free, 1e-8).unwrap();
        let l1 = 2.0 * rho.matrix()[(0, 1)].norm();
        assert!(c.lo <= l1 + 1e-9 && l1 <= c.hi + 1e-9, "{l1} vs [{}, {}]", c.lo, c.hi);
        check_certificate(&rho, &free, &c);
    }
}

#[test]
fn free_states_have_zero_robustness() {
    let free = stabilizer_polytope(1).unwrap();
    let rho = QuantumState::from_matrix_unchecked(free.combine(&[0.1, 0.2, 0.3, 0.1, 0.2, 0.1]));
    let c = robustness_generalized(&rho, &free, 1e-9).unwrap();
    assert!(c.hi <= 1e-9);
    let s = robustness_standard(&rho, &free).unwrap();
    assert!(s.hi <= 1e-9);
}

/// Random sub-operation L(X) = P tr_env(V X V†) P with P a coordinate
/// projector on the output; returns tr L(X) as a functional.
fn random_sub_operation<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let dout = 2 + rng.random_range(0..2);
    let env = d.div_ceil(dout) + rng.random_range(0..2);
    let v = random_isometry(rng, dout * env, d);
    let keep: Vec<bool> = (0..dout).map(|_| rng.random::<bool>()).collect();
    // tr L(X) = tr(E X) with E = Σ_i V† (|i⟩⟨i| ⊗ I) V over kept i.
    let mut p = CMatrix::zeros(dout * env, dout * env);
    for (i, &k) in keep.iter().enumerate() {
        if k {
            for e in 0..env {
                p[(i * env + e, i * env + e)] = 1.0.into();
            }
        }
    }
    let e = v.adjoint().matmul(&p).matmul(&v);
    // Sanity: same functional through the explicit map.
    let x = CMatrix::identity(d).scale(1.0 / d as f64);
    let out = partial_trace_matrix(&v.conjugate(&x), &[dout, env], &[0]).unwrap();
    let direct: f64 = (0..dout).filter(|&i| keep[i]).map(|i| out[(i, i)].re).sum();
    assert!((direct - e.real_inner(&x)).abs() <= 1e-12);
    e
}

#[test]
fn sub_operations_respect_certificate_state() {
    let mut rng = stream(93, 0);
    let cases: Vec<(QuantumState, FreeStatePolytope)> = vec![
        (QuantumState::t_state(), stabilizer_polytope(1).unwrap()),
        (noisy_t(), stabilizer_polytope(1).unwrap()),
        (QuantumState::plus(), incoherent_polytope(2).unwrap()),
        (random_state(&mut rng, 3, 3), incoherent_polytope(3).unwrap()),
    ];
    for (rho, free) in cases {
        let c = robustness_generalized(&rho, &free, 1e-7).unwrap();
        for _ in 0..250 {
            let e = random_sub_operation(&mut rng, rho.dim());
            let l_omega = e.real_inner(&c.primal.omega);
            let l_rho = e.real_inner(rho.matrix());
            assert!(l_omega >= l_rho / (1.0 + c.hi) - 1e-9, "{l_omega} < {l_rho}/(1+{})", c.hi);
        }
    }
}
