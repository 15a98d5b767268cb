use proptest::prelude::*;
use purity_core::bounds::{overhead_formula, tradeoff_formula};
use purity_core::free_models::{incoherent_polytope, polytope_membership, stabilizer_polytope};
use purity_core::linalg::{eigh, fidelity, partial_trace, CMatrix};
use purity_core::monotones::{beta_eps, d_h, free_overlap};
use purity_core::random::{random_hermitian, random_pure_state, random_state, stream};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn eigh_reconstructs(seed in any::<u64>(), d in 2usize..=16) {
        let h = random_hermitian(&mut stream(seed, 0), d);
        let e = eigh(&h);
        let err = (&e.reconstruct() - &h).frobenius_norm();
        prop_assert!(err <= 1e-12 * h.frobenius_norm().max(1.0) * d as f64);
        for w in e.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        let mut v = CMatrix::zeros(d, d);
        for k in 0..d {
            for (i, x) in e.vector(k).into_iter().enumerate() {
                v[(i, k)] = x;
            }
        }
        prop_assert!(v.adjoint().matmul(&v).max_abs_diff(&CMatrix::identity(d)) <= 1e-12);
    }

    #[test]
    fn lambda_min_is_multiplicative(seed in any::<u64>(), d1 in 2usize..=4, d2 in 2usize..=4) {
        let mut rng = stream(seed, 0);
        let a = random_state(&mut rng, d1, d1);
        let b = random_state(&mut rng, d2, d2);
        let lhs = a.kron(&b).min_eigenvalue();
        prop_assert!((lhs - a.min_eigenvalue() * b.min_eigenvalue()).abs() <= 1e-10);
    }

    #[test]
    fn partial_trace_undoes_kron(seed in any::<u64>(), d1 in 1usize..=4, d2 in 1usize..=4, d3 in 1usize..=3) {
        let mut rng = stream(seed, 0);
        let a = random_state(&mut rng, d1, d1);
        let b = random_state(&mut rng, d2, 1);
        let c = random_state(&mut rng, d3, d3);
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        prop_assert!(left.matrix().max_abs_diff(right.matrix()) <= 1e-14);
        let dims = [d1, d2, d3];
        prop_assert!(partial_trace(&left, &dims, &[0]).unwrap().matrix().max_abs_diff(a.matrix()) <= 1e-12);
        prop_assert!(partial_trace(&left, &dims, &[1]).unwrap().matrix().max_abs_diff(b.matrix()) <= 1e-12);
        let ac = a.kron(&c);
        prop_assert!(partial_trace(&left, &dims, &[0, 2]).unwrap().matrix().max_abs_diff(ac.matrix()) <= 1e-12);
    }

    #[test]
    fn fidelity_with_pure_is_overlap(seed in any::<u64>(), d in 2usize..=5) {
        let mut rng = stream(seed, 0);
        let rho = random_state(&mut rng, d, d);
        let psi = random_pure_state(&mut rng, d);
        let f = fidelity(&rho, &psi).unwrap();
        prop_assert!((f - rho.matrix().real_inner(psi.matrix())).abs() <= 1e-10);
    }

    #[test]
    fn beta_monotone_in_eps(seed in any::<u64>(), d in 2usize..=4, e1 in 0.0f64..0.9, de in 0.0f64..0.1) {
        let mut rng = stream(seed, 0);
        let rho = random_state(&mut rng, d, d);
        let sigma = random_state(&mut rng, d, 1 + (seed as usize % d));
        let e2 = e1 + de;
        let b1 = beta_eps(&rho, &sigma, e1).unwrap().beta;
        let b2 = beta_eps(&rho, &sigma, e2).unwrap().beta;
        prop_assert!(b2 <= b1 + 1e-12);
        prop_assert!(d_h(&rho, &sigma, e2).unwrap() >= d_h(&rho, &sigma, e1).unwrap() - 1e-9);
    }

    #[test]
    fn tradeoff_bound_decreases_in_r(lam in 0.001f64..0.5, f in 0.0f64..0.999, r1 in 0.0f64..3.0, dr in 0.0f64..3.0) {
        prop_assert!(tradeoff_formula(lam, f, r1 + dr) <= tradeoff_formula(lam, f, r1));
    }

    #[test]
    fn overhead_monotone(
        lam in 0.01f64..0.5,
        f in 0.0f64..0.99,
        r in 0.0f64..1.0,
        eps in 1e-9f64..1e-2,
        k in 1.0f64..10.0,
        p in 0.01f64..0.5,
        q in 1.0f64..2.0,
    ) {
        let base = overhead_formula(lam, f, r, eps, p);
        prop_assert!(overhead_formula(lam, f, r, eps * k, p) <= base + 1e-12);
        prop_assert!(overhead_formula(lam, f, r, eps, (p * q).min(1.0)) >= base - 1e-12);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn membership_ignores_vertex_order(seed in any::<u64>(), use_stab in any::<bool>()) {
        let mut rng = stream(seed, 0);
        let poly = if use_stab { stabilizer_polytope(1).unwrap() } else { incoherent_polytope(3).unwrap() };
        let rho = random_state(&mut rng, poly.dim(), 2);
        let mut order: Vec<usize> = (0..poly.len()).collect();
        order.reverse();
        order.rotate_left(seed as usize % poly.len());
        let a = polytope_membership(&rho, &poly, 1e-9).unwrap().distance;
        let b = polytope_membership(&rho, &poly.permuted(&order), 1e-9).unwrap().distance;
        prop_assert!((a - b).abs() <= 1e-7);
        for v in poly.vertices() {
            prop_assert!(polytope_membership(v, &poly, 1e-9).unwrap().distance <= 1e-9);
        }
    }

    #[test]
    fn overlap_ignores_order_and_interior_points(seed in any::<u64>()) {
        let mut rng = stream(seed, 0);
        let poly = stabilizer_polytope(1).unwrap();
        let psi = random_pure_state(&mut rng, 2);
        let base = free_overlap(&psi, &poly).unwrap();
        let mut order: Vec<usize> = (0..poly.len()).collect();
        order.rotate_left(1 + seed as usize % 5);
        let perm = free_overlap(&psi, &poly.permuted(&order)).unwrap();
        prop_assert!((base.value - perm.value).abs() <= 1e-14);
        // Vertices must be pure, so interior points cannot join the list;
        // instead no convex combination may beat the best vertex.
        for k in 0..8 {
            let w: Vec<f64> = (0..poly.len()).map(|i| ((i * 7 + k * 3) % 5) as f64).collect();
            let total: f64 = w.iter().sum();
            let w: Vec<f64> = w.iter().map(|x| x / total).collect();
            prop_assert!(poly.combine(&w).real_inner(psi.matrix()) <= base.value + 1e-14);
        }
        prop_assert!(poly.barycenter().matrix().real_inner(psi.matrix()) <= base.value + 1e-14);
        prop_assert!((poly.vertices()[base.argmax].matrix().real_inner(psi.matrix()) - base.value).abs() <= 1e-14);
    }
}
