//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use purity_core::linalg::{partial_trace_matrix, CMatrix, QuantumState};
use purity_core::random::random_isometry;
use rand::Rng;

/// Classical Neyman–Pearson: fill the type-I budget with outcomes in order
/// of increasing likelihood ratio q_i/p_i, the last one fractionally.
pub fn knapsack_beta(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let mut order: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    order.sort_by(|&a, &b| (q[a] / p[a]).total_cmp(&(q[b] / p[b])));
    let mut need = 1.0 - eps;
    let mut beta = 0.0;
    for i in order {
        if need <= 0.0 {
            break;
        }
        let take = (need / p[i]).min(1.0);
        beta += take * q[i];
        need -= take * p[i];
    }
    beta
}

fn bloch(m: &CMatrix) -> [f64; 3] {
    [2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, m[(0, 0)].re - m[(1, 1)].re]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// min s·m over |m| ≤ radius with r·m ≥ c, in closed form; None if empty.
fn ball_halfspace_min(s: [f64; 3], r: [f64; 3], radius: f64, c: f64) -> Option<f64> {
    let (ns, nr) = (norm(s), norm(r));
    if nr < 1e-300 {
        return (c <= 0.0).then_some(-radius * ns);
    }
    // Unconstrained minimizer m = −radius·ŝ.
    let free_val = -radius * ns;
    let free_ok = ns < 1e-300 || -radius * dot(r, s) / ns >= c;
    if free_ok {
        return Some(free_val);
    }
    let h = c / nr;
    if h > radius {
        return None;
    }
    let rhat = [r[0] / nr, r[1] / nr, r[2] / nr];
    let s_par = dot(s, rhat);
    let s_perp = (ns * ns - s_par * s_par).max(0.0).sqrt();
    let disk = (radius * radius - h * h).max(0.0).sqrt();
    Some(s_par * h - s_perp * disk)
}

/// Brute-force β_ε for qubits. Writing M = aI + m·σ, the test constraints
/// are |m| ≤ min(a, 1 − a) and a + m·r ≥ 1 − ε, with objective a + m·s.
/// For fixed a the inner problem is closed form; the outer value is convex
/// in a and found by golden-section search.
pub fn qubit_beta_bruteforce(rho: &QuantumState, sigma: &QuantumState, eps: f64) -> f64 {
    let r = bloch(rho.matrix());
    let s = bloch(sigma.matrix());
    let inner = |a: f64| ball_halfspace_min(s, r, a.min(1.0 - a), 1.0 - eps - a).map(|v| a + v);
    // Feasibility is monotone in a; bisect for the left end.
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    if inner(0.0).is_none() {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if inner(mid).is_some() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo = hi;
    }
    let f = |a: f64| inner(a).unwrap_or(f64::INFINITY);
    let (mut a, mut b) = (lo, 1.0);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    f(lo).min(f(1.0)).min(f1).min(f2)
}

/// A random channel C^d → C^dout: Haar isometry into C^dout ⊗ C^env, then
/// the environment is traced out.
pub fn random_channel_apply<R: Rng + ?Sized>(rng: &mut R, d: usize, dout: usize, env: usize) -> impl Fn(&CMatrix) -> CMatrix {
    let v = random_isometry(rng, dout * env, d);
    move |rho: &CMatrix| {
        let big = v.conjugate(rho);
        partial_trace_matrix(&big, &[dout, env], &[0]).expect("dims match")
    }
}

pub fn state(m: CMatrix) -> QuantumState {
    QuantumState::from_matrix_unchecked(m)
}
