use crate::error::{Error, Result};
use crate::free_models::FreeStatePolytope;
use crate::linalg::QuantumState;

/// Purity tolerance for targets.
pub const TARGET_PURITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct FreeOverlap {
    /// f_ψ = max_v tr(ψ v)
    pub value: f64,
    /// Index of the first vertex attaining the maximum.
    pub argmax: usize,
}

/// Maximal overlap of a pure target with the free states. The objective is
/// linear, so the maximum over the hull is attained at a vertex.
pub fn free_overlap(psi: &QuantumState, free: &FreeStatePolytope) -> Result<FreeOverlap> {
    let purity = psi.purity();
    if (purity - 1.0).abs() > TARGET_PURITY_TOL {
        return Err(Error::NotPure { purity });
    }
    if psi.dim() != free.dim() {
        return Err(Error::DimensionMismatch(format!(
            "target of dim {} vs free set of dim {}",
            psi.dim(),
            free.dim()
        )));
    }
    let mut best = FreeOverlap {
        value: f64::NEG_INFINITY,
        argmax: 0,
    };
    for (i, v) in free.vertices().iter().enumerate() {
        let o = psi.matrix().real_inner(v.matrix());
        if o > best.value {
            best = FreeOverlap { value: o, argmax: i };
        }
    }
    best.value = best.value.clamp(0.0, 1.0);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_models::{incoherent_polytope, stabilizer_polytope};

    #[test]
    fn plus_against_incoherent() {
        let f = free_overlap(&QuantumState::plus(), &incoherent_polytope(2).unwrap()).unwrap();
        assert!((f.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn t_state_against_stabilizers() {
        let f = free_overlap(&QuantumState::t_state(), &stabilizer_polytope(1).unwrap()).unwrap();
        assert!((f.value - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_target_rejected() {
        let r = free_overlap(&QuantumState::maximally_mixed(2), &incoherent_polytope(2).unwrap());
        assert!(matches!(r, Err(Error::NotPure { .. })));
    }
}
