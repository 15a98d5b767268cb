//! Parsing of state, polytope, theory and channel arguments.
//!
//! Every argument that names an object accepts either a JSON file path or a
//! short built-in spec:
//!
//! ```text
//! states     plus | t | mixed:D | basis:D:I | bloch:THETA:PHI | noisy-plus:Q | noisy-t:Q
//! polytopes  coherence:D | stabilizer:N
//! channels   identity:D | depol:Q:D | replacer:D | unitary:hadamard | unitary:x | unitary:t
//! ```

use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::Path;

use purity_core::channels::{hadamard, pauli_x, KrausChannel};
use purity_core::free_models::{incoherent_polytope, polytope_from_json, stabilizer_polytope};
use purity_core::io::{channel_from_json, state_from_json};
use purity_core::verifier::Theory;
use purity_core::{CMatrix, Error, FreeStatePolytope, QuantumState, Result, Tolerances, C64};

fn bad(what: &str, spec: &str) -> Error {
    Error::Parse(format!("cannot read {what} '{spec}': not a file and not a known spec"))
}

fn num<T: std::str::FromStr>(what: &str, spec: &str, s: &str) -> Result<T> {
    s.parse().map_err(|_| bad(what, spec))
}

fn is_file(spec: &str) -> bool {
    Path::new(spec).is_file()
}

pub fn state(spec: &str, validate: bool, tol: &Tolerances) -> Result<QuantumState> {
    if is_file(spec) {
        return state_from_json(&fs::read_to_string(spec)?, validate, tol);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let s = match parts.as_slice() {
        ["plus"] => QuantumState::plus(),
        ["t"] | ["T"] => QuantumState::t_state(),
        ["mixed", d] => QuantumState::maximally_mixed(num("state", spec, d)?),
        ["basis", d, i] => {
            let (d, i): (usize, usize) = (num("state", spec, d)?, num("state", spec, i)?);
            if i >= d {
                return Err(Error::InvalidParameter(format!("basis index {i} out of range for dim {d}")));
            }
            QuantumState::basis(d, i)
        }
        ["bloch", theta, phi] => QuantumState::bloch_pure(num("state", spec, theta)?, num("state", spec, phi)?),
        ["noisy-plus", q] => QuantumState::plus().depolarized(unit("state", spec, q)?),
        ["noisy-t", q] => QuantumState::t_state().depolarized(unit("state", spec, q)?),
        _ => return Err(bad("state", spec)),
    };
    Ok(s)
}

fn unit(what: &str, spec: &str, s: &str) -> Result<f64> {
    let q: f64 = num(what, spec, s)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("{q} outside [0, 1] in '{spec}'")));
    }
    Ok(q)
}

pub fn polytope(spec: &str, tol: &Tolerances) -> Result<FreeStatePolytope> {
    if is_file(spec) {
        let name = Path::new(spec)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "polytope".into());
        return polytope_from_json(&name, &fs::read_to_string(spec)?, tol);
    }
    match spec.split(':').collect::<Vec<_>>().as_slice() {
        ["coherence", d] => incoherent_polytope(num("polytope", spec, d)?),
        ["stabilizer", n] => stabilizer_polytope(num("polytope", spec, n)?),
        _ => Err(bad("polytope", spec)),
    }
}

/// Theories carry sampler knowledge; a polytope file gives a custom theory.
pub fn theory(spec: &str, tol: &Tolerances) -> Result<Theory> {
    match spec.split(':').collect::<Vec<_>>().as_slice() {
        ["coherence", d] => Theory::coherence(num("theory", spec, d)?),
        ["stabilizer", n] => Theory::stabilizer(num("theory", spec, n)?),
        _ if is_file(spec) => Ok(Theory::custom(polytope(spec, tol)?)),
        _ => Err(bad("theory", spec)),
    }
}

pub fn unitary(spec: &str) -> Result<CMatrix> {
    match spec {
        "hadamard" | "h" => Ok(hadamard()),
        "x" => Ok(pauli_x()),
        "t" => {
            let mut t = CMatrix::identity(2);
            t[(1, 1)] = C64::from_polar(1.0, FRAC_PI_4);
            Ok(t)
        }
        _ => Err(bad("unitary", spec)),
    }
}

pub fn channel(spec: &str) -> Result<KrausChannel> {
    if is_file(spec) {
        return channel_from_json(&fs::read_to_string(spec)?);
    }
    match spec.split(':').collect::<Vec<_>>().as_slice() {
        ["identity", d] => Ok(KrausChannel::identity(num("channel", spec, d)?)),
        ["depol", q, d] => KrausChannel::depolarizing(unit("channel", spec, q)?, num("channel", spec, d)?),
        ["replacer", d] => {
            let d: usize = num("channel", spec, d)?;
            Ok(KrausChannel::replacer(&QuantumState::maximally_mixed(d), d))
        }
        ["unitary", u] => Ok(KrausChannel::unitary(unitary(u)?)),
        _ => Err(bad("channel", spec)),
    }
}
