//! No-go bounds for purification: error, error/probability trade-off,
//! distillation overhead and magic-state overhead.
//!
//! Every bound is a function of three primitives: λ_min of the input, the
//! free overlap f_ψ of the target and the generalized robustness R of the
//! input. R enters through its certified upper end so that solver slack can
//! only weaken a bound. The value at the lower end is reported alongside.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_models::{stabilizer_polytope, FreeStatePolytope};
use crate::linalg::{QuantumState, Tolerances};
use crate::monotones::{free_overlap, robustness_generalized};

/// λ_min at or below this is treated as rank deficient.
pub const FULL_RANK_TOL: f64 = 1e-9;
/// Targets with f_ψ ≥ 1 − FREE_TARGET_TOL count as free.
pub const FREE_TARGET_TOL: f64 = 1e-9;

/// f_T = (2 + √2)/4, the stabilizer overlap of one T state.
pub fn t_state_overlap() -> f64 {
    (2.0 + std::f64::consts::SQRT_2) / 4.0
}

/// (4 − 2√2)^m, the inverse stabilizer overlap of m T states.
pub fn t_overlap_inverse(m: u32) -> f64 {
    (4.0 - 2.0 * std::f64::consts::SQRT_2).powi(m as i32)
}

/// λ(1 − f)
pub fn deterministic_formula(lambda_min: f64, f_psi: f64) -> f64 {
    lambda_min * (1.0 - f_psi)
}

/// λ(1 − f)/(1 + R)
pub fn tradeoff_formula(lambda_min: f64, f_psi: f64, r: f64) -> f64 {
    lambda_min * (1.0 - f_psi) / (1.0 + r)
}

/// log_{(1+R)/λ} ((1 − f)p/ε), before clamping.
pub fn overhead_formula(lambda_min: f64, f_psi: f64, r: f64, eps: f64, p: f64) -> f64 {
    ((1.0 - f_psi) * p / eps).ln() / ((1.0 + r) / lambda_min).ln()
}

/// log_{1/λ} ((1 − f)/ε), before clamping.
pub fn deterministic_overhead_formula(lambda_min: f64, f_psi: f64, eps: f64) -> f64 {
    ((1.0 - f_psi) / eps).ln() / (1.0 / lambda_min).ln()
}

/// (1/m) log_{(1+R)/λ} [ (x − 1)p / (x m ε) ] with x = (4 − 2√2)^m.
pub fn magic_formula(lambda_min: f64, r: f64, m: u32, eps: f64, p: f64) -> f64 {
    let x = t_overlap_inverse(m);
    let mf = m as f64;
    ((x - 1.0) * p / (x * mf * eps)).ln() / ((1.0 + r) / lambda_min).ln() / mf
}

/// Clamps a possibly vacuous bound to zero and reports whether it was.
fn clamp_vacuous(v: f64) -> (f64, bool) {
    if v > 0.0 {
        (v, false)
    } else {
        (0.0, true)
    }
}

/// Inputs the bounds are built from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Primitives {
    pub lambda_min: f64,
    pub f_psi: f64,
    /// Certified interval for R; absent when not needed.
    pub r_lo: Option<f64>,
    pub r_hi: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BoundOptions {
    /// Resource-destroying-channel mode: drop the 1/(1+R) factor.
    pub rdc: bool,
    pub tol: Tolerances,
}

fn check_full_rank(lambda_min: f64) -> Result<()> {
    if lambda_min <= FULL_RANK_TOL {
        return Err(Error::NotFullRank {
            min_eigenvalue: lambda_min,
        });
    }
    Ok(())
}

fn check_target(f_psi: f64) -> Result<()> {
    if f_psi >= 1.0 - FREE_TARGET_TOL {
        return Err(Error::FreeTarget { overlap: f_psi });
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::BadEpsilon(eps));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("success probability {p} outside (0, 1]")));
    }
    Ok(())
}

fn robustness_interval(rho: &QuantumState, free: &FreeStatePolytope, tol: &Tolerances) -> Result<(f64, f64)> {
    let c = robustness_generalized(rho, free, tol.rob)?;
    Ok((c.lo, c.hi))
}

/// Computes λ_min, f_ψ and, when `with_robustness`, the R interval, checking
/// the full-rank and non-free-target preconditions.
pub fn primitives(
    rho: &QuantumState,
    free: &FreeStatePolytope,
    psi: &QuantumState,
    with_robustness: bool,
    tol: &Tolerances,
) -> Result<Primitives> {
    let lambda_min = rho.min_eigenvalue();
    check_full_rank(lambda_min)?;
    let f_psi = free_overlap(psi, free)?.value;
    check_target(f_psi)?;
    let (r_lo, r_hi) = if with_robustness {
        let (lo, hi) = robustness_interval(rho, free, tol)?;
        (Some(lo), Some(hi))
    } else {
        (None, None)
    };
    Ok(Primitives {
        lambda_min,
        f_psi,
        r_lo,
        r_hi,
    })
}

/// Evaluated bounds with the inputs that produced them. Fields that do not
/// apply to the requested bound are `None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub theory: String,
    pub inputs: Primitives,
    pub eps: Option<f64>,
    pub p: Option<f64>,
    pub m: Option<u32>,
    pub eps_lower: Option<f64>,
    pub eps_over_p_lower: Option<f64>,
    /// The trade-off bound evaluated at the lower end of the R interval.
    pub eps_over_p_lower_at_r_lo: Option<f64>,
    pub n_lower: Option<f64>,
    pub n_lower_deterministic: Option<f64>,
    pub c_lower: Option<f64>,
    pub full_rank: bool,
    pub target_nonfree: bool,
    pub vacuous: bool,
    pub rdc: bool,
}

impl BoundReport {
    fn new(theory: &str, inputs: Primitives, rdc: bool) -> Self {
        BoundReport {
            theory: theory.to_string(),
            inputs,
            eps: None,
            p: None,
            m: None,
            eps_lower: None,
            eps_over_p_lower: None,
            eps_over_p_lower_at_r_lo: None,
            n_lower: None,
            n_lower_deterministic: None,
            c_lower: None,
            full_rank: true,
            target_nonfree: true,
            vacuous: false,
            rdc,
        }
    }
}

/// ε ≥ λ_min(ρ)(1 − f_ψ) for deterministic protocols.
pub fn deterministic_error_bound(rho: &QuantumState, free: &FreeStatePolytope, psi: &QuantumState) -> Result<BoundReport> {
    let prim = primitives(rho, free, psi, false, &Tolerances::default())?;
    let mut report = BoundReport::new(free.name(), prim.clone(), false);
    report.eps_lower = Some(deterministic_formula(prim.lambda_min, prim.f_psi));
    Ok(report)
}

/// ε/p ≥ λ_min(ρ)(1 − f_ψ)/(1 + R(ρ)) for probabilistic protocols.
pub fn probabilistic_tradeoff_bound(
    rho: &QuantumState,
    free: &FreeStatePolytope,
    psi: &QuantumState,
    opts: &BoundOptions,
) -> Result<BoundReport> {
    let prim = primitives(rho, free, psi, !opts.rdc, &opts.tol)?;
    Ok(tradeoff_report(free.name(), prim, opts.rdc))
}

/// The trade-off report for precomputed primitives.
pub fn tradeoff_report(theory: &str, prim: Primitives, rdc: bool) -> BoundReport {
    let (r_lo, r_hi) = if rdc {
        (0.0, 0.0)
    } else {
        (prim.r_lo.unwrap_or(0.0), prim.r_hi.unwrap_or(0.0))
    };
    let mut report = BoundReport::new(theory, prim.clone(), rdc);
    report.eps_lower = Some(deterministic_formula(prim.lambda_min, prim.f_psi));
    report.eps_over_p_lower = Some(tradeoff_formula(prim.lambda_min, prim.f_psi, r_hi));
    report.eps_over_p_lower_at_r_lo = Some(tradeoff_formula(prim.lambda_min, prim.f_psi, r_lo));
    report
}

/// Copies of ρ̂ needed to reach (ε, p): n ≥ log_{(1+R)/λ}((1 − f)p/ε), and
/// n ≥ log_{1/λ}((1 − f)/ε) for deterministic protocols.
pub fn overhead_bound(
    rho_hat: &QuantumState,
    free: &FreeStatePolytope,
    psi: &QuantumState,
    eps: f64,
    p: f64,
    opts: &BoundOptions,
) -> Result<BoundReport> {
    check_eps(eps)?;
    check_p(p)?;
    let prim = primitives(rho_hat, free, psi, !opts.rdc, &opts.tol)?;
    let r_hi = if opts.rdc { 0.0 } else { prim.r_hi.unwrap_or(0.0) };
    let (n, vac_n) = clamp_vacuous(overhead_formula(prim.lambda_min, prim.f_psi, r_hi, eps, p));
    let (n_det, _) = clamp_vacuous(deterministic_overhead_formula(prim.lambda_min, prim.f_psi, eps));
    let mut report = BoundReport::new(free.name(), prim, opts.rdc);
    report.eps = Some(eps);
    report.p = Some(p);
    report.n_lower = Some(n);
    report.n_lower_deterministic = Some(n_det);
    report.vacuous = vac_n;
    Ok(report)
}

/// Overhead per T state for distilling m T states from copies of a
/// single-site primitive, against the stabilizer polytope of ρ̂'s size.
pub fn magic_overhead_bound(rho_hat: &QuantumState, m: u32, eps: f64, p: f64, opts: &BoundOptions) -> Result<BoundReport> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    check_eps(eps)?;
    check_p(p)?;
    let d = rho_hat.dim();
    if !d.is_power_of_two() || d < 2 {
        return Err(Error::UnsupportedSize(format!("dimension {d} is not a qubit register")));
    }
    let lambda_min = rho_hat.min_eigenvalue();
    check_full_rank(lambda_min)?;
    let free = stabilizer_polytope(d.trailing_zeros() as usize)?;
    let (r_lo, r_hi) = if opts.rdc {
        (0.0, 0.0)
    } else {
        robustness_interval(rho_hat, &free, &opts.tol)?
    };
    let prim = Primitives {
        lambda_min,
        f_psi: 1.0 / t_overlap_inverse(m),
        r_lo: Some(r_lo),
        r_hi: Some(r_hi),
    };
    let (c, vacuous) = clamp_vacuous(magic_formula(lambda_min, r_hi, m, eps, p));
    let mut report = BoundReport::new(free.name(), prim, opts.rdc);
    report.eps = Some(eps);
    report.p = Some(p);
    report.m = Some(m);
    report.c_lower = Some(c);
    report.vacuous = vacuous;
    Ok(report)
}

/// Boundary of the excluded (p, ε) region: ε*(p) = p·λ(1 − f)/(1 + R).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionTable {
    pub rows: Vec<(f64, f64)>,
    /// The sharper deterministic point (1, λ(1 − f)).
    pub deterministic_point: (f64, f64),
    pub report: BoundReport,
}

impl RegionTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,eps_star\n");
        for (p, e) in &self.rows {
            out.push_str(&format!("{p},{e}\n"));
        }
        out
    }
}

pub fn forbidden_region(
    rho: &QuantumState,
    free: &FreeStatePolytope,
    psi: &QuantumState,
    p_grid: &[f64],
    opts: &BoundOptions,
) -> Result<RegionTable> {
    for &p in p_grid {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("grid point {p} outside [0, 1]")));
        }
    }
    let report = probabilistic_tradeoff_bound(rho, free, psi, opts)?;
    Ok(region_from_report(report, p_grid))
}

pub fn region_from_report(report: BoundReport, p_grid: &[f64]) -> RegionTable {
    let slope = report.eps_over_p_lower.unwrap_or(0.0);
    let rows = p_grid.iter().map(|&p| (p, p * slope)).collect();
    RegionTable {
        rows,
        deterministic_point: (1.0, report.eps_lower.unwrap_or(0.0)),
        report,
    }
}

/// Parses `start:stop:count` into an inclusive linear grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Parse(format!("grid '{spec}' is not start:stop:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok(match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    })
}
