//! Subcommand dispatch and output.

use std::fs;
use std::path::Path;

use purity_core::bounds::{
    deterministic_error_bound, forbidden_region, magic_overhead_bound, overhead_bound, parse_grid,
    probabilistic_tradeoff_bound, BoundOptions,
};
use purity_core::channels::{choi, d_min_choi, max_free_fraction, verify_unitary_nogo};
use purity_core::figures::{fig1_data, fig2_data};
use purity_core::io::StateFile;
use purity_core::monotones::{
    beta_eps, d_min, free_overlap, min_free_dh, robustness_generalized, robustness_standard, RobustnessCertificate,
};
use purity_core::verifier::{run_campaign, CampaignConfig};
use purity_core::{incoherent_polytope, stabilizer_polytope, Error, Result, Tolerances};
use serde::Serialize;
use serde_json::{json, Value};

use crate::inputs;
use crate::{
    BoundCmd, BoundInputs, ChannelCmd, Cli, Command, FigCmd, Format, Global, MonotoneCmd, PolytopeCmd,
    RobustnessKind, TheoryName, VerifyArgs,
};

struct Ctx {
    global: Global,
    tol: Tolerances,
}

impl Ctx {
    fn write(&self, path: Option<&Path>, text: &str) -> Result<()> {
        let mut text = text.to_string();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match path {
            Some(p) => fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> Result<()> {
        self.write(self.global.out.as_deref(), text)
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Result<()> {
        self.emit(&serde_json::to_string_pretty(value)?)
    }

    fn json_only(&self, what: &str) -> Result<()> {
        if self.global.format == Format::Csv {
            return Err(Error::InvalidParameter(format!("{what} has no CSV form")));
        }
        Ok(())
    }

    fn validate(&self) -> bool {
        !self.global.no_validate
    }

    fn bound_opts(&self, rdc: bool) -> BoundOptions {
        BoundOptions { rdc, tol: self.tol }
    }
}

/// JSON has no infinity; D_min and D_H are +∞ on disjoint supports.
fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        tol: cli.global.tolerances(),
        global: cli.global,
    };
    match cli.command {
        Command::Polytope(c) => polytope(&ctx, c),
        Command::Monotone(c) => monotone(&ctx, c),
        Command::Bound(c) => bound(&ctx, c),
        Command::Verify(a) => verify(&ctx, a),
        Command::Channel(c) => channel(&ctx, c),
        Command::Figdata(c) => figdata(&ctx, c),
    }
}

fn polytope(ctx: &Ctx, cmd: PolytopeCmd) -> Result<()> {
    ctx.json_only("polytope")?;
    let PolytopeCmd::Gen { theory, n } = cmd;
    let p = match theory {
        TheoryName::Coherence => incoherent_polytope(n)?,
        TheoryName::Stabilizer => stabilizer_polytope(n)?,
    };
    ctx.emit(&p.to_json())
}

fn robustness_json(c: &RobustnessCertificate) -> Value {
    json!({
        "value": c.hi,
        "interval": [c.lo, c.hi],
        "certificate": {
            "iterations": c.iterations,
            "s": c.primal.s,
            "omega_weights": c.primal.omega_weights,
            "omega": StateFile::from_matrix(&c.primal.omega),
            "sigma": c.primal.sigma.as_ref().map(StateFile::from_matrix),
            "sigma_weights": c.primal.sigma_weights,
            "witness": c.witness.as_ref().map(StateFile::from_matrix),
        }
    })
}

fn monotone(ctx: &Ctx, cmd: MonotoneCmd) -> Result<()> {
    ctx.json_only("monotone")?;
    let v = ctx.validate();
    let out = match cmd {
        MonotoneCmd::Dh { state, free, sigma, eps } => {
            let rho = inputs::state(&state, v, &ctx.tol)?;
            match (free, sigma) {
                (_, Some(sigma)) => {
                    let sigma = inputs::state(&sigma, v, &ctx.tol)?;
                    let b = beta_eps(&rho, &sigma, eps)?;
                    // β ≤ tr(σM) gives the lower end, the dual bound the upper.
                    let lo = -b.beta.log2();
                    let hi = -b.lower.max(0.0).log2();
                    json!({
                        "value": real(lo),
                        "interval": [real(lo), real(hi)],
                        "certificate": {
                            "beta": b.beta,
                            "beta_lower": b.lower,
                            "threshold": b.threshold,
                            "type_one_error": b.test.type_one_error,
                            "type_two_error": b.test.type_two_error,
                            "test": StateFile::from_matrix(b.test.operator.matrix()),
                        }
                    })
                }
                (Some(free), None) => {
                    let free = inputs::polytope(&free, &ctx.tol)?;
                    let r = min_free_dh(&rho, &free, eps)?;
                    json!({
                        "value": real(r.hi),
                        "interval": [real(r.lo), real(r.hi)],
                        "certificate": { "omega_weights": r.omega_weights, "iterations": r.iterations }
                    })
                }
                (None, None) => unreachable!("clap requires --free or --sigma"),
            }
        }
        MonotoneCmd::Dmin { state, free, sigma } => {
            let rho = inputs::state(&state, v, &ctx.tol)?;
            match (free, sigma) {
                (_, Some(sigma)) => {
                    let d = d_min(&rho, &inputs::state(&sigma, v, &ctx.tol)?)?;
                    json!({ "value": real(d), "interval": [real(d), real(d)], "certificate": null })
                }
                (Some(free), None) => {
                    // Linear in ω after the log, so the minimum sits at a vertex.
                    let free = inputs::polytope(&free, &ctx.tol)?;
                    let mut best = (f64::INFINITY, 0);
                    for (i, w) in free.vertices().iter().enumerate() {
                        let d = d_min(&rho, w)?;
                        if d < best.0 {
                            best = (d, i);
                        }
                    }
                    json!({
                        "value": real(best.0),
                        "interval": [real(best.0), real(best.0)],
                        "certificate": { "argmin_vertex": best.1 }
                    })
                }
                (None, None) => unreachable!("clap requires --free or --sigma"),
            }
        }
        MonotoneCmd::Overlap { state, free } => {
            let psi = inputs::state(&state, v, &ctx.tol)?;
            let free = inputs::polytope(&free, &ctx.tol)?;
            let o = free_overlap(&psi, &free)?;
            json!({
                "value": o.value,
                "interval": [o.value, o.value],
                "certificate": { "argmax_vertex": o.argmax }
            })
        }
        MonotoneCmd::Robustness { state, free, kind } => {
            let rho = inputs::state(&state, v, &ctx.tol)?;
            let free = inputs::polytope(&free, &ctx.tol)?;
            let c = match kind {
                RobustnessKind::Generalized => robustness_generalized(&rho, &free, ctx.tol.rob)?,
                RobustnessKind::Standard => robustness_standard(&rho, &free)?,
            };
            robustness_json(&c)
        }
    };
    ctx.emit_json(&out)
}

fn bound(ctx: &Ctx, cmd: BoundCmd) -> Result<()> {
    let v = ctx.validate();
    let load = |i: &BoundInputs| -> Result<_> {
        Ok((
            inputs::state(&i.state, v, &ctx.tol)?,
            inputs::polytope(&i.free, &ctx.tol)?,
            inputs::state(&i.target, v, &ctx.tol)?,
        ))
    };
    match cmd {
        BoundCmd::Deterministic { inputs } => {
            ctx.json_only("bound deterministic")?;
            let (rho, free, psi) = load(&inputs)?;
            ctx.emit_json(&deterministic_error_bound(&rho, &free, &psi)?)
        }
        BoundCmd::Tradeoff { inputs, rdc } => {
            ctx.json_only("bound tradeoff")?;
            let (rho, free, psi) = load(&inputs)?;
            ctx.emit_json(&probabilistic_tradeoff_bound(&rho, &free, &psi, &ctx.bound_opts(rdc))?)
        }
        BoundCmd::Overhead { inputs, eps, p, rdc } => {
            ctx.json_only("bound overhead")?;
            let (rho, free, psi) = load(&inputs)?;
            ctx.emit_json(&overhead_bound(&rho, &free, &psi, eps, p, &ctx.bound_opts(rdc))?)
        }
        BoundCmd::Magic { state, m, eps, p, rdc } => {
            ctx.json_only("bound magic")?;
            let rho = inputs::state(&state, v, &ctx.tol)?;
            ctx.emit_json(&magic_overhead_bound(&rho, m, eps, p, &ctx.bound_opts(rdc))?)
        }
        BoundCmd::Region { inputs, grid, rdc } => {
            let (rho, free, psi) = load(&inputs)?;
            let table = forbidden_region(&rho, &free, &psi, &parse_grid(&grid)?, &ctx.bound_opts(rdc))?;
            match ctx.global.format {
                Format::Csv => ctx.emit(&table.to_csv()),
                Format::Json => ctx.emit_json(&table),
            }
        }
    }
}

fn verify(ctx: &Ctx, a: VerifyArgs) -> Result<()> {
    ctx.json_only("verify")?;
    let v = ctx.validate();
    let theory = inputs::theory(&a.theory, &ctx.tol)?;
    let rho = inputs::state(&a.state, v, &ctx.tol)?;
    let target = inputs::state(&a.target, v, &ctx.tol)?;
    let mut cfg = CampaignConfig::new(theory, rho, target, a.samples, ctx.global.seed);
    cfg.structured = a.structured;
    cfg.bound_scale = a.bound_scale;
    cfg.monotone_checks = a.monotone_checks;
    cfg.rdc = a.rdc;
    cfg.tol = ctx.tol;
    let (report, err) = match run_campaign(&cfg) {
        Ok(r) => (r, None),
        Err(Error::ViolationFound { sample, report }) => {
            let r = (*report).clone();
            (r, Some(Error::ViolationFound { sample, report }))
        }
        Err(e) => return Err(e),
    };
    ctx.emit(&report.to_json())?;
    if let Some(path) = &a.frontier {
        ctx.write(Some(path), &report.frontier_csv())?;
    }
    err.map_or(Ok(()), Err)
}

fn channel(ctx: &Ctx, cmd: ChannelCmd) -> Result<()> {
    ctx.json_only("channel")?;
    let out = match cmd {
        ChannelCmd::Choi { channel } => {
            let j = choi(&inputs::channel(&channel)?)?;
            json!({ "din": j.din, "dout": j.dout, "state": StateFile::from_state(&j.state) })
        }
        ChannelCmd::Freefrac { channel, against } => {
            let p = max_free_fraction(&inputs::channel(&channel)?, &inputs::channel(&against)?)?;
            json!({ "value": p })
        }
        ChannelCmd::Dmin { channel, against } => {
            let d = d_min_choi(&inputs::channel(&channel)?, &inputs::channel(&against)?)?;
            json!({ "value": real(d), "lower_bound_on_channel_quantity": true })
        }
        ChannelCmd::Nogo {
            channel,
            unitary,
            theory,
            samples,
        } => {
            let n = inputs::channel(&channel)?;
            let u = inputs::unitary(&unitary)?;
            let theory = inputs::theory(&theory, &ctx.tol)?;
            serde_json::to_value(verify_unitary_nogo(&n, &u, &theory, samples, ctx.global.seed, ctx.tol.member)?)?
        }
    };
    ctx.emit_json(&out)
}

fn figdata(ctx: &Ctx, cmd: FigCmd) -> Result<()> {
    let opts = ctx.bound_opts(false);
    match cmd {
        FigCmd::Fig1 {
            grid,
            samples,
            frontier,
        } => {
            let data = fig1_data(&parse_grid(&grid)?, samples, ctx.global.seed, &opts)?;
            if let (Some(path), Some(c)) = (&frontier, &data.campaign) {
                ctx.write(Some(path), &c.frontier_csv())?;
            }
            match ctx.global.format {
                Format::Csv => ctx.emit(&data.region.to_csv()),
                Format::Json => ctx.emit_json(&json!({
                    "region": data.region,
                    "frontier": data.campaign.as_ref().map(|c| c.frontier()),
                    "campaign_passed": data.campaign.as_ref().map(|c| c.passed()),
                })),
            }
        }
        FigCmd::Fig2 { grid } => {
            let data = fig2_data(&parse_grid(&grid)?, &opts)?;
            match ctx.global.format {
                Format::Csv => ctx.emit(&data.to_csv()),
                Format::Json => ctx.emit_json(&data),
            }
        }
    }
}
