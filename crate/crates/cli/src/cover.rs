use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Subcommand};
use serde_json::json;

use coarse_core::analysis::{validate_bounded, validate_coverage, validate_disjoint, Certificate, CoverageMode};
use coarse_core::cover::{
    build_k_family_cover, build_tail_singletons, build_two_family_cover, build_x_omega_g, build_y2omega_cover,
    lattice_exponent, y2omega_family_bound, y2omega_thin_space, CoverBundle,
};
use coarse_core::{Scalar, SpaceSpec};

use crate::io::{read_input, CliError, Context};

#[derive(Subcommand)]
pub enum CoverCmd {
    /// Two lattice families covering `X_{ω+1}^{(i,r)}`.
    BuildTwo {
        #[arg(long)]
        r: u32,
        /// Ambient dimension (defaults to r).
        #[arg(long)]
        i: Option<usize>,
        #[command(flatten)]
        v: ValidateFlag,
    },
    /// `k+1` lattice families covering `X_{ω+k}^{(i,n)}` with `n = 3^{k−1} r`.
    BuildK {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: usize,
        /// Ambient dimension (defaults to n).
        #[arg(long)]
        i: Option<usize>,
        #[command(flatten)]
        v: ValidateFlag,
    },
    /// Composite cover of `Y_{2ω}` on a thin window.
    BuildY2omega {
        #[arg(long)]
        r: u32,
        /// Outer blocks `1..=k_max` in the window.
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        /// Window side.
        #[arg(long, default_value = "64")]
        hi: Scalar,
        #[command(flatten)]
        v: ValidateFlag,
    },
    /// Decomposition of `X_ω(g)` for `g(i) = i` tabulated up to `g_max`.
    BuildXg {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 64)]
        g_max: usize,
        #[command(flatten)]
        v: ValidateFlag,
    },
    /// Singletons on the blocks of an asymptotic union past a threshold.
    Tail {
        /// SpaceSpec JSON of the asymptotic union (stdin when omitted).
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        threshold: usize,
        /// Disjointness checked by --validate.
        #[arg(long, default_value = "1")]
        r: Scalar,
        #[command(flatten)]
        v: ValidateFlag,
    },
}

#[derive(Args)]
pub struct ValidateFlag {
    /// Run the validators and embed their certificates.
    #[arg(long)]
    validate: bool,
}

/// Disjointness, boundedness and (for complete bundles) exhaustive coverage.
fn validate_bundle(b: &CoverBundle, guard: u128) -> Result<Vec<Certificate>, CliError> {
    let mut certs = Vec::new();

    let t = Instant::now();
    let mut results = Vec::new();
    let mut ok = true;
    for f in b.families.iter().filter(|f| !f.is_assumed()) {
        let d = validate_disjoint(f, b.claimed_disjointness, Some(&b.target), guard)?;
        ok &= d.is_ok();
        results.push(json!({ "family": f.label, "check": d }));
    }
    let skipped = b.families.iter().filter(|f| f.is_assumed()).count();
    let mut c = Certificate::new(format!("every family is {}-disjoint", b.claimed_disjointness), "exact pairwise on the window", ok, results)?;
    c.delta = Some(b.target.delta);
    if skipped > 0 {
        c = c.with_note(format!("{skipped} assumed families not checked"));
    }
    certs.push(c.timed(t));

    let t = Instant::now();
    let mut results = Vec::new();
    let mut ok = true;
    for f in &b.families {
        let d = validate_bounded(f, f.claimed_bound)?;
        ok &= d.is_ok();
        results.push(json!({ "family": f.label, "bound": f.claimed_bound, "check": d }));
    }
    certs.push(Certificate::new("every family is bounded by its claimed diameter", "exact per prototype", ok, results)?.timed(t));

    if b.partial {
        let c = Certificate::new("the families cover the target", "skipped", true, json!(null))?
            .with_note("bundle is partial: assumed families cannot be evaluated pointwise");
        certs.push(c);
    } else {
        let t = Instant::now();
        let check = validate_coverage(b, CoverageMode::Exhaustive, guard)?;
        let mut c = Certificate::new("the families cover the target", "exhaustive", check.is_ok(), check)?;
        c.delta = Some(b.target.delta);
        c.window = Some(b.target.window.clone());
        certs.push(c.timed(t));
    }
    Ok(certs)
}

fn emit_bundle(ctx: &Context, command: &str, params: serde_json::Value, b: CoverBundle, validate: bool) -> Result<(), CliError> {
    let certs = if validate { validate_bundle(&b, ctx.guard)? } else { Vec::new() };
    let failed: Vec<String> = certs.iter().filter(|c| !c.passed).map(|c| c.claim.clone()).collect();
    let body = json!({ "family_count": b.family_count(), "bundle": b, "certificates": certs });
    ctx.emit(&ctx.envelope(command, params, body)?)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::hypothesis(format!("validation failed: {}", failed.join("; "))))
    }
}

pub fn run(cmd: CoverCmd, ctx: &Context) -> Result<(), CliError> {
    match cmd {
        CoverCmd::BuildTwo { r, i, v } => {
            let i = i.unwrap_or(r as usize);
            let b = build_two_family_cover(r, i)?;
            emit_bundle(ctx, "cover build-two", json!({ "r": r, "i": i }), b, v.validate)
        }
        CoverCmd::BuildK { r, k, i, v } => {
            let i = match i {
                Some(i) => i,
                None => lattice_exponent(r, k)? as usize,
            };
            let b = build_k_family_cover(r, k, i)?;
            emit_bundle(ctx, "cover build-k", json!({ "r": r, "k": k, "i": i }), b, v.validate)
        }
        CoverCmd::BuildY2omega { r, k_max, hi, v } => {
            let window = y2omega_thin_space(k_max, |_| 1, hi)?;
            let b = build_y2omega_cover(r, &window, ctx.guard)?;
            let bound = y2omega_family_bound(r)?;
            let params = json!({ "r": r, "k_max": k_max, "hi": hi, "family_bound": bound.to_string() });
            emit_bundle(ctx, "cover build-y2omega", params, b, v.validate)
        }
        CoverCmd::BuildXg { r, g_max, v } => {
            let g: Vec<usize> = (1..=g_max).collect();
            let dec = build_x_omega_g(&g, r, ctx.guard)?;
            let mut certs = Vec::new();
            if v.validate {
                let t = Instant::now();
                let d = validate_disjoint(&dec.singletons, Scalar::from(r), Some(&dec.space), ctx.guard)?;
                certs.push(Certificate::new(format!("singletons are {r}-disjoint"), "exact pairwise on the window", d.is_ok(), d)?.timed(t));
            }
            let failed = certs.iter().any(|c| !c.passed);
            let body = json!({ "decomposition": dec, "certificates": certs });
            ctx.emit(&ctx.envelope("cover build-xg", json!({ "r": r, "g": "identity", "g_max": g_max }), body)?)?;
            if failed {
                return Err(CliError::hypothesis("validation failed: singleton disjointness"));
            }
            Ok(())
        }
        CoverCmd::Tail { input, threshold, r, v } => {
            let spec: SpaceSpec = serde_json::from_str(&read_input(input.as_deref())?)?;
            spec.validate()?;
            let f = build_tail_singletons(&spec, threshold, ctx.guard)?;
            let mut certs = Vec::new();
            if v.validate {
                let t = Instant::now();
                let d = validate_disjoint(&f, r, Some(&spec), ctx.guard)?;
                certs.push(Certificate::new(format!("tail singletons are {r}-disjoint"), "exact pairwise on the window", d.is_ok(), d)?.timed(t));
            }
            let failed = certs.iter().any(|c| !c.passed);
            let body = json!({ "family": f, "certificates": certs });
            ctx.emit(&ctx.envelope("cover tail", json!({ "threshold": threshold, "r": r }), body)?)?;
            if failed {
                return Err(CliError::hypothesis("validation failed: tail disjointness"));
            }
            Ok(())
        }
    }
}
