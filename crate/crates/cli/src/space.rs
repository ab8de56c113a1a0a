use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::json;

use coarse_core::spaces::cube_window;
use coarse_core::{Interval, Scalar, SpaceKind, SpaceSpec};

use crate::io::{read_input, CliError, Context};

#[derive(Subcommand)]
pub enum SpaceCmd {
    /// Stream the window points as JSON lines.
    Enum(SpaceArgs),
    /// Print the resolved space and its window cardinality.
    Info(SpaceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Kind {
    /// `(L·ℤ)^dim` with `L` from --lattice.
    Lattice,
    /// `X_{ω+k}^{(i,n)}`: at most k coordinates outside `2^n ℤ`.
    Xwk,
    /// `Y_{ω+k}^{(i)}`.
    Y,
}

#[derive(Args)]
pub struct SpaceArgs {
    /// SpaceSpec JSON file; the inline flags are ignored when given.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Ambient dimension.
    #[arg(long, visible_alias = "i")]
    dim: Option<usize>,
    /// Lattice spacing (defaults to 2^n).
    #[arg(long)]
    lattice: Option<Scalar>,
    /// Exponent of the lattice `2^n ℤ`.
    #[arg(long)]
    n: Option<u32>,
    /// Deviation budget.
    #[arg(long, visible_alias = "deviations")]
    k: Option<usize>,
    /// Cube window `lo:hi` on every axis.
    #[arg(long)]
    window: Option<String>,
    /// Grid resolution (defaults to the largest dyadic dividing a quarter of
    /// the lattice and the window endpoints).
    #[arg(long)]
    delta: Option<Scalar>,
}

pub fn parse_window(s: &str) -> Result<(Scalar, Scalar), CliError> {
    let bad = || CliError::input(format!("malformed window {s:?}: expected lo:hi with lo <= hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: Scalar = lo.trim().parse().map_err(|_| bad())?;
    let hi: Scalar = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// `2^e` for the largest `e` with `2^e` dividing every nonzero value.
fn common_dyadic(values: &[Scalar]) -> Scalar {
    let e = values.iter().filter_map(|v| v.largest_pow2_divisor()).min().unwrap_or(0);
    Scalar::ONE.shift(e)
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::input(format!("--{flag} is required for inline spaces")))
}

impl SpaceArgs {
    pub fn resolve(&self) -> Result<SpaceSpec, CliError> {
        if let Some(p) = &self.input {
            let spec: SpaceSpec = serde_json::from_str(&read_input(Some(p))?)?;
            spec.validate()?;
            return Ok(spec);
        }
        let kind = need(self.kind, "kind")?;
        let dim = need(self.dim, "dim")?;
        let (lo, hi) = parse_window(&need(self.window.clone(), "window")?)?;
        let lattice = match (self.lattice, self.n) {
            (Some(l), _) => l,
            (None, Some(n)) => Scalar::pow2(n),
            (None, None) => return Err(CliError::input("--lattice or --n is required")),
        };
        let delta = self.delta.unwrap_or_else(|| common_dyadic(&[lattice.shift(-2), lo, hi]));
        let kind = match kind {
            Kind::Lattice => SpaceKind::LatticePower { scale: lattice, dim },
            Kind::Xwk => SpaceKind::DeviatingLattice {
                dim,
                lattice,
                max_deviating: need(self.k, "k")?,
                ambient_lattice: None,
            },
            Kind::Y => {
                let k = need(self.k, "k")?;
                SpaceKind::DeviatingLattice {
                    dim,
                    lattice: Scalar::pow2(dim as u32),
                    max_deviating: k,
                    ambient_lattice: Some(Scalar::pow2(k as u32)),
                }
            }
        };
        let spec = SpaceSpec { kind, window: cube_window(dim, lo, hi)?, delta };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn run(cmd: SpaceCmd, ctx: &Context) -> Result<(), CliError> {
    match cmd {
        SpaceCmd::Enum(a) => {
            let spec = a.resolve()?;
            let mut text = String::new();
            for p in spec.enumerate_window(ctx.guard)? {
                text.push_str(&serde_json::to_string(&p)?);
                text.push('\n');
            }
            ctx.write(&text)?;
            std::io::stdout().flush()?;
            Ok(())
        }
        SpaceCmd::Info(a) => {
            let spec = a.resolve()?;
            let window: Option<&[Interval]> = (!spec.window.is_empty()).then_some(&spec.window);
            let body = json!({
                "space": spec,
                "dim": spec.dim(),
                "delta": spec.delta,
                "window": window,
                "cardinality": spec.window_cardinality().to_string(),
            });
            ctx.emit(&ctx.envelope("space info", json!({}), body)?)
        }
    }
}
