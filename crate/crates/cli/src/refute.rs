use std::path::PathBuf;
use std::time::Instant;

use clap::{Subcommand, ValueEnum};
use serde_json::json;

use coarse_core::analysis::Certificate;
use coarse_core::refuter::{
    ad_lower_certify, partition_descent, positive_control, DescentInput, Outcome, DEFAULT_NODE_BUDGET,
};
use coarse_core::Scalar;

use crate::io::{read_input, CliError, Context};

#[derive(Clone, Copy, ValueEnum)]
pub enum Control {
    /// A genuine cover of `X_{ω+1}^{(2)}`; the descent must complete.
    Positive,
}

#[derive(Subcommand)]
pub enum RefuteCmd {
    /// Partition descent on `[0, 6B]^{m+k}`.
    Descent {
        /// DescentInput JSON (stdin when neither this nor --control is given).
        #[arg(long = "in", conflicts_with = "control")]
        input: Option<PathBuf>,
        /// Built-in input instead of --in.
        #[arg(long, value_enum, requires = "b")]
        control: Option<Control>,
        /// Mesh bound B for --control (4 or 8).
        #[arg(long = "B", id = "b")]
        b: Option<Scalar>,
    },
    /// Exhaustive search for a cover of `(2^kℤ)^n` beating `ad ≥ n`.
    Adlower {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
        /// Mesh bound B.
        #[arg(long = "B")]
        b: Scalar,
        /// Window side in lattice steps (defaults to the mesh in steps plus 2).
        #[arg(long)]
        window_steps: Option<usize>,
        /// Node budget of the search.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
}

pub fn run(cmd: RefuteCmd, ctx: &Context) -> Result<(), CliError> {
    match cmd {
        RefuteCmd::Descent { input, control, b } => {
            let (source, inp): (&str, DescentInput) = match (control, b) {
                (Some(Control::Positive), Some(b)) => ("positive control", positive_control(b)?),
                _ => ("input", serde_json::from_str(&read_input(input.as_deref())?)?),
            };
            let t = Instant::now();
            let r = partition_descent(&inp, ctx.guard)?;
            let failure = match &r.outcome {
                Outcome::HypothesisFailure { family, violated, evidence } => Some(format!("{family}: {violated:?}: {evidence}")),
                _ => None,
            };
            let mut c = Certificate::new("no m+k+1 disjoint families of the given shape cover the cube", "partition descent", failure.is_none(), &r)?;
            c.delta = Some(inp.delta);
            let params = json!({ "source": source, "m": inp.m, "k": inp.k, "B": inp.b, "delta": inp.delta, "neg_disjointness": inp.neg_disjointness });
            ctx.emit(&ctx.envelope("refute descent", params, json!({ "certificates": [c.timed(t)] }))?)?;
            match failure {
                Some(msg) => Err(CliError::hypothesis(msg)),
                None => Ok(()),
            }
        }
        RefuteCmd::Adlower { k, n, b, window_steps, budget } => {
            let t = Instant::now();
            let cert = ad_lower_certify(n, k, b, window_steps, budget)?;
            let c = Certificate::new(format!("no cover of (2^{k}Z)^{n} with mesh <= {b} has Lebesgue number >= 2^{} and multiplicity <= {n}", k + 1), "exhaustive search", cert.certified(), &cert)?;
            let params = json!({ "k": k, "n": n, "B": b, "window_steps": cert.window_steps, "budget": budget });
            ctx.emit(&ctx.envelope("refute adlower", params, json!({ "certificates": [c.timed(t)] }))?)
        }
    }
}
