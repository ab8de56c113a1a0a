use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Subcommand};
use serde_json::{json, Value};

use coarse_core::analysis::{ad_report, lebesgue_number, multiplicity, validate_coverage, Certificate, CoverageMode};
use coarse_core::cover::CoverBundle;
use coarse_core::{Error, Interval, Scalar, SpaceKind};

use crate::io::{read_input, CliError, Context};

#[derive(Subcommand)]
pub enum AnalyzeCmd {
    /// Multiplicity, Lebesgue number and the resulting ad datapoint.
    Stats(BundleIn),
    /// SVG of a bundle on a window of dimension at most 2.
    Plot {
        #[command(flatten)]
        input: BundleIn,
        /// SVG destination (stdout when omitted).
        #[arg(long)]
        plot_out: Option<PathBuf>,
    },
}

#[derive(Args)]
pub struct BundleIn {
    /// Bundle JSON, or the output of a `cover` command (stdin when omitted).
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

impl BundleIn {
    fn load(&self) -> Result<CoverBundle, CliError> {
        let mut v: Value = serde_json::from_str(&read_input(self.input.as_deref())?)?;
        if let Some(b) = v.get_mut("bundle") {
            v = b.take();
        }
        Ok(serde_json::from_value(v)?)
    }
}

pub fn run(cmd: AnalyzeCmd, ctx: &Context) -> Result<(), CliError> {
    match cmd {
        AnalyzeCmd::Stats(input) => stats(&input.load()?, ctx),
        AnalyzeCmd::Plot { input, plot_out } => {
            let svg = plot(&input.load()?, ctx.guard)?;
            match plot_out {
                Some(p) => Ok(std::fs::write(p, svg)?),
                None => ctx.write(&svg),
            }
        }
    }
}

fn stats(b: &CoverBundle, ctx: &Context) -> Result<(), CliError> {
    let t = Instant::now();
    let m = multiplicity(b, ctx.guard)?;
    let mut notes = Vec::new();
    let lebesgue = if b.partial {
        notes.push("bundle is partial: Lebesgue number not evaluated pointwise".to_string());
        None
    } else {
        Some(lebesgue_number(b, ctx.guard)?)
    };
    let covers = b.partial || validate_coverage(b, CoverageMode::Exhaustive, ctx.guard)?.is_ok();
    let ad = if covers {
        match ad_report(b, ctx.guard) {
            Ok(a) => Some(a),
            Err(Error::Hypothesis(msg)) => {
                notes.push(msg);
                None
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        notes.push("not a cover of the window: no ad datapoint".to_string());
        None
    };
    let result = json!({ "multiplicity": m, "lebesgue": lebesgue, "ad": ad, "covers": covers });
    let mut c = Certificate::new("cover statistics", "exact on the window unless marked bound_only", true, result)?;
    c.delta = Some(b.target.delta);
    c.window = (!b.target.window.is_empty()).then(|| b.target.window.clone());
    c.notes = notes;
    let body = json!({ "certificates": [c.timed(t)] });
    ctx.emit(&ctx.envelope("analyze stats", json!({ "families": b.family_count() }), body)?)
}

const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const SIZE: f64 = 480.0;
const PAD: f64 = 20.0;

fn plot(b: &CoverBundle, guard: u128) -> Result<String, CliError> {
    if matches!(b.target.kind, SpaceKind::AsUnion { .. }) {
        return Err(CliError::input("plots need a single-block target"));
    }
    let win = &b.target.window;
    if win.is_empty() || win.len() > 2 {
        return Err(CliError::input(format!("plots need a window of dimension 1 or 2, got {}", win.len())));
    }
    // axis 0 runs right, axis 1 runs up; a 1-D window is drawn as a strip
    let span = |iv: &Interval| (iv.hi - iv.lo).to_f64().max(1e-9);
    let scale = SIZE / win.iter().map(span).fold(0.0, f64::max);
    let x = |v: Scalar| PAD + (v - win[0].lo).to_f64() * scale;
    let (height, y) = if win.len() == 2 {
        let h = span(&win[1]) * scale;
        (h, Box::new(move |v: Scalar| PAD + h - (v - win[1].lo).to_f64() * scale) as Box<dyn Fn(Scalar) -> f64>)
    } else {
        (40.0, Box::new(|_| PAD + 20.0) as Box<dyn Fn(Scalar) -> f64>)
    };
    let clip = |v: Scalar, iv: &Interval| if v < iv.lo { iv.lo } else if v > iv.hi { iv.hi } else { v };
    let width = span(&win[0]) * scale;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
        width + 2.0 * PAD,
        height + 2.0 * PAD,
        width + 2.0 * PAD,
        height + 2.0 * PAD
    );
    let _ = writeln!(svg, r##"<rect x="{PAD}" y="{PAD}" width="{width:.2}" height="{height:.2}" fill="none" stroke="#444"/>"##);
    let mut drawn = 0u128;
    for (fi, f) in b.families.iter().enumerate() {
        let color = PALETTE[fi % PALETTE.len()];
        let _ = writeln!(svg, r#"<g id="family-{fi}" fill="{color}" fill-opacity="0.35" stroke="{color}"><title>{}</title>"#, escape(&f.label));
        for part in f.parts.iter().filter(|p| p.path.is_empty()) {
            for pi in 0..part.prototypes.len() {
                drawn = drawn.saturating_add(part.count_meeting(pi, win, 0));
                if drawn > guard {
                    return Err(Error::GuardExceeded { what: "plotted blocks".into(), estimate: drawn, limit: guard }.into());
                }
                for shift in part.shifts_meeting(pi, win, 0) {
                    let blk = part.block(pi, &shift);
                    let fx = &blk.factors[0];
                    let (x0, x1) = (x(clip(fx.lo, &win[0])), x(clip(fx.hi, &win[0])));
                    let (y0, y1) = if win.len() == 2 {
                        let fy = &blk.factors[1];
                        (y(clip(fy.hi, &win[1])), y(clip(fy.lo, &win[1])))
                    } else {
                        let c = y(Scalar::ZERO);
                        (c - 8.0 - 4.0 * (fi % 3) as f64, c + 8.0 - 4.0 * (fi % 3) as f64)
                    };
                    let (w, h) = ((x1 - x0).max(2.0), (y1 - y0).max(2.0));
                    let _ = writeln!(svg, r#"<rect x="{:.2}" y="{:.2}" width="{w:.2}" height="{h:.2}"/>"#, x0 - (w - (x1 - x0)) / 2.0, y0 - (h - (y1 - y0)) / 2.0);
                }
            }
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
