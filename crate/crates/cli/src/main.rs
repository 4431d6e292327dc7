//! Command-line surface for the tropical geometry engine.
//!
//! Inputs and outputs are JSON on files and stdout; rationals travel as
//! "p/q" strings and the SVG emitted by `render` is the single place
//! where exactness is given up. Every command is deterministic given its
//! inputs and seeds.
//!
//! Exit codes: 0 success, 2 input error, 3 budget exhaustion.

mod render;

use clap::{Parser, Subcommand};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use trop_core::detect::{cube_schedule, detect_finiteness};
use trop_core::extended::Fan;
use trop_core::polyhedra::PolyhedralComplex;
use trop_core::project::{sample_generic, MonomialMap};
use trop_core::rat::{fmt_q, parse_q, Q};
use trop_core::series::{LaurentPolynomial, SeriesSpec};
use trop_core::trophyper::{tropicalize, Tropicalization};
use trop_core::Error;

/// Defaults for generic-map sampling when only a seed is given.
const SAMPLE_ENTRY_BOUND: i64 = 10;
const SAMPLE_ATTEMPTS: usize = 200;

#[derive(Parser)]
#[command(
    name = "trop",
    version,
    about = "Exact tropical hypersurfaces, projections, closures, and finiteness verdicts"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the tropicalization of a finite spec at a point.
    Eval {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated rational coordinates, e.g. "0,-1/2".
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
    /// Initial form of a finite spec at a point, over the residue field.
    Initial {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
    /// Tropical hypersurface of a finite spec as a polyhedral complex.
    Hypersurface {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Full subdivision of space into regions of minimizing monomials.
    DomainComplex {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Push a complex through a monomial map; sample one when absent.
    Project {
        #[arg(long)]
        complex: PathBuf,
        /// Integer matrix JSON (row-major). Mutually optional with --seed.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Seed for sampling a generic map onto rank dim + 1.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Closure of a complex in the compactification given by a fan.
    Extend {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        fan: PathBuf,
    },
    /// Decide whether a series spec tropicalizes like a polynomial.
    Detect {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated window sizes, strictly increasing, e.g. "1,2,4".
        #[arg(long)]
        schedule: String,
        /// Attempt an infiniteness certificate when windows keep growing.
        #[arg(long)]
        certify: bool,
    },
    /// Draw a rank-2 complex to SVG; prints cell-count metadata.
    Render {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        /// Viewport as "x0,x1,y0,y1" in rational coordinates.
        #[arg(long, allow_hyphen_values = true)]
        viewport: String,
    },
}

enum Failure {
    Input(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::BudgetExhausted(msg) => Failure::Budget(msg),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("invalid {what} {}: {e}", path.display())))
}

/// Truncating at the support box is lossless for finite specs; commands
/// that need a single polynomial refuse unbounded rules.
fn finite_tropicalization(path: &Path) -> Result<Tropicalization, Failure> {
    let spec: SeriesSpec = read_json(path, "spec")?;
    if !spec.has_finite_support() {
        return Err(Failure::Input(
            "spec support is unbounded; this command needs a finite spec (see detect)".into(),
        ));
    }
    let window = spec
        .support_box()
        .ok_or_else(|| Failure::Input("spec has no terms".into()))?;
    let poly: LaurentPolynomial = spec.truncate(&window)?;
    Ok(tropicalize(&poly)?)
}

fn parse_point(s: &str, rank: usize) -> Result<Vec<Q>, Failure> {
    let w: Vec<Q> = s
        .split(',')
        .map(|t| parse_q(t.trim()))
        .collect::<trop_core::error::Result<_>>()?;
    if w.len() != rank {
        return Err(Failure::Input(format!(
            "point has {} coordinates, spec has rank {rank}",
            w.len()
        )));
    }
    Ok(w)
}

fn parse_sizes(s: &str) -> Result<Vec<i64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| Failure::Input(format!("bad schedule entry {t:?}: {e}")))
        })
        .collect()
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string(value).map_err(|e| Failure::Input(e.to_string()))
}

fn run(cmd: Cmd) -> Result<String, Failure> {
    match cmd {
        Cmd::Eval { spec, w } => {
            let trop = finite_tropicalization(&spec)?;
            let w = parse_point(&w, trop.rank())?;
            let argmin: Vec<&Vec<i64>> = trop
                .argmin(&w)
                .into_iter()
                .map(|i| &trop.terms()[i].exponent)
                .collect();
            to_json(&json!({
                "value": fmt_q(&trop.eval(&w)),
                "argmin": argmin,
                "on_hypersurface": trop.hypersurface_contains(&w),
            }))
        }
        Cmd::Initial { spec, w } => {
            let trop = finite_tropicalization(&spec)?;
            let w = parse_point(&w, trop.rank())?;
            to_json(&trop.initial_form(&w))
        }
        Cmd::Hypersurface { spec } => {
            let trop = finite_tropicalization(&spec)?;
            to_json(&trop.tropical_hypersurface()?)
        }
        Cmd::DomainComplex { spec } => {
            let trop = finite_tropicalization(&spec)?;
            to_json(&trop.domain_complex()?.0)
        }
        Cmd::Project {
            complex,
            matrix,
            seed,
        } => {
            let complex: PolyhedralComplex = read_json(&complex, "complex")?;
            let map = match (matrix, seed) {
                (Some(path), _) => read_json::<MonomialMap>(&path, "matrix")?,
                (None, Some(seed)) => {
                    let d = complex
                        .dimension()
                        .ok_or_else(|| Failure::Input("cannot project an empty complex".into()))?;
                    sample_generic(d + 1, &complex, SAMPLE_ENTRY_BOUND, seed, SAMPLE_ATTEMPTS)?
                }
                (None, None) => {
                    return Err(Failure::Input("project needs --matrix or --seed".into()))
                }
            };
            let image = map.tropical_image(&complex)?;
            to_json(&json!({ "matrix": map, "image": image }))
        }
        Cmd::Extend { complex, fan } => {
            let complex: PolyhedralComplex = read_json(&complex, "complex")?;
            let fan: Fan = read_json(&fan, "fan")?;
            let ext = fan.extended_closure(&complex)?;
            let mut out = serde_json::to_value(&ext).map_err(|e| Failure::Input(e.to_string()))?;
            out["dense_stratum"] = json!(ext.dense_stratum());
            to_json(&out)
        }
        Cmd::Detect {
            spec,
            schedule,
            certify,
        } => {
            let spec: SeriesSpec = read_json(&spec, "spec")?;
            let sizes = parse_sizes(&schedule)?;
            let schedule = cube_schedule(&spec, &sizes)?;
            let verdict = detect_finiteness(&spec, &schedule, certify)?;
            to_json(&verdict)
        }
        Cmd::Render {
            complex,
            svg,
            viewport,
        } => {
            let complex: PolyhedralComplex = read_json(&complex, "complex")?;
            let viewport = render::Viewport::parse(&viewport)?;
            let (document, metadata) = render::render_complex(&complex, &viewport)?;
            std::fs::write(&svg, document)
                .map_err(|e| Failure::Input(format!("cannot write {}: {e}", svg.display())))?;
            to_json(&metadata)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(output) => {
            use std::io::Write as _;
            // A closed pipe downstream is not our error; stay quiet.
            let _ = writeln!(std::io::stdout().lock(), "{output}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
