mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{CliError, EXIT_OK, EXIT_SCHEMA};

#[derive(Debug, Parser)]
#[command(name = "assigncoh", version, about = "Assignments and assignment cohomology of torus actions")]
struct Cli {
    /// Print a machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Complex {
    Full,
    Reduced,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dimension and basis of the space of assignments.
    Assignments { file: PathBuf },
    /// Assignment cohomology in one degree.
    Cohomology {
        file: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value = "reduced")]
        complex: Complex,
        /// Subcomplex: `fixed-points`, `minimal`, or comma-separated stratum ids.
        #[arg(long)]
        relative: Option<String>,
    },
    /// Build a space description.
    Build(BuildArgs),
    /// Functor laws, d² = 0, and optionally the pair sequence and Euler characteristic.
    Check {
        file: PathBuf,
        /// Subspace for the long exact sequence of the pair.
        #[arg(long)]
        les: Option<String>,
        #[arg(long)]
        euler: bool,
        #[arg(long, value_enum, default_value = "reduced")]
        complex: Complex,
        /// Highest degree in the sequence; defaults to the poset height.
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Extend values on the minimal strata to an assignment.
    Extend {
        file: PathBuf,
        /// JSON object mapping minimal stratum ids to vectors of "p/q" strings.
        #[arg(long)]
        values: PathBuf,
    },
    /// Test the moment condition and split Ψ into one-form coefficients.
    Decompose {
        /// Weights `α_1;…;α_d`, entries separated by commas.
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
    },
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(subcommand)]
    kind: BuildKind,
    /// Write the description here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum BuildKind {
    /// Torus acting linearly on ℂ^d.
    LinearRep {
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
    },
    /// Product of spheres S² with one covector per factor.
    SphereProduct {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambdas: String,
    },
    /// Toric variety of a Delzant polytope.
    Polytope(PolytopeArgs),
    /// Product of two spaces with the product torus.
    Product { left: PathBuf, right: PathBuf },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct PolytopeArgs {
    #[arg(long)]
    segment: bool,
    #[arg(long)]
    triangle: bool,
    #[arg(long)]
    square: bool,
    #[arg(long)]
    pentagon: bool,
    #[arg(long)]
    hexagon: bool,
    #[arg(long)]
    cube: bool,
    /// Primitive inward facet normals of a polygon in cyclic order.
    #[arg(long, allow_hyphen_values = true)]
    normals: Option<String>,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_SCHEMA } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let echo = args[1..].join(" ");
    let mut digest = String::new();
    let outcome = commands::run(&cli.command, &echo, &mut digest);
    match outcome {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("plain data serializes"));
            } else {
                for line in &report.text {
                    println!("{line}");
                }
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(err) => {
            report_error(&err, cli.json, &echo, &digest);
            ExitCode::from(err.code as u8)
        }
    }
}

fn report_error(err: &CliError, json: bool, echo: &str, digest: &str) {
    if json {
        println!("{}", err.to_json(echo, digest));
    } else {
        eprintln!("error: {}", err.message);
    }
}
