//! Command-line front end: classification, verification, normal forms,
//! geodesics, moduli dimensions and the example catalog.
//!
//! Exit codes: 0 on success, 2 for invalid input or data that admits no
//! classification, 3 for numerical failures and failed verifications.

pub mod commands;
pub mod json;
pub mod spec_file;

use std::io::Write;

use clap::{Parser, Subcommand};
use zermelo_core::classifier::CurvatureSign;
use zermelo_core::normal_forms::Algebra;
use zermelo_core::Error;

use commands::{
    classify_cmd, examples_cmd, geodesic_cmd, load_spec, moduli_cmd, normal_form_cmd, parse_vector, shoot_cmd,
    verify, VerifyOptions,
};

#[derive(Debug, Parser)]
#[command(name = "zermelo", version, about = "Randers metrics of constant flag curvature via Zermelo navigation")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moduli coordinates and admissibility of a spec file.
    Classify { spec: String },
    /// Sample flag curvature and the characterizing equations.
    Verify {
        spec: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Scale the 1-form b by this factor (negative control).
        #[arg(long, default_value_t = 1.0)]
        perturb_b: f64,
    },
    /// Normal form of a matrix given as a JSON array of rows.
    NormalForm {
        /// o, e or o1n.
        #[arg(long)]
        algebra: String,
        matrix: String,
    },
    /// Integrate a geodesic and print it as CSV.
    Geodesic {
        spec: String,
        /// Start point, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        /// Initial velocity, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        y0: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<String>,
    },
    /// Shortest travel time between two points (n = 2 or 3).
    Shoot {
        spec: String,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 1e-2)]
        dt: f64,
    },
    /// Dimension of a moduli space.
    Moduli {
        #[arg(long)]
        n: usize,
        /// pos, zero or neg.
        #[arg(long = "K-sign", alias = "k-sign", allow_hyphen_values = true)]
        k_sign: String,
        #[arg(long)]
        sigma_nonzero: bool,
    },
    /// Print a catalog example as a spec file, or list the identifiers.
    Examples {
        #[arg(long)]
        id: Option<String>,
    },
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        2
    } else {
        3
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    let write_err = |e: std::io::Error| Error::Validation(format!("cannot write output: {e}"));
    match cli.command {
        Command::Classify { spec } => {
            writeln!(out, "{}", classify_cmd(&load_spec(&spec)?)?).map_err(write_err)?;
        }
        Command::Verify { spec, samples, tol, perturb_b } => {
            let wind = load_spec(&spec)?;
            let report = verify(&wind, VerifyOptions { samples, tol, seed: cli.seed, perturb_b })?;
            writeln!(out, "{}", json::to_json(&report)).map_err(write_err)?;
            if let Some(worst) = &report.worst {
                writeln!(err, "FAIL: {worst}").map_err(write_err)?;
                return Ok(3);
            }
        }
        Command::NormalForm { algebra, matrix } => {
            let algebra: Algebra = algebra.parse()?;
            let text = std::fs::read_to_string(&matrix)
                .map_err(|e| Error::Validation(format!("cannot read {matrix}: {e}")))?;
            writeln!(out, "{}", normal_form_cmd(&text, algebra)?).map_err(write_err)?;
        }
        Command::Geodesic { spec, x0, y0, t, dt, out: path } => {
            let wind = load_spec(&spec)?;
            let x0 = parse_vector(&x0, "--x0")?;
            let y0 = parse_vector(&y0, "--y0")?;
            let (csv, exit) = geodesic_cmd(&wind, x0.as_slice(), y0.as_slice(), t, dt)?;
            match path {
                Some(p) => std::fs::write(&p, csv).map_err(|e| Error::Validation(format!("cannot write {p}: {e}")))?,
                None => write!(out, "{csv}").map_err(write_err)?,
            }
            if let Some(reason) = exit {
                writeln!(err, "trajectory truncated: {reason}").map_err(write_err)?;
            }
        }
        Command::Shoot { spec, from, to, tol, dt } => {
            let wind = load_spec(&spec)?;
            let from = parse_vector(&from, "--from")?;
            let to = parse_vector(&to, "--to")?;
            writeln!(out, "{}", shoot_cmd(&wind, from.as_slice(), to.as_slice(), tol, dt)?).map_err(write_err)?;
        }
        Command::Moduli { n, k_sign, sigma_nonzero } => {
            let sign: CurvatureSign = k_sign.parse()?;
            writeln!(out, "{}", moduli_cmd(n, sign, sigma_nonzero)?).map_err(write_err)?;
        }
        Command::Examples { id } => {
            writeln!(out, "{}", examples_cmd(id.as_deref())?).map_err(write_err)?;
        }
    }
    Ok(0)
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
