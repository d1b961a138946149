//! Thin command-line frontend over the library pipeline.

use clap::{Args, Parser, Subcommand};
use lemniscate::cli::{run_analyze, run_fingerprint, run_render, run_verify, to_json_string};
use lemniscate::report::InputSpec;
use lemniscate::{Error, Tolerances};
use num_complex::Complex64;
use std::io::Read;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_NUMERIC: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "lemniscate",
    version,
    about = "Critical graphs, level curves and fingerprints of polynomial and rational lemniscates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Input JSON file, or "-" for stdin.
    #[arg(long)]
    input: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    /// Relative tolerance for comparing critical-value moduli.
    #[arg(long, default_value_t = Tolerances::default().modulus_equality)]
    tol_modulus: f64,
    /// Relative residual target for the root finder.
    #[arg(long, default_value_t = Tolerances::default().root_residual)]
    tol_roots: f64,
    /// Relative on-level tolerance for traced samples.
    #[arg(long, default_value_t = Tolerances::default().trace_level)]
    tol_trace: f64,
    /// Acceptance threshold for fingerprint residuals.
    #[arg(long, default_value_t = Tolerances::default().fingerprint_tol)]
    tol_fingerprint: f64,
    /// Conformal map accuracy relative to the curve diameter.
    #[arg(long, default_value_t = Tolerances::default().map_accuracy)]
    tol_map: f64,
}

impl CommonArgs {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            modulus_equality: self.tol_modulus,
            root_residual: self.tol_roots,
            trace_level: self.tol_trace,
            fingerprint_tol: self.tol_fingerprint,
            map_accuracy: self.tol_map,
            ..Tolerances::default()
        }
    }

    fn read_input(&self) -> Result<InputSpec, Error> {
        let text = if self.input == "-" {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Input(format!("cannot read stdin: {}", e)))?;
            buf
        } else {
            std::fs::read_to_string(&self.input)
                .map_err(|e| Error::Input(format!("cannot read {}: {}", self.input, e)))?
        };
        InputSpec::parse(&text)
    }

    fn write_output(&self, content: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => std::fs::write(path, content)
                .map_err(|e| Error::Input(format!("cannot write {}: {}", path, e))),
            None => {
                print!("{}", content);
                Ok(())
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis: differential, critical graph, faces, angle counts.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// Include edge polylines in the JSON graph section.
        #[arg(long)]
        with_polylines: bool,
    },
    /// SVG of the critical graph with optional lemniscate level overlays.
    Render {
        #[command(flatten)]
        common: CommonArgs,
        /// Level |r| = c to overlay; repeatable.
        #[arg(long = "level")]
        levels: Vec<f64>,
    },
    /// Fingerprint of a level-curve component and its Blaschke identity.
    Fingerprint {
        #[command(flatten)]
        common: CommonArgs,
        /// Lemniscate level (normalized to 1 internally).
        #[arg(long, default_value_t = 1.0)]
        level: f64,
        /// Pick the component enclosing this point, as "re,im".
        #[arg(long)]
        around: Option<String>,
        /// Boundary samples.
        #[arg(long, default_value_t = 1024)]
        samples: usize,
    },
    /// Verification battery over the whole pipeline.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn parse_point(s: &str) -> Result<Complex64, Error> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Input(format!("expected re,im but got {}", s)));
    }
    let re = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Input(format!("bad real part: {}", e)))?;
    let im = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Input(format!("bad imaginary part: {}", e)))?;
    Ok(Complex64::new(re, im))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Input(_) | Error::DegreeTooSmall => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

fn fail(e: Error) -> (Error, u8) {
    let code = exit_code_for(&e);
    (e, code)
}

fn run() -> Result<u8, (Error, u8)> {
    let cli = Cli::try_parse().map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{}", e);
                (Error::Input(String::new()), EXIT_OK)
            }
            _ => {
                eprint!("{}", e);
                (Error::Input(String::new()), EXIT_USAGE)
            }
        }
    })?;

    match cli.command {
        Command::Analyze {
            common,
            with_polylines,
        } => {
            let tol = common.tolerances();
            let input = common.read_input().map_err(fail)?;
            let analysis = run_analyze(&input, &tol, with_polylines).map_err(fail)?;
            let mut json = to_json_string(&analysis.report);
            json.push('\n');
            common.write_output(&json).map_err(fail)?;
            Ok(if analysis.report.verification_passed() {
                EXIT_OK
            } else {
                EXIT_VERIFICATION
            })
        }
        Command::Render { common, levels } => {
            let tol = common.tolerances();
            let input = common.read_input().map_err(fail)?;
            let svg = run_render(&input, &levels, &tol).map_err(fail)?;
            common.write_output(&svg).map_err(fail)?;
            Ok(EXIT_OK)
        }
        Command::Fingerprint {
            common,
            level,
            around,
            samples,
        } => {
            let tol = common.tolerances();
            let input = common.read_input().map_err(fail)?;
            let around = match around {
                Some(s) => Some(parse_point(&s).map_err(|e| (e, EXIT_USAGE))?),
                None => None,
            };
            let report =
                run_fingerprint(&input, level, around, samples, &tol).map_err(fail)?;
            let mut json = to_json_string(&report);
            json.push('\n');
            common.write_output(&json).map_err(fail)?;
            Ok(if report.residual_ok {
                EXIT_OK
            } else {
                EXIT_VERIFICATION
            })
        }
        Command::Verify { common } => {
            let tol = common.tolerances();
            let input = common.read_input().map_err(fail)?;
            let report = run_verify(&input, &tol).map_err(fail)?;
            let mut json = to_json_string(&report);
            json.push('\n');
            common.write_output(&json).map_err(fail)?;
            Ok(if report.all_pass {
                EXIT_OK
            } else {
                EXIT_VERIFICATION
            })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((err, code)) => {
            if !err.to_string().is_empty() {
                eprintln!("error: {}", err);
            }
            ExitCode::from(code)
        }
    }
}
