//! Command-line front end: argument parsing, dispatch, and output encoding.
//!
//! Verbs: `spectrum` (levels of the quantization condition), `params`
//! (wall-side parameters per level), `audit` (residuals of the derivation
//! chain at one wavenumber), `compare` (quantization levels vs the
//! Dirichlet-wall model), `figure1` (energy sweep of the first three levels
//! over one coupling).
//!
//! Exit codes: 0 success, 1 output I/O failure, 2 usage error, 3 singular
//! coupling (|mass*b| = 1), 4 numeric degeneracy. Data goes to stdout or
//! `--output`; messages go to stderr.

use std::fmt;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::model::{MatchingParams, WellConfig};
use crate::param_map::{chain_residuals, level_map_table, m_params_at};
use crate::report::{
    audit_csv, compare_csv, params_csv, spectrum_csv, sweep_csv, to_json, CompareReport,
    ParamsReport, SpectrumReport, SweepReport, SweepRow,
};
use crate::spectrum::{compare_models, find_levels};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verb {
    Spectrum,
    Params,
    Audit,
    Compare,
    Figure1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVariable {
    A,
    B,
}

/// Sweep description for the `figure1` verb.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: u32,
}

/// A fully validated command. `k` is only meaningful for `audit`; `sweep`
/// only for `figure1` (which always emits three energy columns).
#[derive(Clone, Debug, PartialEq)]
pub struct Command {
    pub verb: Verb,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mass: f64,
    pub levels: u32,
    pub k: Option<f64>,
    pub sweep: Option<SweepSpec>,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

/// One-line usage failure; the process exits with code 2.
#[derive(Clone, Debug, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

/// Outcome of argument parsing: either a runnable command or help text.
#[derive(Clone, Debug)]
pub enum Parsed {
    Run(Command),
    Help(String),
}

fn finite_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("value must be finite".to_string())
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v = finite_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err("value must be positive".to_string())
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepVarArg {
    A,
    B,
}

#[derive(Args, Debug)]
struct PhysArgs {
    /// Delta coupling strength
    #[arg(long, value_parser = finite_f64, allow_hyphen_values = true)]
    a: f64,
    /// Delta-derivative coupling strength
    #[arg(long, value_parser = finite_f64, allow_hyphen_values = true)]
    b: f64,
    /// Half-width of the box
    #[arg(long, value_parser = positive_f64, default_value = "2.5")]
    c: f64,
    /// Particle mass
    #[arg(long, value_parser = positive_f64, default_value = "0.5")]
    mass: f64,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output encoding
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write data to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

fn levels_arg(s: &str) -> Result<u32, String> {
    let v: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 1 {
        Ok(v)
    } else {
        Err("level count must be at least 1".to_string())
    }
}

fn steps_arg(s: &str) -> Result<u32, String> {
    let v: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 2 {
        Ok(v)
    } else {
        Err("sweep needs at least 2 steps".to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "deltawell",
    about = "Bound states of an infinite square well with a point interaction at its center",
    disable_version_flag = true
)]
struct Cli {
    #[command(subcommand)]
    verb: CliVerb,
}

#[derive(Subcommand, Debug)]
enum CliVerb {
    /// Bound-state wavenumbers and energies of the quantization condition
    Spectrum {
        #[command(flatten)]
        phys: PhysArgs,
        /// Number of levels to compute
        #[arg(long, value_parser = levels_arg, default_value = "3")]
        levels: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Wall-side boundary parameters (m1, phi, m0, m3) per level
    Params {
        #[command(flatten)]
        phys: PhysArgs,
        /// Number of levels to tabulate
        #[arg(long, value_parser = levels_arg, default_value = "3")]
        levels: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Residual audit of the derivation chain at one wavenumber
    Audit {
        #[command(flatten)]
        phys: PhysArgs,
        /// Wavenumber to audit; defaults to the first level
        #[arg(long, value_parser = positive_f64)]
        k: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Quantization-condition levels against the Dirichlet-wall model
    Compare {
        #[command(flatten)]
        phys: PhysArgs,
        /// Number of levels to compare
        #[arg(long, value_parser = levels_arg, default_value = "3")]
        levels: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Energy sweep of the first three levels over one coupling
    Figure1 {
        /// Delta coupling strength (held fixed when sweeping b)
        #[arg(long, value_parser = finite_f64, allow_hyphen_values = true, default_value = "4")]
        a: f64,
        /// Delta-derivative coupling strength (held fixed when sweeping a)
        #[arg(long, value_parser = finite_f64, allow_hyphen_values = true, default_value = "2")]
        b: f64,
        /// Half-width of the box
        #[arg(long, value_parser = positive_f64, default_value = "2.5")]
        c: f64,
        /// Particle mass
        #[arg(long, value_parser = positive_f64, default_value = "0.5")]
        mass: f64,
        /// Coupling to sweep
        #[arg(long = "sweep-var", value_enum, default_value = "a")]
        sweep_var: SweepVarArg,
        /// First sweep value
        #[arg(long = "sweep-start", value_parser = finite_f64, allow_hyphen_values = true, default_value = "0")]
        sweep_start: f64,
        /// Last sweep value
        #[arg(long = "sweep-stop", value_parser = finite_f64, allow_hyphen_values = true, default_value = "10")]
        sweep_stop: f64,
        /// Number of sweep points
        #[arg(long = "sweep-steps", value_parser = steps_arg, default_value = "101")]
        sweep_steps: u32,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Parses an argument vector (without the program name) into a command.
///
/// Defaults: c = 2.5, mass = 0.5, levels = 3; `figure1` additionally
/// defaults a = 4, b = 2 and a sweep of a over [0, 10] in 101 steps.
/// Unknown flags are rejected with a one-line reason.
pub fn parse_args<I, S>(argv: I) -> Result<Parsed, UsageError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let full = std::iter::once("deltawell".to_string()).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(full) {
        Ok(cli) => cli,
        Err(err) => match err.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                return Ok(Parsed::Help(err.render().to_string()));
            }
            _ => {
                let line = err
                    .render()
                    .to_string()
                    .lines()
                    .next()
                    .unwrap_or("invalid arguments")
                    .to_string();
                return Err(UsageError(line));
            }
        },
    };

    let cmd = match cli.verb {
        CliVerb::Spectrum { phys, levels, out } => command(Verb::Spectrum, phys, levels, None, None, out),
        CliVerb::Params { phys, levels, out } => command(Verb::Params, phys, levels, None, None, out),
        CliVerb::Audit { phys, k, out } => command(Verb::Audit, phys, 3, k, None, out),
        CliVerb::Compare { phys, levels, out } => command(Verb::Compare, phys, levels, None, None, out),
        CliVerb::Figure1 {
            a,
            b,
            c,
            mass,
            sweep_var,
            sweep_start,
            sweep_stop,
            sweep_steps,
            out,
        } => {
            if sweep_start > sweep_stop {
                return Err(UsageError(format!(
                    "error: sweep start {sweep_start} exceeds stop {sweep_stop}"
                )));
            }
            let sweep = SweepSpec {
                variable: match sweep_var {
                    SweepVarArg::A => SweepVariable::A,
                    SweepVarArg::B => SweepVariable::B,
                },
                start: sweep_start,
                stop: sweep_stop,
                steps: sweep_steps,
            };
            command(
                Verb::Figure1,
                PhysArgs { a, b, c, mass },
                3,
                None,
                Some(sweep),
                out,
            )
        }
    };
    Ok(Parsed::Run(cmd))
}

fn command(
    verb: Verb,
    phys: PhysArgs,
    levels: u32,
    k: Option<f64>,
    sweep: Option<SweepSpec>,
    out: OutArgs,
) -> Command {
    Command {
        verb,
        a: phys.a,
        b: phys.b,
        c: phys.c,
        mass: phys.mass,
        levels,
        k,
        sweep,
        format: match out.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        },
        output: out.output,
    }
}

/// Maps a domain error to the documented process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::SingularCoupling => 3,
        Error::InvalidConfig(_) => 2,
        _ => 4,
    }
}

/// Runs a command and returns the serialized output (CSV or JSON).
/// Deterministic: identical commands produce byte-identical output.
pub fn execute(cmd: &Command) -> Result<String, Error> {
    let cfg = WellConfig::new(cmd.c, cmd.mass)?;
    let p = MatchingParams::new(cmd.a, cmd.b)?;
    match cmd.verb {
        Verb::Spectrum => {
            let report = SpectrumReport {
                a: cmd.a,
                b: cmd.b,
                c: cmd.c,
                mass: cmd.mass,
                levels: find_levels(&p, &cfg, cmd.levels),
            };
            Ok(render(cmd.format, || spectrum_csv(&report), &report))
        }
        Verb::Params => {
            let report = ParamsReport {
                a: cmd.a,
                b: cmd.b,
                c: cmd.c,
                mass: cmd.mass,
                rows: level_map_table(&p, &cfg, cmd.levels)?,
            };
            Ok(render(cmd.format, || params_csv(&report), &report))
        }
        Verb::Audit => {
            let k = match cmd.k {
                Some(k) => k,
                None => find_levels(&p, &cfg, 1)[0].k,
            };
            let sol = m_params_at(&p, &cfg, k)?;
            let report = chain_residuals(&sol, &p, &cfg, k)?;
            Ok(render(cmd.format, || audit_csv(&report), &report))
        }
        Verb::Compare => {
            let report = CompareReport {
                a: cmd.a,
                b: cmd.b,
                c: cmd.c,
                mass: cmd.mass,
                rows: compare_models(&p, &cfg, cmd.levels)?,
            };
            Ok(render(cmd.format, || compare_csv(&report), &report))
        }
        Verb::Figure1 => {
            let sweep = cmd.sweep.unwrap_or(SweepSpec {
                variable: SweepVariable::A,
                start: 0.0,
                stop: 10.0,
                steps: 101,
            });
            let mut rows = Vec::with_capacity(sweep.steps as usize);
            for i in 0..sweep.steps {
                let value = sweep.start
                    + (sweep.stop - sweep.start) * f64::from(i) / f64::from(sweep.steps - 1);
                let (a, b) = match sweep.variable {
                    SweepVariable::A => (value, cmd.b),
                    SweepVariable::B => (cmd.a, value),
                };
                let levels = find_levels(&MatchingParams::new(a, b)?, &cfg, 3);
                rows.push(SweepRow {
                    value,
                    e1: levels[0].energy,
                    e2: levels[1].energy,
                    e3: levels[2].energy,
                });
            }
            let report = SweepReport {
                variable: match sweep.variable {
                    SweepVariable::A => "a".to_string(),
                    SweepVariable::B => "b".to_string(),
                },
                a: cmd.a,
                b: cmd.b,
                c: cmd.c,
                mass: cmd.mass,
                start: sweep.start,
                stop: sweep.stop,
                steps: sweep.steps,
                rows,
            };
            Ok(render(cmd.format, || sweep_csv(&report), &report))
        }
    }
}

fn render<F, T>(format: OutputFormat, csv: F, report: &T) -> String
where
    F: FnOnce() -> String,
    T: serde::Serialize,
{
    match format {
        OutputFormat::Csv => csv(),
        OutputFormat::Json => to_json(report),
    }
}

/// Writes rendered output to the command's destination.
pub fn write_output(cmd: &Command, data: &str) -> std::io::Result<()> {
    use std::io::Write;
    match &cmd.output {
        Some(path) => std::fs::write(path, data),
        None => std::io::stdout().write_all(data.as_bytes()),
    }
}
