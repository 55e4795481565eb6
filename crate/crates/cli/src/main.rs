//! gmdisp: command-line front end. One subcommand per process; the problem is
//! a JSON file (or `-` for stdin), the result goes to stdout behind a header
//! naming the tool version, command and seed.
//!
//! Exit codes: 0 success, 1 domain error (typed name on stderr), 2 usage error.

mod commands;
mod input;
mod output;
mod selftest;

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Ctx, Output};
use input::{CliError, CliResult, Input};

#[derive(Parser)]
#[command(name = "gmdisp", version, about = "Exact arithmetic for Witt vectors, divided powers and (G,mu)-displays")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for sampled checks; recorded in every header.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on the number of elements an enumeration may visit.
    #[arg(long, global = true, default_value_t = gmdisp::displays::ORBIT_CAP, value_parser = positive_cap)]
    cap: u128,
    /// Witt length M, overriding the input's "length".
    #[arg(short = 'M', long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    length: Option<u64>,
    /// p-adic precision N, overriding the input ring's or frame's N.
    #[arg(short = 'N', long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    precision: Option<u32>,
}

fn positive_cap(s: &str) -> Result<u128, String> {
    match s.parse::<u128>() {
        Ok(0) => Err("the cap must be positive".into()),
        Ok(c) => Ok(c),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Pretty,
    Csv,
}

#[derive(Args)]
struct InputArg {
    /// Problem file in JSON, or - for stdin.
    input: String,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient rings.
    #[command(subcommand)]
    Ring(RingCmd),
    /// Truncated p-typical Witt vectors.
    #[command(subcommand)]
    Witt(WittCmd),
    /// Divided power ideals and logarithmic ghost coordinates.
    #[command(subcommand)]
    Pd(PdCmd),
    /// The display group and its Frobenius maps.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Displays: nilpotence, conjugation, deformations, orbits, lifts.
    #[command(subcommand)]
    Display(DisplayCmd),
    /// Frames, windows and descent.
    #[command(subcommand)]
    Frame(FrameCmd),
    /// Bi-infinite Witt vectors and the rigidity search.
    #[command(subcommand)]
    Rigid(RigidCmd),
    /// Runs a quick built-in version of the acceptance checks.
    Selftest,
}

#[derive(Subcommand)]
enum RingCmd {
    Validate(InputArg),
}

#[derive(Subcommand)]
enum WittCmd {
    Add(InputArg),
    Mul(InputArg),
    Frobenius(InputArg),
    Verschiebung(InputArg),
    Ghost(InputArg),
    Teichmuller(InputArg),
    FromGhost(InputArg),
}

#[derive(Subcommand)]
enum PdCmd {
    Validate(InputArg),
    Logghost(InputArg),
    Project(InputArg),
}

#[derive(Subcommand)]
enum GroupCmd {
    Factor(InputArg),
    Phi(InputArg),
    Psi(InputArg),
    Exp(InputArg),
}

#[derive(Subcommand)]
enum DisplayCmd {
    Nilpotent(InputArg),
    Conjugate(InputArg),
    Solve(InputArg),
    Orbits(InputArg),
    Lifts(InputArg),
    Automorphisms(InputArg),
}

#[derive(Subcommand)]
enum FrameCmd {
    Validate(InputArg),
    Cartier(InputArg),
    Change(InputArg),
    Descend(InputArg),
    Roundtrip(InputArg),
}

#[derive(Subcommand)]
enum RigidCmd {
    Chain(InputArg),
    Vr(InputArg),
    SolveCheck(InputArg),
}

fn read_input(arg: &InputArg) -> CliResult<Input> {
    let text = if arg.input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(&arg.input).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", arg.input)))?
    };
    Input::parse(&text)
}

/// (group, operation, input) for the chosen subcommand.
fn route(cmd: &Command) -> (&'static str, &'static str, Option<&InputArg>) {
    use Command as C;
    match cmd {
        C::Ring(RingCmd::Validate(a)) => ("ring", "validate", Some(a)),
        C::Witt(w) => {
            let (op, a) = match w {
                WittCmd::Add(a) => ("add", a),
                WittCmd::Mul(a) => ("mul", a),
                WittCmd::Frobenius(a) => ("frobenius", a),
                WittCmd::Verschiebung(a) => ("verschiebung", a),
                WittCmd::Ghost(a) => ("ghost", a),
                WittCmd::Teichmuller(a) => ("teichmuller", a),
                WittCmd::FromGhost(a) => ("from-ghost", a),
            };
            ("witt", op, Some(a))
        }
        C::Pd(c) => {
            let (op, a) = match c {
                PdCmd::Validate(a) => ("validate", a),
                PdCmd::Logghost(a) => ("logghost", a),
                PdCmd::Project(a) => ("project", a),
            };
            ("pd", op, Some(a))
        }
        C::Group(c) => {
            let (op, a) = match c {
                GroupCmd::Factor(a) => ("factor", a),
                GroupCmd::Phi(a) => ("phi", a),
                GroupCmd::Psi(a) => ("psi", a),
                GroupCmd::Exp(a) => ("exp", a),
            };
            ("group", op, Some(a))
        }
        C::Display(c) => {
            let (op, a) = match c {
                DisplayCmd::Nilpotent(a) => ("nilpotent", a),
                DisplayCmd::Conjugate(a) => ("conjugate", a),
                DisplayCmd::Solve(a) => ("solve", a),
                DisplayCmd::Orbits(a) => ("orbits", a),
                DisplayCmd::Lifts(a) => ("lifts", a),
                DisplayCmd::Automorphisms(a) => ("automorphisms", a),
            };
            ("display", op, Some(a))
        }
        C::Frame(c) => {
            let (op, a) = match c {
                FrameCmd::Validate(a) => ("validate", a),
                FrameCmd::Cartier(a) => ("cartier", a),
                FrameCmd::Change(a) => ("change", a),
                FrameCmd::Descend(a) => ("descend", a),
                FrameCmd::Roundtrip(a) => ("roundtrip", a),
            };
            ("frame", op, Some(a))
        }
        C::Rigid(c) => {
            let (op, a) = match c {
                RigidCmd::Chain(a) => ("chain", a),
                RigidCmd::Vr(a) => ("vr", a),
                RigidCmd::SolveCheck(a) => ("solve-check", a),
            };
            ("rigid", op, Some(a))
        }
        C::Selftest => ("selftest", "", None),
    }
}

fn dispatch(group: &str, op: &str, ctx: &Ctx, input: &Input) -> CliResult<Output> {
    match group {
        "ring" => commands::ring_validate(ctx, input),
        "witt" => commands::witt(op, ctx, input),
        "pd" => commands::pd(op, ctx, input),
        "group" => commands::group(op, ctx, input),
        "display" => commands::display(op, ctx, input),
        "frame" => commands::frame(op, ctx, input),
        "rigid" => commands::rigid(op, ctx, input),
        "selftest" => Ok(selftest::run().into()),
        _ => unreachable!("groups are fixed by the parser"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (group, op, arg) = route(&cli.command);
    let name = if op.is_empty() { group.to_string() } else { format!("{group} {op}") };
    let ctx = Ctx {
        seed: cli.opts.seed,
        cap: cli.opts.cap,
        length: cli.opts.length.map(|m| m as usize),
        precision: cli.opts.precision,
    };
    let result = arg.map_or_else(|| Ok(Input::empty()), read_input).and_then(|input| dispatch(group, op, &ctx, &input));
    match result {
        Ok(out) => {
            let failed = group == "selftest" && out.result["failed"] != 0;
            print!("{}", output::render(&name, ctx.seed, cli.opts.format, &out));
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
    }
}
