//! fracsim: simulate random access codes for Boolean functions and check
//! them against their closed-form bias bounds.

mod build;
mod sweep;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fracsim::boolfn::spectrum_profile;
use fracsim::bounds::{bound_sheet, DEFAULT_ETA};
use fracsim::frac::{exact_bias, mc_bias, BiasReport};

use build::{attach_bounds, build_protocol, parse_function, ProtocolKind};

#[derive(Parser)]
#[command(
    name = "fracsim",
    version,
    about = "Random access code simulator and bound checker"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one protocol and report its bias with attached bounds
    Simulate(SimulateArgs),
    /// Evaluate the closed-form bound sheet for a configuration
    Bounds(BoundsArgs),
    /// Run a module's invariant checks
    Verify(verify::VerifyArgs),
    /// Run a protocol grid from a config file and emit CSV
    Sweep(sweep::SweepArgs),
    /// Dump a Boolean function's Fourier profile
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    protocol: ProtocolKind,
    #[arg(long)]
    n: usize,
    /// messages / blocks (not used by prrac)
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// query length; may also come from the function name (e.g. maj3)
    #[arg(long)]
    k: Option<usize>,
    /// function: xor, maj, and, or, dictI, optionally with arity suffix
    #[arg(long)]
    f: String,
    /// block count of the private-randomness code (defaults to m)
    #[arg(long)]
    l: Option<usize>,
    /// covering radius for the private-randomness codes
    #[arg(long, default_value_t = 1)]
    radius: usize,
    /// derandomization target success probability
    #[arg(long, default_value_t = 0.55)]
    target: f64,
    /// derandomization slack
    #[arg(long, default_value_t = 0.25)]
    slack: f64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// output file; stdout when omitted
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    f: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    f: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

fn emit(output: &Option<std::path::PathBuf>, text: &str) -> fracsim::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(fracsim::Error::from),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(fracsim::Error::from)
        }
    }
}

fn simulate(args: &SimulateArgs) -> fracsim::Result<u8> {
    let (f, label) = parse_function(&args.f, args.k)?;
    let l = args.l.unwrap_or(args.m.max(1));
    let built = build_protocol(
        args.protocol,
        args.n,
        args.m,
        l,
        &f,
        args.radius,
        args.target,
        args.slack,
        args.seed,
    )?;
    let mut report: BiasReport = match args.mode {
        Mode::Exact => exact_bias(built.protocol.as_ref(), &label)?,
        Mode::Mc => mc_bias(built.protocol.as_ref(), &label, args.trials, args.seed)?,
    };
    report.m = built.m;
    report.l = built.l;
    // bounds compare against the protocol's actual message length
    let m_eff = built.m.unwrap_or(args.m);
    let vacuous_only = attach_bounds(&mut report, args.protocol, &f, args.n, m_eff, l, args.eta);
    let text = match args.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => format!("{}\n{}\n", BiasReport::csv_header(), report.csv_row()),
    };
    emit(&args.output, &text)?;
    Ok(if vacuous_only { 2 } else { 0 })
}

fn bounds_cmd(args: &BoundsArgs) -> fracsim::Result<u8> {
    let (f, _) = parse_function(&args.f, args.k)?;
    let sheet = bound_sheet(&f, args.n, args.m, args.l.unwrap_or(args.m), args.eta)?;
    let text = serde_json::to_string_pretty(&sheet).expect("sheet serializes") + "\n";
    emit(&args.output, &text)?;
    let vacuous_only =
        sheet.corollaries.vacuous && sheet.lower.iter().all(|r| r.vacuous || r.q == 0.0);
    Ok(if vacuous_only { 2 } else { 0 })
}

fn spectrum_cmd(args: &SpectrumArgs) -> fracsim::Result<u8> {
    let (f, label) = parse_function(&args.f, args.k)?;
    let spectrum = f.fourier_transform();
    let profile = spectrum_profile(&f);
    let value = serde_json::json!({
        "f": label,
        "k": f.arity(),
        "coefficients": spectrum.coefficients(),
        "weights": profile.weights,
        "level_one_norms": profile.level_one_norms,
        "degree": profile.degree,
        "pure_high_degree": profile.pure_high_degree,
        "one_norm": profile.one_norm,
        "granular": profile.granular,
    });
    let text = serde_json::to_string_pretty(&value).expect("profile serializes") + "\n";
    emit(&args.output, &text)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Simulate(args) => simulate(args),
        Cmd::Bounds(args) => bounds_cmd(args),
        Cmd::Verify(args) => verify::run(args),
        Cmd::Sweep(args) => sweep::run(args),
        Cmd::Spectrum(args) => spectrum_cmd(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
