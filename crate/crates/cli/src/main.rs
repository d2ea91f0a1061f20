use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use reesdiag::model::ModelFile;
use reesdiag::plot::emit_svg;
use reesdiag::{run, CliError, Command, Options};
use reesdiag_core::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Grdim,
    Diagonalize,
    Tropicalize,
    Refine,
    Check,
    Construct,
    Extend,
    Lift,
    Cone,
    GrRing,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Grdim => Command::Grdim,
            Cmd::Diagonalize => Command::Diagonalize,
            Cmd::Tropicalize => Command::Tropicalize,
            Cmd::Refine => Command::Refine,
            Cmd::Check => Command::Check,
            Cmd::Construct => Command::Construct,
            Cmd::Extend => Command::Extend,
            Cmd::Lift => Command::Lift,
            Cmd::Cone => Command::Cone,
            Cmd::GrRing => Command::GrRing,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Svg,
}

/// Exit status: 0 on success, 2 on a mathematical obstruction, 1 on error.
#[derive(Debug, Parser)]
#[command(name = "reesdiag", version, about = "Filtrations, diagonalizing bases and tropical functions on skeleta")]
struct Args {
    command: Cmd,
    /// Model file (JSON, or TOML by extension).
    #[arg(long)]
    model: PathBuf,
    /// Working precision; at most the model's. `lift` lifts up to this level.
    #[arg(long)]
    precision: Option<u32>,
    /// Level to act on; defaults to the last.
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Seed for representative choices; omitted means the deterministic echelon choice.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let mut file = ModelFile::read(&args.model)?;
    if let (Some(n), Some(p)) = (args.precision, file.precision) {
        if n > p {
            return Err(Error::PrecisionExhausted(format!("requested precision {n} exceeds the model's {p}")).into());
        }
        file.precision = Some(n);
    }
    let model = file.validate()?;
    let report = run(args.command.into(), &model, Options { level: args.level, seed: args.seed })?;
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Svg => emit_svg(model.complex()?, &report.trop)?,
    };
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(report.outcome.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
