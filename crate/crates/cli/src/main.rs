use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tailsheaf::cohomology::Engine;
use tailsheaf_cli::{parse_field, run, Command, Format, RunConfig};
use tailsheaf_core::Field;

/// Cohomology, tail classification and structure of sheaves on projective space.
#[derive(Parser)]
#[command(name = "tailsheaf", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a presentation.
    Validate(Common),
    /// Table of h^i(F(t)) over a window of twists.
    Cohomology(Common),
    /// Tail test, tail height, shape, and the rank bound.
    Classify(Common),
    /// Fitting ideal, singular points and lengths.
    Sing(Common),
    /// Restrict to a seeded generic hyperplane and test for a tangent power.
    Restrict(Common),
    /// Split off one S_1 from a minimal tail.
    Peel(Common),
    /// Block decomposition of a minimal tail by singular point.
    Decompose(Common),
    /// Split a level tail into its minimal part and line bundles.
    SplitLevel(Common),
    /// Print a fixture, optionally scrambled.
    Construct(Common),
}

#[derive(Args)]
struct Common {
    /// Built-in presentation (`s1`, `curvilinear_3_2`, `random_3`, ...).
    #[arg(long)]
    fixture: Option<String>,
    /// Presentation file, text grammar or JSON.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[arg(long, allow_hyphen_values = true)]
    tmin: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    tmax: Option<i64>,
    /// dense, groebner or both.
    #[arg(long, default_value = "dense")]
    engine: Engine,
    /// QQ or fp:<p>.
    #[arg(long, value_parser = parse_field)]
    field: Option<Field>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// With `construct`: apply seeded random row, column and coordinate changes.
    #[arg(long)]
    scramble: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, c) = match cli.command {
        Cmd::Validate(c) => (Command::Validate, c),
        Cmd::Cohomology(c) => (Command::Cohomology, c),
        Cmd::Classify(c) => (Command::Classify, c),
        Cmd::Sing(c) => (Command::Sing, c),
        Cmd::Restrict(c) => (Command::Restrict, c),
        Cmd::Peel(c) => (Command::Peel, c),
        Cmd::Decompose(c) => (Command::Decompose, c),
        Cmd::SplitLevel(c) => (Command::SplitLevel, c),
        Cmd::Construct(c) => (Command::Construct, c),
    };
    let format = if c.json {
        Format::Json
    } else if c.csv {
        Format::Csv
    } else {
        Format::Text
    };
    let config = RunConfig {
        command,
        fixture: c.fixture,
        input: c.input,
        field: c.field,
        t_min: c.tmin,
        t_max: c.tmax,
        engine: c.engine,
        seed: c.seed,
        format,
        threads: c.threads,
        scramble: c.scramble,
    };
    let report = run(&config);
    std::io::stdout().write_all(report.stdout.as_bytes()).ok();
    std::io::stderr().write_all(report.stderr.as_bytes()).ok();
    ExitCode::from(report.status as u8)
}
