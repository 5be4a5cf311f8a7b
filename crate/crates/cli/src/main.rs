use clap::{Parser, Subcommand, ValueEnum};
use starfuse_cli::parser;
use starfuse_cli::runner::{run, Command, Flags};
use std::io::Read;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Exact quasi-Poisson brackets and star products for fusion programs
/// over marked-surface skeletons.
#[derive(Parser, Debug)]
#[command(name = "starfuse", version)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// Input file; `-` or absent reads standard input
    file: Option<String>,

    /// Truncation order of the deformation parameter
    #[arg(long, default_value_t = 2)]
    order: usize,

    /// Degree bound for invariant computations in builtin schedules
    #[arg(long = "degree-bound", default_value_t = 2)]
    degree_bound: usize,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Restrict to one program by name
    #[arg(long)]
    program: Option<String>,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Structural validation of every section
    Validate(CommonArgs),
    /// Assemble programs and print bracket tables
    Assemble(CommonArgs),
    /// One bracket value on generators
    Bracket {
        f: String,
        g: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Star products of the programs
    Quantize(CommonArgs),
    /// The full identity suite
    Check(CommonArgs),
}

fn read_input(file: &Option<String>) -> Result<String, String> {
    match file.as_deref() {
        None | Some("-") => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| format!("reading standard input: {e}"))?;
            Ok(buf)
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("reading `{path}`: {e}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        CliCommand::Validate(c) => (Command::Validate, c),
        CliCommand::Assemble(c) => (Command::Assemble, c),
        CliCommand::Bracket { f, g, common } => (Command::Bracket { f, g }, common),
        CliCommand::Quantize(c) => (Command::Quantize, c),
        CliCommand::Check(c) => (Command::Check, c),
    };
    let text = match read_input(&common.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let doc = match parser::parse(&text, common.degree_bound) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("parse error: {e}");
            return ExitCode::from(2);
        }
    };
    let flags = Flags {
        order: common.order,
        degree_bound: common.degree_bound,
        program: common.program.clone(),
    };
    let report = match run(&command, &doc, &flags) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match common.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
