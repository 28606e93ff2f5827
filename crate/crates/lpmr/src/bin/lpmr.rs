use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lpmr::diag::{render, DiagnosticFormat};
use lpmr::reduce::{ReductionConfig, DEFAULT_FUEL};
use lpmr::template::{check_files, cmd_translate, cmd_transport, TemplateKind};

#[derive(Parser)]
#[command(
    name = "lpmr",
    about = "Check theories, generate translation skeletons, and transport theorems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Morphism,
    Relation,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, check and run the pragmas of each file.
    Check {
        files: Vec<PathBuf>,
        /// Extra directories to resolve #REQUIRE against.
        #[arg(long = "include", short = 'I')]
        include: Vec<PathBuf>,
        /// Compare terms up to eta as well.
        #[arg(long)]
        eta: bool,
        /// Reduction step budget.
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Generate a translation skeleton from a source to a target theory.
    Translate {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Relation arity (relation mode only).
        #[arg(long, default_value_t = 1)]
        arity: usize,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        eta: bool,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
    /// Translate every definition of the source theory along a filled
    /// morphism skeleton, write the result, and recheck it.
    Transport {
        #[arg(long)]
        filled: PathBuf,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        eta: bool,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { files, include, eta, fuel, format } => {
            if files.is_empty() {
                eprintln!("error: no input files");
                return ExitCode::from(2);
            }
            let config = ReductionConfig { eta, fuel };
            let outcome = check_files(&files, &include, &config);
            for line in &outcome.eval_output {
                println!("{line}");
            }
            let format = match format {
                Format::Text => DiagnosticFormat::Text,
                Format::Json => DiagnosticFormat::JsonLines,
            };
            print!("{}", render(&outcome.diagnostics, format));
            ExitCode::from(outcome.exit_code() as u8)
        }
        Command::Translate { mode, arity, source, target, out, eta, fuel } => {
            let config = ReductionConfig { eta, fuel };
            if arity == 0 {
                eprintln!("error: --arity must be at least 1");
                return ExitCode::from(2);
            }
            let kind = match mode {
                Mode::Morphism => TemplateKind::Morphism,
                Mode::Relation => TemplateKind::Relation(arity),
            };
            match cmd_translate(&source, &target, &out, kind, &config) {
                Ok(()) => {
                    println!("wrote {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Transport { filled, source, target, out, eta, fuel } => {
            let config = ReductionConfig { eta, fuel };
            match cmd_transport(&filled, &source, &target, &out, &config) {
                Ok(()) => {
                    println!("wrote and rechecked {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
