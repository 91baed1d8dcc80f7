use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use sstoric_cli::{
    cmd_export_matrix, cmd_fixture, cmd_fuzz, cmd_resolve, cmd_verify, EXIT_INPUT,
};

#[derive(Parser)]
#[command(
    name = "sstoric",
    version,
    about = "Toric resolutions of semistable degenerations: refinements, obstruction tables, and exact verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve a job to a refinement and write it out.
    Resolve { job: PathBuf },
    /// Run the verification stages of a job.
    Verify { job: PathBuf },
    /// Run a golden fixture (a1 or a2).
    Fixture { name: String },
    /// Run a randomized verification campaign.
    Fuzz {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: u32,
    },
    /// Print the intersection table as CSV or Markdown.
    ExportMatrix {
        job: Option<PathBuf>,
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let result = match &cli.command {
        Command::Resolve { job } => cmd_resolve(job),
        Command::Verify { job } => cmd_verify(job),
        Command::Fixture { name } => cmd_fixture(name),
        Command::Fuzz { seed, count } => cmd_fuzz(*seed, *count),
        Command::ExportMatrix {
            job,
            fixture,
            format,
        } => cmd_export_matrix(job.as_deref(), fixture.as_deref(), format),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("sstoric: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
