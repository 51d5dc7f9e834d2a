use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hankel_cli::{execute, write_outputs, Command, Overrides};

#[derive(Parser)]
#[command(name = "hankel", version, about = "Experiments on truncated Hankel matrices of moment sequences")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tail classification and partial trace of the moment sequence.
    Classify(RunArgs),
    /// Extreme eigenvalues over the N grid and the plateau verdict.
    Spectrum(RunArgs),
    /// Exact point-mass removal checks on a discrete measure.
    Extremal(RunArgs),
    /// Times the naive and FFT row actions after checking they agree.
    Bench(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the JSON report and CSV table.
    #[arg(long)]
    out: Option<PathBuf>,
    /// rational | f64 | bigfloat:<bits>
    #[arg(long)]
    backend: Option<String>,
    /// Worker threads for independent grid points.
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Classify(a) => (Command::Classify, a),
        Cmd::Spectrum(a) => (Command::Spectrum, a),
        Cmd::Extremal(a) => (Command::Extremal, a),
        Cmd::Bench(a) => (Command::Bench, a),
    };
    let overrides = Overrides {
        backend: args.backend,
        out_dir: args.out,
        jobs: args.jobs,
    };
    let result = execute(command, &args.config, &overrides).and_then(|out| {
        let written = match &out.report.config.out_dir {
            Some(dir) => write_outputs(&out, dir)?,
            None => Vec::new(),
        };
        Ok((out, written))
    });
    match result {
        Ok((out, written)) => {
            print!("{}", out.render());
            for p in written {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hankel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
