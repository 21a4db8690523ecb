use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use triconv::cli::{exit_code, run, Command, RunSpec};

/// Triple autoconvolution laboratory for quartic-perturbed parabolas.
#[derive(Parser, Debug)]
#[command(name = "triconv", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// Curve config (`r`, `lambda`, `a`, optional `phi`).
    #[arg(long)]
    params: PathBuf,

    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override a setting, e.g. `--set grid.nx=101`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let spec = RunSpec {
        command: args.command,
        params_path: args.params,
        output_path: args.out,
        overrides: args.set,
    };
    match run(&spec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("triconv: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
