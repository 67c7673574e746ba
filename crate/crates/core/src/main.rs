use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use maxwell_flow::cli::{configure_threads, execute, load_config, Command, THREADS_ENV};
use maxwell_flow::config::KEY_HELP;

#[derive(Parser)]
#[command(version, about = "Maxwell-fluid relaxation experiments", after_help = KEY_HELP)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Relaxation run at the first eps.
    Simulate,
    /// Relaxation run against the Navier-Stokes reference.
    Compare,
    /// Full eps sweep with rate fit.
    Sweep,
    /// Structural checks on sampled states.
    Check,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let setup = configure_threads(args.threads).and_then(|_| load_config(args.config.as_deref()));
    let mut cfg = match setup {
        Ok(c) => c,
        Err(f) => {
            eprintln!("error: {f}");
            return ExitCode::from(f.outcome.code());
        }
    };
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    let cmd = match args.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Compare => Command::Compare,
        Cmd::Sweep => Command::Sweep,
        Cmd::Check => Command::Check,
    };
    ExitCode::from(execute(cmd, &cfg, &mut std::io::stderr()).code())
}
