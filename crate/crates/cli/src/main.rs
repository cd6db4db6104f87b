use std::process::ExitCode;

use clap::Parser;

mod cli;
mod commands;
mod config;
mod error;
mod output;

use cli::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Echo(args) => commands::echo(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::KernelDump(args) => commands::kernel_dump(args),
        Command::Lyapunov(args) => commands::lyapunov(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("boltzecho: {e}");
            e.exit_code()
        }
    }
}
