use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use henstock_ode_cli::{run, threads_from_env, Cli, RunConfig};

fn usage() -> String {
    Cli::command().render_usage().to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let message = e.render().to_string();
            if message.contains("Usage:") {
                eprint!("{message}");
            } else {
                eprintln!("{}\n\n{}", message.trim_end(), usage());
            }
            return ExitCode::from(2);
        }
        Err(e) => e.exit(),
    };
    let result = threads_from_env().and_then(|threads| {
        if let Some(n) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()?;
        }
        run(&RunConfig::from(cli), std::io::stdout().lock())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}\n\n{}", usage());
            ExitCode::FAILURE
        }
    }
}
