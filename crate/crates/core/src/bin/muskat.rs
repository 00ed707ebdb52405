use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use log::error;

use muskat::config::parse_config;
use muskat::runner::{self, EXIT_USAGE};

/// Run a Muskat interface evolution described by a TOML file.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Run specification.
    config: PathBuf,
    /// Parse and validate only; build the initial data but do not integrate.
    #[arg(long)]
    check: bool,
    /// Seed for noisy initial data.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Only log warnings and errors.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = if args.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let code = match real_main(&args) {
        Ok(code) => code,
        Err(e) => {
            error!("{e}");
            EXIT_USAGE
        }
    };
    ExitCode::from(code as u8)
}

fn real_main(args: &Args) -> muskat::Result<i32> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| muskat::Error::Config {
        path: args.config.display().to_string(),
        msg: e.to_string(),
    })?;
    let cfg = parse_config(&text)?;
    if args.check {
        runner::build_initial(&cfg, args.seed)?;
        println!("{}: ok", args.config.display());
        return Ok(0);
    }
    Ok(runner::execute(&cfg, args.seed)?.exit_code())
}
