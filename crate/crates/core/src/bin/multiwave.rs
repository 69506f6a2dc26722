use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use multiwave::scenario::{exit_code, parse_config_with, reason_line, run_scenario, ParseOptions, RunOptions};
use multiwave::Error;

/// Runs one scenario file and writes its CSV reports.
#[derive(Parser, Debug)]
#[command(name = "multiwave", version)]
struct Args {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    threads: Option<usize>,
    /// Replaces every seed in the scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Check residuals after every solve.
    #[arg(long)]
    verify: bool,
}

fn fail(e: &Error, code: u8) -> ExitCode {
    eprintln!("{}", reason_line(e));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::init();
    let args = Args::parse();
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("code=threads detail=\"{e}\"");
            return ExitCode::from(1);
        }
    }
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(&Error::Io(e), 1),
    };
    let base_dir = args.config.parent().map(|p| p.to_path_buf());
    let cfg = match parse_config_with(&text, &ParseOptions { base_dir: base_dir.clone(), seed: args.seed }) {
        Ok(c) => c,
        Err(e) => return fail(&e, 1),
    };
    let result = run_scenario(&cfg, &RunOptions { out_dir: args.out, base_dir, verify: args.verify });
    match &result {
        Ok(outcome) => {
            for (k, v) in &outcome.summary {
                println!("{k} = {v}");
            }
            println!("table = {}", outcome.table.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e, exit_code(&result) as u8),
    }
}
