//! Runs a scenario file as the binary does.
//!
//! `cargo run --example run_scenario -- crates/core/scenarios/solve_linear.conf [out]`

use std::path::PathBuf;

use multiwave::scenario::{parse_config_with, reason_line, run_scenario, ParseOptions, RunOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(
        args.next()
            .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/check_admissible.conf").to_string()),
    );
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out".into()));
    let base_dir = path.parent().map(|p| p.to_path_buf());
    let result = std::fs::read_to_string(&path)
        .map_err(multiwave::Error::from)
        .and_then(|text| parse_config_with(&text, &ParseOptions { base_dir: base_dir.clone(), seed: None }))
        .and_then(|cfg| {
            println!("{cfg}");
            run_scenario(&cfg, &RunOptions { out_dir: out, base_dir, verify: true })
        });
    match result {
        Ok(outcome) => {
            for (k, v) in &outcome.summary {
                println!("{k} = {v}");
            }
            println!("wrote {} and {}", outcome.table.display(), outcome.summary_file.display());
        }
        Err(e) => {
            eprintln!("{}", reason_line(&e));
            std::process::exit(1);
        }
    }
}
