use std::process::ExitCode;

use dirac_lattice_cli::{parse_config, run_command};

const USAGE: &str = "usage: dirac-lattice <config.toml>";

fn main() -> ExitCode {
    let mut args = std::env::args().skip(1);
    let (Some(path), None) = (args.next(), args.next()) else {
        eprintln!("{USAGE}");
        return ExitCode::from(2);
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {path}: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = run_command(&cfg);
    for l in &outcome.lines {
        if l.starts_with("error:") {
            eprintln!("{l}");
        } else {
            println!("{l}");
        }
    }
    ExitCode::from(outcome.exit as u8)
}
