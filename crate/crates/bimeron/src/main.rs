use std::path::PathBuf;
use std::process::ExitCode;

use bimeron::cli::{run, RunConfig};

fn usage() -> &'static str {
    "usage: bimeron <command> [--config FILE] [--key value ...]\n\
     commands: ansatz | energy | minimize | sweep-conformal | sweep-eps | verify | neck\n\
     config file holds key = value lines; flags override the file"
}

fn main() -> ExitCode {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        println!("{}", usage());
        return ExitCode::from(if args.is_empty() { 1 } else { 0 });
    }
    let command = args.remove(0);
    // peel off --config FILE if present
    let mut config_path: Option<PathBuf> = None;
    let mut flags = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            match it.next() {
                Some(p) => config_path = Some(PathBuf::from(p)),
                None => {
                    eprintln!("--config needs a path");
                    return ExitCode::from(1);
                }
            }
        } else {
            flags.push(a);
        }
    }
    let cfg = match RunConfig::from_file_and_flags(config_path.as_deref(), &flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("{}", usage());
            return ExitCode::from(1);
        }
    };
    match run(&command, &cfg) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
