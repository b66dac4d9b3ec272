use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use clocksys_cli::{run, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    let start = Instant::now();
    let report = run(&args);
    let json = report.to_json();
    match &args.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    eprintln!("{}: {} in {:.3}s", args.command.name(), json_verdict(&report), start.elapsed().as_secs_f64());
    ExitCode::from(report.exit_code() as u8)
}

fn json_verdict(r: &clocksys_cli::RunReport) -> &'static str {
    match r.verdict {
        clocksys_cli::Verdict::Pass => "pass",
        clocksys_cli::Verdict::Fail => "fail",
        clocksys_cli::Verdict::Error => "error",
    }
}
