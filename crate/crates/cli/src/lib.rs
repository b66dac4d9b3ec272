//! Spec-file front end: parse a document, run one command, emit a JSON
//! report whose exit code follows the verdict.

pub mod commands;
pub mod report;
pub mod spec;

use std::path::{Path, PathBuf};

use clap::Parser;

pub use commands::{run_command, Command, Options};
pub use report::{RunReport, Verdict};
pub use spec::{parse_spec, serialize_spec, Diagnostic, SpecDocument, SpecErrors};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Spec(#[from] SpecErrors),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] clocksys::Error),
}

#[derive(Debug, Parser)]
#[command(name = "clocksys", version, about = "Check clock-system theorems on finite specs")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long)]
    pub clock: Option<String>,
    /// Overrides the clock's declared horizon.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Cap on enumerated candidates (default 10^7).
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub parallel: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub process: Option<String>,
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub map: Option<String>,
    /// Two filtered maps with a common target, as `f,g`.
    #[arg(long)]
    pub cospan: Option<String>,
    #[arg(long)]
    pub behavior: Option<String>,
    #[arg(long)]
    pub lens: Option<String>,
}

impl Args {
    pub fn options(&self) -> Options {
        Options {
            system: self.system.clone(),
            clock: self.clock.clone(),
            horizon: self.horizon,
            budget: self.budget,
            parallel: self.parallel,
            process: self.process.clone(),
            kernel: self.kernel.clone(),
            map: self.map.clone(),
            cospan: self.cospan.clone(),
            behavior: self.behavior.clone(),
            lens: self.lens.clone(),
        }
    }
}

/// Parses `text` and runs `cmd`. Never fails: errors become a report with
/// verdict `error`.
pub fn execute(cmd: Command, spec_name: &str, text: &str, opts: &Options) -> RunReport {
    let mut report = RunReport::new(format!("{} --spec {spec_name}{}", cmd.name(), opts.echo()));
    let outcome = parse_spec(text)
        .map_err(CliError::from)
        .and_then(|doc| run_command(&doc, cmd, opts, &mut report));
    if let Err(e) = outcome {
        report.verdict = Verdict::Error;
        report.counts.clear();
        report.details.clear();
        report.witnesses = match e {
            CliError::Spec(SpecErrors(diags)) => diags.iter().map(|d| d.to_string()).collect(),
            other => vec![other.to_string()],
        };
    }
    report
}

/// Reads the spec file named in `args` and runs the command.
pub fn run(args: &Args) -> RunReport {
    let name = Path::new(&args.spec)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    match std::fs::read_to_string(&args.spec) {
        Ok(text) => execute(args.command, &name, &text, &args.options()),
        Err(source) => {
            let mut r = RunReport::new(format!("{} --spec {name}{}", args.command.name(), args.options().echo()));
            r.verdict = Verdict::Error;
            r.witnesses.push(CliError::Io { path: args.spec.display().to_string(), source }.to_string());
            r
        }
    }
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book {}
