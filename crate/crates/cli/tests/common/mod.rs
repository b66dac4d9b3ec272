#![allow(dead_code)]

use std::path::{Path, PathBuf};

use clap::Parser;
use clocksys_cli::{run, Args, RunReport};

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

/// Golden cases: `args[1]` is a spec file in `tests/golden`.
pub const CASES: &[Case] = &[
    Case { name: "toggle_represent", args: &["represent", "toggle.spec", "--clock", "Count", "--system", "Toggle"], exit: 0 },
    Case { name: "toggle_behaviors", args: &["behaviors", "toggle.spec", "--system", "Toggle", "--horizon", "4"], exit: 0 },
    Case { name: "coin_validate", args: &["validate", "coin.spec"], exit: 0 },
    Case { name: "coin_represent", args: &["represent", "coin.spec", "--clock", "Tick", "--system", "Flip"], exit: 0 },
    Case { name: "coin_behaviors", args: &["behaviors", "coin.spec", "--clock", "Tick", "--system", "Flip"], exit: 0 },
    Case { name: "coin_markov_law", args: &["markov", "coin.spec", "--process", "Path", "--kernel", "Law"], exit: 0 },
    Case { name: "coin_markov_sticky", args: &["markov", "coin.spec", "--process", "Path", "--kernel", "Sticky"], exit: 1 },
    Case { name: "coin_budget", args: &["represent", "coin.spec", "--clock", "Tick", "--system", "Flip", "--budget", "100"], exit: 2 },
    Case { name: "maps_identity", args: &["immersion", "maps.spec", "--map", "Id"], exit: 0 },
    Case { name: "maps_peek", args: &["immersion", "maps.spec", "--map", "Peek"], exit: 1 },
    Case { name: "maps_pullback", args: &["pullback", "maps.spec", "--cospan", "Head,Head"], exit: 0 },
    Case { name: "glue_honest", args: &["glue", "glue.spec", "--map", "Forget", "--behavior", "Honest"], exit: 0 },
    Case { name: "glue_cheat", args: &["glue", "glue.spec", "--map", "Forget", "--behavior", "Cheat"], exit: 1 },
    Case { name: "compose", args: &["compose", "compose.spec", "--system", "Counter", "--lens", "Wire"], exit: 0 },
    Case { name: "nondet_linear", args: &["represent", "nondet.spec", "--clock", "Line", "--system", "Drift"], exit: 0 },
    Case { name: "nondet_graph", args: &["represent", "nondet.spec", "--clock", "Cycle", "--system", "Drift", "--horizon", "3"], exit: 0 },
    Case { name: "broken_validate", args: &["validate", "broken.spec"], exit: 2 },
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Command-line arguments for a case, with the spec file path made absolute.
pub fn argv(case: &Case) -> Vec<String> {
    let mut v = vec![case.args[0].to_string(), "--spec".into(), golden_dir().join(case.args[1]).display().to_string()];
    v.extend(case.args[2..].iter().map(|s| s.to_string()));
    v
}

pub fn run_case(case: &Case, extra: &[&str]) -> RunReport {
    let mut all = vec!["clocksys".to_string()];
    all.extend(argv(case));
    all.extend(extra.iter().map(|s| s.to_string()));
    run(&Args::try_parse_from(all).expect("case arguments parse"))
}

pub fn expected_report(case: &Case) -> PathBuf {
    golden_dir().join(format!("{}.json", case.name))
}
