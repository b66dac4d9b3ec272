use std::sync::Arc;

use clap::ValueEnum;
use serde_json::{json, Value};

use clocksys::behavior::{
    check_representability, check_stoch_behavior, compare_stoch_predicates, oracle_behaviors, Behavior,
};
use clocksys::clock::{build_deterministic_clock, ClockSystem, Horizon};
use clocksys::filtercat::{
    glue_behavior, independent_pullback, is_immersion_kernel, is_immersion_martingale, FilteredMap,
};
use clocksys::finprob::{is_markov_with_law, AdaptedProcess};
use clocksys::machine::compose_system_with_lens;
use clocksys::{EnumConfig, Error, FinSet, MonadTag, MonadicSystem};

use crate::report::{RunReport, Verdict};
use crate::spec::{parse_spec, render_system, serialize_spec, SpecDocument, SystemDecl};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Behaviors,
    Represent,
    Markov,
    Immersion,
    Pullback,
    Glue,
    Compose,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Behaviors => "behaviors",
            Command::Represent => "represent",
            Command::Markov => "markov",
            Command::Immersion => "immersion",
            Command::Pullback => "pullback",
            Command::Glue => "glue",
            Command::Compose => "compose",
        }
    }
}

/// Named arguments shared by all commands; each command reads the ones it
/// needs.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub system: Option<String>,
    pub clock: Option<String>,
    pub horizon: Option<usize>,
    pub budget: Option<u64>,
    pub parallel: bool,
    pub process: Option<String>,
    pub kernel: Option<String>,
    pub map: Option<String>,
    pub cospan: Option<String>,
    pub behavior: Option<String>,
    pub lens: Option<String>,
}

impl Options {
    fn cfg(&self) -> EnumConfig {
        let mut cfg = EnumConfig::default();
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        cfg.parallel = self.parallel;
        cfg
    }

    /// The arguments in a fixed order, for the report's command echo.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let named = [
            ("system", &self.system),
            ("clock", &self.clock),
            ("process", &self.process),
            ("kernel", &self.kernel),
            ("map", &self.map),
            ("cospan", &self.cospan),
            ("behavior", &self.behavior),
            ("lens", &self.lens),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                out += &format!(" --{k} {v}");
            }
        }
        if let Some(h) = self.horizon {
            out += &format!(" --horizon {h}");
        }
        if let Some(b) = self.budget {
            out += &format!(" --budget {b}");
        }
        if self.parallel {
            out += " --parallel";
        }
        out
    }
}

fn need<'a>(v: &'a Option<String>, flag: &str, cmd: Command) -> Result<&'a str, CliError> {
    v.as_deref()
        .ok_or_else(|| CliError::Usage(format!("`{}` needs --{flag}", cmd.name())))
}

fn lookup<'a, T>(map: &'a std::collections::BTreeMap<String, T>, name: &str, kind: &str) -> Result<&'a T, CliError> {
    map.get(name)
        .ok_or_else(|| CliError::Usage(format!("no {kind} named `{name}` in the spec file")))
}

fn horizon(opts: &Options) -> Result<Option<Horizon>, CliError> {
    opts.horizon
        .map(|t| Horizon::new(t).map_err(|_| CliError::Usage("--horizon must be at least 1".into())))
        .transpose()
}

fn labels(set: &FinSet, xs: &[usize]) -> String {
    xs.iter().map(|&x| set.label(x).as_str()).collect::<Vec<_>>().join(" ")
}

fn render_process(p: &AdaptedProcess, set: &FinSet) -> String {
    p.steps().iter().map(|s| labels(set, s)).collect::<Vec<_>>().join(" | ")
}

fn render_behavior(clock: &ClockSystem, s: &MonadicSystem, b: &Behavior) -> String {
    let (pos, dir) = (&s.arena.pos, &s.arena.dir);
    match b {
        Behavior::Det(d) => format!(
            "xs {} ; outs {} ; ins {}",
            labels(&s.states, &d.xs),
            labels(pos, &d.outs),
            labels(dir, &d.ins)
        ),
        Behavior::Stoch(d) => format!(
            "xs {} ; outs {} ; ins {}",
            render_process(&d.xs, &s.states),
            render_process(&d.outs, pos),
            render_process(&d.ins, dir)
        ),
        Behavior::Nondet(m) => {
            // Clock directions are a single point, so each state carries one input.
            let cs = &clock.system.states;
            let pairs: Vec<String> = (0..cs.len())
                .map(|c| {
                    format!(
                        "{}->{}/{}/{}",
                        cs.label(c),
                        s.states.label(m.state_map[c]),
                        pos.label(m.chart.fwd(clock.system.readout(c))),
                        dir.label(m.chart.flat(clock.system.readout(c), 0))
                    )
                })
                .collect();
            pairs.join(" ")
        }
    }
}

/// Largest number of rendered behaviors kept in a report.
const SHOWN: usize = 64;

fn clock_for(doc: &SpecDocument, opts: &Options, s: &MonadicSystem, cmd: Command) -> Result<ClockSystem, CliError> {
    let h = horizon(opts)?;
    match &opts.clock {
        Some(c) => {
            lookup(&doc.clocks, c, "clock")?;
            Ok(doc.build_clock(c, h)?)
        }
        None => match (s.tag, h) {
            (MonadTag::Identity, Some(h)) => Ok(build_deterministic_clock(h)),
            _ => Err(CliError::Usage(format!(
                "`{}` needs --clock, or --horizon for an identity system",
                cmd.name()
            ))),
        },
    }
}

pub fn run_command(doc: &SpecDocument, cmd: Command, opts: &Options, report: &mut RunReport) -> Result<(), CliError> {
    let cfg = opts.cfg();
    match cmd {
        Command::Validate => validate(doc, report),
        Command::Behaviors => {
            let s = &lookup(&doc.systems, need(&opts.system, "system", cmd)?, "system")?.system;
            let clock = clock_for(doc, opts, s, cmd)?;
            let found = oracle_behaviors(&clock, s, &cfg)?;
            report.count("behaviors", found.len());
            report.detail("theory", clock.kind.name());
            report.detail("horizon", clock.horizon.get());
            let shown: Vec<Value> = found.iter().take(SHOWN).map(|b| render_behavior(&clock, s, b).into()).collect();
            report.detail("listed", shown);
            report.detail("truncated", found.len() > SHOWN);
            Ok(())
        }
        Command::Represent => {
            let s = &lookup(&doc.systems, need(&opts.system, "system", cmd)?, "system")?.system;
            let clock = clock_for(doc, opts, s, cmd)?;
            let r = check_representability(&clock, s, &cfg)?;
            report.count("morphisms", r.morphisms).count("behaviors", r.behaviors);
            report.detail("theory", r.theory).detail("horizon", r.horizon).detail("bijection", r.bijection);
            let mut ok = r.bijection;
            report.witnesses.extend(r.witness);
            if clock.tag() == MonadTag::Dist {
                let c = compare_stoch_predicates(&clock, s, &cfg)?;
                report.count("candidates", c.candidates).count("accepted", c.accepted);
                report.detail("predicates_agree", c.disagreement.is_none());
                ok &= c.disagreement.is_none();
                report.witnesses.extend(c.disagreement);
            }
            report.verdict = Verdict::from_bool(ok);
            Ok(())
        }
        Command::Markov => {
            let pname = need(&opts.process, "process", cmd)?;
            let p = lookup(&doc.processes, pname, "process")?;
            let k = lookup(&doc.kernels, need(&opts.kernel, "kernel", cmd)?, "kernel")?;
            if k.domain != p.target || k.codomain != p.target {
                return Err(CliError::Usage(format!(
                    "kernel must map `{}` to itself to be a law for `{pname}`",
                    p.target
                )));
            }
            let fs = doc.filtered_space(&p.filtration).expect("resolved");
            let ok = is_markov_with_law(&fs.space, &fs.filt, &p.process, &k.kernel)?;
            report.count("steps", p.process.len());
            report.detail("markov", ok);
            report.verdict = Verdict::from_bool(ok);
            Ok(())
        }
        Command::Immersion => {
            let phi = &lookup(&doc.fmaps, need(&opts.map, "map", cmd)?, "fmap")?.map;
            let ok = immersion_checks(phi, "", &cfg, report)?;
            report.count("subsets", 1u64 << phi.dst.space.len().min(63));
            report.verdict = Verdict::from_bool(ok);
            Ok(())
        }
        Command::Pullback => pullback(doc, need(&opts.cospan, "cospan", cmd)?, &cfg, report),
        Command::Glue => glue(doc, opts, report),
        Command::Compose => {
            let sname = need(&opts.system, "system", cmd)?;
            let lname = need(&opts.lens, "lens", cmd)?;
            let sd = lookup(&doc.systems, sname, "system")?;
            let ld = lookup(&doc.lenses, lname, "lens")?;
            let composite = compose_system_with_lens(&sd.system, &ld.lens)?;
            let name = format!("{sname}_via_{lname}");
            let decl = SystemDecl {
                arena: ld.dst.clone(),
                states: sd.states.clone(),
                system: Arc::new(composite),
            };
            report.count("states", decl.system.states.len());
            report.detail("name", name.clone());
            report.detail("system", render_system(&name, &decl));
            Ok(())
        }
    }
}

/// Runs both immersion checks, recording them under `prefix`.
fn immersion_checks(phi: &FilteredMap, prefix: &str, cfg: &EnumConfig, report: &mut RunReport) -> Result<bool, CliError> {
    let kernel = is_immersion_kernel(phi);
    let mart = is_immersion_martingale(phi, cfg)?;
    report.detail(&format!("{prefix}kernel_check"), kernel);
    report.detail(&format!("{prefix}martingale_check"), mart.immersion);
    report.detail(&format!("{prefix}checks_agree"), kernel == mart.immersion);
    if let Some((v, level)) = &mart.witness {
        report.witnesses.push(format!(
            "{prefix}event {{{}}}: pulled-back conditional probability is not a martingale from level {} to {}",
            labels(&phi.dst.space.omega, v),
            level + 1,
            level + 2
        ));
    }
    if kernel != mart.immersion {
        report.witnesses.push(format!("{prefix}kernel and martingale checks disagree"));
    }
    Ok(kernel && mart.immersion)
}

fn pullback(doc: &SpecDocument, cospan: &str, cfg: &EnumConfig, report: &mut RunReport) -> Result<(), CliError> {
    let Some((a, b)) = cospan.split_once(',') else {
        return Err(CliError::Usage("--cospan takes two map names separated by a comma".into()));
    };
    let f = lookup(&doc.fmaps, a.trim(), "fmap")?;
    let g = lookup(&doc.fmaps, b.trim(), "fmap")?;
    if f.dst != g.dst {
        return Err(CliError::Usage(format!("`{a}` and `{b}` have different targets")));
    }
    let pb = independent_pullback(&f.map, &g.map)?;
    let space = &pb.space.space;
    report.count("points", space.len());
    report.count("positive_points", (0..space.len()).filter(|&k| !is_null(space.prob(k))).count());
    report.detail("input_left_immersion", is_immersion_kernel(&f.map));
    report.detail("input_right_immersion", is_immersion_kernel(&g.map));
    let left = immersion_checks(&pb.left, "left_", cfg, report)?;
    let right = immersion_checks(&pb.right, "right_", cfg, report)?;
    let points: Vec<Value> = pb
        .pairs
        .iter()
        .enumerate()
        .map(|(k, &(x, y))| {
            format!(
                "({}, {}) {}",
                f.map.src.space.omega.label(x),
                g.map.src.space.omega.label(y),
                space.prob(k)
            )
            .into()
        })
        .collect();
    report.detail("coupling", points);
    report.verdict = Verdict::from_bool(left && right);
    Ok(())
}

fn is_null(r: clocksys::Rational) -> bool {
    r == clocksys::Rational::from_integer(0)
}

fn glue(doc: &SpecDocument, opts: &Options, report: &mut RunReport) -> Result<(), CliError> {
    let mname = need(&opts.map, "map", Command::Glue)?;
    let bname = need(&opts.behavior, "behavior", Command::Glue)?;
    let f = lookup(&doc.fmaps, mname, "fmap")?;
    let bd = lookup(&doc.behaviors, bname, "behavior")?;
    if bd.filtration != f.src {
        return Err(CliError::Usage(format!(
            "behavior `{bname}` lives on `{}`, but `{mname}` starts at `{}`",
            bd.filtration, f.src
        )));
    }
    let (s, _, b) = doc.stoch_behavior(bname).expect("resolved");
    let src = &f.map.src.space.omega;
    match glue_behavior(&f.map, &s, &b) {
        Ok(g) => {
            report.count("steps", g.xs.len());
            report.detail("xs", render_process(&g.xs, &s.states));
            report.detail("outs", render_process(&g.outs, &s.arena.pos));
            report.detail("ins", render_process(&g.ins, &s.arena.dir));
        }
        Err(Error::NotInvariant { process, level, left, right }) => {
            report.verdict = Verdict::Fail;
            let pair = [src.label(left).as_str(), src.label(right).as_str()];
            report.detail("witness_pair", json!(pair));
            report.witnesses.push(format!(
                "process {process} step {level} differs on the positive-mass pair ({}, {})",
                pair[0], pair[1]
            ));
        }
        Err(e @ (Error::NotAdapted { .. } | Error::InvalidBehavior(_))) => {
            report.verdict = Verdict::Fail;
            report.witnesses.push(e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn validate(doc: &SpecDocument, report: &mut RunReport) -> Result<(), CliError> {
    for (k, n) in doc.declaration_counts() {
        report.counts.insert(k, n);
    }
    let mut ok = true;
    for (name, p) in &doc.processes {
        if let Err(e) = p.process.check_adapted(&doc.filtrations[&p.filtration].filt) {
            ok = false;
            report.witnesses.push(format!("process {name}: {e}"));
        }
    }
    for name in doc.clocks.keys() {
        if let Err(e) = doc.build_clock(name, None) {
            ok = false;
            report.witnesses.push(format!("clock {name}: {e}"));
        }
    }
    for name in doc.behaviors.keys() {
        let (s, fs, b) = doc.stoch_behavior(name).expect("resolved");
        if !check_stoch_behavior(&s, &fs.space, &fs.filt, &b)? {
            ok = false;
            report.witnesses.push(format!("behavior {name} breaks the output or law condition"));
        }
    }
    let round_trip = parse_spec(&serialize_spec(doc)).map(|d| d == *doc).unwrap_or(false);
    if !round_trip {
        ok = false;
        report.witnesses.push("serialized document does not parse back to itself".into());
    }
    report.detail("round_trip", round_trip);
    report.verdict = Verdict::from_bool(ok);
    Ok(())
}
