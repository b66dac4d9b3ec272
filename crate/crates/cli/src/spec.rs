//! The line-oriented spec format: parsing with located diagnostics,
//! name resolution, and serialization back to text.
//!
//! ```text
//! set Coin = H T
//! space P on Omega = uniform
//! filtration F on P = HH HT | TH TT ; HH | HT | TH | TT
//! system S dist on A states Coin
//!   readout H -> H
//!   update H * -> H:1/2 T:1/2
//! end
//! ```
//!
//! Declarations may appear in any order; `#` starts a comment.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use clocksys::behavior::StochBehavior;
use clocksys::clock::{
    build_deterministic_clock, build_graph_clock, build_nondet_linear_clock, build_stochastic_clock, ClockSystem, Graph,
    Horizon,
};
use clocksys::filtercat::{FilteredMap, FilteredSpace};
use clocksys::finprob::{AdaptedProcess, FinProbSpace, Filtration, Partition};
use clocksys::{Arena, Chart, Dist, FinSet, Kernel, Label, Lens, MonadTag, MonadValue, MonadicSystem, Rational};

/// One problem found in a spec document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub hint: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}\n  hint: {}", self.line, self.column, self.message, self.hint)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{} problem(s) in spec:\n{}", .0.len(), .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct SpecErrors(pub Vec<Diagnostic>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArenaDecl {
    pub pos: String,
    pub dir: String,
    pub arena: Arena,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceDecl {
    pub set: String,
    pub space: FinProbSpace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationDecl {
    pub space: String,
    pub filt: Filtration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelDecl {
    pub domain: String,
    pub codomain: String,
    pub kernel: Kernel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartDecl {
    pub src: String,
    pub dst: String,
    pub chart: Chart,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LensDecl {
    pub src: String,
    pub dst: String,
    pub lens: Lens,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDecl {
    pub arena: String,
    pub states: String,
    pub system: Arc<MonadicSystem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessDecl {
    pub filtration: String,
    pub target: String,
    pub process: AdaptedProcess,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FmapDecl {
    pub src: String,
    pub dst: String,
    pub map: FilteredMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClockSpec {
    Deterministic,
    Stochastic { filtration: String },
    Linear { seeds: String },
    Graph { graph: String, seeds: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClockDecl {
    pub spec: ClockSpec,
    pub horizon: Horizon,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviorDecl {
    pub system: String,
    pub filtration: String,
    pub xs: String,
    pub outs: String,
    pub ins: String,
}

/// A fully resolved spec document.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecDocument {
    pub sets: BTreeMap<String, FinSet>,
    pub arenas: BTreeMap<String, ArenaDecl>,
    pub spaces: BTreeMap<String, SpaceDecl>,
    pub filtrations: BTreeMap<String, FiltrationDecl>,
    pub graphs: BTreeMap<String, Graph>,
    pub kernels: BTreeMap<String, KernelDecl>,
    pub charts: BTreeMap<String, ChartDecl>,
    pub lenses: BTreeMap<String, LensDecl>,
    pub systems: BTreeMap<String, SystemDecl>,
    pub processes: BTreeMap<String, ProcessDecl>,
    pub fmaps: BTreeMap<String, FmapDecl>,
    pub clocks: BTreeMap<String, ClockDecl>,
    pub behaviors: BTreeMap<String, BehaviorDecl>,
}

impl SpecDocument {
    pub fn filtered_space(&self, filtration: &str) -> Option<FilteredSpace> {
        let f = self.filtrations.get(filtration)?;
        let s = self.spaces.get(&f.space)?;
        FilteredSpace::new(s.space.clone(), f.filt.clone()).ok()
    }

    /// Builds a declared clock, optionally at a different horizon.
    pub fn build_clock(&self, name: &str, horizon: Option<Horizon>) -> clocksys::Result<ClockSystem> {
        let decl = self
            .clocks
            .get(name)
            .ok_or_else(|| clocksys::Error::UnknownLabel(name.to_string()))?;
        let h = horizon.unwrap_or(decl.horizon);
        match &decl.spec {
            ClockSpec::Deterministic => Ok(build_deterministic_clock(h)),
            ClockSpec::Stochastic { filtration } => {
                let fs = self.filtered_space(filtration).expect("resolved at parse time");
                build_stochastic_clock(&fs.space, &fs.filt, h)
            }
            ClockSpec::Linear { seeds } => build_nondet_linear_clock(&self.sets[seeds], h),
            ClockSpec::Graph { graph, seeds } => build_graph_clock(&self.graphs[graph], &self.sets[seeds], h),
        }
    }

    /// A declared behavior as processes over its filtered space.
    pub fn stoch_behavior(&self, name: &str) -> Option<(Arc<MonadicSystem>, FilteredSpace, StochBehavior)> {
        let b = self.behaviors.get(name)?;
        let s = self.systems.get(&b.system)?.system.clone();
        let fs = self.filtered_space(&b.filtration)?;
        let p = |n: &str| self.processes.get(n).map(|d| d.process.clone());
        Some((
            s,
            fs,
            StochBehavior {
                xs: p(&b.xs)?,
                outs: p(&b.outs)?,
                ins: p(&b.ins)?,
            },
        ))
    }

    pub fn declaration_counts(&self) -> BTreeMap<String, u64> {
        [
            ("sets", self.sets.len()),
            ("arenas", self.arenas.len()),
            ("spaces", self.spaces.len()),
            ("filtrations", self.filtrations.len()),
            ("graphs", self.graphs.len()),
            ("kernels", self.kernels.len()),
            ("charts", self.charts.len()),
            ("lenses", self.lenses.len()),
            ("systems", self.systems.len()),
            ("processes", self.processes.len()),
            ("fmaps", self.fmaps.len()),
            ("clocks", self.clocks.len()),
            ("behaviors", self.behaviors.len()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v as u64))
        .collect()
    }
}

#[derive(Clone, Copy, Debug)]
struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

const SINGLE_CHAR_TOKENS: &[char] = &['|', ';', '{', '}', '='];

fn tokenize(line: &str, line_no: usize) -> Vec<Tok<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let col_of = |byte: usize| body[..byte].chars().count() + 1;
    for (i, c) in body.char_indices() {
        if c.is_whitespace() || SINGLE_CHAR_TOKENS.contains(&c) {
            if let Some(s) = start.take() {
                out.push(Tok { text: &body[s..i], line: line_no, col: col_of(s) });
            }
            if !c.is_whitespace() {
                out.push(Tok { text: &body[i..i + c.len_utf8()], line: line_no, col: col_of(i) });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &body[s..], line: line_no, col: col_of(s) });
    }
    out
}

struct Decl<'a> {
    header: Vec<Tok<'a>>,
    body: Vec<Vec<Tok<'a>>>,
}

impl<'a> Decl<'a> {
    fn keyword(&self) -> &'a str {
        self.header[0].text
    }
}

const BLOCK_KINDS: &[&str] = &["kernel", "system", "chart", "lens", "graph", "process", "fmap"];
const LINE_KINDS: &[&str] = &["set", "arena", "space", "filtration", "clock", "behavior"];

struct Ctx {
    diags: Vec<Diagnostic>,
    /// Diagnostics count when the current declaration started resolving.
    decl_start: usize,
    kinds: HashMap<String, &'static str>,
}

impl Ctx {
    fn err(&mut self, at: Tok<'_>, message: impl Into<String>, hint: impl Into<String>) {
        self.diags.push(Diagnostic {
            line: at.line,
            column: at.col,
            message: message.into(),
            hint: hint.into(),
        });
    }
}

fn kind_name(keyword: &str) -> &'static str {
    match keyword {
        "set" => "set",
        "arena" => "arena",
        "space" => "space",
        "filtration" => "filtration",
        "clock" => "clock",
        "behavior" => "behavior",
        "kernel" => "kernel",
        "system" => "system",
        "chart" => "chart",
        "lens" => "lens",
        "graph" => "graph",
        "process" => "process",
        _ => "fmap",
    }
}

/// Parses and resolves a document, or reports every problem found.
pub fn parse_spec(text: &str) -> Result<SpecDocument, SpecErrors> {
    let mut ctx = Ctx { diags: Vec::new(), decl_start: 0, kinds: HashMap::new() };
    let decls = split_decls(text, &mut ctx);
    let mut by_kind: BTreeMap<&str, Vec<&Decl>> = BTreeMap::new();
    for d in &decls {
        let kw = d.keyword();
        let Some(name) = d.header.get(1) else {
            ctx.err(d.header[0], format!("`{kw}` declaration has no name"), format!("write `{kw} NAME ...`"));
            continue;
        };
        if Label::new(name.text).is_err() {
            ctx.err(*name, format!("invalid name `{}`", name.text), "names may not contain whitespace or `:|;{}#=>`");
            continue;
        }
        if let Some(prev) = ctx.kinds.get(name.text) {
            let prev = *prev;
            ctx.err(*name, format!("`{}` is already declared as a {prev}", name.text), "every declaration needs a unique name");
            continue;
        }
        ctx.kinds.insert(name.text.to_string(), kind_name(kw));
        by_kind.entry(kind_name(kw)).or_default().push(d);
    }
    let mut doc = SpecDocument::default();
    let order: [(&str, fn(&mut SpecDocument, &Decl, &mut Ctx)); 13] = [
        ("set", resolve_set),
        ("graph", resolve_graph),
        ("arena", resolve_arena),
        ("space", resolve_space),
        ("filtration", resolve_filtration),
        ("kernel", resolve_kernel),
        ("chart", resolve_chart),
        ("lens", resolve_lens),
        ("system", resolve_system),
        ("process", resolve_process),
        ("fmap", resolve_fmap),
        ("clock", resolve_clock),
        ("behavior", resolve_behavior),
    ];
    for (kind, f) in order {
        for d in by_kind.get(kind).into_iter().flatten() {
            ctx.decl_start = ctx.diags.len();
            f(&mut doc, d, &mut ctx);
        }
    }
    if ctx.diags.is_empty() {
        Ok(doc)
    } else {
        ctx.diags.sort_by_key(|d| (d.line, d.column));
        Err(SpecErrors(ctx.diags))
    }
}

fn split_decls<'a>(text: &'a str, ctx: &mut Ctx) -> Vec<Decl<'a>> {
    let mut out = Vec::new();
    let mut open: Option<Decl<'a>> = None;
    for (i, line) in text.lines().enumerate() {
        let toks = tokenize(line, i + 1);
        if toks.is_empty() {
            continue;
        }
        if let Some(block) = open.as_mut() {
            if toks.len() == 1 && toks[0].text == "end" {
                out.push(open.take().unwrap());
            } else if BLOCK_KINDS.contains(&toks[0].text) || LINE_KINDS.contains(&toks[0].text) {
                let kw = block.keyword();
                ctx.err(block.header[0], format!("`{kw}` block is not closed"), "add a line containing only `end`");
                open = None;
                start_decl(toks, &mut open, &mut out, ctx);
            } else {
                block.body.push(toks);
            }
            continue;
        }
        start_decl(toks, &mut open, &mut out, ctx);
    }
    if let Some(block) = open {
        let kw = block.keyword();
        ctx.err(block.header[0], format!("`{kw}` block is not closed"), "add a line containing only `end`");
    }
    out
}

fn start_decl<'a>(toks: Vec<Tok<'a>>, open: &mut Option<Decl<'a>>, out: &mut Vec<Decl<'a>>, ctx: &mut Ctx) {
    let kw = toks[0].text;
    if BLOCK_KINDS.contains(&kw) {
        *open = Some(Decl { header: toks, body: Vec::new() });
    } else if LINE_KINDS.contains(&kw) {
        out.push(Decl { header: toks, body: Vec::new() });
    } else {
        ctx.err(
            toks[0],
            format!("unknown declaration `{kw}`"),
            format!("start a declaration with one of: {}", [LINE_KINDS, BLOCK_KINDS].concat().join(", ")),
        );
    }
}

/// Checks that `toks` matches `pattern`, where `_` stands for any single
/// token; returns the wildcard tokens.
fn shape<'a>(toks: &[Tok<'a>], pattern: &[&str], usage: &str, ctx: &mut Ctx) -> Option<Vec<Tok<'a>>> {
    let mut holes = Vec::new();
    for (k, p) in pattern.iter().enumerate() {
        let Some(t) = toks.get(k) else {
            let at = *toks.last().unwrap();
            ctx.err(at, "line ends too early", format!("expected `{usage}`"));
            return None;
        };
        if *p == "_" {
            holes.push(*t);
        } else if t.text != *p {
            ctx.err(*t, format!("expected `{p}`, found `{}`", t.text), format!("expected `{usage}`"));
            return None;
        }
    }
    if toks.len() > pattern.len() {
        ctx.err(toks[pattern.len()], format!("unexpected `{}`", toks[pattern.len()].text), format!("expected `{usage}`"));
        return None;
    }
    Some(holes)
}

fn article(kind: &str) -> &'static str {
    if kind.starts_with('a') {
        "an"
    } else {
        "a"
    }
}

fn reference<'m, T>(map: &'m BTreeMap<String, T>, tok: Tok<'_>, kind: &str, ctx: &mut Ctx) -> Option<&'m T> {
    if let Some(v) = map.get(tok.text) {
        return Some(v);
    }
    match ctx.kinds.get(tok.text).copied() {
        Some(other) if other != kind => ctx.err(
            tok,
            format!("`{}` is {} {other}, expected {} {kind}", tok.text, article(other), article(kind)),
            format!("refer to a declared {kind}"),
        ),
        // Declared with the right kind but failed to resolve: already reported.
        Some(_) => {}
        None => ctx.err(
            tok,
            format!("unknown {kind} `{}`", tok.text),
            format!("declare it with `{kind} {} ...` or fix the spelling", tok.text),
        ),
    }
    None
}

fn element(set: &FinSet, tok: Tok<'_>, what: &str, ctx: &mut Ctx) -> Option<usize> {
    match set.index_of(tok.text) {
        Some(i) => Some(i),
        None => {
            let known: Vec<&str> = set.iter().map(Label::as_str).collect();
            ctx.err(tok, format!("`{}` is not an element of {what}", tok.text), format!("use one of: {}", known.join(" ")));
            None
        }
    }
}

fn rational(tok: Tok<'_>, text: &str, ctx: &mut Ctx) -> Option<Rational> {
    let parsed = match text.split_once('/') {
        Some((p, q)) => p.parse::<i128>().ok().zip(q.parse::<i128>().ok()),
        None => text.parse::<i128>().ok().map(|p| (p, 1)),
    };
    match parsed {
        Some((_, 0)) => {
            ctx.err(tok, format!("zero denominator in `{text}`"), "write weights as `p/q` with q > 0");
            None
        }
        Some((p, q)) if p < 0 || q < 0 => {
            ctx.err(tok, format!("negative weight `{text}`"), "probabilities must be non-negative");
            None
        }
        Some((p, q)) => Some(Rational::new(p, q)),
        None => {
            ctx.err(tok, format!("`{text}` is not a rational"), "write weights as `p/q` or an integer");
            None
        }
    }
}

/// `label:weight ...` into a distribution over `set`.
fn weighted(set: &FinSet, toks: &[Tok<'_>], what: &str, ctx: &mut Ctx) -> Option<Vec<(usize, Rational)>> {
    let mut out = Vec::new();
    let mut ok = true;
    for &t in toks {
        let Some((l, w)) = t.text.split_once(':') else {
            ctx.err(t, format!("`{}` has no weight", t.text), "write `label:p/q`");
            ok = false;
            continue;
        };
        let lt = Tok { text: l, ..t };
        match (element(set, lt, what, ctx), rational(t, w, ctx)) {
            (Some(i), Some(r)) => out.push((i, r)),
            _ => ok = false,
        }
    }
    ok.then_some(out)
}

fn monad_value(tag: MonadTag, set: &FinSet, toks: &[Tok<'_>], what: &str, ctx: &mut Ctx) -> Option<MonadValue> {
    let Some(&first) = toks.first() else {
        return None;
    };
    match tag {
        MonadTag::Identity => {
            if toks.len() != 1 {
                ctx.err(toks[1], "a deterministic value is a single element", "write one label after `->`");
                return None;
            }
            element(set, first, what, ctx).map(MonadValue::Point)
        }
        MonadTag::Dist => {
            if toks.len() == 1 && !first.text.contains(':') {
                return element(set, first, what, ctx).map(|x| MonadValue::Dist(Dist::point(x)));
            }
            let entries = weighted(set, toks, what, ctx)?;
            match Dist::new(entries) {
                Ok(d) => Some(MonadValue::Dist(d)),
                Err(e) => {
                    ctx.err(first, format!("invalid distribution: {e}"), "weights must be non-negative and sum to exactly 1");
                    None
                }
            }
        }
        MonadTag::Power => {
            let last = *toks.last().unwrap();
            if first.text != "{" || last.text != "}" {
                ctx.err(first, "a nondeterministic value is a set", "write `{a b}` or `{}`");
                return None;
            }
            let mut set_out = clocksys::Subset::new();
            for &t in &toks[1..toks.len() - 1] {
                set_out.insert(element(set, t, what, ctx)?);
            }
            Some(MonadValue::Set(set_out))
        }
    }
}

fn tag_of(tok: Tok<'_>, ctx: &mut Ctx) -> Option<MonadTag> {
    let tag = MonadTag::from_name(tok.text);
    if tag.is_none() {
        ctx.err(tok, format!("unknown monad `{}`", tok.text), "use identity, dist or power");
    }
    tag
}

fn positive_int(tok: Tok<'_>, ctx: &mut Ctx) -> Option<usize> {
    match tok.text.parse::<usize>() {
        Ok(n) if n >= 1 => Some(n),
        _ => {
            ctx.err(tok, format!("`{}` is not a positive integer", tok.text), "horizons count steps and start at 1");
            None
        }
    }
}

fn report<T>(r: clocksys::Result<T>, at: Tok<'_>, name: &str, hint: &str, ctx: &mut Ctx) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            ctx.err(at, format!("{name}: {e}"), hint);
            None
        }
    }
}

/// Splits `a -> b` at the arrow.
fn arrow<'a, 'b>(toks: &'b [Tok<'a>], usage: &str, ctx: &mut Ctx) -> Option<(&'b [Tok<'a>], &'b [Tok<'a>])> {
    match toks.iter().position(|t| t.text == "->") {
        Some(k) if k + 1 < toks.len() => Some((&toks[..k], &toks[k + 1..])),
        _ => {
            ctx.err(toks[0], "missing `->` or right-hand side", format!("expected `{usage}`"));
            None
        }
    }
}

fn fill<T: Clone>(table: &mut [Option<T>], slot: usize, value: T, at: Tok<'_>, ctx: &mut Ctx) {
    if table[slot].is_some() {
        ctx.err(at, "entry given twice", "keep one line per table entry");
    }
    table[slot] = Some(value);
}

fn complete<T>(table: Vec<Option<T>>, at: Tok<'_>, name: &str, describe: impl Fn(usize) -> String, ctx: &mut Ctx) -> Option<Vec<T>> {
    if let Some(k) = table.iter().position(Option::is_none) {
        // A bad line already explains the gap.
        if ctx.diags.len() > ctx.decl_start {
            return None;
        }
        ctx.err(at, format!("{name}: missing entry for {}", describe(k)), "every table must be total");
        return None;
    }
    Some(table.into_iter().map(Option::unwrap).collect())
}

fn resolve_set(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let h = &d.header;
    if h.get(2).map(|t| t.text) != Some("=") {
        ctx.err(h[h.len().min(3) - 1], "expected `=`", "write `set NAME = a b c`");
        return;
    }
    let labels: Option<Vec<Label>> = h[3..]
        .iter()
        .map(|t| match Label::new(t.text) {
            Ok(l) => Some(l),
            Err(e) => {
                ctx.err(*t, e.to_string(), "pick another label");
                None
            }
        })
        .collect();
    if let Some(labels) = labels {
        if let Some(set) = report(FinSet::new(labels), h[1], h[1].text, "labels within a set must be distinct", ctx) {
            doc.sets.insert(h[1].text.to_string(), set);
        }
    }
}

fn resolve_graph(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let Some(_) = shape(&d.header, &["graph", "_"], "graph NAME", ctx) else { return };
    let mut vertices: Option<FinSet> = None;
    let mut edges = Vec::new();
    for line in &d.body {
        match line[0].text {
            "vertices" => {
                let names: Vec<&str> = line[1..].iter().map(|t| t.text).collect();
                vertices = report(FinSet::from_names(&names), line[0], "vertices", "vertex labels must be distinct", ctx);
            }
            "edge" => {
                if let Some(h) = shape(line, &["edge", "_", "_", "->", "_"], "edge NAME FROM -> TO", ctx) {
                    edges.push((h[0], h[1], h[2]));
                }
            }
            other => ctx.err(line[0], format!("unexpected `{other}` in graph"), "use `vertices ...` and `edge e u -> v`"),
        }
    }
    let Some(vertices) = vertices else {
        ctx.err(d.header[0], "graph has no `vertices` line", "add `vertices u v ...`");
        return;
    };
    let names: Vec<&str> = edges.iter().map(|e| e.0.text).collect();
    let Some(edge_set) = report(FinSet::from_names(&names), d.header[1], "edges", "edge labels must be distinct", ctx) else {
        return;
    };
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    for (_, u, v) in &edges {
        match (element(&vertices, *u, "the vertices", ctx), element(&vertices, *v, "the vertices", ctx)) {
            (Some(a), Some(b)) => {
                src.push(a);
                tgt.push(b);
            }
            _ => return,
        }
    }
    if let Some(g) = report(Graph::new(vertices, edge_set, src, tgt), d.header[1], d.header[1].text, "check the graph", ctx) {
        doc.graphs.insert(d.header[1].text.to_string(), g);
    }
}

fn resolve_arena(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let Some(h) = shape(&d.header, &["arena", "_", "=", "_", "_"], "arena NAME = POSITIONS DIRECTIONS", ctx) else {
        return;
    };
    let pos = reference(&doc.sets, h[1], "set", ctx).cloned();
    let dir = reference(&doc.sets, h[2], "set", ctx).cloned();
    let (Some(pos), Some(dir)) = (pos, dir) else { return };
    if let Some(arena) = report(Arena::new(pos, dir), h[0], h[0].text, "positions must be non-empty", ctx) {
        doc.arenas.insert(
            h[0].text.to_string(),
            ArenaDecl { pos: h[1].text.to_string(), dir: h[2].text.to_string(), arena },
        );
    }
}

fn resolve_space(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let h = &d.header;
    if h.len() < 6 || h[2].text != "on" || h[4].text != "=" {
        ctx.err(h[0], "malformed space", "write `space NAME on SET = uniform` or `= a:1/2 b:1/2`");
        return;
    }
    let Some(set) = reference(&doc.sets, h[3], "set", ctx).cloned() else { return };
    let space = if h.len() == 6 && h[5].text == "uniform" {
        FinProbSpace::uniform(set)
    } else {
        let Some(entries) = weighted(&set, &h[5..], h[3].text, ctx) else { return };
        let mut measure = vec![Rational::from_integer(0); set.len()];
        for (i, w) in entries {
            measure[i] += w;
        }
        FinProbSpace::new(set, measure)
    };
    if let Some(space) = report(space, h[1], &format!("space {}", h[1].text), "adjust the weights so they total 1", ctx) {
        doc.spaces.insert(h[1].text.to_string(), SpaceDecl { set: h[3].text.to_string(), space });
    }
}

fn parse_partition(set: &FinSet, toks: &[Tok<'_>], ctx: &mut Ctx) -> Option<Partition> {
    let mut blocks = Vec::new();
    for group in toks.split(|t| t.text == "|") {
        let block: Option<Vec<usize>> = group.iter().map(|&t| element(set, t, "the sample space", ctx)).collect();
        blocks.push(block?);
    }
    match Partition::new(set.len(), blocks) {
        Ok(p) => Some(p),
        Err(e) => {
            ctx.err(toks[0], format!("invalid partition: {e}"), "every outcome must appear in exactly one block");
            None
        }
    }
}

fn resolve_filtration(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let h = &d.header;
    if h.len() < 6 || h[2].text != "on" || h[4].text != "=" {
        ctx.err(h[0], "malformed filtration", "write `filtration NAME on SPACE = a b | c ; a | b | c`");
        return;
    }
    let Some(space) = reference(&doc.spaces, h[3], "space", ctx) else { return };
    let set = space.space.omega.clone();
    let levels: Option<Vec<Partition>> = h[5..].split(|t| t.text == ";").map(|lv| parse_partition(&set, lv, ctx)).collect();
    let Some(levels) = levels else { return };
    if let Some(filt) = report(Filtration::new(levels), h[1], h[1].text, "each level must refine the one before", ctx) {
        doc.filtrations.insert(h[1].text.to_string(), FiltrationDecl { space: h[3].text.to_string(), filt });
    }
}

fn resolve_kernel(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let Some(h) = shape(&d.header, &["kernel", "_", "_", ":", "_", "->", "_"], "kernel NAME TAG : FROM -> TO", ctx) else {
        return;
    };
    let Some(tag) = tag_of(h[1], ctx) else { return };
    let dom = reference(&doc.sets, h[2], "set", ctx).cloned();
    let cod = reference(&doc.sets, h[3], "set", ctx).cloned();
    let (Some(dom), Some(cod)) = (dom, cod) else { return };
    let mut table: Vec<Option<MonadValue>> = vec![None; dom.len()];
    for line in &d.body {
        let Some((l, r)) = arrow(line, "x -> VALUE", ctx) else { continue };
        if l.len() != 1 {
            ctx.err(l[0], "expected a single element before `->`", "write `x -> VALUE`");
            continue;
        }
        if let (Some(x), Some(v)) = (element(&dom, l[0], h[2].text, ctx), monad_value(tag, &cod, r, h[3].text, ctx)) {
            fill(&mut table, x, v, l[0], ctx);
        }
    }
    let Some(table) = complete(table, d.header[1], h[0].text, |k| dom.label(k).to_string(), ctx) else { return };
    if let Some(kernel) = report(Kernel::new(dom, cod, tag, table), h[0], h[0].text, "check the kernel table", ctx) {
        doc.kernels.insert(
            h[0].text.to_string(),
            KernelDecl { domain: h[2].text.to_string(), codomain: h[3].text.to_string(), kernel },
        );
    }
}

fn two_arenas(doc: &SpecDocument, h: &[Tok<'_>], ctx: &mut Ctx) -> Option<(Arena, Arena)> {
    let a = reference(&doc.arenas, h[1], "arena", ctx).map(|d| d.arena.clone());
    let b = reference(&doc.arenas, h[2], "arena", ctx).map(|d| d.arena.clone());
    a.zip(b)
}

fn resolve_chart(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let Some(h) = shape(&d.header, &["chart", "_", ":", "_", "->", "_"], "chart NAME : A -> B", ctx) else { return };
    let Some((a, b)) = two_arenas(doc, &h, ctx) else { return };
    let mut fwd = vec![None; a.pos.len()];
    let mut flat = vec![None; a.pos.len() * a.dir.len()];
    for line in &d.body {
        match line[0].text {
            "fwd" => {
                if let Some(t) = shape(line, &["fwd", "_", "->", "_"], "fwd p -> q", ctx) {
                    if let (Some(p), Some(q)) = (element(&a.pos, t[0], "the source positions", ctx), element(&b.pos, t[1], "the target positions", ctx)) {
                        fill(&mut fwd, p, q, t[0], ctx);
                    }
                }
            }
            "flat" => {
                if let Some(t) = shape(line, &["flat", "_", "_", "->", "_"], "flat p d -> e", ctx) {
                    let p = element(&a.pos, t[0], "the source positions", ctx);
                    let dd = element(&a.dir, t[1], "the source directions", ctx);
                    let e = element(&b.dir, t[2], "the target directions", ctx);
                    if let (Some(p), Some(dd), Some(e)) = (p, dd, e) {
                        fill(&mut flat, p * a.dir.len() + dd, e, t[0], ctx);
                    }
                }
            }
            other => ctx.err(line[0], format!("unexpected `{other}` in chart"), "use `fwd p -> q` and `flat p d -> e`"),
        }
    }
    let nd = a.dir.len();
    let fwd = complete(fwd, h[0], h[0].text, |k| format!("fwd {}", a.pos.label(k)), ctx);
    let flat = complete(flat, h[0], h[0].text, |k| format!("flat {} {}", a.pos.label(k / nd), a.dir.label(k % nd)), ctx);
    let (Some(fwd), Some(flat)) = (fwd, flat) else { return };
    if let Some(chart) = report(Chart::new(a, b, fwd, flat), h[0], h[0].text, "check the chart tables", ctx) {
        doc.charts.insert(h[0].text.to_string(), ChartDecl { src: h[1].text.to_string(), dst: h[2].text.to_string(), chart });
    }
}

fn resolve_lens(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let Some(h) = shape(&d.header, &["lens", "_", ":", "_", "->", "_"], "lens NAME : A -> B", ctx) else { return };
    let Some((a, b)) = two_arenas(doc, &h, ctx) else { return };
    let mut fwd = vec![None; a.pos.len()];
    let mut sharp = vec![None; a.pos.len() * b.dir.len()];
    for line in &d.body {
        match line[0].text {
            "fwd" => {
                if let Some(t) = shape(line, &["fwd", "_", "->", "_"], "fwd p -> q", ctx) {
                    if let (Some(p), Some(q)) = (element(&a.pos, t[0], "the source positions", ctx), element(&b.pos, t[1], "the target positions", ctx)) {
                        fill(&mut fwd, p, q, t[0], ctx);
                    }
                }
            }
            "sharp" => {
                if let Some(t) = shape(line, &["sharp", "_", "_", "->", "_"], "sharp p e -> d", ctx) {
                    let p = element(&a.pos, t[0], "the source positions", ctx);
                    let e = element(&b.dir, t[1], "the target directions", ctx);
                    let dd = element(&a.dir, t[2], "the source directions", ctx);
                    if let (Some(p), Some(e), Some(dd)) = (p, e, dd) {
                        fill(&mut sharp, p * b.dir.len() + e, dd, t[0], ctx);
                    }
                }
            }
            other => ctx.err(line[0], format!("unexpected `{other}` in lens"), "use `fwd p -> q` and `sharp p e -> d`"),
        }
    }
    let nd = b.dir.len();
    let fwd = complete(fwd, h[0], h[0].text, |k| format!("fwd {}", a.pos.label(k)), ctx);
    let sharp = complete(sharp, h[0], h[0].text, |k| format!("sharp {} {}", a.pos.label(k / nd), b.dir.label(k % nd)), ctx);
    let (Some(fwd), Some(sharp)) = (fwd, sharp) else { return };
    if let Some(lens) = report(Lens::new(a, b, fwd, sharp), h[0], h[0].text, "check the lens tables", ctx) {
        doc.lenses.insert(h[0].text.to_string(), LensDecl { src: h[1].text.to_string(), dst: h[2].text.to_string(), lens });
    }
}

fn resolve_system(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let Some(h) = shape(&d.header, &["system", "_", "_", "on", "_", "states", "_"], "system NAME TAG on ARENA states SET", ctx) else {
        return;
    };
    let Some(tag) = tag_of(h[1], ctx) else { return };
    let arena = reference(&doc.arenas, h[2], "arena", ctx).map(|a| a.arena.clone());
    let states = reference(&doc.sets, h[3], "set", ctx).cloned();
    let (Some(arena), Some(states)) = (arena, states) else { return };
    let nd = arena.dir.len();
    let mut readout = vec![None; states.len()];
    let mut update: Vec<Option<MonadValue>> = vec![None; states.len() * nd];
    for line in &d.body {
        match line[0].text {
            "readout" => {
                if let Some(t) = shape(line, &["readout", "_", "->", "_"], "readout x -> p", ctx) {
                    if let (Some(x), Some(p)) = (element(&states, t[0], h[3].text, ctx), element(&arena.pos, t[1], "the positions", ctx)) {
                        fill(&mut readout, x, p, t[0], ctx);
                    }
                }
            }
            "update" => {
                let Some((l, r)) = arrow(&line[1..], "update x d -> VALUE", ctx) else { continue };
                if l.len() != 2 {
                    ctx.err(line[0], "expected a state and a direction", "write `update x d -> VALUE`");
                    continue;
                }
                let x = element(&states, l[0], h[3].text, ctx);
                let dd = element(&arena.dir, l[1], "the directions", ctx);
                let v = monad_value(tag, &states, r, h[3].text, ctx);
                if let (Some(x), Some(dd), Some(v)) = (x, dd, v) {
                    fill(&mut update, x * nd + dd, v, l[0], ctx);
                }
            }
            other => ctx.err(line[0], format!("unexpected `{other}` in system"), "use `readout x -> p` and `update x d -> VALUE`"),
        }
    }
    let readout = complete(readout, h[0], h[0].text, |k| format!("readout {}", states.label(k)), ctx);
    let update = complete(update, h[0], h[0].text, |k| format!("update {} {}", states.label(k / nd), arena.dir.label(k % nd)), ctx);
    let (Some(readout), Some(update)) = (readout, update) else { return };
    if let Some(s) = report(MonadicSystem::new(tag, states, arena, readout, update), h[0], h[0].text, "check the system tables", ctx) {
        doc.systems.insert(
            h[0].text.to_string(),
            SystemDecl { arena: h[2].text.to_string(), states: h[3].text.to_string(), system: Arc::new(s) },
        );
    }
}

fn resolve_process(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let Some(h) = shape(&d.header, &["process", "_", "on", "_", ":", "_"], "process NAME on FILTRATION : SET", ctx) else {
        return;
    };
    let filt = reference(&doc.filtrations, h[1], "filtration", ctx).map(|f| f.filt.clone());
    let target = reference(&doc.sets, h[2], "set", ctx).cloned();
    let (Some(filt), Some(target)) = (filt, target) else { return };
    let n = filt.level(0).universe_len();
    let mut steps = Vec::new();
    for line in &d.body {
        if line[0].text != "step" {
            ctx.err(line[0], format!("unexpected `{}` in process", line[0].text), "write one `step v1 v2 ...` line per time step");
            return;
        }
        if line.len() - 1 != n {
            ctx.err(line[0], format!("step lists {} values for {n} outcomes", line.len() - 1), "give one value per outcome, in sample-space order");
            return;
        }
        let step: Option<Vec<usize>> = line[1..].iter().map(|&t| element(&target, t, h[2].text, ctx)).collect();
        let Some(step) = step else { return };
        steps.push(step);
    }
    if let Some(process) = report(AdaptedProcess::new(&target, steps, &filt), h[0], h[0].text, "each step must be constant on the blocks of its level", ctx) {
        doc.processes.insert(
            h[0].text.to_string(),
            ProcessDecl { filtration: h[1].text.to_string(), target: h[2].text.to_string(), process },
        );
    }
}

fn resolve_fmap(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let Some(h) = shape(&d.header, &["fmap", "_", ":", "_", "->", "_"], "fmap NAME : FILTRATION -> FILTRATION", ctx) else {
        return;
    };
    for t in [h[1], h[2]] {
        reference(&doc.filtrations, t, "filtration", ctx);
    }
    let (Some(src), Some(dst)) = (doc.filtered_space(h[1].text), doc.filtered_space(h[2].text)) else { return };
    let mut table = vec![None; src.space.len()];
    for line in &d.body {
        let Some(t) = shape(line, &["_", "->", "_"], "a -> x", ctx) else { continue };
        if let (Some(a), Some(x)) = (element(&src.space.omega, t[0], "the source", ctx), element(&dst.space.omega, t[1], "the target", ctx)) {
            fill(&mut table, a, x, t[0], ctx);
        }
    }
    let Some(table) = complete(table, h[0], h[0].text, |k| src.space.omega.label(k).to_string(), ctx) else { return };
    if let Some(map) = report(FilteredMap::new(src, dst, table), h[0], h[0].text, "the map must preserve the measure and the filtration", ctx) {
        doc.fmaps.insert(h[0].text.to_string(), FmapDecl { src: h[1].text.to_string(), dst: h[2].text.to_string(), map });
    }
}

fn resolve_clock(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let h = &d.header;
    let usage = "clock NAME deterministic|stochastic FILTRATION|linear SET|graph GRAPH SET horizon T";
    let Some(kind) = h.get(2) else {
        ctx.err(h[0], "clock has no kind", usage);
        return;
    };
    let (spec, rest) = match kind.text {
        "deterministic" => (Some(ClockSpec::Deterministic), 3),
        "stochastic" => {
            let Some(f) = h.get(3) else { return ctx.err(*kind, "missing filtration", usage) };
            let ok = reference(&doc.filtrations, *f, "filtration", ctx).is_some();
            (ok.then(|| ClockSpec::Stochastic { filtration: f.text.to_string() }), 4)
        }
        "linear" => {
            let Some(s) = h.get(3) else { return ctx.err(*kind, "missing seed set", usage) };
            let ok = reference(&doc.sets, *s, "set", ctx).is_some_and(|s| !s.is_empty());
            (ok.then(|| ClockSpec::Linear { seeds: s.text.to_string() }), 4)
        }
        "graph" => {
            let (Some(g), Some(s)) = (h.get(3), h.get(4)) else { return ctx.err(*kind, "missing graph or seed set", usage) };
            let ok_g = reference(&doc.graphs, *g, "graph", ctx).is_some();
            let ok_s = reference(&doc.sets, *s, "set", ctx).is_some_and(|s| !s.is_empty());
            ((ok_g && ok_s).then(|| ClockSpec::Graph { graph: g.text.to_string(), seeds: s.text.to_string() }), 5)
        }
        other => {
            ctx.err(*kind, format!("unknown clock kind `{other}`"), usage);
            return;
        }
    };
    let Some(t) = shape(&h[rest..], &["horizon", "_"], "horizon T", ctx) else { return };
    let (Some(spec), Some(t)) = (spec, positive_int(t[0], ctx)) else { return };
    let decl = ClockDecl { spec, horizon: Horizon::new(t).expect("positive") };
    doc.clocks.insert(h[1].text.to_string(), decl);
    if let Err(e) = doc.build_clock(h[1].text, None) {
        ctx.err(h[1], format!("clock {}: {e}", h[1].text), "a stochastic clock needs at least T filtration levels");
        doc.clocks.remove(h[1].text);
    }
}

fn resolve_behavior(doc: &mut SpecDocument, d: &Decl, ctx: &mut Ctx) {
    let Some(h) = shape(
        &d.header,
        &["behavior", "_", "of", "_", "on", "_", "=", "xs", "_", "outs", "_", "ins", "_"],
        "behavior NAME of SYSTEM on FILTRATION = xs P outs Q ins R",
        ctx,
    ) else {
        return;
    };
    let sys = reference(&doc.systems, h[1], "system", ctx).map(|s| s.clone());
    let filt_ok = reference(&doc.filtrations, h[2], "filtration", ctx).is_some();
    let procs: Vec<Option<ProcessDecl>> = h[3..].iter().map(|&t| reference(&doc.processes, t, "process", ctx).cloned()).collect();
    let (Some(sys), true) = (sys, filt_ok) else { return };
    if sys.system.tag != MonadTag::Dist {
        ctx.err(h[1], format!("system `{}` is {}, expected dist", h[1].text, sys.system.tag), "behaviors over a filtration belong to dist systems");
        return;
    }
    let expected = [(&sys.states, "states"), (&doc.arenas[&sys.arena].pos, "positions"), (&doc.arenas[&sys.arena].dir, "directions")];
    let mut ok = true;
    for ((p, t), (set, role)) in procs.iter().zip(&h[3..]).zip(expected) {
        let Some(p) = p else {
            ok = false;
            continue;
        };
        if p.filtration != h[2].text {
            ctx.err(*t, format!("process `{}` lives on `{}`, not `{}`", t.text, p.filtration, h[2].text), "all three processes must share the behavior's filtration");
            ok = false;
        } else if p.target != *set {
            ctx.err(*t, format!("process `{}` takes values in `{}`, expected the system's {role} `{set}`", t.text, p.target), "use a process over the right set");
            ok = false;
        }
    }
    if ok {
        doc.behaviors.insert(
            h[0].text.to_string(),
            BehaviorDecl {
                system: h[1].text.to_string(),
                filtration: h[2].text.to_string(),
                xs: h[3].text.to_string(),
                outs: h[4].text.to_string(),
                ins: h[5].text.to_string(),
            },
        );
    }
}

fn render_value(v: &MonadValue, set: &FinSet) -> String {
    match v {
        MonadValue::Point(x) => set.label(*x).to_string(),
        MonadValue::Dist(d) => d
            .support()
            .iter()
            .map(|(x, w)| format!("{}:{}", set.label(*x), w))
            .collect::<Vec<_>>()
            .join(" "),
        MonadValue::Set(s) => {
            let inner: Vec<String> = s.iter().map(|&x| set.label(x).to_string()).collect();
            if inner.is_empty() {
                "{}".into()
            } else {
                format!("{{{}}}", inner.join(" "))
            }
        }
    }
}

fn render_partition(p: &Partition, set: &FinSet) -> String {
    p.blocks()
        .iter()
        .map(|b| b.iter().map(|&w| set.label(w).to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Serializes one system declaration.
pub fn render_system(name: &str, decl: &SystemDecl) -> String {
    let s = &decl.system;
    let mut out = format!("system {name} {} on {} states {}\n", s.tag, decl.arena, decl.states);
    for x in 0..s.states.len() {
        out += &format!("  readout {} -> {}\n", s.states.label(x), s.arena.pos.label(s.readout(x)));
    }
    for x in 0..s.states.len() {
        for d in 0..s.arena.dir.len() {
            out += &format!(
                "  update {} {} -> {}\n",
                s.states.label(x),
                s.arena.dir.label(d),
                render_value(s.update(x, d), &s.states)
            );
        }
    }
    out + "end\n"
}

/// Canonical text for a document; parsing it back gives an equal document.
pub fn serialize_spec(doc: &SpecDocument) -> String {
    let mut out = String::new();
    for (n, s) in &doc.sets {
        let labels: Vec<&str> = s.iter().map(Label::as_str).collect();
        out += &format!("set {n} = {}\n", labels.join(" ")).replace(" \n", "\n");
    }
    for (n, a) in &doc.arenas {
        out += &format!("arena {n} = {} {}\n", a.pos, a.dir);
    }
    for (n, s) in &doc.spaces {
        let weights: Vec<String> = (0..s.space.len())
            .map(|w| format!("{}:{}", s.space.omega.label(w), s.space.prob(w)))
            .collect();
        out += &format!("space {n} on {} = {}\n", s.set, weights.join(" "));
    }
    for (n, f) in &doc.filtrations {
        let set = &doc.spaces[&f.space].space.omega;
        let levels: Vec<String> = f.filt.levels().iter().map(|p| render_partition(p, set)).collect();
        out += &format!("filtration {n} on {} = {}\n", f.space, levels.join(" ; "));
    }
    for (n, g) in &doc.graphs {
        out += &format!("graph {n}\n");
        let vs: Vec<&str> = g.vertices.iter().map(Label::as_str).collect();
        out += &format!("  vertices {}\n", vs.join(" "));
        for e in 0..g.edges.len() {
            out += &format!(
                "  edge {} {} -> {}\n",
                g.edges.label(e),
                g.vertices.label(g.source(e)),
                g.vertices.label(g.target(e))
            );
        }
        out += "end\n";
    }
    for (n, k) in &doc.kernels {
        out += &format!("kernel {n} {} : {} -> {}\n", k.kernel.tag, k.domain, k.codomain);
        for x in 0..k.kernel.domain.len() {
            out += &format!("  {} -> {}\n", k.kernel.domain.label(x), render_value(k.kernel.at(x), &k.kernel.codomain));
        }
        out += "end\n";
    }
    for (n, c) in &doc.charts {
        let ch = &c.chart;
        out += &format!("chart {n} : {} -> {}\n", c.src, c.dst);
        for p in 0..ch.src.pos.len() {
            out += &format!("  fwd {} -> {}\n", ch.src.pos.label(p), ch.dst.pos.label(ch.fwd(p)));
        }
        for p in 0..ch.src.pos.len() {
            for d in 0..ch.src.dir.len() {
                out += &format!(
                    "  flat {} {} -> {}\n",
                    ch.src.pos.label(p),
                    ch.src.dir.label(d),
                    ch.dst.dir.label(ch.flat(p, d))
                );
            }
        }
        out += "end\n";
    }
    for (n, l) in &doc.lenses {
        let ln = &l.lens;
        out += &format!("lens {n} : {} -> {}\n", l.src, l.dst);
        for p in 0..ln.src.pos.len() {
            out += &format!("  fwd {} -> {}\n", ln.src.pos.label(p), ln.dst.pos.label(ln.fwd(p)));
        }
        for p in 0..ln.src.pos.len() {
            for e in 0..ln.dst.dir.len() {
                out += &format!(
                    "  sharp {} {} -> {}\n",
                    ln.src.pos.label(p),
                    ln.dst.dir.label(e),
                    ln.src.dir.label(ln.sharp(p, e))
                );
            }
        }
        out += "end\n";
    }
    for (n, s) in &doc.systems {
        out += &render_system(n, s);
    }
    for (n, p) in &doc.processes {
        let target = &doc.sets[&p.target];
        out += &format!("process {n} on {} : {}\n", p.filtration, p.target);
        for step in p.process.steps() {
            let vals: Vec<&str> = step.iter().map(|&v| target.label(v).as_str()).collect();
            out += &format!("  step {}\n", vals.join(" "));
        }
        out += "end\n";
    }
    for (n, f) in &doc.fmaps {
        out += &format!("fmap {n} : {} -> {}\n", f.src, f.dst);
        let (a, b) = (&f.map.src.space.omega, &f.map.dst.space.omega);
        for w in 0..a.len() {
            out += &format!("  {} -> {}\n", a.label(w), b.label(f.map.apply(w)));
        }
        out += "end\n";
    }
    for (n, c) in &doc.clocks {
        let kind = match &c.spec {
            ClockSpec::Deterministic => "deterministic".to_string(),
            ClockSpec::Stochastic { filtration } => format!("stochastic {filtration}"),
            ClockSpec::Linear { seeds } => format!("linear {seeds}"),
            ClockSpec::Graph { graph, seeds } => format!("graph {graph} {seeds}"),
        };
        out += &format!("clock {n} {kind} horizon {}\n", c.horizon.get());
    }
    for (n, b) in &doc.behaviors {
        out += &format!(
            "behavior {n} of {} on {} = xs {} outs {} ins {}\n",
            b.system, b.filtration, b.xs, b.outs, b.ins
        );
    }
    out
}
