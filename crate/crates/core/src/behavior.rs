//! Behaviors of systems, their enumeration, and their representation as
//! morphisms out of a clock.
//!
//! Horizon-`T` convention: the output condition is imposed at every step,
//! the update (or conditional-law) condition at steps `1..T-1`, and the last
//! input is free. Truncated clock morphisms impose exactly the same
//! constraints, because the clock's top level absorbs and is skipped when
//! checking the update square.

use std::sync::Arc;

use crate::clock::{ClockKind, ClockSystem, Horizon};
use crate::error::{Error, Result};
use crate::finprob::{conditional_probability, AdaptedProcess, FinProbSpace, Filtration};
use crate::foundation::{MonadTag, MonadValue};
use crate::interface::{all_tables, check_lens_chart_square, Arena, Chart, Lens};
use crate::machine::{check_system_morphism, decode, radix_total, search, EnumConfig, MonadicSystem, SystemMorphism};

/// Sequences `xᵢ`, `aᵢ⁺`, `aᵢ⁻` for a deterministic system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetBehavior {
    pub xs: Vec<usize>,
    pub outs: Vec<usize>,
    pub ins: Vec<usize>,
}

impl DetBehavior {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn prefix(&self, t: usize) -> DetBehavior {
        DetBehavior {
            xs: self.xs[..t].to_vec(),
            outs: self.outs[..t].to_vec(),
            ins: self.ins[..t].to_vec(),
        }
    }
}

/// Adapted processes `xᵢ`, `aᵢ⁺`, `aᵢ⁻` over a shared filtered space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StochBehavior {
    pub xs: AdaptedProcess,
    pub outs: AdaptedProcess,
    pub ins: AdaptedProcess,
}

impl StochBehavior {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn prefix(&self, t: usize) -> StochBehavior {
        StochBehavior {
            xs: self.xs.prefix(t),
            outs: self.outs.prefix(t),
            ins: self.ins.prefix(t),
        }
    }
}

/// A behavior in whichever theory the clock belongs to. Nondeterministic
/// behaviors are by definition morphisms out of the clock.
#[derive(Clone, Debug)]
pub enum Behavior {
    Det(DetBehavior),
    Stoch(StochBehavior),
    Nondet(SystemMorphism),
}

fn require_tag(s: &MonadicSystem, tag: MonadTag) -> Result<()> {
    if s.tag != tag {
        return Err(Error::TagMismatch { expected: tag, found: s.tag });
    }
    Ok(())
}

pub fn check_det_behavior(s: &MonadicSystem, b: &DetBehavior) -> Result<bool> {
    require_tag(s, MonadTag::Identity)?;
    let t = b.len();
    if b.outs.len() != t || b.ins.len() != t {
        return Err(Error::InvalidBehavior("state, output and input sequences differ in length".into()));
    }
    for i in 0..t {
        s.states.check_index(b.xs[i], "behavior state")?;
        s.arena.pos.check_index(b.outs[i], "behavior output")?;
        s.arena.dir.check_index(b.ins[i], "behavior input")?;
    }
    Ok((0..t).all(|i| b.outs[i] == s.readout(b.xs[i]))
        && (0..t.saturating_sub(1)).all(|i| *s.update(b.xs[i], b.ins[i]) == MonadValue::Point(b.xs[i + 1])))
}

/// All length-`T` behaviors, ordered by initial state and then by inputs.
/// There are exactly `|X| · |A⁻|^T` of them.
pub fn enumerate_det_behaviors(s: &MonadicSystem, h: Horizon) -> Result<Vec<DetBehavior>> {
    require_tag(s, MonadTag::Identity)?;
    let t = h.get();
    let mut out = Vec::new();
    for x0 in 0..s.states.len() {
        for ins in all_tables(t, s.arena.dir.len()) {
            let mut xs = Vec::with_capacity(t);
            xs.push(x0);
            for i in 1..t {
                let MonadValue::Point(next) = s.update(xs[i - 1], ins[i - 1]) else { unreachable!() };
                xs.push(*next);
            }
            let outs = xs.iter().map(|&x| s.readout(x)).collect();
            out.push(DetBehavior { xs, outs, ins });
        }
    }
    Ok(out)
}

pub fn check_stoch_behavior(
    s: &MonadicSystem,
    space: &FinProbSpace,
    filt: &Filtration,
    b: &StochBehavior,
) -> Result<bool> {
    require_tag(s, MonadTag::Dist)?;
    let t = b.len();
    if b.outs.len() != t || b.ins.len() != t {
        return Err(Error::InvalidBehavior("state, output and input processes differ in length".into()));
    }
    if b.xs.target_len() != s.states.len()
        || b.outs.target_len() != s.arena.pos.len()
        || b.ins.target_len() != s.arena.dir.len()
    {
        return Err(Error::DomainMismatch("behavior processes take values outside the system".into()));
    }
    if filt.is_empty() || filt.level(0).universe_len() != space.len() {
        return Err(Error::DomainMismatch("filtration and space disagree".into()));
    }
    b.xs.check_adapted(filt)?;
    b.outs.check_adapted(filt)?;
    b.ins.check_adapted(filt)?;
    let positive: Vec<usize> = (0..space.len()).filter(|&w| space.prob(w) != 0.into()).collect();
    for i in 0..t {
        if positive.iter().any(|&w| b.outs.step(i)[w] != s.readout(b.xs.step(i)[w])) {
            return Ok(false);
        }
    }
    for i in 0..t.saturating_sub(1) {
        let cond = conditional_probability(space, filt.level(i), b.xs.step(i + 1));
        for &w in &positive {
            let MonadValue::Dist(law) = s.update(b.xs.step(i)[w], b.ins.step(i)[w]) else { unreachable!() };
            if cond[w] != *law {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Measurability classes `(level, block)` of the first `t` filtration
/// levels, indexed by `level * |Ω| + ω`.
fn level_classes(space: &FinProbSpace, filt: &Filtration, t: usize) -> (Vec<usize>, usize) {
    let n = space.len();
    let mut of_state = Vec::with_capacity(t * n);
    let mut offset = 0;
    for i in 0..t {
        let level = filt.level(i);
        of_state.extend((0..n).map(|w| offset + level.block_of(w)));
        offset += level.num_blocks();
    }
    (of_state, offset)
}

fn process_from_classes(of_state: &[usize], digits: &[usize], n: usize, t: usize, target_len: usize) -> AdaptedProcess {
    let steps = (0..t)
        .map(|i| (0..n).map(|w| digits[of_state[i * n + w]]).collect())
        .collect();
    AdaptedProcess::unchecked(target_len, steps)
}

/// Size of the candidate space searched by [`enumerate_stoch_behaviors`].
pub fn stoch_candidate_count(s: &MonadicSystem, space: &FinProbSpace, filt: &Filtration, h: Horizon) -> u128 {
    let (_, c) = level_classes(space, filt, h.get().min(filt.len()));
    let per = s.states.len() * s.arena.pos.len() * s.arena.dir.len();
    radix_total(&vec![per; c])
}

/// Oracle: every adapted triple of processes that satisfies the behavior
/// conditions, by brute force.
pub fn enumerate_stoch_behaviors(
    s: &MonadicSystem,
    space: &FinProbSpace,
    filt: &Filtration,
    h: Horizon,
    cfg: &EnumConfig,
) -> Result<Vec<StochBehavior>> {
    require_tag(s, MonadTag::Dist)?;
    let t = h.get();
    if filt.len() < t {
        return Err(Error::Shape(format!("horizon {t} exceeds the filtration length {}", filt.len())));
    }
    let (of_state, c) = level_classes(space, filt, t);
    let (nx, np, nd) = (s.states.len(), s.arena.pos.len(), s.arena.dir.len());
    let radices: Vec<usize> = [vec![nx; c], vec![np; c], vec![nd; c]].concat();
    let total = radix_total(&radices);
    cfg.admit(total)?;
    let n = space.len();
    Ok(search(total, cfg, |code| {
        let mut digits = vec![0; 3 * c];
        decode(code, &radices, &mut digits);
        let b = StochBehavior {
            xs: process_from_classes(&of_state, &digits[..c], n, t, nx),
            outs: process_from_classes(&of_state, &digits[c..2 * c], n, t, np),
            ins: process_from_classes(&of_state, &digits[2 * c..], n, t, nd),
        };
        check_stoch_behavior(s, space, filt, &b).expect("candidates are adapted").then_some(b)
    }))
}

fn clock_squares(clock: &ClockSystem, dst: &MonadicSystem, state_map: &[usize], fwd: &[usize], flat: &[usize]) -> bool {
    let c = &clock.system;
    (0..clock.num_states()).filter(|&s| !clock.is_null(s)).all(|s| {
        fwd[c.readout(s)] == dst.readout(state_map[s])
            && (clock.is_absorbing(s)
                || c.update(s, 0).map_with(|y| state_map[y]) == *dst.update(state_map[s], flat[c.readout(s)]))
    })
}

/// Whether `m` is a truncated morphism out of `clock`: constant on the
/// clock's measurability classes, output square at every non-null state,
/// update square at every non-null state below the top.
pub fn check_truncated_morphism(clock: &ClockSystem, m: &SystemMorphism) -> Result<bool> {
    if !Arc::ptr_eq(&m.src, &clock.system) && *m.src != *clock.system {
        return Err(Error::DomainMismatch("morphism does not start at the clock".into()));
    }
    if m.dst.tag != clock.tag() {
        return Err(Error::TagMismatch { expected: clock.tag(), found: m.dst.tag });
    }
    let (fwd, flat) = (m.chart.fwd_table(), m.chart.flat_table());
    let reps = clock.class_representatives();
    for s in 0..clock.num_states() {
        let r = reps[clock.class(s)];
        if m.state_map[s] != m.state_map[r] || fwd[s] != fwd[r] || flat[s] != flat[r] {
            let block = (0..clock.num_states()).filter(|&u| clock.class(u) == clock.class(s)).collect();
            return Err(Error::NotAdapted { level: clock.level(s) + 1, block });
        }
    }
    Ok(clock_squares(clock, &m.dst, &m.state_map, fwd, flat))
}

/// Candidates searched by [`enumerate_truncated_clock_morphisms`]: a state
/// and an input per class, plus an output per null class (elsewhere the
/// output square forces it).
pub fn truncated_candidate_count(clock: &ClockSystem, s: &MonadicSystem) -> u128 {
    radix_total(&truncated_radices(clock, s))
}

fn truncated_radices(clock: &ClockSystem, s: &MonadicSystem) -> Vec<usize> {
    let c = clock.num_classes();
    let nulls = clock.class_is_null().iter().filter(|&&z| z).count();
    [vec![s.states.len(); c], vec![s.arena.pos.len(); nulls], vec![s.arena.dir.len(); c]].concat()
}

/// The truncated hom-set from `clock` into `s`, in candidate order.
pub fn enumerate_truncated_clock_morphisms(
    clock: &ClockSystem,
    s: &Arc<MonadicSystem>,
    cfg: &EnumConfig,
) -> Result<Vec<SystemMorphism>> {
    require_tag(s, clock.tag())?;
    let radices = truncated_radices(clock, s);
    let total = radix_total(&radices);
    cfg.admit(total)?;
    let c = clock.num_classes();
    let class_null = clock.class_is_null();
    let null_slot: Vec<Option<usize>> = {
        let mut k = 0;
        class_null
            .iter()
            .map(|&z| {
                z.then(|| {
                    k += 1;
                    k - 1
                })
            })
            .collect()
    };
    let nulls = null_slot.iter().flatten().count();
    let n = clock.num_states();
    Ok(search(total, cfg, |code| {
        let mut digits = vec![0; radices.len()];
        decode(code, &radices, &mut digits);
        let (xd, rest) = digits.split_at(c);
        let (fd, dd) = rest.split_at(nulls);
        let state_map: Vec<usize> = (0..n).map(|u| xd[clock.class(u)]).collect();
        let fwd: Vec<usize> = (0..n)
            .map(|u| match null_slot[clock.class(u)] {
                Some(k) => fd[k],
                None => s.readout(state_map[u]),
            })
            .collect();
        let flat: Vec<usize> = (0..n).map(|u| dd[clock.class(u)]).collect();
        if !clock_squares(clock, s, &state_map, &fwd, &flat) {
            return None;
        }
        let chart = Chart::new(clock.arena().clone(), s.arena.clone(), fwd, flat).expect("sized from the arenas");
        Some(SystemMorphism::new(clock.system.clone(), s.clone(), state_map, chart).expect("sized from the systems"))
    }))
}

/// Reads a truncated morphism as a behavior: `xᵢ` is the state map at level
/// `i`, `aᵢ⁺` the chart's forward part, `aᵢ⁻` its flat part.
pub fn morphism_to_behavior(clock: &ClockSystem, m: &SystemMorphism) -> Behavior {
    let (fwd, flat) = (m.chart.fwd_table(), m.chart.flat_table());
    match &clock.kind {
        ClockKind::Deterministic => Behavior::Det(DetBehavior {
            xs: m.state_map.clone(),
            outs: fwd.to_vec(),
            ins: flat.to_vec(),
        }),
        ClockKind::Stochastic { space, .. } => {
            let n = space.len();
            let t = clock.horizon.get();
            let proc = |table: &[usize], len: usize| {
                AdaptedProcess::unchecked(len, (0..t).map(|i| table[i * n..(i + 1) * n].to_vec()).collect())
            };
            Behavior::Stoch(StochBehavior {
                xs: proc(&m.state_map, m.dst.states.len()),
                outs: proc(fwd, m.dst.arena.pos.len()),
                ins: proc(flat, m.dst.arena.dir.len()),
            })
        }
        ClockKind::NondetLinear { .. } | ClockKind::Graph { .. } => Behavior::Nondet(m.clone()),
    }
}

/// Inverse of [`morphism_to_behavior`] on candidate tables.
pub fn behavior_to_morphism(clock: &ClockSystem, s: &Arc<MonadicSystem>, b: &Behavior) -> Result<SystemMorphism> {
    let (state_map, fwd, flat) = match (b, &clock.kind) {
        (Behavior::Det(d), ClockKind::Deterministic) => (d.xs.clone(), d.outs.clone(), d.ins.clone()),
        (Behavior::Stoch(p), ClockKind::Stochastic { .. }) => {
            let flatten = |q: &AdaptedProcess| q.steps().concat();
            (flatten(&p.xs), flatten(&p.outs), flatten(&p.ins))
        }
        (Behavior::Nondet(m), ClockKind::NondetLinear { .. } | ClockKind::Graph { .. }) => return Ok(m.clone()),
        _ => return Err(Error::InvalidBehavior("behavior kind does not match the clock".into())),
    };
    if state_map.len() != clock.num_states() {
        return Err(Error::InvalidBehavior(format!(
            "behavior covers {} clock states, the clock has {}",
            state_map.len(),
            clock.num_states()
        )));
    }
    let chart = Chart::new(clock.arena().clone(), s.arena.clone(), fwd, flat)?;
    SystemMorphism::new(clock.system.clone(), s.clone(), state_map, chart)
}

type Key = (Vec<usize>, Vec<usize>, Vec<usize>);

fn behavior_key(b: &Behavior) -> Key {
    match b {
        Behavior::Det(d) => (d.xs.clone(), d.outs.clone(), d.ins.clone()),
        Behavior::Stoch(p) => (p.xs.steps().concat(), p.outs.steps().concat(), p.ins.steps().concat()),
        Behavior::Nondet(m) => (m.state_map.clone(), m.chart.fwd_table().to_vec(), m.chart.flat_table().to_vec()),
    }
}

fn render_key(k: &Key) -> String {
    format!("xs={:?} outs={:?} ins={:?}", k.0, k.1, k.2)
}

/// Outcome of comparing a truncated hom-set with a behavior oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentabilityReport {
    pub theory: &'static str,
    pub horizon: usize,
    pub morphisms: usize,
    pub behaviors: usize,
    pub bijection: bool,
    /// First offending candidate, rendered as flat tables.
    pub witness: Option<String>,
}

/// The behaviors of `s` as computed by the theory's own oracle.
pub fn oracle_behaviors(clock: &ClockSystem, s: &Arc<MonadicSystem>, cfg: &EnumConfig) -> Result<Vec<Behavior>> {
    Ok(match &clock.kind {
        ClockKind::Deterministic => enumerate_det_behaviors(s, clock.horizon)?
            .into_iter()
            .map(Behavior::Det)
            .collect(),
        ClockKind::Stochastic { space, filt } => enumerate_stoch_behaviors(s, space, filt, clock.horizon, cfg)?
            .into_iter()
            .map(Behavior::Stoch)
            .collect(),
        // No independent notion exists: the hom-set is the definition.
        ClockKind::NondetLinear { .. } | ClockKind::Graph { .. } => enumerate_truncated_clock_morphisms(clock, s, cfg)?
            .into_iter()
            .map(Behavior::Nondet)
            .collect(),
    })
}

/// Enumerates both sides and checks that translating morphisms to behaviors
/// is a bijection onto the oracle's set.
pub fn check_representability(clock: &ClockSystem, s: &Arc<MonadicSystem>, cfg: &EnumConfig) -> Result<RepresentabilityReport> {
    let morphisms = enumerate_truncated_clock_morphisms(clock, s, cfg)?;
    let oracle = oracle_behaviors(clock, s, cfg)?;
    let mut images: Vec<Key> = morphisms.iter().map(|m| behavior_key(&morphism_to_behavior(clock, m))).collect();
    let mut expected: Vec<Key> = oracle.iter().map(behavior_key).collect();
    images.sort();
    expected.sort();
    let mut witness = images
        .windows(2)
        .find(|w| w[0] == w[1])
        .map(|w| format!("two morphisms translate to {}", render_key(&w[0])));
    if witness.is_none() {
        witness = images
            .iter()
            .find(|k| expected.binary_search(k).is_err())
            .map(|k| format!("morphism image is not a behavior: {}", render_key(k)))
            .or_else(|| {
                expected
                    .iter()
                    .find(|k| images.binary_search(k).is_err())
                    .map(|k| format!("behavior has no morphism: {}", render_key(k)))
            });
    }
    if witness.is_none() {
        for m in &morphisms {
            let back = behavior_to_morphism(clock, s, &morphism_to_behavior(clock, m))?;
            if back.state_map != m.state_map || back.chart != m.chart {
                witness = Some(format!(
                    "translation does not round-trip at {}",
                    render_key(&behavior_key(&Behavior::Nondet(m.clone())))
                ));
                break;
            }
        }
    }
    Ok(RepresentabilityReport {
        theory: clock.kind.name(),
        horizon: clock.horizon.get(),
        morphisms: morphisms.len(),
        behaviors: oracle.len(),
        bijection: witness.is_none(),
        witness,
    })
}

/// Tally of evaluating both membership predicates on every adapted triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateComparison {
    pub candidates: u128,
    pub accepted: usize,
    pub disagreement: Option<String>,
}

/// Runs the morphism-square predicate and the behavior predicate side by
/// side on every adapted candidate for a stochastic clock.
pub fn compare_stoch_predicates(clock: &ClockSystem, s: &Arc<MonadicSystem>, cfg: &EnumConfig) -> Result<PredicateComparison> {
    let ClockKind::Stochastic { space, filt } = &clock.kind else {
        return Err(Error::Shape("predicate comparison needs a stochastic clock".into()));
    };
    require_tag(s, MonadTag::Dist)?;
    let c = clock.num_classes();
    let (nx, np, nd) = (s.states.len(), s.arena.pos.len(), s.arena.dir.len());
    let radices: Vec<usize> = [vec![nx; c], vec![np; c], vec![nd; c]].concat();
    let total = radix_total(&radices);
    cfg.admit(total)?;
    let (n, t) = (space.len(), clock.horizon.get());
    let of_state = clock.classes();
    let verdicts: Vec<(u128, bool, bool)> = search(total, cfg, |code| {
        let mut digits = vec![0; 3 * c];
        decode(code, &radices, &mut digits);
        let b = StochBehavior {
            xs: process_from_classes(of_state, &digits[..c], n, t, nx),
            outs: process_from_classes(of_state, &digits[c..2 * c], n, t, np),
            ins: process_from_classes(of_state, &digits[2 * c..], n, t, nd),
        };
        let by_behavior = check_stoch_behavior(s, space, filt, &b).expect("candidates are adapted");
        let b = Behavior::Stoch(b);
        let m = behavior_to_morphism(clock, s, &b).expect("sized from the clock");
        let by_morphism = check_truncated_morphism(clock, &m).expect("candidates are measurable");
        (by_behavior || by_morphism).then_some((code, by_behavior, by_morphism))
    });
    let disagreement = verdicts.iter().find(|v| v.1 != v.2).map(|&(code, by_b, by_m)| {
        let mut digits = vec![0; 3 * c];
        decode(code, &radices, &mut digits);
        format!("candidate {code} (class tables {digits:?}): behavior says {by_b}, morphism says {by_m}")
    });
    Ok(PredicateComparison {
        candidates: total,
        accepted: verdicts.iter().filter(|v| v.1 && v.2).count(),
        disagreement,
    })
}

fn require_morphism(m: &SystemMorphism) -> Result<()> {
    if !check_system_morphism(m)? {
        return Err(Error::InvalidBehavior("the given morphism does not commute".into()));
    }
    Ok(())
}

pub fn pushforward_det_behavior(m: &SystemMorphism, b: &DetBehavior) -> Result<DetBehavior> {
    require_morphism(m)?;
    if !check_det_behavior(&m.src, b)? {
        return Err(Error::InvalidBehavior("input is not a behavior of the source".into()));
    }
    Ok(DetBehavior {
        xs: b.xs.iter().map(|&x| m.state_map[x]).collect(),
        outs: b.outs.iter().map(|&p| m.chart.fwd(p)).collect(),
        ins: b.outs.iter().zip(&b.ins).map(|(&p, &d)| m.chart.flat(p, d)).collect(),
    })
}

pub fn pushforward_stoch_behavior(
    m: &SystemMorphism,
    space: &FinProbSpace,
    filt: &Filtration,
    b: &StochBehavior,
) -> Result<StochBehavior> {
    require_morphism(m)?;
    if !check_stoch_behavior(&m.src, space, filt, b)? {
        return Err(Error::InvalidBehavior("input is not a behavior of the source".into()));
    }
    let ins = (0..b.len())
        .map(|i| {
            (0..space.len())
                .map(|w| m.chart.flat(b.outs.step(i)[w], b.ins.step(i)[w]))
                .collect()
        })
        .collect();
    Ok(StochBehavior {
        xs: b.xs.map(m.dst.states.len(), |x| m.state_map[x]),
        outs: b.outs.map(m.dst.arena.pos.len(), |p| m.chart.fwd(p)),
        ins: AdaptedProcess::unchecked(m.dst.arena.dir.len(), ins),
    })
}

/// Postcomposition of a clock morphism.
pub fn pushforward_nondet_behavior(clock: &ClockSystem, m: &SystemMorphism, b: &SystemMorphism) -> Result<SystemMorphism> {
    require_morphism(m)?;
    if !check_truncated_morphism(clock, b)? {
        return Err(Error::InvalidBehavior("input is not a clock morphism".into()));
    }
    b.then(m)
}

/// Checks `b` against `s` in the clock's theory.
pub fn check_behavior(clock: &ClockSystem, s: &Arc<MonadicSystem>, b: &Behavior) -> Result<bool> {
    match (b, &clock.kind) {
        (Behavior::Det(d), ClockKind::Deterministic) => check_det_behavior(s, d),
        (Behavior::Stoch(p), ClockKind::Stochastic { space, filt }) => check_stoch_behavior(s, space, filt, p),
        (Behavior::Nondet(m), ClockKind::NondetLinear { .. } | ClockKind::Graph { .. }) => {
            if *m.dst != **s {
                return Err(Error::DomainMismatch("behavior lands in a different system".into()));
            }
            check_truncated_morphism(clock, m)
        }
        _ => Err(Error::InvalidBehavior("behavior kind does not match the clock".into())),
    }
}

/// Pushes a behavior of `m.src` to one of `m.dst`.
pub fn pushforward_behavior(clock: &ClockSystem, m: &SystemMorphism, b: &Behavior) -> Result<Behavior> {
    Ok(match (b, &clock.kind) {
        (Behavior::Det(d), ClockKind::Deterministic) => Behavior::Det(pushforward_det_behavior(m, d)?),
        (Behavior::Stoch(p), ClockKind::Stochastic { space, filt }) => {
            Behavior::Stoch(pushforward_stoch_behavior(m, space, filt, p)?)
        }
        (Behavior::Nondet(n), ClockKind::NondetLinear { .. } | ClockKind::Graph { .. }) => {
            Behavior::Nondet(pushforward_nondet_behavior(clock, m, n)?)
        }
        _ => return Err(Error::InvalidBehavior("behavior kind does not match the clock".into())),
    })
}

/// Every chart from the clock's interface into `dst` that is constant on
/// the clock's measurability classes.
pub fn measurable_charts(clock: &ClockSystem, dst: &Arena, cfg: &EnumConfig) -> Result<Vec<Chart>> {
    let c = clock.num_classes();
    let radices: Vec<usize> = [vec![dst.pos.len(); c], vec![dst.dir.len(); c]].concat();
    let total = radix_total(&radices);
    cfg.admit(total)?;
    let n = clock.num_states();
    Ok(search(total, cfg, |code| {
        let mut digits = vec![0; 2 * c];
        decode(code, &radices, &mut digits);
        let fwd = (0..n).map(|s| digits[clock.class(s)]).collect();
        let flat = (0..n).map(|s| digits[c + clock.class(s)]).collect();
        Some(Chart::new(clock.arena().clone(), dst.clone(), fwd, flat).expect("sized from the arenas"))
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviorRelationEntry {
    pub left: Chart,
    pub right: Chart,
    pub related: bool,
}

/// The compatibility relation induced by a lens `A ⇸ B` between interface
/// behaviors on `A` and on `B`.
pub fn behavior_relation(l: &Lens, clock: &ClockSystem, cfg: &EnumConfig) -> Result<Vec<BehaviorRelationEntry>> {
    let lefts = measurable_charts(clock, &l.src, cfg)?;
    let rights = measurable_charts(clock, &l.dst, cfg)?;
    cfg.admit((lefts.len() as u128).saturating_mul(rights.len() as u128))?;
    let id = Lens::identity(clock.arena());
    let mut out = Vec::with_capacity(lefts.len() * rights.len());
    for a in &lefts {
        for b in &rights {
            out.push(BehaviorRelationEntry {
                left: a.clone(),
                right: b.clone(),
                related: check_lens_chart_square(&id, l, a, b)?,
            });
        }
    }
    Ok(out)
}

/// The interface behavior underlying a system behavior.
pub fn restrict_to_interface(m: &SystemMorphism) -> Chart {
    m.chart.clone()
}
