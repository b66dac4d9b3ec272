//! Clock systems truncated at a finite horizon.
//!
//! Every clock is a closed-ish system over the arena `(states, {*})` whose
//! readout is the identity. The top level absorbs, and the behavior module
//! never checks update constraints there. Besides the system itself, a
//! [`ClockSystem`] records per state:
//!
//! * its level (time index, or path length for the nondeterministic clocks),
//! * its measurability class: morphisms out of the clock must be constant
//!   on classes,
//! * whether it is null (carries zero probability),
//! * whether it absorbs.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::finprob::{conditional_on_block, FinProbSpace, Filtration};
use crate::foundation::{Dist, FinSet, Label, MonadTag, MonadValue, Subset};
use crate::interface::Arena;
use crate::machine::MonadicSystem;

/// Number of observed time steps; at least one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Horizon(usize);

impl Horizon {
    pub fn new(t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::Shape("horizon must be at least 1".into()));
        }
        Ok(Horizon(t))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// A finite directed multigraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertices: FinSet,
    pub edges: FinSet,
    source: Vec<usize>,
    target: Vec<usize>,
}

impl Graph {
    pub fn new(vertices: FinSet, edges: FinSet, source: Vec<usize>, target: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Shape("a graph needs at least one vertex".into()));
        }
        if source.len() != edges.len() || target.len() != edges.len() {
            return Err(Error::Shape("every edge needs a source and a target".into()));
        }
        for &v in source.iter().chain(&target) {
            vertices.check_index(v, "edge endpoint")?;
        }
        Ok(Graph { vertices, edges, source, target })
    }

    /// One vertex `*` with one loop `e`.
    pub fn one_loop() -> Self {
        Graph::new(FinSet::point(), FinSet::from_names(&["e"]).unwrap(), vec![0], vec![0]).unwrap()
    }

    pub fn source(&self, e: usize) -> usize {
        self.source[e]
    }

    pub fn target(&self, e: usize) -> usize {
        self.target[e]
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(move |&e| self.source[e] == v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClockKind {
    Deterministic,
    Stochastic { space: FinProbSpace, filt: Filtration },
    NondetLinear { omega: FinSet },
    Graph { graph: Graph, omega: FinSet },
}

impl ClockKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClockKind::Deterministic => "deterministic",
            ClockKind::Stochastic { .. } => "stochastic",
            ClockKind::NondetLinear { .. } => "linear",
            ClockKind::Graph { .. } => "graph",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClockSystem {
    pub kind: ClockKind,
    pub horizon: Horizon,
    pub system: Arc<MonadicSystem>,
    level: Vec<usize>,
    class: Vec<usize>,
    num_classes: usize,
    null: Vec<bool>,
    absorbing: Vec<bool>,
}

impl ClockSystem {
    pub fn tag(&self) -> MonadTag {
        self.system.tag
    }

    pub fn arena(&self) -> &Arena {
        &self.system.arena
    }

    pub fn num_states(&self) -> usize {
        self.level.len()
    }

    /// Zero-based time index for the linear-time clocks; path length for the
    /// nondeterministic ones.
    pub fn level(&self, s: usize) -> usize {
        self.level[s]
    }

    pub fn class(&self, s: usize) -> usize {
        self.class[s]
    }

    pub fn classes(&self) -> &[usize] {
        &self.class
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn is_null(&self, s: usize) -> bool {
        self.null[s]
    }

    pub fn is_absorbing(&self, s: usize) -> bool {
        self.absorbing[s]
    }

    /// A class is null when every member is.
    pub fn class_is_null(&self) -> Vec<bool> {
        let mut out = vec![true; self.num_classes];
        for s in 0..self.num_states() {
            if !self.null[s] {
                out[self.class[s]] = false;
            }
        }
        out
    }

    /// One member of each class (the least one).
    pub fn class_representatives(&self) -> Vec<usize> {
        let mut rep = vec![usize::MAX; self.num_classes];
        for s in (0..self.num_states()).rev() {
            rep[self.class[s]] = s;
        }
        rep
    }

    /// State index of `(t, ω)` in a stochastic clock, with `t` zero-based.
    pub fn stoch_state(&self, t: usize, w: usize) -> usize {
        match &self.kind {
            ClockKind::Stochastic { space, .. } => t * space.len() + w,
            _ => panic!("stoch_state on a {} clock", self.kind.name()),
        }
    }
}

fn closed_system(tag: MonadTag, states: FinSet, update: Vec<MonadValue>) -> MonadicSystem {
    let arena = Arena::closed(states.clone()).expect("clock has states");
    let readout = (0..states.len()).collect();
    MonadicSystem::new(tag, states, arena, readout, update).expect("clock tables are well formed")
}

/// The counter `1 → 2 → … → T`, absorbing at `T`.
pub fn build_deterministic_clock(h: Horizon) -> ClockSystem {
    let t = h.get();
    let update = (0..t).map(|n| MonadValue::Point((n + 1).min(t - 1))).collect();
    ClockSystem {
        kind: ClockKind::Deterministic,
        horizon: h,
        system: Arc::new(closed_system(MonadTag::Identity, FinSet::numbered(t), update)),
        level: (0..t).collect(),
        class: (0..t).collect(),
        num_classes: t,
        null: vec![false; t],
        absorbing: (0..t).map(|n| n + 1 == t).collect(),
    }
}

/// States `i@ω` for levels `1..T`; below the top, `(i, ω)` resamples `ω`
/// from its conditional law given level `i` of the filtration.
pub fn build_stochastic_clock(space: &FinProbSpace, filt: &Filtration, h: Horizon) -> Result<ClockSystem> {
    let t = h.get();
    let n = space.len();
    if filt.len() < t {
        return Err(Error::Shape(format!(
            "stochastic clock at horizon {t} needs {t} filtration levels, got {}",
            filt.len()
        )));
    }
    if filt.level(0).universe_len() != n {
        return Err(Error::DomainMismatch("filtration lives on a different sample space".into()));
    }
    let mut labels = Vec::with_capacity(t * n);
    let mut update = Vec::with_capacity(t * n);
    let mut class = Vec::with_capacity(t * n);
    let mut offset = 0;
    let identity: Vec<usize> = (0..n).collect();
    for i in 0..t {
        let level = filt.level(i);
        let per_block: Vec<Dist> = level
            .blocks()
            .iter()
            .map(|b| conditional_on_block(space, b, &identity))
            .collect();
        for w in 0..n {
            labels.push(Label::new(format!("{}@{}", i + 1, space.omega.label(w)))?);
            let value = if i + 1 < t {
                per_block[level.block_of(w)].pushforward(|v| (i + 1) * n + v)
            } else {
                Dist::point(i * n + w)
            };
            update.push(MonadValue::Dist(value));
            class.push(offset + level.block_of(w));
        }
        offset += level.num_blocks();
    }
    let states = FinSet::new(labels)?;
    Ok(ClockSystem {
        kind: ClockKind::Stochastic { space: space.clone(), filt: filt.truncate(t) },
        horizon: h,
        system: Arc::new(closed_system(MonadTag::Dist, states, update)),
        level: (0..t * n).map(|s| s / n).collect(),
        class,
        num_classes: offset,
        null: (0..t * n).map(|s| space.prob(s % n).is_zero()).collect(),
        absorbing: (0..t * n).map(|s| s / n + 1 == t).collect(),
    })
}

/// Seed lists of length at most `T`, ordered by length then lexicographically.
fn seed_lists(k: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..t {
        let mut next = Vec::new();
        for w in &frontier {
            for a in 0..k {
                let mut v: Vec<usize> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn seed_label(omega: &FinSet, seeds: &[usize]) -> String {
    let inner: Vec<&str> = seeds.iter().map(|&a| omega.label(a).as_str()).collect();
    format!("[{}]", inner.join(","))
}

/// States are seed lists `[ω₁, …, ω_k]` with `k ≤ T`; each update appends
/// any seed.
pub fn build_nondet_linear_clock(omega: &FinSet, h: Horizon) -> Result<ClockSystem> {
    if omega.is_empty() {
        return Err(Error::Shape("seed set must be non-empty".into()));
    }
    let t = h.get();
    let lists = seed_lists(omega.len(), t);
    let labels = lists
        .iter()
        .map(|w| Label::new(seed_label(omega, w)))
        .collect::<Result<Vec<_>>>()?;
    let states = FinSet::new(labels)?;
    let index = |w: &[usize]| states.index_of(&seed_label(omega, w)).expect("extension is a state");
    let update = lists
        .iter()
        .enumerate()
        .map(|(s, w)| {
            let set: Subset = if w.len() < t {
                (0..omega.len())
                    .map(|a| {
                        let mut v = w.clone();
                        v.push(a);
                        index(&v)
                    })
                    .collect()
            } else {
                [s].into_iter().collect()
            };
            MonadValue::Set(set)
        })
        .collect();
    let n = lists.len();
    Ok(ClockSystem {
        kind: ClockKind::NondetLinear { omega: omega.clone() },
        horizon: h,
        system: Arc::new(closed_system(MonadTag::Power, states.clone(), update)),
        level: lists.iter().map(Vec::len).collect(),
        class: (0..n).collect(),
        num_classes: n,
        null: vec![false; n],
        absorbing: lists.iter().map(|w| w.len() == t).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct DecoratedPath {
    start: usize,
    steps: Vec<(usize, usize)>,
}

impl DecoratedPath {
    fn end(&self, g: &Graph) -> usize {
        self.steps.last().map_or(self.start, |&(e, _)| g.target(e))
    }

    fn label(&self, g: &Graph, omega: &FinSet) -> String {
        let inner: Vec<String> = self
            .steps
            .iter()
            .map(|&(e, a)| format!("{}/{}", g.edges.label(e), omega.label(a)))
            .collect();
        format!("{}[{}]", g.vertices.label(self.start), inner.join(","))
    }
}

/// States are `Ω`-decorated paths `u[e/ω, …]` of length at most `T`,
/// including the empty path at each vertex. Paths stuck at a vertex with no
/// outgoing edge update to the empty set.
pub fn build_graph_clock(g: &Graph, omega: &FinSet, h: Horizon) -> Result<ClockSystem> {
    if omega.is_empty() {
        return Err(Error::Shape("seed set must be non-empty".into()));
    }
    let t = h.get();
    let mut layers: Vec<Vec<DecoratedPath>> = vec![(0..g.vertices.len())
        .map(|v| DecoratedPath { start: v, steps: Vec::new() })
        .collect()];
    for k in 0..t {
        let mut next = Vec::new();
        for p in &layers[k] {
            for e in g.out_edges(p.end(g)) {
                for a in 0..omega.len() {
                    let mut q = p.clone();
                    q.steps.push((e, a));
                    next.push(q);
                }
            }
        }
        layers.push(next);
    }
    let paths: Vec<DecoratedPath> = layers.into_iter().flatten().collect();
    let labels = paths
        .iter()
        .map(|p| Label::new(p.label(g, omega)))
        .collect::<Result<Vec<_>>>()?;
    let states = FinSet::new(labels)?;
    let update = paths
        .iter()
        .enumerate()
        .map(|(s, p)| {
            let set: Subset = if p.steps.len() < t {
                g.out_edges(p.end(g))
                    .flat_map(|e| (0..omega.len()).map(move |a| (e, a)))
                    .map(|step| {
                        let mut q = p.clone();
                        q.steps.push(step);
                        states.index_of(&q.label(g, omega)).expect("extension is a state")
                    })
                    .collect()
            } else {
                [s].into_iter().collect()
            };
            MonadValue::Set(set)
        })
        .collect();
    let n = paths.len();
    Ok(ClockSystem {
        kind: ClockKind::Graph { graph: g.clone(), omega: omega.clone() },
        horizon: h,
        system: Arc::new(closed_system(MonadTag::Power, states, update)),
        level: paths.iter().map(|p| p.steps.len()).collect(),
        class: (0..n).collect(),
        num_classes: n,
        null: vec![false; n],
        absorbing: paths.iter().map(|p| p.steps.len() == t).collect(),
    })
}

/// Table equality up to the sizes of the carriers, with identity-tag
/// updates read as unit values of the other system's monad.
pub fn structurally_equal(a: &MonadicSystem, b: &MonadicSystem) -> bool {
    fn lift(v: &MonadValue, tag: MonadTag) -> MonadValue {
        match v {
            MonadValue::Point(x) => tag.unit(*x),
            other => other.clone(),
        }
    }
    let tag = match (a.tag, b.tag) {
        (x, y) if x == y => x,
        (MonadTag::Identity, y) => y,
        (x, MonadTag::Identity) => x,
        _ => return false,
    };
    a.states.len() == b.states.len()
        && a.arena.pos.len() == b.arena.pos.len()
        && a.arena.dir.len() == b.arena.dir.len()
        && a.readout_table() == b.readout_table()
        && a.update_table()
            .iter()
            .zip(b.update_table())
            .all(|(u, v)| lift(u, tag) == lift(v, tag))
}

/// For a graph clock over a one-loop graph: the bijection onto the states of
/// the linear clock that forgets the vertex and edge names.
pub fn one_loop_relabeling(graph_clock: &ClockSystem, linear: &ClockSystem) -> Result<Vec<usize>> {
    let (ClockKind::Graph { graph, omega }, ClockKind::NondetLinear { omega: omega2 }) =
        (&graph_clock.kind, &linear.kind)
    else {
        return Err(Error::Shape("expected a graph clock and a linear clock".into()));
    };
    if graph.vertices.len() != 1 || graph.edges.len() != 1 || omega != omega2 {
        return Err(Error::Shape("graph is not a single loop over the same seeds".into()));
    }
    let prefix = format!("{}[", graph.vertices.label(0));
    let edge = format!("{}/", graph.edges.label(0));
    graph_clock
        .system
        .states
        .iter()
        .map(|l| {
            let body = l.as_str().strip_prefix(&prefix).unwrap_or(l.as_str());
            let seeds: Vec<&str> = body
                .trim_end_matches(']')
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.strip_prefix(edge.as_str()).unwrap_or(s))
                .collect();
            linear.system.states.require(&format!("[{}]", seeds.join(",")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finprob::Partition;
    use crate::foundation::ratio;

    fn h(t: usize) -> Horizon {
        Horizon::new(t).unwrap()
    }

    #[test]
    fn horizon_is_positive() {
        assert!(Horizon::new(0).is_err());
    }

    #[test]
    fn deterministic_counter_tables() {
        let c = build_deterministic_clock(h(3));
        let ups: Vec<_> = c.system.update_table().to_vec();
        assert_eq!(ups, vec![MonadValue::Point(1), MonadValue::Point(2), MonadValue::Point(2)]);
        let one = build_deterministic_clock(h(1));
        assert_eq!(one.system.update_table(), &[MonadValue::Point(0)]);
        for t in 1..=5 {
            let c = build_deterministic_clock(h(t));
            assert_eq!(c.system.readout_table(), (0..t).collect::<Vec<_>>().as_slice());
        }
    }

    #[test]
    fn stochastic_clock_resamples_within_block() {
        let space = FinProbSpace::uniform(FinSet::numbered(4)).unwrap();
        let halves = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let filt = Filtration::new(vec![halves, Partition::finest(4)]).unwrap();
        let c = build_stochastic_clock(&space, &filt, h(2)).unwrap();
        let MonadValue::Dist(d) = c.system.update(c.stoch_state(0, 0), 0) else { panic!() };
        assert_eq!(d, &Dist::new([(4, ratio(1, 2)), (5, ratio(1, 2))]).unwrap());
        assert_eq!(c.system.states.label(4).as_str(), "2@1");
        assert_eq!(c.num_classes(), 2 + 4);
    }

    #[test]
    fn stochastic_clock_needs_enough_levels() {
        let space = FinProbSpace::uniform(FinSet::numbered(2)).unwrap();
        let filt = Filtration::constant(Partition::finest(2), 1);
        assert!(matches!(build_stochastic_clock(&space, &filt, h(2)), Err(Error::Shape(_))));
    }

    #[test]
    fn finest_filtration_gives_deterministic_shift() {
        let space = FinProbSpace::uniform(FinSet::numbered(3)).unwrap();
        let filt = Filtration::constant(Partition::finest(3), 3);
        let c = build_stochastic_clock(&space, &filt, h(3)).unwrap();
        for i in 0..2 {
            for w in 0..3 {
                let s = c.stoch_state(i, w);
                assert_eq!(c.system.update(s, 0), &MonadValue::Dist(Dist::point(c.stoch_state(i + 1, w))));
            }
        }
    }

    #[test]
    fn one_point_stochastic_clock_is_the_counter() {
        let space = FinProbSpace::uniform(FinSet::point()).unwrap();
        for t in 1..=5 {
            let filt = Filtration::constant(Partition::finest(1), t);
            let s = build_stochastic_clock(&space, &filt, h(t)).unwrap();
            let d = build_deterministic_clock(h(t));
            assert!(structurally_equal(&s.system, &d.system));
        }
    }

    #[test]
    fn linear_clock_counts_and_extensions() {
        let omega = FinSet::from_names(&["a", "b"]).unwrap();
        let c = build_nondet_linear_clock(&omega, h(3)).unwrap();
        assert_eq!(c.num_states(), 1 + 2 + 4 + 8);
        let a = c.system.states.require("[a]").unwrap();
        let want: Subset = ["[a,a]", "[a,b]"].iter().map(|l| c.system.states.require(l).unwrap()).collect();
        assert_eq!(c.system.update(a, 0), &MonadValue::Set(want));
        for s in 0..c.num_states() {
            let MonadValue::Set(next) = c.system.update(s, 0) else { panic!() };
            if c.is_absorbing(s) {
                assert_eq!(next.len(), 1);
            } else {
                assert_eq!(next.len(), 2);
                assert!(next.iter().all(|&n| c.level(n) == c.level(s) + 1));
            }
        }
    }

    #[test]
    fn graph_dead_ends_and_edgeless() {
        let omega = FinSet::from_names(&["a"]).unwrap();
        let g = Graph::new(
            FinSet::from_names(&["u", "v"]).unwrap(),
            FinSet::from_names(&["e"]).unwrap(),
            vec![0],
            vec![1],
        )
        .unwrap();
        let c = build_graph_clock(&g, &omega, h(2)).unwrap();
        let stuck = c.system.states.require("u[e/a]").unwrap();
        assert_eq!(c.system.update(stuck, 0), &MonadValue::Set(Subset::new()));
        let v = c.system.states.require("v[]").unwrap();
        assert_eq!(c.system.update(v, 0), &MonadValue::Set(Subset::new()));

        let lonely = Graph::new(FinSet::point(), FinSet::new(vec![]).unwrap(), vec![], vec![]).unwrap();
        let c = build_graph_clock(&lonely, &omega, h(3)).unwrap();
        assert_eq!(c.num_states(), 1);
        assert_eq!(c.system.update(0, 0), &MonadValue::Set(Subset::new()));
    }

    #[test]
    fn one_loop_graph_recovers_linear_clock() {
        for k in 1..=3 {
            let omega = FinSet::numbered(k);
            for t in 1..=3 {
                let g = build_graph_clock(&Graph::one_loop(), &omega, h(t)).unwrap();
                let l = build_nondet_linear_clock(&omega, h(t)).unwrap();
                let perm = one_loop_relabeling(&g, &l).unwrap();
                assert!(g.system.equal_under(&l.system, &perm, &perm, &[0]));
            }
        }
    }
}
