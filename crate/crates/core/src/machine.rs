//! Monadic Moore machines over an arena, their morphisms, and their
//! composition with lenses.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::foundation::{FinMap, FinSet, MonadTag, MonadValue};
use crate::interface::{all_tables, Arena, Chart, Lens};

/// Default cap on enumeration candidates.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Knobs shared by every brute-force enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumConfig {
    pub budget: u64,
    pub parallel: bool,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            budget: DEFAULT_BUDGET,
            parallel: false,
        }
    }
}

impl EnumConfig {
    pub fn with_budget(budget: u64) -> Self {
        EnumConfig { budget, ..Default::default() }
    }

    pub(crate) fn admit(&self, candidates: u128) -> Result<()> {
        if candidates > self.budget as u128 {
            Err(Error::BudgetExceeded { candidates, budget: self.budget })
        } else {
            Ok(())
        }
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub(crate) fn count_pow(base: usize, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

/// A Moore machine whose update lands in `M(X)`: readout `X → A⁺`, update
/// `X × A⁻ → M(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonadicSystem {
    pub tag: MonadTag,
    pub states: FinSet,
    pub arena: Arena,
    readout: Vec<usize>,
    update: Vec<MonadValue>,
}

impl MonadicSystem {
    /// `update` is indexed `x * arena.dir.len() + d`.
    pub fn new(
        tag: MonadTag,
        states: FinSet,
        arena: Arena,
        readout: Vec<usize>,
        update: Vec<MonadValue>,
    ) -> Result<Self> {
        if readout.len() != states.len() {
            return Err(Error::Shape(format!(
                "readout has {} entries for {} states",
                readout.len(),
                states.len()
            )));
        }
        for &p in &readout {
            arena.pos.check_index(p, "readout")?;
        }
        if update.len() != states.len() * arena.dir.len() {
            return Err(Error::Shape(format!(
                "update has {} entries, expected {}",
                update.len(),
                states.len() * arena.dir.len()
            )));
        }
        for v in &update {
            if v.tag() != tag {
                return Err(Error::TagMismatch { expected: tag, found: v.tag() });
            }
            v.check_within(&states, "update")?;
        }
        Ok(MonadicSystem { tag, states, arena, readout, update })
    }

    pub fn readout(&self, x: usize) -> usize {
        self.readout[x]
    }

    pub fn update(&self, x: usize, d: usize) -> &MonadValue {
        &self.update[x * self.arena.dir.len() + d]
    }

    pub fn readout_table(&self) -> &[usize] {
        &self.readout
    }

    pub fn update_table(&self) -> &[MonadValue] {
        &self.update
    }

    /// Equality of tables, ignoring labels.
    pub fn same_tables(&self, other: &MonadicSystem) -> bool {
        self.tag == other.tag
            && self.states.len() == other.states.len()
            && self.arena.pos.len() == other.arena.pos.len()
            && self.arena.dir.len() == other.arena.dir.len()
            && self.readout == other.readout
            && self.update == other.update
    }

    /// Equality of tables after transporting `self` along the given
    /// bijections of states, positions and directions.
    pub fn equal_under(
        &self,
        other: &MonadicSystem,
        states: &[usize],
        pos: &[usize],
        dir: &[usize],
    ) -> bool {
        if self.tag != other.tag
            || states.len() != self.states.len()
            || pos.len() != self.arena.pos.len()
            || dir.len() != self.arena.dir.len()
            || other.states.len() != self.states.len()
            || other.arena.pos.len() != self.arena.pos.len()
            || other.arena.dir.len() != self.arena.dir.len()
        {
            return false;
        }
        (0..self.states.len()).all(|x| {
            pos[self.readout(x)] == other.readout(states[x])
                && (0..self.arena.dir.len()).all(|d| {
                    self.update(x, d).map_with(|y| states[y]) == *other.update(states[x], dir[d])
                })
        })
    }
}

/// A morphism of systems: a state map together with a chart between the
/// interfaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemMorphism {
    pub src: Arc<MonadicSystem>,
    pub dst: Arc<MonadicSystem>,
    pub state_map: Vec<usize>,
    pub chart: Chart,
}

impl SystemMorphism {
    pub fn new(
        src: Arc<MonadicSystem>,
        dst: Arc<MonadicSystem>,
        state_map: Vec<usize>,
        chart: Chart,
    ) -> Result<Self> {
        if src.tag != dst.tag {
            return Err(Error::TagMismatch { expected: src.tag, found: dst.tag });
        }
        if state_map.len() != src.states.len() {
            return Err(Error::Shape("state map is not total".into()));
        }
        for &y in &state_map {
            dst.states.check_index(y, "state map")?;
        }
        if chart.src != src.arena || chart.dst != dst.arena {
            return Err(Error::Shape("chart endpoints differ from the system interfaces".into()));
        }
        Ok(SystemMorphism { src, dst, state_map, chart })
    }

    pub fn identity(sys: &Arc<MonadicSystem>) -> Self {
        SystemMorphism {
            src: sys.clone(),
            dst: sys.clone(),
            state_map: (0..sys.states.len()).collect(),
            chart: Chart::identity(&sys.arena),
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &SystemMorphism) -> Result<SystemMorphism> {
        if self.dst != next.src {
            return Err(Error::Composition("morphism endpoints do not match".into()));
        }
        Ok(SystemMorphism {
            src: self.src.clone(),
            dst: next.dst.clone(),
            state_map: self.state_map.iter().map(|&y| next.state_map[y]).collect(),
            chart: next.chart.after(&self.chart)?,
        })
    }

    pub fn state_function(&self) -> FinMap {
        FinMap::new(self.src.states.clone(), self.dst.states.clone(), self.state_map.clone())
            .expect("validated on construction")
    }
}

/// Whether both morphism squares commute exactly.
pub fn check_system_morphism(m: &SystemMorphism) -> Result<bool> {
    if m.src.tag != m.dst.tag {
        return Err(Error::Shape("morphism between systems of different monads".into()));
    }
    if m.chart.src != m.src.arena || m.chart.dst != m.dst.arena {
        return Err(Error::Shape("chart endpoints differ from the system interfaces".into()));
    }
    Ok(squares_commute(&m.src, &m.dst, &m.state_map, &m.chart))
}

fn squares_commute(src: &MonadicSystem, dst: &MonadicSystem, state_map: &[usize], chart: &Chart) -> bool {
    (0..src.states.len()).all(|s| {
        let p = src.readout(s);
        chart.fwd(p) == dst.readout(state_map[s])
            && (0..src.arena.dir.len()).all(|d| {
                src.update(s, d).map_with(|y| state_map[y]) == *dst.update(state_map[s], chart.flat(p, d))
            })
    })
}

/// Number of raw candidates `(state_map, fwd, flat)` between two systems.
pub fn morphism_candidate_count(src: &MonadicSystem, dst: &MonadicSystem) -> u128 {
    let a = count_pow(dst.states.len(), src.states.len());
    let b = count_pow(dst.arena.pos.len(), src.arena.pos.len());
    let c = count_pow(dst.arena.dir.len(), src.arena.pos.len() * src.arena.dir.len());
    a.saturating_mul(b).saturating_mul(c)
}

/// The full hom-set, in lexicographic order of `(state_map, fwd, flat)`.
///
/// Equivalent to filtering every total candidate through
/// [`check_system_morphism`]; once the state map and `fwd` are fixed, each
/// `flat` entry is constrained independently, so the survivors are produced
/// as a product of per-entry allowed values.
pub fn enumerate_system_morphisms(
    src: &Arc<MonadicSystem>,
    dst: &Arc<MonadicSystem>,
    cfg: &EnumConfig,
) -> Result<Vec<SystemMorphism>> {
    if src.tag != dst.tag {
        return Err(Error::Shape("morphism between systems of different monads".into()));
    }
    cfg.admit(morphism_candidate_count(src, dst))?;
    let state_maps: Vec<Vec<usize>> = all_tables(src.states.len(), dst.states.len()).collect();
    let per_state_map = |state_map: &Vec<usize>| -> Vec<SystemMorphism> {
        let mut out = Vec::new();
        for fwd in all_tables(src.arena.pos.len(), dst.arena.pos.len()) {
            if !(0..src.states.len()).all(|s| fwd[src.readout(s)] == dst.readout(state_map[s])) {
                continue;
            }
            let allowed = allowed_flats(src, dst, state_map);
            for flat in product(&allowed) {
                let chart = Chart::new(src.arena.clone(), dst.arena.clone(), fwd.clone(), flat)
                    .expect("tables sized from the arenas");
                out.push(SystemMorphism {
                    src: src.clone(),
                    dst: dst.clone(),
                    state_map: state_map.clone(),
                    chart,
                });
            }
        }
        out
    };
    let nested: Vec<Vec<SystemMorphism>> = if cfg.parallel {
        state_maps.par_iter().map(per_state_map).collect()
    } else {
        state_maps.iter().map(per_state_map).collect()
    };
    Ok(nested.into_iter().flatten().collect())
}

fn allowed_flats(src: &MonadicSystem, dst: &MonadicSystem, state_map: &[usize]) -> Vec<Vec<usize>> {
    let (np, nd) = (src.arena.pos.len(), src.arena.dir.len());
    let mut allowed = Vec::with_capacity(np * nd);
    for p in 0..np {
        for d in 0..nd {
            let ok: Vec<usize> = (0..dst.arena.dir.len())
                .filter(|&e| {
                    (0..src.states.len()).filter(|&s| src.readout(s) == p).all(|s| {
                        src.update(s, d).map_with(|y| state_map[y]) == *dst.update(state_map[s], e)
                    })
                })
                .collect();
            allowed.push(ok);
        }
    }
    allowed
}

/// Cartesian product of per-slot choices, lexicographic.
pub(crate) fn product(choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(choices.len())];
    for slot in choices {
        let mut next = Vec::with_capacity(out.len() * slot.len());
        for prefix in &out {
            for &c in slot {
                let mut v = prefix.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Digits of `code` in the mixed radix `radices`, most significant first.
pub(crate) fn decode(mut code: u128, radices: &[usize], out: &mut [usize]) {
    for (slot, &r) in out.iter_mut().zip(radices).rev() {
        *slot = (code % r as u128) as usize;
        code /= r as u128;
    }
}

/// Product of `radices`, saturating.
pub(crate) fn radix_total(radices: &[usize]) -> u128 {
    radices.iter().fold(1u128, |acc, &r| acc.saturating_mul(r as u128))
}

/// Runs `f` on every code below `total` (already admitted by the budget) and
/// keeps the hits in code order, in parallel if asked.
pub(crate) fn search<T: Send>(total: u128, cfg: &EnumConfig, f: impl Fn(u128) -> Option<T> + Sync + Send) -> Vec<T> {
    let total = total as usize;
    if cfg.parallel {
        (0..total).into_par_iter().filter_map(|c| f(c as u128)).collect()
    } else {
        (0..total).filter_map(|c| f(c as u128)).collect()
    }
}

/// Wires a system on `A` through a lens `A ⇸ B`.
pub fn compose_system_with_lens(s: &MonadicSystem, l: &Lens) -> Result<MonadicSystem> {
    if s.arena != l.src {
        return Err(Error::Shape("system interface differs from the lens source".into()));
    }
    let readout = s.readout.iter().map(|&p| l.fwd(p)).collect();
    let mut update = Vec::with_capacity(s.states.len() * l.dst.dir.len());
    for x in 0..s.states.len() {
        for d in 0..l.dst.dir.len() {
            update.push(s.update(x, l.sharp(s.readout(x), d)).clone());
        }
    }
    Ok(MonadicSystem {
        tag: s.tag,
        states: s.states.clone(),
        arena: l.dst.clone(),
        readout,
        update,
    })
}
