//! Generators for exhaustive and randomized checking: every small system,
//! and random spaces, filtrations and processes.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::finprob::{AdaptedProcess, FinProbSpace, Filtration, Partition};
use crate::foundation::{ratio, Dist, FinSet, MonadTag, MonadValue, Rational};
use crate::interface::{all_tables, small_arenas, Arena};
use crate::machine::MonadicSystem;

/// The finite menu of update values used by the exhaustive generators.
/// Distributions are restricted to weights in `{0, 1/2, 1}`; subsets include
/// the empty one.
pub fn monad_values(tag: MonadTag, n: usize) -> Vec<MonadValue> {
    match tag {
        MonadTag::Identity => (0..n).map(MonadValue::Point).collect(),
        MonadTag::Dist => {
            let mut out: Vec<MonadValue> = (0..n).map(|i| MonadValue::Dist(Dist::point(i))).collect();
            for i in 0..n {
                for j in i + 1..n {
                    out.push(MonadValue::Dist(Dist::uniform(&[i, j]).unwrap()));
                }
            }
            out
        }
        MonadTag::Power => (0..1u32 << n)
            .map(|mask| MonadValue::Set((0..n).filter(|i| mask >> i & 1 == 1).collect()))
            .collect(),
    }
}

/// All systems on `{1..nx}` over `arena`, with updates from [`monad_values`].
pub fn systems_on(tag: MonadTag, nx: usize, arena: &Arena) -> Vec<MonadicSystem> {
    let values = monad_values(tag, nx);
    let states = FinSet::numbered(nx);
    let mut out = Vec::new();
    for readout in all_tables(nx, arena.pos.len()) {
        for upd in all_tables(nx * arena.dir.len(), values.len()) {
            let update = upd.iter().map(|&k| values[k].clone()).collect();
            out.push(
                MonadicSystem::new(tag, states.clone(), arena.clone(), readout.clone(), update)
                    .expect("generated tables are well formed"),
            );
        }
    }
    out
}

/// Every system with at most `max_x` states over every arena with at most
/// `max_pos` positions and `max_dir` directions.
pub fn all_systems(tag: MonadTag, max_x: usize, max_pos: usize, max_dir: usize) -> Vec<MonadicSystem> {
    let mut out = Vec::new();
    for arena in small_arenas(max_pos, max_dir) {
        for nx in 1..=max_x {
            out.extend(systems_on(tag, nx, &arena));
        }
    }
    out
}

/// A random value of the given monad over `{0..n}`. Distribution weights
/// are multiples of `1/denom`.
pub fn random_value<R: Rng + ?Sized>(rng: &mut R, tag: MonadTag, n: usize, denom: i128) -> MonadValue {
    match tag {
        MonadTag::Identity => MonadValue::Point(rng.gen_range(0..n)),
        MonadTag::Dist => MonadValue::Dist(Dist::new(random_weights(rng, n, denom).into_iter().enumerate()).unwrap()),
        MonadTag::Power => MonadValue::Set((0..n).filter(|_| rng.gen_bool(0.5)).collect()),
    }
}

/// Random weights on `n` points summing to one, each a multiple of `1/denom`.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize, denom: i128) -> Vec<Rational> {
    let mut units = vec![0i128; n];
    for _ in 0..denom {
        units[rng.gen_range(0..n)] += 1;
    }
    units.into_iter().map(|k| ratio(k, denom)).collect()
}

pub fn random_system<R: Rng + ?Sized>(rng: &mut R, tag: MonadTag, nx: usize, arena: &Arena) -> MonadicSystem {
    let readout = (0..nx).map(|_| rng.gen_range(0..arena.pos.len())).collect();
    let update = (0..nx * arena.dir.len()).map(|_| random_value(rng, tag, nx, 4)).collect();
    MonadicSystem::new(tag, FinSet::numbered(nx), arena.clone(), readout, update).unwrap()
}

/// A random space on `n` outcomes named `w1..wn`. With `allow_null`, some
/// outcomes may carry zero mass.
pub fn random_space<R: Rng + ?Sized>(rng: &mut R, n: usize, denom: i128, allow_null: bool) -> FinProbSpace {
    let omega = FinSet::from_names(&(1..=n).map(|i| format!("w{i}")).collect::<Vec<_>>()).unwrap();
    let measure = if allow_null {
        random_weights(rng, n, denom)
    } else {
        let extra = random_weights(rng, n, denom);
        extra.iter().map(|w| (*w * ratio(denom, 1) + 1) / ratio(denom + n as i128, 1)).collect()
    };
    debug_assert!(measure.iter().all(|w| *w >= Rational::zero()));
    FinProbSpace::new(omega, measure).unwrap()
}

/// A random partition of `{0..n}` into at most `max_blocks` blocks.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize, max_blocks: usize) -> Partition {
    let key: Vec<usize> = (0..n).map(|_| rng.gen_range(0..max_blocks.max(1))).collect();
    Partition::by_key(&key)
}

/// A random filtration of length `t`, built by successive random
/// refinement starting from a random coarse partition.
pub fn random_filtration<R: Rng + ?Sized>(rng: &mut R, n: usize, t: usize) -> Filtration {
    let mut levels = Vec::with_capacity(t);
    let mut current = random_partition(rng, n, 2);
    for _ in 0..t {
        levels.push(current.clone());
        current = current.meet(&random_partition(rng, n, 2));
    }
    Filtration::new(levels).unwrap()
}

/// A random process adapted to `filt`, of length `filt.len()`.
pub fn random_process<R: Rng + ?Sized>(rng: &mut R, filt: &Filtration, target_len: usize) -> AdaptedProcess {
    let steps = filt
        .levels()
        .iter()
        .map(|level| {
            let per_block: Vec<usize> = (0..level.num_blocks()).map(|_| rng.gen_range(0..target_len)).collect();
            (0..level.universe_len()).map(|w| per_block[level.block_of(w)]).collect()
        })
        .collect();
    AdaptedProcess::unchecked(target_len, steps)
}

/// A random permutation of `{0..n}`.
pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Every set partition of `{0..n}`, via restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Partition>) {
        if prefix.len() == n {
            out.push(Partition::by_key(prefix));
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            prefix.push(b);
            grow(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::with_capacity(n), n, &mut out);
    out
}

/// Every filtration of length `t` on `{0..n}`.
pub fn all_filtrations(n: usize, t: usize) -> Vec<Filtration> {
    let parts = all_partitions(n);
    let mut chains: Vec<Vec<Partition>> = parts.iter().map(|p| vec![p.clone()]).collect();
    for _ in 1..t {
        chains = chains
            .into_iter()
            .flat_map(|c| {
                let last = c.last().unwrap().clone();
                parts.iter().filter(move |p| p.refines(&last)).map(move |p| {
                    let mut next = c.clone();
                    next.push(p.clone());
                    next
                })
            })
            .collect();
    }
    chains.into_iter().map(|c| Filtration::new(c).unwrap()).collect()
}

/// Every probability measure on `n` points with weights in `(1/denom)ℤ`,
/// zeros included.
pub fn all_measures(n: usize, denom: i128) -> Vec<Vec<Rational>> {
    fn split(left: i128, slots: usize, prefix: &mut Vec<i128>, out: &mut Vec<Vec<i128>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            split(left - k, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    if n > 0 {
        split(denom, n, &mut Vec::new(), &mut raw);
    }
    raw.into_iter()
        .map(|v| v.into_iter().map(|k| ratio(k, denom)).collect())
        .collect()
}
