//! Finite probability spaces, partitions standing in for sub-σ-algebras,
//! filtrations, and exact conditional expectations and probabilities.
//!
//! Conditionals are only defined up to almost-sure equality, so one version
//! is fixed everywhere:
//!
//! * on a block of positive mass, the usual restrict-and-renormalize;
//! * on a null block, conditional expectation is `0` and conditional
//!   probability is the point mass at `x(ω₀)`, where `ω₀` is the least
//!   element of the block.
//!
//! "Almost everywhere" always means "at every `ω` whose block has positive
//! mass".

use std::collections::HashMap;
use std::hash::Hash;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::foundation::{Dist, FinSet, Kernel, MonadTag, MonadValue, Rational};

/// `(Ω, P)` with the full powerset as σ-algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinProbSpace {
    pub omega: FinSet,
    measure: Vec<Rational>,
}

impl FinProbSpace {
    pub fn new(omega: FinSet, measure: Vec<Rational>) -> Result<Self> {
        if measure.len() != omega.len() {
            return Err(Error::Shape(format!(
                "measure has {} weights for {} outcomes",
                measure.len(),
                omega.len()
            )));
        }
        for (i, w) in measure.iter().enumerate() {
            if *w < Rational::zero() {
                return Err(Error::NegativeWeight { element: i, weight: *w });
            }
        }
        let sum: Rational = measure.iter().sum();
        if sum != Rational::one() {
            return Err(Error::NotNormalized { sum });
        }
        Ok(FinProbSpace { omega, measure })
    }

    pub fn uniform(omega: FinSet) -> Result<Self> {
        let n = omega.len() as i128;
        if n == 0 {
            return Err(Error::NotNormalized { sum: Rational::zero() });
        }
        let measure = vec![Rational::new(1, n); omega.len()];
        FinProbSpace::new(omega, measure)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn prob(&self, w: usize) -> Rational {
        self.measure[w]
    }

    pub fn measure(&self) -> &[Rational] {
        &self.measure
    }

    pub fn mass(&self, elems: &[usize]) -> Rational {
        elems.iter().map(|&w| self.measure[w]).sum()
    }

    /// Law of `x`, as a distribution over the target indices.
    pub fn law(&self, x: &[usize]) -> Dist {
        Dist::new(x.iter().zip(&self.measure).map(|(&v, &w)| (v, w))).expect("measure sums to one")
    }

    pub fn as_dist(&self) -> Dist {
        Dist::new(self.measure.iter().copied().enumerate()).expect("measure sums to one")
    }
}

/// A partition of `{0..n}` into non-empty blocks, standing in for a
/// sub-σ-algebra. Blocks are sorted and ordered by their least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Shape("partition has an empty block".into()));
            }
            for &w in block {
                if w >= n {
                    return Err(Error::DomainMismatch(format!("partition mentions element {w} outside 0..{n}")));
                }
                if owner[w] != usize::MAX {
                    return Err(Error::Shape(format!("element {w} appears in two blocks")));
                }
                owner[w] = b;
            }
        }
        if let Some(w) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Shape(format!("element {w} is in no block")));
        }
        Ok(Partition::by_key(&owner))
    }

    /// The partition into fibers of `key`.
    pub fn by_key<K: Eq + Hash + Clone>(key: &[K]) -> Self {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(key.len());
        for (w, k) in key.iter().enumerate() {
            let next = blocks.len();
            let b = *ids.entry(k.clone()).or_insert(next);
            if b == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[b].push(w);
            block_of.push(b);
        }
        // Scanning in order numbers blocks by least element already.
        Partition { blocks, block_of }
    }

    pub fn coarsest(n: usize) -> Self {
        Partition::by_key(&vec![(); n])
    }

    pub fn finest(n: usize) -> Self {
        Partition::by_key(&(0..n).collect::<Vec<_>>())
    }

    pub fn universe_len(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, w: usize) -> usize {
        self.block_of[w]
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.universe_len() == coarser.universe_len()
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&w| coarser.block_of(w) == coarser.block_of(b[0])))
    }

    /// Coarsest common refinement.
    pub fn meet(&self, other: &Partition) -> Partition {
        let key: Vec<(usize, usize)> = (0..self.universe_len())
            .map(|w| (self.block_of(w), other.block_of(w)))
            .collect();
        Partition::by_key(&key)
    }

    /// First block on which `values` is not constant.
    pub fn non_measurable_block<T: PartialEq>(&self, values: &[T]) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.iter().any(|&w| values[w] != values[b[0]]))
    }

    pub fn is_measurable<T: PartialEq>(&self, values: &[T]) -> bool {
        self.non_measurable_block(values).is_none()
    }
}

/// An ascending chain of partitions `𝓕₁ ⊆ … ⊆ 𝓕_T`. Level `i` of the
/// chain is stored at index `i - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Filtration {
    levels: Vec<Partition>,
}

impl Filtration {
    pub fn new(levels: Vec<Partition>) -> Result<Self> {
        if let Some(first) = levels.first() {
            let n = first.universe_len();
            for (i, pair) in levels.windows(2).enumerate() {
                if pair[1].universe_len() != n {
                    return Err(Error::Shape("filtration levels live on different sets".into()));
                }
                if !pair[1].refines(&pair[0]) {
                    return Err(Error::Shape(format!(
                        "filtration level {} does not refine level {}",
                        i + 2,
                        i + 1
                    )));
                }
            }
        }
        Ok(Filtration { levels })
    }

    /// `Ωⁿ`-style coordinate filtration data: every level is `level`.
    pub fn constant(level: Partition, t: usize) -> Self {
        Filtration { levels: vec![level; t] }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Zero-based access: `level(0)` is `𝓕₁`.
    pub fn level(&self, i: usize) -> &Partition {
        &self.levels[i]
    }

    pub fn levels(&self) -> &[Partition] {
        &self.levels
    }

    pub fn truncate(&self, t: usize) -> Filtration {
        Filtration {
            levels: self.levels[..t.min(self.levels.len())].to_vec(),
        }
    }
}

/// A process `x₁, …, x_T : Ω → X`, one value table per step.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdaptedProcess {
    steps: Vec<Vec<usize>>,
    target_len: usize,
}

impl AdaptedProcess {
    /// Builds the process and checks it against `filt` (step `i` must be
    /// constant on the blocks of level `i`).
    pub fn new(target: &FinSet, steps: Vec<Vec<usize>>, filt: &Filtration) -> Result<Self> {
        let p = AdaptedProcess::unchecked(target.len(), steps);
        p.check_adapted(filt)?;
        Ok(p)
    }

    pub(crate) fn unchecked(target_len: usize, steps: Vec<Vec<usize>>) -> Self {
        AdaptedProcess { steps, target_len }
    }

    pub fn check_adapted(&self, filt: &Filtration) -> Result<()> {
        if self.steps.len() > filt.len() {
            return Err(Error::Shape(format!(
                "process has {} steps but the filtration only {} levels",
                self.steps.len(),
                filt.len()
            )));
        }
        for (i, step) in self.steps.iter().enumerate() {
            let level = filt.level(i);
            if step.len() != level.universe_len() {
                return Err(Error::Shape(format!("step {} is not total on Ω", i + 1)));
            }
            if let Some(&v) = step.iter().find(|&&v| v >= self.target_len) {
                return Err(Error::DomainMismatch(format!("step {} takes value {v} outside the target", i + 1)));
            }
            if let Some(b) = level.non_measurable_block(step) {
                return Err(Error::NotAdapted {
                    level: i + 1,
                    block: level.block(b).to_vec(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    /// Zero-based: `step(0)` is `x₁`.
    pub fn step(&self, i: usize) -> &[usize] {
        &self.steps[i]
    }

    pub fn steps(&self) -> &[Vec<usize>] {
        &self.steps
    }

    /// Pointwise image along `f: X → Y`.
    pub fn map(&self, target_len: usize, f: impl Fn(usize) -> usize) -> AdaptedProcess {
        AdaptedProcess {
            steps: self.steps.iter().map(|s| s.iter().map(|&v| f(v)).collect()).collect(),
            target_len,
        }
    }

    /// Precomposition with `φ: Γ → Ω`.
    pub fn pullback(&self, phi: &[usize]) -> AdaptedProcess {
        AdaptedProcess {
            steps: self.steps.iter().map(|s| phi.iter().map(|&w| s[w]).collect()).collect(),
            target_len: self.target_len,
        }
    }

    pub fn prefix(&self, t: usize) -> AdaptedProcess {
        AdaptedProcess {
            steps: self.steps[..t].to_vec(),
            target_len: self.target_len,
        }
    }
}

/// Whether the block containing `w` has positive mass.
pub fn positive_block(space: &FinProbSpace, g: &Partition, w: usize) -> bool {
    !space.mass(g.block(g.block_of(w))).is_zero()
}

/// `𝔼(x | 𝓖)` with value `0` on null blocks.
pub fn conditional_expectation(space: &FinProbSpace, g: &Partition, x: &[Rational]) -> Vec<Rational> {
    let per_block: Vec<Rational> = g
        .blocks()
        .iter()
        .map(|b| {
            let mass = space.mass(b);
            if mass.is_zero() {
                Rational::zero()
            } else {
                b.iter().map(|&w| space.prob(w) * x[w]).sum::<Rational>() / mass
            }
        })
        .collect();
    (0..space.len()).map(|w| per_block[g.block_of(w)]).collect()
}

/// `P(x | 𝓖)(ω)` for every `ω`, as distributions over the indices of `x`'s
/// target.
pub fn conditional_probability(space: &FinProbSpace, g: &Partition, x: &[usize]) -> Vec<Dist> {
    let per_block: Vec<Dist> = g
        .blocks()
        .iter()
        .map(|b| conditional_on_block(space, b, x))
        .collect();
    (0..space.len()).map(|w| per_block[g.block_of(w)].clone()).collect()
}

/// The conditional law of `x` given that `ω` lies in `block`.
pub fn conditional_on_block(space: &FinProbSpace, block: &[usize], x: &[usize]) -> Dist {
    let mass = space.mass(block);
    if mass.is_zero() {
        return Dist::point(x[block[0]]);
    }
    Dist::new(block.iter().map(|&w| (x[w], space.prob(w) / mass))).expect("renormalized block")
}

/// Checks `(Δf) P(x | 𝓖) = P(f ∘ x | 𝓖)` at every positive-mass `ω`.
pub fn check_pushforward_lemma(space: &FinProbSpace, g: &Partition, x: &[usize], f: &[usize]) -> bool {
    let lhs = conditional_probability(space, g, x);
    let fx: Vec<usize> = x.iter().map(|&v| f[v]).collect();
    let rhs = conditional_probability(space, g, &fx);
    (0..space.len())
        .filter(|&w| !space.prob(w).is_zero())
        .all(|w| lhs[w].pushforward(|v| f[v]) == rhs[w])
}

/// Whether `proc` is Markov with law `s`: for each `i < T`,
/// `P(x_{i+1} | 𝓕ᵢ) = s(xᵢ)` on positive-mass blocks.
pub fn is_markov_with_law(
    space: &FinProbSpace,
    filt: &Filtration,
    proc: &AdaptedProcess,
    s: &Kernel,
) -> Result<bool> {
    if s.tag != MonadTag::Dist {
        return Err(Error::TagMismatch { expected: MonadTag::Dist, found: s.tag });
    }
    if s.domain.len() != proc.target_len() || s.codomain.len() != proc.target_len() {
        return Err(Error::DomainMismatch("kernel must be an endo-kernel on the process target".into()));
    }
    if proc.len() < 2 {
        return Err(Error::Shape("a Markov law needs a process of length at least 2".into()));
    }
    proc.check_adapted(filt)?;
    for i in 0..proc.len() - 1 {
        let g = filt.level(i);
        let cond = conditional_probability(space, g, proc.step(i + 1));
        for w in 0..space.len() {
            if !positive_block(space, g, w) {
                continue;
            }
            let MonadValue::Dist(law) = s.at(proc.step(i)[w]) else { unreachable!() };
            if cond[w] != *law {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundation::ratio;
    use proptest::prelude::*;

    fn uniform(n: usize) -> FinProbSpace {
        FinProbSpace::uniform(FinSet::numbered(n)).unwrap()
    }

    fn ints(v: &[i128]) -> Vec<Rational> {
        v.iter().map(|&k| Rational::from_integer(k)).collect()
    }

    #[test]
    fn measure_must_sum_to_one() {
        let err = FinProbSpace::new(FinSet::numbered(2), vec![ratio(5, 8), ratio(1, 2)]).unwrap_err();
        assert_eq!(err, Error::NotNormalized { sum: ratio(9, 8) });
    }

    #[test]
    fn partition_validation_and_order() {
        let p = Partition::new(4, vec![vec![3, 2], vec![1, 0]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2, 3]]);
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::finest(4).refines(&p));
        assert!(p.refines(&Partition::coarsest(4)));
        assert!(!p.refines(&Partition::finest(4)));
    }

    #[test]
    fn filtration_must_refine() {
        let halves = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(Filtration::new(vec![Partition::coarsest(4), halves.clone()]).is_ok());
        assert!(Filtration::new(vec![halves, Partition::coarsest(4)]).is_err());
    }

    #[test]
    fn expectation_on_trivial_algebra_is_mean() {
        let s = uniform(4);
        let e = conditional_expectation(&s, &Partition::coarsest(4), &ints(&[1, 3, 5, 7]));
        assert_eq!(e, ints(&[4, 4, 4, 4]));
    }

    #[test]
    fn expectation_on_full_algebra_is_identity() {
        let s = uniform(4);
        let x = ints(&[1, 3, 5, 7]);
        assert_eq!(conditional_expectation(&s, &Partition::finest(4), &x), x);
    }

    #[test]
    fn expectation_block_averages() {
        let s = uniform(4);
        let g = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let e = conditional_expectation(&s, &g, &ints(&[1, 3, 5, 7]));
        assert_eq!(e, ints(&[2, 2, 6, 6]));
    }

    #[test]
    fn expectation_is_zero_on_null_blocks() {
        let s = FinProbSpace::new(FinSet::numbered(3), vec![ratio(1, 2), ratio(1, 2), Rational::zero()]).unwrap();
        let e = conditional_expectation(&s, &Partition::finest(3), &ints(&[1, 2, 3]));
        assert_eq!(e, ints(&[1, 2, 0]));
    }

    #[test]
    fn probability_given_everything_is_point_mass() {
        let s = uniform(4);
        let x = vec![1, 0, 1, 1];
        let c = conditional_probability(&s, &Partition::finest(4), &x);
        for w in 0..4 {
            assert_eq!(c[w], Dist::point(x[w]));
        }
    }

    #[test]
    fn probability_given_nothing_is_law() {
        let s = uniform(4);
        let x: Vec<usize> = (0..4).collect();
        let c = conditional_probability(&s, &Partition::coarsest(4), &x);
        let u = Dist::uniform(&[0, 1, 2, 3]).unwrap();
        assert!(c.iter().all(|d| *d == u));
    }

    #[test]
    fn probability_parity_example() {
        // x = (odd, even, odd, odd) with odd = 0, even = 1.
        let s = uniform(4);
        let g = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let c = conditional_probability(&s, &g, &[0, 1, 0, 0]);
        let half = Dist::new([(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap();
        assert_eq!(c, vec![half.clone(), half, Dist::point(0), Dist::point(0)]);
    }

    #[test]
    fn null_block_version_is_first_element() {
        let s = FinProbSpace::new(FinSet::numbered(3), vec![Rational::one(), Rational::zero(), Rational::zero()]).unwrap();
        let g = Partition::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        let c = conditional_probability(&s, &g, &[0, 1, 2]);
        assert_eq!(c[1], Dist::point(1));
        assert_eq!(c[2], Dist::point(1));
    }

    #[test]
    fn pushforward_lemma_trivial_cases() {
        let s = uniform(4);
        let g = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let x = vec![0, 1, 2, 1];
        assert!(check_pushforward_lemma(&s, &g, &x, &[0, 1, 2]));
        assert!(check_pushforward_lemma(&s, &g, &x, &[0, 0, 0]));
    }

    fn coin_space() -> (FinProbSpace, Filtration) {
        let s = FinProbSpace::uniform(FinSet::from_names(&["HH", "HT", "TH", "TT"]).unwrap()).unwrap();
        let f = Filtration::new(vec![
            Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap(),
            Partition::finest(4),
        ])
        .unwrap();
        (s, f)
    }

    #[test]
    fn coin_coordinates_are_markov_with_fair_law() {
        let (s, f) = coin_space();
        let coin = FinSet::from_names(&["H", "T"]).unwrap();
        let p = AdaptedProcess::new(&coin, vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]], &f).unwrap();
        let fair = MonadValue::Dist(Dist::new([(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap());
        let k = Kernel::new(coin.clone(), coin.clone(), MonadTag::Dist, vec![fair.clone(), fair]).unwrap();
        assert!(is_markov_with_law(&s, &f, &p, &k).unwrap());
        let biased = MonadValue::Dist(Dist::new([(0, ratio(1, 3)), (1, ratio(2, 3))]).unwrap());
        let k2 = Kernel::new(coin.clone(), coin, MonadTag::Dist, vec![biased.clone(), biased]).unwrap();
        assert!(!is_markov_with_law(&s, &f, &p, &k2).unwrap());
    }

    #[test]
    fn deterministic_counter_is_markov_with_successor() {
        let s = uniform(2);
        let f = Filtration::constant(Partition::coarsest(2), 3);
        let counts = FinSet::numbered(3);
        let p = AdaptedProcess::new(&counts, vec![vec![0, 0], vec![1, 1], vec![2, 2]], &f).unwrap();
        let succ = (0..3).map(|n| MonadValue::Dist(Dist::point((n + 1).min(2)))).collect();
        let k = Kernel::new(counts.clone(), counts, MonadTag::Dist, succ).unwrap();
        assert!(is_markov_with_law(&s, &f, &p, &k).unwrap());
    }

    #[test]
    fn markov_rejects_non_adapted() {
        let (s, _) = coin_space();
        let coarse = Filtration::constant(Partition::coarsest(4), 2);
        let coin = FinSet::from_names(&["H", "T"]).unwrap();
        let p = AdaptedProcess::unchecked(2, vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]]);
        let k = Kernel::unit(&coin, MonadTag::Dist);
        assert!(matches!(
            is_markov_with_law(&s, &coarse, &p, &k),
            Err(Error::NotAdapted { level: 1, .. })
        ));
    }

    fn arb_space(max: usize) -> impl Strategy<Value = FinProbSpace> {
        prop::collection::vec(0u8..4, 1..=max)
            .prop_filter("some mass", |w| w.iter().any(|&k| k > 0))
            .prop_map(|w| {
                let total: i128 = w.iter().map(|&k| k as i128).sum();
                let measure = w.iter().map(|&k| ratio(k as i128, total)).collect();
                FinProbSpace::new(FinSet::numbered(w.len()), measure).unwrap()
            })
    }

    fn arb_instance(max: usize) -> impl Strategy<Value = (FinProbSpace, Vec<usize>, Vec<usize>, Vec<i64>)> {
        arb_space(max).prop_flat_map(|s| {
            let n = s.len();
            (
                Just(s),
                prop::collection::vec(0..n, n),
                prop::collection::vec(0..n, n),
                prop::collection::vec(-5i64..6, n),
            )
        })
    }

    proptest! {
        #[test]
        fn integral_identity_on_block_unions((s, key, _, x) in arb_instance(5), mask in any::<u32>()) {
            let g = Partition::by_key(&key);
            let x: Vec<Rational> = x.iter().map(|&v| Rational::from_integer(v as i128)).collect();
            let e = conditional_expectation(&s, &g, &x);
            prop_assert!(g.is_measurable(&e));
            let u: Vec<usize> = (0..g.num_blocks())
                .filter(|b| mask >> (b % 32) & 1 == 1)
                .flat_map(|b| g.block(b).to_vec())
                .collect();
            let lhs: Rational = u.iter().map(|&w| s.prob(w) * e[w]).sum();
            let rhs: Rational = u.iter().map(|&w| s.prob(w) * x[w]).sum();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn tower_property((s, k1, k2, x) in arb_instance(4)) {
            let coarse = Partition::by_key(&k1);
            let fine = coarse.meet(&Partition::by_key(&k2));
            let x: Vec<Rational> = x.iter().map(|&v| Rational::from_integer(v as i128)).collect();
            let inner = conditional_expectation(&s, &fine, &x);
            let lhs = conditional_expectation(&s, &coarse, &inner);
            let rhs = conditional_expectation(&s, &coarse, &x);
            for w in 0..s.len() {
                if positive_block(&s, &coarse, w) {
                    prop_assert_eq!(lhs[w], rhs[w]);
                }
            }
        }

        #[test]
        fn conditional_probability_averages_to_law((s, key, x, _) in arb_instance(5)) {
            let g = Partition::by_key(&key);
            let c = conditional_probability(&s, &g, &x);
            prop_assert!(g.is_measurable(&c));
            let mut acc: Vec<(usize, Rational)> = Vec::new();
            for w in 0..s.len() {
                for &(v, p) in c[w].support() {
                    acc.push((v, p * s.prob(w)));
                }
            }
            prop_assert_eq!(Dist::new(acc).unwrap(), s.law(&x));
        }

        #[test]
        fn pushforward_lemma((s, key, x, f) in arb_instance(5)) {
            let g = Partition::by_key(&key);
            let f: Vec<usize> = f.iter().map(|&v| (v.unsigned_abs() as usize) % s.len()).collect();
            prop_assert!(check_pushforward_lemma(&s, &g, &x, &f));
        }
    }
}
