//! Finite filtered probability spaces and the maps between them: immersion
//! checks, Bayesian inverses, independent squares and pullbacks, and gluing
//! of stochastic behaviors along a measure-preserving map.
//!
//! Filtration levels are zero-based throughout, and every comparison
//! quantifies over positive-mass points only.

use num_traits::Zero;

use crate::behavior::{check_stoch_behavior, StochBehavior};
use crate::error::{Error, Result};
use crate::finprob::{conditional_expectation, positive_block, AdaptedProcess, FinProbSpace, Filtration, Partition};
use crate::foundation::{Dist, FinSet, Kernel, Label, MonadTag, MonadValue, Rational};
use crate::interface::all_tables;
use crate::machine::{EnumConfig, MonadicSystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredSpace {
    pub space: FinProbSpace,
    pub filt: Filtration,
}

impl FilteredSpace {
    pub fn new(space: FinProbSpace, filt: Filtration) -> Result<Self> {
        if filt.is_empty() {
            return Err(Error::Shape("a filtered space needs at least one level".into()));
        }
        if filt.level(0).universe_len() != space.len() {
            return Err(Error::DomainMismatch("filtration lives on a different sample space".into()));
        }
        Ok(FilteredSpace { space, filt })
    }

    /// Number of filtration levels.
    pub fn len(&self) -> usize {
        self.filt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filt.is_empty()
    }

    /// Product measure with the levelwise product filtration. Points are
    /// numbered `a * |B| + b` and labelled `(a,b)`.
    pub fn product(a: &FilteredSpace, b: &FilteredSpace) -> Result<FilteredSpace> {
        if a.len() != b.len() {
            return Err(Error::Shape("factors have filtrations of different lengths".into()));
        }
        let (na, nb) = (a.space.len(), b.space.len());
        let mut labels = Vec::with_capacity(na * nb);
        let mut measure = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                labels.push(Label::new(format!("({},{})", a.space.omega.label(i), b.space.omega.label(j)))?);
                measure.push(a.space.prob(i) * b.space.prob(j));
            }
        }
        let levels = (0..a.len())
            .map(|t| {
                let key: Vec<(usize, usize)> = (0..na * nb)
                    .map(|k| (a.filt.level(t).block_of(k / nb), b.filt.level(t).block_of(k % nb)))
                    .collect();
                Partition::by_key(&key)
            })
            .collect();
        FilteredSpace::new(FinProbSpace::new(FinSet::new(labels)?, measure)?, Filtration::new(levels)?)
    }

    /// `Ωᵗ` with the product measure; level `i` knows the first `i + 1`
    /// coordinates. Points are labelled by their coordinates joined with `,`.
    pub fn iid_power(space: &FinProbSpace, t: usize) -> Result<FilteredSpace> {
        if t == 0 {
            return Err(Error::Shape("power must be at least 1".into()));
        }
        let n = space.len();
        let points: Vec<Vec<usize>> = all_tables(t, n).collect();
        let labels = points
            .iter()
            .map(|p| {
                let parts: Vec<&str> = p.iter().map(|&w| space.omega.label(w).as_str()).collect();
                Label::new(parts.join(","))
            })
            .collect::<Result<Vec<_>>>()?;
        let measure = points.iter().map(|p| p.iter().map(|&w| space.prob(w)).product()).collect();
        let levels = (0..t)
            .map(|i| Partition::by_key(&points.iter().map(|p| p[..=i].to_vec()).collect::<Vec<_>>()))
            .collect();
        FilteredSpace::new(FinProbSpace::new(FinSet::new(labels)?, measure)?, Filtration::new(levels)?)
    }
}

fn check_measure_preserving(src: &FinProbSpace, dst: &FinProbSpace, map: &[usize]) -> Result<()> {
    if map.len() != src.len() {
        return Err(Error::Shape(format!("map has {} entries for {} points", map.len(), src.len())));
    }
    for &y in map {
        dst.omega.check_index(y, "map")?;
    }
    let mut pushed = vec![Rational::zero(); dst.len()];
    for (w, &y) in map.iter().enumerate() {
        pushed[y] += src.prob(w);
    }
    if let Some(y) = (0..dst.len()).find(|&y| pushed[y] != dst.prob(y)) {
        return Err(Error::NotMeasurePreserving(format!(
            "pushforward gives {} mass {} but the target has {}",
            dst.omega.label(y),
            pushed[y],
            dst.prob(y)
        )));
    }
    Ok(())
}

/// A measure-preserving function between finite probability spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbMap {
    pub src: FinProbSpace,
    pub dst: FinProbSpace,
    map: Vec<usize>,
}

impl ProbMap {
    pub fn new(src: FinProbSpace, dst: FinProbSpace, map: Vec<usize>) -> Result<Self> {
        check_measure_preserving(&src, &dst, &map)?;
        Ok(ProbMap { src, dst, map })
    }

    pub fn identity(space: &FinProbSpace) -> Self {
        ProbMap {
            src: space.clone(),
            dst: space.clone(),
            map: (0..space.len()).collect(),
        }
    }

    pub fn apply(&self, w: usize) -> usize {
        self.map[w]
    }

    pub fn table(&self) -> &[usize] {
        &self.map
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ProbMap) -> Result<ProbMap> {
        if self.dst != next.src {
            return Err(Error::Composition("probability maps do not compose".into()));
        }
        Ok(ProbMap {
            src: self.src.clone(),
            dst: next.dst.clone(),
            map: self.map.iter().map(|&y| next.map[y]).collect(),
        })
    }
}

/// A measure-preserving, filtration-preserving function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredMap {
    pub src: FilteredSpace,
    pub dst: FilteredSpace,
    map: Vec<usize>,
}

impl FilteredMap {
    pub fn new(src: FilteredSpace, dst: FilteredSpace, map: Vec<usize>) -> Result<Self> {
        if src.len() != dst.len() {
            return Err(Error::Shape(format!(
                "filtrations have {} and {} levels",
                src.len(),
                dst.len()
            )));
        }
        check_measure_preserving(&src.space, &dst.space, &map)?;
        for i in 0..src.len() {
            let pulled: Vec<usize> = map.iter().map(|&y| dst.filt.level(i).block_of(y)).collect();
            if let Some(b) = src.filt.level(i).non_measurable_block(&pulled) {
                return Err(Error::NotFiltrationPreserving(format!(
                    "level {} block {:?} meets several target blocks",
                    i + 1,
                    src.filt.level(i).block(b)
                )));
            }
        }
        Ok(FilteredMap { src, dst, map })
    }

    pub fn identity(fs: &FilteredSpace) -> Self {
        FilteredMap {
            src: fs.clone(),
            dst: fs.clone(),
            map: (0..fs.space.len()).collect(),
        }
    }

    pub fn apply(&self, w: usize) -> usize {
        self.map[w]
    }

    pub fn table(&self) -> &[usize] {
        &self.map
    }

    pub fn then(&self, next: &FilteredMap) -> Result<FilteredMap> {
        if self.dst != next.src {
            return Err(Error::Composition("filtered maps do not compose".into()));
        }
        Ok(FilteredMap {
            src: self.src.clone(),
            dst: next.dst.clone(),
            map: self.map.iter().map(|&y| next.map[y]).collect(),
        })
    }

    pub fn as_prob_map(&self) -> ProbMap {
        ProbMap {
            src: self.src.space.clone(),
            dst: self.dst.space.clone(),
            map: self.map.clone(),
        }
    }

    /// Block of `𝓕′ᵢ` containing the image of block `b` of `𝓕ᵢ`.
    fn block_image(&self, i: usize, b: usize) -> usize {
        self.dst.filt.level(i).block_of(self.map[self.src.filt.level(i).block(b)[0]])
    }
}

/// Every valid filtered map between two spaces, in table order.
pub fn enumerate_filtered_maps(src: &FilteredSpace, dst: &FilteredSpace, cfg: &EnumConfig) -> Result<Vec<FilteredMap>> {
    let count = (dst.space.len() as u128).checked_pow(src.space.len() as u32).unwrap_or(u128::MAX);
    cfg.admit(count)?;
    Ok(all_tables(src.space.len(), dst.space.len())
        .filter_map(|t| FilteredMap::new(src.clone(), dst.clone(), t).ok())
        .collect())
}

/// A kernel from the blocks of one partition to distributions over the
/// blocks of another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochKernelMap {
    pub domain: Partition,
    pub codomain: Partition,
    rows: Vec<Dist>,
}

impl StochKernelMap {
    pub fn row(&self, b: usize) -> &Dist {
        &self.rows[b]
    }

    pub fn rows(&self) -> &[Dist] {
        &self.rows
    }
}

/// Conditional distribution from level `i` to level `i + 1`: a block maps
/// to the relative masses of its sub-blocks; a null block maps to its first
/// sub-block.
pub fn conditional_kernel(fs: &FilteredSpace, i: usize) -> Result<StochKernelMap> {
    if i + 1 >= fs.len() {
        return Err(Error::Shape(format!(
            "no level after {} in a filtration of length {}",
            i + 1,
            fs.len()
        )));
    }
    let (coarse, fine) = (fs.filt.level(i), fs.filt.level(i + 1));
    let rows = coarse
        .blocks()
        .iter()
        .map(|b| {
            let mass = fs.space.mass(b);
            if mass.is_zero() {
                Dist::point(fine.block_of(b[0]))
            } else {
                Dist::new(b.iter().map(|&w| (fine.block_of(w), fs.space.prob(w) / mass))).expect("renormalized")
            }
        })
        .collect();
    Ok(StochKernelMap {
        domain: coarse.clone(),
        codomain: fine.clone(),
        rows,
    })
}

/// Whether the conditional kernels commute with `φ` at every level, on
/// positive-mass blocks of the source.
pub fn is_immersion_kernel(phi: &FilteredMap) -> bool {
    (0..phi.src.len().saturating_sub(1)).all(|i| {
        let ks = conditional_kernel(&phi.src, i).expect("level in range");
        let kd = conditional_kernel(&phi.dst, i).expect("level in range");
        let level = phi.src.filt.level(i);
        (0..level.num_blocks())
            .filter(|&b| !phi.src.space.mass(level.block(b)).is_zero())
            .all(|b| ks.row(b).pushforward(|b2| phi.block_image(i + 1, b2)) == *kd.row(phi.block_image(i, b)))
    })
}

/// Outcome of the indicator-martingale search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MartingaleVerdict {
    pub immersion: bool,
    /// A target event `V` and the zero-based level at which `𝔼[1_V | 𝓕′ₙ] ∘ φ`
    /// stops being a martingale.
    pub witness: Option<(Vec<usize>, usize)>,
}

/// Tests every pulled-back indicator martingale `𝔼[1_V | 𝓕′ₙ] ∘ φ` for
/// `V ⊆ Ω_dst`.
pub fn is_immersion_martingale(phi: &FilteredMap, cfg: &EnumConfig) -> Result<MartingaleVerdict> {
    let n = phi.dst.space.len();
    let subsets = 1u128.checked_shl(n as u32).unwrap_or(u128::MAX);
    cfg.admit(subsets)?;
    let t = phi.src.len();
    for mask in 0..subsets {
        let indicator: Vec<Rational> = (0..n)
            .map(|y| if mask >> y & 1 == 1 { Rational::from_integer(1) } else { Rational::zero() })
            .collect();
        let pulled: Vec<Vec<Rational>> = (0..t)
            .map(|k| {
                let x = conditional_expectation(&phi.dst.space, phi.dst.filt.level(k), &indicator);
                phi.map.iter().map(|&y| x[y]).collect()
            })
            .collect();
        for i in 0..t.saturating_sub(1) {
            let level = phi.src.filt.level(i);
            let e = conditional_expectation(&phi.src.space, level, &pulled[i + 1]);
            let broken = (0..phi.src.space.len()).any(|w| positive_block(&phi.src.space, level, w) && e[w] != pulled[i][w]);
            if broken {
                let v = (0..n).filter(|&y| mask >> y & 1 == 1).collect();
                return Ok(MartingaleVerdict { immersion: false, witness: Some((v, i)) });
            }
        }
    }
    Ok(MartingaleVerdict { immersion: true, witness: None })
}

/// `P` restricted to the fiber over `b` and renormalized, when `b` has
/// positive mass.
fn fiber_conditional(f: &ProbMap, b: usize) -> Option<Dist> {
    let mass = f.dst.prob(b);
    if mass.is_zero() {
        return None;
    }
    Some(
        Dist::new(
            (0..f.src.len())
                .filter(|&a| f.map[a] == b)
                .map(|a| (a, f.src.prob(a) / mass)),
        )
        .expect("measure-preserving fibers renormalize"),
    )
}

/// The Bayesian inverse `B → Dist A` of `f: A → B`. Null points go to the
/// point mass at the least element of their fiber.
pub fn bayesian_inverse(f: &ProbMap) -> Result<Kernel> {
    let table = (0..f.dst.len())
        .map(|b| match fiber_conditional(f, b) {
            Some(d) => Ok(MonadValue::Dist(d)),
            None => (0..f.src.len())
                .find(|&a| f.map[a] == b)
                .map(|a| MonadValue::Dist(Dist::point(a)))
                .ok_or(Error::EmptyNullFiber(b)),
        })
        .collect::<Result<Vec<_>>>()?;
    Kernel::new(f.dst.omega.clone(), f.src.omega.clone(), MonadTag::Dist, table)
}

/// A commuting square `A → B → D = A → C → D` of measure-preserving maps.
#[derive(Clone, Debug)]
pub struct ProbSquare {
    pub top: ProbMap,
    pub left: ProbMap,
    pub right: ProbMap,
    pub bottom: ProbMap,
}

impl ProbSquare {
    pub fn new(top: ProbMap, left: ProbMap, right: ProbMap, bottom: ProbMap) -> Result<Self> {
        if top.src != left.src || top.dst != right.src || left.dst != bottom.src || right.dst != bottom.dst {
            return Err(Error::Shape("square edges do not meet".into()));
        }
        if let Some(a) = (0..top.src.len()).find(|&a| right.map[top.map[a]] != bottom.map[left.map[a]]) {
            return Err(Error::Shape(format!("square does not commute at {}", top.src.omega.label(a))));
        }
        Ok(ProbSquare { top, left, right, bottom })
    }
}

/// Whether the square exhibits `B ⊥_D C`: the conditional law of the
/// `C`-value given the `B`-value depends only on the image in `D`.
pub fn is_independent_square(sq: &ProbSquare) -> bool {
    let a = &sq.top.src;
    let conditional = |b: usize| -> Dist {
        let mass = sq.top.dst.prob(b);
        Dist::new(
            (0..a.len())
                .filter(|&x| sq.top.map[x] == b)
                .map(|x| (sq.left.map[x], a.prob(x) / mass)),
        )
        .expect("measure-preserving fibers renormalize")
    };
    let mut seen: Vec<Option<Dist>> = vec![None; sq.right.dst.len()];
    for b in (0..sq.top.dst.len()).filter(|&b| !sq.top.dst.prob(b).is_zero()) {
        let c = conditional(b);
        match &seen[sq.right.map[b]] {
            Some(prev) if *prev != c => return false,
            Some(_) => {}
            None => seen[sq.right.map[b]] = Some(c),
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseSide {
    /// Invert `top` and `bottom`: `B → A → C` against `B → D → C`.
    Horizontal,
    /// Invert `left` and `right`: `C → A → B` against `C → D → B`.
    Vertical,
}

/// Whether the square of Bayesian inverses commutes at every positive-mass
/// point.
pub fn inverse_square_commutes(sq: &ProbSquare, side: InverseSide) -> bool {
    let (inv_near, across, down, inv_far) = match side {
        InverseSide::Horizontal => (&sq.top, &sq.left, &sq.right, &sq.bottom),
        InverseSide::Vertical => (&sq.left, &sq.top, &sq.bottom, &sq.right),
    };
    (0..inv_near.dst.len()).all(|b| match fiber_conditional(inv_near, b) {
        None => true,
        Some(d) => {
            let far = fiber_conditional(inv_far, down.map[b]).expect("image of a positive point is positive");
            d.pushforward(|a| across.map[a]) == far
        }
    })
}

/// The set pullback of a cospan with the conditionally independent
/// coupling over the base.
#[derive(Clone, Debug)]
pub struct ProbPullback {
    pub space: FinProbSpace,
    pub pairs: Vec<(usize, usize)>,
    pub left: ProbMap,
    pub right: ProbMap,
}

impl ProbPullback {
    pub fn index_of(&self, pair: (usize, usize)) -> Option<usize> {
        self.pairs.binary_search(&pair).ok()
    }
}

pub fn independent_pullback_plain(f: &ProbMap, g: &ProbMap) -> Result<ProbPullback> {
    if f.dst != g.dst {
        return Err(Error::Shape("cospan legs have different targets".into()));
    }
    let mut pairs = Vec::new();
    let mut labels = Vec::new();
    let mut measure = Vec::new();
    for a in 0..f.src.len() {
        for b in (0..g.src.len()).filter(|&b| g.map[b] == f.map[a]) {
            let base = f.dst.prob(f.map[a]);
            pairs.push((a, b));
            labels.push(Label::new(format!("({},{})", f.src.omega.label(a), g.src.omega.label(b)))?);
            measure.push(if base.is_zero() {
                Rational::zero()
            } else {
                f.src.prob(a) * g.src.prob(b) / base
            });
        }
    }
    let space = FinProbSpace::new(FinSet::new(labels)?, measure)?;
    let left = ProbMap::new(space.clone(), f.src.clone(), pairs.iter().map(|p| p.0).collect())?;
    let right = ProbMap::new(space.clone(), g.src.clone(), pairs.iter().map(|p| p.1).collect())?;
    Ok(ProbPullback { space, pairs, left, right })
}

#[derive(Clone, Debug)]
pub struct FilteredPullback {
    pub space: FilteredSpace,
    pub pairs: Vec<(usize, usize)>,
    pub left: FilteredMap,
    pub right: FilteredMap,
}

/// The independent pullback of filtered spaces; level `i` is generated by
/// pairs of level-`i` blocks of the two legs.
pub fn independent_pullback(f: &FilteredMap, g: &FilteredMap) -> Result<FilteredPullback> {
    if f.src.len() != g.src.len() {
        return Err(Error::Shape("cospan legs have filtrations of different lengths".into()));
    }
    let plain = independent_pullback_plain(&f.as_prob_map(), &g.as_prob_map())?;
    let levels = (0..f.src.len())
        .map(|i| {
            let key: Vec<(usize, usize)> = plain
                .pairs
                .iter()
                .map(|&(a, b)| (f.src.filt.level(i).block_of(a), g.src.filt.level(i).block_of(b)))
                .collect();
            Partition::by_key(&key)
        })
        .collect();
    let space = FilteredSpace::new(plain.space, Filtration::new(levels)?)?;
    let left = FilteredMap::new(space.clone(), f.src.clone(), plain.left.map)?;
    let right = FilteredMap::new(space.clone(), g.src.clone(), plain.right.map)?;
    Ok(FilteredPullback {
        space,
        pairs: plain.pairs,
        left,
        right,
    })
}

/// `(γ, ω) ↦ (g(γ), o(ω))` between two pullbacks.
pub fn induced_pullback_map(from: &ProbPullback, to: &ProbPullback, g: &ProbMap, o: &ProbMap) -> Result<ProbMap> {
    let map = from
        .pairs
        .iter()
        .map(|&(a, b)| {
            to.index_of((g.map[a], o.map[b]))
                .ok_or_else(|| Error::Shape("induced pair leaves the target pullback".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    ProbMap::new(from.space.clone(), to.space.clone(), map)
}

/// Whether every step of `p` agrees on both sides of each positive-mass
/// pair of `Γ ⊗_Ω Γ`.
fn check_invariant(name: &'static str, p: &AdaptedProcess, pb: &ProbPullback) -> Result<()> {
    for i in 0..p.len() {
        for (k, &(a, b)) in pb.pairs.iter().enumerate() {
            if !pb.space.prob(k).is_zero() && p.step(i)[a] != p.step(i)[b] {
                return Err(Error::NotInvariant { process: name, level: i + 1, left: a, right: b });
            }
        }
    }
    Ok(())
}

/// Factors `p` through `φ`: `q(ω)` is the common value of `p` on the
/// positive part of the fiber. Null points copy a positive point of their
/// block when there is one.
fn factor(p: &AdaptedProcess, phi: &FilteredMap) -> Result<AdaptedProcess> {
    let (src, dst) = (&phi.src.space, &phi.dst.space);
    let steps = (0..p.len())
        .map(|i| {
            let level = phi.dst.filt.level(i);
            let direct: Vec<Option<usize>> = (0..dst.len())
                .map(|w| {
                    (0..src.len())
                        .find(|&g| phi.map[g] == w && !src.prob(g).is_zero())
                        .map(|g| p.step(i)[g])
                })
                .collect();
            (0..dst.len())
                .map(|w| {
                    direct[w]
                        .or_else(|| level.block(level.block_of(w)).iter().find_map(|&v| direct[v]))
                        .or_else(|| (0..src.len()).find(|&g| phi.map[g] == w).map(|g| p.step(i)[g]))
                        .unwrap_or(0)
                })
                .collect()
        })
        .collect();
    let q = AdaptedProcess::unchecked(p.target_len(), steps);
    q.check_adapted(&phi.dst.filt)?;
    Ok(q)
}

/// Descends a `φ`-invariant behavior on `Γ` to one on `Ω`.
pub fn glue_behavior(phi: &FilteredMap, s: &MonadicSystem, b: &StochBehavior) -> Result<StochBehavior> {
    if !check_stoch_behavior(s, &phi.src.space, &phi.src.filt, b)? {
        return Err(Error::InvalidBehavior("input is not a behavior on the source space".into()));
    }
    let pm = phi.as_prob_map();
    let pb = independent_pullback_plain(&pm, &pm)?;
    check_invariant("xs", &b.xs, &pb)?;
    check_invariant("outs", &b.outs, &pb)?;
    check_invariant("ins", &b.ins, &pb)?;
    let glued = StochBehavior {
        xs: factor(&b.xs, phi)?,
        outs: factor(&b.outs, phi)?,
        ins: factor(&b.ins, phi)?,
    };
    if !check_stoch_behavior(s, &phi.dst.space, &phi.dst.filt, &glued)? {
        return Err(Error::InvalidBehavior("glued processes break the law on the target; the map is not an immersion".into()));
    }
    Ok(glued)
}

/// Precomposes every process of `b` with `φ`.
pub fn pullback_behavior(phi: &FilteredMap, b: &StochBehavior) -> StochBehavior {
    StochBehavior {
        xs: b.xs.pullback(&phi.map),
        outs: b.outs.pullback(&phi.map),
        ins: b.ins.pullback(&phi.map),
    }
}
