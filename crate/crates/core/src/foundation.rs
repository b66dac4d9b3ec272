//! Finite sets, exact rationals, and the three monads used by the systems
//! in this crate: identity (deterministic), finite distributions
//! (stochastic) and powerset (nondeterministic).
//!
//! Everything is index-based. A [`FinSet`] owns the labels; values such as
//! [`Dist`] or [`Subset`] refer to elements by their position in the set
//! they live over, and the owning [`Kernel`] or [`FinMap`] records which set
//! that is.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact probability weight. Always in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::Ratio<i128>;

/// Shorthand for `Rational::new(n, d)`.
pub fn ratio(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

/// Characters that would make a label ambiguous in the text format.
pub const RESERVED_LABEL_CHARS: &[char] = &[':', '|', ';', '{', '}', '#', '=', '>'];

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let ok = !name.is_empty()
            && !name.chars().any(|c| c.is_whitespace() || RESERVED_LABEL_CHARS.contains(&c));
        if ok {
            Ok(Label(name))
        } else {
            Err(Error::InvalidLabel(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite set of labels in insertion order. Cloning is cheap.
#[derive(Clone)]
pub struct FinSet {
    labels: Arc<Vec<Label>>,
    index: Arc<HashMap<Label, usize>>,
}

impl FinSet {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
        Ok(FinSet {
            labels: Arc::new(labels),
            index: Arc::new(index),
        })
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let labels = names
            .iter()
            .map(|n| Label::new(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        FinSet::new(labels)
    }

    /// `{1, .., n}` labelled by decimal numerals.
    pub fn numbered(n: usize) -> Self {
        let labels = (1..=n).map(|i| Label(i.to_string())).collect();
        FinSet::new(labels).expect("numerals are distinct")
    }

    /// The one-point set `{*}`.
    pub fn point() -> Self {
        FinSet::new(vec![Label("*".into())]).expect("single label")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        // Labels hash like their string content.
        self.index.get(&Label(name.to_string())).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Label> {
        self.labels.iter()
    }

    pub(crate) fn check_index(&self, i: usize, what: &str) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!(
                "{what}: element index {i} outside a set of size {}",
                self.len()
            )))
        }
    }
}

impl PartialEq for FinSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for FinSet {}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.labels.iter()).finish()
    }
}

/// A finitely supported probability distribution with exact weights.
///
/// Zero-weight entries are dropped and the support is kept sorted, so
/// derived equality coincides with equality of measures.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dist {
    support: Vec<(usize, Rational)>,
}

impl Dist {
    /// Builds a distribution, merging repeated elements. Fails unless every
    /// weight is non-negative and the total is exactly one.
    pub fn new(entries: impl IntoIterator<Item = (usize, Rational)>) -> Result<Self> {
        let d = Dist::from_weights_unchecked(entries)?;
        let sum: Rational = d.support.iter().map(|(_, w)| *w).sum();
        if sum != Rational::one() {
            return Err(Error::NotNormalized { sum });
        }
        Ok(d)
    }

    fn from_weights_unchecked(entries: impl IntoIterator<Item = (usize, Rational)>) -> Result<Self> {
        let mut acc: Vec<(usize, Rational)> = Vec::new();
        for (i, w) in entries {
            if w < Rational::zero() {
                return Err(Error::NegativeWeight { element: i, weight: w });
            }
            acc.push((i, w));
        }
        Ok(Dist {
            support: Self::normalize_entries(acc),
        })
    }

    fn normalize_entries(mut acc: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
        acc.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, Rational)> = Vec::with_capacity(acc.len());
        for (i, w) in acc {
            match out.last_mut() {
                Some((j, v)) if *j == i => *v += w,
                _ => out.push((i, w)),
            }
        }
        out.retain(|(_, w)| !w.is_zero());
        out
    }

    pub fn point(i: usize) -> Self {
        Dist {
            support: vec![(i, Rational::one())],
        }
    }

    /// Uniform distribution over the given (distinct) elements.
    pub fn uniform(elems: &[usize]) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::NotNormalized { sum: Rational::zero() });
        }
        let w = ratio(1, elems.len() as i128);
        Dist::new(elems.iter().map(|&i| (i, w)))
    }

    pub fn weight(&self, i: usize) -> Rational {
        self.support
            .binary_search_by_key(&i, |(j, _)| *j)
            .map(|k| self.support[k].1)
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn support(&self) -> &[(usize, Rational)] {
        &self.support
    }

    pub fn is_point(&self) -> Option<usize> {
        match self.support.as_slice() {
            [(i, _)] => Some(*i),
            _ => None,
        }
    }

    /// Pushforward along an arbitrary index function.
    pub fn pushforward(&self, f: impl Fn(usize) -> usize) -> Dist {
        Dist {
            support: Self::normalize_entries(self.support.iter().map(|&(i, w)| (f(i), w)).collect()),
        }
    }

    /// Mixture `Σ_x self(x) · k(x)`.
    pub fn mix<'a>(&self, k: impl Fn(usize) -> &'a Dist) -> Dist {
        let mut acc = Vec::new();
        for &(i, w) in &self.support {
            for &(j, v) in &k(i).support {
                acc.push((j, w * v));
            }
        }
        Dist {
            support: Self::normalize_entries(acc),
        }
    }

    fn max_index(&self) -> Option<usize> {
        self.support.last().map(|(i, _)| *i)
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.support.iter().map(|(i, w)| (i, format!("{w}")))).finish()
    }
}

/// A subset of some ambient finite set, by element index.
pub type Subset = BTreeSet<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonadTag {
    Identity,
    Dist,
    Power,
}

impl MonadTag {
    pub fn name(self) -> &'static str {
        match self {
            MonadTag::Identity => "identity",
            MonadTag::Dist => "dist",
            MonadTag::Power => "power",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "identity" => Some(MonadTag::Identity),
            "dist" => Some(MonadTag::Dist),
            "power" => Some(MonadTag::Power),
            _ => None,
        }
    }

    /// The unit of the monad at element `i`.
    pub fn unit(self, i: usize) -> MonadValue {
        match self {
            MonadTag::Identity => MonadValue::Point(i),
            MonadTag::Dist => MonadValue::Dist(Dist::point(i)),
            MonadTag::Power => MonadValue::Set(Subset::from([i])),
        }
    }
}

impl fmt::Display for MonadTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An element of `M(X)` for one of the three monads.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonadValue {
    Point(usize),
    Dist(Dist),
    Set(Subset),
}

impl MonadValue {
    pub fn tag(&self) -> MonadTag {
        match self {
            MonadValue::Point(_) => MonadTag::Identity,
            MonadValue::Dist(_) => MonadTag::Dist,
            MonadValue::Set(_) => MonadTag::Power,
        }
    }

    /// Functorial action on an index map, without bounds checks.
    pub fn map_with(&self, f: impl Fn(usize) -> usize) -> MonadValue {
        match self {
            MonadValue::Point(i) => MonadValue::Point(f(*i)),
            MonadValue::Dist(d) => MonadValue::Dist(d.pushforward(f)),
            MonadValue::Set(s) => MonadValue::Set(s.iter().map(|&i| f(i)).collect()),
        }
    }

    fn max_index(&self) -> Option<usize> {
        match self {
            MonadValue::Point(i) => Some(*i),
            MonadValue::Dist(d) => d.max_index(),
            MonadValue::Set(s) => s.last().copied(),
        }
    }

    pub(crate) fn check_within(&self, set: &FinSet, what: &str) -> Result<()> {
        match self.max_index() {
            Some(i) => set.check_index(i, what),
            None => Ok(()),
        }
    }
}

/// A plain total function between finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinMap {
    pub domain: FinSet,
    pub codomain: FinSet,
    table: Vec<usize>,
}

impl FinMap {
    pub fn new(domain: FinSet, codomain: FinSet, table: Vec<usize>) -> Result<Self> {
        if table.len() != domain.len() {
            return Err(Error::Shape(format!(
                "function table has {} entries for a domain of size {}",
                table.len(),
                domain.len()
            )));
        }
        for &j in &table {
            codomain.check_index(j, "function value")?;
        }
        Ok(FinMap { domain, codomain, table })
    }

    pub fn identity(set: &FinSet) -> Self {
        FinMap {
            domain: set.clone(),
            codomain: set.clone(),
            table: (0..set.len()).collect(),
        }
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &FinMap) -> Result<FinMap> {
        if inner.codomain != self.domain {
            return Err(Error::DomainMismatch("composite of non-composable functions".into()));
        }
        Ok(FinMap {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            table: inner.table.iter().map(|&i| self.table[i]).collect(),
        })
    }
}

/// A morphism `X → M(Y)` stored as an explicit table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub domain: FinSet,
    pub codomain: FinSet,
    pub tag: MonadTag,
    table: Vec<MonadValue>,
}

impl Kernel {
    pub fn new(domain: FinSet, codomain: FinSet, tag: MonadTag, table: Vec<MonadValue>) -> Result<Self> {
        if table.len() != domain.len() {
            return Err(Error::Shape(format!(
                "kernel table has {} rows for a domain of size {}",
                table.len(),
                domain.len()
            )));
        }
        for v in &table {
            if v.tag() != tag {
                return Err(Error::TagMismatch { expected: tag, found: v.tag() });
            }
            v.check_within(&codomain, "kernel entry")?;
        }
        Ok(Kernel { domain, codomain, tag, table })
    }

    pub fn from_function(f: &FinMap) -> Self {
        Kernel {
            domain: f.domain.clone(),
            codomain: f.codomain.clone(),
            tag: MonadTag::Identity,
            table: f.table.iter().map(|&j| MonadValue::Point(j)).collect(),
        }
    }

    /// The unit kernel `x ↦ η(x)` for `tag`.
    pub fn unit(set: &FinSet, tag: MonadTag) -> Self {
        Kernel {
            domain: set.clone(),
            codomain: set.clone(),
            tag,
            table: (0..set.len()).map(|i| tag.unit(i)).collect(),
        }
    }

    pub fn at(&self, i: usize) -> &MonadValue {
        &self.table[i]
    }

    pub fn table(&self) -> &[MonadValue] {
        &self.table
    }

    /// Underlying function of an identity-tag kernel.
    pub fn as_function(&self) -> Result<FinMap> {
        let table = self
            .table
            .iter()
            .map(|v| match v {
                MonadValue::Point(j) => Ok(*j),
                other => Err(Error::TagMismatch { expected: MonadTag::Identity, found: other.tag() }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FinMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            table,
        })
    }
}

/// `M(f)`: pushes a point, distribution or subset over `f.domain` forward
/// to `f.codomain`.
pub fn monad_map(f: &FinMap, v: &MonadValue) -> Result<MonadValue> {
    v.check_within(&f.domain, "monad_map argument")?;
    Ok(v.map_with(|i| f.table[i]))
}

/// Kleisli extension: `v >>= k`.
pub fn monad_bind(k: &Kernel, v: &MonadValue) -> Result<MonadValue> {
    if v.tag() != k.tag {
        return Err(Error::TagMismatch { expected: k.tag, found: v.tag() });
    }
    v.check_within(&k.domain, "monad_bind argument")?;
    Ok(match v {
        MonadValue::Point(i) => k.table[*i].clone(),
        MonadValue::Dist(d) => MonadValue::Dist(d.mix(|i| match &k.table[i] {
            MonadValue::Dist(row) => row,
            _ => unreachable!("kernel rows are tag-checked on construction"),
        })),
        MonadValue::Set(s) => {
            let mut out = Subset::new();
            for &i in s {
                if let MonadValue::Set(row) = &k.table[i] {
                    out.extend(row.iter().copied());
                }
            }
            MonadValue::Set(out)
        }
    })
}
