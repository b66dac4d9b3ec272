//! Arenas, charts and lenses for the `Ctx` indexed category over finite
//! sets.
//!
//! A direction fiber over a position is always the same set `dir`, so a
//! chart's `flat` and a lens's `sharp` are ordinary functions out of a
//! product and are stored as row-major tables.

use crate::error::{Error, Result};
use crate::foundation::FinSet;

/// An interface: positions (outputs) and directions (inputs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    pub pos: FinSet,
    pub dir: FinSet,
}

impl Arena {
    pub fn new(pos: FinSet, dir: FinSet) -> Result<Self> {
        if pos.is_empty() {
            return Err(Error::Shape("arena has no positions".into()));
        }
        Ok(Arena { pos, dir })
    }

    /// An arena whose direction set is the one-point set `{*}`.
    pub fn closed(pos: FinSet) -> Result<Self> {
        Arena::new(pos, FinSet::point())
    }
}

/// Interface morphism `(a, a♭)`: `fwd: pos₁ → pos₂`,
/// `flat: pos₁ × dir₁ → dir₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub src: Arena,
    pub dst: Arena,
    fwd: Vec<usize>,
    flat: Vec<usize>,
}

impl Chart {
    /// `flat` is indexed `p * src.dir.len() + d`.
    pub fn new(src: Arena, dst: Arena, fwd: Vec<usize>, flat: Vec<usize>) -> Result<Self> {
        check_table(&fwd, src.pos.len(), &dst.pos, "chart fwd")?;
        check_table(&flat, src.pos.len() * src.dir.len(), &dst.dir, "chart flat")?;
        Ok(Chart { src, dst, fwd, flat })
    }

    pub fn identity(arena: &Arena) -> Self {
        Chart {
            src: arena.clone(),
            dst: arena.clone(),
            fwd: (0..arena.pos.len()).collect(),
            flat: (0..arena.pos.len())
                .flat_map(|_| 0..arena.dir.len())
                .collect(),
        }
    }

    pub fn fwd(&self, p: usize) -> usize {
        self.fwd[p]
    }

    pub fn flat(&self, p: usize, d: usize) -> usize {
        self.flat[p * self.src.dir.len() + d]
    }

    pub fn fwd_table(&self) -> &[usize] {
        &self.fwd
    }

    pub fn flat_table(&self) -> &[usize] {
        &self.flat
    }

    /// `self ∘ inner` as charts.
    pub fn after(&self, inner: &Chart) -> Result<Chart> {
        if inner.dst != self.src {
            return Err(Error::Composition("chart endpoints do not match".into()));
        }
        let fwd = inner.fwd.iter().map(|&q| self.fwd[q]).collect();
        let mut flat = Vec::with_capacity(inner.flat.len());
        for p in 0..inner.src.pos.len() {
            for d in 0..inner.src.dir.len() {
                flat.push(self.flat(inner.fwd(p), inner.flat(p, d)));
            }
        }
        Ok(Chart {
            src: inner.src.clone(),
            dst: self.dst.clone(),
            fwd,
            flat,
        })
    }
}

/// Composition pattern `(f, f♯)`: `fwd: pos_A → pos_B`,
/// `sharp: pos_A × dir_B → dir_A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lens {
    pub src: Arena,
    pub dst: Arena,
    fwd: Vec<usize>,
    sharp: Vec<usize>,
}

impl Lens {
    /// `sharp` is indexed `p * dst.dir.len() + d`.
    pub fn new(src: Arena, dst: Arena, fwd: Vec<usize>, sharp: Vec<usize>) -> Result<Self> {
        check_table(&fwd, src.pos.len(), &dst.pos, "lens fwd")?;
        check_table(&sharp, src.pos.len() * dst.dir.len(), &src.dir, "lens sharp")?;
        Ok(Lens { src, dst, fwd, sharp })
    }

    pub fn identity(arena: &Arena) -> Self {
        Lens {
            src: arena.clone(),
            dst: arena.clone(),
            fwd: (0..arena.pos.len()).collect(),
            sharp: (0..arena.pos.len())
                .flat_map(|_| 0..arena.dir.len())
                .collect(),
        }
    }

    pub fn fwd(&self, p: usize) -> usize {
        self.fwd[p]
    }

    pub fn sharp(&self, p: usize, d: usize) -> usize {
        self.sharp[p * self.dst.dir.len() + d]
    }

    pub fn fwd_table(&self) -> &[usize] {
        &self.fwd
    }

    pub fn sharp_table(&self) -> &[usize] {
        &self.sharp
    }
}

fn check_table(table: &[usize], len: usize, codomain: &FinSet, what: &str) -> Result<()> {
    if table.len() != len {
        return Err(Error::Shape(format!(
            "{what} has {} entries, expected {len}",
            table.len()
        )));
    }
    for &v in table {
        codomain.check_index(v, what)?;
    }
    Ok(())
}

/// `g ∘ f` for lenses `f: A ⇸ B`, `g: B ⇸ C`.
pub fn compose_lenses(g: &Lens, f: &Lens) -> Result<Lens> {
    if f.dst != g.src {
        return Err(Error::Composition(
            "target arena of the first lens differs from the source of the second".into(),
        ));
    }
    let fwd: Vec<usize> = f.fwd.iter().map(|&b| g.fwd[b]).collect();
    let mut sharp = Vec::with_capacity(f.src.pos.len() * g.dst.dir.len());
    for p in 0..f.src.pos.len() {
        for d in 0..g.dst.dir.len() {
            sharp.push(f.sharp(p, g.sharp(f.fwd(p), d)));
        }
    }
    Ok(Lens {
        src: f.src.clone(),
        dst: g.dst.clone(),
        fwd,
        sharp,
    })
}

/// Whether `a`, `b` fill the square with lenses `f1` on top and `f2` on the
/// bottom.
pub fn check_lens_chart_square(f1: &Lens, f2: &Lens, a: &Chart, b: &Chart) -> Result<bool> {
    if a.src != f1.src || a.dst != f2.src || b.src != f1.dst || b.dst != f2.dst {
        return Err(Error::Shape("lens-chart square endpoints do not align".into()));
    }
    for p in 0..f1.src.pos.len() {
        if b.fwd(f1.fwd(p)) != f2.fwd(a.fwd(p)) {
            return Ok(false);
        }
        for d in 0..f1.dst.dir.len() {
            let left = a.flat(p, f1.sharp(p, d));
            let right = f2.sharp(a.fwd(p), b.flat(f1.fwd(p), d));
            if left != right {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every total function `{0..n} → {0..m}` as a table, in lexicographic order.
pub(crate) fn all_tables(n: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if m == 0 && n > 0 { 0 } else { (m as u128).pow(n as u32) };
    (0..total).map(move |mut code| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = (code % m as u128) as usize;
            code /= m as u128;
        }
        t
    })
}

/// All arenas with positions and directions drawn from the given sizes.
pub fn small_arenas(max_pos: usize, max_dir: usize) -> Vec<Arena> {
    let mut out = Vec::new();
    for p in 1..=max_pos {
        for d in 1..=max_dir {
            let pos = FinSet::from_names(&(0..p).map(|i| format!("p{i}")).collect::<Vec<_>>()).unwrap();
            let dir = FinSet::from_names(&(0..d).map(|i| format!("d{i}")).collect::<Vec<_>>()).unwrap();
            out.push(Arena::new(pos, dir).unwrap());
        }
    }
    out
}

/// Every lens between two arenas.
pub fn all_lenses(src: &Arena, dst: &Arena) -> Vec<Lens> {
    let mut out = Vec::new();
    for fwd in all_tables(src.pos.len(), dst.pos.len()) {
        for sharp in all_tables(src.pos.len() * dst.dir.len(), src.dir.len()) {
            out.push(Lens {
                src: src.clone(),
                dst: dst.clone(),
                fwd: fwd.clone(),
                sharp,
            });
        }
    }
    out
}

/// Every chart between two arenas.
pub fn all_charts(src: &Arena, dst: &Arena) -> Vec<Chart> {
    let mut out = Vec::new();
    for fwd in all_tables(src.pos.len(), dst.pos.len()) {
        for flat in all_tables(src.pos.len() * src.dir.len(), dst.dir.len()) {
            out.push(Chart {
                src: src.clone(),
                dst: dst.clone(),
                fwd: fwd.clone(),
                flat,
            });
        }
    }
    out
}
