//! A closed, decidable algebra of prime sets.
//!
//! Primes are split into `k` infinite cells by their position in the prime
//! sequence: cell `i` holds every `p_j` with `j ≡ i (mod k)`. A
//! [`SymbolicPrimeSet`] is a union of cells corrected by finitely many
//! explicit primes, which is enough to express finite sets, cofinite sets
//! and any finite family of pairwise disjoint infinite sets.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::{self, Primes};

pub const DEFAULT_MODULUS: usize = 16;

/// Partition of the primes into `modulus` residue cells of the prime index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PrimeIndexing {
    modulus: usize,
}

impl PrimeIndexing {
    pub fn new(modulus: usize) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidModulus);
        }
        Ok(PrimeIndexing { modulus })
    }

    pub fn modulus(self) -> usize {
        self.modulus
    }

    /// Cell containing the prime `p`.
    pub fn cell_of(self, p: u64) -> Result<usize> {
        primes::prime_index(p)
            .map(|j| j % self.modulus)
            .ok_or(Error::NotPrime(p))
    }

    fn check_cell(self, cell: usize) -> Result<usize> {
        if cell < self.modulus {
            Ok(cell)
        } else {
            Err(Error::CellOutOfRange {
                cell,
                modulus: self.modulus,
            })
        }
    }

    pub(crate) fn ensure_same(self, other: PrimeIndexing) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::IndexingMismatch {
                left: self.modulus,
                right: other.modulus,
            })
        }
    }
}

impl Default for PrimeIndexing {
    fn default() -> Self {
        PrimeIndexing {
            modulus: DEFAULT_MODULUS,
        }
    }
}

/// `(⋃ cells ∪ plus) \ minus`, kept normalized: `plus` lies outside the
/// cells and `minus` inside them. The normal form is unique, so structural
/// equality is equality of denotations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SymbolicPrimeSet {
    indexing: PrimeIndexing,
    cells: BTreeSet<usize>,
    plus: BTreeSet<u64>,
    minus: BTreeSet<u64>,
}

impl SymbolicPrimeSet {
    pub fn empty(indexing: PrimeIndexing) -> Self {
        SymbolicPrimeSet {
            indexing,
            cells: BTreeSet::new(),
            plus: BTreeSet::new(),
            minus: BTreeSet::new(),
        }
    }

    pub fn all(indexing: PrimeIndexing) -> Self {
        SymbolicPrimeSet {
            indexing,
            cells: (0..indexing.modulus()).collect(),
            plus: BTreeSet::new(),
            minus: BTreeSet::new(),
        }
    }

    pub fn cell(indexing: PrimeIndexing, cell: usize) -> Result<Self> {
        Self::from_cells(indexing, [cell])
    }

    pub fn from_cells(
        indexing: PrimeIndexing,
        cells: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let cells = cells
            .into_iter()
            .map(|c| indexing.check_cell(c))
            .collect::<Result<_>>()?;
        Ok(SymbolicPrimeSet {
            indexing,
            cells,
            plus: BTreeSet::new(),
            minus: BTreeSet::new(),
        })
    }

    /// A finite set of explicitly listed primes.
    pub fn finite(indexing: PrimeIndexing, primes: impl IntoIterator<Item = u64>) -> Result<Self> {
        Self::new(indexing, [], primes, [])
    }

    /// Builds and normalizes `(⋃ cells ∪ plus) \ minus`.
    pub fn new(
        indexing: PrimeIndexing,
        cells: impl IntoIterator<Item = usize>,
        plus: impl IntoIterator<Item = u64>,
        minus: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        let mut set = Self::from_cells(indexing, cells)?;
        let minus: BTreeSet<u64> = minus.into_iter().collect();
        for p in plus {
            let cell = indexing.cell_of(p)?;
            if !set.cells.contains(&cell) && !minus.contains(&p) {
                set.plus.insert(p);
            }
        }
        for p in minus {
            let cell = indexing.cell_of(p)?;
            if set.cells.contains(&cell) {
                set.minus.insert(p);
            }
        }
        Ok(set)
    }

    pub fn indexing(&self) -> PrimeIndexing {
        self.indexing
    }

    pub fn cells(&self) -> &BTreeSet<usize> {
        &self.cells
    }

    /// Explicit primes added outside the cells.
    pub fn plus(&self) -> &BTreeSet<u64> {
        &self.plus
    }

    /// Explicit primes removed from the cells.
    pub fn minus(&self) -> &BTreeSet<u64> {
        &self.minus
    }

    /// Membership of `p`; rejects non-primes.
    pub fn contains(&self, p: u64) -> Result<bool> {
        let cell = self.indexing.cell_of(p)?;
        Ok(self.contains_in_cell(p, cell))
    }

    fn contains_in_cell(&self, p: u64, cell: usize) -> bool {
        if self.cells.contains(&cell) {
            !self.minus.contains(&p)
        } else {
            self.plus.contains(&p)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty() && self.plus.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    /// Whether the complement is finite.
    pub fn is_cofinite(&self) -> bool {
        self.cells.len() == self.indexing.modulus()
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        SymbolicPrimeSet {
            indexing: self.indexing,
            cells: (0..self.indexing.modulus())
                .filter(|c| !self.cells.contains(c))
                .collect(),
            plus: self.minus.clone(),
            minus: self.plus.clone(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        Ok(self.intersect(other)?.is_empty())
    }

    /// Pointwise boolean combination. Away from the explicit primes of either
    /// operand, membership only depends on the cell, so the cells of the
    /// result follow from `op` on cells and only the explicit primes need to
    /// be re-examined.
    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self> {
        self.indexing.ensure_same(other.indexing)?;
        let cells: BTreeSet<usize> = (0..self.indexing.modulus())
            .filter(|c| op(self.cells.contains(c), other.cells.contains(c)))
            .collect();
        let mut plus = BTreeSet::new();
        let mut minus = BTreeSet::new();
        let explicit = self
            .plus
            .iter()
            .chain(&self.minus)
            .chain(&other.plus)
            .chain(&other.minus);
        for &p in explicit {
            let cell = self.indexing.cell_of(p)?;
            let member = op(
                self.contains_in_cell(p, cell),
                other.contains_in_cell(p, cell),
            );
            match (member, cells.contains(&cell)) {
                (true, false) => {
                    plus.insert(p);
                }
                (false, true) => {
                    minus.insert(p);
                }
                _ => {}
            }
        }
        Ok(SymbolicPrimeSet {
            indexing: self.indexing,
            cells,
            plus,
            minus,
        })
    }

    /// Members in increasing order; infinite for infinite sets.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let modulus = self.indexing.modulus();
        let finite = self.is_finite();
        let listed = finite.then(|| self.plus.iter().copied());
        let scanned = (!finite).then(|| {
            Primes::default()
                .filter(move |&(j, p)| self.contains_in_cell(p, j % modulus))
                .map(|(_, p)| p)
        });
        listed
            .into_iter()
            .flatten()
            .chain(scanned.into_iter().flatten())
    }

    /// Least member, if any.
    pub fn least(&self) -> Option<u64> {
        self.iter().next()
    }

    /// Members as an explicit list; `None` for infinite sets.
    pub fn elements(&self) -> Option<Vec<u64>> {
        self.is_finite()
            .then(|| self.plus.iter().copied().collect())
    }
}

impl fmt::Display for SymbolicPrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &mut dyn Iterator<Item = String>| xs.collect::<Vec<_>>().join(",");
        let mut parts = Vec::new();
        if self.is_cofinite() {
            parts.push("all".to_string());
        } else if !self.cells.is_empty() {
            parts.push(format!(
                "cells[{}] mod {}",
                join(&mut self.cells.iter().map(|c| c.to_string())),
                self.indexing.modulus()
            ));
        }
        if !self.plus.is_empty() || self.cells.is_empty() {
            parts.push(format!(
                "{{{}}}",
                join(&mut self.plus.iter().map(|p| p.to_string()))
            ));
        }
        let mut out = parts.join(" ∪ ");
        if !self.minus.is_empty() {
            out.push_str(&format!(
                " \\ {{{}}}",
                join(&mut self.minus.iter().map(|p| p.to_string()))
            ));
        }
        f.write_str(&out)
    }
}
