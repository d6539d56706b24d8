//! Types (characteristics) of rank-1 torsion-free groups.
//!
//! A [`TypeRep`] is one height sequence `(t_p)` over all primes, constant on
//! each of finitely many symbolic pieces. Two sequences describe the same
//! type when they differ in finitely many finite entries; that relation is
//! decided by [`TypeRep::equivalent`] rather than by picking a canonical
//! representative.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::prime_set::{PrimeIndexing, SymbolicPrimeSet};

/// `ℕ ∪ {∞}` with `Fin(n) < Inf` for every `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedNat {
    Fin(u32),
    Inf,
}

impl ExtendedNat {
    pub const ZERO: ExtendedNat = ExtendedNat::Fin(0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedNat::Fin(_))
    }

    pub fn is_inf(self) -> bool {
        self == ExtendedNat::Inf
    }

    pub fn is_zero(self) -> bool {
        self == ExtendedNat::ZERO
    }

    /// Finite and nonzero.
    pub fn is_positive_finite(self) -> bool {
        matches!(self, ExtendedNat::Fin(n) if n > 0)
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            ExtendedNat::Fin(n) => Some(n),
            ExtendedNat::Inf => None,
        }
    }
}

impl fmt::Display for ExtendedNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedNat::Fin(n) => write!(f, "{n}"),
            ExtendedNat::Inf => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedNat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// One piece of the common refinement of two types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedPiece {
    pub primes: SymbolicPrimeSet,
    pub left: ExtendedNat,
    pub right: ExtendedNat,
}

/// A piecewise-constant map from primes to `ℕ ∪ {∞}`.
///
/// Normal form: at most one piece per value, no empty pieces, pieces sorted
/// by value. The normal form is unique per sequence, so `==` compares
/// sequences (not types; use [`TypeRep::equivalent`] for that).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeRep {
    indexing: PrimeIndexing,
    pieces: Vec<(SymbolicPrimeSet, ExtendedNat)>,
}

impl TypeRep {
    pub fn constant(indexing: PrimeIndexing, value: ExtendedNat) -> Self {
        TypeRep {
            indexing,
            pieces: vec![(SymbolicPrimeSet::all(indexing), value)],
        }
    }

    /// The type of `ℤ`: zero everywhere.
    pub fn integers(indexing: PrimeIndexing) -> Self {
        Self::constant(indexing, ExtendedNat::ZERO)
    }

    /// The type of `ℚ`: infinite everywhere.
    pub fn rationals(indexing: PrimeIndexing) -> Self {
        Self::constant(indexing, ExtendedNat::Inf)
    }

    /// The type of the localization `ℤ_(q)`: zero at `q`, infinite elsewhere.
    pub fn localization(indexing: PrimeIndexing, q: u64) -> Result<Self> {
        Self::rationals(indexing)
            .with_value_on(&SymbolicPrimeSet::finite(indexing, [q])?, ExtendedNat::ZERO)
    }

    /// Builds a type from pieces that must partition the primes.
    pub fn from_pieces(
        indexing: PrimeIndexing,
        pieces: impl IntoIterator<Item = (SymbolicPrimeSet, ExtendedNat)>,
    ) -> Result<Self> {
        let pieces: Vec<_> = pieces.into_iter().collect();
        let mut covered = SymbolicPrimeSet::empty(indexing);
        for (set, _) in &pieces {
            indexing.ensure_same(set.indexing())?;
            if !covered.is_disjoint(set)? {
                return Err(Error::NotAPartition(format!(
                    "{set} overlaps an earlier piece"
                )));
            }
            covered = covered.union(set)?;
        }
        let missing = covered.complement();
        if !missing.is_empty() {
            return Err(Error::NotAPartition(format!("{missing} is not covered")));
        }
        Ok(Self::normalized(indexing, pieces))
    }

    /// Merges pieces by value. Callers guarantee the pieces partition the primes.
    fn normalized(
        indexing: PrimeIndexing,
        pieces: impl IntoIterator<Item = (SymbolicPrimeSet, ExtendedNat)>,
    ) -> Self {
        let mut merged: Vec<(SymbolicPrimeSet, ExtendedNat)> = Vec::new();
        for (set, value) in pieces {
            if set.is_empty() {
                continue;
            }
            match merged.iter_mut().find(|(_, v)| *v == value) {
                Some((existing, _)) => {
                    *existing = existing.union(&set).expect("same indexing");
                }
                None => merged.push((set, value)),
            }
        }
        merged.sort_by_key(|(_, v)| *v);
        TypeRep {
            indexing,
            pieces: merged,
        }
    }

    /// Copy of `self` with every prime of `set` reassigned to `value`.
    pub fn with_value_on(&self, set: &SymbolicPrimeSet, value: ExtendedNat) -> Result<Self> {
        self.indexing.ensure_same(set.indexing())?;
        let mut pieces = Vec::with_capacity(self.pieces.len() + 1);
        for (piece, v) in &self.pieces {
            pieces.push((piece.difference(set)?, *v));
        }
        pieces.push((set.clone(), value));
        Ok(Self::normalized(self.indexing, pieces))
    }

    pub fn indexing(&self) -> PrimeIndexing {
        self.indexing
    }

    pub fn pieces(&self) -> &[(SymbolicPrimeSet, ExtendedNat)] {
        &self.pieces
    }

    pub fn value_at(&self, p: u64) -> Result<ExtendedNat> {
        for (set, value) in &self.pieces {
            if set.contains(p)? {
                return Ok(*value);
            }
        }
        unreachable!("pieces of a TypeRep cover every prime")
    }

    /// Primes whose value satisfies `pred`.
    pub fn primes_where(&self, pred: impl Fn(ExtendedNat) -> bool) -> SymbolicPrimeSet {
        self.pieces
            .iter()
            .filter(|(_, v)| pred(*v))
            .fold(SymbolicPrimeSet::empty(self.indexing), |acc, (set, _)| {
                acc.union(set).expect("same indexing")
            })
    }

    /// Nonempty pairwise intersections of the pieces of `self` and `other`,
    /// ordered by `(left value, right value)`.
    pub fn refine(&self, other: &TypeRep) -> Result<Vec<RefinedPiece>> {
        self.indexing.ensure_same(other.indexing)?;
        let mut out = Vec::new();
        for (a, left) in &self.pieces {
            for (b, right) in &other.pieces {
                let primes = a.intersect(b)?;
                if !primes.is_empty() {
                    out.push(RefinedPiece {
                        primes,
                        left: *left,
                        right: *right,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Primes where the pair of values satisfies `pred`.
    pub fn primes_where_pair(
        &self,
        other: &TypeRep,
        pred: impl Fn(ExtendedNat, ExtendedNat) -> bool,
    ) -> Result<SymbolicPrimeSet> {
        let mut acc = SymbolicPrimeSet::empty(self.indexing);
        for piece in self.refine(other)? {
            if pred(piece.left, piece.right) {
                acc = acc.union(&piece.primes)?;
            }
        }
        Ok(acc)
    }

    /// Same type: the sequences differ only in finitely many finite entries.
    pub fn equivalent(&self, other: &TypeRep) -> Result<bool> {
        let differ = self.primes_where_pair(other, |a, b| a != b)?;
        if differ.is_infinite() {
            return Ok(false);
        }
        let differ_at_inf =
            self.primes_where_pair(other, |a, b| a != b && (a.is_inf() || b.is_inf()))?;
        Ok(differ_at_inf.is_empty())
    }

    /// `self ≤ other` on types: the excess set is finite and never at an
    /// infinite entry of `self`.
    pub fn leq(&self, other: &TypeRep) -> Result<bool> {
        let bad = self.primes_where_pair(other, |a, b| a > b)?;
        if bad.is_infinite() {
            return Ok(false);
        }
        let bad_at_inf = self.primes_where_pair(other, |a, b| a > b && a.is_inf())?;
        Ok(bad_at_inf.is_empty())
    }

    pub fn strictly_less(&self, other: &TypeRep) -> Result<bool> {
        Ok(self.leq(other)? && !other.leq(self)?)
    }

    pub fn incomparable(&self, other: &TypeRep) -> Result<bool> {
        Ok(!self.leq(other)? && !other.leq(self)?)
    }

    fn pointwise(
        &self,
        other: &TypeRep,
        f: impl Fn(ExtendedNat, ExtendedNat) -> ExtendedNat,
    ) -> Result<TypeRep> {
        let pieces = self
            .refine(other)?
            .into_iter()
            .map(|piece| (piece.primes, f(piece.left, piece.right)));
        Ok(Self::normalized(self.indexing, pieces))
    }

    /// Pointwise maximum.
    pub fn join(&self, other: &TypeRep) -> Result<TypeRep> {
        self.pointwise(other, Ord::max)
    }

    /// Pointwise minimum.
    pub fn meet(&self, other: &TypeRep) -> Result<TypeRep> {
        self.pointwise(other, Ord::min)
    }

    /// Representative of `self`'s type lying pointwise below `other`.
    ///
    /// Only the finitely many finite excess entries change, so the result is
    /// equivalent to `self`.
    pub fn normalize_below(&self, other: &TypeRep) -> Result<TypeRep> {
        if !self.leq(other)? {
            return Err(Error::NotLeq);
        }
        self.meet(other)
    }

    /// Whether `self ≤ other` holds entry by entry (no equivalence slack).
    pub fn pointwise_leq(&self, other: &TypeRep) -> Result<bool> {
        Ok(self.primes_where_pair(other, |a, b| a > b)?.is_empty())
    }

    /// Compare two types as elements of the type lattice.
    pub fn compare(&self, other: &TypeRep) -> Result<Option<Ordering>> {
        Ok(match (self.leq(other)?, other.leq(self)?) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        })
    }
}

/// `(τ, ρ) ↦ (τ′, ρ)` with `τ′ ≡ τ` and `τ′ ≤ ρ` pointwise.
pub fn normalize_pair(tau: &TypeRep, rho: &TypeRep) -> Result<(TypeRep, TypeRep)> {
    Ok((tau.normalize_below(rho)?, rho.clone()))
}

impl fmt::Display for TypeRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::render_type(self))
    }
}

impl Serialize for TypeRep {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
