//! Order embeddings of finite posets into the lattice of types.
//!
//! A subset `X ⊆ {0..n-1}` is sent to the type that is infinite on the
//! union of the prime cells indexed by `X` and zero elsewhere. Distinct cells
//! are disjoint and infinite, so inclusion of subsets and the order of their
//! images agree in both directions. A general poset goes through its
//! principal down-sets first.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prime_set::{PrimeIndexing, SymbolicPrimeSet};
use crate::separation::{separate, SeparationReport, VerificationBudget};
use crate::types::{ExtendedNat, TypeRep};

/// A partial order on `{0..n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    n: usize,
    /// `rel[a][b]` iff `a ≤ b`.
    rel: Vec<Vec<bool>>,
}

/// On-disk form: `{ "n": 3, "le": [[0, 1], [1, 2]] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetFile {
    pub n: usize,
    pub le: Vec<[usize; 2]>,
}

impl FinitePoset {
    /// Validates a full relation matrix.
    pub fn from_relation(rel: Vec<Vec<bool>>) -> Result<Self> {
        let n = rel.len();
        if rel.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidPoset("relation matrix is not square".into()));
        }
        for a in 0..n {
            if !rel[a][a] {
                return Err(Error::InvalidPoset(format!("{a} ≤ {a} missing")));
            }
            for b in 0..n {
                if a != b && rel[a][b] && rel[b][a] {
                    return Err(Error::InvalidPoset(format!(
                        "{a} and {b} violate antisymmetry"
                    )));
                }
                for c in 0..n {
                    if rel[a][b] && rel[b][c] && !rel[a][c] {
                        return Err(Error::InvalidPoset(format!(
                            "{a} ≤ {b} ≤ {c} but not {a} ≤ {c}"
                        )));
                    }
                }
            }
        }
        Ok(FinitePoset { n, rel })
    }

    /// Reflexive-transitive closure of the listed pairs; rejects cycles.
    pub fn from_pairs(n: usize, le: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut rel = vec![vec![false; n]; n];
        for (a, row) in rel.iter_mut().enumerate() {
            row[a] = true;
        }
        for (a, b) in le {
            if a >= n || b >= n {
                return Err(Error::InvalidPoset(format!(
                    "pair ({a}, {b}) out of range for n = {n}"
                )));
            }
            rel[a][b] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if rel[i][k] {
                    let row = rel[k].clone();
                    for (cell, reach) in rel[i].iter_mut().zip(row) {
                        *cell |= reach;
                    }
                }
            }
        }
        Self::from_relation(rel)
    }

    pub fn from_file(file: &PosetFile) -> Result<Self> {
        Self::from_pairs(file.n, file.le.iter().map(|&[a, b]| (a, b)))
    }

    pub fn chain(n: usize) -> Self {
        Self::from_pairs(n, (1..n).map(|i| (i - 1, i))).expect("chains are posets")
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_pairs(n, []).expect("antichains are posets")
    }

    /// `(P({0..n-1}), ⊆)` with subsets encoded as bitmasks.
    pub fn powerset(n: usize) -> Self {
        let size = 1usize << n;
        let rel = (0..size)
            .map(|a| (0..size).map(|b| a & !b == 0).collect())
            .collect();
        FinitePoset { n: size, rel }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.rel[a][b]
    }

    /// Elements below `a`, including `a`.
    pub fn down_set(&self, a: usize) -> BTreeSet<usize> {
        (0..self.n).filter(|&b| self.rel[b][a]).collect()
    }

    /// Pairs `a < b` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if a == b || !self.rel[a][b] {
                    continue;
                }
                let between =
                    (0..self.n).any(|c| c != a && c != b && self.rel[a][c] && self.rel[c][b]);
                if !between {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn to_file(&self) -> PosetFile {
        let le = self.covers().into_iter().map(|(a, b)| [a, b]).collect();
        PosetFile { n: self.n, le }
    }
}

/// Images of the poset elements, element `i` at position `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub indexing: PrimeIndexing,
    pub assignment: Vec<TypeRep>,
}

/// The type that is infinite exactly on the cells listed in `subset`.
pub fn subset_type(
    indexing: PrimeIndexing,
    subset: impl IntoIterator<Item = usize>,
) -> Result<TypeRep> {
    let cells = SymbolicPrimeSet::from_cells(indexing, subset)?;
    TypeRep::integers(indexing).with_value_on(&cells, ExtendedNat::Inf)
}

fn check_room(needed: usize, indexing: PrimeIndexing) -> Result<()> {
    if indexing.modulus() < needed {
        return Err(Error::ModulusTooSmall {
            needed,
            modulus: indexing.modulus(),
        });
    }
    Ok(())
}

fn bits(mask: usize, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |i| mask >> i & 1 == 1)
}

/// Embeds `(P({0..n-1}), ⊆)`; the subset with bitmask `m` maps to position `m`.
pub fn powerset_embed(n: usize, indexing: PrimeIndexing) -> Result<Embedding> {
    if n == 0 {
        return Err(Error::InvalidPoset(
            "power set of the empty set needs n ≥ 1".into(),
        ));
    }
    check_room(n, indexing)?;
    let assignment = (0..1usize << n)
        .map(|mask| subset_type(indexing, bits(mask, n)))
        .collect::<Result<_>>()?;
    Ok(Embedding {
        indexing,
        assignment,
    })
}

/// Sends each element to the image of its principal down-set.
pub fn poset_embed(poset: &FinitePoset, indexing: PrimeIndexing) -> Result<Embedding> {
    check_room(poset.len(), indexing)?;
    let assignment = (0..poset.len())
        .map(|a| subset_type(indexing, poset.down_set(a)))
        .collect::<Result<_>>()?;
    Ok(Embedding {
        indexing,
        assignment,
    })
}

/// `a ≤ b ⟺ e(a) ≤ e(b)` over all ordered pairs.
pub fn verify_embedding(embedding: &Embedding, poset: &FinitePoset) -> bool {
    if embedding.assignment.len() != poset.len() {
        return false;
    }
    let n = poset.len();
    (0..n * n).into_par_iter().all(|i| {
        let (a, b) = (i / n, i % n);
        embedding.assignment[a]
            .leq(&embedding.assignment[b])
            .is_ok_and(|leq| leq == poset.le(a, b))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverRecord {
    pub lower: usize,
    pub upper: usize,
    pub separation: SeparationReport,
}

/// Separations for every cover of the poset and the incomparable pairs.
///
/// Images under the cotorsion map are ordered the other way round: a
/// verified witness for `e(a) < e(b)` lies in `e(a)`'s cotorsion class but
/// not in `e(b)`'s.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CotorsionImageReport {
    pub covers: Vec<CoverRecord>,
    /// Unordered pairs `a < b` (by index) with neither image below the other.
    pub incomparable: Vec<(usize, usize)>,
    pub all_verified: bool,
}

pub fn cotorsion_image_report(
    embedding: &Embedding,
    poset: &FinitePoset,
    budget: VerificationBudget,
) -> Result<CotorsionImageReport> {
    if embedding.assignment.len() != poset.len() {
        return Err(Error::EmbeddingMismatch(format!(
            "{} images for {} elements",
            embedding.assignment.len(),
            poset.len()
        )));
    }
    let images = &embedding.assignment;
    let covers = poset
        .covers()
        .into_par_iter()
        .map(|(lower, upper)| {
            let separation = separate(&images[lower], &images[upper], budget)?;
            Ok(CoverRecord {
                lower,
                upper,
                separation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = poset.len();
    let mut incomparable = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if images[a].incomparable(&images[b])? {
                incomparable.push((a, b));
            }
        }
    }
    let all_verified = covers.iter().all(|c| c.separation.verified);
    Ok(CotorsionImageReport {
        covers,
        incomparable,
        all_verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separation::{StrictCase, Witness};

    fn ix() -> PrimeIndexing {
        PrimeIndexing::new(16).unwrap()
    }

    #[test]
    fn empty_subset_is_integers() {
        let e = powerset_embed(2, ix()).unwrap();
        assert_eq!(e.assignment[0], TypeRep::integers(ix()));
        assert!(e.assignment[0b01].leq(&e.assignment[0b11]).unwrap());
        assert!(e.assignment[0b01]
            .incomparable(&e.assignment[0b10])
            .unwrap());
    }

    #[test]
    fn powerset_three_verified() {
        let e = powerset_embed(3, ix()).unwrap();
        assert!(verify_embedding(&e, &FinitePoset::powerset(3)));
    }

    #[test]
    fn modulus_too_small_rejected() {
        let small = PrimeIndexing::new(2).unwrap();
        assert_eq!(
            powerset_embed(3, small),
            Err(Error::ModulusTooSmall {
                needed: 3,
                modulus: 2
            })
        );
        assert!(poset_embed(&FinitePoset::chain(3), small).is_err());
    }

    #[test]
    fn antichain_images_pairwise_incomparable() {
        let p = FinitePoset::antichain(3);
        let e = poset_embed(&p, ix()).unwrap();
        assert!(verify_embedding(&e, &p));
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    assert!(e.assignment[a].incomparable(&e.assignment[b]).unwrap());
                }
            }
        }
    }

    #[test]
    fn chain_images_strictly_ascend() {
        let p = FinitePoset::chain(3);
        let e = poset_embed(&p, ix()).unwrap();
        assert!(verify_embedding(&e, &p));
        assert!(e.assignment[0].strictly_less(&e.assignment[1]).unwrap());
        assert!(e.assignment[1].strictly_less(&e.assignment[2]).unwrap());
    }

    #[test]
    fn single_element() {
        let p = FinitePoset::antichain(1);
        let e = poset_embed(&p, ix()).unwrap();
        assert!(verify_embedding(&e, &p));
        let e = powerset_embed(1, ix()).unwrap();
        assert!(verify_embedding(&e, &FinitePoset::powerset(1)));
    }

    #[test]
    fn swapped_chain_fails_verification() {
        let p = FinitePoset::chain(3);
        let mut e = poset_embed(&p, ix()).unwrap();
        e.assignment.swap(0, 2);
        assert!(!verify_embedding(&e, &p));
    }

    #[test]
    fn poset_validation() {
        assert!(FinitePoset::from_pairs(2, [(0, 1), (1, 0)]).is_err());
        assert!(FinitePoset::from_pairs(2, [(0, 2)]).is_err());
        let p = FinitePoset::from_pairs(3, [(0, 1), (1, 2)]).unwrap();
        assert!(p.le(0, 2));
        assert!(!p.le(2, 0));
        let bad = vec![vec![true, true], vec![false, false]];
        assert!(FinitePoset::from_relation(bad).is_err());
        let intransitive = vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ];
        assert!(FinitePoset::from_relation(intransitive).is_err());
    }

    #[test]
    fn covers_of_diamond() {
        let p = FinitePoset::from_pairs(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(p.covers(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(FinitePoset::from_file(&p.to_file()).unwrap(), p);
    }

    #[test]
    fn chain_report_uses_rank_one_witnesses() {
        let p = FinitePoset::chain(2);
        let e = poset_embed(&p, ix()).unwrap();
        let report = cotorsion_image_report(&e, &p, VerificationBudget::default()).unwrap();
        assert_eq!(report.covers.len(), 1);
        let sep = &report.covers[0].separation;
        assert!(sep.cases.contains(&StrictCase::InfJump));
        assert!(matches!(sep.witness, Witness::RankOne { .. }));
        assert!(report.all_verified);
        assert!(report.incomparable.is_empty());
    }

    #[test]
    fn antichain_report_records_incomparability_only() {
        let p = FinitePoset::antichain(2);
        let e = poset_embed(&p, ix()).unwrap();
        let report = cotorsion_image_report(&e, &p, VerificationBudget::default()).unwrap();
        assert!(report.covers.is_empty());
        assert_eq!(report.incomparable, vec![(0, 1)]);
        assert!(report.all_verified);
    }
}
