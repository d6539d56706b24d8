//! Ext-vanishing between rank-1 groups and completely decomposable groups.
//!
//! Two routes decide `Ext(T, X) = 0` for rank-1 `T`, `X`:
//!
//! * [`ext_vanishes_rank1`] evaluates the height criterion directly: `X` must
//!   be `p`-divisible for all but finitely many `p` with `0 < t_p < ∞` and for
//!   every `p` with `t_p = ∞`.
//! * [`quotient_shape`] + [`vanishes_via_shape`] describe the product of local
//!   quotients `X/p^{t_p}X` (or `Ext(Z_{p^∞}, X)` at infinite heights) prime by
//!   prime and ask whether that product can be countable.

use serde::Serialize;

use crate::error::Result;
use crate::prime_set::SymbolicPrimeSet;
use crate::types::{ExtendedNat, TypeRep};

/// Ext-vanishing by the height criterion.
pub fn ext_vanishes_rank1(t: &TypeRep, x: &TypeRep) -> Result<bool> {
    t.indexing().ensure_same(x.indexing())?;
    let not_divisible = x.primes_where(ExtendedNat::is_finite);

    let finite_heights = t.primes_where(ExtendedNat::is_positive_finite);
    if finite_heights.intersect(&not_divisible)?.is_infinite() {
        return Ok(false);
    }
    let infinite_heights = t.primes_where(ExtendedNat::is_inf);
    Ok(infinite_heights.intersect(&not_divisible)?.is_empty())
}

/// Local component of the cotorsion quotient at a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeKind {
    Trivial,
    /// `X/p^e X`, cyclic of order `p^e`.
    Cyclic {
        exponent: u32,
    },
    /// Contains a copy of the `p`-adic integers.
    PadicCopy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeComponent {
    pub kind: ShapeKind,
    pub primes: SymbolicPrimeSet,
}

/// Components of `∏_p X_p^τ`, grouped by kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CotorsionQuotientShape {
    pub components: Vec<ShapeComponent>,
}

impl CotorsionQuotientShape {
    pub fn primes_of(&self, kind: ShapeKind) -> Option<&SymbolicPrimeSet> {
        self.components
            .iter()
            .find(|c| c.kind == kind)
            .map(|c| &c.primes)
    }
}

fn local_kind(t: ExtendedNat, x: ExtendedNat) -> ShapeKind {
    match (t, x) {
        (_, ExtendedNat::Inf) => ShapeKind::Trivial,
        (ExtendedNat::Inf, ExtendedNat::Fin(_)) => ShapeKind::PadicCopy,
        (ExtendedNat::Fin(0), _) => ShapeKind::Trivial,
        (ExtendedNat::Fin(e), ExtendedNat::Fin(_)) => ShapeKind::Cyclic { exponent: e },
    }
}

/// Shape of the quotient of `X` by its `τ`-heights, piece by piece.
pub fn quotient_shape(x: &TypeRep, tau: &TypeRep) -> Result<CotorsionQuotientShape> {
    let mut components: Vec<ShapeComponent> = Vec::new();
    for piece in tau.refine(x)? {
        let kind = local_kind(piece.left, piece.right);
        match components.iter_mut().find(|c| c.kind == kind) {
            Some(c) => c.primes = c.primes.union(&piece.primes)?,
            None => components.push(ShapeComponent {
                kind,
                primes: piece.primes,
            }),
        }
    }
    components.sort_by_key(|c| c.kind);
    Ok(CotorsionQuotientShape { components })
}

/// The product of local components is countable exactly when there is no
/// `p`-adic copy and only finitely many nonzero cyclic factors.
pub fn vanishes_via_shape(shape: &CotorsionQuotientShape) -> bool {
    shape
        .components
        .iter()
        .all(|component| match component.kind {
            ShapeKind::Trivial => true,
            ShapeKind::PadicCopy => component.primes.is_empty(),
            ShapeKind::Cyclic { .. } => component.primes.is_finite(),
        })
}

/// Cardinality class of `Ext(T, X)` for rank-1 groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ExtClass {
    Zero,
    Continuum,
}

pub fn ext_class(t: &TypeRep, x: &TypeRep) -> Result<ExtClass> {
    Ok(if ext_vanishes_rank1(t, x)? {
        ExtClass::Zero
    } else {
        ExtClass::Continuum
    })
}

/// A finite direct sum of rank-1 groups, given by the types of its summands.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CompletelyDecomposable {
    pub summands: Vec<TypeRep>,
}

impl CompletelyDecomposable {
    pub fn new(summands: Vec<TypeRep>) -> Self {
        CompletelyDecomposable { summands }
    }

    pub fn rank(&self) -> usize {
        self.summands.len()
    }
}

impl From<TypeRep> for CompletelyDecomposable {
    fn from(t: TypeRep) -> Self {
        CompletelyDecomposable { summands: vec![t] }
    }
}

/// Ext is additive in both arguments over finite direct sums.
pub fn ext_vanishes_cd(t: &CompletelyDecomposable, x: &CompletelyDecomposable) -> Result<bool> {
    for ts in &t.summands {
        for xs in &x.summands {
            if !ext_vanishes_rank1(ts, xs)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime_set::PrimeIndexing;
    use ExtendedNat::{Fin, Inf};

    fn ix() -> PrimeIndexing {
        PrimeIndexing::new(16).unwrap()
    }
    fn z() -> TypeRep {
        TypeRep::integers(ix())
    }
    fn q() -> TypeRep {
        TypeRep::rationals(ix())
    }

    #[test]
    fn free_first_argument_always_vanishes() {
        for x in [z(), q(), TypeRep::localization(ix(), 7).unwrap()] {
            assert!(ext_vanishes_rank1(&z(), &x).unwrap());
            assert_eq!(ext_class(&z(), &x).unwrap(), ExtClass::Zero);
        }
    }

    #[test]
    fn rationals_against_integers() {
        assert!(!ext_vanishes_rank1(&q(), &z()).unwrap());
        assert_eq!(ext_class(&q(), &z()).unwrap(), ExtClass::Continuum);
    }

    #[test]
    fn localization_separates_infinite_jump() {
        let q_prime = 13;
        let x = TypeRep::localization(ix(), q_prime).unwrap();
        let at_q = SymbolicPrimeSet::finite(ix(), [q_prime]).unwrap();
        let rho = q();
        let tau = q().with_value_on(&at_q, Fin(2)).unwrap();
        assert!(!ext_vanishes_rank1(&rho, &x).unwrap());
        assert!(ext_vanishes_rank1(&tau, &x).unwrap());
    }

    #[test]
    fn finite_heights_everywhere_give_continuum() {
        let one = TypeRep::constant(ix(), Fin(1));
        assert_eq!(ext_class(&one, &z()).unwrap(), ExtClass::Continuum);
    }

    #[test]
    fn shape_of_divisible_group_is_trivial() {
        let tau = TypeRep::constant(ix(), Fin(3))
            .with_value_on(&SymbolicPrimeSet::cell(ix(), 2).unwrap(), Inf)
            .unwrap();
        let shape = quotient_shape(&q(), &tau).unwrap();
        assert_eq!(shape.components.len(), 1);
        assert_eq!(shape.components[0].kind, ShapeKind::Trivial);
        assert!(vanishes_via_shape(&shape));
    }

    #[test]
    fn shape_single_cyclic_factor() {
        let tau = z()
            .with_value_on(&SymbolicPrimeSet::finite(ix(), [2]).unwrap(), Fin(3))
            .unwrap();
        let shape = quotient_shape(&z(), &tau).unwrap();
        let cyclic = shape.primes_of(ShapeKind::Cyclic { exponent: 3 }).unwrap();
        assert_eq!(cyclic.elements(), Some(vec![2]));
        assert_eq!(shape.components.len(), 2);
        assert!(vanishes_via_shape(&shape));
    }

    #[test]
    fn shape_padic_everywhere() {
        let shape = quotient_shape(&z(), &q()).unwrap();
        assert_eq!(shape.components.len(), 1);
        assert_eq!(shape.components[0].kind, ShapeKind::PadicCopy);
        assert!(shape.components[0].primes.is_cofinite());
        assert!(!vanishes_via_shape(&shape));
    }

    #[test]
    fn shape_cyclic_on_infinite_cell_obstructs() {
        let tau = z()
            .with_value_on(&SymbolicPrimeSet::cell(ix(), 5).unwrap(), Fin(1))
            .unwrap();
        let shape = quotient_shape(&z(), &tau).unwrap();
        assert!(!vanishes_via_shape(&shape));
    }

    #[test]
    fn single_padic_prime_obstructs() {
        let tau = z()
            .with_value_on(&SymbolicPrimeSet::finite(ix(), [3]).unwrap(), Inf)
            .unwrap();
        let shape = quotient_shape(&z(), &tau).unwrap();
        assert_eq!(
            shape.primes_of(ShapeKind::PadicCopy).unwrap().elements(),
            Some(vec![3])
        );
        assert!(!vanishes_via_shape(&shape));
    }

    #[test]
    fn completely_decomposable_examples() {
        let t = CompletelyDecomposable::new(vec![q()]);
        let x = CompletelyDecomposable::new(vec![z(), q()]);
        assert!(!ext_vanishes_cd(&t, &x).unwrap());

        let free = CompletelyDecomposable::new(vec![z(), z()]);
        assert!(ext_vanishes_cd(&free, &x).unwrap());

        let tau = TypeRep::localization(ix(), 5).unwrap();
        let xs = TypeRep::localization(ix(), 7).unwrap();
        assert_eq!(
            ext_vanishes_cd(&tau.clone().into(), &xs.clone().into()).unwrap(),
            ext_vanishes_rank1(&tau, &xs).unwrap()
        );

        let empty = CompletelyDecomposable::default();
        assert!(ext_vanishes_cd(&empty, &x).unwrap());
        assert!(ext_vanishes_cd(&t, &empty).unwrap());
    }

    #[test]
    fn mixed_indexing_rejected() {
        let other = TypeRep::integers(PrimeIndexing::new(3).unwrap());
        assert!(ext_vanishes_rank1(&q(), &other).is_err());
        assert!(quotient_shape(&other, &q()).is_err());
    }
}
