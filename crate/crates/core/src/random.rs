//! Seeded generators for property checks.
//!
//! Random types use at most `max_pieces` distinct values, assigned cell by
//! cell, with a few explicit-prime overrides drawn from the first primes.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ext::CompletelyDecomposable;
use crate::prime_set::{PrimeIndexing, SymbolicPrimeSet};
use crate::primes;
use crate::types::{ExtendedNat, TypeRep};

/// Explicit overrides are drawn from this many leading primes.
pub const EXCEPTION_POOL: usize = 30;

#[derive(Debug, Clone, Copy)]
pub struct TypeShape {
    pub max_pieces: usize,
    pub max_finite: u32,
    pub max_exceptions: usize,
}

impl Default for TypeShape {
    fn default() -> Self {
        TypeShape {
            max_pieces: 4,
            max_finite: 3,
            max_exceptions: 3,
        }
    }
}

pub fn random_indexing<R: Rng>(rng: &mut R, max_modulus: usize) -> PrimeIndexing {
    PrimeIndexing::new(rng.gen_range(1..=max_modulus)).expect("modulus ≥ 1")
}

fn pool_prime<R: Rng>(rng: &mut R) -> u64 {
    primes::nth_prime(rng.gen_range(0..EXCEPTION_POOL))
}

pub fn random_set<R: Rng>(rng: &mut R, indexing: PrimeIndexing) -> SymbolicPrimeSet {
    let cells: Vec<usize> = (0..indexing.modulus())
        .filter(|_| rng.gen_bool(0.4))
        .collect();
    let plus: Vec<u64> = (0..rng.gen_range(0..4)).map(|_| pool_prime(rng)).collect();
    let minus: Vec<u64> = (0..rng.gen_range(0..4)).map(|_| pool_prime(rng)).collect();
    SymbolicPrimeSet::new(indexing, cells, plus, minus).expect("valid cells and primes")
}

fn random_value<R: Rng>(rng: &mut R, max_finite: u32) -> ExtendedNat {
    if rng.gen_bool(0.25) {
        ExtendedNat::Inf
    } else {
        ExtendedNat::Fin(rng.gen_range(0..=max_finite))
    }
}

pub fn random_type<R: Rng>(rng: &mut R, indexing: PrimeIndexing, shape: TypeShape) -> TypeRep {
    let wanted = rng.gen_range(1..=shape.max_pieces.max(1));
    let mut values = Vec::with_capacity(wanted);
    for _ in 0..wanted * 4 {
        if values.len() == wanted {
            break;
        }
        let v = random_value(rng, shape.max_finite);
        if !values.contains(&v) {
            values.push(v);
        }
    }
    let base = values[0];
    let mut ty = TypeRep::constant(indexing, base);
    for cell in 0..indexing.modulus() {
        let v = *values.choose(rng).expect("nonempty");
        if v != base {
            let set = SymbolicPrimeSet::cell(indexing, cell).expect("cell in range");
            ty = ty.with_value_on(&set, v).expect("same indexing");
        }
    }
    for _ in 0..rng.gen_range(0..=shape.max_exceptions) {
        let set = SymbolicPrimeSet::finite(indexing, [pool_prime(rng)]).expect("prime");
        let v = *values.choose(rng).expect("nonempty");
        ty = ty.with_value_on(&set, v).expect("same indexing");
    }
    ty
}

/// An equivalent type: a few finite entries among the pool primes replaced
/// by other finite values.
pub fn perturb_finite<R: Rng>(rng: &mut R, ty: &TypeRep, count: usize, max_finite: u32) -> TypeRep {
    let mut out = ty.clone();
    for _ in 0..count {
        let p = pool_prime(rng);
        if out.value_at(p).expect("prime").is_finite() {
            let set = SymbolicPrimeSet::finite(ty.indexing(), [p]).expect("prime");
            let v = ExtendedNat::Fin(rng.gen_range(0..=max_finite + 2));
            out = out.with_value_on(&set, v).expect("same indexing");
        }
    }
    out
}

/// `(τ, ρ)` with `τ ≤ ρ` in the type order, `τ` usually not pointwise below `ρ`.
pub fn random_leq_pair<R: Rng>(
    rng: &mut R,
    indexing: PrimeIndexing,
    shape: TypeShape,
) -> (TypeRep, TypeRep) {
    let rho = random_type(rng, indexing, shape);
    let other = random_type(rng, indexing, shape);
    let tau = other.meet(&rho).expect("same indexing");
    let count = rng.gen_range(0..=2);
    (perturb_finite(rng, &tau, count, shape.max_finite), rho)
}

/// `(τ, ρ)` with `τ < ρ`.
pub fn random_strict_pair<R: Rng>(
    rng: &mut R,
    indexing: PrimeIndexing,
    shape: TypeShape,
) -> (TypeRep, TypeRep) {
    loop {
        let (tau, rho) = random_leq_pair(rng, indexing, shape);
        if tau.strictly_less(&rho).expect("same indexing") {
            return (tau, rho);
        }
    }
}

/// A strict pair whose only separating pattern is infinitely many primes
/// with `0 < t_p < r_p < ∞`.
pub fn random_pure_both_finite_pair<R: Rng>(
    rng: &mut R,
    indexing: PrimeIndexing,
) -> (TypeRep, TypeRep) {
    let k = indexing.modulus();
    let forced = rng.gen_range(0..k);
    let mut tau = TypeRep::integers(indexing);
    let mut rho = TypeRep::integers(indexing);
    for cell in 0..k {
        let set = SymbolicPrimeSet::cell(indexing, cell).expect("cell in range");
        let (t, r) = if cell == forced || rng.gen_bool(0.4) {
            let t = rng.gen_range(1..=3);
            (
                ExtendedNat::Fin(t),
                ExtendedNat::Fin(rng.gen_range(t + 1..=t + 3)),
            )
        } else {
            let v = random_value(rng, 3);
            (v, v)
        };
        tau = tau.with_value_on(&set, t).expect("same indexing");
        rho = rho.with_value_on(&set, r).expect("same indexing");
    }
    for _ in 0..rng.gen_range(0..=3) {
        let p = pool_prime(rng);
        if let ExtendedNat::Fin(r) = rho.value_at(p).expect("prime") {
            let set = SymbolicPrimeSet::finite(indexing, [p]).expect("prime");
            let t = ExtendedNat::Fin(rng.gen_range(0..=r + 2));
            tau = tau.with_value_on(&set, t).expect("same indexing");
        }
    }
    (tau, rho)
}

pub fn random_cd<R: Rng>(
    rng: &mut R,
    indexing: PrimeIndexing,
    max_rank: usize,
    shape: TypeShape,
) -> CompletelyDecomposable {
    let rank = rng.gen_range(0..=max_rank);
    CompletelyDecomposable::new(
        (0..rank)
            .map(|_| random_type(rng, indexing, shape))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn types_respect_piece_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let ix = random_indexing(&mut rng, 8);
            let t = random_type(&mut rng, ix, TypeShape::default());
            assert!(t.pieces().len() <= 4);
        }
    }

    #[test]
    fn generated_pairs_have_their_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let ix = random_indexing(&mut rng, 8);
            let (a, b) = random_leq_pair(&mut rng, ix, TypeShape::default());
            assert!(a.leq(&b).unwrap());
            let (a, b) = random_strict_pair(&mut rng, ix, TypeShape::default());
            assert!(a.strictly_less(&b).unwrap());
            let (a, b) = random_pure_both_finite_pair(&mut rng, ix);
            assert!(a.strictly_less(&b).unwrap());
        }
    }

    #[test]
    fn same_seed_same_output() {
        let gen = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| random_type(&mut rng, PrimeIndexing::default(), TypeShape::default()))
                .collect::<Vec<_>>()
        };
        assert_eq!(gen(7), gen(7));
    }
}
