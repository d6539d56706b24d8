//! Computable fragment of the lattice of rational cotorsion theories.
//!
//! Types of rank-1 torsion-free abelian groups are represented symbolically
//! ([`TypeRep`]) over a fixed partition of the primes into residue cells
//! ([`PrimeIndexing`]). On top of that the crate decides:
//!
//! * equivalence, order, join and meet of types ([`types`]);
//! * `Ext(T, X) = 0` for rank-1 and completely decomposable groups, by two
//!   independent routes ([`ext`]);
//! * which separating pattern a strict pair `τ < ρ` exhibits, together with
//!   a verified witness group in `T^⊥ \ R^⊥` ([`separation`]);
//! * order embeddings of finite posets and power sets into the type lattice
//!   ([`embed`]).

pub mod dsl;
pub mod embed;
pub mod error;
pub mod ext;
pub mod prime_set;
pub mod primes;
pub mod random;
pub mod selftest;
pub mod separation;
pub mod types;

pub use dsl::{parse_type, render_type, ParseError};
pub use embed::{
    cotorsion_image_report, poset_embed, powerset_embed, verify_embedding, CotorsionImageReport,
    Embedding, FinitePoset, PosetFile,
};
pub use error::{Error, Result};
pub use ext::{
    ext_class, ext_vanishes_cd, ext_vanishes_rank1, quotient_shape, vanishes_via_shape,
    CompletelyDecomposable, CotorsionQuotientShape, ExtClass, ShapeKind,
};
pub use prime_set::{PrimeIndexing, SymbolicPrimeSet};
pub use primes::nth_prime;
pub use separation::{
    choose_np, classify, gspec_membership_check, separate, verify_non_surjectivity,
    verify_rank1_witness, witness, GSpec, NumericCheckReport, SeparationReport, StrictCase,
    VerificationBudget, Witness,
};
pub use types::{normalize_pair, ExtendedNat, TypeRep};
