//! Randomized invariant suites behind `typelattice selftest`.
//!
//! Every suite draws from its own ChaCha stream derived from the configured
//! seed, so a fixed seed reproduces the report exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dsl::{parse_type, render_type};
use crate::embed::{powerset_embed, subset_type, verify_embedding, FinitePoset};
use crate::error::Result;
use crate::ext::{
    ext_vanishes_cd, ext_vanishes_rank1, quotient_shape, vanishes_via_shape, CompletelyDecomposable,
};
use crate::prime_set::{PrimeIndexing, SymbolicPrimeSet};
use crate::primes;
use crate::random::{self, TypeShape};
use crate::separation::{
    choose_np, classify, verify_non_surjectivity, verify_rank1_witness, witness,
    VerificationBudget, Witness,
};
use crate::types::TypeRep;

pub const SCHEMA: &str = "typelattice/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Random cases per suite.
    pub trials: usize,
    pub budget: VerificationBudget,
    /// Random indexings use moduli in `1..=max_modulus`.
    pub max_modulus: usize,
    /// Power sets up to this size are checked exhaustively.
    pub powerset_max: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            seed: 0,
            trials: 500,
            budget: VerificationBudget::default(),
            max_modulus: 8,
            powerset_max: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub schema: &'static str,
    pub config: SelftestConfig,
    pub checks: Vec<CheckOutcome>,
    pub all_passed: bool,
}

#[derive(Default)]
struct Tally {
    trials: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: Result<bool>, describe: impl FnOnce() -> String) {
        self.trials += 1;
        let failure = match ok {
            Ok(true) => return,
            Ok(false) => describe(),
            Err(e) => format!("{}: {e}", describe()),
        };
        self.failures += 1;
        self.first_failure.get_or_insert(failure);
    }
}

type Suite = fn(&mut ChaCha8Rng, &SelftestConfig, &mut Tally);

const SUITES: &[(&str, Suite)] = &[
    ("prime_sets.boolean_laws", boolean_laws),
    ("prime_sets.finiteness", finiteness),
    ("prime_sets.cells_partition", cells_partition),
    ("types.equivalence_relation", equivalence_relation),
    ("types.partial_order", partial_order),
    ("types.lattice_laws", lattice_laws),
    ("types.bounds", bounds),
    ("types.pointwise_join", pointwise_join),
    ("dsl.round_trip", dsl_round_trip),
    ("ext.oracle_equivalence", oracle_equivalence),
    ("ext.monotone_first", monotone_first),
    ("ext.monotone_second", monotone_second),
    ("ext.well_defined", well_defined),
    ("ext.join_law", join_law),
    ("ext.meet_direction", meet_direction),
    ("separation.trichotomy", trichotomy),
    ("separation.witness_soundness", witness_soundness),
    ("separation.finite_rank_shadow", finite_rank_shadow),
    ("separation.np_bracket", np_bracket),
    ("separation.prime_count_stability", prime_count_stability),
    ("embed.powerset", powerset_exhaustive),
    ("embed.injective", embed_injective),
    ("embed.lattice_compatible", embed_lattice_compatible),
    ("embed.antichain", embed_antichain),
];

pub fn suite_names() -> impl Iterator<Item = &'static str> {
    SUITES.iter().map(|(name, _)| *name)
}

pub fn run(config: &SelftestConfig) -> SelftestReport {
    let checks: Vec<CheckOutcome> = SUITES
        .iter()
        .enumerate()
        .map(|(i, (name, suite))| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let mut tally = Tally::default();
            suite(&mut rng, config, &mut tally);
            CheckOutcome {
                name,
                trials: tally.trials,
                failures: tally.failures,
                passed: tally.failures == 0,
                first_failure: tally.first_failure,
            }
        })
        .collect();
    SelftestReport {
        schema: SCHEMA,
        config: *config,
        all_passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn shape() -> TypeShape {
    TypeShape::default()
}

fn indexing(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> PrimeIndexing {
    random::random_indexing(rng, config.max_modulus)
}

fn boolean_laws(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    let probes = primes::first_primes(500);
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let a = random::random_set(rng, ix);
        let b = random::random_set(rng, ix);
        let c = random::random_set(rng, ix);
        let p = probes[rng.gen_range(0..probes.len())];
        let ok = (|| -> Result<bool> {
            let lhs = a.union(&b)?.intersect(&c)?;
            let rhs = a.intersect(&c)?.union(&b.intersect(&c)?)?;
            let morgan_u =
                a.union(&b)?.complement() == a.complement().intersect(&b.complement())?;
            let morgan_i =
                a.intersect(&b)?.complement() == a.complement().union(&b.complement())?;
            let involutive = a.complement().complement() == a;
            let member =
                lhs.contains(p)? == ((a.contains(p)? || b.contains(p)?) && c.contains(p)?);
            Ok(lhs == rhs && morgan_u && morgan_i && involutive && member)
        })();
        tally.record(ok, || format!("a = {a}, b = {b}, c = {c}, p = {p}"));
    }
}

fn finiteness(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let s = random::random_set(rng, ix);
        let bound = 10 * ix.modulus() * (s.plus().len() + s.minus().len() + 1);
        let explicit_max = s.plus().iter().chain(s.minus()).copied().max().unwrap_or(0);
        let ok = (|| -> Result<bool> {
            let mut beyond = 0usize;
            for p in primes::first_primes(bound + random::EXCEPTION_POOL) {
                if s.contains(p)? && p > explicit_max {
                    beyond += 1;
                }
            }
            Ok(s.is_finite() == (beyond == 0) && s.is_infinite() == (beyond > 0))
        })();
        tally.record(ok, || format!("s = {s}"));
    }
}

fn cells_partition(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials.min(100) {
        let ix = indexing(rng, config);
        let cells: Vec<SymbolicPrimeSet> = (0..ix.modulus())
            .map(|i| SymbolicPrimeSet::cell(ix, i).expect("in range"))
            .collect();
        let ok = (|| -> Result<bool> {
            for p in primes::first_primes(200) {
                let mut hits = 0;
                for c in &cells {
                    hits += usize::from(c.contains(p)?);
                }
                if hits != 1 {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        tally.record(ok, || format!("modulus {}", ix.modulus()));
    }
}

fn equivalence_relation(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let a = random::random_type(rng, ix, shape());
        // Mix random triples with perturbations so equivalent pairs occur.
        let b = if rng.gen_bool(0.5) {
            random::perturb_finite(rng, &a, 2, 3)
        } else {
            random::random_type(rng, ix, shape())
        };
        let c = if rng.gen_bool(0.5) {
            random::perturb_finite(rng, &b, 2, 3)
        } else {
            random::random_type(rng, ix, shape())
        };
        let ok = (|| -> Result<bool> {
            let refl = a.equivalent(&a)?;
            let sym = a.equivalent(&b)? == b.equivalent(&a)?;
            let trans = !(a.equivalent(&b)? && b.equivalent(&c)?) || a.equivalent(&c)?;
            Ok(refl && sym && trans)
        })();
        tally.record(ok, || format!("{a} / {b} / {c}"));
    }
}

fn partial_order(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let (a, b) = random::random_leq_pair(rng, ix, shape());
        let c = if rng.gen_bool(0.5) {
            b.join(&random::random_type(rng, ix, shape()))
                .expect("same indexing")
        } else {
            random::random_type(rng, ix, shape())
        };
        let ok = (|| -> Result<bool> {
            let refl = a.leq(&a)?;
            let trans = !(a.leq(&b)? && b.leq(&c)?) || a.leq(&c)?;
            let antisym = (a.leq(&b)? && b.leq(&a)?) == a.equivalent(&b)?;
            let antisym_c = (a.leq(&c)? && c.leq(&a)?) == a.equivalent(&c)?;
            Ok(refl && trans && antisym && antisym_c)
        })();
        tally.record(ok, || format!("{a} / {b} / {c}"));
    }
}

/// Lattice identities up to equivalence for one triple.
pub fn lattice_identities(a: &TypeRep, b: &TypeRep, c: &TypeRep) -> Result<bool> {
    let eq = |x: &TypeRep, y: &TypeRep| x.equivalent(y);
    Ok(eq(&a.join(b)?, &b.join(a)?)?
        && eq(&a.meet(b)?, &b.meet(a)?)?
        && eq(&a.join(b)?.join(c)?, &a.join(&b.join(c)?)?)?
        && eq(&a.meet(b)?.meet(c)?, &a.meet(&b.meet(c)?)?)?
        && eq(&a.join(a)?, a)?
        && eq(&a.meet(a)?, a)?
        && eq(&a.join(&a.meet(b)?)?, a)?
        && eq(&a.meet(&a.join(b)?)?, a)?
        && a.leq(&a.join(b)?)?
        && b.leq(&a.join(b)?)?
        && a.meet(b)?.leq(a)?
        && a.meet(b)?.leq(b)?)
}

fn lattice_laws(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let a = random::random_type(rng, ix, shape());
        let b = random::random_type(rng, ix, shape());
        let c = random::random_type(rng, ix, shape());
        tally.record(lattice_identities(&a, &b, &c), || {
            format!("{a} / {b} / {c}")
        });
    }
}

/// An upper bound of `a` and `b` in the type order that is usually not pointwise one.
pub fn random_upper_bound(rng: &mut ChaCha8Rng, a: &TypeRep, b: &TypeRep) -> TypeRep {
    let extra = random::random_type(rng, a.indexing(), shape());
    let upper = a
        .join(b)
        .and_then(|j| j.join(&extra))
        .expect("same indexing");
    random::perturb_finite(rng, &upper, 2, 3)
}

/// A lower bound of `a` and `b` in the type order.
pub fn random_lower_bound(rng: &mut ChaCha8Rng, a: &TypeRep, b: &TypeRep) -> TypeRep {
    let extra = random::random_type(rng, a.indexing(), shape());
    let lower = a
        .meet(b)
        .and_then(|m| m.meet(&extra))
        .expect("same indexing");
    random::perturb_finite(rng, &lower, 2, 3)
}

fn bounds(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let a = random::random_type(rng, ix, shape());
        let b = random::random_type(rng, ix, shape());
        let upper = random_upper_bound(rng, &a, &b);
        let lower = random_lower_bound(rng, &a, &b);
        let ok = (|| -> Result<bool> {
            let up = !(a.leq(&upper)? && b.leq(&upper)?) || a.join(&b)?.leq(&upper)?;
            let down = !(lower.leq(&a)? && lower.leq(&b)?) || lower.leq(&a.meet(&b)?)?;
            Ok(up && down)
        })();
        tally.record(ok, || format!("{a} / {b} / {upper} / {lower}"));
    }
}

fn pointwise_join(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    let probes = primes::first_primes(200);
    for _ in 0..config.trials.min(200) {
        let ix = indexing(rng, config);
        let a = random::random_type(rng, ix, shape());
        let b = random::random_type(rng, ix, shape());
        let ok = (|| -> Result<bool> {
            let join = a.join(&b)?;
            let meet = a.meet(&b)?;
            for &p in &probes {
                let (x, y) = (a.value_at(p)?, b.value_at(p)?);
                if join.value_at(p)? != x.max(y) || meet.value_at(p)? != x.min(y) {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        tally.record(ok, || format!("{a} / {b}"));
    }
}

fn dsl_round_trip(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let a = random::random_type(rng, ix, shape());
        let text = render_type(&a);
        let ok = parse_type(&text, ix).map(|b| b == a).map_err(Into::into);
        tally.record(ok, || text.clone());
    }
}

fn oracle_equivalence(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let t = random::random_type(rng, ix, shape());
        let x = random::random_type(rng, ix, shape());
        let ok = (|| -> Result<bool> {
            Ok(ext_vanishes_rank1(&t, &x)? == vanishes_via_shape(&quotient_shape(&x, &t)?))
        })();
        tally.record(ok, || format!("T = {t}, X = {x}"));
    }
}

fn monotone_first(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let (tau, rho) = random::random_leq_pair(rng, ix, shape());
        let x = random::random_type(rng, ix, shape());
        let ok = (|| -> Result<bool> {
            Ok(!ext_vanishes_rank1(&rho, &x)? || ext_vanishes_rank1(&tau, &x)?)
        })();
        tally.record(ok, || format!("{tau} ≤ {rho}, X = {x}"));
    }
}

fn monotone_second(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let (x, x2) = random::random_leq_pair(rng, ix, shape());
        let t = random::random_type(rng, ix, shape());
        let ok = (|| -> Result<bool> {
            Ok(!ext_vanishes_rank1(&t, &x)? || ext_vanishes_rank1(&t, &x2)?)
        })();
        tally.record(ok, || format!("T = {t}, {x} ≤ {x2}"));
    }
}

fn well_defined(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let t = random::random_type(rng, ix, shape());
        let x = random::random_type(rng, ix, shape());
        let t2 = random::perturb_finite(rng, &t, 3, 3);
        let x2 = random::perturb_finite(rng, &x, 3, 3);
        let ok = (|| -> Result<bool> {
            let base = ext_vanishes_rank1(&t, &x)?;
            Ok(base == ext_vanishes_rank1(&t2, &x)? && base == ext_vanishes_rank1(&t, &x2)?)
        })();
        tally.record(ok, || format!("T = {t} ~ {t2}, X = {x} ~ {x2}"));
    }
}

fn join_law(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let a = random::random_type(rng, ix, shape());
        let b = random::random_type(rng, ix, shape());
        let x = random::random_type(rng, ix, shape());
        let ok = (|| -> Result<bool> {
            Ok(ext_vanishes_rank1(&a.join(&b)?, &x)?
                == (ext_vanishes_rank1(&a, &x)? && ext_vanishes_rank1(&b, &x)?))
        })();
        tally.record(ok, || format!("{a} ∨ {b}, X = {x}"));
    }
}

fn meet_direction(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let a = random::random_type(rng, ix, shape());
        let b = random::random_type(rng, ix, shape());
        let x = random::random_type(rng, ix, shape());
        let ok = (|| -> Result<bool> {
            let either = ext_vanishes_rank1(&a, &x)? || ext_vanishes_rank1(&b, &x)?;
            Ok(!either || ext_vanishes_rank1(&a.meet(&b)?, &x)?)
        })();
        tally.record(ok, || format!("{a} ∧ {b}, X = {x}"));
    }
}

fn trichotomy(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let (tau, rho) = random::random_strict_pair(rng, ix, shape());
        let ok = classify(&tau, &rho).map(|cases| !cases.is_empty());
        tally.record(ok, || format!("{tau} < {rho}"));
    }
}

/// Checks the witness for a strict pair with the configured budget.
pub fn witness_sound(tau: &TypeRep, rho: &TypeRep, budget: VerificationBudget) -> Result<bool> {
    Ok(match witness(tau, rho)? {
        Witness::RankOne { x } => verify_rank1_witness(tau, rho, &x)?,
        Witness::InfiniteRank { g } => verify_non_surjectivity(&g, budget).verdict,
    })
}

fn witness_soundness(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for i in 0..config.trials {
        let ix = indexing(rng, config);
        // Every fourth pair is forced into the infinite-rank case.
        let (tau, rho) = if i % 4 == 3 {
            random::random_pure_both_finite_pair(rng, ix)
        } else {
            random::random_strict_pair(rng, ix, shape())
        };
        tally.record(witness_sound(&tau, &rho, config.budget), || {
            format!("{tau} < {rho}")
        });
    }
}

fn finite_rank_shadow(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials {
        let ix = indexing(rng, config);
        let (tau, rho) = random::random_pure_both_finite_pair(rng, ix);
        let g = random::random_cd(rng, ix, 5, shape());
        let ok = (|| -> Result<bool> {
            Ok(
                ext_vanishes_cd(&CompletelyDecomposable::from(tau.clone()), &g)?
                    == ext_vanishes_cd(&CompletelyDecomposable::from(rho.clone()), &g)?,
            )
        })();
        tally.record(ok, || format!("{tau} < {rho}, rank {}", g.rank()));
    }
}

fn np_bracket(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    let probes = primes::first_primes(2000);
    for _ in 0..config.trials {
        let p = probes[rng.gen_range(0..probes.len())];
        let t = rng.gen_range(1..=6u32);
        let n = choose_np(p, t);
        let power = num_bigint::BigUint::from(p).pow(2 * t + 1);
        let ok = &n * &n <= power && power < (&n + 1u32) * (&n + 1u32);
        tally.record(Ok(ok), || format!("p = {p}, t = {t}, n = {n}"));
    }
}

fn prime_count_stability(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for _ in 0..config.trials.min(20) {
        let ix = indexing(rng, config);
        let (tau, rho) = random::random_pure_both_finite_pair(rng, ix);
        let ok = (|| -> Result<bool> {
            let Witness::InfiniteRank { g } = witness(&tau, &rho)? else {
                return Ok(false);
            };
            let small = VerificationBudget {
                prime_count: config.budget.prime_count / 2 + 1,
                ..config.budget
            };
            let short = verify_non_surjectivity(&g, small);
            let long = verify_non_surjectivity(&g, config.budget);
            Ok(short.records[..] == long.records[..short.records.len()])
        })();
        tally.record(ok, || format!("{tau} < {rho}"));
    }
}

fn powerset_exhaustive(_rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    let ix = PrimeIndexing::new(config.powerset_max.max(1)).expect("modulus ≥ 1");
    for n in 1..=config.powerset_max {
        let ok = powerset_embed(n, ix).map(|e| verify_embedding(&e, &FinitePoset::powerset(n)));
        tally.record(ok, || format!("n = {n}"));
    }
}

fn embed_injective(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    let n = config.powerset_max.max(1);
    let ix = PrimeIndexing::new(n).expect("modulus ≥ 1");
    for _ in 0..config.trials {
        let a = rng.gen_range(0..1usize << n);
        let b = rng.gen_range(0..1usize << n);
        let ok = (|| -> Result<bool> {
            let ta = subset_type(ix, (0..n).filter(|i| a >> i & 1 == 1))?;
            let tb = subset_type(ix, (0..n).filter(|i| b >> i & 1 == 1))?;
            Ok(ta.equivalent(&tb)? == (a == b))
        })();
        tally.record(ok, || format!("{a:b} vs {b:b}"));
    }
}

fn embed_lattice_compatible(rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    let n = config.powerset_max.max(1);
    let ix = PrimeIndexing::new(n).expect("modulus ≥ 1");
    let image = |mask: usize| subset_type(ix, (0..n).filter(move |i| mask >> i & 1 == 1));
    for _ in 0..config.trials {
        let a = rng.gen_range(0..1usize << n);
        let b = rng.gen_range(0..1usize << n);
        let ok = (|| -> Result<bool> {
            let (ta, tb) = (image(a)?, image(b)?);
            Ok(image(a | b)?.equivalent(&ta.join(&tb)?)?
                && image(a & b)?.equivalent(&ta.meet(&tb)?)?)
        })();
        tally.record(ok, || format!("{a:b}, {b:b}"));
    }
}

fn embed_antichain(_rng: &mut ChaCha8Rng, config: &SelftestConfig, tally: &mut Tally) {
    for n in 1..=config.max_modulus {
        let ix = PrimeIndexing::new(n).expect("modulus ≥ 1");
        let ok = (|| -> Result<bool> {
            let singles: Vec<TypeRep> = (0..n)
                .map(|i| subset_type(ix, [i]))
                .collect::<Result<_>>()?;
            for (i, a) in singles.iter().enumerate() {
                for b in &singles[i + 1..] {
                    if !a.incomparable(b)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        })();
        tally.record(ok, || format!("n = {n}"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_is_reproducible() {
        let config = SelftestConfig {
            seed: 3,
            trials: 40,
            powerset_max: 3,
            ..SelftestConfig::default()
        };
        let a = run(&config);
        for check in &a.checks {
            assert!(check.passed, "{}: {:?}", check.name, check.first_failure);
        }
        assert_eq!(a, run(&config));
        assert_eq!(a.checks.len(), suite_names().count());
    }

    #[test]
    fn tally_records_errors_as_failures() {
        let mut tally = Tally::default();
        tally.record(Ok(true), String::new);
        tally.record(Err(crate::Error::NotLeq), || "case".into());
        assert_eq!((tally.trials, tally.failures), (2, 1));
        assert!(tally.first_failure.unwrap().starts_with("case: "));
    }
}
