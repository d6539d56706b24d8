//! Separating witnesses for strictly comparable types.
//!
//! For `τ < ρ` (with `τ` pointwise below `ρ`) at least one of three patterns
//! occurs: an entry that is finite in `τ` but infinite in `ρ`
//! ([`StrictCase::InfJump`]), infinitely many primes with `t_p = 0 < r_p < ∞`
//! ([`StrictCase::ZeroBase`]), or infinitely many primes with
//! `0 < t_p < r_p < ∞` ([`StrictCase::BothFinite`]). The first two are
//! separated by rank-1 groups; the last only by an infinite-rank subgroup of
//! `∏_{p∈P} ℤ_(p)`, which is described by a [`GSpec`] and checked through the
//! exact integer inequalities that make its defining element escape the
//! image of the reduction map.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ext::ext_vanishes_rank1;
use crate::prime_set::SymbolicPrimeSet;
use crate::types::{normalize_pair, ExtendedNat, TypeRep};

/// Ordered by witness preference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StrictCase {
    InfJump,
    ZeroBase,
    BothFinite,
}

impl fmt::Display for StrictCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrictCase::InfJump => "InfJump",
            StrictCase::ZeroBase => "ZeroBase",
            StrictCase::BothFinite => "BothFinite",
        })
    }
}

/// Descriptor of the subgroup
/// `G = {(g_p) : ∃ m, k. m·g_p ∈ ℤ and |m·g_p| ≤ k·p^t for all p ∈ P}`
/// of `∏_{p∈P} ℤ_(p)`, relative to exponents `t < r` on `P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GSpec {
    primes: SymbolicPrimeSet,
    t_exp: u32,
    r_exp: u32,
}

impl GSpec {
    pub fn new(primes: SymbolicPrimeSet, t_exp: u32, r_exp: u32) -> Result<Self> {
        if primes.is_finite() {
            return Err(Error::InvalidGSpec(format!("prime set {primes} is finite")));
        }
        if t_exp == 0 || t_exp >= r_exp {
            return Err(Error::InvalidGSpec(format!(
                "exponents must satisfy 0 < t < r, got t = {t_exp}, r = {r_exp}"
            )));
        }
        Ok(GSpec {
            primes,
            t_exp,
            r_exp,
        })
    }

    pub fn primes(&self) -> &SymbolicPrimeSet {
        &self.primes
    }

    pub fn t_exp(&self) -> u32 {
        self.t_exp
    }

    pub fn r_exp(&self) -> u32 {
        self.r_exp
    }
}

impl fmt::Display for GSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GSpec({}, {}, {})", self.primes, self.t_exp, self.r_exp)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    RankOne { x: TypeRep },
    InfiniteRank { g: GSpec },
}

/// Cases present for `τ < ρ`. Normalizes `τ` below `ρ` first.
pub fn classify(tau: &TypeRep, rho: &TypeRep) -> Result<BTreeSet<StrictCase>> {
    let (tau, rho) = strict_normalized(tau, rho)?;
    let mut cases = BTreeSet::new();
    if !inf_jump_primes(&tau, &rho)?.is_empty() {
        cases.insert(StrictCase::InfJump);
    }
    if zero_base_primes(&tau, &rho)?.is_infinite() {
        cases.insert(StrictCase::ZeroBase);
    }
    if tau.primes_where_pair(&rho, both_finite)?.is_infinite() {
        cases.insert(StrictCase::BothFinite);
    }
    debug_assert!(!cases.is_empty(), "strict pair with no separating case");
    Ok(cases)
}

fn strict_normalized(tau: &TypeRep, rho: &TypeRep) -> Result<(TypeRep, TypeRep)> {
    if !tau.strictly_less(rho)? {
        return Err(Error::NotStrict);
    }
    normalize_pair(tau, rho)
}

fn inf_jump_primes(tau: &TypeRep, rho: &TypeRep) -> Result<SymbolicPrimeSet> {
    tau.primes_where_pair(rho, |t, r| t.is_finite() && r.is_inf())
}

fn zero_base_primes(tau: &TypeRep, rho: &TypeRep) -> Result<SymbolicPrimeSet> {
    tau.primes_where_pair(rho, |t, r| t.is_zero() && r.is_positive_finite())
}

fn both_finite(t: ExtendedNat, r: ExtendedNat) -> bool {
    t.is_positive_finite() && r.is_finite() && t < r
}

/// Separating group for `τ < ρ`: in `T^⊥` but not in `R^⊥`.
///
/// Preference order is InfJump, ZeroBase, BothFinite. For InfJump the least
/// witness prime is used; for ZeroBase the whole set of qualifying primes;
/// for BothFinite the first infinite refinement piece in `(t, r)` order.
pub fn witness(tau: &TypeRep, rho: &TypeRep) -> Result<Witness> {
    let (tau, rho) = strict_normalized(tau, rho)?;
    let indexing = tau.indexing();

    let jump = inf_jump_primes(&tau, &rho)?;
    if let Some(q) = jump.least() {
        return Ok(Witness::RankOne {
            x: TypeRep::localization(indexing, q)?,
        });
    }

    let zero_base = zero_base_primes(&tau, &rho)?;
    if zero_base.is_infinite() {
        let x = TypeRep::rationals(indexing).with_value_on(&zero_base, ExtendedNat::Fin(1))?;
        return Ok(Witness::RankOne { x });
    }

    for piece in tau.refine(&rho)? {
        if !(piece.primes.is_infinite() && both_finite(piece.left, piece.right)) {
            continue;
        }
        let (Some(t), Some(r)) = (piece.left.finite(), piece.right.finite()) else {
            continue;
        };
        return Ok(Witness::InfiniteRank {
            g: GSpec::new(piece.primes, t, r)?,
        });
    }
    unreachable!("strictly comparable pair without a separating case")
}

/// `x ∈ T^⊥ \ R^⊥`.
pub fn verify_rank1_witness(tau: &TypeRep, rho: &TypeRep, x: &TypeRep) -> Result<bool> {
    Ok(ext_vanishes_rank1(tau, x)? && !ext_vanishes_rank1(rho, x)?)
}

/// `⌊p^{t + 1/2}⌋ = isqrt(p^{2t+1})`.
pub fn choose_np(p: u64, t: u32) -> BigUint {
    BigUint::from(p).pow(2 * t + 1).sqrt()
}

/// Whether the truncated sequence `g` satisfies the defining bound of the
/// descriptor for the given `m`, `k`: `m·g_p ∈ ℤ` and `|m·g_p| ≤ k·p^t`.
pub fn gspec_membership_check(
    g: &[(u64, BigRational)],
    m: u64,
    k: u64,
    spec: &GSpec,
) -> Result<bool> {
    let m = BigRational::from_integer(m.into());
    let mut ok = true;
    for (p, value) in g {
        if !spec.primes.contains(*p)? {
            return Err(Error::PrimeOutsideSet(*p));
        }
        if (value.denom() % *p).is_zero() {
            return Err(Error::NotLocal {
                prime: *p,
                value: value.to_string(),
            });
        }
        let scaled = &m * value;
        let bound = BigRational::from_integer(
            (BigUint::from(k) * BigUint::from(*p).pow(spec.t_exp)).into(),
        );
        ok &= scaled.is_integer() && scaled.abs() <= bound;
    }
    Ok(ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerificationBudget {
    pub m_max: u32,
    pub k_max: u32,
    pub prime_count: usize,
}

impl Default for VerificationBudget {
    fn default() -> Self {
        VerificationBudget {
            m_max: 8,
            k_max: 8,
            prime_count: 40,
        }
    }
}

/// A failing `(m, k)` pair at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairFailure {
    pub m: u32,
    pub k: u32,
    /// `m·n_p > k·p^t`
    pub exceeds_bound: bool,
    /// `m·n_p + k·p^t < p^r`
    pub below_modulus: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeRecord {
    pub p: u64,
    #[serde(serialize_with = "as_decimal")]
    pub n_p: BigUint,
    pub pairs_checked: usize,
    pub failures: Vec<PairFailure>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NumericCheckReport {
    pub m_max: u32,
    pub k_max: u32,
    pub prime_count: usize,
    pub t_exp: u32,
    pub r_exp: u32,
    pub records: Vec<PrimeRecord>,
    pub verdict: bool,
}

fn as_decimal<S: Serializer>(n: &BigUint, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_str(n)
}

/// Whether `p` is past the threshold `2·max(m_max, k_max) < isqrt(p)` from
/// which the inequalities are guaranteed.
pub fn above_threshold(p: u64, m_max: u32, k_max: u32) -> bool {
    2 * u64::from(m_max.max(k_max)) < p.sqrt()
}

fn check_prime(p: u64, spec: &GSpec, m_max: u32, k_max: u32) -> PrimeRecord {
    let n_p = choose_np(p, spec.t_exp);
    let p_t = BigUint::from(p).pow(spec.t_exp);
    let p_r = BigUint::from(p).pow(spec.r_exp);
    let mut failures = Vec::new();
    for m in 1..=m_max {
        let m_n = &n_p * m;
        for k in 1..=k_max {
            let k_pt = &p_t * k;
            let exceeds_bound = m_n > k_pt;
            let below_modulus = &m_n + &k_pt < p_r;
            if !(exceeds_bound && below_modulus) {
                failures.push(PairFailure {
                    m,
                    k,
                    exceeds_bound,
                    below_modulus,
                });
            }
        }
    }
    PrimeRecord {
        p,
        n_p,
        pairs_checked: m_max as usize * k_max as usize,
        passed: failures.is_empty(),
        failures,
    }
}

/// Checks, for the first `prime_count` primes of `P` past the threshold and
/// every `1 ≤ m ≤ m_max`, `1 ≤ k ≤ k_max`, that `n_p` is neither within the
/// bound `k·p^t` after scaling by `m` nor congruent mod `p^r` to any scaled
/// element within it. Failures are reported, not raised.
pub fn verify_non_surjectivity(spec: &GSpec, budget: VerificationBudget) -> NumericCheckReport {
    let VerificationBudget {
        m_max,
        k_max,
        prime_count,
    } = budget;
    let primes: Vec<u64> = spec
        .primes
        .iter()
        .filter(|&p| above_threshold(p, m_max, k_max))
        .take(prime_count)
        .collect();
    let records: Vec<PrimeRecord> = primes
        .par_iter()
        .map(|&p| check_prime(p, spec, m_max, k_max))
        .collect();
    let verdict = records.len() == prime_count && records.iter().all(|r| r.passed);
    NumericCheckReport {
        m_max,
        k_max,
        prime_count,
        t_exp: spec.t_exp,
        r_exp: spec.r_exp,
        records,
        verdict,
    }
}

/// Cases, witness and its verification for one strict pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub cases: BTreeSet<StrictCase>,
    pub witness: Witness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericCheckReport>,
    pub verified: bool,
}

pub fn separate(
    tau: &TypeRep,
    rho: &TypeRep,
    budget: VerificationBudget,
) -> Result<SeparationReport> {
    let cases = classify(tau, rho)?;
    let witness = witness(tau, rho)?;
    let (numeric, verified) = match &witness {
        Witness::RankOne { x } => (None, verify_rank1_witness(tau, rho, x)?),
        Witness::InfiniteRank { g } => {
            let report = verify_non_surjectivity(g, budget);
            let verdict = report.verdict;
            (Some(report), verdict)
        }
    };
    Ok(SeparationReport {
        cases,
        witness,
        numeric,
        verified,
    })
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
    fn konst(n: u32) -> TypeRep {
        TypeRep::constant(ix(), Fin(n))
    }
    fn cases(list: &[StrictCase]) -> BTreeSet<StrictCase> {
        list.iter().copied().collect()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&z(), &q()).unwrap(), cases(&[StrictCase::InfJump]));
        assert_eq!(
            classify(&z(), &konst(1)).unwrap(),
            cases(&[StrictCase::ZeroBase])
        );
        assert_eq!(
            classify(&konst(1), &konst(2)).unwrap(),
            cases(&[StrictCase::BothFinite])
        );
    }

    #[test]
    fn classify_rejects_non_strict() {
        assert_eq!(classify(&q(), &z()), Err(Error::NotStrict));
        assert_eq!(classify(&konst(1), &konst(1)), Err(Error::NotStrict));
        assert_eq!(witness(&konst(2), &konst(1)), Err(Error::NotStrict));
    }

    #[test]
    fn classify_normalizes_first() {
        // The excess of τ at 2 is a single finite entry and gets lowered away.
        let at2 = SymbolicPrimeSet::finite(ix(), [2]).unwrap();
        let tau = z().with_value_on(&at2, Fin(9)).unwrap();
        let rho = konst(1);
        assert_eq!(
            classify(&tau, &rho).unwrap(),
            cases(&[StrictCase::ZeroBase])
        );
    }

    #[test]
    fn witness_examples() {
        assert_eq!(
            witness(&z(), &q()).unwrap(),
            Witness::RankOne {
                x: TypeRep::localization(ix(), 2).unwrap()
            }
        );
        let Witness::RankOne { x } = witness(&z(), &konst(1)).unwrap() else {
            panic!("expected rank-1 witness");
        };
        assert_eq!(x, konst(1));
        assert!(verify_rank1_witness(&z(), &konst(1), &x).unwrap());

        let Witness::InfiniteRank { g } = witness(&konst(1), &konst(2)).unwrap() else {
            panic!("expected infinite-rank witness");
        };
        assert!(g.primes().is_cofinite() && g.primes().minus().is_empty());
        assert_eq!((g.t_exp(), g.r_exp()), (1, 2));
    }

    #[test]
    fn inf_jump_preferred_over_zero_base() {
        let cell0 = SymbolicPrimeSet::cell(ix(), 0).unwrap();
        let rho = konst(1).with_value_on(&cell0, Inf).unwrap();
        let found = classify(&z(), &rho).unwrap();
        assert_eq!(found, cases(&[StrictCase::InfJump, StrictCase::ZeroBase]));
        assert_eq!(
            witness(&z(), &rho).unwrap(),
            Witness::RankOne {
                x: TypeRep::localization(ix(), 2).unwrap()
            }
        );
    }

    #[test]
    fn rank1_verification_examples() {
        let z2 = TypeRep::localization(ix(), 2).unwrap();
        assert!(verify_rank1_witness(&z(), &q(), &z2).unwrap());
        assert!(!verify_rank1_witness(&z(), &q(), &q()).unwrap());
        assert!(verify_rank1_witness(&z(), &konst(1), &konst(1)).unwrap());
    }

    #[test]
    fn choose_np_examples() {
        assert_eq!(choose_np(2, 1), BigUint::from(2u32));
        assert_eq!(choose_np(101, 1), BigUint::from(1015u32));
        assert_eq!(choose_np(5, 2), BigUint::from(55u32));
        assert_eq!(choose_np(257, 1), BigUint::from(4120u32));
    }

    #[test]
    fn gspec_rejects_degenerate_exponents() {
        let all = SymbolicPrimeSet::all(ix());
        assert!(GSpec::new(all.clone(), 2, 2).is_err());
        assert!(GSpec::new(all.clone(), 0, 2).is_err());
        assert!(GSpec::new(SymbolicPrimeSet::finite(ix(), [2, 3]).unwrap(), 1, 2).is_err());
        assert!(GSpec::new(all, 1, 2).is_ok());
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn membership_check_examples() {
        let spec = GSpec::new(SymbolicPrimeSet::all(ix()), 1, 2).unwrap();
        let primes = crate::primes::first_primes(10);
        let zeros: Vec<_> = primes.iter().map(|&p| (p, rat(0, 1))).collect();
        assert!(gspec_membership_check(&zeros, 3, 5, &spec).unwrap());

        let at_bound: Vec<_> = primes.iter().map(|&p| (p, rat(p as i64, 1))).collect();
        assert!(gspec_membership_check(&at_bound, 1, 1, &spec).unwrap());

        let over: Vec<_> = primes.iter().map(|&p| (p, rat(p as i64 + 1, 1))).collect();
        assert!(!gspec_membership_check(&over, 1, 1, &spec).unwrap());

        // 1/3 at p = 2 needs m divisible by 3.
        let third = vec![(2, rat(1, 3))];
        assert!(!gspec_membership_check(&third, 1, 1, &spec).unwrap());
        assert!(gspec_membership_check(&third, 3, 1, &spec).unwrap());
    }

    #[test]
    fn membership_check_rejects_non_local() {
        let spec = GSpec::new(SymbolicPrimeSet::all(ix()), 1, 2).unwrap();
        assert!(matches!(
            gspec_membership_check(&[(5, rat(1, 10))], 10, 1, &spec),
            Err(Error::NotLocal { prime: 5, .. })
        ));
        let cell = GSpec::new(SymbolicPrimeSet::cell(ix(), 1).unwrap(), 1, 2).unwrap();
        assert_eq!(
            gspec_membership_check(&[(2, rat(1, 1))], 1, 1, &cell),
            Err(Error::PrimeOutsideSet(2))
        );
    }

    #[test]
    fn non_surjectivity_at_257() {
        let spec = GSpec::new(SymbolicPrimeSet::all(ix()), 1, 2).unwrap();
        let record = check_prime(257, &spec, 8, 8);
        assert_eq!(record.n_p, BigUint::from(4120u32));
        assert!(record.passed);
        assert_eq!(record.pairs_checked, 64);
    }

    #[test]
    fn non_surjectivity_small_budget() {
        let spec = GSpec::new(SymbolicPrimeSet::all(ix()), 1, 2).unwrap();
        let budget = VerificationBudget {
            m_max: 1,
            k_max: 1,
            prime_count: 10,
        };
        let report = verify_non_surjectivity(&spec, budget);
        assert!(report.verdict);
        assert_eq!(report.records.len(), 10);
        // 2·1 < isqrt(p) first holds at p = 11.
        assert_eq!(report.records[0].p, 11);
        assert!(report.records.windows(2).all(|w| w[0].p < w[1].p));
    }

    #[test]
    fn below_threshold_primes_can_fail() {
        let spec = GSpec::new(SymbolicPrimeSet::all(ix()), 1, 2).unwrap();
        // p = 3, m = k = 8: 8·5 + 8·3 = 64 ≥ 9.
        let record = check_prime(3, &spec, 8, 8);
        assert!(!record.passed);
        assert!(record.failures.iter().any(|f| !f.below_modulus));
    }

    #[test]
    fn separate_runs_full_pipeline() {
        let report = separate(&konst(1), &konst(2), VerificationBudget::default()).unwrap();
        assert_eq!(report.cases, cases(&[StrictCase::BothFinite]));
        assert!(report.verified);
        assert_eq!(report.numeric.as_ref().unwrap().records.len(), 40);

        let report = separate(&z(), &q(), VerificationBudget::default()).unwrap();
        assert!(report.verified);
        assert!(report.numeric.is_none());
    }
}
