//! Exact prime enumeration backed by a process-wide growable sieve.
//!
//! The cache only ever grows; readers see a prefix of the prime sequence
//! that is never invalidated.

use std::sync::{OnceLock, RwLock};

struct Sieve {
    /// All primes `<= limit`, increasing.
    primes: Vec<u64>,
    limit: u64,
}

impl Sieve {
    fn with_limit(limit: u64) -> Self {
        let limit = limit.max(2);
        let size = limit as usize + 1;
        let mut composite = vec![false; size];
        let mut primes = Vec::new();
        for n in 2..size {
            if composite[n] {
                continue;
            }
            primes.push(n as u64);
            let mut m = n * n;
            while m < size {
                composite[m] = true;
                m += n;
            }
        }
        Sieve { primes, limit }
    }
}

fn sieve() -> &'static RwLock<Sieve> {
    static SIEVE: OnceLock<RwLock<Sieve>> = OnceLock::new();
    SIEVE.get_or_init(|| RwLock::new(Sieve::with_limit(1 << 12)))
}

/// Runs `f` against a sieve satisfying `enough`, growing it as needed.
fn with_sieve<T>(enough: impl Fn(&Sieve) -> bool, f: impl FnOnce(&Sieve) -> T) -> T {
    {
        let guard = sieve().read().expect("sieve lock poisoned");
        if enough(&guard) {
            return f(&guard);
        }
    }
    let mut guard = sieve().write().expect("sieve lock poisoned");
    while !enough(&guard) {
        let next = guard.limit.saturating_mul(2);
        *guard = Sieve::with_limit(next);
    }
    f(&guard)
}

/// The `j`-th prime, counting from `nth_prime(0) == 2`.
pub fn nth_prime(j: usize) -> u64 {
    with_sieve(|s| s.primes.len() > j, |s| s.primes[j])
}

/// Position of `p` in the increasing prime sequence, or `None` if `p` is not prime.
pub fn prime_index(p: u64) -> Option<usize> {
    if p < 2 {
        return None;
    }
    with_sieve(|s| s.limit >= p, |s| s.primes.binary_search(&p).ok())
}

pub fn is_prime(n: u64) -> bool {
    prime_index(n).is_some()
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    with_sieve(|s| s.primes.len() >= count, |s| s.primes[..count].to_vec())
}

/// Iterator over all primes in increasing order, starting at index `start`.
#[derive(Debug, Clone)]
pub struct Primes {
    next: usize,
}

impl Primes {
    pub fn from_index(start: usize) -> Self {
        Primes { next: start }
    }
}

impl Default for Primes {
    fn default() -> Self {
        Primes::from_index(0)
    }
}

impl Iterator for Primes {
    type Item = (usize, u64);

    fn next(&mut self) -> Option<Self::Item> {
        let j = self.next;
        self.next += 1;
        Some((j, nth_prime(j)))
    }
}
