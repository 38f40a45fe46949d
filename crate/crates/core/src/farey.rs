//! The Farey sequence `F_Q` and its subsequence `F_{Q,p}` of fractions whose
//! denominators are not divisible by `p`.
//!
//! Enumeration runs the three-term recurrence on consecutive pairs, so each
//! step is O(1) in time and memory.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::arith::{ensure_prime, gcd, mod_inverse, totient_sieve};
use crate::error::{Error, Result};

/// A reduced fraction `a/q` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FareyFraction {
    a: u64,
    q: u64,
}

impl FareyFraction {
    pub const ZERO: FareyFraction = FareyFraction { a: 0, q: 1 };
    pub const ONE: FareyFraction = FareyFraction { a: 1, q: 1 };

    pub fn new(a: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidFraction { a, q, reason: "zero denominator" });
        }
        if a > q {
            return Err(Error::InvalidFraction { a, q, reason: "exceeds 1" });
        }
        if gcd(a, q) != 1 {
            return Err(Error::InvalidFraction { a, q, reason: "not reduced" });
        }
        Ok(FareyFraction { a, q })
    }

    // Callers guarantee the invariants.
    pub(crate) const fn raw(a: u64, q: u64) -> Self {
        FareyFraction { a, q }
    }

    pub fn numerator(&self) -> u64 {
        self.a
    }

    pub fn denominator(&self) -> u64 {
        self.q
    }

    /// `q1·a2 − a1·q2` for `self = a1/q1`, `other = a2/q2`.
    pub fn determinant(&self, other: &FareyFraction) -> i128 {
        self.q as i128 * other.a as i128 - self.a as i128 * other.q as i128
    }
}

impl Ord for FareyFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.a as u128 * other.q as u128).cmp(&(other.a as u128 * self.q as u128))
    }
}

impl PartialOrd for FareyFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FareyFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.q)
    }
}

/// The successor of `f2` in `F_Q`, given its predecessor `f1`.
pub fn next_pair(order: u64, f1: FareyFraction, f2: FareyFraction) -> Result<FareyFraction> {
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    let neighbours = f1.determinant(&f2) == 1
        && f1.q <= order
        && f2.q <= order
        && f1.q + f2.q > order;
    if !neighbours {
        return Err(Error::NotNeighbors { order, a1: f1.a, q1: f1.q, a2: f2.a, q2: f2.q });
    }
    if f2 == FareyFraction::ONE {
        return Err(Error::NoSuccessor);
    }
    Ok(step(order, f1, f2))
}

#[inline]
fn step(order: u64, f1: FareyFraction, f2: FareyFraction) -> FareyFraction {
    let k = (order + f1.q) / f2.q;
    FareyFraction::raw(k * f2.a - f1.a, k * f2.q - f1.q)
}

/// The fraction following `f` in `F_Q`, found from `f` alone through the
/// modular inverse of its numerator. Used to restart enumeration mid-sequence.
pub fn successor(order: u64, f: FareyFraction) -> Result<FareyFraction> {
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    if f == FareyFraction::ONE {
        return Err(Error::NoSuccessor);
    }
    if f.q > order {
        return Err(Error::InvalidFraction { a: f.a, q: f.q, reason: "denominator exceeds order" });
    }
    if f.q == 1 {
        return Ok(FareyFraction::raw(1, order));
    }
    // c·q − a·d = 1  ⇔  a·d ≡ −1 (mod q); take the largest such d ≤ Q.
    let inv = mod_inverse(f.a, f.q).expect("reduced fraction");
    let d0 = (f.q - inv) % f.q;
    let d = d0 + f.q * ((order - d0) / f.q);
    let c = (1 + f.a as u128 * d as u128) / f.q as u128;
    Ok(FareyFraction::raw(c as u64, d))
}

/// Ordered stream over `F_Q`, or over `F_{Q,p}` when a prime filter is set.
///
/// The unfiltered sequence is always generated internally; the filter only
/// decides which terms are yielded.
#[derive(Clone, Debug)]
pub struct FareyStream {
    order: u64,
    filter: Option<u64>,
    prev: Option<FareyFraction>,
    cur: Option<FareyFraction>,
}

impl FareyStream {
    pub fn new(order: u64, filter: Option<u64>) -> Result<Self> {
        Self::starting_at(order, filter, FareyFraction::ZERO)
    }

    /// A stream whose first unfiltered term is `start`.
    pub fn starting_at(order: u64, filter: Option<u64>, start: FareyFraction) -> Result<Self> {
        if order == 0 {
            return Err(Error::ZeroOrder);
        }
        if let Some(p) = filter {
            ensure_prime(p)?;
        }
        if start.q > order {
            return Err(Error::InvalidFraction {
                a: start.a,
                q: start.q,
                reason: "denominator exceeds order",
            });
        }
        Ok(FareyStream { order, filter, prev: None, cur: Some(start) })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn filter(&self) -> Option<u64> {
        self.filter
    }

    fn advance(&mut self) -> Option<FareyFraction> {
        let cur = self.cur?;
        self.cur = if cur == FareyFraction::ONE {
            None
        } else {
            Some(match self.prev {
                Some(prev) => step(self.order, prev, cur),
                None => successor(self.order, cur).expect("validated start"),
            })
        };
        self.prev = Some(cur);
        Some(cur)
    }
}

impl Iterator for FareyStream {
    type Item = FareyFraction;

    fn next(&mut self) -> Option<FareyFraction> {
        loop {
            let f = self.advance()?;
            match self.filter {
                Some(p) if f.q % p == 0 => continue,
                _ => return Some(f),
            }
        }
    }
}

/// `F_Q` (or `F_{Q,p}`) in increasing order, from 0/1 to 1/1.
pub fn enumerate_farey(order: u64, filter: Option<u64>) -> Result<FareyStream> {
    FareyStream::new(order, filter)
}

/// Exact `|F_Q|`, or `|F_{Q,p}|` with a filter, from a totient sieve.
pub fn farey_size(order: u64, filter: Option<u64>) -> Result<u64> {
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    if let Some(p) = filter {
        ensure_prime(p)?;
    }
    let phi = totient_sieve(order as usize);
    let total = phi
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(q, _)| filter.is_none_or(|p| !(*q as u64).is_multiple_of(p)))
        .map(|(_, v)| *v)
        .sum::<u64>();
    Ok(1 + total)
}

/// Leading term `(p/(p+1))·3Q²/π²` of `|F_{Q,p}|`.
pub fn size_main_term(order: u64, p: u64) -> f64 {
    let q = order as f64;
    let p = p as f64;
    p / (p + 1.0) * 3.0 * q * q / (std::f64::consts::PI * std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(a: u64, q: u64) -> FareyFraction {
        FareyFraction::new(a, q).unwrap()
    }

    fn collect(order: u64, filter: Option<u64>) -> Vec<(u64, u64)> {
        enumerate_farey(order, filter).unwrap().map(|x| (x.a, x.q)).collect()
    }

    /// Every reduced a/q with q ≤ Q, sorted by value.
    fn brute(order: u64) -> Vec<(u64, u64)> {
        let mut v: Vec<FareyFraction> = (1..=order)
            .flat_map(|q| (0..=q).filter(move |&a| gcd(a, q) == 1).map(move |a| FareyFraction::raw(a, q)))
            .collect();
        v.sort();
        v.into_iter().map(|x| (x.a, x.q)).collect()
    }

    #[test]
    fn next_pair_examples() {
        assert_eq!(next_pair(5, f(1, 3), f(2, 5)).unwrap(), f(1, 2));
        assert_eq!(next_pair(5, f(0, 1), f(1, 5)).unwrap(), f(1, 4));
        assert_eq!(next_pair(1, f(0, 1), f(1, 1)), Err(Error::NoSuccessor));
        assert_eq!(successor(1, FareyFraction::ZERO).unwrap(), FareyFraction::ONE);
    }

    #[test]
    fn next_pair_rejects_non_neighbours() {
        assert!(matches!(next_pair(5, f(1, 5), f(1, 3)), Err(Error::NotNeighbors { .. })));
        // unimodular, but 1/3 < 2/5 < 1/2 are not consecutive in F_7
        assert!(matches!(next_pair(7, f(1, 3), f(1, 2)), Err(Error::NotNeighbors { .. })));
        assert!(matches!(next_pair(5, f(1, 3), f(1, 1)), Err(Error::NotNeighbors { .. })));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            collect(5, None),
            vec![(0, 1), (1, 5), (1, 4), (1, 3), (2, 5), (1, 2), (3, 5), (2, 3), (3, 4), (4, 5), (1, 1)]
        );
        assert_eq!(
            collect(5, Some(2)),
            vec![(0, 1), (1, 5), (1, 3), (2, 5), (3, 5), (2, 3), (4, 5), (1, 1)]
        );
        assert_eq!(collect(1, Some(7)), vec![(0, 1), (1, 1)]);
        assert!(enumerate_farey(5, Some(4)).is_err());
        assert!(enumerate_farey(0, None).is_err());
    }

    #[test]
    fn matches_brute_force_and_is_unimodular() {
        for order in 1..=60 {
            let seq = collect(order, None);
            assert_eq!(seq, brute(order), "Q = {order}");
            for w in seq.windows(2) {
                assert_eq!(w[0].1 * w[1].0 - w[0].0 * w[1].1, 1);
            }
            assert_eq!(seq.len() as u64, farey_size(order, None).unwrap());
        }
    }

    #[test]
    fn sizes() {
        assert_eq!(farey_size(5, None).unwrap(), 11);
        assert_eq!(farey_size(1, None).unwrap(), 2);
        assert_eq!(farey_size(4, Some(3)).unwrap(), 5);
        assert_eq!(size_main_term(0, 3), 0.0);
        let expected = 0.75 * 3.0e8 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((size_main_term(10_000, 3) - expected).abs() < 1e-6);
    }

    #[test]
    fn successor_agrees_with_stream() {
        for order in 1..=40 {
            let seq: Vec<_> = enumerate_farey(order, None).unwrap().collect();
            for w in seq.windows(2) {
                assert_eq!(successor(order, w[0]).unwrap(), w[1]);
            }
        }
    }

    #[test]
    fn restart_mid_sequence() {
        let full: Vec<_> = enumerate_farey(30, Some(3)).unwrap().collect();
        let start = f(7, 16);
        let tail: Vec<_> = FareyStream::starting_at(30, Some(3), start).unwrap().collect();
        let idx = full.iter().position(|x| *x == start).unwrap();
        assert_eq!(&full[idx..], &tail[..]);
    }

    proptest! {
        #[test]
        fn filtered_is_subsequence(order in 1u64..120, pi in 0usize..4) {
            let p = [2u64, 3, 5, 7][pi];
            let all = collect(order, None);
            let kept: Vec<_> = all.iter().copied().filter(|x| x.1 % p != 0).collect();
            let filtered = collect(order, Some(p));
            prop_assert_eq!(&filtered, &kept);
            prop_assert_eq!(filtered.len() as u64, farey_size(order, Some(p)).unwrap());
        }
    }
}
