//! Gap signatures of consecutive windows in `F_{Q,p}` and their histogram.

use std::borrow::Borrow;
use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::ensure_prime;
use crate::error::{Error, Result};
use crate::farey::{enumerate_farey, FareyFraction, FareyStream};
use crate::geom::Rational;

/// The vector `(Δ_1, ..., Δ_H)` of determinants across an `(H+1)`-window.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct DeltaTuple(Vec<u64>);

impl DeltaTuple {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.is_empty() || entries.contains(&0) {
            return Err(Error::InvalidDelta);
        }
        Ok(DeltaTuple(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    /// All tuples of length `h` with entries in `1..=max`, in lexicographic order.
    pub fn all_up_to(h: usize, max: u64) -> Vec<DeltaTuple> {
        let mut out = vec![Vec::new()];
        for _ in 0..h {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u64>| {
                    (1..=max).map(move |d| {
                        let mut v = prefix.clone();
                        v.push(d);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(DeltaTuple).collect()
    }
}

impl Borrow<[u64]> for DeltaTuple {
    fn borrow(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for DeltaTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Counts `N_{Q,p}(Δ)` for every signature that occurs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapHistogram {
    pub order: u64,
    pub prime: u64,
    pub h: usize,
    counts: HashMap<DeltaTuple, u64>,
    /// `|F_{Q,p}|`.
    pub population: u64,
}

impl GapHistogram {
    fn empty(order: u64, prime: u64, h: usize) -> Self {
        GapHistogram { order, prime, h, counts: HashMap::new(), population: 0 }
    }

    pub fn count(&self, delta: &[u64]) -> u64 {
        self.counts.get(delta).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Entries sorted by descending count, ties by signature.
    pub fn sorted(&self) -> Vec<(DeltaTuple, u64)> {
        let mut v: Vec<_> = self.counts.iter().map(|(k, c)| (k.clone(), *c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v
    }

    fn bump(&mut self, key: &[u64]) {
        if let Some(c) = self.counts.get_mut(key) {
            *c += 1;
        } else {
            self.counts.insert(DeltaTuple(key.to_vec()), 1);
        }
    }

    fn merge(mut self, other: GapHistogram) -> GapHistogram {
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.population += other.population;
        self
    }
}

/// `q1·a2 − a1·q2` for `f1 < f2`.
pub fn delta_of_pair(f1: FareyFraction, f2: FareyFraction) -> Result<u64> {
    let d = f1.determinant(&f2);
    if d <= 0 {
        return Err(Error::NotIncreasing);
    }
    Ok(d as u64)
}

fn validate(order: u64, p: u64, h: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    if h == 0 {
        return Err(Error::ZeroWindow);
    }
    ensure_prime(p)?;
    Ok(())
}

/// Sliding-window state shared by the sequential and sharded passes.
struct Window {
    h: usize,
    fracs: VecDeque<FareyFraction>,
    deltas: VecDeque<u64>,
}

impl Window {
    fn new(h: usize) -> Self {
        Window { h, fracs: VecDeque::with_capacity(h + 2), deltas: VecDeque::with_capacity(h + 1) }
    }

    /// Pushes `f`; returns the first element if the window is now full.
    fn push(&mut self, f: FareyFraction) -> Option<FareyFraction> {
        if let Some(&last) = self.fracs.back() {
            self.deltas.push_back(last.determinant(&f) as u64);
        }
        self.fracs.push_back(f);
        if self.fracs.len() > self.h + 1 {
            self.fracs.pop_front();
            self.deltas.pop_front();
        }
        (self.fracs.len() == self.h + 1).then(|| self.fracs[0])
    }

    fn key(&mut self) -> &[u64] {
        self.deltas.make_contiguous()
    }
}

/// Single pass over `F_{Q,p}`.
pub fn tuple_counts_sequential(order: u64, p: u64, h: usize) -> Result<GapHistogram> {
    validate(order, p, h)?;
    let mut hist = GapHistogram::empty(order, p, h);
    let mut window = Window::new(h);
    for f in enumerate_farey(order, Some(p))? {
        hist.population += 1;
        if window.push(f).is_some() {
            hist.bump(window.key());
        }
    }
    Ok(hist)
}

/// Counts the windows whose first element lies in `[start, end)`.
fn shard_counts(order: u64, p: u64, h: usize, start: FareyFraction, end: Option<FareyFraction>) -> GapHistogram {
    let mut hist = GapHistogram::empty(order, p, h);
    let mut window = Window::new(h);
    let stream = FareyStream::starting_at(order, Some(p), start).expect("validated");
    let inside = |x: FareyFraction| end.is_none_or(|e| x < e);
    for f in stream {
        if inside(f) {
            hist.population += 1;
        }
        match window.push(f) {
            Some(first) if inside(first) => hist.bump(window.key()),
            Some(_) => break,
            None => {}
        }
    }
    hist
}

/// Boundaries for range-partitioned enumeration: the terms of `F_S` for a
/// small `S ≤ Q`, all of which are also terms of `F_Q`.
fn shard_bounds(order: u64, shards_hint: usize) -> Vec<FareyFraction> {
    let mut s = 1u64;
    while s < order && (crate::farey::farey_size(s, None).unwrap() as usize) < shards_hint + 1 {
        s += 1;
    }
    let mut v: Vec<_> = enumerate_farey(s.min(order), None).unwrap().collect();
    v.pop(); // 1/1 starts no shard of its own
    v
}

/// Range-partitioned counting over roughly `shards` pieces; equal to
/// [`tuple_counts_sequential`] for every shard count.
pub fn tuple_counts_sharded(order: u64, p: u64, h: usize, shards: usize) -> Result<GapHistogram> {
    validate(order, p, h)?;
    let bounds = shard_bounds(order, shards);
    let ranges: Vec<(FareyFraction, Option<FareyFraction>)> = bounds
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, bounds.get(i + 1).copied()))
        .collect();
    let empty = || GapHistogram::empty(order, p, h);
    #[cfg(feature = "parallel")]
    let hist = {
        use rayon::prelude::*;
        ranges
            .into_par_iter()
            .map(|(s, e)| shard_counts(order, p, h, s, e))
            .reduce(empty, GapHistogram::merge)
    };
    #[cfg(not(feature = "parallel"))]
    let hist = ranges
        .into_iter()
        .map(|(s, e)| shard_counts(order, p, h, s, e))
        .fold(empty(), GapHistogram::merge);
    Ok(hist)
}

/// Histogram of gap signatures over all `(H+1)`-windows of `F_{Q,p}`.
///
/// With the `parallel` feature and large `Q` the sequence is split into
/// ranges that are counted concurrently and merged key by key; the result is
/// identical to [`tuple_counts_sequential`].
pub fn tuple_counts(order: u64, p: u64, h: usize) -> Result<GapHistogram> {
    #[cfg(feature = "parallel")]
    {
        if order >= 512 {
            let shards = rayon::current_num_threads() * 16;
            return tuple_counts_sharded(order, p, h, shards);
        }
    }
    tuple_counts_sequential(order, p, h)
}

/// `N_{Q,p}(Δ) / |F_{Q,p}|` as an exact fraction.
pub fn empirical_density(hist: &GapHistogram, delta: &DeltaTuple) -> Result<Rational> {
    if hist.population == 0 {
        return Err(Error::EmptyPopulation);
    }
    Ok(Rational::new(BigInt::from(hist.count(delta.entries())), BigInt::from(hist.population)))
}

/// Consecutive triples `a1/q1 < a2/q2 < a3/q3` of the unfiltered `F_Q` with
/// `q1·a3 − a1·q3 = n`.
pub fn triple_index_counts(order: u64, n: u64) -> Result<u64> {
    let mut it = enumerate_farey(order, None)?;
    let (Some(mut x), Some(mut y)) = (it.next(), it.next()) else {
        return Ok(0);
    };
    let mut count = 0;
    for z in it {
        if x.determinant(&z) == n as i128 {
            count += 1;
        }
        x = y;
        y = z;
    }
    Ok(count)
}
