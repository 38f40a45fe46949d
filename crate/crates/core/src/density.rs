//! Limiting densities of gap signatures, their closed forms for single
//! gaps, and finite-order checks against enumeration.
//!
//! The limiting density of `Δ` is
//! `Σ_R Σ_{(α, n)} 2·area(T_{n1,...,n_{R−2}}) / (p(p−1))`, the inner sum
//! running over the families of [`crate::residue`]. Free indices make the
//! sum infinite; it is truncated at a cutoff and the omitted mass bounded
//! using `area(T_{...}) ≤ area(T_n) = 4/(n(n+1)(n+2))` for any entry `n`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::ensure_prime;
use crate::error::{Error, Result};
use crate::farey::enumerate_farey;
use crate::gaps::{empirical_density, tuple_counts, DeltaTuple};
use crate::geom::{cell_area_tail, format_rational_short, lemma2_empty_guard, rat, region_tuple, Rational};
use crate::lattice::{brute_count_congruent, CongruenceClass, LatticeRegion};
use crate::residue::{enumerate_members, IndexSlot, MemberFamily};

/// Exact truncated main term plus a rigorous bound on what was left out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityEstimate {
    pub main: Rational,
    pub tail_bound: Rational,
    pub cutoff: u64,
}

impl Serialize for DensityEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("DensityEstimate", 3)?;
        st.serialize_field("main", &format_rational_short(&self.main))?;
        st.serialize_field("tail_bound", &format_rational_short(&self.tail_bound))?;
        st.serialize_field("cutoff", &self.cutoff)?;
        st.end()
    }
}

/// Smallest admissible cutoff for windows of `h` gaps: `4(2H+1) − 6`.
pub fn minimum_cutoff(h: usize) -> u64 {
    8 * h as u64 - 2
}

/// `max(50, 4(2H+1) − 6)`.
pub fn default_cutoff(h: usize) -> u64 {
    minimum_cutoff(h).max(50)
}

/// `2/(p(p−1))`, the weight of one unit of area.
fn area_weight(p: u64) -> Rational {
    rat(2, (p * (p - 1)) as i64)
}

/// The unique tuple that can stay nonempty when position `r` is large:
/// neighbours 1, everything else 2.
fn exceptional_tuple(len: usize, r: usize) -> Vec<u64> {
    (0..len).map(|j| if j == r { 0 } else if j.abs_diff(r) == 1 { 1 } else { 2 }).collect()
}

/// Number of free positions of `fam` that can take arbitrarily large values
/// without emptying the region.
fn tail_multiplicity(fam: &MemberFamily) -> u64 {
    let p = fam.pattern.prime();
    let slots = fam.template.slots();
    fam.template
        .free_positions()
        .into_iter()
        .filter(|&r| {
            let e = exceptional_tuple(slots.len(), r);
            slots.iter().enumerate().filter(|&(j, _)| j != r).all(|(j, slot)| match slot {
                IndexSlot::Pinned { value } => *value == e[j],
                IndexSlot::Free { constraint } => constraint.admits(p, e[j]),
            })
        })
        .count() as u64
}

/// Area by index tuple, shared across families with equal tuples.
fn area_table(tuples: impl IntoIterator<Item = Vec<u64>>) -> HashMap<Vec<u64>, Rational> {
    let mut uniq: Vec<Vec<u64>> = tuples.into_iter().collect();
    uniq.sort();
    uniq.dedup();
    let compute = |ns: Vec<u64>| {
        let area = if lemma2_empty_guard(&ns) { Rational::zero() } else { region_tuple(&ns).area() };
        (ns, area)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        uniq.into_par_iter().map(compute).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        uniq.into_iter().map(compute).collect()
    }
}

/// Truncated limiting density of `Δ` in `F_{Q,p}` as `Q → ∞`.
pub fn theoretical_density(p: u64, h: usize, delta: &DeltaTuple, cutoff: u64) -> Result<DensityEstimate> {
    ensure_prime(p)?;
    if h == 0 {
        return Err(Error::ZeroWindow);
    }
    let min = minimum_cutoff(h);
    if cutoff < min {
        return Err(Error::CutoffTooSmall { got: cutoff, min, h });
    }
    let families = enumerate_members(p, h, delta)?;
    let expanded: Vec<Vec<Vec<u64>>> = families.iter().map(|f| f.template.expand(p, cutoff)).collect();
    let areas = area_table(expanded.iter().flatten().cloned());
    // family order, fixed
    let mut area_sum = Rational::zero();
    let mut multiplicity = 0u64;
    for (fam, tuples) in families.iter().zip(&expanded) {
        for ns in tuples {
            area_sum += &areas[ns];
        }
        multiplicity += tail_multiplicity(fam);
    }
    let weight = area_weight(p);
    let tail_bound = Rational::from_integer(BigInt::from(multiplicity)) * cell_area_tail(cutoff) * &weight;
    Ok(DensityEstimate { main: area_sum * weight, tail_bound, cutoff })
}

/// `1 − 2/(3p)` for `k = 1`, `8/(p·k(k+1)(k+2))` for `k ≥ 2`.
pub fn corollary_closed_form(p: u64, k: u64) -> Result<Rational> {
    ensure_prime(p)?;
    match k {
        0 => Err(Error::InvalidDelta),
        1 => Ok(rat(1, 1) - rat(2, 3 * p as i64)),
        _ => {
            let k = k as i64;
            Ok(rat(8, p as i64 * k * (k + 1) * (k + 2)))
        }
    }
}

/// A window of the cyclic `F_{Q,p}` that wraps past 1/1 and so has no
/// counterpart among the linear windows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryWindow {
    /// Denominators of the window, in order.
    pub denominators: Vec<u64>,
}

/// Both sides of the finite identity
/// `N_{Q,p}(Δ) = Σ_R Σ_{(α, n)} N^p_{α1,α2}(Q·T_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub order: u64,
    pub prime: u64,
    pub delta: DeltaTuple,
    /// Windows of the sequence `0/1 … 1/1`.
    pub lhs: u64,
    /// Windows of the sequence read cyclically, `1/1` identified with `0/1`.
    pub lhs_cyclic: u64,
    pub rhs: u64,
    /// The wrapped windows that account for `lhs_cyclic − lhs`.
    pub boundary: Vec<BoundaryWindow>,
}

impl IdentityReport {
    pub fn difference(&self) -> i64 {
        self.rhs as i64 - self.lhs as i64
    }
}

/// Maximum `Q` for [`finite_identity_check`].
pub const IDENTITY_MAX_ORDER: u64 = 200;

/// Evaluates both sides of the finite identity at order `Q`, expanding free
/// indices up to `2Q` (larger indices give empty scaled regions).
pub fn finite_identity_check(order: u64, p: u64, h: usize, delta: &DeltaTuple) -> Result<IdentityReport> {
    ensure_prime(p)?;
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    if order > IDENTITY_MAX_ORDER {
        return Err(Error::RegionOutOfRange { bound: IDENTITY_MAX_ORDER });
    }
    if h == 0 {
        return Err(Error::ZeroWindow);
    }
    if delta.len() != h {
        return Err(Error::InvalidDelta);
    }

    let seq: Vec<(i64, i64)> =
        enumerate_farey(order, Some(p))?.map(|f| (f.numerator() as i64, f.denominator() as i64)).collect();
    // drop 1/1, then continue with the first terms shifted by 1
    let cycle = seq.len() - 1;
    let lifted: Vec<(i64, i64)> = (0..cycle + h)
        .map(|i| {
            let (a, q) = seq[i % cycle];
            (a + (i / cycle) as i64 * q, q)
        })
        .collect();
    let target = delta.entries();
    let mut lhs = 0;
    let mut lhs_cyclic = 0;
    let mut boundary = Vec::new();
    for start in 0..cycle {
        let w = &lifted[start..];
        let matches = (0..h).all(|i| (w[i].1 * w[i + 1].0 - w[i].0 * w[i + 1].1) as u64 == target[i]);
        if !matches {
            continue;
        }
        lhs_cyclic += 1;
        // a linear window ends at or before lifted 0/1, i.e. 1/1
        if start + h <= cycle {
            lhs += 1;
        } else {
            boundary.push(BoundaryWindow { denominators: w[..=h].iter().map(|x| x.1 as u64).collect() });
        }
    }

    let families = enumerate_members(p, h, delta)?;
    let mut rhs = 0;
    let mut regions: HashMap<Vec<u64>, LatticeRegion> = HashMap::new();
    for fam in &families {
        let alpha = fam.pattern.alpha();
        let cls = CongruenceClass::new(p, alpha[0], alpha[1])?;
        for ns in fam.template.expand(p, 2 * order) {
            if lemma2_empty_guard(&ns) {
                continue;
            }
            let region = match regions.get(&ns) {
                Some(r) => r,
                None => {
                    let r = LatticeRegion::cell(order, &ns)?;
                    regions.entry(ns.clone()).or_insert(r)
                }
            };
            rhs += brute_count_congruent(region, cls);
        }
    }
    Ok(IdentityReport { order, prime: p, delta: delta.clone(), lhs, lhs_cyclic, rhs, boundary })
}

/// One row of an empirical-versus-limit comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub delta: DeltaTuple,
    pub count: u64,
    #[serde(serialize_with = "ser_rational")]
    pub empirical: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub main: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub tail_bound: Rational,
    /// `|empirical − main|`.
    pub difference: f64,
    /// `log²Q / Q`.
    pub scale: f64,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational_short(r))
}

/// `log²Q / Q`, the shape of the convergence rate.
pub fn error_scale(order: u64) -> f64 {
    let q = order as f64;
    q.ln().powi(2) / q
}

/// Empirical densities at order `Q` next to the truncated limits.
pub fn compare(order: u64, p: u64, h: usize, deltas: &[DeltaTuple], cutoff: u64) -> Result<Vec<ComparisonRow>> {
    let hist = tuple_counts(order, p, h)?;
    let scale = error_scale(order);
    deltas
        .iter()
        .map(|delta| {
            if delta.len() != h {
                return Err(Error::InvalidDelta);
            }
            let est = theoretical_density(p, h, delta, cutoff)?;
            let emp = empirical_density(&hist, delta)?;
            let difference = (&emp - &est.main).to_f64().unwrap_or(f64::NAN).abs();
            Ok(ComparisonRow {
                delta: delta.clone(),
                count: hist.count(delta.entries()),
                empirical: emp,
                main: est.main,
                tail_bound: est.tail_bound,
                difference,
                scale,
            })
        })
        .collect()
}
