//! Residue/index families `(α, n)` whose windows of consecutive `F_Q`
//! denominators collapse onto a given gap signature of `F_{Q,p}`.
//!
//! An `R`-window of `F_Q` is encoded by its denominators modulo `p`
//! (`α ∈ (Z/pZ)^R`) and its indices `n_r = ⌊(Q + q_r)/q_{r+1}⌋`. The
//! recurrence `q_{r+2} = n_r·q_{r+1} − q_r` forces
//! `α_{r+2} ≡ n_r·α_{r+1} − α_r (mod p)` at every position. When
//! `α_{r+1} ≠ 0` this pins `n_r` to one residue class; when `α_{r+1} = 0` it
//! leaves `n_r` free but forces `α_{r+2} ≡ −α_r`, which is checked when
//! residue patterns are generated.

use serde::Serialize;

use crate::arith::{ensure_prime, mod_inverse};
use crate::error::{Error, Result};
use crate::gaps::DeltaTuple;

/// Denominators of a window modulo `p`, with nonzero endpoints and no two
/// adjacent zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ResiduePattern {
    p: u64,
    alpha: Vec<u64>,
}

impl ResiduePattern {
    pub fn new(p: u64, alpha: Vec<u64>) -> Result<Self> {
        ensure_prime(p)?;
        if alpha.len() < 2 {
            return Err(Error::InvalidPattern("needs at least two entries"));
        }
        if alpha.iter().any(|&a| a >= p) {
            return Err(Error::InvalidPattern("entry is not reduced mod p"));
        }
        if alpha[0] == 0 || *alpha.last().unwrap() == 0 {
            return Err(Error::InvalidPattern("first and last entries must be nonzero"));
        }
        if alpha.windows(2).any(|w| w[0] == 0 && w[1] == 0) {
            return Err(Error::InvalidPattern("two adjacent zeros"));
        }
        Ok(ResiduePattern { p, alpha })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn alpha(&self) -> &[u64] {
        &self.alpha
    }

    /// `R`.
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Number of gaps among the surviving (nonzero) positions.
    pub fn h(&self) -> usize {
        self.nonzero_positions().len() - 1
    }

    /// Zero-based positions `r_1 < ... < r_{H+1}` with `α_r ≠ 0`.
    pub fn nonzero_positions(&self) -> Vec<usize> {
        (0..self.alpha.len()).filter(|&i| self.alpha[i] != 0).collect()
    }

    /// Whether every zero satisfies `α_{r+2} ≡ −α_r`.
    pub fn is_consistent(&self) -> bool {
        let p = self.p;
        (1..self.alpha.len() - 1)
            .filter(|&z| self.alpha[z] == 0)
            .all(|z| (self.alpha[z - 1] + self.alpha[z + 1]).is_multiple_of(p))
    }
}

/// What the recurrence forces on one index `n_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "residue", rename_all = "snake_case")]
pub enum NConstraint {
    Unconstrained,
    /// `n ≡ c (mod p)`; `c = 0` means `p | n`.
    Class(u64),
}

impl NConstraint {
    pub fn admits(&self, p: u64, n: u64) -> bool {
        match *self {
            NConstraint::Unconstrained => true,
            NConstraint::Class(c) => n % p == c,
        }
    }
}

/// The constraint on the zero-based index position `r`
/// (`0 ≤ r ≤ R − 3`), read off `(α_r, α_{r+1}, α_{r+2})`.
pub fn n_constraint(pattern: &ResiduePattern, r: usize) -> Result<NConstraint> {
    let a = pattern.alpha();
    if r + 2 >= a.len() {
        return Err(Error::IndexLength { expected: a.len().saturating_sub(2), got: r + 1 });
    }
    let p = pattern.prime();
    let (lo, mid, hi) = (a[r], a[r + 1], a[r + 2]);
    if mid == 0 {
        return Ok(NConstraint::Unconstrained);
    }
    let inv = mod_inverse(mid, p).expect("nonzero residue mod a prime");
    // n·α_{r+1} ≡ α_r + α_{r+2}; the four cases collapse into one formula
    Ok(NConstraint::Class((lo + hi) % p * inv % p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexSlot {
    Pinned { value: u64 },
    Free { constraint: NConstraint },
}

/// Per-position description of the admissible index tuples `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct IndexTemplate {
    slots: Vec<IndexSlot>,
}

impl IndexTemplate {
    pub fn new(slots: Vec<IndexSlot>) -> Self {
        IndexTemplate { slots }
    }

    pub fn slots(&self) -> &[IndexSlot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn free_positions(&self) -> Vec<usize> {
        (0..self.slots.len()).filter(|&i| matches!(self.slots[i], IndexSlot::Free { .. })).collect()
    }

    pub fn admits(&self, p: u64, ns: &[u64]) -> bool {
        ns.len() == self.slots.len()
            && self.slots.iter().zip(ns).all(|(slot, &n)| {
                n >= 1
                    && match slot {
                        IndexSlot::Pinned { value } => n == *value,
                        IndexSlot::Free { constraint } => constraint.admits(p, n),
                    }
            })
    }

    /// Every concrete tuple with free entries in `1..=cutoff`, in
    /// lexicographic order.
    pub fn expand(&self, p: u64, cutoff: u64) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::with_capacity(self.slots.len())];
        for slot in &self.slots {
            let values: Vec<u64> = match *slot {
                IndexSlot::Pinned { value } => vec![value],
                IndexSlot::Free { constraint } => (1..=cutoff).filter(|&n| constraint.admits(p, n)).collect(),
            };
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut t = prefix.clone();
                        t.push(v);
                        t
                    })
                })
                .collect();
        }
        out
    }
}

/// A residue pattern together with the index tuples it admits for a fixed
/// gap signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemberFamily {
    pub pattern: ResiduePattern,
    pub template: IndexTemplate,
    pub delta: DeltaTuple,
}

/// Zero-position sets for windows of length `r_len` carrying `h + 1`
/// surviving fractions: subsets of the interior `{2, ..., R−1}` (one-based)
/// of size `R − H − 1` with no two adjacent. Returned zero-based, in
/// lexicographic order.
pub fn zero_patterns(r_len: usize, h: usize) -> Result<Vec<Vec<usize>>> {
    if h == 0 {
        return Err(Error::ZeroWindow);
    }
    if r_len < h + 1 || r_len > 2 * h + 1 {
        return Err(Error::RangeOutOfBounds { r: r_len, h });
    }
    let zeros = r_len - h - 1;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(zeros);
    fn rec(start: usize, end: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for z in start..end {
            cur.push(z);
            rec(z + 2, end, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(1, r_len - 1, zeros, &mut cur, &mut out);
    Ok(out)
}

/// `δ(α, n)`: 1 across adjacent surviving positions, `n_{r_h}` across a
/// skipped zero.
pub fn delta_of(pattern: &ResiduePattern, ns: &[u64]) -> Result<DeltaTuple> {
    let r_len = pattern.len();
    if ns.len() + 2 != r_len {
        return Err(Error::IndexLength { expected: r_len - 2, got: ns.len() });
    }
    let pos = pattern.nonzero_positions();
    let deltas = pos
        .windows(2)
        .map(|w| if w[1] == w[0] + 1 { 1 } else { ns[w[0]] })
        .collect();
    DeltaTuple::new(deltas)
}

/// All families `(α, template)` for all `R ∈ [H+1, 2H+1]` with `δ = Δ`.
///
/// Order: ascending `R`, then zero pattern, then `α`, all lexicographic.
pub fn enumerate_members(p: u64, h: usize, delta: &DeltaTuple) -> Result<Vec<MemberFamily>> {
    ensure_prime(p)?;
    if h == 0 {
        return Err(Error::ZeroWindow);
    }
    if delta.len() != h {
        return Err(Error::InvalidDelta);
    }
    let per_r: Vec<Result<Vec<MemberFamily>>> = {
        let lengths: Vec<usize> = (h + 1..=2 * h + 1).collect();
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            lengths.into_par_iter().map(|r| families_of_length(p, h, delta, r)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            lengths.into_iter().map(|r| families_of_length(p, h, delta, r)).collect()
        }
    };
    let mut out = Vec::new();
    for fams in per_r {
        out.extend(fams?);
    }
    Ok(out)
}

fn families_of_length(p: u64, h: usize, delta: &DeltaTuple, r_len: usize) -> Result<Vec<MemberFamily>> {
    let mut out = Vec::new();
    for zeros in zero_patterns(r_len, h)? {
        let nonzero: Vec<usize> = (0..r_len).filter(|i| !zeros.contains(i)).collect();
        // gaps that are fixed by the zero pattern alone
        let mut pinned: Vec<Option<u64>> = vec![None; r_len - 2];
        let mut feasible = true;
        for (hh, w) in nonzero.windows(2).enumerate() {
            let want = delta.entries()[hh];
            if w[1] == w[0] + 1 {
                feasible &= want == 1;
            } else {
                pinned[w[0]] = Some(want);
            }
        }
        if !feasible {
            continue;
        }
        // odometer over nonzero residues, lexicographic in α
        let mut digits = vec![1u64; nonzero.len()];
        'odometer: loop {
            let mut alpha = vec![0u64; r_len];
            for (&i, &d) in nonzero.iter().zip(&digits) {
                alpha[i] = d;
            }
            if zeros.iter().all(|&z| (alpha[z - 1] + alpha[z + 1]).is_multiple_of(p)) {
                let pattern = ResiduePattern { p, alpha };
                if let Some(template) = build_template(&pattern, &pinned)? {
                    out.push(MemberFamily { pattern, template, delta: delta.clone() });
                }
            }
            let mut i = digits.len();
            loop {
                if i == 0 {
                    break 'odometer;
                }
                i -= 1;
                if digits[i] + 1 < p {
                    digits[i] += 1;
                    break;
                }
                digits[i] = 1;
            }
        }
    }
    Ok(out)
}

fn build_template(pattern: &ResiduePattern, pinned: &[Option<u64>]) -> Result<Option<IndexTemplate>> {
    let p = pattern.prime();
    let mut slots = Vec::with_capacity(pinned.len());
    for (r, pin) in pinned.iter().enumerate() {
        let constraint = n_constraint(pattern, r)?;
        slots.push(match pin {
            Some(v) if constraint.admits(p, *v) => IndexSlot::Pinned { value: *v },
            Some(_) => return Ok(None),
            None => IndexSlot::Free { constraint },
        });
    }
    Ok(Some(IndexTemplate { slots }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(p: u64, a: &[u64]) -> ResiduePattern {
        ResiduePattern::new(p, a.to_vec()).unwrap()
    }

    fn dt(v: &[u64]) -> DeltaTuple {
        DeltaTuple::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_pattern_examples() {
        assert_eq!(zero_patterns(3, 1).unwrap(), vec![vec![1]]);
        assert_eq!(zero_patterns(5, 2).unwrap(), vec![vec![1, 3]]);
        assert_eq!(zero_patterns(4, 2).unwrap(), vec![vec![1], vec![2]]);
        assert_eq!(zero_patterns(2, 1).unwrap(), vec![Vec::<usize>::new()]);
        assert!(zero_patterns(6, 2).is_err());
        assert!(zero_patterns(2, 2).is_err());
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_of(&pat(3, &[1, 2, 1]), &[4]).unwrap(), dt(&[1, 1]));
        assert_eq!(delta_of(&pat(3, &[1, 0, 2]), &[4]).unwrap(), dt(&[4]));
        assert_eq!(delta_of(&pat(3, &[1, 0, 2, 1]), &[4, 1]).unwrap(), dt(&[4, 1]));
        assert!(delta_of(&pat(3, &[1, 0, 2]), &[4, 1]).is_err());
        assert!(ResiduePattern::new(3, vec![1, 0, 0, 1]).is_err());
        assert!(ResiduePattern::new(3, vec![0, 1]).is_err());
        assert!(ResiduePattern::new(3, vec![1, 3]).is_err());
        assert!(ResiduePattern::new(4, vec![1, 1]).is_err());
    }

    #[test]
    fn constraint_examples() {
        assert_eq!(n_constraint(&pat(3, &[1, 1, 1]), 0).unwrap(), NConstraint::Class(2));
        assert_eq!(n_constraint(&pat(3, &[2, 0, 1, 2]), 1).unwrap(), NConstraint::Class(2));
        assert_eq!(n_constraint(&pat(3, &[1, 2, 0, 1]), 0).unwrap(), NConstraint::Class(2));
        assert_eq!(n_constraint(&pat(3, &[1, 0, 2]), 0).unwrap(), NConstraint::Unconstrained);
        // α_r = α_{r+2} = 0 forces p | n_r
        assert_eq!(n_constraint(&pat(5, &[1, 0, 4, 0, 1]), 1).unwrap(), NConstraint::Class(0));
    }

    #[test]
    fn family_examples() {
        let fams = enumerate_members(3, 1, &dt(&[2])).unwrap();
        let alphas: Vec<&[u64]> = fams.iter().map(|f| f.pattern.alpha()).collect();
        assert_eq!(alphas, vec![&[1, 0, 2][..], &[2, 0, 1][..]]);
        assert!(fams.iter().all(|f| f.template.slots() == [IndexSlot::Pinned { value: 2 }]));

        let fams = enumerate_members(3, 1, &dt(&[1])).unwrap();
        assert_eq!(fams.iter().filter(|f| f.pattern.len() == 2).count(), 4);
        let r3: Vec<_> = fams.iter().filter(|f| f.pattern.len() == 3).collect();
        assert_eq!(r3.len(), 2);
        assert!(r3.iter().all(|f| f.template.slots() == [IndexSlot::Pinned { value: 1 }]));

        let fams = enumerate_members(2, 1, &dt(&[1])).unwrap();
        let alphas: Vec<&[u64]> = fams.iter().map(|f| f.pattern.alpha()).collect();
        assert_eq!(alphas, vec![&[1, 1][..], &[1, 0, 1][..]]);
    }

    #[test]
    fn single_gap_families_number_p_minus_one() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for k in 2..=12 {
                assert_eq!(enumerate_members(p, 1, &dt(&[k])).unwrap().len() as u64, p - 1);
            }
        }
    }

    #[test]
    fn emitted_patterns_are_valid_and_delta_consistent() {
        for p in [2u64, 3, 5] {
            for h in 1..=3 {
                for delta in DeltaTuple::all_up_to(h, 3) {
                    for fam in enumerate_members(p, h, &delta).unwrap() {
                        let a = fam.pattern.alpha();
                        assert!(ResiduePattern::new(p, a.to_vec()).is_ok());
                        assert_eq!(fam.pattern.h(), h);
                        assert!(fam.pattern.is_consistent());
                        for ns in fam.template.expand(p, 20) {
                            assert!(fam.template.admits(p, &ns));
                            assert_eq!(delta_of(&fam.pattern, &ns).unwrap(), delta);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn real_windows_satisfy_the_recurrence_conditions() {
        use crate::farey::enumerate_farey;
        for order in [20u64, 40] {
            let qs: Vec<u64> = enumerate_farey(order, None).unwrap().map(|f| f.denominator()).collect();
            for p in [2u64, 3] {
                for r_len in 3..=4 {
                    for w in qs.windows(r_len) {
                        let alpha: Vec<u64> = w.iter().map(|q| q % p).collect();
                        let ns: Vec<u64> = (0..r_len - 2).map(|r| (order + w[r]) / w[r + 1]).collect();
                        assert!(alpha.windows(2).all(|x| x[0] != 0 || x[1] != 0));
                        for r in 0..r_len - 2 {
                            let (lo, mid, hi) = (alpha[r], alpha[r + 1], alpha[r + 2]);
                            if mid == 0 {
                                assert_eq!((lo + hi) % p, 0, "consistency rule at Q={order} {w:?}");
                            } else if lo == 0 && hi == 0 {
                                assert_eq!(ns[r] % p, 0);
                            } else {
                                let inv = mod_inverse(mid, p).unwrap();
                                assert_eq!(ns[r] % p, (lo + hi) % p * inv % p);
                            }
                        }
                        if alpha[0] != 0 && alpha[r_len - 1] != 0 {
                            let pattern = ResiduePattern::new(p, alpha.clone()).unwrap();
                            assert!(pattern.is_consistent());
                            for (r, &n) in ns.iter().enumerate().take(r_len - 2) {
                                assert!(n_constraint(&pattern, r).unwrap().admits(p, n));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic_order() {
        let a = enumerate_members(5, 2, &dt(&[2, 1])).unwrap();
        let b = enumerate_members(5, 2, &dt(&[2, 1])).unwrap();
        assert_eq!(a, b);
        let lens: Vec<usize> = a.iter().map(|f| f.pattern.len()).collect();
        assert!(lens.windows(2).all(|w| w[0] <= w[1]));
    }
}
