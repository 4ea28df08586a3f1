//! Milnor-basis Steenrod operations on Bott rings.
//!
//! Every basis class of a Bott ring is a product of degree-1 classes, and on
//! a degree-1 class `x` the only Milnor basis elements acting nontrivially
//! are the identity and the single-entry elements, which send `x` to
//! `x^{2^k}`. The Cartan formula then reduces `Sq(t_1, ..., t_s)` on a
//! squarefree monomial to a sum over assignments of factors to positions.

use std::fmt;

use crate::bott::{alpha, BottRing};
use crate::error::{Error, Result};
use crate::poly2::{mask_vars, var_bit, Mask, MaskAccumulator, Monomial, SqfreePoly};

/// `Sq(t_1, ..., t_s)` with trailing zeros stripped; empty is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MilnorTuple(Vec<u32>);

impl MilnorTuple {
    pub fn new(mut entries: Vec<u32>) -> Self {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        MilnorTuple(entries)
    }

    pub fn identity() -> Self {
        MilnorTuple(Vec::new())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `Σ t_i (2^i - 1)`.
    pub fn grading(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(k, &t)| t as u64 * ((1u64 << (k + 1)) - 1))
            .sum()
    }

    /// `Σ t_i`.
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for MilnorTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "Sq({})", parts.join(","))
    }
}

/// All tuples of grading exactly `k` and weight at most `max_weight`.
///
/// Positions are filled from the highest down; a branch is cut as soon as
/// the remaining grading cannot be reached with the remaining weight. The
/// output lists tuples by increasing entry at the highest position, then
/// recursively at lower positions.
pub fn enumerate_tuples(k: u64, max_weight: Option<u32>) -> Vec<MilnorTuple> {
    if k == 0 {
        return vec![MilnorTuple::identity()];
    }
    let mut top = 0;
    while (1u64 << (top + 1)) - 1 <= k {
        top += 1;
    }
    let budget = max_weight.map_or(u64::MAX, u64::from);
    let mut out = Vec::new();
    let mut entries = vec![0u32; top];
    fill_position(top, k, budget, &mut entries, &mut out);
    out
}

fn fill_position(pos: usize, remaining: u64, budget: u64, entries: &mut [u32], out: &mut Vec<MilnorTuple>) {
    if remaining == 0 {
        out.push(MilnorTuple::new(entries.to_vec()));
        return;
    }
    if pos == 0 {
        return;
    }
    let cost = (1u64 << pos) - 1;
    // positions below this one add at most budget * cost
    if remaining > budget.saturating_mul(cost) {
        return;
    }
    let most = (remaining / cost).min(budget);
    for t in 0..=most {
        entries[pos - 1] = t as u32;
        fill_position(pos - 1, remaining - t * cost, budget - t, entries, out);
    }
    entries[pos - 1] = 0;
}

/// The binary shape of `n ≡ 1 (mod 4)`: `n = P_r + ... + P_1 + 1` with
/// `P_j = 2^{p_j}` and `p_r > ... > p_1 ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneModFour {
    pub n: usize,
    /// `p_1 < p_2 < ... < p_r`
    pub exps: Vec<u32>,
}

impl OneModFour {
    pub fn new(n: usize) -> Result<Self> {
        if n % 4 != 1 {
            return Err(Error::NotOneModFour { n });
        }
        let rest = (n - 1) as u64;
        let exps = (0..64).filter(|&k| rest >> k & 1 == 1).collect();
        Ok(OneModFour { n, exps })
    }

    pub fn r(&self) -> usize {
        self.exps.len()
    }

    /// `P_j`, with `P_0 = 1`.
    pub fn big_p(&self, j: usize) -> usize {
        if j == 0 {
            1
        } else {
            1 << self.exps[j - 1]
        }
    }

    /// `T_j = P_j + ... + P_1`, with `T_0 = 0`.
    pub fn t(&self, j: usize) -> usize {
        (1..=j).map(|k| self.big_p(k)).sum()
    }
}

/// The tuple with a single 1 at each position `p_j`, checked to be the only
/// tuple of grading `n - α(n)` and weight at most `α(n) - 1`.
pub fn beta_tuple(n: usize) -> Result<MilnorTuple> {
    let shape = OneModFour::new(n)?;
    if shape.r() == 0 {
        return Err(Error::InvalidArgument("n must be at least 5".into()));
    }
    let len = *shape.exps.last().unwrap() as usize;
    let mut entries = vec![0u32; len];
    for &p in &shape.exps {
        entries[p as usize - 1] = 1;
    }
    let beta = MilnorTuple::new(entries);
    let a = alpha(n as u64);
    let all = enumerate_tuples(n as u64 - a as u64, Some(a - 1));
    assert_eq!(all, vec![beta.clone()], "tuple uniqueness fails at n = {n}");
    Ok(beta)
}

/// `Sq(t)` applied to the squarefree monomial `mask`, in normal form.
pub fn act(t: &MilnorTuple, mask: Mask, ring: &BottRing) -> SqfreePoly {
    let factors: Vec<usize> = mask_vars(mask).collect();
    let weight = t.weight() as usize;
    if weight > factors.len() {
        return SqfreePoly::zero();
    }
    let mut counts = t.entries().to_vec();
    let mut exps = Vec::with_capacity(factors.len());
    let mut acc = MaskAccumulator::sparse();
    assign(&factors, factors.len() - weight, &mut counts, &mut exps, ring, &mut acc);
    acc.finish()
}

fn assign(
    factors: &[usize],
    untouched: usize,
    counts: &mut [u32],
    exps: &mut Vec<(u32, u32)>,
    ring: &BottRing,
    acc: &mut MaskAccumulator,
) {
    let Some((&x, rest)) = factors.split_first() else {
        let m = Monomial::from_pairs(exps.iter().copied()).expect("factor indices are positive");
        acc.add_poly(&ring.monomial_nf(&m).expect("factors lie in the ring"));
        return;
    };
    if untouched > 0 {
        exps.push((x as u32, 1));
        assign(rest, untouched - 1, counts, exps, ring, acc);
        exps.pop();
    }
    for k in 0..counts.len() {
        if counts[k] == 0 {
            continue;
        }
        counts[k] -= 1;
        exps.push((x as u32, 1 << (k + 1)));
        assign(rest, untouched, counts, exps, ring, acc);
        exps.pop();
        counts[k] += 1;
    }
}

/// `χSq^k(z)` as the sum of all Milnor basis elements of grading `k`.
/// Only tuples whose weight fits some monomial of `z` are enumerated.
pub fn chi_sq(k: u64, z: &SqfreePoly, ring: &BottRing) -> SqfreePoly {
    let Some(max_deg) = z.masks().iter().map(|m| m.count_ones()).max() else {
        return SqfreePoly::zero();
    };
    let tuples = enumerate_tuples(k, Some(max_deg));
    let mut acc = MaskAccumulator::sparse();
    for &m in z.masks() {
        for t in tuples.iter().filter(|t| t.weight() <= m.count_ones()) {
            acc.add_poly(&act(t, m, ring));
        }
    }
    acc.finish()
}

/// `x_{T_1} x_{T_2} ... x_{T_r} x_n`.
pub fn canonical_z(n: usize) -> Result<Monomial> {
    Ok(Monomial::from_mask(canonical_z_mask(n)?))
}

pub fn canonical_z_mask(n: usize) -> Result<Mask> {
    let shape = OneModFour::new(n)?;
    Ok((1..=shape.r()).fold(var_bit(n), |acc, j| acc | var_bit(shape.t(j))))
}

/// The terms of the permutation sum before reduction, and their total in normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermSum {
    pub terms: Vec<Monomial>,
    pub value: SqfreePoly,
}

/// Bijections `σ: {1..r+1} → {0..r}` with `σ(i) ≤ i`, as vectors indexed from 0.
pub fn admissible_bijections(r: usize) -> Vec<Vec<usize>> {
    fn extend(i: usize, r: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i > r {
            let last = (0..=r).find(|&v| !used[v]).expect("one value remains");
            let mut full = cur.clone();
            full.push(last);
            out.push(full);
            return;
        }
        for v in 0..=i {
            if used[v] {
                continue;
            }
            used[v] = true;
            cur.push(v);
            extend(i + 1, r, used, cur, out);
            cur.pop();
            used[v] = false;
        }
    }
    let mut out = Vec::new();
    extend(1, r, &mut vec![false; r + 1], &mut Vec::new(), &mut out);
    out
}

/// `Σ_σ Π_i x_{T_i}^{P_σ(i)} · x_n^{P_σ(r+1)}` in the main ring of dimension `n`.
pub fn permsum(n: usize) -> Result<PermSum> {
    permsum_in(&BottRing::main(n)?)
}

/// [`permsum`] evaluated in an existing main ring.
pub fn permsum_in(ring: &BottRing) -> Result<PermSum> {
    let n = ring.dim();
    let shape = OneModFour::new(n)?;
    let r = shape.r();
    if r == 0 {
        return Err(Error::InvalidArgument("n must be at least 5".into()));
    }
    let mut terms = Vec::new();
    let mut acc = MaskAccumulator::sparse();
    for sigma in admissible_bijections(r) {
        let pairs = (1..=r)
            .map(|i| (shape.t(i) as u32, shape.big_p(sigma[i - 1]) as u32))
            .chain(std::iter::once((n as u32, shape.big_p(sigma[r]) as u32)));
        let m = Monomial::from_pairs(pairs)?;
        acc.add_poly(&ring.monomial_nf(&m)?);
        terms.push(m);
    }
    Ok(PermSum {
        terms,
        value: acc.finish(),
    })
}
