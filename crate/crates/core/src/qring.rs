//! The chain ring `Q_m = Z_2[x_1..x_m] / (x_i^2 = x_{i-1} x_i, x_1^2 = 0)`.
//!
//! A degree-`m` monomial in `Q_m` is either `0` or `x_1 ... x_m`, and which
//! one is decided by its excess sequence `Δ_i = e_1 + ... + e_i - i`: the
//! monomial vanishes iff some `Δ_i` is positive. This gives an `O(m)` test
//! that the streaming verifier of `(x_1 + ... + x_m)^m = 0` relies on.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bott::{BottMatrix, BottRing};
use crate::error::{Error, Result};
use crate::poly2::{interval_mask, Monomial, Poly, SqfreePoly};
use crate::steenrod::OneModFour;

/// `(Δ_1, ..., Δ_m)` for an exponent sequence of length `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcessSequence(pub Vec<i64>);

fn check_degree(e: &[u32]) -> Result<()> {
    let degree: u64 = e.iter().map(|&x| x as u64).sum();
    if degree != e.len() as u64 {
        return Err(Error::InvalidArgument(format!(
            "exponent sequence of length {} has degree {degree}",
            e.len()
        )));
    }
    Ok(())
}

pub fn excess(e: &[u32]) -> Result<ExcessSequence> {
    check_degree(e)?;
    let mut sum = 0i64;
    Ok(ExcessSequence(
        e.iter()
            .enumerate()
            .map(|(i, &x)| {
                sum += x as i64;
                sum - (i as i64 + 1)
            })
            .collect(),
    ))
}

/// Largest `d` with `e_1 + ... + e_d > d`, if any.
#[inline]
fn max_overfull_prefix(e: &[u32]) -> Option<usize> {
    let mut sum = 0u64;
    let mut last = None;
    for (i, &x) in e.iter().enumerate() {
        sum += x as u64;
        if sum > i as u64 + 1 {
            last = Some(i + 1);
        }
    }
    last
}

/// Whether the degree-`m` monomial `x^e` is zero in `Q_m`.
pub fn is_zero_monomial(e: &[u32]) -> Result<bool> {
    check_degree(e)?;
    Ok(max_overfull_prefix(e).is_some())
}

/// Splitting of a zero monomial as `A · B` around its gap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// maximal `d` with `e_1 + ... + e_d > d`
    pub d: usize,
    /// `D = e_1 + ... + e_d`, the degree of `A`
    pub degree: usize,
    /// exponents of `A = x_1^{e_1} ... x_d^{e_d}`
    pub a: Vec<u32>,
    /// index of the vanishing exponent, `e_gap = 0`; always `d + 1 = D`
    pub gap_index: usize,
}

/// The `A · B` decomposition of a zero monomial; `None` when the monomial is
/// nonzero. Panics if the gap or the tail condition fails.
pub fn decompose(e: &[u32]) -> Result<Option<Decomposition>> {
    check_degree(e)?;
    let Some(d) = max_overfull_prefix(e) else {
        return Ok(None);
    };
    let degree: usize = e[..d].iter().map(|&x| x as usize).sum();
    assert_eq!(degree, d + 1, "overfull prefix of maximal length must have degree d + 1");
    assert_eq!(e[degree - 1], 0, "no gap after the maximal overfull prefix");
    // B = x_{D+1}^{e_{D+1}} ... x_m^{e_m} has no overfull prefix of its own
    let mut tail = 0usize;
    for (k, &x) in e[degree..].iter().enumerate() {
        tail += x as usize;
        assert!(tail <= k + 1, "tail is not equivalent to x_(D+1)...x_m");
    }
    Ok(Some(Decomposition {
        d,
        degree,
        a: e[..d].to_vec(),
        gap_index: degree,
    }))
}

/// `m = 2^p - 1` with `p ≥ 1`, or an error.
fn log_of_m(m: usize) -> Result<u32> {
    if m == 0 || !(m + 1).is_power_of_two() {
        return Err(Error::InvalidArgument(format!("m = {m} is not of the form 2^p - 1")));
    }
    Ok((m + 1).trailing_zeros())
}

/// `Π_{i<p} (m + 1 - 2^i)`, the number of monomials in the expansion.
pub fn expansion_count(m: usize) -> Result<u64> {
    let p = log_of_m(m)?;
    Ok((0..p).map(|i| (m + 1 - (1 << i)) as u64).product())
}

/// Lazy expansion of `Π_{i<p} (x_{2^i}^{2^i} + ... + x_m^{2^i})`: one
/// exponent sequence per choice of a summand from every factor.
pub struct ExpansionStream {
    m: usize,
    choice: Vec<usize>,
    exps: Vec<u32>,
    done: bool,
}

pub fn expand_stream(m: usize) -> Result<ExpansionStream> {
    let p = log_of_m(m)?;
    let choice: Vec<usize> = (0..p).map(|i| 1usize << i).collect();
    let mut exps = vec![0u32; m];
    for (i, &l) in choice.iter().enumerate() {
        exps[l - 1] += 1 << i;
    }
    Ok(ExpansionStream {
        m,
        choice,
        exps,
        done: false,
    })
}

impl ExpansionStream {
    /// Advances factors `from..` as an odometer, updating exponents in place.
    /// Returns false once every choice has been produced.
    fn advance(&mut self, from: usize) -> bool {
        for i in (from..self.choice.len()).rev() {
            let power = 1u32 << i;
            let l = self.choice[i];
            self.exps[l - 1] -= power;
            if l < self.m {
                self.choice[i] = l + 1;
                self.exps[l] += power;
                return true;
            }
            self.choice[i] = 1 << i;
            self.exps[(1 << i) - 1] += power;
        }
        false
    }

    fn fix_first(&mut self, l: usize) {
        self.exps[self.choice[0] - 1] -= 1;
        self.choice[0] = l;
        self.exps[l - 1] += 1;
    }
}

impl Iterator for ExpansionStream {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.exps.clone();
        self.done = !self.advance(0);
        Some(out)
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    total: u64,
    zero: u64,
    gaps: Vec<u64>,
    certificate_mismatches: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.total += other.total;
        self.zero += other.zero;
        if self.gaps.len() < other.gaps.len() {
            self.gaps.resize(other.gaps.len(), 0);
        }
        for (a, b) in self.gaps.iter_mut().zip(other.gaps) {
            *a += b;
        }
        self.certificate_mismatches += other.certificate_mismatches;
        self
    }
}

/// Tallies the expansion with the first factor fixed to `x_{first}`.
fn tally_slice(m: usize, first: usize, cross_check: bool) -> Tally {
    let mut stream = expand_stream(m).expect("m validated by the caller");
    stream.fix_first(first);
    let mut tally = Tally {
        gaps: vec![0; m + 1],
        ..Tally::default()
    };
    loop {
        tally.total += 1;
        if let Some(d) = max_overfull_prefix(&stream.exps) {
            tally.zero += 1;
            tally.gaps[d + 1] += 1;
        }
        if cross_check {
            let by_excess = max_overfull_prefix(&stream.exps).is_some();
            let by_gap = decompose(&stream.exps).expect("degree m").is_some();
            if by_excess != by_gap {
                tally.certificate_mismatches += 1;
            }
        }
        if !stream.advance(1) {
            return tally;
        }
    }
}

fn tally(m: usize, cross_check: bool) -> Tally {
    (1..=m)
        .into_par_iter()
        .map(|first| tally_slice(m, first, cross_check))
        .reduce(Tally::default, Tally::merge)
}

/// Count of expansion monomials of `(x_1 + ... + x_m)^m` by gap position
/// `D`, indexed `0..=m`.
pub fn gap_counts(m: usize) -> Result<Vec<u64>> {
    log_of_m(m)?;
    let mut gaps = tally(m, false).gaps;
    gaps.resize(m + 1, 0);
    Ok(gaps)
}

/// Number of expansion monomials whose gap sits at `x_D`.
pub fn gap_count(m: usize, d: usize) -> Result<u64> {
    if d == 0 || d > m {
        return Err(Error::InvalidArgument(format!("gap position {d} outside 1..{m}")));
    }
    Ok(gap_counts(m)?[d])
}

/// Parity ledger for `(x_1 + ... + x_m)^m = 0`, `m = 2^p - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyReport {
    pub p: u32,
    pub m: usize,
    pub total: u64,
    pub expected_total: u64,
    pub zero: u64,
    pub nonzero: u64,
    pub gap_counts: BTreeMap<usize, u64>,
    /// the stream sums to `(nonzero mod 2) · x_1 ... x_m`
    pub sum_is_zero: bool,
    /// generic rewriting of `(Σ x_i)^m` in the chain matrix, for `p ≤ 3`
    pub chain_rewrite_zero: Option<bool>,
    /// monomials where the excess test and the gap decomposition disagree,
    /// when the cross-check ran
    pub certificate_mismatches: Option<u64>,
}

impl KeyReport {
    pub fn total_even(&self) -> bool {
        self.total.is_multiple_of(2)
    }

    pub fn gaps_even(&self) -> bool {
        self.gap_counts.values().all(|c| c % 2 == 0)
    }

    pub fn verified(&self) -> bool {
        self.total == self.expected_total
            && self.total_even()
            && self.gaps_even()
            && self.gap_counts.values().sum::<u64>() == self.zero
            && self.nonzero.is_multiple_of(2)
            && self.sum_is_zero
            && self.chain_rewrite_zero.unwrap_or(true)
            && self.certificate_mismatches.unwrap_or(0) == 0
    }

    /// `{"total":…, "zero":…, "nonzero":…, "gap_counts":{…}}`
    pub fn stats(&self) -> KeyStats {
        KeyStats {
            total: self.total,
            zero: self.zero,
            nonzero: self.nonzero,
            gap_counts: self.gap_counts.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyStats {
    pub total: u64,
    pub zero: u64,
    pub nonzero: u64,
    pub gap_counts: BTreeMap<usize, u64>,
}

/// Exhaustively checks `(x_1 + ... + x_m)^m = 0` in `Q_m` for `m = 2^p - 1`.
/// With `cross_check`, every monomial is also classified by its gap
/// decomposition and the two certificates are compared.
pub fn verify_key(p: u32, cross_check: bool) -> Result<KeyReport> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!(
            "p = {p}: the identity requires p >= 2"
        )));
    }
    if p > 6 {
        return Err(Error::InvalidArgument(format!("p = {p} is beyond the exhaustive range")));
    }
    let m = (1usize << p) - 1;
    let t = tally(m, cross_check);
    let nonzero = t.total - t.zero;
    let gap_counts = t
        .gaps
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(d, &c)| (d, c))
        .collect();
    let chain_rewrite_zero = if p <= 3 {
        let ring = BottRing::new(BottMatrix::chain(m)?);
        Some(ring.normal_form(&Poly::var_sum(1, m as u32).pow(m as u32))?.is_zero())
    } else {
        None
    };
    Ok(KeyReport {
        p,
        m,
        total: t.total,
        expected_total: expansion_count(m)?,
        zero: t.zero,
        nonzero,
        gap_counts,
        sum_is_zero: nonzero.is_multiple_of(2),
        chain_rewrite_zero,
        certificate_mismatches: cross_check.then_some(t.certificate_mismatches),
    })
}

/// Default cap on the number of `L` monomials enumerated by [`verify_zero_a`].
pub const DEFAULT_ZERO_BUDGET: u128 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroCheck {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    /// number of `L` monomials enumerated
    pub cases: u64,
    pub all_zero: bool,
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1u128, |acc, t| acc * (n - t) / (t + 1))
}

/// `W · S^k` where `S = x_1 + ... + x_{n-2}`.
fn times_s_power(ring: &BottRing, w: SqfreePoly, k: usize) -> SqfreePoly {
    let s = interval_mask(1, ring.dim().saturating_sub(2));
    (0..k).fold(w, |acc, _| if acc.is_zero() { acc } else { ring.mul_linear(&acc, s) })
}

/// Multisets of size `k` over `1..=vars` as nondecreasing sequences.
fn for_each_multiset(vars: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut cur = vec![1usize; k];
    loop {
        if !f(&cur) {
            return false;
        }
        let Some(pos) = (0..k).rev().find(|&q| cur[q] < vars) else {
            return true;
        };
        let next = cur[pos] + 1;
        for slot in &mut cur[pos..] {
            *slot = next;
        }
    }
}

/// `L · (T_j - P_i, n] · S^{P_j - 1} = 0` in the main ring of dimension `n`
/// for every product `L` of `T_j - P_i - P_j + 1` classes `x_l`,
/// `l ≤ T_j - P_i - 1`, repeats allowed.
pub fn verify_zero_a(n: usize, i: usize, j: usize, budget: u128) -> Result<ZeroCheck> {
    let shape = OneModFour::new(n)?;
    if !(1 <= i && i < j && j <= shape.r()) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= i < j <= {}, got i = {i}, j = {j}",
            shape.r()
        )));
    }
    let lo = shape.t(j) - shape.big_p(i);
    let vars = lo - 1;
    let degree = shape.t(j) - shape.big_p(i) - shape.big_p(j) + 1;
    let count = binomial((vars + degree - 1) as u128, degree as u128);
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let ring = BottRing::main(n)?;
    let base = times_s_power(
        &ring,
        SqfreePoly::monomial(interval_mask(lo + 1, n)),
        shape.big_p(j) - 1,
    );
    let mut cases = 0u64;
    let all_zero = base.is_zero()
        || for_each_multiset(vars, degree, |ls| {
            cases += 1;
            let l = Monomial::from_pairs(ls.iter().map(|&v| (v as u32, 1))).expect("positive");
            let mut acc = base.clone();
            for &(v, e) in l.pairs() {
                for _ in 0..e {
                    acc = ring.mul_var(&acc, v as usize);
                }
            }
            acc.is_zero()
        });
    if base.is_zero() {
        cases = count as u64;
    }
    Ok(ZeroCheck {
        n,
        i,
        j,
        cases,
        all_zero,
    })
}

/// `[1, T_{j-1}] · [T_j, n] · S^{P_j - 1} = 0` in the main ring of dimension `n`.
pub fn verify_zero_b(n: usize, j: usize) -> Result<bool> {
    let shape = OneModFour::new(n)?;
    if !(1..=shape.r()).contains(&j) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= j <= {}, got j = {j}",
            shape.r()
        )));
    }
    let ring = BottRing::main(n)?;
    let start = interval_mask(1, shape.t(j - 1)) | interval_mask(shape.t(j), n);
    Ok(times_s_power(&ring, SqfreePoly::monomial(start), shape.big_p(j) - 1).is_zero())
}

/// Part-a checks, then `(j, holds)` for part b.
pub type ZeroResults = (Vec<ZeroCheck>, Vec<(usize, bool)>);

/// Every part-a case `(i, j)` and part-b case `j` for dimension `n`.
pub fn verify_zero_all(n: usize, budget: u128) -> Result<ZeroResults> {
    let r = OneModFour::new(n)?.r();
    let mut a = Vec::new();
    for j in 1..=r {
        for i in 1..j {
            a.push(verify_zero_a(n, i, j, budget)?);
        }
    }
    let b = (1..=r)
        .map(|j| Ok((j, verify_zero_b(n, j)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    // x_2^3 x_3 x_6^2 in Q_6
    const SAMPLE: [u32; 6] = [0, 3, 1, 0, 0, 2];

    #[test]
    fn excess_examples() {
        assert_eq!(excess(&SAMPLE).unwrap().0, vec![-1, 1, 1, 0, -1, 0]);
        assert_eq!(excess(&[1; 5]).unwrap().0, vec![0; 5]);
        assert_eq!(excess(&[0, 0, 0, 4]).unwrap().0, vec![-1, -2, -3, 0]);
        assert!(excess(&[1, 1]).is_ok());
        assert!(excess(&[2, 1]).is_err());
    }

    #[test]
    fn zero_test_examples() {
        assert!(is_zero_monomial(&SAMPLE).unwrap());
        assert!(!is_zero_monomial(&[1; 7]).unwrap());
        assert!(is_zero_monomial(&[2, 0, 1, 1]).unwrap());
        assert!(is_zero_monomial(&[2, 0, 1, 0]).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let dec = decompose(&SAMPLE).unwrap().unwrap();
        assert_eq!((dec.d, dec.degree, dec.gap_index), (3, 4, 4));
        assert_eq!(dec.a, vec![0, 3, 1]);
        assert_eq!(decompose(&[1; 6]).unwrap(), None);
        let dec = decompose(&[2, 0, 1, 1]).unwrap().unwrap();
        assert_eq!((dec.d, dec.degree, dec.gap_index), (1, 2, 2));
        assert_eq!(dec.a, vec![2]);
    }

    #[test]
    fn stream_counts() {
        assert_eq!(expand_stream(3).unwrap().count(), 6);
        assert_eq!(expand_stream(7).unwrap().count(), 168);
        assert_eq!(expansion_count(15).unwrap(), 20160);
        assert_eq!(expand_stream(15).unwrap().count(), 20160);
        assert!(expand_stream(6).is_err());
    }

    #[test]
    fn stream_matches_free_expansion() {
        // every streamed monomial is a term of Π_i (Σ_l x_l^{2^i}) before cancellation
        let m = 7;
        let mut free = Poly::one();
        for i in 0..3u32 {
            free = free.mul(&Poly::var_sum(1 << i, m as u32).frobenius(i));
        }
        let mut streamed = Poly::zero();
        for e in expand_stream(m).unwrap() {
            assert_eq!(e.iter().sum::<u32>(), m as u32);
            streamed.toggle(Monomial::from_exponents(&e));
        }
        // x_l^{2^i} with l < 2^i vanish in Q_m, so compare after reduction
        let ring = BottRing::new(BottMatrix::chain(m).unwrap());
        assert_eq!(
            ring.normal_form(&free).unwrap(),
            ring.normal_form(&streamed).unwrap()
        );
    }

    #[test]
    fn key_small() {
        for p in 2..=4 {
            let rep = verify_key(p, true).unwrap();
            assert!(rep.verified(), "{rep:?}");
        }
        let rep = verify_key(2, false).unwrap();
        assert_eq!(rep.total, 6);
        assert_eq!(rep.chain_rewrite_zero, Some(true));
        assert!(verify_key(1, false).is_err());
    }

    #[test]
    fn gap_counts_partition_zero_monomials() {
        for m in [3usize, 7] {
            let gaps = gap_counts(m).unwrap();
            let zero = expand_stream(m)
                .unwrap()
                .filter(|e| is_zero_monomial(e).unwrap())
                .count() as u64;
            assert_eq!(gaps.iter().sum::<u64>(), zero);
            for d in 1..=m {
                assert_eq!(gap_count(m, d).unwrap() % 2, 0, "m={m} D={d}");
            }
        }
    }

    #[test]
    fn zero_theorems_small() {
        let a = verify_zero_a(13, 1, 2, DEFAULT_ZERO_BUDGET).unwrap();
        assert!(a.all_zero);
        assert_eq!(a.cases, 7);
        assert!(verify_zero_a(13, 2, 1, DEFAULT_ZERO_BUDGET).is_err());
        assert!(verify_zero_b(5, 1).unwrap());
        assert!(verify_zero_b(13, 1).unwrap());
        assert!(verify_zero_b(13, 2).unwrap());
        let (a5, b5) = verify_zero_all(5, DEFAULT_ZERO_BUDGET).unwrap();
        assert!(a5.is_empty());
        assert_eq!(b5, vec![(1, true)]);
        assert!(matches!(
            verify_zero_a(29, 1, 3, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn zero_a_n21() {
        let check = verify_zero_a(21, 1, 2, DEFAULT_ZERO_BUDGET).unwrap();
        assert!(check.all_zero);
        assert_eq!(check.cases, 15);
    }

    #[test]
    fn multisets() {
        let mut seen = Vec::new();
        for_each_multiset(3, 2, |s| {
            seen.push(s.to_vec());
            true
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(binomial(4, 2), 6);
    }
}
