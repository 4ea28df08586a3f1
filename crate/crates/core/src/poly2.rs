//! Polynomials over the two-element field.
//!
//! [`Poly`] is an element of the free ring `Z_2[x_1, x_2, ...]`: a set of
//! monomials, where adding a monomial that is already present removes it.
//! [`SqfreePoly`] is the packed form used by the Bott rings, where every
//! monomial is squarefree and is stored as a bit mask (bit `i - 1` set iff
//! `x_i` divides the monomial).
//!
//! Both types render in the same text grammar, e.g. `x1*x5 + x3^2*x5`,
//! with `0` for the zero polynomial and `1` for the unit. Terms are listed
//! in the canonical order of [`Monomial`]; [`std::str::FromStr`] accepts
//! what [`std::fmt::Display`] writes.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Bit mask of a squarefree monomial: bit `i - 1` stands for `x_i`.
pub type Mask = u64;

/// Largest variable index that fits in a [`Mask`].
pub const MAX_MASK_VARS: usize = 64;

#[inline]
pub fn var_bit(i: usize) -> Mask {
    debug_assert!((1..=MAX_MASK_VARS).contains(&i));
    1u64 << (i - 1)
}

/// Mask of `x_lo * ... * x_hi`; empty when `lo > hi`.
pub fn interval_mask(lo: usize, hi: usize) -> Mask {
    if lo > hi || hi == 0 {
        return 0;
    }
    let lo = lo.max(1);
    let upper = if hi >= 64 { u64::MAX } else { (1u64 << hi) - 1 };
    let lower = (1u64 << (lo - 1)) - 1;
    upper & !lower
}

/// Iterates the variable indices (1-based, ascending) present in a mask.
pub fn mask_vars(mask: Mask) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i + 1)
        }
    })
}

/// A monomial `x_1^{e_1} ... x_k^{e_k}`; only positive exponents are stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    // sorted by variable, every exponent > 0
    exps: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(i: u32) -> Result<Self> {
        Self::from_pairs([(i, 1)])
    }

    /// Builds a monomial from `(variable, exponent)` pairs. Repeated variables
    /// multiply; zero exponents are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Result<Self> {
        let mut exps: Vec<(u32, u32)> = Vec::new();
        for (v, e) in pairs {
            if v == 0 {
                return Err(Error::ZeroVariable);
            }
            if e == 0 {
                continue;
            }
            exps.push((v, e));
        }
        exps.sort_unstable_by_key(|&(v, _)| v);
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(exps.len());
        for (v, e) in exps {
            match merged.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => merged.push((v, e)),
            }
        }
        Ok(Monomial { exps: merged })
    }

    /// Dense exponent vector `(e_1, ..., e_len)` starting at `x_1`.
    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial {
            exps: exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i as u32 + 1, e))
                .collect(),
        }
    }

    pub fn from_mask(mask: Mask) -> Self {
        Monomial {
            exps: mask_vars(mask).map(|v| (v as u32, 1)).collect(),
        }
    }

    /// The mask of a squarefree monomial, `None` otherwise.
    pub fn to_mask(&self) -> Option<Mask> {
        let mut mask = 0;
        for &(v, e) in &self.exps {
            if e != 1 || v as usize > MAX_MASK_VARS {
                return None;
            }
            mask |= var_bit(v as usize);
        }
        Some(mask)
    }

    pub fn degree(&self) -> u64 {
        self.exps.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn exponent(&self, var: u32) -> u32 {
        self.exps
            .binary_search_by_key(&var, |&(v, _)| v)
            .map(|k| self.exps[k].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn is_squarefree(&self) -> bool {
        self.exps.iter().all(|&(_, e)| e == 1)
    }

    pub fn max_var(&self) -> u32 {
        self.exps.last().map_or(0, |&(v, _)| v)
    }

    /// `(variable, exponent)` pairs in ascending variable order.
    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.exps
    }

    /// Dense exponent vector of length `len`.
    pub fn to_exponents(&self, len: usize) -> Vec<u32> {
        let mut out = vec![0; len];
        for &(v, e) in &self.exps {
            if let Some(slot) = out.get_mut(v as usize - 1) {
                *slot = e;
            }
        }
        out
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut a, mut b) = (self.exps.iter().peekable(), other.exps.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => {
                        out.push((va, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((vb, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((va, ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&p), None) => {
                    out.push(p);
                    a.next();
                }
                (None, Some(&&p)) => {
                    out.push(p);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial { exps: out }
    }

    pub fn pow(&self, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial {
            exps: self.exps.iter().map(|&(v, x)| (v, x * e)).collect(),
        }
    }
}

/// Graded order: lower degree first; within a degree, the monomial with the
/// larger exponent on the smallest differing variable comes first, so
/// `x1*x5 < x2*x5 < x3^2`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (&(va, ea), &(vb, eb)) in self.exps.iter().zip(other.exps.iter()) {
                if va != vb {
                    return if va < vb { Ordering::Less } else { Ordering::Greater };
                }
                if ea != eb {
                    return eb.cmp(&ea);
                }
            }
            other.exps.len().cmp(&self.exps.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        for (k, &(v, e)) in self.exps.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "x{v}")?;
            } else {
                write!(f, "x{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        if t == "1" {
            return Ok(Monomial::one());
        }
        let mut pairs = Vec::new();
        for factor in t.split('*') {
            let factor = factor.trim();
            let body = factor
                .strip_prefix('x')
                .ok_or_else(|| fail("factor must look like x<i> or x<i>^<e>"))?;
            let body = body.strip_prefix('_').unwrap_or(body);
            let (var, exp) = match body.split_once('^') {
                Some((v, e)) => (v.trim(), e.trim()),
                None => (body, "1"),
            };
            let var: u32 = var.parse().map_err(|_| fail("bad variable index"))?;
            let exp: u32 = exp.parse().map_err(|_| fail("bad exponent"))?;
            pairs.push((var, exp));
        }
        Monomial::from_pairs(pairs)
    }
}

/// Writes monomials in canonical order joined by ` + `.
fn write_terms(f: &mut fmt::Formatter<'_>, mut terms: Vec<Monomial>) -> fmt::Result {
    if terms.is_empty() {
        return f.write_str("0");
    }
    terms.sort();
    for (k, m) in terms.iter().enumerate() {
        if k > 0 {
            f.write_str(" + ")?;
        }
        write!(f, "{m}")?;
    }
    Ok(())
}

/// An element of the free polynomial ring over `Z_2`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    terms: HashSet<Monomial>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_monomial(Monomial::one())
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let mut p = Poly::zero();
        p.toggle(m);
        p
    }

    /// `x_i`; panics if `i == 0`.
    pub fn var(i: u32) -> Self {
        Self::from_monomial(Monomial::var(i).expect("variable index must be positive"))
    }

    /// The linear form `x_lo + ... + x_hi`.
    pub fn var_sum(lo: u32, hi: u32) -> Self {
        let mut p = Poly::zero();
        for i in lo.max(1)..=hi {
            p.toggle(Monomial { exps: vec![(i, 1)] });
        }
        p
    }

    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(ms: I) -> Self {
        let mut p = Poly::zero();
        for m in ms {
            p.toggle(m);
        }
        p
    }

    /// Adds one monomial; an equal monomial already present cancels.
    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    /// Terms in canonical order.
    pub fn sorted_terms(&self) -> Vec<Monomial> {
        let mut t: Vec<_> = self.terms.iter().cloned().collect();
        t.sort();
        t
    }

    pub fn max_var(&self) -> u32 {
        self.terms.iter().map(Monomial::max_var).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self, degree: u64) -> bool {
        self.terms.iter().all(|m| m.degree() == degree)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        Poly {
            terms: self.terms.symmetric_difference(&other.terms).cloned().collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for m in &other.terms {
            self.toggle(m.clone());
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.mul(b));
            }
        }
        out
    }

    /// `self^(2^k)`: in characteristic 2 this is the term-wise power.
    pub fn frobenius(&self, k: u32) -> Poly {
        let e = 1u32 << k;
        Poly {
            terms: self.terms.iter().map(|m| m.pow(e)).collect(),
        }
    }

    /// `self^e`, as the product of the Frobenius images for the binary digits of `e`.
    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        let mut k = 0;
        let mut rest = e;
        while rest != 0 {
            if rest & 1 == 1 {
                out = out.mul(&self.frobenius(k));
            }
            rest >>= 1;
            k += 1;
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter().cloned().collect())
    }
}

impl FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse {
                input: s.to_string(),
                reason: "empty input".into(),
            });
        }
        if t == "0" {
            return Ok(Poly::zero());
        }
        let mut p = Poly::zero();
        for term in t.split('+') {
            p.toggle(term.parse()?);
        }
        Ok(p)
    }
}

/// A sum of squarefree monomials, stored as a strictly increasing list of masks.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SqfreePoly {
    masks: Vec<Mask>,
}

impl SqfreePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        SqfreePoly { masks: vec![0] }
    }

    pub fn monomial(mask: Mask) -> Self {
        SqfreePoly { masks: vec![mask] }
    }

    /// Sums masks with cancellation of pairs.
    pub fn from_masks<I: IntoIterator<Item = Mask>>(masks: I) -> Self {
        let mut v: Vec<Mask> = masks.into_iter().collect();
        cancel_pairs(&mut v);
        SqfreePoly { masks: v }
    }

    /// Converts a free-ring polynomial whose terms are all squarefree.
    pub fn from_poly(p: &Poly) -> Result<Self> {
        let mut masks = Vec::with_capacity(p.len());
        for m in p.iter() {
            masks.push(m.to_mask().ok_or_else(|| Error::NotSquarefree(m.to_string()))?);
        }
        Ok(SqfreePoly::from_masks(masks))
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_monomials(self.masks.iter().map(|&m| Monomial::from_mask(m)))
    }

    pub fn masks(&self) -> &[Mask] {
        &self.masks
    }

    pub fn is_zero(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn contains(&self, mask: Mask) -> bool {
        self.masks.binary_search(&mask).is_ok()
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.masks.iter().all(|m| m.count_ones() == degree)
    }

    /// The degree-`d` part.
    pub fn homogeneous_part(&self, degree: u32) -> SqfreePoly {
        SqfreePoly {
            masks: self.masks.iter().copied().filter(|m| m.count_ones() == degree).collect(),
        }
    }

    pub fn add(&self, other: &SqfreePoly) -> SqfreePoly {
        let (a, b) = (&self.masks, &other.masks);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        SqfreePoly { masks: out }
    }

    pub fn add_assign(&mut self, other: &SqfreePoly) {
        *self = self.add(other);
    }

    /// Relabels variables: `x_i` becomes `x_{map(i)}`. The map must be injective.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> SqfreePoly {
        SqfreePoly::from_masks(
            self.masks
                .iter()
                .map(|&m| mask_vars(m).fold(0, |acc, v| acc | var_bit(map(v)))),
        )
    }
}

impl fmt::Display for SqfreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.masks.iter().map(|&m| Monomial::from_mask(m)).collect())
    }
}

impl FromStr for SqfreePoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SqfreePoly::from_poly(&s.parse::<Poly>()?)
    }
}

/// Sorts and removes masks occurring an even number of times.
fn cancel_pairs(v: &mut Vec<Mask>) {
    v.sort_unstable();
    let mut w = 0;
    let mut r = 0;
    while r < v.len() {
        let x = v[r];
        let mut run = 0;
        while r < v.len() && v[r] == x {
            run += 1;
            r += 1;
        }
        if run % 2 == 1 {
            v[w] = x;
            w += 1;
        }
    }
    v.truncate(w);
}

/// Collects masks with cancellation. Small rings use a dense bitset over all
/// `2^n` masks; larger ones fall back to a list that is cancelled on finish.
pub enum MaskAccumulator {
    Dense(Vec<u64>),
    Sparse(Vec<Mask>),
}

/// Rings with at most this many variables accumulate densely.
pub const DENSE_ACCUMULATOR_VARS: usize = 20;

impl MaskAccumulator {
    pub fn new(n: usize) -> Self {
        if n <= DENSE_ACCUMULATOR_VARS {
            let words = (1usize << n).div_ceil(64);
            MaskAccumulator::Dense(vec![0; words])
        } else {
            MaskAccumulator::Sparse(Vec::new())
        }
    }

    pub fn sparse() -> Self {
        MaskAccumulator::Sparse(Vec::new())
    }

    #[inline]
    pub fn toggle(&mut self, mask: Mask) {
        match self {
            MaskAccumulator::Dense(bits) => bits[(mask >> 6) as usize] ^= 1u64 << (mask & 63),
            MaskAccumulator::Sparse(v) => v.push(mask),
        }
    }

    pub fn add_poly(&mut self, p: &SqfreePoly) {
        for &m in p.masks() {
            self.toggle(m);
        }
    }

    pub fn finish(self) -> SqfreePoly {
        match self {
            MaskAccumulator::Dense(bits) => {
                let mut masks = Vec::new();
                for (w, &word) in bits.iter().enumerate() {
                    let mut rest = word;
                    while rest != 0 {
                        let b = rest.trailing_zeros() as u64;
                        masks.push(((w as u64) << 6) | b);
                        rest &= rest - 1;
                    }
                }
                SqfreePoly { masks }
            }
            MaskAccumulator::Sparse(v) => SqfreePoly::from_masks(v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn addition_cancels() {
        assert_eq!(p("x1").add(&p("x1")), Poly::zero());
        assert_eq!(p("x1").add(&p("x2")), p("x1 + x2"));
        assert_eq!(p("x1 + x2").add(&p("x2 + x3")), p("x1 + x3"));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(p("1 + x1").mul(&p("1 + x1")), p("1 + x1^2"));
        assert_eq!(p("x2").mul(&p("x2^2")), p("x2^3"));
        assert_eq!(p("x1 + x2").mul(&p("x1 + x2")), p("x1^2 + x2^2"));
    }

    #[test]
    fn power_examples() {
        assert_eq!(p("x1 + x2").pow(2), p("x1^2 + x2^2"));
        assert_eq!(p("x1 + x7^3").pow(0), Poly::one());
        assert_eq!(Poly::zero().pow(0), Poly::one());
    }

    #[test]
    fn cube_of_three_variable_sum_has_nine_terms() {
        // oracle: distribute (x1+x2+x3)*(x1+x2+x3)*(x1+x2+x3) by hand-rolled triple loop
        let vars = [1u32, 2, 3];
        let mut oracle = Poly::zero();
        for &a in &vars {
            for &b in &vars {
                for &c in &vars {
                    oracle.toggle(Monomial::from_pairs([(a, 1), (b, 1), (c, 1)]).unwrap());
                }
            }
        }
        let cube = Poly::var_sum(1, 3).pow(3);
        assert_eq!(cube, oracle);
        assert_eq!(cube, Poly::var_sum(1, 3).mul(&p("x1^2 + x2^2 + x3^2")));
        assert_eq!(cube.len(), 9);
    }

    #[test]
    fn rendering() {
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::one().to_string(), "1");
        assert_eq!(p("x5*x3^2").to_string(), "x3^2*x5");
        assert_eq!(p("x3*x5 + x1*x5 + x2*x5").to_string(), "x1*x5 + x2*x5 + x3*x5");
        assert_eq!(p("x1^2 + 1 + x1").to_string(), "1 + x1 + x1^2");
        assert_eq!(p("x2^2 + x1*x3").to_string(), "x1*x3 + x2^2");
    }

    #[test]
    fn parse_errors() {
        assert!("".parse::<Poly>().is_err());
        assert!("y1".parse::<Poly>().is_err());
        assert!("x0".parse::<Poly>().is_err());
        assert!("x1^".parse::<Poly>().is_err());
        assert!("x1^2".parse::<SqfreePoly>().is_err());
    }

    #[test]
    fn monomial_invariants() {
        let m = Monomial::from_pairs([(3, 2), (1, 0), (5, 1), (3, 1)]).unwrap();
        assert_eq!(m.pairs(), &[(3, 3), (5, 1)]);
        assert_eq!(m.degree(), 4);
        assert!(!m.is_squarefree());
        assert_eq!(m.to_mask(), None);
        let sq = Monomial::from_mask(0b10101);
        assert!(sq.is_squarefree());
        assert_eq!(sq.to_mask(), Some(0b10101));
        assert_eq!(sq.to_string(), "x1*x3*x5");
    }

    #[test]
    fn interval_masks() {
        assert_eq!(interval_mask(2, 4), 0b1110);
        assert_eq!(interval_mask(3, 2), 0);
        assert_eq!(interval_mask(1, 64), u64::MAX);
        assert_eq!(mask_vars(0b1010).collect::<Vec<_>>(), vec![2, 4]);
    }

    #[test]
    fn accumulators_agree() {
        let masks = [3u64, 5, 3, 9, 5, 5, 1000, 0];
        let mut dense = MaskAccumulator::new(10);
        let mut sparse = MaskAccumulator::sparse();
        for &m in &masks {
            dense.toggle(m);
            sparse.toggle(m);
        }
        let (d, s) = (dense.finish(), sparse.finish());
        assert_eq!(d, s);
        assert_eq!(d.masks(), &[0, 5, 9, 1000]);
    }

    fn arb_monomial() -> impl Strategy<Value = Monomial> {
        prop::collection::vec((1u32..=4, 0u32..=3), 0..4)
            .prop_map(|pairs| Monomial::from_pairs(pairs).unwrap())
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(arb_monomial(), 0..6).prop_map(Poly::from_monomials)
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert!(a.add(&a).is_zero());
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&Poly::one()), a.clone());
        }

        #[test]
        fn frobenius_is_additive(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.add(&b).pow(2), a.pow(2).add(&b.pow(2)));
        }

        #[test]
        fn pow_matches_repeated_multiplication(a in arb_poly(), e in 0u32..=8) {
            let mut repeated = Poly::one();
            for _ in 0..e {
                repeated = repeated.mul(&a);
            }
            prop_assert_eq!(a.pow(e), repeated);
        }

        #[test]
        fn text_round_trip(a in arb_poly()) {
            let back: Poly = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn sqfree_add_matches_free_ring(xs in prop::collection::vec(0u64..64, 0..10),
                                        ys in prop::collection::vec(0u64..64, 0..10)) {
            let (a, b) = (SqfreePoly::from_masks(xs), SqfreePoly::from_masks(ys));
            prop_assert_eq!(a.add(&b).to_poly(), a.to_poly().add(&b.to_poly()));
            let back: SqfreePoly = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
