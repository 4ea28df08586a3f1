//! Generalized Dold manifolds `P(n; m_1, ..., m_r)`.
//!
//! The cohomology is the truncated ring
//! `Z_2[c, d_1, ..., d_r] / (c^{n+1}, d_i^{m_i+1})` with `|c| = 1` and
//! `|d_i| = 2`, and the total Stiefel-Whitney class is
//! `(1 + c)^{n+1-r} Π_i (1 + c + d_i)^{m_i+1}`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bott::alpha_hat;
use crate::error::{Error, Result};

/// Truncated rings with more cells than this are refused.
pub const MAX_CELLS: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct DoldSpec {
    n: u32,
    ms: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    n: u32,
    ms: Vec<u32>,
}

impl TryFrom<SpecJson> for DoldSpec {
    type Error = Error;
    fn try_from(raw: SpecJson) -> Result<Self> {
        DoldSpec::new(raw.n, raw.ms)
    }
}

impl From<DoldSpec> for SpecJson {
    fn from(s: DoldSpec) -> Self {
        SpecJson { n: s.n, ms: s.ms }
    }
}

impl DoldSpec {
    pub fn new(n: u32, ms: Vec<u32>) -> Result<Self> {
        if ms.is_empty() {
            return Err(Error::InvalidDold("at least one projective factor is required".into()));
        }
        if ms.contains(&0) {
            return Err(Error::InvalidDold("projective dimensions must be positive".into()));
        }
        let spec = DoldSpec { n, ms };
        if spec.cells() > MAX_CELLS {
            return Err(Error::InvalidDold(format!(
                "truncated ring has {} cells, above the limit {MAX_CELLS}",
                spec.cells()
            )));
        }
        Ok(spec)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ms(&self) -> &[u32] {
        &self.ms
    }

    pub fn r(&self) -> usize {
        self.ms.len()
    }

    pub fn dimension(&self) -> usize {
        self.n as usize + 2 * self.ms.iter().map(|&m| m as usize).sum::<usize>()
    }

    /// Number of monomials `c^a d_1^{b_1} ... d_r^{b_r}` surviving truncation.
    pub fn cells(&self) -> usize {
        self.ms
            .iter()
            .fold(self.n as usize + 1, |acc, &m| acc.saturating_mul(m as usize + 1))
    }

    fn bounds(&self) -> Vec<u32> {
        std::iter::once(self.n).chain(self.ms.iter().copied()).collect()
    }
}

impl fmt::Display for DoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms: Vec<String> = self.ms.iter().map(u32::to_string).collect();
        write!(f, "P({};{})", self.n, ms.join(","))
    }
}

/// An element of the truncated ring as a dense bit grid over the cells.
/// Cell `(a, b_1, ..., b_r)` sits at `a + (n+1)(b_1 + (m_1+1)(b_2 + ...))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncPoly {
    bounds: Vec<u32>,
    bits: Vec<u64>,
}

impl TruncPoly {
    pub fn zero(spec: &DoldSpec) -> Self {
        let bounds = spec.bounds();
        let words = spec.cells().div_ceil(64);
        TruncPoly {
            bounds,
            bits: vec![0; words],
        }
    }

    pub fn one(spec: &DoldSpec) -> Self {
        let mut p = Self::zero(spec);
        p.toggle_index(0);
        p
    }

    /// `c^a Π d_i^{b_i}`, or an error if it is outside the truncation.
    pub fn monomial(spec: &DoldSpec, a: u32, bs: &[u32]) -> Result<Self> {
        let mut p = Self::zero(spec);
        let idx = p.index(a, bs)?;
        p.toggle_index(idx);
        Ok(p)
    }

    /// `1 + c^{2^k} + Σ_{i ∈ ds} d_i^{2^k}` with truncated terms dropped.
    fn frobenius_factor(spec: &DoldSpec, k: u32, ds: &[usize]) -> Self {
        let mut p = Self::one(spec);
        let e = 1u64 << k;
        let r = spec.r();
        if e <= spec.n as u64 {
            p.toggle_exps(&exps_with(r, 0, e as u32));
        }
        for &i in ds {
            if e <= spec.ms[i] as u64 {
                p.toggle_exps(&exps_with(r, i + 1, e as u32));
            }
        }
        p
    }

    fn cells(&self) -> usize {
        self.bounds.iter().map(|&b| b as usize + 1).product()
    }

    fn index(&self, a: u32, bs: &[u32]) -> Result<usize> {
        if bs.len() + 1 != self.bounds.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} d-exponents, got {}",
                self.bounds.len() - 1,
                bs.len()
            )));
        }
        let exps: Vec<u32> = std::iter::once(a).chain(bs.iter().copied()).collect();
        if exps.iter().zip(&self.bounds).any(|(e, b)| e > b) {
            return Err(Error::InvalidArgument(format!(
                "exponents {exps:?} exceed the truncation {:?}",
                self.bounds
            )));
        }
        Ok(self.encode(&exps))
    }

    fn encode(&self, exps: &[u32]) -> usize {
        exps.iter()
            .zip(&self.bounds)
            .rev()
            .fold(0usize, |acc, (&e, &b)| acc * (b as usize + 1) + e as usize)
    }

    fn decode(&self, mut idx: usize) -> Vec<u32> {
        self.bounds
            .iter()
            .map(|&b| {
                let base = b as usize + 1;
                let e = idx % base;
                idx /= base;
                e as u32
            })
            .collect()
    }

    fn toggle_index(&mut self, idx: usize) {
        self.bits[idx >> 6] ^= 1u64 << (idx & 63);
    }

    fn toggle_exps(&mut self, exps: &[u32]) {
        let idx = self.encode(exps);
        self.toggle_index(idx);
    }

    fn get_index(&self, idx: usize) -> bool {
        self.bits[idx >> 6] >> (idx & 63) & 1 == 1
    }

    fn nonzero_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Exponent vectors `(a, b_1, ..., b_r)` of the nonzero terms, by grading then lexicographically.
    pub fn terms(&self) -> Vec<Vec<u32>> {
        let mut t: Vec<Vec<u32>> = self.nonzero_cells().map(|i| self.decode(i)).collect();
        t.sort_by_key(|e| (grading(e), e.clone()));
        t
    }

    pub fn coefficient(&self, a: u32, bs: &[u32]) -> Result<bool> {
        Ok(self.get_index(self.index(a, bs)?))
    }

    pub fn add(&self, other: &TruncPoly) -> TruncPoly {
        assert_eq!(self.bounds, other.bounds, "operands from different rings");
        TruncPoly {
            bounds: self.bounds.clone(),
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Product with every term beyond a truncation bound deleted.
    pub fn mul(&self, other: &TruncPoly) -> TruncPoly {
        assert_eq!(self.bounds, other.bounds, "operands from different rings");
        let mut out = TruncPoly {
            bounds: self.bounds.clone(),
            bits: vec![0; self.bits.len()],
        };
        let rhs: Vec<Vec<u32>> = other.nonzero_cells().map(|i| other.decode(i)).collect();
        let mut prod = vec![0u32; self.bounds.len()];
        for i in self.nonzero_cells() {
            let lhs = self.decode(i);
            'terms: for t in &rhs {
                for (k, slot) in prod.iter_mut().enumerate() {
                    *slot = lhs[k] + t[k];
                    if *slot > self.bounds[k] {
                        continue 'terms;
                    }
                }
                out.toggle_exps(&prod);
            }
        }
        out
    }

    /// The part of total grading `k`.
    pub fn grade_part(&self, k: usize) -> TruncPoly {
        let mut out = TruncPoly {
            bounds: self.bounds.clone(),
            bits: vec![0; self.bits.len()],
        };
        for i in self.nonzero_cells() {
            if grading(&self.decode(i)) == k {
                out.toggle_index(i);
            }
        }
        out
    }

    /// Highest grading with a nonzero term.
    pub fn top_grade(&self) -> Option<usize> {
        self.nonzero_cells().map(|i| grading(&self.decode(i))).max()
    }
}

fn exps_with(r: usize, slot: usize, e: u32) -> Vec<u32> {
    let mut v = vec![0; r + 1];
    v[slot] = e;
    v
}

/// `a + 2 Σ b_i`.
fn grading(exps: &[u32]) -> usize {
    exps[0] as usize + 2 * exps[1..].iter().map(|&b| b as usize).sum::<usize>()
}

impl fmt::Display for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        let r = self.bounds.len() - 1;
        let rendered: Vec<String> = terms
            .iter()
            .map(|e| {
                let mut factors = Vec::new();
                let mut push = |name: String, x: u32| match x {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{x}")),
                };
                push("c".into(), e[0]);
                for (i, &b) in e[1..].iter().enumerate() {
                    push(if r == 1 { "d".into() } else { format!("d{}", i + 1) }, b);
                }
                if factors.is_empty() {
                    "1".into()
                } else {
                    factors.join("*")
                }
            })
            .collect();
        f.write_str(&rendered.join(" + "))
    }
}

pub fn trunc_mul(a: &TruncPoly, b: &TruncPoly) -> TruncPoly {
    a.mul(b)
}

/// `(1 + c)^{n+1-r} Π (1 + c + d_i)^{m_i+1}`.
pub fn total_sw_dold(spec: &DoldSpec) -> Result<TruncPoly> {
    let r = spec.r() as u32;
    if r > spec.n + 1 {
        return Err(Error::InvalidDold(format!(
            "{spec}: r = {r} exceeds n + 1, the exponent of (1 + c) would be negative"
        )));
    }
    let mut w = TruncPoly::one(spec);
    // (1 + y)^e = Π over the binary digits k of e of (1 + y^{2^k})
    let power = |w: &mut TruncPoly, e: u32, ds: &[usize]| {
        for k in 0..32 {
            if e >> k & 1 == 1 {
                *w = w.mul(&TruncPoly::frobenius_factor(spec, k, ds));
            }
        }
    };
    power(&mut w, spec.n + 1 - r, &[]);
    for (i, &m) in spec.ms.iter().enumerate() {
        power(&mut w, m + 1, &[i]);
    }
    Ok(w)
}

/// Graded inverse of the total class up to grading `up_to`:
/// `w̄_0 = 1`, `w̄_k = Σ_{j≥1} w_j w̄_{k-j}`.
pub fn dual_sw_dold(spec: &DoldSpec, up_to: usize) -> Result<TruncPoly> {
    if up_to > spec.dimension() {
        return Err(Error::DegreeTooLarge {
            requested: up_to,
            dim: spec.dimension(),
        });
    }
    let w = total_sw_dold(spec)?;
    let w_terms: Vec<Vec<u32>> = w
        .nonzero_cells()
        .map(|i| w.decode(i))
        .filter(|e| grading(e) > 0)
        .collect();

    let mut dual = TruncPoly::one(spec);
    let mut by_grade: Vec<Vec<usize>> = vec![Vec::new(); spec.dimension() + 1];
    for idx in 0..dual.cells() {
        by_grade[grading(&dual.decode(idx))].push(idx);
    }

    let mut prod = vec![0u32; dual.bounds.len()];
    for (g, cells) in by_grade.iter().enumerate().take(up_to + 1) {
        for &idx in cells {
            if !dual.get_index(idx) {
                continue;
            }
            let lhs = dual.decode(idx);
            'terms: for t in &w_terms {
                if g + grading(t) > up_to {
                    continue;
                }
                for (k, slot) in prod.iter_mut().enumerate() {
                    *slot = lhs[k] + t[k];
                    if *slot > dual.bounds[k] {
                        continue 'terms;
                    }
                }
                dual.toggle_exps(&prod);
            }
        }
    }
    Ok(dual)
}

pub fn coefficient(p: &TruncPoly, a: u32, bs: &[u32]) -> Result<bool> {
    p.coefficient(a, bs)
}

/// `C(p, q) mod 2`: odd iff every binary digit of `q` is at most the digit of `p`.
pub fn binom_parity(p: u64, q: u64) -> bool {
    q & !p == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoldReport {
    pub spec: DoldSpec,
    pub dimension: usize,
    pub alpha_hat: u32,
    pub grade: usize,
    pub orientable: bool,
    pub nonvanishing: bool,
}

impl DoldReport {
    pub fn verified(&self) -> bool {
        self.orientable && self.nonvanishing
    }
}

pub fn verify_dold(spec: &DoldSpec) -> Result<DoldReport> {
    let dimension = spec.dimension();
    let ah = alpha_hat(dimension as u64);
    let grade = dimension.saturating_sub(ah as usize);
    let w = total_sw_dold(spec)?;
    let orientable = w.grade_part(1).is_zero();
    let dual = dual_sw_dold(spec, grade)?;
    Ok(DoldReport {
        spec: spec.clone(),
        dimension,
        alpha_hat: ah,
        grade,
        orientable,
        nonvanishing: !dual.grade_part(grade).is_zero(),
    })
}

/// Nondecreasing sequences of `r` positive values summing to at most `max_sum`.
fn sorted_compositions(r: usize, max_sum: u32) -> Vec<Vec<u32>> {
    fn go(r: usize, min: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        let slots = (r - cur.len()) as u32;
        let mut v = min;
        while v * slots <= left {
            cur.push(v);
            go(r, v, left - v, cur, out);
            cur.pop();
            v += 1;
        }
    }
    let mut out = Vec::new();
    go(r, 1, max_sum, &mut Vec::new(), &mut out);
    out
}

/// Every spec of dimension `target_dim` with `1 ≤ r ≤ max_r`, `m_1 ≤ ... ≤ m_r`
/// and `r ≤ n + 1`, with its report. Sorted by `r`, then `ms`.
pub fn scan_dold_reports(target_dim: usize, max_r: usize) -> Result<Vec<DoldReport>> {
    if target_dim == 0 {
        return Err(Error::InvalidArgument("target dimension must be positive".into()));
    }
    let mut candidates = Vec::new();
    for r in 1..=max_r {
        for ms in sorted_compositions(r, (target_dim / 2) as u32) {
            let used = 2 * ms.iter().sum::<u32>() as usize;
            let n = (target_dim - used) as u32;
            if r as u32 <= n + 1 {
                candidates.push(DoldSpec::new(n, ms)?);
            }
        }
    }
    let mut reports = candidates
        .par_iter()
        .map(verify_dold)
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| (a.spec.r(), &a.spec.ms).cmp(&(b.spec.r(), &b.spec.ms)));
    Ok(reports)
}

/// Specs of dimension `target_dim` that are orientable with `w̄_{N-α̂(N)} ≠ 0`.
/// Exploratory: an empty list is not a statement that none exist beyond the bounds.
pub fn scan_dold(target_dim: usize, max_r: usize) -> Result<Vec<DoldSpec>> {
    Ok(scan_dold_reports(target_dim, max_r)?
        .into_iter()
        .filter(DoldReport::verified)
        .map(|r| r.spec)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly2::{Monomial, Poly};
    use proptest::prelude::*;

    fn spec(n: u32, ms: &[u32]) -> DoldSpec {
        DoldSpec::new(n, ms.to_vec()).unwrap()
    }

    /// Free-ring expansion with `c = x1`, `d_i = x_{i+1}`, truncated at the end.
    fn free_total_sw(s: &DoldSpec) -> TruncPoly {
        let r = s.r() as u32;
        let mut w = Poly::one();
        for _ in 0..(s.n + 1 - r) {
            w = w.mul(&"1 + x1".parse().unwrap());
        }
        for (i, &m) in s.ms.iter().enumerate() {
            let f: Poly = format!("1 + x1 + x{}", i + 2).parse().unwrap();
            for _ in 0..=m {
                w = w.mul(&f);
            }
        }
        truncate(s, &w)
    }

    fn truncate(s: &DoldSpec, p: &Poly) -> TruncPoly {
        let mut out = TruncPoly::zero(s);
        for m in p.iter() {
            let e = m.to_exponents(s.r() + 1);
            if let Ok(idx) = out.index(e[0], &e[1..]) {
                out.toggle_index(idx);
            }
        }
        out
    }

    fn pascal_parity(limit: usize) -> Vec<Vec<bool>> {
        let mut rows = vec![vec![true]];
        for p in 1..=limit {
            let prev = &rows[p - 1];
            let row = (0..=p)
                .map(|q| {
                    let left = if q > 0 { prev[q - 1] } else { false };
                    let right = prev.get(q).copied().unwrap_or(false);
                    left ^ right
                })
                .collect();
            rows.push(row);
        }
        rows
    }

    #[test]
    fn truncated_products() {
        let s = spec(1, &[2]);
        let c = TruncPoly::monomial(&s, 1, &[0]).unwrap();
        let d = TruncPoly::monomial(&s, 0, &[1]).unwrap();
        let d2 = TruncPoly::monomial(&s, 0, &[2]).unwrap();
        assert!(trunc_mul(&c, &c).is_zero());
        assert!(trunc_mul(&d, &d2).is_zero());
        let f = TruncPoly::one(&s).add(&c).add(&d);
        assert_eq!(trunc_mul(&f, &f), TruncPoly::one(&s).add(&d2));
        assert!(TruncPoly::monomial(&s, 2, &[0]).is_err());
    }

    #[test]
    fn p12_classes() {
        let s = spec(1, &[2]);
        let w = total_sw_dold(&s).unwrap();
        assert_eq!(w.to_string(), "1 + d + c*d + d^2");
        assert_eq!(w, free_total_sw(&s));
        assert!(w.grade_part(1).is_zero());
        assert!(coefficient(&w, 1, &[1]).unwrap());

        let dual = dual_sw_dold(&s, 5).unwrap();
        assert_eq!(dual.to_string(), "1 + d + c*d");
        assert!(coefficient(&dual, 1, &[1]).unwrap());
        assert!(!coefficient(&TruncPoly::zero(&s), 1, &[1]).unwrap());
        assert!(coefficient(&dual, 2, &[0]).is_err());
    }

    #[test]
    fn p21_first_class_vanishes() {
        let s = spec(2, &[1]);
        let w = total_sw_dold(&s).unwrap();
        assert_eq!(w, free_total_sw(&s));
        assert!(w.grade_part(1).is_zero());
    }

    #[test]
    fn too_many_factors() {
        assert!(total_sw_dold(&spec(0, &[1, 1])).is_err());
        assert!(DoldSpec::new(1, vec![]).is_err());
        assert!(DoldSpec::new(1, vec![0]).is_err());
    }

    #[test]
    fn spec_json() {
        let s: DoldSpec = serde_json::from_str(r#"{"n": 1, "ms": [2]}"#).unwrap();
        assert_eq!(s, spec(1, &[2]));
        assert_eq!(s.to_string(), "P(1;2)");
        assert!(serde_json::from_str::<DoldSpec>(r#"{"n": 1, "ms": []}"#).is_err());
    }

    #[test]
    fn binom_parity_matches_pascal() {
        let rows = pascal_parity(64);
        for (p, row) in rows.iter().enumerate() {
            for (q, &odd) in row.iter().enumerate() {
                assert_eq!(binom_parity(p as u64, q as u64), odd, "C({p},{q})");
            }
        }
        assert!(binom_parity(82, 2));
        assert!(binom_parity(17, 0));
        assert!(!binom_parity(2, 1));
    }

    #[test]
    fn proof_exponent_is_odd() {
        // e = f = 2, L = 5: p = 3*2^L - 2^{f+1} - 2^{e+1} + 2^e - 2
        let (e, f, l) = (2u32, 2u32, 5u32);
        let p = 3 * (1u64 << l) - (1 << (f + 1)) - (1 << (e + 1)) + (1 << e) - 2;
        assert_eq!(p, 82);
        assert!(binom_parity(p, (1 << e) - 2));
    }

    #[test]
    fn verify_examples() {
        let r = verify_dold(&spec(1, &[2])).unwrap();
        assert_eq!((r.dimension, r.grade), (5, 3));
        assert!(r.verified());
        let r = verify_dold(&spec(5, &[2])).unwrap();
        assert_eq!((r.dimension, r.grade), (9, 7));
        assert!(r.verified());
        let r = verify_dold(&spec(3, &[2, 4])).unwrap();
        assert_eq!((r.dimension, r.grade), (15, 10));
        assert!(r.verified());
        let dual = dual_sw_dold(&spec(3, &[2, 4]), 10).unwrap();
        assert!(coefficient(&dual, 2, &[1, 3]).unwrap());
    }

    #[test]
    fn scans() {
        assert!(scan_dold(5, 1).unwrap().contains(&spec(1, &[2])));
        assert!(scan_dold(15, 2).unwrap().contains(&spec(3, &[2, 4])));
        let four = scan_dold_reports(4, 2).unwrap();
        assert!(four.iter().all(|r| r.dimension == 4));
        let again = scan_dold_reports(4, 2).unwrap();
        assert_eq!(four, again);
    }

    fn arb_elem(s: DoldSpec) -> impl Strategy<Value = TruncPoly> {
        let r = s.r();
        let bounds = s.bounds();
        prop::collection::vec(
            prop::collection::vec(0u32..4, r + 1),
            0..6,
        )
        .prop_map(move |terms| {
            let mut p = TruncPoly::zero(&s);
            for e in terms {
                if e.iter().zip(&bounds).all(|(x, b)| x <= b) {
                    p.toggle_exps(&e);
                }
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_laws((a, b, c) in (arb_elem(spec(3, &[2, 1])), arb_elem(spec(3, &[2, 1])), arb_elem(spec(3, &[2, 1])))) {
            let one = TruncPoly::one(&spec(3, &[2, 1]));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&one), a.clone());
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn truncation_commutes_with_products(xs in prop::collection::vec(prop::collection::vec(0u32..3, 2), 0..5),
                                             ys in prop::collection::vec(prop::collection::vec(0u32..3, 2), 0..5)) {
            let s = spec(2, &[1]);
            let to_poly = |v: &Vec<Vec<u32>>| Poly::from_monomials(v.iter().map(|e| Monomial::from_exponents(e)));
            let (pa, pb) = (to_poly(&xs), to_poly(&ys));
            prop_assert_eq!(truncate(&s, &pa.mul(&pb)), truncate(&s, &pa).mul(&truncate(&s, &pb)));
        }

        #[test]
        fn dual_is_the_graded_inverse(n in 0u32..6, ms in prop::collection::vec(1u32..4, 1..3)) {
            prop_assume!(ms.len() as u32 <= n + 1);
            let s = DoldSpec::new(n, ms).unwrap();
            let w = total_sw_dold(&s).unwrap();
            let dual = dual_sw_dold(&s, s.dimension()).unwrap();
            prop_assert_eq!(w.mul(&dual), TruncPoly::one(&s));
        }
    }
}
