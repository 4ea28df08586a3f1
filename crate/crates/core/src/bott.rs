//! Real Bott manifolds and their mod-2 cohomology rings.
//!
//! A strictly upper-triangular binary matrix `A` defines the ring
//! `Z_2[x_1..x_n] / (x_j^2 = Λ_j x_j)` with `Λ_j = Σ_i a_{i,j} x_i` the
//! `j`-th column sum. The squarefree monomials form a basis, so every
//! element is held as a [`SqfreePoly`] in normal form.

use std::collections::BTreeSet;
use std::sync::Arc;

use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly2::{
    interval_mask, mask_vars, var_bit, Mask, MaskAccumulator, Monomial, Poly, SqfreePoly,
    DENSE_ACCUMULATOR_VARS, MAX_MASK_VARS,
};
use crate::steenrod;

/// Number of ones in the binary expansion of `n`.
pub fn alpha(n: u64) -> u32 {
    n.count_ones()
}

/// `α(n)` when `n ≡ 1 (mod 4)`, otherwise `α(n) + 1`.
pub fn alpha_hat(n: u64) -> u32 {
    if n % 4 == 1 {
        alpha(n)
    } else {
        alpha(n) + 1
    }
}

/// Largest grading at which an orientable `n`-manifold can have a nonzero dual class.
pub fn orientable_grade(n: usize) -> usize {
    n - alpha_hat(n as u64) as usize
}

/// A strictly upper-triangular `n × n` binary matrix, stored as the set of
/// 1-based positions `(i, j)`, `i < j`, holding a one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct BottMatrix {
    n: usize,
    ones: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    ones: Vec<[usize; 2]>,
}

impl TryFrom<MatrixJson> for BottMatrix {
    type Error = Error;

    fn try_from(raw: MatrixJson) -> Result<Self> {
        BottMatrix::new(raw.n, raw.ones.into_iter().map(|[i, j]| (i, j)))
    }
}

impl From<BottMatrix> for MatrixJson {
    fn from(m: BottMatrix) -> Self {
        MatrixJson {
            n: m.n,
            ones: m.ones.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }
}

impl BottMatrix {
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(n: usize, ones: I) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if n > MAX_MASK_VARS {
            return Err(Error::InvalidMatrix(format!(
                "dimension {n} exceeds the supported maximum {MAX_MASK_VARS}"
            )));
        }
        let mut set = BTreeSet::new();
        for (i, j) in ones {
            if i == 0 || j > n {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({i}, {j}) is outside 1..{n}"
                )));
            }
            if i >= j {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({i}, {j}) is not strictly above the diagonal"
                )));
            }
            set.insert((i, j));
        }
        Ok(BottMatrix { n, ones: set })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    /// The matrix giving `x_i^2 = x_{i-1} x_i` for `2 ≤ i ≤ n-1`,
    /// `x_n^2 = (x_1 + ... + x_{n-2}) x_n` and `x_1^2 = 0`.
    pub fn main(n: usize) -> Result<Self> {
        let m = n.saturating_sub(2);
        Self::new(n, (1..=m).map(|i| (i, i + 1)).chain((1..=m).map(|i| (i, n))))
    }

    /// The chain ring `Q_m`: `x_i^2 = x_{i-1} x_i` for `i ≥ 2`, `x_1^2 = 0`.
    pub fn chain(m: usize) -> Result<Self> {
        Self::new(m, (2..=m).map(|i| (i - 1, i)))
    }

    /// Ones at `(i, i+1), ..., (i, i+width)` for every row where all of them fit.
    pub fn banded(n: usize, width: usize) -> Result<Self> {
        let rows = n.saturating_sub(width);
        Self::new(
            n,
            (1..=rows).flat_map(|i| (1..=width).map(move |k| (i, i + k))),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ones.iter().copied()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.ones.contains(&(i, j))
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.ones.iter().filter(|&&(r, _)| r == i).count()
    }

    /// `Λ_j` as a mask over `x_1..x_{j-1}`.
    pub fn column_mask(&self, j: usize) -> Mask {
        self.ones
            .iter()
            .filter(|&&(_, c)| c == j)
            .fold(0, |acc, &(i, _)| acc | var_bit(i))
    }

    /// Row-parity criterion: every row holds an even number of ones.
    pub fn is_orientable(&self) -> bool {
        (1..=self.n).all(|i| self.row_count(i).is_multiple_of(2))
    }

    /// The manifold times `k` circles: `k` zero rows and columns appended.
    pub fn extend_with_circles(&self, k: usize) -> Result<Self> {
        Self::new(self.n + k, self.ones.iter().copied())
    }

    /// Compact matrix JSON, `{"n":5,"ones":[[1,2],...]}`.
    pub fn to_json(&self) -> String {
        let ones: Vec<String> = self.ones.iter().map(|(i, j)| format!("[{i},{j}]")).collect();
        format!("{{\"n\":{},\"ones\":[{}]}}", self.n, ones.join(","))
    }
}

fn chain_down(mask: Mask, mut i: usize) -> Option<Mask> {
    // x_i * mask with x_i present walks to the first absent lower variable
    while i >= 1 {
        if mask & var_bit(i) == 0 {
            return Some(mask | var_bit(i));
        }
        i -= 1;
    }
    None
}

/// The cohomology ring of a Bott manifold with a memo of multi-term
/// rewrites. The memo is a concurrent map with idempotent inserts.
pub struct BottRing {
    matrix: BottMatrix,
    columns: Vec<Mask>,
    memo: DashMap<(Mask, u8), Arc<[Mask]>>,
}

impl BottRing {
    pub fn new(matrix: BottMatrix) -> Self {
        let columns = (0..=matrix.n)
            .map(|j| if j == 0 { 0 } else { matrix.column_mask(j) })
            .collect();
        BottRing {
            matrix,
            columns,
            memo: DashMap::new(),
        }
    }

    pub fn main(n: usize) -> Result<Self> {
        Ok(Self::new(BottMatrix::main(n)?))
    }

    pub fn matrix(&self) -> &BottMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.n
    }

    /// Mask of the fundamental class `x_1 ... x_n`.
    pub fn top_mask(&self) -> Mask {
        interval_mask(1, self.dim())
    }

    pub fn column(&self, j: usize) -> Mask {
        self.columns[j]
    }

    fn accumulator(&self, expected_terms: usize) -> MaskAccumulator {
        let n = self.dim();
        if n <= DENSE_ACCUMULATOR_VARS && expected_terms.saturating_mul(64) >= (1usize << n) {
            MaskAccumulator::new(n)
        } else {
            MaskAccumulator::sparse()
        }
    }

    /// Adds `x_i * mask` (in normal form) to `acc`.
    fn mul_var_into(&self, mask: Mask, mut i: usize, acc: &mut MaskAccumulator) {
        loop {
            let bit = var_bit(i);
            if mask & bit == 0 {
                acc.toggle(mask | bit);
                return;
            }
            // x_i^2 = Λ_i x_i
            let col = self.columns[i];
            match col.count_ones() {
                0 => return,
                1 => i = col.trailing_zeros() as usize + 1,
                _ => {
                    for &m in self.rewrite_memo(mask, i).iter() {
                        acc.toggle(m);
                    }
                    return;
                }
            }
        }
    }

    fn rewrite_memo(&self, mask: Mask, i: usize) -> Arc<[Mask]> {
        let key = (mask, i as u8);
        if let Some(hit) = self.memo.get(&key) {
            return Arc::clone(hit.value());
        }
        let mut local = MaskAccumulator::sparse();
        for l in mask_vars(self.columns[i]) {
            self.mul_var_into(mask, l, &mut local);
        }
        let value: Arc<[Mask]> = local.finish().masks().into();
        self.memo.insert(key, Arc::clone(&value));
        value
    }

    fn check_var(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.dim() {
            return Err(Error::VariableOutOfRange {
                var: i as u32,
                n: self.dim(),
            });
        }
        Ok(())
    }

    /// `x_i * p`.
    pub fn mul_var(&self, p: &SqfreePoly, i: usize) -> SqfreePoly {
        let mut acc = self.accumulator(p.len());
        for &m in p.masks() {
            self.mul_var_into(m, i, &mut acc);
        }
        acc.finish()
    }

    /// `(Σ_{i ∈ linear} x_i) * p`.
    pub fn mul_linear(&self, p: &SqfreePoly, linear: Mask) -> SqfreePoly {
        let mut acc = self.accumulator(p.len() * linear.count_ones() as usize);
        for &m in p.masks() {
            for i in mask_vars(linear) {
                self.mul_var_into(m, i, &mut acc);
            }
        }
        acc.finish()
    }

    /// `p` times the squarefree monomial `mask`, one variable at a time.
    pub fn mul_monomial_mask(&self, p: &SqfreePoly, mask: Mask) -> SqfreePoly {
        let mut acc = p.clone();
        for i in mask_vars(mask) {
            if acc.is_zero() {
                break;
            }
            acc = self.mul_var(&acc, i);
        }
        acc
    }

    pub fn mul(&self, a: &SqfreePoly, b: &SqfreePoly) -> SqfreePoly {
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let mut acc = self.accumulator(large.len());
        for &m in small.masks() {
            acc.add_poly(&self.mul_monomial_mask(large, m));
        }
        acc.finish()
    }

    pub fn pow(&self, a: &SqfreePoly, e: u32) -> SqfreePoly {
        let mut out = SqfreePoly::one();
        for _ in 0..e {
            if out.is_zero() {
                break;
            }
            out = self.mul(&out, a);
        }
        out
    }

    /// Normal form of one monomial. Each factor `x_j` is multiplied in, lowest
    /// variable first, and `x_j^2` is rewritten to `Λ_j x_j` on contact.
    pub fn monomial_nf(&self, m: &Monomial) -> Result<SqfreePoly> {
        let mut acc = SqfreePoly::one();
        for &(v, e) in m.pairs() {
            self.check_var(v as usize)?;
            for _ in 0..e {
                if acc.is_zero() {
                    return Ok(acc);
                }
                acc = self.mul_var(&acc, v as usize);
            }
        }
        Ok(acc)
    }

    pub fn normal_form(&self, p: &Poly) -> Result<SqfreePoly> {
        let mut acc = self.accumulator(p.len());
        for m in p.iter() {
            acc.add_poly(&self.monomial_nf(m)?);
        }
        Ok(acc.finish())
    }

    /// Coefficient of `x_1 ... x_n` in a homogeneous degree-`n` polynomial.
    pub fn top_coefficient(&self, p: &Poly) -> Result<bool> {
        if !p.is_homogeneous(self.dim() as u64) {
            return Err(Error::NotHomogeneous { expected: self.dim() });
        }
        self.top_bit(&self.normal_form(p)?)
    }

    /// Same as [`Self::top_coefficient`] for an element already in normal form.
    pub fn top_bit(&self, p: &SqfreePoly) -> Result<bool> {
        if !p.is_homogeneous(self.dim() as u32) {
            return Err(Error::NotHomogeneous { expected: self.dim() });
        }
        // the only squarefree monomial of degree n is the top class
        debug_assert!(p.len() <= 1);
        Ok(p.contains(self.top_mask()))
    }

    /// `[x * w_0, x * w_1, ..., x * w_max]` where `w = Π_j (1 + Λ_j)`.
    /// Each factor is applied as a linear form, so `w_j` itself is never
    /// materialized.
    pub fn times_total_sw(&self, x: &SqfreePoly, max: usize) -> Vec<SqfreePoly> {
        let mut graded = vec![SqfreePoly::zero(); max + 1];
        graded[0] = x.clone();
        for j in 1..=self.dim() {
            let col = self.columns[j];
            if col == 0 {
                continue;
            }
            for t in (1..=max).rev() {
                if graded[t - 1].is_zero() {
                    continue;
                }
                let step = self.mul_linear(&graded[t - 1], col);
                graded[t].add_assign(&step);
            }
        }
        graded
    }

    /// First Stiefel-Whitney class as a linear mask: `w_1 = Σ_j Λ_j`.
    pub fn w1_mask(&self) -> Mask {
        self.columns.iter().fold(0, |acc, &c| acc ^ c)
    }

    /// The graded formal inverse of `w` up to grade `up_to`, `w̄_0 = 1` and
    /// `w̄_k = Σ_{j=1}^k w_j w̄_{k-j}`, one grade at a time.
    pub fn dual_sw(&self, up_to: usize) -> Result<GradedClasses> {
        if up_to > self.dim() {
            return Err(Error::DegreeTooLarge {
                requested: up_to,
                dim: self.dim(),
            });
        }
        let mut dual = vec![SqfreePoly::zero(); up_to + 1];
        let mut pending = vec![SqfreePoly::zero(); up_to + 1];
        dual[0] = SqfreePoly::one();
        for m in 0..=up_to {
            if m > 0 {
                dual[m] = std::mem::take(&mut pending[m]);
            }
            if m == up_to || dual[m].is_zero() {
                continue;
            }
            let products = self.times_total_sw(&dual[m], up_to - m);
            for (j, prod) in products.iter().enumerate().skip(1) {
                pending[m + j].add_assign(prod);
            }
        }
        Ok(GradedClasses { by_degree: dual })
    }

    pub fn total_sw(&self) -> GradedClasses {
        GradedClasses {
            by_degree: self.times_total_sw(&SqfreePoly::one(), self.dim()),
        }
    }
}

pub fn total_sw(m: &BottMatrix) -> GradedClasses {
    BottRing::new(m.clone()).total_sw()
}

pub fn dual_sw(m: &BottMatrix, up_to: usize) -> Result<GradedClasses> {
    BottRing::new(m.clone()).dual_sw(up_to)
}

pub fn normal_form(p: &Poly, m: &BottMatrix) -> Result<SqfreePoly> {
    BottRing::new(m.clone()).normal_form(p)
}

/// Homogeneous classes indexed by degree, each in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedClasses {
    pub by_degree: Vec<SqfreePoly>,
}

impl GradedClasses {
    /// Degree-`k` part; zero beyond the stored range.
    pub fn get(&self, k: usize) -> SqfreePoly {
        self.by_degree.get(k).cloned().unwrap_or_default()
    }

    pub fn max_degree(&self) -> usize {
        self.by_degree.len().saturating_sub(1)
    }

    pub fn total(&self) -> SqfreePoly {
        self.by_degree
            .iter()
            .fold(SqfreePoly::zero(), |acc, p| acc.add(p))
    }

    /// Highest degree with a nonzero class.
    pub fn top_nonzero(&self) -> Option<usize> {
        self.by_degree.iter().rposition(|p| !p.is_zero())
    }

    /// `degree,class` rows, with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,class\n");
        for (k, p) in self.by_degree.iter().enumerate() {
            out.push_str(&format!("{k},{p}\n"));
        }
        out
    }
}

/// Closed form of `x_i^e` in the ring of [`BottMatrix::main`]`(n)`, computed
/// from block products without the generic rewriting.
pub fn power_closed_form(i: usize, e: u32, n: usize) -> Result<SqfreePoly> {
    if n == 0 || n > MAX_MASK_VARS {
        return Err(Error::InvalidArgument(format!("dimension {n} out of range")));
    }
    if i == 0 || i > n {
        return Err(Error::VariableOutOfRange { var: i as u32, n });
    }
    if e == 0 {
        return Ok(SqfreePoly::one());
    }
    if i < n {
        return Ok(block_power(i, e).map_or_else(SqfreePoly::zero, SqfreePoly::monomial));
    }
    if !e.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { i, e });
    }
    // x_n^{2^p} = (x_1 + ... + x_{n-2})^{2^p - 1} x_n, with the power split
    // into Frobenius factors Σ_l x_l^{2^k}, k < p
    let p = e.trailing_zeros();
    let top = n.saturating_sub(2);
    let mut partial: Vec<Mask> = vec![0];
    for k in 0..p {
        let mut next = Vec::new();
        for &acc in &partial {
            for l in 1..=top {
                if let Some(block) = block_power(l, 1 << k) {
                    if let Some(prod) = chain_product(acc, block) {
                        next.push(prod);
                    }
                }
            }
        }
        partial = SqfreePoly::from_masks(next).masks().to_vec();
    }
    Ok(SqfreePoly::from_masks(
        partial.into_iter().map(|m| m | var_bit(n)),
    ))
}

/// `x_i^e = x_{i-e+1} ... x_i` for a chain variable, `None` when `e > i`.
fn block_power(i: usize, e: u32) -> Option<Mask> {
    let e = e as usize;
    (e <= i).then(|| interval_mask(i + 1 - e, i))
}

/// Product of two squarefree monomials under the chain relations
/// `x_l^2 = x_{l-1} x_l`, `x_1^2 = 0`; a single monomial or zero.
fn chain_product(a: Mask, b: Mask) -> Option<Mask> {
    let mut acc = a;
    for l in mask_vars(b) {
        acc = chain_down(acc, l)?;
    }
    Some(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Steenrod,
    Both,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "steenrod" => Ok(Method::Steenrod),
            "both" => Ok(Method::Both),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// Default largest `n` for which `verify_main` materializes the dual classes.
pub const DEFAULT_DIRECT_CAP: usize = 17;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct MethodBits {
    pub direct: Option<bool>,
    pub steenrod: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainReport {
    pub n: usize,
    pub alpha_hat: u32,
    pub grade: usize,
    pub orientable: bool,
    pub methods: MethodBits,
}

impl MainReport {
    /// Orientable, and every method that ran found the class nonzero.
    pub fn verified(&self) -> bool {
        let bits = [self.methods.direct, self.methods.steenrod];
        self.orientable && bits.iter().any(Option::is_some) && bits.iter().flatten().all(|&b| b)
    }

    pub fn methods_agree(&self) -> bool {
        match (self.methods.direct, self.methods.steenrod) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }
}

/// The manifold used for dimension `n`: the main family when `n ≡ 1 (mod 4)`,
/// otherwise the largest such `m < n` times `n - m` circles.
pub fn main_family_matrix(n: usize) -> Result<(BottMatrix, usize)> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if n.is_multiple_of(4) {
        return Err(Error::UnsupportedDimension { n });
    }
    let core = n - (n + 3) % 4;
    Ok((BottMatrix::main(core)?.extend_with_circles(n - core)?, core))
}

/// Checks orientability and `w̄_{n-α̂(n)} ≠ 0` for the main-family manifold
/// of dimension `n`.
///
/// The direct method materializes the dual classes of the full matrix. The
/// Steenrod method evaluates the permutation sum on the `n ≡ 1 (mod 4)`
/// core.
pub fn verify_main(n: usize, method: Method, direct_cap: usize) -> Result<MainReport> {
    let (matrix, core) = main_family_matrix(n)?;
    if matches!(method, Method::Direct | Method::Both) && n > direct_cap {
        return Err(Error::ExceedsDirectCap { n, cap: direct_cap });
    }
    let ring = BottRing::new(matrix);
    let grade = orientable_grade(n);
    debug_assert_eq!(grade, orientable_grade(core));

    let parity = ring.matrix().is_orientable();
    let w1_zero = ring.w1_mask() == 0;
    assert_eq!(
        parity, w1_zero,
        "row parity and w_1 disagree; the ring construction is broken"
    );

    let mut methods = MethodBits::default();
    if matches!(method, Method::Direct | Method::Both) {
        methods.direct = Some(!ring.dual_sw(grade)?.get(grade).is_zero());
    }
    if matches!(method, Method::Steenrod | Method::Both) {
        let bit = if core == 1 {
            // w̄_0 = 1
            true
        } else {
            let core_ring = BottRing::main(core)?;
            core_ring.top_bit(&steenrod::permsum_in(&core_ring)?.value)?
        };
        methods.steenrod = Some(bit);
    }
    Ok(MainReport {
        n,
        alpha_hat: alpha_hat(n as u64),
        grade,
        orientable: parity,
        methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn sq(s: &str) -> SqfreePoly {
        s.parse().unwrap()
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(5), 2);
        assert_eq!(alpha(12), 2);
        for k in 0..20 {
            assert_eq!(alpha(1 << k), 1);
        }
        assert_eq!(alpha_hat(5), 2);
        assert_eq!(alpha_hat(12), 3);
        assert_eq!(alpha_hat(1), 1);
    }

    #[test]
    fn main_matrix_shape() {
        let m = BottMatrix::main(5).unwrap();
        let ones: Vec<_> = m.ones().collect();
        assert_eq!(ones, vec![(1, 2), (1, 5), (2, 3), (2, 5), (3, 4), (3, 5)]);
        assert_eq!(BottMatrix::main(1).unwrap().ones().count(), 0);
        assert_eq!(BottMatrix::main(2).unwrap().ones().count(), 0);
        assert_eq!(m.column_mask(5), 0b00111);
        assert_eq!(m.column_mask(1), 0);
    }

    #[test]
    fn invalid_matrices() {
        assert!(BottMatrix::new(3, [(2, 2)]).is_err());
        assert!(BottMatrix::new(3, [(3, 1)]).is_err());
        assert!(BottMatrix::new(3, [(1, 4)]).is_err());
        assert!(BottMatrix::new(3, [(0, 2)]).is_err());
        assert!(BottMatrix::new(0, []).is_err());
        assert!(BottMatrix::new(65, []).is_err());
    }

    #[test]
    fn orientability() {
        assert!(BottMatrix::main(5).unwrap().is_orientable());
        assert!(!BottMatrix::new(2, [(1, 2)]).unwrap().is_orientable());
        assert!(BottMatrix::zero(4).unwrap().is_orientable());
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = BottMatrix::main(5).unwrap();
        let text = m.to_json();
        assert_eq!(text, r#"{"n":5,"ones":[[1,2],[1,5],[2,3],[2,5],[3,4],[3,5]]}"#);
        let back: BottMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<BottMatrix>(r#"{"n":3,"ones":[[2,1]]}"#).is_err());
    }

    #[test]
    fn normal_form_examples() {
        let ring = BottRing::main(5).unwrap();
        assert_eq!(ring.normal_form(&p("x2^2")).unwrap(), sq("x1*x2"));
        assert_eq!(ring.normal_form(&p("x4^3")).unwrap(), sq("x2*x3*x4"));
        assert_eq!(ring.normal_form(&p("x3^4")).unwrap(), SqfreePoly::zero());
        assert_eq!(
            ring.normal_form(&p("x5^2")).unwrap(),
            sq("x1*x5 + x2*x5 + x3*x5")
        );
        assert_eq!(
            ring.normal_form(&p("x6")),
            Err(Error::VariableOutOfRange { var: 6, n: 5 })
        );
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(power_closed_form(4, 4, 5).unwrap(), sq("x1*x2*x3*x4"));
        assert_eq!(power_closed_form(3, 4, 5).unwrap(), SqfreePoly::zero());
        assert_eq!(
            power_closed_form(5, 2, 5).unwrap(),
            sq("x1*x5 + x2*x5 + x3*x5")
        );
        assert_eq!(
            power_closed_form(5, 3, 5),
            Err(Error::NotPowerOfTwo { i: 5, e: 3 })
        );
    }

    #[test]
    fn total_sw_small_cases() {
        let torus = total_sw(&BottMatrix::zero(4).unwrap());
        assert_eq!(torus.total(), SqfreePoly::one());

        // oracle: expand (1+x1)(1+x2)(1+x3)(1+x1+x2+x3) in the free ring, then reduce
        let ring = BottRing::main(5).unwrap();
        let free = p("1 + x1")
            .mul(&p("1 + x2"))
            .mul(&p("1 + x3"))
            .mul(&p("1 + x1 + x2 + x3"));
        let w = ring.total_sw();
        assert_eq!(w.total(), ring.normal_form(&free).unwrap());
        assert!(w.get(1).is_zero());
    }

    #[test]
    fn dual_sw_examples() {
        let torus = dual_sw(&BottMatrix::zero(3).unwrap(), 3).unwrap();
        assert_eq!(torus.total(), SqfreePoly::one());

        let ring = BottRing::main(5).unwrap();
        let dual = ring.dual_sw(5).unwrap();
        assert!(!dual.get(3).is_zero());
        assert!(dual.get(4).is_zero() && dual.get(5).is_zero());
        assert!(ring.dual_sw(6).is_err());
    }

    #[test]
    fn top_coefficient_examples() {
        let ring = BottRing::main(5).unwrap();
        assert!(ring.top_coefficient(&p("x1*x2*x3*x4*x5")).unwrap());
        assert!(ring.top_coefficient(&p("x4^4*x5")).unwrap());
        assert!(!ring.top_coefficient(&p("x4*x5^4")).unwrap());
        assert!(ring.top_coefficient(&p("x1*x2")).is_err());
    }

    #[test]
    fn circle_extension() {
        let m = BottMatrix::main(5).unwrap();
        let e = m.extend_with_circles(1).unwrap();
        assert_eq!(e.n(), 6);
        assert_eq!(e.column_mask(6), 0);
        assert_eq!(m.extend_with_circles(0).unwrap(), m);
        let t3 = BottMatrix::zero(1).unwrap().extend_with_circles(2).unwrap();
        assert_eq!(t3, BottMatrix::zero(3).unwrap());
    }

    #[test]
    fn verify_main_small() {
        let r5 = verify_main(5, Method::Both, DEFAULT_DIRECT_CAP).unwrap();
        assert!(r5.verified() && r5.methods_agree());
        assert_eq!((r5.alpha_hat, r5.grade), (2, 3));
        let r6 = verify_main(6, Method::Both, DEFAULT_DIRECT_CAP).unwrap();
        assert!(r6.verified());
        assert_eq!(r6.grade, 3);
        let r1 = verify_main(1, Method::Both, DEFAULT_DIRECT_CAP).unwrap();
        assert!(r1.verified());
        assert_eq!(r1.grade, 0);
        assert_eq!(
            verify_main(8, Method::Both, DEFAULT_DIRECT_CAP),
            Err(Error::UnsupportedDimension { n: 8 })
        );
        assert_eq!(
            verify_main(21, Method::Direct, DEFAULT_DIRECT_CAP),
            Err(Error::ExceedsDirectCap { n: 21, cap: 17 })
        );
    }

    #[test]
    fn report_json_shape() {
        let r = verify_main(5, Method::Steenrod, DEFAULT_DIRECT_CAP).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(
            text,
            r#"{"n":5,"alpha_hat":2,"grade":3,"orientable":true,"methods":{"direct":null,"steenrod":true}}"#
        );
        let back: MainReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn basis_is_all_squarefree_monomials() {
        // normal forms of all monomials with exponents <= 2 in B_4 span the 16 squarefree masks
        let ring = BottRing::main(4).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for code in 0..81u32 {
            let exps: Vec<u32> = (0..4).map(|k| (code / 3u32.pow(k)) % 3).collect();
            let nf = ring.monomial_nf(&Monomial::from_exponents(&exps)).unwrap();
            seen.extend(nf.masks().iter().copied());
        }
        assert_eq!(seen.len(), 16);
    }

    fn arb_matrix() -> impl Strategy<Value = BottMatrix> {
        (2usize..=6)
            .prop_flat_map(|n| {
                let pairs: Vec<(usize, usize)> = (1..=n)
                    .flat_map(|i| ((i + 1)..=n).map(move |j| (i, j)))
                    .collect();
                let len = pairs.len();
                (Just(n), Just(pairs), prop::collection::vec(any::<bool>(), len))
            })
            .prop_map(|(n, pairs, pick)| {
                BottMatrix::new(
                    n,
                    pairs.into_iter().zip(pick).filter(|(_, b)| *b).map(|(p, _)| p),
                )
                .unwrap()
            })
    }

    fn arb_poly(n: u32) -> impl Strategy<Value = Poly> {
        prop::collection::vec(
            prop::collection::vec((1..=n, 0u32..=3), 0..4)
                .prop_map(|pairs| Monomial::from_pairs(pairs).unwrap()),
            0..5,
        )
        .prop_map(Poly::from_monomials)
    }

    proptest! {
        #[test]
        fn normal_form_is_a_ring_homomorphism((m, a, b) in arb_matrix().prop_flat_map(|m| {
            let n = m.n() as u32;
            (Just(m), arb_poly(n), arb_poly(n))
        })) {
            let ring = BottRing::new(m);
            let na = ring.normal_form(&a).unwrap();
            let nb = ring.normal_form(&b).unwrap();
            prop_assert_eq!(ring.normal_form(&na.to_poly()).unwrap(), na.clone());
            prop_assert_eq!(ring.normal_form(&a.add(&b)).unwrap(), na.add(&nb));
            prop_assert_eq!(ring.normal_form(&a.mul(&b)).unwrap(), ring.mul(&na, &nb));
        }

        #[test]
        fn orientability_matches_w1(m in arb_matrix()) {
            let w = total_sw(&m);
            prop_assert_eq!(m.is_orientable(), w.get(1).is_zero());
        }

        #[test]
        fn dual_is_the_graded_inverse(m in arb_matrix()) {
            let ring = BottRing::new(m);
            let n = ring.dim();
            let w = ring.total_sw();
            let dual = ring.dual_sw(n).unwrap();
            for k in 1..=n {
                let mut conv = SqfreePoly::zero();
                for j in 0..=k {
                    conv.add_assign(&ring.mul(&w.get(j), &dual.get(k - j)));
                }
                prop_assert!(conv.is_zero());
            }
        }
    }
}
