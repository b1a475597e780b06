//! Coroot combinatorics of type `A_{n-1}`: degree vectors, Kostant
//! partitions, defect matrices, partitions of a degree, and the dimension
//! formulas attached to them.
//!
//! Positive coroots are indexed by pairs `(p, q)` with `1 <= q <= p <= n-1`,
//! the pair standing for `i_q + i_{q+1} + ... + i_p`. Triangular arrays
//! indexed by such pairs are flattened row by row (`p` major, `q` minor),
//! and every enumeration in this module is sorted lexicographically on that
//! flattening.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A degree `gamma = sum c_p i_p` for `SL_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GammaVector {
    n: usize,
    coeffs: Vec<u32>,
}

impl GammaVector {
    pub fn new(n: usize, coeffs: Vec<u32>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!("rank n must be at least 2, got {n}")));
        }
        if coeffs.len() != n - 1 {
            return Err(Error::Invalid(format!(
                "gamma for n={n} needs {} coefficients, got {}",
                n - 1,
                coeffs.len()
            )));
        }
        Ok(GammaVector { n, coeffs })
    }

    pub fn zero(n: usize) -> Result<Self> {
        GammaVector::new(n, vec![0; n.saturating_sub(1)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// `c_p`, 1-based.
    pub fn c(&self, p: usize) -> u32 {
        self.coeffs[p - 1]
    }

    /// `|gamma|`
    pub fn size(&self) -> u32 {
        self.coeffs.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &GammaVector) -> bool {
        self.n == other.n && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    /// Parses `"c1,c2,...,c_{n-1}"`; the rank is inferred from the length.
    pub fn parse(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad gamma entry `{t}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        GammaVector::new(coeffs.len() + 1, coeffs)
    }

    /// All degree vectors of rank `n` with `1 <= |gamma| <= max`, sorted.
    pub fn all_nonzero_up_to(n: usize, max: u32) -> Vec<GammaVector> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n - 1];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, n: usize, out: &mut Vec<GammaVector>) {
            if i == cur.len() {
                if cur.iter().any(|&c| c > 0) {
                    out.push(GammaVector { n, coeffs: cur.clone() });
                }
                return;
            }
            for c in 0..=left {
                cur[i] = c;
                rec(i + 1, left - c, cur, n, out);
            }
            cur[i] = 0;
        }
        rec(0, max, &mut cur, n, &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for GammaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for GammaVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GammaVector::parse(s)
    }
}

/// A positive coroot `i_q + ... + i_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coroot {
    pub p: usize,
    pub q: usize,
}

impl Coroot {
    pub fn new(n: usize, p: usize, q: usize) -> Result<Self> {
        if !(1 <= q && q <= p && p < n) {
            return Err(Error::Invalid(format!("coroot ({p},{q}) out of range for n={n}")));
        }
        Ok(Coroot { p, q })
    }

    /// Coefficient vector of the coroot.
    pub fn weight(&self, n: usize) -> Vec<u32> {
        (1..n).map(|i| u32::from(self.q <= i && i <= self.p)).collect()
    }
}

/// Number of entries in a triangular array for rank `n`.
pub fn tri_len(n: usize) -> usize {
    (n - 1) * n / 2
}

/// Flattened position of `(p, q)`, both 1-based.
pub fn tri_index(p: usize, q: usize) -> usize {
    debug_assert!(1 <= q && q <= p);
    p * (p - 1) / 2 + (q - 1)
}

/// All pairs `(p, q)`, `1 <= q <= p <= n-1`, in flattening order.
pub fn tri_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..n).flat_map(|p| (1..=p).map(move |q| (p, q)))
}

/// A lower-triangular array of nonnegative integers indexed by coroots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tri {
    n: usize,
    data: Vec<u32>,
}

impl Tri {
    pub fn zero(n: usize) -> Self {
        Tri { n, data: vec![0; tri_len(n)] }
    }

    pub fn from_flat(n: usize, data: Vec<u32>) -> Result<Self> {
        if n < 2 || data.len() != tri_len(n) {
            return Err(Error::Invalid(format!("triangular array for n={n} needs {} entries", tri_len(n.max(2)))));
        }
        Ok(Tri { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, q: usize) -> u32 {
        self.data[tri_index(p, q)]
    }

    pub fn set(&mut self, p: usize, q: usize, v: u32) {
        self.data[tri_index(p, q)] = v;
    }

    pub fn flat(&self) -> &[u32] {
        &self.data
    }

    pub fn total(&self) -> u32 {
        self.data.iter().sum()
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (1..self.n)
            .map(|p| {
                (1..=p)
                    .map(|q| self.get(p, q).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

/// A Kostant partition `kappa`: multiplicities of positive coroots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KostantPartition {
    kappa: Tri,
}

impl KostantPartition {
    pub fn from_tri(kappa: Tri) -> Self {
        KostantPartition { kappa }
    }

    pub fn n(&self) -> usize {
        self.kappa.n
    }

    pub fn get(&self, p: usize, q: usize) -> u32 {
        self.kappa.get(p, q)
    }

    pub fn tri(&self) -> &Tri {
        &self.kappa
    }

    /// The degree this partition decomposes.
    pub fn weight(&self) -> GammaVector {
        let n = self.n();
        let mut coeffs = vec![0u32; n - 1];
        for (p, q) in tri_pairs(n) {
            let k = self.get(p, q);
            for c in &mut coeffs[q - 1..p] {
                *c += k;
            }
        }
        GammaVector { n, coeffs }
    }

    /// Number of coroots counted with multiplicity.
    pub fn num_parts(&self) -> u32 {
        self.kappa.total()
    }
}

impl fmt::Display for KostantPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kappa.fmt(f)
    }
}

/// A defect matrix `d` in `D(gamma)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DefectMatrix {
    d: Tri,
}

impl DefectMatrix {
    /// Validates column monotonicity; row sums define the degree.
    pub fn new(d: Tri) -> Result<Self> {
        let n = d.n;
        for p in 1..n.saturating_sub(1) {
            for q in 1..=p {
                if d.get(p + 1, q) > d.get(p, q) {
                    return Err(Error::Invalid(format!(
                        "defect matrix {d}: d_{{{},{q}}} = {} exceeds d_{{{p},{q}}} = {}",
                        p + 1,
                        d.get(p + 1, q),
                        d.get(p, q)
                    )));
                }
            }
        }
        Ok(DefectMatrix { d })
    }

    /// Validates against a prescribed degree as well.
    pub fn with_gamma(d: Tri, gamma: &GammaVector) -> Result<Self> {
        let m = DefectMatrix::new(d)?;
        if &m.gamma() != gamma {
            return Err(Error::Invalid(format!("defect matrix {m} has row sums {} but gamma is {gamma}", m.gamma())));
        }
        Ok(m)
    }

    pub fn zero(n: usize) -> Self {
        DefectMatrix { d: Tri::zero(n) }
    }

    /// Parses rows joined by `;`, entries by `,`, e.g. `"2;1,1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.split(';').collect();
        let n = rows.len() + 1;
        let mut data = Vec::with_capacity(tri_len(n));
        for (i, row) in rows.iter().enumerate() {
            let entries: Vec<u32> = row
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad defect entry `{t}` in `{s}`")))
                })
                .collect::<Result<_>>()?;
            if entries.len() != i + 1 {
                return Err(Error::Parse(format!("row {} of `{s}` must have {} entries", i + 1, i + 1)));
            }
            data.extend(entries);
        }
        DefectMatrix::new(Tri::from_flat(n, data)?)
    }

    pub fn n(&self) -> usize {
        self.d.n
    }

    pub fn get(&self, p: usize, q: usize) -> u32 {
        self.d.get(p, q)
    }

    pub fn tri(&self) -> &Tri {
        &self.d
    }

    /// Row sums `c_p`.
    pub fn gamma(&self) -> GammaVector {
        let n = self.n();
        GammaVector {
            n,
            coeffs: (1..n).map(|p| (1..=p).map(|q| self.get(p, q)).sum()).collect(),
        }
    }

    pub fn diagonal_sum(&self) -> u32 {
        (1..self.n()).map(|p| self.get(p, p)).sum()
    }

    pub fn total(&self) -> u32 {
        self.d.total()
    }
}

impl fmt::Display for DefectMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.d.fmt(f)
    }
}

impl FromStr for DefectMatrix {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DefectMatrix::parse(s)
    }
}

/// A partition of `gamma`: a multiset of nonzero degree vectors summing to
/// it. Parts are kept in non-increasing lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionMultiset {
    parts: Vec<GammaVector>,
}

impl PartitionMultiset {
    pub fn new(mut parts: Vec<GammaVector>) -> Result<Self> {
        if parts.iter().any(GammaVector::is_zero) {
            return Err(Error::Invalid("partition parts must be nonzero".into()));
        }
        if let Some(first) = parts.first() {
            if parts.iter().any(|g| g.n != first.n) {
                return Err(Error::Invalid("partition parts of mixed rank".into()));
            }
        }
        parts.sort_by(|a, b| b.cmp(a));
        Ok(PartitionMultiset { parts })
    }

    pub fn parts(&self) -> &[GammaVector] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn sum(&self, n: usize) -> GammaVector {
        let mut coeffs = vec![0u32; n - 1];
        for part in &self.parts {
            for (c, x) in coeffs.iter_mut().zip(&part.coeffs) {
                *c += x;
            }
        }
        GammaVector { n, coeffs }
    }
}

impl fmt::Display for PartitionMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|g| format!("({g})")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// The collection `mu(kappa)`.
pub type MuCollection = Tri;

/// All Kostant partitions of `gamma`, sorted.
pub fn enumerate_kostant(gamma: &GammaVector) -> Vec<KostantPartition> {
    let n = gamma.n;
    let pairs: Vec<(usize, usize)> = tri_pairs(n).collect();
    let mut out = Vec::new();
    let mut kappa = Tri::zero(n);
    let mut remaining = gamma.coeffs.clone();
    fn rec(
        i: usize,
        pairs: &[(usize, usize)],
        remaining: &mut Vec<u32>,
        kappa: &mut Tri,
        out: &mut Vec<KostantPartition>,
    ) {
        if i == pairs.len() {
            if remaining.iter().all(|&r| r == 0) {
                out.push(KostantPartition { kappa: kappa.clone() });
            }
            return;
        }
        let (p, q) = pairs[i];
        let cap = remaining[q - 1..p].iter().copied().min().unwrap_or(0);
        for k in 0..=cap {
            for r in &mut remaining[q - 1..p] {
                *r -= k;
            }
            kappa.set(p, q, k);
            rec(i + 1, pairs, remaining, kappa, out);
            for r in &mut remaining[q - 1..p] {
                *r += k;
            }
        }
        kappa.set(p, q, 0);
    }
    rec(0, &pairs, &mut remaining, &mut kappa, &mut out);
    out.sort();
    out
}

/// `mu_{p,q} = sum over r <= q <= p <= s of kappa_{s,r}`.
pub fn mu_of(kappa: &KostantPartition) -> MuCollection {
    let n = kappa.n();
    let mut mu = Tri::zero(n);
    for (p, q) in tri_pairs(n) {
        let mut acc = 0;
        for s in p..n {
            for r in 1..=q {
                acc += kappa.get(s, r);
            }
        }
        mu.set(p, q, acc);
    }
    mu
}

/// `d_{p,q} = sum_{r=p}^{n-1} kappa_{r,q}`.
pub fn kappa_to_defect(kappa: &KostantPartition) -> DefectMatrix {
    let n = kappa.n();
    let mut d = Tri::zero(n);
    for (p, q) in tri_pairs(n) {
        d.set(p, q, (p..n).map(|r| kappa.get(r, q)).sum());
    }
    DefectMatrix { d }
}

/// Inverse of [`kappa_to_defect`]: `kappa_{p,q} = d_{p,q} - d_{p+1,q}`.
pub fn defect_to_kappa(defect: &DefectMatrix) -> KostantPartition {
    let n = defect.n();
    let mut kappa = Tri::zero(n);
    for (p, q) in tri_pairs(n) {
        let below = if p + 1 < n { defect.get(p + 1, q) } else { 0 };
        // monotonicity is checked on construction of every DefectMatrix
        kappa.set(p, q, defect.get(p, q) - below);
    }
    KostantPartition { kappa }
}

/// All defect matrices of `gamma`, sorted.
pub fn enumerate_defects(gamma: &GammaVector) -> Vec<DefectMatrix> {
    let n = gamma.n;
    let mut out = Vec::new();
    let mut d = Tri::zero(n);
    fn fill_row(
        p: usize,
        q: usize,
        left: u32,
        gamma: &GammaVector,
        d: &mut Tri,
        out: &mut Vec<DefectMatrix>,
    ) {
        let n = gamma.n;
        if p == n {
            out.push(DefectMatrix { d: d.clone() });
            return;
        }
        if q == p {
            // last entry of the row absorbs the remainder; the diagonal has
            // no entry above it
            d.set(p, q, left);
            let next_left = if p + 1 < n { gamma.c(p + 1) } else { 0 };
            fill_row(p + 1, 1, next_left, gamma, d, out);
            d.set(p, q, 0);
            return;
        }
        let cap = left.min(d.get(p - 1, q));
        for v in 0..=cap {
            d.set(p, q, v);
            fill_row(p, q + 1, left - v, gamma, d, out);
        }
        d.set(p, q, 0);
    }
    fill_row(1, 1, gamma.c(1), gamma, &mut d, &mut out);
    out.sort();
    out
}

/// All partitions of `gamma` in canonical order.
pub fn enumerate_partitions(gamma: &GammaVector) -> Vec<PartitionMultiset> {
    let n = gamma.n;
    // candidate parts: every nonzero vector below gamma, descending
    let mut candidates: Vec<GammaVector> = Vec::new();
    let mut cur = vec![0u32; n - 1];
    fn all_below(i: usize, gamma: &GammaVector, cur: &mut Vec<u32>, out: &mut Vec<GammaVector>) {
        if i == cur.len() {
            if cur.iter().any(|&c| c > 0) {
                out.push(GammaVector { n: gamma.n, coeffs: cur.clone() });
            }
            return;
        }
        for c in 0..=gamma.coeffs[i] {
            cur[i] = c;
            all_below(i + 1, gamma, cur, out);
        }
        cur[i] = 0;
    }
    all_below(0, gamma, &mut cur, &mut candidates);
    candidates.sort_by(|a, b| b.cmp(a));

    let mut out = Vec::new();
    fn rec(
        start: usize,
        remaining: &GammaVector,
        candidates: &[GammaVector],
        chosen: &mut Vec<GammaVector>,
        out: &mut Vec<PartitionMultiset>,
    ) {
        if remaining.is_zero() {
            out.push(PartitionMultiset { parts: chosen.clone() });
            return;
        }
        for (i, c) in candidates.iter().enumerate().skip(start) {
            if c.le(remaining) {
                let rest = GammaVector {
                    n: remaining.n,
                    coeffs: remaining.coeffs.iter().zip(&c.coeffs).map(|(a, b)| a - b).collect(),
                };
                chosen.push(c.clone());
                rec(i, &rest, candidates, chosen, out);
                chosen.pop();
            }
        }
    }
    rec(0, gamma, &candidates, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Dimension of the piece indexed by `d`: the strictly sub-diagonal sum.
pub fn piece_dim(defect: &DefectMatrix) -> u32 {
    tri_pairs(defect.n())
        .filter(|&(p, q)| q < p)
        .map(|(p, q)| defect.get(p, q))
        .sum()
}

/// Upper bound (strict) for the kernel of the differential at the fixed
/// point of `d`: `sum_p d_{p,p} + |gamma| - 1`.
pub fn key_prop_bound(defect: &DefectMatrix) -> Result<u32> {
    if defect.gamma().is_zero() {
        return Err(Error::ZeroGamma("kernel bound requires gamma != 0"));
    }
    Ok(defect.diagonal_sum() + defect.total() - 1)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.checked_mul(n - i).expect("binomial overflow") / (i + 1))
}

pub fn flag_dim(n: usize) -> u64 {
    (n as u64) * (n as u64 - 1) / 2
}

/// Dimension of the ambient product of projective spaces.
pub fn ambient_dim(gamma: &GammaVector) -> u64 {
    let n = gamma.n as u64;
    (1..gamma.n)
        .map(|p| (u64::from(gamma.c(p)) + 1) * binomial(n, p as u64) - 1)
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionTable {
    pub flag_dim: u64,
    pub laumon_dim: u64,
    pub ambient_dim: u64,
    pub closed_stratum_dim: u64,
    /// Present when a stratum `(beta, Gamma)` was requested.
    pub stratum_dim: Option<u64>,
}

/// Dimensions attached to `gamma` and optionally to the stratum
/// `Q_beta x C^{gamma-beta}_Gamma`.
pub fn dimension_table(
    gamma: &GammaVector,
    stratum: Option<(&GammaVector, &PartitionMultiset)>,
) -> Result<DimensionTable> {
    let flag = flag_dim(gamma.n);
    let stratum_dim = match stratum {
        None => None,
        Some((beta, parts)) => {
            if !beta.le(gamma) {
                return Err(Error::Invalid(format!("beta = {beta} is not <= gamma = {gamma}")));
            }
            let diff = GammaVector {
                n: gamma.n,
                coeffs: gamma.coeffs.iter().zip(&beta.coeffs).map(|(a, b)| a - b).collect(),
            };
            if parts.sum(gamma.n) != diff {
                return Err(Error::Invalid(format!("partition {parts} does not sum to gamma - beta = {diff}")));
            }
            Some(2 * u64::from(beta.size()) + flag + parts.len() as u64)
        }
    };
    Ok(DimensionTable {
        flag_dim: flag,
        laumon_dim: 2 * u64::from(gamma.size()) + flag,
        ambient_dim: ambient_dim(gamma),
        closed_stratum_dim: flag + 1,
        stratum_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GammaVector {
        GammaVector::parse(s).unwrap()
    }

    fn dm(s: &str) -> DefectMatrix {
        DefectMatrix::parse(s).unwrap()
    }

    /// Brute force: every assignment of multiplicities `<= |gamma|` to every
    /// coroot, filtered by weight.
    fn brute_kostant_count(gamma: &GammaVector) -> usize {
        let n = gamma.n();
        let len = tri_len(n);
        let bound = gamma.size() + 1;
        let mut count = 0;
        let total = (bound as usize).pow(len as u32);
        for code in 0..total {
            let mut c = code;
            let mut flat = Vec::with_capacity(len);
            for _ in 0..len {
                flat.push((c % bound as usize) as u32);
                c /= bound as usize;
            }
            let k = KostantPartition::from_tri(Tri::from_flat(n, flat).unwrap());
            if &k.weight() == gamma {
                count += 1;
            }
        }
        count
    }

    /// Brute force over all triangular arrays with entries `<= |gamma|`.
    fn brute_defects(gamma: &GammaVector) -> Vec<DefectMatrix> {
        let n = gamma.n();
        let len = tri_len(n);
        let bound = (gamma.size() + 1) as usize;
        let mut out = Vec::new();
        for code in 0..bound.pow(len as u32) {
            let mut c = code;
            let mut flat = Vec::with_capacity(len);
            for _ in 0..len {
                flat.push((c % bound) as u32);
                c /= bound;
            }
            if let Ok(d) = DefectMatrix::with_gamma(Tri::from_flat(n, flat).unwrap(), gamma) {
                out.push(d);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn kostant_counts() {
        assert_eq!(enumerate_kostant(&g("1")).len(), 1);
        assert_eq!(enumerate_kostant(&g("1,1")).len(), 2);
        assert_eq!(enumerate_kostant(&g("2,2")).len(), 3);
        assert_eq!(enumerate_kostant(&g("0,0")).len(), 1);
        for s in ["1,1", "2,2", "2,1", "3,1", "1,2,1", "2,1,1"] {
            assert_eq!(enumerate_kostant(&g(s)).len(), brute_kostant_count(&g(s)), "gamma {s}");
        }
    }

    #[test]
    fn mu_examples() {
        let zero = KostantPartition::from_tri(Tri::zero(3));
        assert_eq!(mu_of(&zero), Tri::zero(3));
        let mut t = Tri::zero(3);
        t.set(2, 1, 1);
        let mu = mu_of(&KostantPartition::from_tri(t));
        assert_eq!((mu.get(1, 1), mu.get(2, 1), mu.get(2, 2)), (1, 1, 1));
        let mut t = Tri::zero(3);
        t.set(1, 1, 2);
        let mu = mu_of(&KostantPartition::from_tri(t));
        assert_eq!((mu.get(1, 1), mu.get(2, 1), mu.get(2, 2)), (2, 0, 0));
    }

    #[test]
    fn kappa_defect_examples() {
        let mut t = Tri::zero(3);
        t.set(2, 1, 1);
        assert_eq!(kappa_to_defect(&KostantPartition::from_tri(t)), dm("1;1,0"));
        let mut t = Tri::zero(3);
        t.set(1, 1, 1);
        t.set(2, 1, 1);
        t.set(2, 2, 1);
        let k = KostantPartition::from_tri(t);
        assert_eq!(kappa_to_defect(&k), dm("2;1,1"));
        assert_eq!(defect_to_kappa(&dm("2;1,1")), k);
        let k = defect_to_kappa(&dm("2;2,0"));
        assert_eq!((k.get(1, 1), k.get(2, 1), k.get(2, 2)), (0, 2, 0));
        assert_eq!(defect_to_kappa(&DefectMatrix::zero(4)).num_parts(), 0);
    }

    #[test]
    fn defect_validation() {
        assert!(DefectMatrix::parse("1;2,0").is_err());
        assert!(DefectMatrix::parse("1;1").is_err());
        assert!(DefectMatrix::with_gamma(dm("2;1,1").tri().clone(), &g("2,1")).is_err());
    }

    #[test]
    fn defect_enumeration() {
        assert_eq!(enumerate_defects(&g("0,0")), vec![DefectMatrix::zero(3)]);
        assert_eq!(enumerate_defects(&g("0,1")), vec![dm("0;0,1")]);
        assert_eq!(enumerate_defects(&g("2,2")), vec![dm("2;0,2"), dm("2;1,1"), dm("2;2,0")]);
        for s in ["1,1", "2,3", "1,2,1", "2,0,2", "1,0,1"] {
            assert_eq!(enumerate_defects(&g(s)), brute_defects(&g(s)), "gamma {s}");
        }
    }

    #[test]
    fn partition_enumeration() {
        assert_eq!(enumerate_partitions(&g("1")).len(), 1);
        let p = enumerate_partitions(&g("2"));
        assert_eq!(p.len(), 2);
        let p = enumerate_partitions(&g("1,1"));
        assert_eq!(p.len(), 2);
        assert!(p.contains(&PartitionMultiset::new(vec![g("1,0"), g("0,1")]).unwrap()));
        assert_eq!(enumerate_partitions(&g("0,0")).len(), 1);
        assert!(enumerate_partitions(&g("0,0"))[0].is_empty());
        // partitions of 4 into integers
        assert_eq!(enumerate_partitions(&g("4")).len(), 5);
    }

    #[test]
    fn piece_and_bound() {
        assert_eq!(piece_dim(&DefectMatrix::zero(3)), 0);
        assert_eq!(piece_dim(&dm("2;1,1")), 1);
        assert_eq!(piece_dim(&dm("2;2,0")), 2);
        assert_eq!(key_prop_bound(&dm("2;1,1")).unwrap(), 6);
        assert_eq!(key_prop_bound(&dm("1")).unwrap(), 1);
        assert!(matches!(key_prop_bound(&DefectMatrix::zero(3)), Err(Error::ZeroGamma(_))));
    }

    #[test]
    fn dimensions() {
        let t = dimension_table(&g("2,2"), None).unwrap();
        assert_eq!((t.flag_dim, t.laumon_dim, t.ambient_dim), (3, 11, 16));
        let t = dimension_table(&g("1"), None).unwrap();
        assert_eq!((t.flag_dim, t.laumon_dim, t.ambient_dim), (1, 3, 3));
        let zero = g("0,0");
        let empty = PartitionMultiset::new(vec![]).unwrap();
        let t = dimension_table(&zero, Some((&zero, &empty))).unwrap();
        assert_eq!(t.stratum_dim, Some(t.flag_dim));
        let whole = PartitionMultiset::new(vec![g("2,2")]).unwrap();
        let t = dimension_table(&g("2,2"), Some((&zero, &whole))).unwrap();
        assert_eq!(t.stratum_dim, Some(t.closed_stratum_dim));
        assert!(dimension_table(&zero, Some((&g("1,0"), &empty))).is_err());
    }

    #[test]
    fn text_roundtrip() {
        assert_eq!(dm("2;1,1").to_string(), "2;1,1");
        assert_eq!(g("3,0,1").to_string(), "3,0,1");
        assert_eq!(g("3,0,1").n(), 4);
    }
}
