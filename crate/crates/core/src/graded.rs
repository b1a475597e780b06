//! Arbitrary quasiflags as chains of polynomial matrices, computed through
//! truncated graded pieces on the projective line.
//!
//! Columns are read as homogeneous sections: a column of degree `a` in the
//! affine coordinate `z = y/x` is a section of `V (x) O(a)`, and generates a
//! summand `O(-a)` of `E_p`. The degree-`m` piece of `V (x) O` is the space of
//! `n`-tuples of polynomials of degree `<= m`, stored densely with component
//! `i` at offsets `i*(m+1)..`. Multiplication by `x` keeps the coefficients,
//! multiplication by `y` shifts them by one.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ambient::{microlocal_from_image, subsets, AmbientLayout, MicrolocalRecord, DEFAULT_WITNESS_DRAWS};
use crate::combinatorics::{flag_dim, DefectMatrix, GammaVector};
use crate::error::{Error, Result};
use crate::linalg::{q, rref_rows, solve, unit, Matrix, Subspace, Q};
use crate::poly::Poly;

/// Matrix of univariate polynomials, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, entries: vec![Poly::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid("ragged polynomial matrix".into()));
        }
        let nrows = rows.len();
        Ok(PolyMatrix { rows: nrows, cols, entries: rows.into_iter().flatten().collect() })
    }

    /// Parses row-major nested lists of polynomial strings.
    pub fn parse(rows: &[Vec<String>]) -> Result<Self> {
        let rows: Vec<Vec<Poly>> = rows
            .iter()
            .map(|r| r.iter().map(|s| Poly::parse(s)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Self::from_rows(rows)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect()).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn column(&self, j: usize) -> Vec<Poly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Largest degree in column `j`; `None` for a zero column.
    pub fn column_degree(&self, j: usize) -> Option<usize> {
        (0..self.rows).filter_map(|i| self.get(i, j).degree()).max()
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(Error::Mismatch(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = PolyMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Poly::zero();
                for k in 0..self.cols {
                    acc = acc + self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn eval(&self, x: &Q) -> Matrix {
        let rows = (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).eval(x)).collect()).collect();
        Matrix::from_rows(self.cols, rows)
    }

    /// Maximal minors on row subsets in lexicographic order.
    pub fn minors(&self) -> Vec<Poly> {
        let cols: Vec<Vec<Poly>> = (0..self.cols).map(|j| self.column(j)).collect();
        minors_of_columns(&cols, self.rows)
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_strings().into_iter().map(|r| format!("[{}]", r.join(", "))).collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

fn det(m: &[Vec<Poly>]) -> Poly {
    match m.len() {
        0 => Poly::one(),
        1 => m[0][0].clone(),
        k => {
            let mut acc = Poly::zero();
            for j in 0..k {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = &m[0][j] * &det(&minor);
                acc = if j % 2 == 0 { acc + t } else { acc - t };
            }
            acc
        }
    }
}

/// Maximal minors of the `n x p` matrix with the given columns.
pub fn minors_of_columns(cols: &[Vec<Poly>], n: usize) -> Vec<Poly> {
    let p = cols.len();
    subsets(n, p)
        .into_iter()
        .map(|s| {
            let m: Vec<Vec<Poly>> = s.iter().map(|&i| cols.iter().map(|c| c[i - 1].clone()).collect()).collect();
            det(&m)
        })
        .collect()
}

/// Serialized quasiflag: matrices `M_1..M_{n-1}` and witnesses
/// `A_1..A_{n-2}` as row-major lists of polynomial strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiflagDoc {
    pub matrices: Vec<Vec<Vec<String>>>,
    pub witnesses: Vec<Vec<Vec<String>>>,
}

/// Chain `E_1 < ... < E_{n-1} < V (x) O` with `E_p` the image of `M_p`.
#[derive(Clone, Debug)]
pub struct Quasiflag {
    n: usize,
    mats: Vec<PolyMatrix>,
    witnesses: Vec<PolyMatrix>,
    degrees: Vec<Vec<usize>>,
    gamma: GammaVector,
}

const INJECTIVITY_SEED: u64 = 0x5eed;

impl Quasiflag {
    /// Validates shapes, witness identities and generic injectivity.
    pub fn new(mats: Vec<PolyMatrix>, witnesses: Vec<PolyMatrix>) -> Result<Self> {
        let n = mats.len() + 1;
        if n < 2 {
            return Err(Error::Invalid("a quasiflag needs at least one matrix".into()));
        }
        if witnesses.len() != n - 2 {
            return Err(Error::Invalid(format!("expected {} witnesses, got {}", n - 2, witnesses.len())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(INJECTIVITY_SEED);
        let points: Vec<Q> = (0..4).map(|_| Q::new(rng.gen_range(-50i64..=50).into(), rng.gen_range(1i64..=13).into())).collect();
        let mut degrees = Vec::with_capacity(n - 1);
        for (i, m) in mats.iter().enumerate() {
            let p = i + 1;
            if m.rows() != n || m.cols() != p {
                return Err(Error::Invalid(format!("M_{p} must be {n}x{p}, got {}x{}", m.rows(), m.cols())));
            }
            let degs: Vec<usize> = (0..p)
                .map(|j| m.column_degree(j).ok_or_else(|| Error::Invalid(format!("M_{p} has a zero column"))))
                .collect::<Result<_>>()?;
            if !points.iter().any(|x| m.eval(x).rank() == p) {
                return Err(Error::Invalid(format!("M_{p} is not generically injective")));
            }
            degrees.push(degs);
        }
        for (i, a) in witnesses.iter().enumerate() {
            let p = i + 1;
            if a.rows() != p + 1 || a.cols() != p {
                return Err(Error::Invalid(format!("A_{p} must be {}x{p}", p + 1)));
            }
            if mats[p].mul(a)? != mats[p - 1] {
                return Err(Error::Invalid(format!("M_{p} != M_{} A_{p}: E_{p} is not nested in E_{}", p + 1, p + 1)));
            }
        }
        let c: Vec<u32> = degrees.iter().map(|d| d.iter().sum::<usize>() as u32).collect();
        let gamma = GammaVector::new(n, c)?;
        let qf = Quasiflag { n, mats, witnesses, degrees, gamma };
        qf.check_nesting()?;
        Ok(qf)
    }

    /// The sheaf inclusion `E_p < E_{p+1}`: each column `j` of `M_p`, as a
    /// section in degree `a_j`, lies in the degree-`a_j` piece of `E_{p+1}`.
    /// The witness identity gives this on the affine chart; this also checks
    /// the point at infinity.
    fn check_nesting(&self) -> Result<()> {
        for p in 1..self.n - 1 {
            for j in 0..p {
                let a = self.degrees[p - 1][j];
                let gens = generators(&self.mats[p], &self.degrees[p], a);
                let span = Subspace::span(self.n * (a + 1), gens.into_iter().map(|(_, v)| v).collect());
                if !span.contains(&dense_vec(&self.mats[p - 1].column(j), a)) {
                    return Err(Error::Invalid(format!("column {} of M_{p} is not a section of E_{} in degree {a}", j + 1, p + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn from_doc(doc: &QuasiflagDoc) -> Result<Self> {
        let mats = doc.matrices.iter().map(|m| PolyMatrix::parse(m)).collect::<Result<_>>()?;
        let wit = doc.witnesses.iter().map(|m| PolyMatrix::parse(m)).collect::<Result<_>>()?;
        Self::new(mats, wit)
    }

    pub fn to_doc(&self) -> QuasiflagDoc {
        QuasiflagDoc {
            matrices: self.mats.iter().map(|m| m.to_strings()).collect(),
            witnesses: self.witnesses.iter().map(|m| m.to_strings()).collect(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: QuasiflagDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }

    /// `delta(d)`: `M_p` has columns `z^{d_{p,q}} v_q`.
    pub fn fixed_point(defect: &DefectMatrix) -> Self {
        let n = defect.n();
        let d = |p: usize, q: usize| if p < n { defect.get(p, q) as usize } else { 0 };
        let mut mats = Vec::new();
        let mut wits = Vec::new();
        for p in 1..n {
            let mut m = PolyMatrix::zeros(n, p);
            for q in 1..=p {
                m.set(q - 1, q - 1, Poly::z_pow(d(p, q)));
            }
            mats.push(m);
            if p < n - 1 {
                let mut a = PolyMatrix::zeros(p + 1, p);
                for q in 1..=p {
                    a.set(q - 1, q - 1, Poly::z_pow(d(p, q) - d(p + 1, q)));
                }
                wits.push(a);
            }
        }
        Self::new(mats, wits).expect("fixed points are valid quasiflags")
    }

    /// The family through `delta(2;1,1)`: `M_1 = (z^2,0,0)^T`,
    /// `M_2 = [[z,t],[0,z],[0,0]]`, `A_1 = (z,0)^T`.
    pub fn remark_family(t: &Q) -> Self {
        let z = || Poly::z_pow(1);
        let o = Poly::zero;
        let m1 = PolyMatrix::from_rows(vec![vec![Poly::z_pow(2)], vec![o()], vec![o()]]).unwrap();
        let m2 = PolyMatrix::from_rows(vec![vec![z(), Poly::constant(t.clone())], vec![o(), z()], vec![o(), o()]]).unwrap();
        let a1 = PolyMatrix::from_rows(vec![vec![z()], vec![o()]]).unwrap();
        Self::new(vec![m1, m2], vec![a1]).expect("remark family is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> &GammaVector {
        &self.gamma
    }

    pub fn matrix(&self, p: usize) -> &PolyMatrix {
        &self.mats[p - 1]
    }

    pub fn column_degrees(&self, p: usize) -> &[usize] {
        &self.degrees[p - 1]
    }

    /// Plücker vector of `Lambda^p E_p`, of degree `<= c_p`.
    pub fn wedge_line(&self, p: usize) -> Vec<Poly> {
        self.mats[p - 1].minors()
    }
}

/// Validates a quasiflag and returns its degree profile.
pub fn validate(mats: Vec<PolyMatrix>, witnesses: Vec<PolyMatrix>) -> Result<GammaVector> {
    Ok(Quasiflag::new(mats, witnesses)?.gamma)
}

/// Dense coefficients of a polynomial vector in the degree-`m` piece.
pub fn dense_vec(v: &[Poly], m: usize) -> Vec<Q> {
    let mut out = Vec::with_capacity(v.len() * (m + 1));
    for p in v {
        assert!(p.degree().is_none_or(|d| d <= m), "entry {p} exceeds degree {m}");
        out.extend(p.to_dense(m + 1));
    }
    out
}

fn undense(v: &[Q], n: usize, m: usize) -> Vec<Poly> {
    (0..n).map(|i| Poly::from_coeffs(v[i * (m + 1)..(i + 1) * (m + 1)].to_vec())).collect()
}

/// `col_j z^k` for all `k <= m - a_j`, tagged with `(j, k)`.
fn generators(mat: &PolyMatrix, degs: &[usize], m: usize) -> Vec<((usize, usize), Vec<Q>)> {
    let mut out = Vec::new();
    for (j, &a) in degs.iter().enumerate() {
        if a > m {
            continue;
        }
        let col = mat.column(j);
        for k in 0..=m - a {
            let shifted: Vec<Poly> = col.iter().map(|p| p.shift(k)).collect();
            out.push(((j, k), dense_vec(&shifted, m)));
        }
    }
    out
}

/// Degree-`m` and degree-`(m+1)` pieces of the submodule generated by the
/// columns, with the Euler-characteristic certificate.
#[derive(Clone, Debug)]
pub struct TruncatedSheaf {
    pub m: usize,
    pub n: usize,
    pub gens: Vec<(usize, usize)>,
    pub gen_vectors: Vec<Vec<Q>>,
    pub piece: Subspace,
    pub next: Subspace,
}

impl TruncatedSheaf {
    /// `x`: coefficients unchanged, degree bound raised.
    pub fn mul_x(&self, v: &[Q]) -> Vec<Q> {
        dense_vec(&undense(v, self.n, self.m), self.m + 1)
    }

    /// `y`: multiplication by `z`.
    pub fn mul_y(&self, v: &[Q]) -> Vec<Q> {
        let polys: Vec<Poly> = undense(v, self.n, self.m).iter().map(|p| p.shift(1)).collect();
        dense_vec(&polys, self.m + 1)
    }
}

pub fn truncate(mat: &PolyMatrix, degs: &[usize], m: usize) -> Result<TruncatedSheaf> {
    let n = mat.rows();
    let r = mat.cols();
    let deg: usize = degs.iter().sum();
    let g = generators(mat, degs, m);
    let piece = Subspace::span(n * (m + 1), g.iter().map(|(_, v)| v.clone()).collect());
    let next = Subspace::span(n * (m + 2), generators(mat, degs, m + 1).into_iter().map(|(_, v)| v).collect());
    let ok = |dim: usize, level: usize| (r * (level + 1)).checked_sub(deg) == Some(dim);
    if degs.iter().any(|&a| a > m) || !ok(piece.dim(), m) || !ok(next.dim(), m + 1) {
        return Err(Error::TruncationCap(format!(
            "pieces of dimension {}/{} at levels {m}/{} fail the certificate {}(m+1)-{deg}",
            piece.dim(),
            next.dim(),
            m + 1,
            r
        )));
    }
    let (gens, gen_vectors) = g.into_iter().unzip();
    Ok(TruncatedSheaf { m, n, gens, gen_vectors, piece, next })
}

/// Upper bound on the truncation level: the environment variable
/// `QML_TRUNCATION_CAP` if set, otherwise `8 (|gamma| + n + 2)`.
pub fn truncation_cap(gamma: &GammaVector) -> usize {
    std::env::var("QML_TRUNCATION_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(8 * (gamma.size() as usize + gamma.n() + 2))
}

/// Truncates at `m`, doubling on certificate failure up to `cap`.
pub fn truncate_certified(mat: &PolyMatrix, degs: &[usize], m: usize, cap: usize) -> Result<TruncatedSheaf> {
    let mut level = m.max(1);
    loop {
        match truncate(mat, degs, level) {
            Ok(t) => return Ok(t),
            Err(e) if level * 2 > cap => {
                return Err(Error::TruncationCap(format!("no certified level up to {cap}: {e}")));
            }
            Err(_) => level *= 2,
        }
    }
}

struct LevelSystem {
    sheaf: TruncatedSheaf,
    comp: Vec<usize>,
    comp_next: Vec<usize>,
    offset: usize,
}

impl LevelSystem {
    fn width(&self) -> usize {
        self.comp.len()
    }

    fn unknown(&self, g: usize, t: usize) -> usize {
        self.offset + g * self.width() + t
    }

    fn gen_index(&self, j: usize, k: usize) -> usize {
        self.sheaf.gens.iter().position(|&x| x == (j, k)).expect("generator")
    }

    /// Lifts the class of generator `g` from a solution vector.
    fn lift(&self, u: &[Q], g: usize) -> Vec<Q> {
        let mut v = vec![q(0); self.sheaf.piece.ambient()];
        for (t, &c) in self.comp.iter().enumerate() {
            v[c] = u[self.unknown(g, t)].clone();
        }
        v
    }
}

/// Tangent space of a quasiflag as morphisms of truncated graded modules.
pub struct GradedTangent {
    pub qf: Quasiflag,
    pub m: usize,
    levels: Vec<LevelSystem>,
    pub unknowns: usize,
    pub basis: Vec<Vec<Q>>,
}

impl GradedTangent {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn restrict(v: &[Q], coords: &[usize]) -> Vec<Q> {
    coords.iter().map(|&c| v[c].clone()).collect()
}

/// Matrix of `v -> coords(reduce(f(embed(v))))` on the unit vectors of
/// `from`.
fn block_matrix(from: &[usize], ambient: usize, f: impl Fn(&[Q]) -> Vec<Q>, onto: &Subspace, coords: &[usize]) -> Matrix {
    let cols: Vec<Vec<Q>> = from.iter().map(|&c| restrict(&onto.reduce(&f(&unit(ambient, c))), coords)).collect();
    Matrix::from_columns(coords.len(), &cols)
}

fn add_block(rows: &mut [Vec<Q>], row0: usize, col0: usize, b: &Matrix, sign: i64) {
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            let x = b.get(i, j);
            if *x != q(0) {
                rows[row0 + i][col0 + j] += x * q(sign);
            }
        }
    }
}

/// Builds and solves the system at level `m`.
fn tangent_at(qf: &Quasiflag, m: usize) -> Result<GradedTangent> {
    let n = qf.n;
    let mut levels = Vec::new();
    let mut offset = 0;
    for p in 1..n {
        let sheaf = truncate(qf.matrix(p), qf.column_degrees(p), m)?;
        let comp = sheaf.piece.complement_coords();
        let comp_next = sheaf.next.complement_coords();
        let size = sheaf.gens.len() * comp.len();
        levels.push(LevelSystem { sheaf, comp, comp_next, offset });
        offset += size;
    }
    let unknowns = offset;
    let vm = n * (m + 1);
    let mut rows: Vec<Vec<Q>> = Vec::new();

    for l in &levels {
        let s = &l.sheaf;
        let shift = block_matrix(&l.comp, vm, |v| s.mul_y(v), &s.next, &l.comp_next);
        let incl = block_matrix(&l.comp, vm, |v| s.mul_x(v), &s.next, &l.comp_next);
        for (g, &(j, k)) in s.gens.iter().enumerate() {
            let Some(g1) = s.gens.iter().position(|&x| x == (j, k + 1)) else { continue };
            // y h(s_k) = x h(s_{k+1})
            let row0 = rows.len();
            rows.extend((0..l.comp_next.len()).map(|_| vec![q(0); unknowns]));
            add_block(&mut rows, row0, l.unknown(g, 0), &shift, 1);
            add_block(&mut rows, row0, l.unknown(g1, 0), &incl, -1);
        }
    }

    for p in 1..n.saturating_sub(1) {
        let (lo, hi) = (&levels[p - 1], &levels[p]);
        let proj = block_matrix(&lo.comp, vm, |v| v.to_vec(), &hi.sheaf.piece, &hi.comp);
        let gm = Matrix::from_columns(vm, &hi.sheaf.gen_vectors);
        for (g, e) in lo.sheaf.gen_vectors.iter().enumerate() {
            let coef = solve(&gm, e)
                .ok_or_else(|| Error::Invalid(format!("E_{p} is not contained in E_{} in degree {m}", p + 1)))?;
            let row0 = rows.len();
            rows.extend((0..hi.width()).map(|_| vec![q(0); unknowns]));
            add_block(&mut rows, row0, lo.unknown(g, 0), &proj, 1);
            for (i, c) in coef.iter().enumerate() {
                if *c == q(0) {
                    continue;
                }
                for t in 0..hi.width() {
                    rows[row0 + t][hi.unknown(i, t)] -= c;
                }
            }
        }
    }

    let basis = if rows.is_empty() {
        (0..unknowns).map(|i| unit(unknowns, i)).collect()
    } else {
        let piv = rref_rows(&mut rows, unknowns);
        let mat = Matrix::from_rows(unknowns, rows[..piv.len()].to_vec());
        mat.nullspace()
    };
    Ok(GradedTangent { qf: qf.clone(), m, levels, unknowns, basis })
}

fn start_level(qf: &Quasiflag) -> usize {
    qf.degrees.iter().flatten().copied().max().unwrap_or(0) + 1
}

/// Tangent space at the smallest certified level whose dimension is that
/// of the Laumon space, starting one above the largest column degree.
pub fn quiver_tangent_general(qf: &Quasiflag) -> Result<GradedTangent> {
    quiver_tangent_at(qf, start_level(qf))
}

pub fn quiver_tangent_at(qf: &Quasiflag, m: usize) -> Result<GradedTangent> {
    let cap = truncation_cap(&qf.gamma);
    let expected = 2 * qf.gamma.size() as usize + flag_dim(qf.n) as usize;
    let mut level = m.max(1);
    let mut last = None;
    while level <= cap {
        match tangent_at(qf, level) {
            Ok(t) if t.dim() == expected => return Ok(t),
            Ok(t) => last = Some(format!("dimension {} instead of {expected} at level {level}", t.dim())),
            Err(e @ Error::Invalid(_)) => return Err(e),
            Err(e) => last = Some(e.to_string()),
        }
        level *= 2;
    }
    Err(Error::TruncationCap(format!("cap {cap} reached: {}", last.unwrap_or_default())))
}

/// Differential of the Plücker map, by first-order wedges of deformed
/// generators.
#[derive(Clone, Debug)]
pub struct GradedDpi {
    pub m: usize,
    pub tangent_dim: usize,
    /// images of the tangent basis, in Plücker coordinates modulo each
    /// wedge line, concatenated over `p`
    pub columns: Vec<Vec<Q>>,
    /// `(offset, c_p)` of each component
    pub blocks: Vec<(usize, usize)>,
    pub ambient: usize,
}

impl GradedDpi {
    pub fn rank(&self) -> usize {
        Subspace::span(self.ambient, self.columns.clone()).dim()
    }

    pub fn kernel_dim(&self) -> usize {
        self.tangent_dim - self.rank()
    }

    /// Image in the coordinates of the ambient tangent at the maximally
    /// degenerate point; only valid for points of the simple fiber.
    pub fn image_in_layout(&self, qf: &Quasiflag) -> Result<Subspace> {
        if !fiber_membership(qf) {
            return Err(Error::Invalid("the quasiflag is not in the simple fiber".into()));
        }
        let layout = AmbientLayout::new(qf.gamma());
        let n = qf.n();
        let mut out = Vec::new();
        for col in &self.columns {
            let mut v = vec![q(0); layout.dim()];
            for (i, &(off, c)) in self.blocks.iter().enumerate() {
                let p = i + 1;
                for (si, s) in subsets(n, p).iter().enumerate() {
                    for k in 0..=c {
                        let x = &col[off + si * (c + 1) + k];
                        if *x == q(0) {
                            continue;
                        }
                        let top = s.iter().copied().eq(1..=p);
                        let idx = if !top {
                            layout.free_coord(p, s, k)
                        } else if k < c {
                            layout.torsion_coord(p, k)
                        } else {
                            return Err(Error::Internal("wedge-line direction survived reduction".into()));
                        };
                        v[idx] = x.clone();
                    }
                }
            }
            out.push(v);
        }
        Ok(Subspace::span(layout.dim(), out))
    }
}

/// Solves `F = psi + W g` and `F' = z^N psi + W g'` for `psi` of degree
/// `<= c`, returning `psi` modulo `W`.
struct WedgeSolver {
    n_sub: usize,
    c: usize,
    top: usize,
    mat: Matrix,
    line: Subspace,
}

impl WedgeSolver {
    fn new(w: &[Poly], c: usize, top: usize) -> Self {
        let n_sub = w.len();
        let big = n_sub * (top + 1);
        let nn = top - c;
        let psi = n_sub * (c + 1);
        let cols = psi + 2 * (nn + 1);
        let mut mat = Matrix::zeros(2 * big, cols);
        for s in 0..n_sub {
            for k in 0..=c {
                mat.set(s * (top + 1) + k, s * (c + 1) + k, q(1));
                mat.set(big + s * (top + 1) + k + nn, s * (c + 1) + k, q(1));
            }
            for l in 0..=nn {
                for (t, x) in w[s].coeffs().iter().enumerate() {
                    mat.set(s * (top + 1) + t + l, psi + l, x.clone());
                    mat.set(big + s * (top + 1) + t + l, psi + nn + 1 + l, x.clone());
                }
            }
        }
        let wv: Vec<Q> = w.iter().flat_map(|p| p.to_dense(c + 1)).collect();
        WedgeSolver { n_sub, c, top, mat, line: Subspace::span(n_sub * (c + 1), vec![wv]) }
    }

    fn solve(&self, f: &[Poly], f2: &[Poly]) -> Result<Vec<Q>> {
        let mut rhs: Vec<Q> = f.iter().flat_map(|p| p.to_dense(self.top + 1)).collect();
        rhs.extend(f2.iter().flat_map(|p| p.to_dense(self.top + 1)));
        let x = solve(&self.mat, &rhs)
            .ok_or_else(|| Error::Internal("first-order wedge is not a motion of the wedge line".into()))?;
        Ok(self.line.reduce(&x[..self.n_sub * (self.c + 1)]))
    }
}

/// First-order term of `(c_1 + e d_1) ^ ... ^ (c_p + e d_p)`.
fn first_order_wedge(cols: &[Vec<Poly>], defs: &[Vec<Poly>], n: usize) -> Vec<Poly> {
    let mut acc = vec![Poly::zero(); subsets(n, cols.len()).len()];
    for j in 0..cols.len() {
        let mut c = cols.to_vec();
        c[j] = defs[j].clone();
        for (a, b) in acc.iter_mut().zip(minors_of_columns(&c, n)) {
            *a = &*a + &b;
        }
    }
    acc
}

/// Perturbs each lifted deformation by a random element of the piece;
/// the extracted motion must not change.
#[derive(Clone, Copy, Debug)]
pub struct Gauge(pub u64);

pub fn dpi_general(t: &GradedTangent, gauge: Option<Gauge>) -> Result<GradedDpi> {
    let qf = &t.qf;
    let n = qf.n;
    let m = t.m;
    let mut rng = gauge.map(|g| ChaCha8Rng::seed_from_u64(g.0));
    let mut blocks = Vec::new();
    let mut solvers = Vec::new();
    let mut ambient = 0;
    for p in 1..n {
        let c = qf.gamma.c(p) as usize;
        blocks.push((ambient, c));
        ambient += subsets(n, p).len() * (c + 1);
        let w = qf.wedge_line(p);
        if w.iter().all(|x| x.is_zero()) || w.iter().any(|x| x.degree().is_some_and(|d| d > c)) {
            return Err(Error::Internal(format!("wedge line of E_{p} is not a section of degree {c}")));
        }
        solvers.push(WedgeSolver::new(&w, c, p * m));
    }

    let mut columns = Vec::with_capacity(t.dim());
    for u in &t.basis {
        let mut col = Vec::with_capacity(ambient);
        for (i, l) in t.levels.iter().enumerate() {
            let p = i + 1;
            let degs = qf.column_degrees(p);
            let mat = qf.matrix(p);
            let mut lift = |g: usize| {
                let mut v = l.lift(u, g);
                if let Some(r) = rng.as_mut() {
                    for b in l.sheaf.piece.basis() {
                        let c = q(r.gen_range(-3i64..=3));
                        for (x, y) in v.iter_mut().zip(b) {
                            *x += &c * y;
                        }
                    }
                }
                undense(&v, n, m)
            };
            let mut cx = Vec::new();
            let mut dx = Vec::new();
            let mut cy = Vec::new();
            let mut dy = Vec::new();
            for (j, &a) in degs.iter().enumerate() {
                let col_j = mat.column(j);
                cx.push(col_j.clone());
                dx.push(lift(l.gen_index(j, 0)));
                cy.push(col_j.iter().map(|x| x.shift(m - a)).collect());
                dy.push(lift(l.gen_index(j, m - a)));
            }
            let f = first_order_wedge(&cx, &dx, n);
            let f2 = first_order_wedge(&cy, &dy, n);
            col.extend(solvers[i].solve(&f, &f2)?);
        }
        columns.push(col);
    }
    Ok(GradedDpi { m, tangent_dim: t.dim(), columns, blocks, ambient })
}

pub fn dpi_kernel_general(qf: &Quasiflag) -> Result<usize> {
    Ok(dpi_general(&quiver_tangent_general(qf)?, None)?.kernel_dim())
}

/// Every wedge line is a nonzero multiple of `z^{c_p} v_{[1..p]}`.
pub fn fiber_membership(qf: &Quasiflag) -> bool {
    (1..qf.n).all(|p| {
        let c = qf.gamma.c(p) as usize;
        let w = qf.wedge_line(p);
        w[0].coeffs().iter().enumerate().all(|(k, x)| (k == c) != (*x == q(0)))
            && w[1..].iter().all(|x| x.is_zero())
    })
}

const MAX_FLAG_ATTEMPTS: usize = 2000;

fn random_poly(rng: &mut ChaCha8Rng, max_deg: Option<usize>) -> Poly {
    match max_deg {
        None => Poly::zero(),
        Some(d) => Poly::from_coeffs((0..=d).map(|_| q(rng.gen_range(-3i64..=3))).collect()),
    }
}

fn random_composition(rng: &mut ChaCha8Rng, total: usize, parts: usize) -> Vec<usize> {
    let mut out = vec![0; parts];
    for _ in 0..total {
        out[rng.gen_range(0..parts)] += 1;
    }
    out
}

/// A flag of subbundles with profile `gamma`: the minors of every `M_p`
/// are coprime and of exact degree `c_p`, so each `E_p` is saturated also at
/// infinity. Built as `M_p = M_{p+1} A_p` by seeded rejection sampling.
pub fn random_genuine_flag(gamma: &GammaVector, seed: u64) -> Result<Quasiflag> {
    let n = gamma.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..MAX_FLAG_ATTEMPTS {
        let mut mats = vec![PolyMatrix::zeros(n, 0); n - 1];
        let mut wits = Vec::new();
        let mut degs = random_composition(&mut rng, gamma.c(n - 1) as usize, n - 1);
        let mut top = PolyMatrix::zeros(n, n - 1);
        for (j, &a) in degs.iter().enumerate() {
            for i in 0..n {
                top.set(i, j, random_poly(&mut rng, Some(a)));
            }
        }
        mats[n - 2] = top;
        for p in (1..n - 1).rev() {
            let target = random_composition(&mut rng, gamma.c(p) as usize, p);
            let mut a = PolyMatrix::zeros(p + 1, p);
            for (j, &b) in target.iter().enumerate() {
                for (i, &d) in degs.iter().enumerate() {
                    a.set(i, j, random_poly(&mut rng, b.checked_sub(d)));
                }
            }
            mats[p - 1] = mats[p].mul(&a)?;
            wits.insert(0, a);
            degs = target;
        }
        for p in 1..n {
            let m = &mats[p - 1];
            let c = gamma.c(p) as usize;
            if (0..p).map(|j| m.column_degree(j)).sum::<Option<usize>>() != Some(c) {
                continue 'attempt;
            }
            let minors = m.minors();
            if minors.iter().all(|x| x.degree() != Some(c)) {
                continue 'attempt;
            }
            let g = minors.iter().fold(Poly::zero(), |acc, x| acc.gcd(x));
            if g.degree() != Some(0) {
                continue 'attempt;
            }
        }
        match Quasiflag::new(mats, wits) {
            Ok(qf) if qf.gamma == *gamma => return Ok(qf),
            _ => continue,
        }
    }
    Err(Error::Internal(format!("no genuine flag with profile {gamma} after {MAX_FLAG_ATTEMPTS} draws")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemarkPoint {
    pub t: String,
    pub in_fiber: bool,
    pub tangent_dim: usize,
    pub kernel_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedKernel {
    pub defect: String,
    pub piece_dim: u32,
    pub fast_kernel: usize,
    pub graded_kernel: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemarkReport {
    pub cell_dims: Vec<u32>,
    pub fixed_points: Vec<FixedKernel>,
    pub family: Vec<RemarkPoint>,
    /// microlocal test at the non-fixed members of the family
    pub sampled_microlocal: Vec<MicrolocalRecord>,
    pub semicontinuous: bool,
    pub pass: bool,
}

/// The `SL_3`, `gamma = (2,2)` example: the three cells of the simple
/// fiber and the family through the vertex `delta(2;1,1)`.
pub fn remark_scenario(seed: u64) -> Result<RemarkReport> {
    use crate::combinatorics::{enumerate_defects, piece_dim};
    use crate::fixed_point::kernel_dim;
    let gamma = GammaVector::parse("2,2")?;
    let defects = enumerate_defects(&gamma);
    let mut cell_dims: Vec<u32> = defects.iter().map(piece_dim).collect();
    cell_dims.sort_unstable();
    let mut fixed_points = Vec::new();
    for d in &defects {
        fixed_points.push(FixedKernel {
            defect: d.to_string(),
            piece_dim: piece_dim(d),
            fast_kernel: kernel_dim(d)?,
            graded_kernel: dpi_kernel_general(&Quasiflag::fixed_point(d))?,
        });
    }
    let mut family = Vec::new();
    let mut sampled_microlocal = Vec::new();
    for t in [0, 1, 2] {
        let qf = Quasiflag::remark_family(&q(t));
        let tangent = quiver_tangent_general(&qf)?;
        let map = dpi_general(&tangent, None)?;
        let in_fiber = fiber_membership(&qf);
        if t != 0 && in_fiber {
            let image = map.image_in_layout(&qf)?;
            let label = format!("remark family t={t}");
            sampled_microlocal.push(microlocal_from_image(&label, &gamma, &image, None, seed, DEFAULT_WITNESS_DRAWS)?);
        }
        family.push(RemarkPoint { t: t.to_string(), in_fiber, tangent_dim: tangent.dim(), kernel_dim: map.kernel_dim() });
    }
    let semicontinuous = family[1..].iter().all(|x| family[0].kernel_dim >= x.kernel_dim);
    let pass = cell_dims == [0, 1, 2]
        && family.iter().all(|x| x.in_fiber)
        && family[0].kernel_dim == 3
        && family[1..].iter().all(|x| x.kernel_dim == 2)
        && fixed_points.iter().all(|f| f.fast_kernel == f.graded_kernel)
        && semicontinuous;
    Ok(RemarkReport { cell_dims, fixed_points, family, sampled_microlocal, semicontinuous, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(rows: &[&[&str]]) -> PolyMatrix {
        PolyMatrix::parse(&rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn validation() {
        let std2 = pm(&[&["1"], &["0"]]);
        assert!(validate(vec![std2], vec![]).unwrap().is_zero());
        let g = validate(
            vec![pm(&[&["z^2"], &["0"], &["0"]]), pm(&[&["z", "0"], &["0", "z"], &["0", "0"]])],
            vec![pm(&[&["z"], &["0"]])],
        )
        .unwrap();
        assert_eq!(g.coeffs(), &[2, 2]);
        let bad = validate(
            vec![pm(&[&["1"], &["0"], &["0"]]), pm(&[&["1", "1"], &["0", "0"], &["0", "0"]])],
            vec![pm(&[&["1"], &["0"]])],
        );
        assert!(bad.is_err());
        let not_nested = validate(
            vec![pm(&[&["0"], &["0"], &["1"]]), pm(&[&["1", "0"], &["0", "1"], &["0", "0"]])],
            vec![pm(&[&["1"], &["0"]])],
        );
        assert!(not_nested.is_err());
    }

    #[test]
    fn truncation_pieces() {
        let line = pm(&[&["z^3"]]);
        for m in 3..7 {
            assert_eq!(truncate(&line, &[3], m).unwrap().piece.dim(), m - 3 + 1);
        }
        let qf = Quasiflag::remark_family(&q(1));
        let t = truncate(qf.matrix(2), qf.column_degrees(2), 4).unwrap();
        assert_eq!(t.piece.dim(), 2 * 5 - 2);
        let dependent = pm(&[&["z", "z"], &["0", "0"]]);
        assert!(matches!(truncate_certified(&dependent, &[1, 1], 2, 16), Err(Error::TruncationCap(_))));
    }

    #[test]
    fn tangent_dims() {
        let std2 = Quasiflag::new(vec![pm(&[&["1"], &["0"]])], vec![]).unwrap();
        assert_eq!(quiver_tangent_general(&std2).unwrap().dim(), 1);
        assert_eq!(quiver_tangent_general(&Quasiflag::remark_family(&q(1))).unwrap().dim(), 11);
        let d = DefectMatrix::parse("2;1,1").unwrap();
        assert_eq!(quiver_tangent_general(&Quasiflag::fixed_point(&d)).unwrap().dim(), 11);
    }

    #[test]
    fn remark_kernels() {
        assert_eq!(dpi_kernel_general(&Quasiflag::remark_family(&q(0))).unwrap(), 3);
        assert_eq!(dpi_kernel_general(&Quasiflag::remark_family(&q(1))).unwrap(), 2);
    }

    #[test]
    fn remark_report() {
        let r = remark_scenario(1).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.cell_dims, vec![0, 1, 2]);
        assert_eq!(r.sampled_microlocal.len(), 2);
        assert!(r.sampled_microlocal.iter().all(|m| m.pass));
    }

    #[test]
    fn membership() {
        let d = DefectMatrix::parse("2;1,1").unwrap();
        assert!(fiber_membership(&Quasiflag::fixed_point(&d)));
        for t in 0..3 {
            assert!(fiber_membership(&Quasiflag::remark_family(&q(t))));
        }
        let g = random_genuine_flag(&GammaVector::parse("1,1").unwrap(), 3).unwrap();
        assert!(!fiber_membership(&g));
    }

    #[test]
    fn doc_roundtrip() {
        let qf = Quasiflag::remark_family(&q(2));
        let s = serde_json::to_string(&qf.to_doc()).unwrap();
        let back = Quasiflag::from_json(&s).unwrap();
        assert_eq!(back.to_doc(), qf.to_doc());
    }
}
