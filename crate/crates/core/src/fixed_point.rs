//! The torus-fixed quasiflag `delta(d)` of a defect matrix, its tangent
//! space as morphisms of quiver representations, the Laumon differential in
//! closed form, and the subspace `N` witnessing the kernel bound.

use serde::{Deserialize, Serialize};

use crate::ambient::{sort_with_sign, AmbientLayout};
use crate::combinatorics::{flag_dim, key_prop_bound, piece_dim, DefectMatrix};
use crate::error::{Error, Result};
use crate::linalg::{q, solve, unit, Matrix, Subspace, Q};
use crate::poly::Poly;
use crate::sheaf::{full_hom_dim, hom_dim, BlockHom, SheafSummand, SumHom, SummandKind};

/// One step `E_p -> V (x) O -> Q_p` of the fixed quasiflag.
#[derive(Clone, Debug)]
pub struct Level {
    pub p: usize,
    /// `Line(d_{p,q}) v_q` for `q = 1..=p`
    pub e: Vec<SheafSummand>,
    /// `Torsion(d_{p,q}) v_q` for `q <= p` with `d_{p,q} > 0`, then
    /// `Line(0) v_r` for `r > p`
    pub quotient: Vec<SheafSummand>,
    /// position in `quotient` of the summand on color `c` (1-based), if any
    target_of_color: Vec<Option<usize>>,
    /// start of each block `(i, j)` inside this level's coordinates
    block_start: Vec<Vec<usize>>,
    offset: usize,
    dim: usize,
}

impl Level {
    /// Position of the quotient summand on color `c`.
    pub fn target(&self, c: usize) -> Option<usize> {
        self.target_of_color[c]
    }

    /// Global hom coordinate of `z^k` in the block from `E_{p,q}` to the
    /// quotient summand on color `c`.
    pub fn coord(&self, q: usize, c: usize, k: usize) -> Option<usize> {
        let j = self.target(c)?;
        let d = hom_dim(self.e[q - 1].kind, self.quotient[j].kind);
        (k < d).then(|| self.offset + self.block_start[q - 1][j] + k)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// `delta(d)` with its structure maps.
#[derive(Clone, Debug)]
pub struct FixedPointData {
    defect: DefectMatrix,
    levels: Vec<Level>,
    iota: Vec<SumHom>,
    sigma: Vec<SumHom>,
    hom_dim: usize,
}

fn line_kind(d: u32) -> SummandKind {
    SummandKind::Line(d)
}

impl FixedPointData {
    pub fn build(defect: &DefectMatrix) -> Self {
        let n = defect.n();
        let d = |p: usize, q: usize| if p < n { defect.get(p, q) } else { 0 };
        let mut levels = Vec::with_capacity(n - 1);
        let mut offset = 0;
        for p in 1..n {
            let e: Vec<SheafSummand> = (1..=p).map(|q| SheafSummand::line(d(p, q), q)).collect();
            let mut quotient = Vec::new();
            let mut target_of_color = vec![None; n + 1];
            for q in 1..=p {
                if d(p, q) > 0 {
                    target_of_color[q] = Some(quotient.len());
                    quotient.push(SheafSummand::torsion(d(p, q), q));
                }
            }
            for r in p + 1..=n {
                target_of_color[r] = Some(quotient.len());
                quotient.push(SheafSummand::line(0, r));
            }
            let mut block_start = Vec::with_capacity(p);
            let mut local = 0;
            for s in &e {
                let mut row = Vec::with_capacity(quotient.len());
                for t in &quotient {
                    row.push(local);
                    local += hom_dim(s.kind, t.kind);
                }
                block_start.push(row);
            }
            debug_assert_eq!(local, full_hom_dim(&e, &quotient));
            levels.push(Level { p, e, quotient, target_of_color, block_start, offset, dim: local });
            offset += local;
        }

        let mut iota = Vec::new();
        let mut sigma = Vec::new();
        for p in 1..n.saturating_sub(1) {
            let (a, b) = (&levels[p - 1], &levels[p]);
            let blocks = (1..=p).map(|q| {
                let u = Poly::z_pow((d(p, q) - d(p + 1, q)) as usize);
                ((q - 1, q - 1), BlockHom::new(line_kind(d(p, q)), line_kind(d(p + 1, q)), u).expect("monotone defect"))
            });
            iota.push(SumHom::assemble(a.e.clone(), b.e.clone(), blocks).expect("inclusion blocks"));

            let mut s = SumHom::zero(a.quotient.clone(), b.quotient.clone());
            for c in 1..=n {
                let (Some(i), Some(j)) = (a.target(c), b.target(c)) else { continue };
                let blk = BlockHom::new(a.quotient[i].kind, b.quotient[j].kind, Poly::one()).expect("projection blocks");
                s.set_block(i, j, blk).expect("projection endpoints");
            }
            sigma.push(s);
        }
        FixedPointData { defect: defect.clone(), levels, iota, sigma, hom_dim: offset }
    }

    pub fn defect(&self) -> &DefectMatrix {
        &self.defect
    }

    pub fn n(&self) -> usize {
        self.defect.n()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, p: usize) -> &Level {
        &self.levels[p - 1]
    }

    pub fn iota(&self, p: usize) -> &SumHom {
        &self.iota[p - 1]
    }

    pub fn sigma(&self, p: usize) -> &SumHom {
        &self.sigma[p - 1]
    }

    /// Dimension of `(+)_p Hom(E_p, Q_p)`.
    pub fn hom_dim(&self) -> usize {
        self.hom_dim
    }

    /// Sum of the defect-row degrees at level `p`, i.e. the degree of
    /// `Lambda^p E_p` as a subsheaf of `z^0`.
    pub fn wedge_degree(&self, p: usize) -> u32 {
        self.level(p).e.iter().map(|s| match s.kind {
            SummandKind::Line(a) => a,
            SummandKind::Torsion(_) => unreachable!(),
        }).sum()
    }

    /// Splits a hom coordinate vector into the per-level morphisms.
    pub fn split(&self, v: &[Q]) -> Result<Vec<SumHom>> {
        if v.len() != self.hom_dim {
            return Err(Error::Invalid(format!("expected {} hom coordinates, got {}", self.hom_dim, v.len())));
        }
        self.levels
            .iter()
            .map(|l| SumHom::from_coords(l.e.clone(), l.quotient.clone(), &v[l.offset..l.offset + l.dim]))
            .collect()
    }

    pub fn join(&self, hs: &[SumHom]) -> Vec<Q> {
        hs.iter().flat_map(|h| h.coords()).collect()
    }

    /// Failure of the commutation squares `sigma_p h_p = h_{p+1} iota_p`,
    /// concatenated over `p`.
    pub fn residual(&self, v: &[Q]) -> Result<Vec<Q>> {
        let hs = self.split(v)?;
        let mut out = Vec::new();
        for p in 1..self.n().saturating_sub(1) {
            let lhs = self.sigma(p).compose(&hs[p - 1])?;
            let rhs = hs[p].compose(self.iota(p))?;
            out.extend(lhs.sub(&rhs)?.coords());
        }
        Ok(out)
    }

    pub fn is_tangent(&self, v: &[Q]) -> Result<bool> {
        Ok(self.residual(v)?.iter().all(|x| *x == q(0)))
    }

    /// Matrix of the linear map [`Self::residual`].
    pub fn constraint_matrix(&self) -> Result<Matrix> {
        let cols: Vec<Vec<Q>> = (0..self.hom_dim)
            .map(|i| self.residual(&unit(self.hom_dim, i)))
            .collect::<Result<_>>()?;
        let rows = cols.first().map_or(0, |c| c.len());
        Ok(Matrix::from_columns(rows, &cols))
    }

    /// Is the hom coordinate in a block whose target is a torsion summand?
    fn torsion_target_coords(&self, diagonal: bool) -> Vec<usize> {
        let mut out = Vec::new();
        for l in &self.levels {
            for (i, s) in l.e.iter().enumerate() {
                for (j, t) in l.quotient.iter().enumerate() {
                    if !matches!(t.kind, SummandKind::Torsion(_)) {
                        continue;
                    }
                    if !diagonal && s.label == t.label {
                        continue;
                    }
                    let start = l.offset + l.block_start[i][j];
                    out.extend(start..start + hom_dim(s.kind, t.kind));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct TangentSpace {
    /// basis vectors in hom coordinates
    pub basis: Vec<Vec<Q>>,
    pub hom_dim: usize,
}

impl TangentSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn expected_tangent_dim(defect: &DefectMatrix) -> usize {
    2 * defect.gamma().size() as usize + flag_dim(defect.n()) as usize
}

/// Solution space of the commutation constraints. Fails if its dimension
/// is not that of the (smooth) Laumon space.
pub fn tangent_space(fp: &FixedPointData) -> Result<TangentSpace> {
    let basis = if fp.n() <= 2 {
        (0..fp.hom_dim()).map(|i| unit(fp.hom_dim(), i)).collect()
    } else {
        fp.constraint_matrix()?.nullspace()
    };
    let expected = expected_tangent_dim(fp.defect());
    if basis.len() != expected {
        return Err(Error::Internal(format!(
            "tangent space at {} has dimension {} instead of {expected}",
            fp.defect(),
            basis.len()
        )));
    }
    Ok(TangentSpace { basis, hom_dim: fp.hom_dim() })
}

/// The differential, both on all hom coordinates and restricted to `T`.
#[derive(Clone, Debug)]
pub struct DpiMap {
    pub layout: AmbientLayout,
    /// ambient x hom
    pub full: Matrix,
    pub tangent: TangentSpace,
    /// ambient x dim T
    pub on_tangent: Matrix,
}

impl DpiMap {
    pub fn rank(&self) -> usize {
        self.on_tangent.rank()
    }

    pub fn kernel_dim(&self) -> usize {
        self.tangent.dim() - self.rank()
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        self.full.mul_vec(v)
    }

    pub fn image(&self) -> Subspace {
        Subspace::span(self.layout.dim(), self.on_tangent.columns())
    }
}

/// Matrix of `h -> (Lambda^p h_p)_p` in hom coordinates.
pub fn dpi_full(fp: &FixedPointData, layout: &AmbientLayout) -> Matrix {
    let n = fp.n();
    let defect = fp.defect();
    let mut m = Matrix::zeros(layout.dim(), fp.hom_dim());
    for l in fp.levels() {
        let p = l.p;
        let c = layout.gamma().c(p) as usize;
        for qq in 1..=p {
            let d = defect.get(p, qq) as usize;
            let shift = c - d;
            for k in 0..d {
                let col = l.coord(qq, qq, k).expect("diagonal torsion block");
                let row = layout.torsion_coord(p, k + shift);
                let x = m.get(row, col) + q_one();
                m.set(row, col, x);
            }
            let sign = if (p - qq) % 2 == 0 { 1 } else { -1 };
            for r in p + 1..=n {
                let mut label: Vec<usize> = (1..=p).collect();
                label[qq - 1] = r;
                let (label, s) = sort_with_sign(label);
                debug_assert_eq!(s, sign);
                for k in 0..=d {
                    let col = l.coord(qq, r, k).expect("free block");
                    let row = layout.free_coord(p, &label, k + shift);
                    m.set(row, col, q(sign));
                }
            }
        }
    }
    m
}

fn q_one() -> Q {
    q(1)
}

pub fn dpi(fp: &FixedPointData) -> Result<DpiMap> {
    let tangent = tangent_space(fp)?;
    let layout = AmbientLayout::new(&fp.defect().gamma());
    for p in 1..fp.n() {
        if fp.wedge_degree(p) != layout.gamma().c(p) {
            return Err(Error::Internal(format!("Lambda^{p} E_{p} has the wrong degree")));
        }
    }
    let full = dpi_full(fp, &layout);
    let cols: Vec<Vec<Q>> = tangent.basis.iter().map(|v| full.mul_vec(v)).collect();
    let on_tangent = Matrix::from_columns(layout.dim(), &cols);
    Ok(DpiMap { layout, full, tangent, on_tangent })
}

pub fn kernel_dim(defect: &DefectMatrix) -> Result<usize> {
    Ok(dpi(&FixedPointData::build(defect))?.kernel_dim())
}

/// How a seed morphism was turned into a tangent vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completion {
    /// the seed already satisfies the commutation constraints
    Exact,
    /// corrected on off-diagonal torsion blocks, which the differential
    /// does not see
    OffDiagonal,
    /// corrected on torsion blocks including diagonal ones
    Torsion,
    /// no tangent vector agrees with the seed off the torsion blocks
    Failed,
}

#[derive(Clone, Debug)]
pub struct NuElement {
    pub seed: Vec<Q>,
    /// tangent vector, or the seed itself when completion failed
    pub vector: Vec<Q>,
    pub completion: Completion,
}

impl NuElement {
    pub fn is_tangent(&self) -> bool {
        self.completion != Completion::Failed
    }
}

/// Corrects `seed` to a tangent vector by adding a morphism supported on
/// torsion-target blocks, excluding the coordinates in `frozen`.
fn complete(fp: &FixedPointData, seed: Vec<Q>, frozen: &[usize]) -> Result<NuElement> {
    if fp.is_tangent(&seed)? {
        return Ok(NuElement { vector: seed.clone(), seed, completion: Completion::Exact });
    }
    let c = fp.constraint_matrix()?;
    let target: Vec<Q> = c.mul_vec(&seed).into_iter().map(|x| -x).collect();
    for (diagonal, kind) in [(false, Completion::OffDiagonal), (true, Completion::Torsion)] {
        let free: Vec<usize> = fp.torsion_target_coords(diagonal).into_iter().filter(|i| !frozen.contains(i)).collect();
        let sub = Matrix::from_columns(c.rows(), &free.iter().map(|&i| c.column(i)).collect::<Vec<_>>());
        if let Some(x) = solve(&sub, &target) {
            let mut v = seed.clone();
            for (&i, xi) in free.iter().zip(x) {
                v[i] += xi;
            }
            if !fp.is_tangent(&v)? {
                return Err(Error::Internal("completed element fails the commutation constraints".into()));
            }
            return Ok(NuElement { seed, vector: v, completion: kind });
        }
    }
    Ok(NuElement { vector: seed.clone(), seed, completion: Completion::Failed })
}

/// Strict pairs `(p, q)`, `p > q`, in lexicographic order, with the
/// number of coefficients `d_{p,q} + 1` of their polynomials.
pub fn n0_layout(defect: &DefectMatrix) -> Vec<((usize, usize), usize)> {
    let n = defect.n();
    let mut out = Vec::new();
    for p in 1..n {
        for q in 1..p {
            out.push(((p, q), defect.get(p, q) as usize + 1));
        }
    }
    out
}

pub fn n0_dim(defect: &DefectMatrix) -> usize {
    n0_layout(defect).iter().map(|(_, d)| d).sum()
}

/// The family `F^r_{p,q} = f_{r,q} . (E_{p,q} into E_{r,q})`, completed to a
/// tangent vector. `f` holds one polynomial per strict pair, ordered as in
/// [`n0_layout`].
pub fn nu0(fp: &FixedPointData, f: &[Poly]) -> Result<NuElement> {
    let defect = fp.defect();
    let layout = n0_layout(defect);
    if f.len() != layout.len() {
        return Err(Error::Invalid(format!("expected {} polynomials, got {}", layout.len(), f.len())));
    }
    let mut seed = vec![q(0); fp.hom_dim()];
    for (((r, qq), len), fr) in layout.iter().zip(f) {
        if fr.degree().is_some_and(|d| d >= *len) {
            return Err(Error::Invalid(format!("f_{{{r},{qq}}} = {fr} exceeds degree {}", len - 1)));
        }
        for p in *qq..*r {
            let shift = (defect.get(p, *qq) - defect.get(*r, *qq)) as usize;
            let l = fp.level(p);
            for (k, coef) in fr.coeffs().iter().enumerate() {
                let col = l.coord(*qq, *r, k + shift).ok_or_else(|| Error::Internal("nu0 block out of range".into()))?;
                seed[col] += coef;
            }
        }
    }
    complete(fp, seed, &[])
}

/// `p_0 = min { p : d_{p,p} > 0 }`.
pub fn p0(defect: &DefectMatrix) -> Result<usize> {
    (1..defect.n())
        .find(|&p| defect.get(p, p) > 0)
        .ok_or(Error::ZeroGamma("nu1 is undefined for gamma = 0"))
}

/// Class power used by [`nu1`] when none is given: the top power
/// `z^{d_{p0,p0}-1}`, the only monomial whose diagonal lift always
/// commutes with the projections.
pub fn canonical_nu1_power(defect: &DefectMatrix) -> Result<usize> {
    Ok(defect.get(p0(defect)?, p0(defect)?) as usize - 1)
}

/// The element on `E_{p0,p0} -> Torsion(d_{p0,p0}) v_{p0}` with class
/// `z^j`, completed to a tangent vector on torsion blocks away from that
/// block.
pub fn nu1(fp: &FixedPointData, j: usize) -> Result<NuElement> {
    let defect = fp.defect();
    let p = p0(defect)?;
    let d = defect.get(p, p) as usize;
    if j >= d {
        return Err(Error::Invalid(format!("class z^{j} is zero mod z^{d}")));
    }
    let l = fp.level(p);
    let mut seed = vec![q(0); fp.hom_dim()];
    seed[l.coord(p, p, j).expect("diagonal block")] = q(1);
    let frozen: Vec<usize> = (0..d).map(|k| l.coord(p, p, k).unwrap()).collect();
    complete(fp, seed, &frozen)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NReport {
    pub nu1_power: usize,
    pub expected_dim: usize,
    pub dim: usize,
    pub rank: usize,
    /// every generator is a genuine tangent vector
    pub tangent: bool,
    pub non_tangent: Vec<String>,
    pub injective: bool,
    pub pass: bool,
}

/// Span of `nu0` on the monomial basis of `N_0` together with `nu1(z^j)`,
/// and the rank of the differential on it.
pub fn verify_n(fp: &FixedPointData, map: &DpiMap, j: usize) -> Result<NReport> {
    let defect = fp.defect();
    let layout = n0_layout(defect);
    let mut elems = Vec::new();
    let mut names = Vec::new();
    for (idx, ((r, qq), len)) in layout.iter().enumerate() {
        for k in 0..*len {
            let mut f = vec![Poly::zero(); layout.len()];
            f[idx] = Poly::z_pow(k);
            elems.push(nu0(fp, &f)?);
            names.push(format!("nu0 f_{r}{qq}=z^{k}"));
        }
    }
    elems.push(nu1(fp, j)?);
    names.push(format!("nu1 z^{j}"));

    let vectors: Vec<Vec<Q>> = elems.iter().map(|e| e.vector.clone()).collect();
    let dim = Subspace::span(fp.hom_dim(), vectors.clone()).dim();
    let images: Vec<Vec<Q>> = vectors.iter().map(|v| map.apply(v)).collect();
    let rank = Subspace::span(map.layout.dim(), images).dim();
    let non_tangent: Vec<String> = elems.iter().zip(names).filter(|(e, _)| !e.is_tangent()).map(|(_, s)| s).collect();
    let expected_dim = n0_dim(defect) + 1;
    let injective = rank == dim;
    let tangent = non_tangent.is_empty();
    Ok(NReport {
        nu1_power: j,
        expected_dim,
        dim,
        rank,
        tangent,
        non_tangent,
        injective,
        pass: tangent && injective && dim == expected_dim,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyPropRecord {
    pub defect: String,
    pub dim_t: usize,
    pub kernel_dim: usize,
    pub bound: u32,
    pub margin: i64,
    pub pass: bool,
}

pub fn verify_key_prop(defect: &DefectMatrix, map: &DpiMap) -> Result<KeyPropRecord> {
    let bound = key_prop_bound(defect)?;
    let k = map.kernel_dim();
    Ok(KeyPropRecord {
        defect: defect.to_string(),
        dim_t: map.tangent.dim(),
        kernel_dim: k,
        bound,
        margin: bound as i64 - k as i64,
        pass: (k as u64) < bound as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionChainRecord {
    pub laumon_dim: usize,
    pub kernel_dim: usize,
    /// `laumon_dim - kernel_dim`, the rank of the differential
    pub lhs: usize,
    /// `flag_dim + 1 + piece_dim`
    pub rhs: usize,
    pub pass: bool,
}

/// `rank(d pi) > dim(Q_0 x C) + dim(piece)`: the image of the piece in the
/// fiber has too small a dimension to fill the conormal fiber.
pub fn verify_reduction_chain(defect: &DefectMatrix, map: &DpiMap) -> Result<ReductionChainRecord> {
    if defect.gamma().is_zero() {
        return Err(Error::ZeroGamma("the reduction chain applies to gamma > 0"));
    }
    let laumon = expected_tangent_dim(defect);
    let k = map.kernel_dim();
    let rhs = flag_dim(defect.n()) as usize + 1 + piece_dim(defect) as usize;
    Ok(ReductionChainRecord { laumon_dim: laumon, kernel_dim: k, lhs: laumon - k, rhs, pass: laumon - k > rhs })
}
