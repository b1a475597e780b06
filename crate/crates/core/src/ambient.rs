//! The ambient product of projective spaces at the maximally degenerate
//! point `phi`, the tangent space of the closed stratum through it, its
//! conormal fiber, and the fixed-point microlocal test.
//!
//! At `phi` the `p`-th line is `L_p = z^{c_p} O . v_{[1..p]}` inside
//! `Lambda^p V (x) O`. A tangent vector is a morphism from `L_p` to the
//! quotient, recorded by the image of the generator of `L_p`:
//!
//! * torsion coordinates: a class mod `z^{c_p}` on the label `[1..p]`;
//! * free coordinates: a polynomial of degree `<= c_p` on every other
//!   `p`-subset `S`, subsets in lexicographic order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{flag_dim, piece_dim, DefectMatrix, GammaVector};
use crate::error::{Error, Result};
use crate::fixed_point::{dpi, FixedPointData};
use crate::linalg::{dot, is_zero_vec, q, Subspace, Q};

/// All `p`-subsets of `1..=n`, sorted lexicographically.
pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, p, &mut Vec::new(), &mut out);
    out
}

/// Sorts a wedge label, returning the permutation sign.
pub fn sort_with_sign(mut s: Vec<usize>) -> (Vec<usize>, i64) {
    let mut sign = 1;
    for i in 0..s.len() {
        for j in 0..s.len() - 1 - i {
            if s[j] > s[j + 1] {
                s.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    (s, sign)
}

#[derive(Clone, Debug)]
struct PlueckerBlock {
    c: usize,
    offset: usize,
    /// every `p`-subset except `[1..p]`
    others: Vec<Vec<usize>>,
}

/// Coordinate system on the ambient tangent space at `phi`.
#[derive(Clone, Debug)]
pub struct AmbientLayout {
    gamma: GammaVector,
    blocks: Vec<PlueckerBlock>,
    dim: usize,
}

impl AmbientLayout {
    pub fn new(gamma: &GammaVector) -> Self {
        let n = gamma.n();
        let mut blocks = Vec::with_capacity(n - 1);
        let mut offset = 0;
        for p in 1..n {
            let c = gamma.c(p) as usize;
            let top: Vec<usize> = (1..=p).collect();
            let others: Vec<Vec<usize>> = subsets(n, p).into_iter().filter(|s| *s != top).collect();
            let size = c + others.len() * (c + 1);
            blocks.push(PlueckerBlock { c, offset, others });
            offset += size;
        }
        AmbientLayout { gamma: gamma.clone(), blocks, dim: offset }
    }

    pub fn gamma(&self) -> &GammaVector {
        &self.gamma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinate of `z^k` in the torsion part of component `p`.
    pub fn torsion_coord(&self, p: usize, k: usize) -> usize {
        let b = &self.blocks[p - 1];
        assert!(k < b.c, "torsion coordinate z^{k} out of range mod z^{}", b.c);
        b.offset + k
    }

    /// Coordinate of `z^k` on the sorted label `s != [1..p]` of component `p`.
    pub fn free_coord(&self, p: usize, s: &[usize], k: usize) -> usize {
        let b = &self.blocks[p - 1];
        assert!(k <= b.c, "free coordinate z^{k} exceeds degree {}", b.c);
        let idx = b
            .others
            .iter()
            .position(|t| t == s)
            .unwrap_or_else(|| panic!("label {s:?} is not a free label at p={p}"));
        b.offset + b.c + idx * (b.c + 1) + k
    }

    /// Human-readable name of a coordinate.
    pub fn describe(&self, coord: usize) -> String {
        for (i, b) in self.blocks.iter().enumerate() {
            let p = i + 1;
            let local = coord - b.offset;
            let size = b.c + b.others.len() * (b.c + 1);
            if coord >= b.offset && local < size {
                if local < b.c {
                    return format!("p={p} torsion z^{local}");
                }
                let r = local - b.c;
                return format!("p={p} free {:?} z^{}", b.others[r / (b.c + 1)], r % (b.c + 1));
            }
        }
        format!("coordinate {coord} out of range")
    }
}

/// Ambient tangent space with its explicit coordinate basis.
#[derive(Clone, Debug)]
pub struct AmbientTangent {
    pub layout: AmbientLayout,
}

impl AmbientTangent {
    pub fn dim(&self) -> usize {
        self.layout.dim
    }
}

pub fn ambient_tangent(gamma: &GammaVector) -> AmbientTangent {
    AmbientTangent { layout: AmbientLayout::new(gamma) }
}

/// Tangent space of the closed stratum `Q_0 x C` at `phi`: flag motions
/// under the lower-triangular elementary matrices, plus the motion of the
/// defect point.
pub fn stratum_tangent(gamma: &GammaVector) -> Result<Subspace> {
    if gamma.is_zero() {
        return Err(Error::ZeroGamma("the closed stratum needs a defect point"));
    }
    let layout = AmbientLayout::new(gamma);
    let n = gamma.n();
    let mut vectors = Vec::new();
    for (i, j) in sl_basis(n) {
        vectors.push(flag_motion(&layout, i, j));
    }
    // d/dx (z - x)^{c_p} at x = 0
    let mut defect = vec![q(0); layout.dim];
    for p in 1..n {
        let c = gamma.c(p) as usize;
        if c > 0 {
            defect[layout.torsion_coord(p, c - 1)] = q(-(c as i64));
        }
    }
    vectors.push(defect);
    let span = Subspace::span(layout.dim, vectors);
    let expected = flag_dim(n) as usize + 1;
    if span.dim() != expected {
        return Err(Error::Internal(format!("stratum tangent has dimension {} instead of {expected}", span.dim())));
    }
    Ok(span)
}

/// Elementary matrices `E_{ij}`, `i != j`, and `E_{ii} - E_{i+1,i+1}`.
/// Diagonal entries are encoded as `(i, i)`.
fn sl_basis(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j || i < n {
                out.push((i, j));
            }
        }
    }
    out
}

/// First-order motion of every wedge line under `X`, where `(i, j)` stands
/// for `E_{ij}` (or `E_{ii} - E_{i+1,i+1}` when `i == j`).
fn flag_motion(layout: &AmbientLayout, i: usize, j: usize) -> Vec<Q> {
    let n = layout.gamma.n();
    let mut v = vec![q(0); layout.dim];
    let terms: Vec<(usize, usize, i64)> = if i == j {
        vec![(i, i, 1), (i + 1, i + 1, -1)]
    } else {
        vec![(i, j, 1)]
    };
    for p in 1..n {
        let c = layout.gamma.c(p) as usize;
        for &(row, col, coef) in &terms {
            // X v_col = v_row; replace v_col in v_1 ^ ... ^ v_p
            if col > p {
                continue;
            }
            let mut label: Vec<usize> = (1..=p).collect();
            label[col - 1] = row;
            if row != col && row <= p {
                continue; // repeated factor
            }
            if row == col {
                // multiple of the line itself: zero in the quotient
                continue;
            }
            let (sorted, sign) = sort_with_sign(label);
            let idx = layout.free_coord(p, &sorted, c);
            v[idx] += q(sign * coef);
        }
    }
    v
}

/// Annihilator of the stratum tangent, in dual coordinates.
#[derive(Clone, Debug)]
pub struct ConormalFiber {
    pub space: Subspace,
}

impl ConormalFiber {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

pub fn conormal_fiber(gamma: &GammaVector) -> Result<ConormalFiber> {
    let stratum = stratum_tangent(gamma)?;
    let space = stratum.annihilator();
    let expected = AmbientLayout::new(gamma).dim() - flag_dim(gamma.n()) as usize - 1;
    if space.dim() != expected {
        return Err(Error::Internal(format!("conormal fiber has dimension {} instead of {expected}", space.dim())));
    }
    Ok(ConormalFiber { space })
}

pub const DEFAULT_WITNESS_DRAWS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MicrolocalRecord {
    /// the defect matrix of a fixed point, or a description of the point
    pub point: String,
    pub ambient_dim: usize,
    pub dpi_rank: usize,
    /// `dim Ker(d*pi)`, the annihilator of the image of the differential
    pub cokernel_dim: usize,
    pub conormal_dim: usize,
    pub intersection_dim: usize,
    /// `dim(K* n conormal) + piece_dim < dim conormal + 1`, when the piece
    /// of the point is known
    pub proper_with_piece: Option<bool>,
    /// conormal covector that does not kill the image of the differential,
    /// entries as `p/q`
    pub witness: Option<Vec<String>>,
    pub witness_draws: usize,
    pub pass: bool,
}

/// Checks that a generic conormal covector is not killed by the
/// codifferential at the fixed point of `defect`.
pub fn microlocal_check(defect: &DefectMatrix, seed: u64, max_draws: usize) -> Result<MicrolocalRecord> {
    let gamma = defect.gamma();
    if gamma.is_zero() {
        return Err(Error::ZeroGamma("microlocal check"));
    }
    let fp = FixedPointData::build(defect);
    let map = dpi(&fp)?;
    microlocal_from_image(&defect.to_string(), &gamma, &map.image(), Some(piece_dim(defect)), seed, max_draws)
}

/// The check itself, given the image of the differential at a point of the
/// simple fiber, in ambient coordinates.
pub fn microlocal_from_image(
    point: &str,
    gamma: &GammaVector,
    image: &Subspace,
    piece: Option<u32>,
    seed: u64,
    max_draws: usize,
) -> Result<MicrolocalRecord> {
    let conormal = conormal_fiber(gamma)?;
    let ambient = image.ambient();
    if ambient != conormal.space.ambient() {
        return Err(Error::Mismatch(format!("image lives in dimension {ambient}, conormal in {}", conormal.space.ambient())));
    }
    let kstar = image.annihilator();
    let meet = kstar.intersection(&conormal.space);
    let proper = meet.dim() < conormal.dim();

    let mut witness = None;
    let mut draws = 0;
    if proper {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while draws < max_draws {
            draws += 1;
            let xi = random_combination(&mut rng, conormal.space.basis(), ambient);
            let kills_image = image.basis().iter().all(|v| dot(&xi, v) == q(0));
            if !kills_image && !is_zero_vec(&xi) {
                witness = Some(xi.iter().map(|x| x.to_string()).collect());
                break;
            }
        }
    }
    let proper_with_piece = piece.map(|d| meet.dim() + (d as usize) < conormal.dim() + 1);
    Ok(MicrolocalRecord {
        point: point.to_string(),
        ambient_dim: ambient,
        dpi_rank: image.dim(),
        cokernel_dim: kstar.dim(),
        conormal_dim: conormal.dim(),
        intersection_dim: meet.dim(),
        pass: proper && witness.is_some() && proper_with_piece != Some(false),
        proper_with_piece,
        witness,
        witness_draws: draws,
    })
}

fn random_combination(rng: &mut ChaCha8Rng, basis: &[Vec<Q>], ambient: usize) -> Vec<Q> {
    let mut xi = vec![q(0); ambient];
    for b in basis {
        let c = Q::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into());
        for (x, y) in xi.iter_mut().zip(b) {
            if *y != q(0) {
                *x += &c * y;
            }
        }
    }
    xi
}
