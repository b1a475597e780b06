//! Morphisms between direct sums of monomial line bundles and torsion
//! modules supported at `0` on the projective line.
//!
//! Conventions: the affine coordinate `z` vanishes at `0`. `Line(a)` is the
//! subsheaf `z^a O` of `O`, with local generator `z^a`; `Torsion(e)` is
//! `O / z^e O`. A block morphism is recorded by a single polynomial payload
//! whose meaning depends on the endpoints:
//!
//! | source    | target     | payload                                   |
//! |-----------|------------|-------------------------------------------|
//! | `Line(a)` | `Line(b)`  | `u`, generator maps to `u` times generator, `deg u <= a - b` |
//! | `Line(a)` | `Torsion(e)` | class of the generator, `deg < e`       |
//! | `Torsion(e)` | `Torsion(e')` | image `b` of the class `1`, `deg b < e'`, `z^e b = 0 mod z^e'` |
//! | `Torsion(e)` | `Line(b)` | always zero                              |
//!
//! All payloads are canonical, so equality of morphisms is equality of
//! coefficient vectors.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Q;
use crate::poly::Poly;
use num_traits::Zero;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SummandKind {
    Line(u32),
    Torsion(u32),
}

/// Which basis vector of `V` (a color `q`) or of `Lambda^p V` (a sorted
/// subset) a summand sits on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Color(usize),
    Wedge(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SheafSummand {
    pub kind: SummandKind,
    pub label: Label,
}

impl SheafSummand {
    pub fn line(a: u32, q: usize) -> Self {
        SheafSummand { kind: SummandKind::Line(a), label: Label::Color(q) }
    }

    /// `Torsion(e)` on color `q`; `e` must be positive.
    pub fn torsion(e: u32, q: usize) -> Self {
        assert!(e >= 1, "torsion summand of length 0");
        SheafSummand { kind: SummandKind::Torsion(e), label: Label::Color(q) }
    }
}

impl fmt::Display for SheafSummand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match &self.label {
            Label::Color(q) => format!("v{q}"),
            Label::Wedge(s) => format!("v{:?}", s),
        };
        match self.kind {
            SummandKind::Line(a) => write!(f, "z^{a}O.{label}"),
            SummandKind::Torsion(e) => write!(f, "(O/z^{e}).{label}"),
        }
    }
}

/// Admissible payload monomials `z^k` for a block, as a range of `k`.
fn payload_range(src: SummandKind, tgt: SummandKind) -> std::ops::Range<usize> {
    use SummandKind::*;
    match (src, tgt) {
        (Line(a), Line(b)) => {
            if a >= b {
                0..(a - b + 1) as usize
            } else {
                0..0
            }
        }
        (Line(_), Torsion(e)) => 0..e as usize,
        (Torsion(e), Torsion(e2)) => (e2.saturating_sub(e) as usize)..e2 as usize,
        (Torsion(_), Line(_)) => 0..0,
    }
}

/// One block of a morphism of sums.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockHom {
    src: SummandKind,
    tgt: SummandKind,
    payload: Poly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Poly,
    TorsionClass,
    TorsionToTorsion,
    Zero,
}

impl BlockHom {
    /// Validates the payload against the endpoint constraints.
    pub fn new(src: SummandKind, tgt: SummandKind, payload: Poly) -> Result<Self> {
        let range = payload_range(src, tgt);
        let ok = match (payload.valuation(), payload.degree()) {
            (None, _) => true,
            (Some(v), Some(d)) => v >= range.start && d < range.end,
            _ => unreachable!(),
        };
        if !ok {
            return Err(Error::Invalid(format!(
                "payload {payload} violates the constraint for {src:?} -> {tgt:?}"
            )));
        }
        Ok(BlockHom { src, tgt, payload })
    }

    pub fn zero(src: SummandKind, tgt: SummandKind) -> Self {
        BlockHom { src, tgt, payload: Poly::zero() }
    }

    /// The identity of `Line(a)` (or of `Torsion(e)`).
    pub fn identity(k: SummandKind) -> Self {
        BlockHom { src: k, tgt: k, payload: Poly::one() }
    }

    pub fn src(&self) -> SummandKind {
        self.src
    }

    pub fn tgt(&self) -> SummandKind {
        self.tgt
    }

    pub fn payload(&self) -> &Poly {
        &self.payload
    }

    pub fn kind(&self) -> BlockKind {
        use SummandKind::*;
        match (self.src, self.tgt) {
            (Torsion(_), Line(_)) => BlockKind::Zero,
            _ if self.payload.is_zero() => BlockKind::Zero,
            (Line(_), Line(_)) => BlockKind::Poly,
            (Line(_), Torsion(_)) => BlockKind::TorsionClass,
            (Torsion(_), Torsion(_)) => BlockKind::TorsionToTorsion,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.payload.is_zero()
    }

    /// Coordinates in the monomial basis returned by [`hom_space`].
    pub fn coords(&self) -> Vec<Q> {
        let r = payload_range(self.src, self.tgt);
        r.map(|k| self.payload.coeff(k)).collect()
    }

    pub fn from_coords(src: SummandKind, tgt: SummandKind, coords: &[Q]) -> Self {
        let r = payload_range(src, tgt);
        assert_eq!(coords.len(), r.len(), "coordinate vector has wrong length");
        let mut dense = vec![Q::zero(); r.end];
        for (k, c) in r.zip(coords) {
            dense[k] = c.clone();
        }
        BlockHom { src, tgt, payload: Poly::from_coeffs(dense) }
    }

    pub fn add(&self, other: &BlockHom) -> Result<BlockHom> {
        if self.src != other.src || self.tgt != other.tgt {
            return Err(Error::Mismatch("adding blocks with different endpoints".into()));
        }
        Ok(BlockHom { src: self.src, tgt: self.tgt, payload: &self.payload + &other.payload })
    }

    pub fn scale(&self, c: &Q) -> BlockHom {
        BlockHom { src: self.src, tgt: self.tgt, payload: self.payload.scale(c) }
    }
}

/// Monomial basis of `Hom(src, tgt)`.
pub fn hom_space(src: SummandKind, tgt: SummandKind) -> Vec<BlockHom> {
    payload_range(src, tgt)
        .map(|k| BlockHom { src, tgt, payload: Poly::z_pow(k) })
        .collect()
}

pub fn hom_dim(src: SummandKind, tgt: SummandKind) -> usize {
    payload_range(src, tgt).len()
}

/// `g . f`
pub fn compose(g: &BlockHom, f: &BlockHom) -> Result<BlockHom> {
    use SummandKind::*;
    if f.tgt != g.src {
        return Err(Error::Mismatch(format!("cannot compose {:?} -> {:?} after {:?} -> {:?}", g.src, g.tgt, f.src, f.tgt)));
    }
    let (src, tgt) = (f.src, g.tgt);
    let payload = match (f.src, f.tgt, g.tgt) {
        // anything factoring through a map out of torsion into a line is 0
        (Torsion(_), Line(_), _) | (_, Torsion(_), Line(_)) => Poly::zero(),
        (Line(_), Line(_), Line(_)) => &g.payload * &f.payload,
        (_, _, Torsion(e)) => (&g.payload * &f.payload).truncate(e as usize),
    };
    BlockHom::new(src, tgt, payload)
        .map_err(|e| Error::Internal(format!("composition left its constraint set: {e}")))
}

/// A morphism `source -> target` of direct sums, stored blockwise.
/// Missing blocks are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumHom {
    source: Vec<SheafSummand>,
    target: Vec<SheafSummand>,
    blocks: BTreeMap<(usize, usize), BlockHom>,
}

impl SumHom {
    pub fn zero(source: Vec<SheafSummand>, target: Vec<SheafSummand>) -> Self {
        SumHom { source, target, blocks: BTreeMap::new() }
    }

    /// Validates every block against its endpoints.
    pub fn assemble(
        source: Vec<SheafSummand>,
        target: Vec<SheafSummand>,
        blocks: impl IntoIterator<Item = ((usize, usize), BlockHom)>,
    ) -> Result<Self> {
        let mut out = SumHom::zero(source, target);
        for ((i, j), b) in blocks {
            out.set_block(i, j, b)?;
        }
        Ok(out)
    }

    pub fn set_block(&mut self, i: usize, j: usize, b: BlockHom) -> Result<()> {
        let (Some(s), Some(t)) = (self.source.get(i), self.target.get(j)) else {
            return Err(Error::Invalid(format!("block ({i},{j}) out of range")));
        };
        if s.kind != b.src || t.kind != b.tgt {
            return Err(Error::Mismatch(format!("block ({i},{j}) has endpoints {:?} -> {:?}, expected {} -> {}", b.src, b.tgt, s, t)));
        }
        if b.is_zero() {
            self.blocks.remove(&(i, j));
        } else {
            self.blocks.insert((i, j), b);
        }
        Ok(())
    }

    pub fn source(&self) -> &[SheafSummand] {
        &self.source
    }

    pub fn target(&self) -> &[SheafSummand] {
        &self.target
    }

    pub fn block(&self, i: usize, j: usize) -> BlockHom {
        self.blocks
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| BlockHom::zero(self.source[i].kind, self.target[j].kind))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `self . f`
    pub fn compose(&self, f: &SumHom) -> Result<SumHom> {
        if f.target != self.source {
            return Err(Error::Mismatch("sum morphisms are not composable".into()));
        }
        let mut out = SumHom::zero(f.source.clone(), self.target.clone());
        for (&(i, k), fb) in &f.blocks {
            for (&(k2, j), gb) in self.blocks.range((k, 0)..(k + 1, 0)) {
                debug_assert_eq!(k, k2);
                let c = compose(gb, fb)?;
                let sum = out.block(i, j).add(&c)?;
                out.set_block(i, j, sum)?;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SumHom) -> Result<SumHom> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Mismatch("subtracting morphisms between different sums".into()));
        }
        let mut out = self.clone();
        for (&(i, j), b) in &other.blocks {
            let d = out.block(i, j).add(&b.scale(&-Q::from_integer(1.into())))?;
            out.set_block(i, j, d)?;
        }
        Ok(out)
    }

    /// Flattened coordinates, block `(i, j)` in row-major order of `(i, j)`.
    pub fn coords(&self) -> Vec<Q> {
        let mut v = Vec::with_capacity(full_hom_dim(&self.source, &self.target));
        for i in 0..self.source.len() {
            for j in 0..self.target.len() {
                v.extend(self.block(i, j).coords());
            }
        }
        v
    }

    pub fn from_coords(source: Vec<SheafSummand>, target: Vec<SheafSummand>, coords: &[Q]) -> Result<Self> {
        let dim = full_hom_dim(&source, &target);
        if coords.len() != dim {
            return Err(Error::Invalid(format!("expected {dim} coordinates, got {}", coords.len())));
        }
        let mut out = SumHom::zero(source, target);
        let mut off = 0;
        for i in 0..out.source.len() {
            for j in 0..out.target.len() {
                let (s, t) = (out.source[i].kind, out.target[j].kind);
                let d = hom_dim(s, t);
                let b = BlockHom::from_coords(s, t, &coords[off..off + d]);
                off += d;
                out.set_block(i, j, b)?;
            }
        }
        Ok(out)
    }
}

pub fn full_hom_dim(source: &[SheafSummand], target: &[SheafSummand]) -> usize {
    source
        .iter()
        .map(|s| target.iter().map(|t| hom_dim(s.kind, t.kind)).sum::<usize>())
        .sum()
}
