//! Bounded-below chain complexes of free kG-modules and maps between them.
//!
//! Every map carries a Hom-degree `d` (source degree i goes to target degree
//! i + d) and the Hom differential is `D(f) = ∂f − (−1)^d f∂`. Chain maps are
//! the maps with `D(f) = 0`; `f ≃ g` means `f − g = D(H)` for some H of
//! degree d + 1. For d = 0 this is the familiar `∂H + H∂ = f − g`.
//!
//! Complexes are stored through a top degree `hi`; maps record the highest
//! source degree through which they are valid.

use std::sync::Arc;

use crate::error::{underflow, Error, Result};
use crate::field::{Field, Scalar};
use crate::freemap::{FreeMap, Target};
use crate::group::{Group, RepModule};
use crate::matrix::{KMatrix, Subspace};

/// Free ranks of a complex over a window of degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub lo: i64,
    pub ranks: Vec<usize>,
}

impl Shape {
    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }
    pub fn rank(&self, i: i64) -> usize {
        if i < self.lo || i > self.hi() {
            0
        } else {
            self.ranks[(i - self.lo) as usize]
        }
    }
    pub fn contains(&self, i: i64) -> bool {
        i >= self.lo && i <= self.hi()
    }
}

#[derive(Clone, Debug)]
pub struct ChainComplex {
    group: Group,
    field: Field,
    shape: Shape,
    diffs: Vec<FreeMap>,
}

impl ChainComplex {
    /// `diffs[k]` is ∂ at degree lo + k. Checks ∂² = 0.
    pub fn new(group: &Group, field: &Field, lo: i64, diffs: Vec<FreeMap>) -> Result<ChainComplex> {
        if diffs.is_empty() {
            return Err(Error::PreconditionViolated("complex needs at least one degree".into()));
        }
        let ranks: Vec<usize> = diffs.iter().map(|d| d.src_rank()).collect();
        if diffs[0].dst_rank() != 0 {
            return Err(Error::DimensionMismatch("bottom differential must map to zero".into()));
        }
        for k in 1..diffs.len() {
            if diffs[k].dst_rank() != ranks[k - 1] {
                return Err(Error::DimensionMismatch(format!("differential at degree {}", lo + k as i64)));
            }
            if !diffs[k - 1].compose(&diffs[k])?.is_zero() {
                return Err(Error::PreconditionViolated(format!(
                    "∂∂ ≠ 0 at degree {}",
                    lo + k as i64
                )));
            }
        }
        Ok(ChainComplex { group: group.clone(), field: field.clone(), shape: Shape { lo, ranks }, diffs })
    }

    /// A complex with the given free ranks and zero differentials.
    pub fn zero_diff(group: &Group, field: &Field, lo: i64, ranks: &[usize]) -> ChainComplex {
        let mut diffs = Vec::new();
        for (k, &r) in ranks.iter().enumerate() {
            let below = if k == 0 { 0 } else { ranks[k - 1] };
            diffs.push(FreeMap::zero(group, field, r, Target::Free(below)));
        }
        ChainComplex { group: group.clone(), field: field.clone(), shape: Shape { lo, ranks: ranks.to_vec() }, diffs }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn shape(&self) -> &Shape {
        &self.shape
    }
    pub fn lo(&self) -> i64 {
        self.shape.lo
    }
    pub fn hi(&self) -> i64 {
        self.shape.hi()
    }
    pub fn rank(&self, i: i64) -> usize {
        self.shape.rank(i)
    }
    /// Dimension over k of the degree-i term.
    pub fn dim(&self, i: i64) -> usize {
        self.rank(i) * self.group.order()
    }

    /// ∂ at degree i: C_i → C_{i−1}.
    pub fn diff(&self, i: i64) -> Result<FreeMap> {
        if i > self.hi() {
            return Err(underflow(i, self.hi()));
        }
        if i < self.lo() {
            return Ok(FreeMap::zero(&self.group, &self.field, 0, Target::Free(self.rank(i - 1))));
        }
        Ok(self.diffs[(i - self.lo()) as usize].clone())
    }

    pub fn diff_ref(&self, i: i64) -> Option<&FreeMap> {
        if i < self.lo() || i > self.hi() {
            None
        } else {
            Some(&self.diffs[(i - self.lo()) as usize])
        }
    }

    /// Apply ∂ to a k-vector in degree i.
    pub fn apply_diff(&self, i: i64, v: &[Scalar]) -> Result<Vec<Scalar>> {
        match self.diff_ref(i) {
            Some(d) => Ok(d.apply(v)),
            None if i > self.hi() => Err(underflow(i, self.hi())),
            None => Ok(vec![Scalar::ZERO; self.dim(i - 1)]),
        }
    }

    /// Keep degrees ≤ hi.
    pub fn restrict(&self, hi: i64) -> ChainComplex {
        let keep = ((hi - self.lo() + 1).max(1) as usize).min(self.diffs.len());
        ChainComplex {
            group: self.group.clone(),
            field: self.field.clone(),
            shape: Shape { lo: self.lo(), ranks: self.shape.ranks[..keep].to_vec() },
            diffs: self.diffs[..keep].to_vec(),
        }
    }

    /// (ΣⁿC)_i = C_{i−n} with differential (−1)ⁿ∂.
    pub fn shift(&self, n: i64) -> ChainComplex {
        let s = self.field.sign(n);
        ChainComplex {
            group: self.group.clone(),
            field: self.field.clone(),
            shape: Shape { lo: self.lo() + n, ranks: self.shape.ranks.clone() },
            diffs: self.diffs.iter().map(|d| d.scale(s)).collect(),
        }
    }

    /// Γ_k C: degrees below k replaced by zero.
    pub fn truncate(&self, k: i64) -> ChainComplex {
        if k <= self.lo() {
            return self.clone();
        }
        let (g, f) = (&self.group, &self.field);
        if k > self.hi() {
            return ChainComplex::zero_diff(g, f, self.lo(), &vec![0; self.shape.ranks.len()]);
        }
        let mut diffs = Vec::new();
        for i in self.lo()..=self.hi() {
            let d = if i < k {
                FreeMap::zero(g, f, 0, Target::Free(0))
            } else if i == k {
                FreeMap::zero(g, f, self.rank(i), Target::Free(0))
            } else {
                self.diffs[(i - self.lo()) as usize].clone()
            };
            diffs.push(d);
        }
        let ranks = diffs.iter().map(|d| d.src_rank()).collect();
        ChainComplex { group: g.clone(), field: f.clone(), shape: Shape { lo: self.lo(), ranks }, diffs }
    }

    /// The k-dimension of H_i, the homology as a module, and the cycle
    /// representatives (rows, in C_i coordinates) of its basis.
    pub fn homology(&self, i: i64) -> Result<Homology> {
        if i + 1 > self.hi() {
            return Err(underflow(i + 1, self.hi()));
        }
        let n = self.dim(i);
        let cycles = self.apply_diff_matrix(i)?.kernel_basis();
        let z = Subspace::from_vectors(&self.field, n, &cycles.to_rows());
        let bounds = self.apply_diff_matrix(i + 1)?.transpose();
        let b = Subspace::from_vectors(&self.field, n, &bounds.to_rows());
        // H = Z/B as a module: quotient of the module Z by B expressed in Z-coordinates.
        let free = RepModule::free(&self.group, &self.field, self.rank(i));
        let zmod = free.restrict(&z)?;
        let b_in_z: Vec<Vec<Scalar>> =
            b.basis().to_rows().iter().map(|v| z.coordinates(v).expect("boundary is a cycle")).collect();
        let bz = Subspace::from_vectors(&self.field, z.dim(), &b_in_z);
        let (module, keep) = zmod.quotient(&bz)?;
        let reps = keep.iter().map(|&c| z.basis().row(c).to_vec()).collect();
        Ok(Homology { dim: module.dim(), module, representatives: reps })
    }

    fn apply_diff_matrix(&self, i: i64) -> Result<KMatrix> {
        Ok(self.diff(i)?.to_k())
    }

    /// Upper triangular block complex. `parts[r]` are the diagonal blocks, and
    /// each `(r, c, m)` with r < c puts the degree −1 map `m: parts[c] → parts[r]`
    /// in block (r, c) of the differential. Checks ∂² = 0.
    pub fn triangular(parts: &[&ChainComplex], off: &[(usize, usize, &ChainMap)]) -> Result<BlockComplex> {
        let g = parts[0].group.clone();
        let f = parts[0].field.clone();
        let lo = parts.iter().map(|p| p.lo()).min().unwrap();
        let mut hi = parts.iter().map(|p| p.hi()).min().unwrap();
        for (r, c, m) in off {
            if m.degree() != -1 || r >= c {
                return Err(Error::PreconditionViolated("off-diagonal blocks must be degree −1 maps above the diagonal".into()));
            }
            hi = hi.min(m.hi());
        }
        let mut diffs = Vec::new();
        for i in lo..=hi {
            let src: Vec<usize> = parts.iter().map(|p| p.rank(i)).collect();
            let dst: Vec<usize> = parts.iter().map(|p| p.rank(i - 1)).collect();
            let diag: Vec<FreeMap> = parts.iter().map(|p| p.diff(i)).collect::<Result<_>>()?;
            let offm: Vec<FreeMap> = off.iter().map(|(_, _, m)| m.comp(i)).collect::<Result<_>>()?;
            let mut blocks: Vec<Vec<Option<&FreeMap>>> = vec![vec![None; parts.len()]; parts.len()];
            for (r, d) in diag.iter().enumerate() {
                blocks[r][r] = Some(d);
            }
            for ((r, c, _), m) in off.iter().zip(&offm) {
                blocks[*r][*c] = Some(m);
            }
            diffs.push(FreeMap::from_blocks(&g, &f, &src, &dst, &blocks));
        }
        let complex = ChainComplex::new(&g, &f, lo, diffs)?;
        let parts = parts.iter().map(|p| p.shape.clone()).collect();
        Ok(BlockComplex { complex: Arc::new(complex), parts })
    }

    /// JSON dump: ranks and differential entries, for golden comparisons.
    pub fn to_json(&self) -> serde_json::Value {
        let diffs: Vec<serde_json::Value> = self
            .diffs
            .iter()
            .map(|d| serde_json::json!(d.columns().iter().map(|c| c.iter().map(|s| s.0).collect::<Vec<_>>()).collect::<Vec<_>>()))
            .collect();
        serde_json::json!({ "lo": self.lo(), "ranks": self.shape.ranks, "diffs": diffs })
    }
}

#[derive(Clone, Debug)]
pub struct Homology {
    pub dim: usize,
    pub module: RepModule,
    pub representatives: Vec<Vec<Scalar>>,
}

/// A complex built from blocks, remembering the shapes of its parts.
#[derive(Clone, Debug)]
pub struct BlockComplex {
    pub complex: Arc<ChainComplex>,
    pub parts: Vec<Shape>,
}

impl BlockComplex {
    pub fn part_ranks(&self, i: i64) -> Vec<usize> {
        self.parts.iter().map(|p| p.rank(i)).collect()
    }

    /// Generator offset of part `p` in degree i.
    pub fn offset(&self, p: usize, i: i64) -> usize {
        self.parts[..p].iter().map(|s| s.rank(i)).sum()
    }

    /// Embed a k-vector of part `p` into the total complex.
    pub fn embed(&self, p: usize, i: i64, v: &[Scalar]) -> Vec<Scalar> {
        let n = self.complex.group().order();
        let mut out = vec![Scalar::ZERO; self.complex.dim(i)];
        let o = self.offset(p, i) * n;
        out[o..o + v.len()].copy_from_slice(v);
        out
    }

    /// The part-`p` component of a k-vector of the total complex.
    pub fn project(&self, p: usize, i: i64, v: &[Scalar]) -> Vec<Scalar> {
        let n = self.complex.group().order();
        let o = self.offset(p, i) * n;
        v[o..o + self.parts[p].rank(i) * n].to_vec()
    }
}

/// A map of complexes of fixed Hom-degree, valid for source degrees lo..=hi.
#[derive(Clone, Debug)]
pub struct ChainMap {
    degree: i64,
    src: Shape,
    tgt: Shape,
    comps: Vec<FreeMap>,
    group: Group,
    field: Field,
}

impl ChainMap {
    /// `comps[k]` is the component at source degree src.lo + k.
    pub fn new(src: &ChainComplex, tgt: &ChainComplex, degree: i64, comps: Vec<FreeMap>) -> Result<ChainMap> {
        for (k, c) in comps.iter().enumerate() {
            let i = src.lo() + k as i64;
            if c.src_rank() != src.rank(i) || c.dst_rank() != tgt.rank(i + degree) {
                return Err(Error::DimensionMismatch(format!("map component at source degree {i}")));
            }
            if !tgt.shape.contains(i + degree) && c.dst_rank() == 0 && i + degree > tgt.hi() {
                return Err(underflow(i + degree, tgt.hi()));
            }
        }
        Ok(ChainMap {
            degree,
            src: src.shape.clone(),
            tgt: tgt.shape.clone(),
            comps,
            group: src.group.clone(),
            field: src.field.clone(),
        })
    }

    /// Build component by component from a closure over source degrees lo..=hi.
    pub fn build(
        src: &ChainComplex,
        tgt: &ChainComplex,
        degree: i64,
        hi: i64,
        mut f: impl FnMut(i64) -> Result<FreeMap>,
    ) -> Result<ChainMap> {
        let comps = (src.lo()..=hi).map(&mut f).collect::<Result<Vec<_>>>()?;
        ChainMap::new(src, tgt, degree, comps)
    }

    pub fn zero(src: &ChainComplex, tgt: &ChainComplex, degree: i64, hi: i64) -> ChainMap {
        let (g, f) = (src.group(), src.field());
        let comps = (src.lo()..=hi)
            .map(|i| FreeMap::zero(g, f, src.rank(i), Target::Free(tgt.rank(i + degree))))
            .collect();
        ChainMap { degree, src: src.shape.clone(), tgt: tgt.shape.clone(), comps, group: g.clone(), field: f.clone() }
    }

    pub fn identity(c: &ChainComplex) -> ChainMap {
        let comps = (c.lo()..=c.hi()).map(|i| FreeMap::identity(c.group(), c.field(), c.rank(i))).collect();
        ChainMap { degree: 0, src: c.shape.clone(), tgt: c.shape.clone(), comps, group: c.group.clone(), field: c.field.clone() }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }
    pub fn lo(&self) -> i64 {
        self.src.lo
    }
    pub fn hi(&self) -> i64 {
        self.src.lo + self.comps.len() as i64 - 1
    }
    pub fn src_shape(&self) -> &Shape {
        &self.src
    }
    pub fn tgt_shape(&self) -> &Shape {
        &self.tgt
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Component at source degree i.
    pub fn comp(&self, i: i64) -> Result<FreeMap> {
        if i > self.hi() {
            return Err(underflow(i, self.hi()));
        }
        if i < self.lo() {
            return Ok(FreeMap::zero(&self.group, &self.field, 0, Target::Free(self.tgt.rank(i + self.degree))));
        }
        Ok(self.comps[(i - self.lo()) as usize].clone())
    }

    pub fn comp_ref(&self, i: i64) -> Option<&FreeMap> {
        if i < self.lo() || i > self.hi() {
            None
        } else {
            Some(&self.comps[(i - self.lo()) as usize])
        }
    }

    pub fn apply(&self, i: i64, v: &[Scalar]) -> Result<Vec<Scalar>> {
        match self.comp_ref(i) {
            Some(c) => Ok(c.apply(v)),
            None if i > self.hi() => Err(underflow(i, self.hi())),
            None => Ok(vec![Scalar::ZERO; self.tgt.rank(i + self.degree) * self.group.order()]),
        }
    }

    pub fn restrict(&self, hi: i64) -> ChainMap {
        let keep = ((hi - self.lo() + 1).max(0) as usize).min(self.comps.len());
        let mut m = self.clone();
        m.comps.truncate(keep);
        m
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &ChainMap) -> Result<ChainMap> {
        if other.tgt != self.src && other.tgt.lo != self.src.lo {
            return Err(Error::Mismatch);
        }
        let hi = other.hi().min(self.hi() - other.degree);
        let mut comps = Vec::new();
        for i in other.lo()..=hi {
            let inner = other.comp(i)?;
            let outer = self.comp(i + other.degree)?;
            comps.push(outer.compose(&inner)?);
        }
        Ok(ChainMap {
            degree: self.degree + other.degree,
            src: other.src.clone(),
            tgt: self.tgt.clone(),
            comps,
            group: self.group.clone(),
            field: self.field.clone(),
        })
    }

    /// self + c·other on the common window.
    pub fn lin(&self, c: Scalar, other: &ChainMap) -> Result<ChainMap> {
        if self.degree != other.degree || self.src.lo != other.src.lo {
            return Err(Error::Mismatch);
        }
        let hi = self.hi().min(other.hi());
        let comps = (self.lo()..=hi)
            .map(|i| self.comps[(i - self.lo()) as usize].lin(c, &other.comps[(i - self.lo()) as usize]))
            .collect::<Result<_>>()?;
        Ok(ChainMap { comps, ..self.clone() })
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        self.lin(Scalar::ONE, other)
    }

    pub fn sub(&self, other: &ChainMap) -> Result<ChainMap> {
        self.lin(self.field.neg(Scalar::ONE), other)
    }

    pub fn scale(&self, c: Scalar) -> ChainMap {
        ChainMap { comps: self.comps.iter().map(|m| m.scale(c)).collect(), ..self.clone() }
    }

    /// The same components viewed as a map between other complexes with the
    /// same ranks (for example a shift), with a new degree.
    pub fn reinterpret(&self, src: &ChainComplex, tgt: &ChainComplex, degree: i64) -> Result<ChainMap> {
        let shift = src.lo() - self.lo();
        let mut comps = Vec::new();
        for i in src.lo()..=(self.hi() + shift) {
            let c = self.comp(i - shift)?;
            if c.src_rank() != src.rank(i) || c.dst_rank() != tgt.rank(i + degree) {
                return Err(Error::DimensionMismatch("reinterpret: ranks differ".into()));
            }
            comps.push(c);
        }
        ChainMap::new(src, tgt, degree, comps)
    }

    /// D(f) = ∂f − (−1)^d f∂ at every source degree of the window.
    pub fn defect(&self, src: &ChainComplex, tgt: &ChainComplex) -> Result<Vec<FreeMap>> {
        let s = self.field.sign(self.degree);
        let mut out = Vec::new();
        for i in self.lo()..=self.hi() {
            let left = tgt.diff(i + self.degree)?.compose(&self.comp(i)?)?;
            let right = self.comp(i - 1)?.compose(&src.diff(i)?)?;
            out.push(left.lin(self.field.neg(s), &right)?);
        }
        Ok(out)
    }

    pub fn is_chain_map(&self, src: &ChainComplex, tgt: &ChainComplex) -> Result<bool> {
        Ok(self.defect(src, tgt)?.iter().all(|m| m.is_zero()))
    }

    /// Block map between block complexes: entry (r, c, m) sends part c of the
    /// source to part r of the target.
    pub fn from_blocks(
        src: &BlockComplex,
        tgt: &BlockComplex,
        degree: i64,
        entries: &[(usize, usize, &ChainMap)],
    ) -> Result<ChainMap> {
        let mut hi = src.complex.hi().min(tgt.complex.hi() - degree);
        for (_, _, m) in entries {
            if m.degree != degree {
                return Err(Error::Mismatch);
            }
            hi = hi.min(m.hi());
        }
        let (g, f) = (src.complex.group(), src.complex.field());
        let mut comps = Vec::new();
        for i in src.complex.lo()..=hi {
            let sr = src.part_ranks(i);
            let tr = tgt.part_ranks(i + degree);
            let maps: Vec<FreeMap> = entries.iter().map(|(_, _, m)| m.comp(i)).collect::<Result<_>>()?;
            let mut blocks: Vec<Vec<Option<&FreeMap>>> = vec![vec![None; sr.len()]; tr.len()];
            for ((r, c, _), m) in entries.iter().zip(&maps) {
                blocks[*r][*c] = Some(m);
            }
            comps.push(FreeMap::from_blocks(g, f, &sr, &tr, &blocks));
        }
        ChainMap::new(&src.complex, &tgt.complex, degree, comps)
    }

    /// The block (r, c) of a map between block complexes.
    pub fn block(&self, src: &BlockComplex, tgt: &BlockComplex, r: usize, c: usize) -> Result<ChainMap> {
        let sub_src = ChainComplex::zero_diff(&self.group, &self.field, src.parts[c].lo, &src.parts[c].ranks);
        let sub_tgt = ChainComplex::zero_diff(&self.group, &self.field, tgt.parts[r].lo, &tgt.parts[r].ranks);
        let mut comps = Vec::new();
        for i in sub_src.lo()..=self.hi().min(sub_src.hi()) {
            let m = self.comp(i)?;
            let so = src.offset(c, i);
            let to = tgt.offset(r, i + self.degree);
            comps.push(
                m.select_src(so..so + src.parts[c].rank(i))
                    .select_dst(to..to + tgt.parts[r].rank(i + self.degree)),
            );
        }
        ChainMap::new(&sub_src, &sub_tgt, self.degree, comps)
    }
}

/// Find H of degree d + 1 with D(H) = f − g at source degrees ≤ `through`,
/// by one linear system over k in the images of all generators.
pub fn find_homotopy(
    f: &ChainMap,
    g: &ChainMap,
    src: &ChainComplex,
    tgt: &ChainComplex,
    through: i64,
) -> Result<Option<ChainMap>> {
    if f.degree() != g.degree() {
        return Err(Error::Mismatch);
    }
    let rhs = f.sub(g)?;
    solve_defect(&rhs, src, tgt, through)
}

/// Find X of degree d + 1 with D(X) = φ at source degrees ≤ `through`.
pub fn solve_defect(phi: &ChainMap, src: &ChainComplex, tgt: &ChainComplex, through: i64) -> Result<Option<ChainMap>> {
    let d = phi.degree() + 1;
    if through > phi.hi() {
        return Err(underflow(through, phi.hi()));
    }
    if through + d > tgt.hi() {
        return Err(underflow(through + d, tgt.hi()));
    }
    let field = src.field().clone();
    let group = src.group().clone();
    let n = group.order();
    let lo = src.lo();
    let degs: Vec<i64> = (lo..=through).collect();
    // Unknown block offsets.
    let mut col_off = Vec::new();
    let mut ncols = 0;
    for &i in &degs {
        col_off.push(ncols);
        ncols += src.rank(i) * tgt.dim(i + d);
    }
    let mut row_off = Vec::new();
    let mut nrows = 0;
    for &i in &degs {
        row_off.push(nrows);
        nrows += src.rank(i) * tgt.dim(i + d - 1);
    }
    let mut a = KMatrix::zeros(&field, nrows, ncols);
    let mut b = vec![Scalar::ZERO; nrows];
    let sgn = field.neg(field.sign(d));
    for (k, &i) in degs.iter().enumerate() {
        let ti = tgt.dim(i + d);
        let to = tgt.dim(i + d - 1);
        // ∂_T H_i(e)
        let dt = tgt.diff(i + d)?.to_k();
        for e in 0..src.rank(i) {
            for r in 0..to {
                for c in 0..ti {
                    let x = dt.get(r, c);
                    if !x.is_zero() {
                        a.set(row_off[k] + e * to + r, col_off[k] + e * ti + c, x);
                    }
                }
            }
            let rhs = phi.comp(i)?;
            for (r, &x) in rhs.column(e).iter().enumerate() {
                b[row_off[k] + e * to + r] = x;
            }
        }
        // −(−1)^d H_{i−1}(∂e)
        if k > 0 {
            let ds = src.diff(i)?;
            let tprev = tgt.dim(i - 1 + d);
            debug_assert_eq!(tprev, to);
            for e in 0..src.rank(i) {
                let col = ds.column(e);
                for (idx, &c) in col.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let (a_gen, h) = (idx / n, idx % n);
                    let coeff = field.mul(sgn, c);
                    // h · (unit vector u) for every coordinate u of H_{i−1}(e_a).
                    for u in 0..tprev {
                        let (blk, x) = (u / n, u % n);
                        let r = blk * n + group.mul(h, x);
                        let row = row_off[k] + e * to + r;
                        let colx = col_off[k - 1] + a_gen * tprev + u;
                        a.set(row, colx, field.add(a.get(row, colx), coeff));
                    }
                }
            }
        }
    }
    let Some(x) = a.solve(&b)? else {
        return Ok(None);
    };
    let mut comps = Vec::new();
    for (k, &i) in degs.iter().enumerate() {
        let ti = tgt.dim(i + d);
        let cols = (0..src.rank(i)).map(|e| x[col_off[k] + e * ti..col_off[k] + (e + 1) * ti].to_vec()).collect();
        comps.push(FreeMap::from_columns(&group, &field, Target::Free(tgt.rank(i + d)), cols));
    }
    let h = ChainMap::new(src, tgt, d, comps)?;
    let check = h.defect(src, tgt)?;
    for (k, m) in check.iter().enumerate() {
        if *m != phi.comp(lo + k as i64)? {
            return Err(Error::HomotopySearchFailed("solver output fails the defect equation".into()));
        }
    }
    Ok(Some(h))
}

/// The total complex B of an extension with class α: C → ΣA (a degree −1 map
/// C → A). Blocks are ordered (A, C).
pub fn extension_total(a: &ChainComplex, c: &ChainComplex, alpha: &ChainMap) -> Result<BlockComplex> {
    if !alpha.is_chain_map(c, a)? {
        return Err(Error::NotAChainMap("extension class".into()));
    }
    ChainComplex::triangular(&[a, c], &[(0, 1, alpha)])
}

/// Result of rotating an extension: A′ with blocks (ΣC-shifted, A, C), the
/// inclusion j, the projection q, and H with ∂H + H∂ = id − jq.
pub struct Rotation {
    pub complex: BlockComplex,
    pub j: ChainMap,
    pub q: ChainMap,
    pub h: ChainMap,
}

/// A′_n = C_{n+1} ⊕ A_n ⊕ C_n with ∂ = [[−∂, 0, id],[0, ∂, α],[0, 0, ∂]].
pub fn extension_rotate(a: &ChainComplex, c: &ChainComplex, alpha: &ChainMap) -> Result<Rotation> {
    if !alpha.is_chain_map(c, a)? {
        return Err(Error::NotAChainMap("extension class".into()));
    }
    let (g, f) = (a.group().clone(), a.field().clone());
    let c1 = c.shift(-1);
    let c1_hi = c1.hi();
    let hi = a.hi().min(c.hi()).min(alpha.hi()).min(c1_hi);
    let lo = a.lo().min(c1.lo());
    let part_shapes = [c1.shape().clone(), a.shape().clone(), c.shape().clone()];
    let mut diffs = Vec::new();
    for i in lo..=hi {
        let src: Vec<usize> = part_shapes.iter().map(|s| s.rank(i)).collect();
        let dst: Vec<usize> = part_shapes.iter().map(|s| s.rank(i - 1)).collect();
        let d0 = c1.diff(i)?; // already −∂ since Σ^{−1} flips the sign
        let d1 = a.diff(i)?;
        let d2 = c.diff(i)?;
        let al = alpha.comp(i)?;
        let id = FreeMap::identity(&g, &f, c.rank(i));
        let mut blocks: Vec<Vec<Option<&FreeMap>>> = vec![vec![None; 3]; 3];
        blocks[0][0] = Some(&d0);
        blocks[0][2] = Some(&id);
        blocks[1][1] = Some(&d1);
        blocks[1][2] = Some(&al);
        blocks[2][2] = Some(&d2);
        diffs.push(FreeMap::from_blocks(&g, &f, &src, &dst, &blocks));
    }
    let complex = BlockComplex { complex: Arc::new(ChainComplex::new(&g, &f, lo, diffs)?), parts: part_shapes.to_vec() };
    let a_block = BlockComplex { complex: Arc::new(a.clone()), parts: vec![a.shape().clone()] };
    let neg = f.neg(Scalar::ONE);
    let id_a = ChainMap::identity(a);
    let j = ChainMap::from_blocks(&a_block, &complex, 0, &[(1, 0, &id_a.restrict(hi))])?;
    // q(c1, a, c2) = a − α(c1): the α block reads C_{n+1} = (ΣC-shifted)_n.
    let alpha_c1 = alpha.reinterpret(&c1, a, 0)?;
    let q = ChainMap::from_blocks(&complex, &a_block, 0, &[(0, 1, &id_a), (0, 0, &alpha_c1.scale(neg))])?;
    // H(c1, a, c2) = (0, 0, c1) as a degree +1 map.
    let id_c = ChainMap::identity(&c1).reinterpret(&c1, c, 1)?;
    let h = ChainMap::from_blocks(&complex, &complex, 1, &[(2, 0, &id_c)])?;
    Ok(Rotation { complex, j, q, h })
}

/// Lift f: D → C through an extension B = (A, C) with class α: returns
/// f̃ = (H, f) with ∂_A H − H∂ = −αf, or None when αf is not null-homotopic
/// through the given degree.
pub fn lifting_obstruction(
    f: &ChainMap,
    d: &ChainComplex,
    a: &ChainComplex,
    b: &BlockComplex,
    alpha: &ChainMap,
    through: i64,
) -> Result<Option<ChainMap>> {
    let af = alpha.compose(f)?;
    let rhs = af.scale(d.field().neg(Scalar::ONE));
    let Some(h) = solve_defect(&rhs, d, a, through)? else {
        return Ok(None);
    };
    let d_block = BlockComplex { complex: Arc::new(d.clone()), parts: vec![d.shape().clone()] };
    let lifted = ChainMap::from_blocks(&d_block, b, f.degree(), &[(0, 0, &h), (1, 0, &f.restrict(h.hi()))])?;
    Ok(Some(lifted))
}

/// A cochain-valued map: for each source degree, the values on generators of
/// a map into the trivial module k (placed in a single target degree).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub degree: i64,
    pub values: Vec<Scalar>,
}

/// Coboundary matrix δ on cochains C_{i−1} → k, giving cochains on C_i:
/// (δc)(e) = c(∂e). Shape rank(i) × rank(i−1).
pub fn coboundary_matrix(c: &ChainComplex, i: i64) -> Result<KMatrix> {
    let n = c.group().order();
    let f = c.field();
    let d = c.diff(i)?;
    let mut m = KMatrix::zeros(f, c.rank(i), c.rank(i - 1));
    for e in 0..c.rank(i) {
        for (idx, &x) in d.column(e).iter().enumerate() {
            if !x.is_zero() {
                let a = idx / n;
                m.set(e, a, f.add(m.get(e, a), x));
            }
        }
    }
    Ok(m)
}

/// Evaluate a k-valued cochain (values on generators) on a k-vector.
pub fn eval_cochain(values: &[Scalar], v: &[Scalar], field: &Field, n: usize) -> Scalar {
    let mut acc = Scalar::ZERO;
    for (idx, &x) in v.iter().enumerate() {
        if !x.is_zero() {
            let c = values[idx / n];
            if !c.is_zero() {
                acc = field.add(acc, field.mul(c, x));
            }
        }
    }
    acc
}

/// Outcome of [`factor_decision`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factorization {
    /// φ₂ = u∘α + H∘∂ with u a cocycle on A and H a cochain on C.
    Solvable { u: Vec<Scalar>, h: Vec<Scalar> },
    Unsolvable,
}

/// For a k-valued cocycle φ = [φ₁ φ₂] on B_m = A_m ⊕ C_m with φ₁ = 0,
/// decide whether φ₂ ≃ u∘α for a cocycle u on A_{m−1}: one joint linear
/// system in (u, H) with φ₂ = u∘α + H∘∂_C and u∘∂_A = 0.
pub fn factor_decision(
    phi: &[Scalar],
    b: &BlockComplex,
    a: &ChainComplex,
    c: &ChainComplex,
    alpha: &ChainMap,
    m: i64,
) -> Result<Factorization> {
    let phi1 = &phi[..b.parts[0].rank(m)];
    if phi1.iter().any(|x| !x.is_zero()) {
        return Err(Error::PreconditionViolated("φ restricted to the sub-complex is nonzero".into()));
    }
    let phi2 = &phi[b.parts[0].rank(m)..];
    let field = a.field();
    let n = a.group().order();
    let nu = a.rank(m - 1);
    let nh = c.rank(m - 1);
    let rc = c.rank(m);
    let ra_m = a.rank(m);
    let mut mat = KMatrix::zeros(field, rc + ra_m, nu + nh);
    let mut rhs = vec![Scalar::ZERO; rc + ra_m];
    // Rows 0..rc: (u∘α)(e) + (H∘∂)(e) = φ₂(e).
    let al = alpha.comp(m)?;
    let dc = c.diff(m)?;
    for e in 0..rc {
        for (idx, &x) in al.column(e).iter().enumerate() {
            if !x.is_zero() {
                let j = idx / n;
                mat.set(e, j, field.add(mat.get(e, j), x));
            }
        }
        for (idx, &x) in dc.column(e).iter().enumerate() {
            if !x.is_zero() {
                let j = nu + idx / n;
                mat.set(e, j, field.add(mat.get(e, j), x));
            }
        }
        rhs[e] = phi2[e];
    }
    // Rows rc..: u∘∂_A = 0 on A_m.
    let da = coboundary_matrix(a, m)?;
    for e in 0..ra_m {
        for j in 0..nu {
            mat.set(rc + e, j, da.get(e, j));
        }
    }
    match mat.solve(&rhs)? {
        Some(x) => Ok(Factorization::Solvable { u: x[..nu].to_vec(), h: x[nu..].to_vec() }),
        None => Ok(Factorization::Unsolvable),
    }
}

/// Lemma-style correction: given G on A_{m−1} with G∘∂_A = φ₁ on A_m,
/// returns φ₂′ = φ₂ − G∘α on C_m.
pub fn reduce_by_homotopy(phi: &[Scalar], b: &BlockComplex, g: &[Scalar], alpha: &ChainMap, m: i64) -> Result<Vec<Scalar>> {
    let field = alpha.field();
    let n = alpha.group().order();
    let off = b.parts[0].rank(m);
    let al = alpha.comp(m)?;
    let mut out = phi[off..].to_vec();
    for (e, o) in out.iter_mut().enumerate() {
        let v = eval_cochain(g, al.column(e), field, n);
        *o = field.sub(*o, v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::AlgebraElem;

    /// Periodic resolution of k over GF(2)[C2] through degree `top`.
    pub(crate) fn c2_periodic(top: i64) -> ChainComplex {
        let g = Group::preset("C2").unwrap();
        let f = Field::gf2();
        let one_t = AlgebraElem::from_ints(&g, &f, &[1, 1]);
        let mut diffs = vec![FreeMap::zero(&g, &f, 1, Target::Free(0))];
        for _ in 1..=top {
            diffs.push(FreeMap::from_entries(&g, &f, &[vec![one_t.clone()]], 1));
        }
        ChainComplex::new(&g, &f, 0, diffs).unwrap()
    }

    #[test]
    fn shift_and_truncate() {
        let c = c2_periodic(4);
        let s = c.shift(0);
        assert_eq!(s.to_json(), c.to_json());
        let s2 = c.shift(1).shift(1);
        assert_eq!(s2.to_json(), c.shift(2).to_json());
        assert_eq!(c.shift(1).lo(), 1);
        assert_eq!(c.shift(1).diff(2).unwrap(), c.diff(1).unwrap());
        let t = c.truncate(2);
        assert_eq!(t.rank(1), 0);
        assert_eq!(t.rank(2), 1);
        assert!(t.diff(2).unwrap().is_zero());
        assert_eq!(c.truncate(0).to_json(), c.to_json());
    }

    #[test]
    fn homology_of_resolution() {
        let c = c2_periodic(4);
        assert_eq!(c.homology(0).unwrap().dim, 1);
        for i in 1..4 {
            assert_eq!(c.homology(i).unwrap().dim, 0);
        }
        assert!(matches!(c.homology(4), Err(Error::TruncationUnderflow { .. })));
    }

    #[test]
    fn bad_complex_rejected() {
        let g = Group::preset("C2").unwrap();
        let f = Field::gf2();
        let t = AlgebraElem::from_ints(&g, &f, &[0, 1]);
        let diffs = vec![
            FreeMap::zero(&g, &f, 1, Target::Free(0)),
            FreeMap::from_entries(&g, &f, &[vec![t.clone()]], 1),
            FreeMap::from_entries(&g, &f, &[vec![t]], 1),
        ];
        assert!(matches!(ChainComplex::new(&g, &f, 0, diffs), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn homotopy_solver_basics() {
        let c = c2_periodic(5);
        let id = ChainMap::identity(&c).restrict(4);
        let h = find_homotopy(&id, &id, &c, &c, 3).unwrap().unwrap();
        assert!(h.comp(0).unwrap().is_zero() || h.defect(&c, &c).unwrap().iter().all(|m| m.is_zero()));
        // id is not null-homotopic on a resolution: H₀ is nonzero.
        let zero = ChainMap::zero(&c, &c, 0, 4);
        assert!(find_homotopy(&id, &zero, &c, &c, 3).unwrap().is_none());
        // Multiplication by t is homotopic to id (both lift id_k).
        let g = c.group().clone();
        let f = c.field().clone();
        let t = FreeMap::from_entries(&g, &f, &[vec![AlgebraElem::from_ints(&g, &f, &[0, 1])]], 1);
        let tm = ChainMap::build(&c, &c, 0, 4, |_| Ok(t.clone())).unwrap();
        assert!(tm.is_chain_map(&c, &c).unwrap());
        let h = find_homotopy(&tm, &id, &c, &c, 3).unwrap().unwrap();
        let diff = tm.sub(&id).unwrap();
        for (i, m) in h.defect(&c, &c).unwrap().iter().enumerate() {
            assert_eq!(*m, diff.comp(i as i64).unwrap());
        }
    }

    #[test]
    fn defect_detects_non_chain_maps() {
        let c = c2_periodic(3);
        let g = c.group().clone();
        let f = c.field().clone();
        let zero = FreeMap::zero(&g, &f, 1, Target::Free(1));
        let id1 = FreeMap::identity(&g, &f, 1);
        // id in degree 0 and 0 in degree 1: ∂·0 ≠ id·∂.
        let m = ChainMap::build(&c, &c, 0, 2, |i| Ok(if i == 1 { zero.clone() } else { id1.clone() })).unwrap();
        assert!(!m.is_chain_map(&c, &c).unwrap());
    }
}
