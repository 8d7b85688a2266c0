//! kG-linear maps out of free modules.
//!
//! A map `kG^s → T` is determined by the images of the free generators, so it
//! is stored as `s` columns, each a k-vector in `T`. Free module coordinates
//! use index `a·|G| + h` for the basis element `h·e_a`. The target is either
//! another free module or an arbitrary [`RepModule`].

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::group::{AlgebraElem, Group, RepModule};
use crate::matrix::KMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Free(usize),
    Module(RepModule),
}

impl Target {
    pub fn dim(&self, g: &Group) -> usize {
        match self {
            Target::Free(r) => r * g.order(),
            Target::Module(m) => m.dim(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeMap {
    group: Group,
    field: Field,
    src: usize,
    target: Target,
    cols: Vec<Vec<Scalar>>,
}

/// out += c · g·v for v in a free module of any rank.
#[inline]
pub fn act_free_acc(group: &Group, field: &Field, g: usize, v: &[Scalar], c: Scalar, out: &mut [Scalar]) {
    let n = group.order();
    for (blk, chunk) in v.chunks(n).enumerate() {
        for (h, &x) in chunk.iter().enumerate() {
            if !x.is_zero() {
                let i = blk * n + group.mul(g, h);
                out[i] = field.add(out[i], field.mul(c, x));
            }
        }
    }
}

impl FreeMap {
    pub fn zero(group: &Group, field: &Field, src: usize, target: Target) -> FreeMap {
        let d = target.dim(group);
        FreeMap { group: group.clone(), field: field.clone(), src, target, cols: vec![vec![Scalar::ZERO; d]; src] }
    }

    pub fn identity(group: &Group, field: &Field, rank: usize) -> FreeMap {
        let n = group.order();
        let mut m = FreeMap::zero(group, field, rank, Target::Free(rank));
        for a in 0..rank {
            m.cols[a][a * n] = Scalar::ONE;
        }
        m
    }

    pub fn from_columns(group: &Group, field: &Field, target: Target, cols: Vec<Vec<Scalar>>) -> FreeMap {
        let d = target.dim(group);
        assert!(cols.iter().all(|c| c.len() == d), "column length must match target dimension");
        FreeMap { group: group.clone(), field: field.clone(), src: cols.len(), target, cols }
    }

    /// Build from a dst × src grid of group-algebra entries.
    pub fn from_entries(group: &Group, field: &Field, entries: &[Vec<AlgebraElem>], src: usize) -> FreeMap {
        let n = group.order();
        let dst = entries.len();
        let mut m = FreeMap::zero(group, field, src, Target::Free(dst));
        for (a, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), src);
            for (j, e) in row.iter().enumerate() {
                m.cols[j][a * n..(a + 1) * n].copy_from_slice(&e.coeffs);
            }
        }
        m
    }

    /// The entry in row `a`, column `j` as an element of kG.
    pub fn entry(&self, a: usize, j: usize) -> AlgebraElem {
        let n = self.group.order();
        AlgebraElem {
            group: self.group.clone(),
            field: self.field.clone(),
            coeffs: self.cols[j][a * n..(a + 1) * n].to_vec(),
        }
    }

    /// Map into the trivial module k^d given by the images of generators.
    pub fn to_trivial(group: &Group, field: &Field, dim: usize, cols: Vec<Vec<Scalar>>) -> FreeMap {
        FreeMap::from_columns(group, field, Target::Module(RepModule::trivial(group, field, dim)), cols)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn src_rank(&self) -> usize {
        self.src
    }
    pub fn target(&self) -> &Target {
        &self.target
    }
    pub fn dst_rank(&self) -> usize {
        match self.target {
            Target::Free(r) => r,
            Target::Module(_) => panic!("target is not free"),
        }
    }
    pub fn dst_dim(&self) -> usize {
        self.target.dim(&self.group)
    }
    pub fn src_dim(&self) -> usize {
        self.src * self.group.order()
    }
    pub fn column(&self, j: usize) -> &[Scalar] {
        &self.cols[j]
    }
    pub fn column_mut(&mut self, j: usize) -> &mut Vec<Scalar> {
        &mut self.cols[j]
    }
    pub fn columns(&self) -> &[Vec<Scalar>] {
        &self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().flatten().all(|x| x.is_zero())
    }

    /// out += c · g·v where v lies in the target.
    #[inline]
    fn act_target(&self, g: usize, v: &[Scalar], c: Scalar, out: &mut [Scalar]) {
        match &self.target {
            Target::Free(_) => act_free_acc(&self.group, &self.field, g, v, c, out),
            Target::Module(m) => m.act_acc(g, v, c, out),
        }
    }

    /// Image of a k-vector of the source.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::ZERO; self.dst_dim()];
        self.apply_acc(v, Scalar::ONE, &mut out);
        out
    }

    /// out += c · f(v)
    pub fn apply_acc(&self, v: &[Scalar], c: Scalar, out: &mut [Scalar]) {
        let n = self.group.order();
        assert_eq!(v.len(), self.src * n, "source vector length");
        for (j, chunk) in v.chunks(n).enumerate() {
            for (g, &x) in chunk.iter().enumerate() {
                if !x.is_zero() {
                    self.act_target(g, &self.cols[j], self.field.mul(c, x), out);
                }
            }
        }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &FreeMap) -> Result<FreeMap> {
        if other.target != Target::Free(self.src) {
            return Err(Error::DimensionMismatch(format!(
                "compose: inner target {:?} vs source rank {}",
                other.target, self.src
            )));
        }
        let cols = other.cols.iter().map(|c| self.apply(c)).collect();
        Ok(FreeMap { group: self.group.clone(), field: self.field.clone(), src: other.src, target: self.target.clone(), cols })
    }

    pub fn add(&self, other: &FreeMap) -> Result<FreeMap> {
        self.lin(Scalar::ONE, other)
    }

    pub fn sub(&self, other: &FreeMap) -> Result<FreeMap> {
        self.lin(self.field.neg(Scalar::ONE), other)
    }

    /// self + c·other
    pub fn lin(&self, c: Scalar, other: &FreeMap) -> Result<FreeMap> {
        if self.src != other.src || self.target != other.target {
            return Err(Error::DimensionMismatch("adding maps with different shapes".into()));
        }
        let f = &self.field;
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f.add(x, f.mul(c, y))).collect())
            .collect();
        Ok(FreeMap { group: self.group.clone(), field: f.clone(), src: self.src, target: self.target.clone(), cols })
    }

    pub fn scale(&self, c: Scalar) -> FreeMap {
        let f = &self.field;
        let cols = self.cols.iter().map(|a| a.iter().map(|&x| f.mul(c, x)).collect()).collect();
        FreeMap { group: self.group.clone(), field: f.clone(), src: self.src, target: self.target.clone(), cols }
    }

    /// Matrix of the map on k-coordinates: dst_dim × (src·|G|).
    pub fn to_k(&self) -> KMatrix {
        let n = self.group.order();
        let mut m = KMatrix::zeros(&self.field, self.dst_dim(), self.src * n);
        let mut buf = vec![Scalar::ZERO; self.dst_dim()];
        for j in 0..self.src {
            for g in 0..n {
                buf.iter_mut().for_each(|x| *x = Scalar::ZERO);
                self.act_target(g, &self.cols[j], Scalar::ONE, &mut buf);
                m.set_column(j * n + g, &buf);
            }
        }
        m
    }

    /// Restrict to a range of source generators.
    pub fn select_src(&self, range: std::ops::Range<usize>) -> FreeMap {
        FreeMap {
            group: self.group.clone(),
            field: self.field.clone(),
            src: range.len(),
            target: self.target.clone(),
            cols: self.cols[range].to_vec(),
        }
    }

    /// Restrict to a range of target generators (free targets only).
    pub fn select_dst(&self, range: std::ops::Range<usize>) -> FreeMap {
        let n = self.group.order();
        let cols = self.cols.iter().map(|c| c[range.start * n..range.end * n].to_vec()).collect();
        FreeMap { group: self.group.clone(), field: self.field.clone(), src: self.src, target: Target::Free(range.len()), cols }
    }

    /// Assemble from blocks: `blocks[r][c]` maps source block c to target block r.
    /// Missing blocks are zero.
    pub fn from_blocks(
        group: &Group,
        field: &Field,
        src_ranks: &[usize],
        dst_ranks: &[usize],
        blocks: &[Vec<Option<&FreeMap>>],
    ) -> FreeMap {
        let n = group.order();
        let src: usize = src_ranks.iter().sum();
        let dst: usize = dst_ranks.iter().sum();
        let mut m = FreeMap::zero(group, field, src, Target::Free(dst));
        let mut roff = 0;
        for (r, row) in blocks.iter().enumerate() {
            let mut coff = 0;
            for (c, b) in row.iter().enumerate() {
                if let Some(b) = b {
                    assert_eq!((b.src, b.dst_rank()), (src_ranks[c], dst_ranks[r]), "block shape");
                    for j in 0..b.src {
                        let col = &mut m.cols[coff + j];
                        for (k, &x) in b.cols[j].iter().enumerate() {
                            col[roff * n + k] = field.add(col[roff * n + k], x);
                        }
                    }
                }
                coff += src_ranks[c];
            }
            roff += dst_ranks[r];
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> (Group, Field) {
        (Group::preset("C2").unwrap(), Field::gf2())
    }

    #[test]
    fn expansion_examples() {
        let (g, f) = c2();
        assert_eq!(FreeMap::identity(&g, &f, 3).to_k(), KMatrix::identity(&f, 6));
        assert!(FreeMap::zero(&g, &f, 2, Target::Free(1)).to_k().is_zero());
        let m = FreeMap::from_entries(&g, &f, &[vec![AlgebraElem::from_ints(&g, &f, &[1, 1])]], 1);
        assert_eq!(m.to_k(), KMatrix::from_ints(&f, &[&[1, 1], &[1, 1]]));
    }

    #[test]
    fn compose_is_functorial_q8() {
        let g = Group::preset("Q8").unwrap();
        let f = Field::gf4();
        let e = |c: &[i64]| AlgebraElem::from_ints(&g, &f, c);
        let a = FreeMap::from_entries(&g, &f, &[vec![e(&[1, 0, 1, 0, 0, 0, 0, 0]), e(&[0, 0, 0, 0, 1, 0, 0, 1])]], 2);
        let b = FreeMap::from_entries(
            &g,
            &f,
            &[vec![e(&[0, 0, 1, 0, 0, 1, 0, 0])], vec![e(&[1, 1, 0, 0, 0, 0, 0, 1])]],
            1,
        );
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.to_k(), a.to_k().mul(&b.to_k()).unwrap());
        // Maps are left-linear, so entries compose in the opposite order: b00 a00 + b10 a01.
        let expect = b.entry(0, 0).mul(&a.entry(0, 0)).unwrap().add(&b.entry(1, 0).mul(&a.entry(0, 1)).unwrap()).unwrap();
        assert_eq!(ab.entry(0, 0), expect);
    }
}
