//! Tensor products of free complexes with the diagonal G-action.
//!
//! In degree m the free generators of (C⊗D)_m are `e_a ⊗ h·e_b` for
//! e_a ∈ C_i, e_b ∈ D_j, i + j = m and h ∈ G, so the free rank is
//! |G|·Σ rank(C_i)·rank(D_j). Blocks are ordered by increasing i, and inside a
//! block the generator (a, b, h) sits at `(a·rank(D_j) + b)·|G| + h`. The
//! k-basis element `g·e_a ⊗ g′·e_b` is g times the generator (a, b, g⁻¹g′).

use std::sync::Arc;

use crate::complex::{ChainComplex, ChainMap};
use crate::error::{underflow, Error, Result};
use crate::field::{Field, Scalar};
use crate::freemap::{FreeMap, Target};
use crate::group::Group;

#[derive(Clone, Debug)]
pub struct TensorComplex {
    pub left: Arc<ChainComplex>,
    pub right: Arc<ChainComplex>,
    pub complex: Arc<ChainComplex>,
    /// For each degree m (from lo), the list of (i, generator offset) blocks.
    blocks: Vec<Vec<(i64, usize)>>,
}

/// Decomposed k-basis index of a tensor term: g·e_a ⊗ g·h·e_b in block (i, j).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorIndex {
    pub i: i64,
    pub j: i64,
    pub a: usize,
    pub b: usize,
    pub h: usize,
    pub g: usize,
}

impl TensorComplex {
    pub fn new(left: Arc<ChainComplex>, right: Arc<ChainComplex>) -> Result<TensorComplex> {
        if left.group() != right.group() || left.field() != right.field() {
            return Err(Error::Mismatch);
        }
        let group = left.group().clone();
        let field = left.field().clone();
        let n = group.order();
        let lo = left.lo() + right.lo();
        let hi = (left.hi() + right.lo()).min(left.lo() + right.hi());
        let mut blocks = Vec::new();
        let mut ranks = Vec::new();
        for m in lo..=hi {
            let mut off = 0;
            let mut bl = Vec::new();
            for i in left.lo()..=(m - right.lo()) {
                bl.push((i, off));
                off += left.rank(i) * right.rank(m - i) * n;
            }
            blocks.push(bl);
            ranks.push(off);
        }
        let mut t = TensorComplex {
            left,
            right,
            complex: Arc::new(ChainComplex::zero_diff(&group, &field, lo, &ranks)),
            blocks,
        };
        let mut diffs = Vec::new();
        for m in lo..=hi {
            diffs.push(t.build_diff(m)?);
        }
        t.complex = Arc::new(ChainComplex::new(&group, &field, lo, diffs)?);
        Ok(t)
    }

    pub fn group(&self) -> &Group {
        self.left.group()
    }
    pub fn field(&self) -> &Field {
        self.left.field()
    }
    pub fn lo(&self) -> i64 {
        self.complex.lo()
    }
    pub fn hi(&self) -> i64 {
        self.complex.hi()
    }

    fn block_offset(&self, m: i64, i: i64) -> usize {
        let bl = &self.blocks[(m - self.lo()) as usize];
        bl[(i - self.left.lo()) as usize].1
    }

    /// Free generator index of e_a ⊗ h·e_b in degree m.
    #[inline]
    pub fn gen_index(&self, m: i64, i: i64, a: usize, b: usize, h: usize) -> usize {
        let n = self.group().order();
        self.block_offset(m, i) + (a * self.right.rank(m - i) + b) * n + h
    }

    /// k-coordinate of g1·e_a ⊗ g2·e_b.
    #[inline]
    pub fn k_index(&self, m: i64, i: i64, a: usize, g1: usize, b: usize, g2: usize) -> usize {
        let grp = self.group();
        let n = grp.order();
        self.gen_index(m, i, a, b, grp.mul(grp.inv(g1), g2)) * n + g1
    }

    pub fn decompose(&self, m: i64, idx: usize) -> TensorIndex {
        let grp = self.group();
        let n = grp.order();
        let (gen, g) = (idx / n, idx % n);
        let bl = &self.blocks[(m - self.lo()) as usize];
        let pos = bl.partition_point(|&(_, off)| off <= gen) - 1;
        // Skip empty blocks sharing an offset.
        let mut k = pos;
        while k + 1 < bl.len() && bl[k + 1].1 <= gen {
            k += 1;
        }
        let (i, off) = bl[k];
        let j = m - i;
        let rest = gen - off;
        let h = rest % n;
        let ab = rest / n;
        let sj = self.right.rank(j);
        TensorIndex { i, j, a: ab / sj, b: ab % sj, h, g }
    }

    /// out += c · (u ⊗ w) for k-vectors u ∈ C_i, w ∈ D_j.
    pub fn tensor_acc(&self, i: i64, j: i64, u: &[Scalar], w: &[Scalar], c: Scalar, out: &mut [Scalar]) {
        let nz = |v: &[Scalar]| v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(k, &x)| (k, x)).collect::<Vec<_>>();
        self.tensor_acc_sparse(i, j, &nz(u), &nz(w), c, out);
    }

    /// As [`tensor_acc`](Self::tensor_acc) with both factors given by their nonzero entries.
    pub fn tensor_acc_sparse(
        &self,
        i: i64,
        j: i64,
        u: &[(usize, Scalar)],
        w: &[(usize, Scalar)],
        c: Scalar,
        out: &mut [Scalar],
    ) {
        let f = self.field();
        let n = self.group().order();
        let m = i + j;
        for &(ui, x) in u {
            let cx = f.mul(c, x);
            let (a, g1) = (ui / n, ui % n);
            for &(wi, y) in w {
                let (b, g2) = (wi / n, wi % n);
                let k = self.k_index(m, i, a, g1, b, g2);
                out[k] = f.add(out[k], f.mul(cx, y));
            }
        }
    }

    fn build_diff(&self, m: i64) -> Result<FreeMap> {
        let grp = self.group().clone();
        let f = self.field().clone();
        let n = grp.order();
        let tgt_rank = self.complex_rank_hint(m - 1);
        let mut cols = Vec::new();
        for &(i, _) in &self.blocks[(m - self.lo()) as usize] {
            let j = m - i;
            let (ri, sj) = (self.left.rank(i), self.right.rank(j));
            if ri * sj == 0 {
                continue;
            }
            let dl = self.left.diff(i)?;
            let dr = self.right.diff(j)?;
            let sign = f.sign(i);
            for a in 0..ri {
                for b in 0..sj {
                    for h in 0..n {
                        let mut col = vec![Scalar::ZERO; tgt_rank * n];
                        // ∂e_a ⊗ h·e_b
                        if i - 1 >= self.left.lo() {
                            let mut hb = vec![Scalar::ZERO; sj * n];
                            hb[b * n + h] = Scalar::ONE;
                            self.tensor_acc(i - 1, j, dl.column(a), &hb, Scalar::ONE, &mut col);
                        }
                        // (−1)^i e_a ⊗ h·∂e_b
                        if j - 1 >= self.right.lo() {
                            let mut ea = vec![Scalar::ZERO; ri * n];
                            ea[a * n] = Scalar::ONE;
                            let mut hdb = vec![Scalar::ZERO; self.right.dim(j - 1)];
                            crate::freemap::act_free_acc(&grp, &f, h, dr.column(b), Scalar::ONE, &mut hdb);
                            self.tensor_acc(i, j - 1, &ea, &hdb, sign, &mut col);
                        }
                        cols.push(col);
                    }
                }
            }
        }
        Ok(FreeMap::from_columns(&grp, &f, Target::Free(tgt_rank), cols))
    }

    fn complex_rank_hint(&self, m: i64) -> usize {
        self.complex.rank(m)
    }

    /// The map f × g: C⊗D → C′⊗D′, (f×g)(x⊗y) = (−1)^{|x||g|} f(x)⊗g(y).
    pub fn cross(&self, tgt: &TensorComplex, f: &ChainMap, g: &ChainMap) -> Result<ChainMap> {
        let grp = self.group().clone();
        let fld = self.field().clone();
        let n = grp.order();
        let d = f.degree() + g.degree();
        let mut hi = self.hi().min(tgt.hi() - d);
        // Need f at every i ≤ m − D.lo and g at every j ≤ m − C.lo.
        hi = hi.min(f.hi() + self.right.lo()).min(g.hi() + self.left.lo());
        if hi < self.lo() {
            return Err(underflow(self.lo(), hi));
        }
        let mut comps = Vec::new();
        for m in self.lo()..=hi {
            let mut cols = Vec::new();
            let tr = tgt.complex.rank(m + d);
            for &(i, _) in &self.blocks[(m - self.lo()) as usize] {
                let j = m - i;
                let (ri, sj) = (self.left.rank(i), self.right.rank(j));
                if ri * sj == 0 {
                    continue;
                }
                let fi = f.comp(i)?;
                let gj = g.comp(j)?;
                let sign = fld.sign(i * g.degree());
                for a in 0..ri {
                    for b in 0..sj {
                        let gb = gj.column(b);
                        for h in 0..n {
                            let mut col = vec![Scalar::ZERO; tr * n];
                            let mut hgb = vec![Scalar::ZERO; gb.len()];
                            crate::freemap::act_free_acc(&grp, &fld, h, gb, Scalar::ONE, &mut hgb);
                            let ti = i + f.degree();
                            let tj = j + g.degree();
                            if tgt.left.rank(ti) > 0 && tgt.right.rank(tj) > 0 {
                                tgt.tensor_acc(ti, tj, fi.column(a), &hgb, sign, &mut col);
                            }
                            cols.push(col);
                        }
                    }
                }
            }
            comps.push(FreeMap::from_columns(&grp, &fld, Target::Free(tr), cols));
        }
        ChainMap::new(&self.complex, &tgt.complex, d, comps)
    }

    /// T(x⊗y) = (−1)^{|x||y|} y⊗x, as a map to `tgt` = D⊗C.
    pub fn transposition(&self, tgt: &TensorComplex) -> Result<ChainMap> {
        let grp = self.group().clone();
        let fld = self.field().clone();
        let n = grp.order();
        let hi = self.hi().min(tgt.hi());
        let mut comps = Vec::new();
        for m in self.lo()..=hi {
            let tr = tgt.complex.rank(m);
            let mut cols = Vec::new();
            for &(i, _) in &self.blocks[(m - self.lo()) as usize] {
                let j = m - i;
                let (ri, sj) = (self.left.rank(i), self.right.rank(j));
                let sign = fld.sign(i * j);
                for a in 0..ri {
                    for b in 0..sj {
                        for h in 0..n {
                            // e_a ⊗ h e_b ↦ ± h e_b ⊗ e_a
                            let mut col = vec![Scalar::ZERO; tr * n];
                            let k = tgt.k_index(m, j, b, h, a, 0);
                            col[k] = sign;
                            cols.push(col);
                        }
                    }
                }
            }
            comps.push(FreeMap::from_columns(&grp, &fld, Target::Free(tr), cols));
        }
        ChainMap::new(&self.complex, &tgt.complex, 0, comps)
    }

    /// id⊗ε: C⊗D → C, where `eps` gives ε on the generators of D_0. Zero when
    /// D does not start in degree 0.
    pub fn counit_right(&self, eps: Option<&[Scalar]>) -> Result<ChainMap> {
        let n = self.group().order();
        let (g, f) = (self.group().clone(), self.field().clone());
        let hi = self.hi().min(self.left.hi());
        let mut comps = Vec::new();
        for m in self.lo()..=hi {
            let mut map = FreeMap::zero(&g, &f, self.complex.rank(m), Target::Free(self.left.rank(m)));
            if let (Some(eps), 0) = (eps, self.right.lo()) {
                if self.left.rank(m) > 0 && m >= self.left.lo() {
                    for a in 0..self.left.rank(m) {
                        for (b, &e) in eps.iter().enumerate() {
                            for h in 0..n {
                                map.column_mut(self.gen_index(m, m, a, b, h))[a * n] = e;
                            }
                        }
                    }
                }
            }
            comps.push(map);
        }
        ChainMap::new(&self.complex, &self.left, 0, comps)
    }

    /// ε⊗id: C⊗D → D, where `eps` gives ε on the generators of C_0.
    pub fn counit_left(&self, eps: Option<&[Scalar]>) -> Result<ChainMap> {
        let n = self.group().order();
        let (g, f) = (self.group().clone(), self.field().clone());
        let hi = self.hi().min(self.right.hi());
        let mut comps = Vec::new();
        for m in self.lo()..=hi {
            let mut map = FreeMap::zero(&g, &f, self.complex.rank(m), Target::Free(self.right.rank(m)));
            if let (Some(eps), 0) = (eps, self.left.lo()) {
                if m >= self.right.lo() {
                    for (a, &e) in eps.iter().enumerate() {
                        for b in 0..self.right.rank(m) {
                            for h in 0..n {
                                map.column_mut(self.gen_index(m, 0, a, b, h))[b * n + h] = e;
                            }
                        }
                    }
                }
            }
            comps.push(map);
        }
        ChainMap::new(&self.complex, &self.right, 0, comps)
    }

    /// Evaluate x⊗y on a k-vector of degree m, where x, y are k-valued
    /// cochains on C_p and D_q (p + q = m), with sign (−1)^{q·p}.
    pub fn eval_cross_cochain(&self, m: i64, p: i64, x: &[Scalar], y: &[Scalar], v: &[Scalar]) -> Scalar {
        let f = self.field();
        let q = m - p;
        if self.left.rank(p) == 0 || self.right.rank(q) == 0 {
            return Scalar::ZERO;
        }
        let n = self.group().order();
        let off = self.block_offset(m, p) * n;
        let len = self.left.rank(p) * self.right.rank(q) * n * n;
        let sj = self.right.rank(q);
        let mut acc = Scalar::ZERO;
        for (k, &c) in v[off..off + len].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let ab = k / (n * n);
            let (a, b) = (ab / sj, ab % sj);
            let val = f.mul(x[a], y[b]);
            if !val.is_zero() {
                acc = f.add(acc, f.mul(c, val));
            }
        }
        f.mul(acc, f.sign(p * q))
    }

    /// Convert a k-vector of block (i, j) in `sub` (a tensor of parts) into
    /// this complex, where the parts embed into the factors at generator
    /// offsets `lo_off(i)` and `ro_off(j)`.
    pub fn embed_from(
        &self,
        sub: &TensorComplex,
        m: i64,
        v: &[Scalar],
        lo_off: impl Fn(i64) -> usize,
        ro_off: impl Fn(i64) -> usize,
        out: &mut [Scalar],
    ) {
        let n = self.group().order();
        let f = self.field();
        for (idx, &c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = sub.decompose(m, idx);
            let a = t.a + lo_off(t.i);
            let b = t.b + ro_off(t.j);
            let k = self.gen_index(m, t.i, a, b, t.h) * n + t.g;
            out[k] = f.add(out[k], c);
        }
    }

    /// Inverse of [`embed_from`]: the component of v that lies in the sub-tensor.
    pub fn project_to(
        &self,
        sub: &TensorComplex,
        m: i64,
        v: &[Scalar],
        lo_off: impl Fn(i64) -> usize,
        ro_off: impl Fn(i64) -> usize,
    ) -> Vec<Scalar> {
        let n = self.group().order();
        let mut out = vec![Scalar::ZERO; sub.complex.dim(m)];
        for (idx, o) in out.iter_mut().enumerate() {
            let t = sub.decompose(m, idx);
            let k = self.gen_index(m, t.i, t.a + lo_off(t.i), t.b + ro_off(t.j), t.h) * n + t.g;
            *o = v[k];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::AlgebraElem;

    fn c2_periodic(top: i64, field: &Field) -> Arc<ChainComplex> {
        let g = Group::preset("C2").unwrap();
        let mut diffs = vec![FreeMap::zero(&g, field, 1, Target::Free(0))];
        for i in 1..=top {
            // Over odd characteristic use 1 − t and 1 + t alternately so ∂² = 0.
            let c = if i % 2 == 1 { [1, -1] } else { [1, 1] };
            diffs.push(FreeMap::from_entries(&g, field, &[vec![AlgebraElem::from_ints(&g, field, &c)]], 1));
        }
        Arc::new(ChainComplex::new(&g, field, 0, diffs).unwrap())
    }

    #[test]
    fn unit_and_ranks() {
        let f = Field::gf2();
        let g = Group::preset("C2").unwrap();
        let p = c2_periodic(3, &f);
        let k = Arc::new(ChainComplex::zero_diff(&g, &f, 0, &[1]));
        // kG ⊗ kG under the diagonal action is free of rank |G|.
        let t = TensorComplex::new(k, p.clone()).unwrap();
        assert_eq!(t.hi(), 0);
        assert_eq!(t.complex.rank(0), 2);
        let pp = TensorComplex::new(p.clone(), p.clone()).unwrap();
        assert_eq!(pp.complex.rank(2), 3 * 2);
    }

    #[test]
    fn transposition_squares_to_identity() {
        for f in [Field::gf2(), Field::prime(3).unwrap()] {
            let p = c2_periodic(3, &f);
            let pp = TensorComplex::new(p.clone(), p.clone()).unwrap();
            let t = pp.transposition(&pp).unwrap();
            assert!(t.is_chain_map(&pp.complex, &pp.complex).unwrap());
            let tt = t.compose(&t).unwrap();
            for m in 0..=3 {
                assert_eq!(tt.comp(m).unwrap(), FreeMap::identity(pp.group(), &f, pp.complex.rank(m)));
            }
        }
    }

    #[test]
    fn decompose_round_trip() {
        let f = Field::gf2();
        let p = c2_periodic(3, &f);
        let pp = TensorComplex::new(p.clone(), p).unwrap();
        for m in 0..=3 {
            for idx in 0..pp.complex.dim(m) {
                let t = pp.decompose(m, idx);
                let g = pp.group();
                let g2 = g.mul(t.g, t.h);
                assert_eq!(pp.k_index(m, t.i, t.a, t.g, t.b, g2), idx);
            }
        }
    }
}
