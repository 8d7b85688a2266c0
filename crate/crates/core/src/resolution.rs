//! Free resolutions of modules over kG, with contracting homotopies.
//!
//! Minimal resolutions pick, in every degree, the rref-canonical complement of
//! rad(K) inside the kernel K, so the construction is deterministic. The
//! contraction is built from canonical solutions (free variables set to zero)
//! and can be perturbed by random kernel elements to test that downstream
//! answers do not depend on it.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{ChainComplex, ChainMap};
use crate::contract::{lift, Contractible, TensorContraction};
use crate::error::{underflow, Error, Result};
use crate::field::{Field, Scalar};
use crate::freemap::{act_free_acc, FreeMap, Target};
use crate::group::{Group, RepModule};
use crate::matrix::{KMatrix, Subspace};
use crate::tensor::TensorComplex;

/// Default ceiling on the number of stored scalars in one construction.
pub const DEFAULT_BUDGET: u64 = 60_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Minimal,
    Bar,
}

#[derive(Clone, Debug)]
pub struct Resolution {
    pub kind: Kind,
    complex: Arc<ChainComplex>,
    module: RepModule,
    aug: FreeMap,
    section: Vec<Vec<Scalar>>,
    /// `maps[i][c]`: s_i of k-basis vector c of P_i (minimal only).
    maps: Vec<Vec<Vec<Scalar>>>,
}

fn check_budget(est: u64, budget: u64) -> Result<()> {
    if est > budget {
        Err(Error::BudgetExceeded(est))
    } else {
        Ok(())
    }
}

/// span{(g − 1)v} inside a free module of rank r.
fn free_radical(group: &Group, field: &Field, rank: usize, vectors: &[Vec<Scalar>]) -> Subspace {
    let n = group.order();
    let mut rows = Vec::with_capacity(vectors.len() * (n - 1));
    for v in vectors {
        for g in 1..n {
            let mut w: Vec<Scalar> = v.iter().map(|&x| field.neg(x)).collect();
            act_free_acc(group, field, g, v, Scalar::ONE, &mut w);
            rows.push(w);
        }
    }
    Subspace::from_vectors(field, rank * n, &rows)
}

/// Canonical representatives of K / rad K: the basis of K reduced modulo the
/// radical, then put in rref.
fn top_complement(field: &Field, dim: usize, kernel: &[Vec<Scalar>], rad: &Subspace) -> Vec<Vec<Scalar>> {
    let reduced: Vec<Vec<Scalar>> = kernel.iter().map(|v| rad.reduce(v)).collect();
    let s = Subspace::from_vectors(field, dim, &reduced);
    s.basis().to_rows()
}

fn random_matrix(field: &Field, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> KMatrix {
    let mut m = KMatrix::zeros(field, rows, cols);
    let q = field.size();
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, Scalar(rng.gen_range(0..q) as u16));
        }
    }
    m
}

/// Solve A·X = R for all columns of R, then add Z·M where Z spans ker A.
fn split(a: &KMatrix, rhs: &KMatrix, rng: Option<&mut ChaCha8Rng>) -> Result<Vec<Vec<Scalar>>> {
    let sols = a.solve_many(rhs)?;
    let mut cols = Vec::with_capacity(sols.len());
    for s in sols {
        cols.push(s.ok_or_else(|| Error::PreconditionViolated("resolution is not exact".into()))?);
    }
    if let Some(rng) = rng {
        let f = a.field();
        let z = a.kernel_basis();
        if z.rows() > 0 {
            let m = random_matrix(f, z.rows(), cols.len(), rng);
            for (c, col) in cols.iter_mut().enumerate() {
                for k in 0..z.rows() {
                    let x = m.get(k, c);
                    if !x.is_zero() {
                        for (o, &y) in col.iter_mut().zip(z.row(k)) {
                            *o = f.add(*o, f.mul(x, y));
                        }
                    }
                }
            }
        }
    }
    Ok(cols)
}

impl Resolution {
    /// Minimal resolution of k through degree `top`.
    pub fn minimal(group: &Group, field: &Field, top: i64) -> Result<Resolution> {
        Resolution::of_module(&RepModule::trivial(group, field, 1), top, None)
    }

    pub fn minimal_with_budget(group: &Group, field: &Field, top: i64, budget: u64) -> Result<Resolution> {
        Resolution::build_minimal(&RepModule::trivial(group, field, 1), top, None, budget)
    }

    /// Minimal resolution of a module; with a seed, the contraction is
    /// perturbed by random kernel elements.
    pub fn of_module(module: &RepModule, top: i64, seed: Option<u64>) -> Result<Resolution> {
        Resolution::build_minimal(module, top, seed, DEFAULT_BUDGET)
    }

    fn build_minimal(module: &RepModule, top: i64, seed: Option<u64>, budget: u64) -> Result<Resolution> {
        let group = module.group().clone();
        let field = module.field().clone();
        let n = group.order();
        if !group.is_p_group(field.characteristic()) {
            return Err(Error::UnsupportedGroup(format!("{} over characteristic {}", group.name(), field.characteristic())));
        }
        if top < 0 {
            return Err(underflow(0, top));
        }
        // Projective cover.
        let basis: Vec<Vec<Scalar>> = KMatrix::identity(&field, module.dim()).to_rows();
        let rad = module.radical(&basis);
        let gens = top_complement(&field, module.dim(), &basis, &rad);
        let aug = FreeMap::from_columns(&group, &field, Target::Module(module.clone()), gens);
        let mut ranks = vec![aug.src_rank()];
        let mut diffs = vec![FreeMap::zero(&group, &field, ranks[0], Target::Free(0))];
        let mut kmat = aug.to_k();
        let mut kernel = kmat.kernel_basis().to_rows();
        let mut est: u64 = 0;
        for i in 1..=top {
            let prev = ranks[(i - 1) as usize];
            let rad = free_radical(&group, &field, prev, &kernel);
            let gens = top_complement(&field, prev * n, &kernel, &rad);
            let r = gens.len();
            est += (prev * n * r * n) as u64 * 2;
            check_budget(est, budget)?;
            let d = FreeMap::from_columns(&group, &field, Target::Free(prev), gens);
            kmat = d.to_k();
            kernel = kmat.kernel_basis().to_rows();
            ranks.push(r);
            diffs.push(d);
        }
        let complex = Arc::new(ChainComplex::new(&group, &field, 0, diffs)?);
        let mut res = Resolution {
            kind: Kind::Minimal,
            complex,
            module: module.clone(),
            aug,
            section: Vec::new(),
            maps: Vec::new(),
        };
        res.build_contraction(seed)?;
        Ok(res)
    }

    fn build_contraction(&mut self, seed: Option<u64>) -> Result<()> {
        let f = self.complex.field().clone();
        let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
        let e = self.aug.to_k();
        let dm = self.module.dim();
        let sec = split(&e, &KMatrix::identity(&f, dm), rng.as_mut())?;
        // prev_s: P_{i−1} → P_i as a dense matrix, prev_d: ∂_i (∂_0 = ε).
        let mut prev_s = KMatrix::from_columns(&f, self.complex.dim(0), &sec);
        let mut prev_d = e;
        let mut maps = Vec::new();
        for i in 0..self.complex.hi() {
            let dim = self.complex.dim(i);
            let r = KMatrix::identity(&f, dim).sub(&prev_s.mul(&prev_d)?)?;
            let d_next = self.complex.diff(i + 1)?.to_k();
            let cols = split(&d_next, &r, rng.as_mut())?;
            prev_s = KMatrix::from_columns(&f, self.complex.dim(i + 1), &cols);
            prev_d = d_next;
            maps.push(cols);
        }
        self.section = sec;
        self.maps = maps;
        Ok(())
    }

    /// The same complex with a contraction perturbed by a seeded random choice.
    pub fn perturbed(&self, seed: u64) -> Result<Resolution> {
        if self.kind != Kind::Minimal {
            return Err(Error::PreconditionViolated("only stored contractions can be perturbed".into()));
        }
        let mut r = self.clone();
        r.build_contraction(Some(seed))?;
        Ok(r)
    }

    /// Normalized bar resolution of k through degree `top`.
    pub fn bar(group: &Group, field: &Field, top: i64) -> Result<Resolution> {
        Resolution::bar_with_budget(group, field, top, DEFAULT_BUDGET)
    }

    pub fn bar_with_budget(group: &Group, field: &Field, top: i64, budget: u64) -> Result<Resolution> {
        let n = group.order();
        let m = (n - 1) as u64;
        let mut est: u64 = 0;
        for i in 1..=top.max(0) as u32 {
            est = est.saturating_add(m.saturating_pow(i).saturating_mul(m.saturating_pow(i - 1)).saturating_mul(n as u64));
        }
        check_budget(est, budget)?;
        let rank = |i: i64| (n - 1).pow(i as u32);
        let mut diffs = vec![FreeMap::zero(group, field, 1, Target::Free(0))];
        for i in 1..=top {
            let mut cols = Vec::with_capacity(rank(i));
            for idx in 0..rank(i) {
                let t = bar_tuple(n, i, idx);
                let mut col = vec![Scalar::ZERO; rank(i - 1) * n];
                let mut add = |tuple: &[usize], g: usize, c: Scalar| {
                    let k = bar_index(n, tuple) * n + g;
                    col[k] = field.add(col[k], c);
                };
                add(&t[1..], t[0], Scalar::ONE);
                for j in 0..t.len() - 1 {
                    let p = group.mul(t[j], t[j + 1]);
                    if p != 0 {
                        let mut u = t[..j].to_vec();
                        u.push(p);
                        u.extend_from_slice(&t[j + 2..]);
                        add(&u, 0, field.sign(j as i64 + 1));
                    }
                }
                add(&t[..t.len() - 1], 0, field.sign(i));
                cols.push(col);
            }
            diffs.push(FreeMap::from_columns(group, field, Target::Free(rank(i - 1)), cols));
        }
        let complex = Arc::new(ChainComplex::new(group, field, 0, diffs)?);
        let module = RepModule::trivial(group, field, 1);
        let aug = FreeMap::from_columns(group, field, Target::Module(module.clone()), vec![vec![Scalar::ONE]]);
        let mut e0 = vec![Scalar::ZERO; n];
        e0[0] = Scalar::ONE;
        Ok(Resolution { kind: Kind::Bar, complex, module, aug, section: vec![e0], maps: Vec::new() })
    }

    pub fn complex(&self) -> &Arc<ChainComplex> {
        &self.complex
    }
    pub fn group(&self) -> &Group {
        self.complex.group()
    }
    pub fn field(&self) -> &Field {
        self.complex.field()
    }
    pub fn hi(&self) -> i64 {
        self.complex.hi()
    }
    pub fn ranks(&self) -> Vec<usize> {
        self.complex.shape().ranks.clone()
    }
    pub fn module(&self) -> &RepModule {
        &self.module
    }
    pub fn augmentation(&self) -> &FreeMap {
        &self.aug
    }

    /// ε on the free generators of P_0 (for augmentations onto k).
    pub fn aug_values(&self) -> Vec<Vec<Scalar>> {
        self.aug.columns().to_vec()
    }

    /// Lift of the map covering `base` (generator-wise values of degree-0 → M)
    /// from a free complex into this resolution.
    pub fn lift_map(&self, src: &ChainComplex, degree: i64, base: &[Vec<Scalar>], through: i64) -> Result<ChainMap> {
        lift(src, self, degree, None, Some(base), through)
    }

    /// The diagonal Δ: P → P⊗P, returned with the tensor complex it lands in.
    pub fn diagonal(self: &Arc<Self>) -> Result<(Arc<TensorComplex>, ChainMap)> {
        let t = Arc::new(TensorComplex::new(self.complex.clone(), self.complex.clone())?);
        let through = self.hi().min(t.hi());
        let d = match self.kind {
            Kind::Bar => self.aw_diagonal(&t, through)?,
            Kind::Minimal => {
                let tc = TensorContraction::new(t.clone(), self.clone(), self.clone())?;
                lift(&self.complex, &tc, 0, None, Some(&self.aug_values()), through)?
            }
        };
        Ok((t, d))
    }

    fn aw_diagonal(&self, t: &TensorComplex, through: i64) -> Result<ChainMap> {
        let g = self.group();
        let f = self.field();
        let n = g.order();
        let mut comps = Vec::new();
        for m in 0..=through {
            let rank = (n - 1).pow(m as u32);
            let mut cols = Vec::with_capacity(rank);
            for idx in 0..rank {
                let tup = bar_tuple(n, m, idx);
                let mut col = vec![Scalar::ZERO; t.complex.dim(m)];
                let mut h = 0;
                for i in 0..=m as usize {
                    if i > 0 {
                        h = g.mul(h, tup[i - 1]);
                    }
                    let a = bar_index(n, &tup[..i]);
                    let b = bar_index(n, &tup[i..]);
                    let k = t.gen_index(m, i as i64, a, b, h) * n;
                    col[k] = f.add(col[k], Scalar::ONE);
                }
                cols.push(col);
            }
            comps.push(FreeMap::from_columns(g, f, Target::Free(t.complex.rank(m)), cols));
        }
        ChainMap::new(&self.complex, &t.complex, 0, comps)
    }
}

/// Entries (group indices ≥ 1) of the bar generator `idx` in degree i.
pub fn bar_tuple(n: usize, i: i64, mut idx: usize) -> Vec<usize> {
    let mut t = vec![0; i as usize];
    for k in (0..i as usize).rev() {
        t[k] = idx % (n - 1) + 1;
        idx /= n - 1;
    }
    t
}

pub fn bar_index(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &g| acc * (n - 1) + g - 1)
}

impl Contractible for Resolution {
    fn complex(&self) -> &ChainComplex {
        &self.complex
    }
    fn aug_module(&self) -> &RepModule {
        &self.module
    }
    fn augment(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.aug.apply(v)
    }
    fn unit(&self, m: &[Scalar]) -> Vec<Scalar> {
        let f = self.complex.field();
        let mut out = vec![Scalar::ZERO; self.complex.dim(0)];
        for (x, col) in m.iter().zip(&self.section) {
            if !x.is_zero() {
                for (o, &y) in out.iter_mut().zip(col) {
                    *o = f.add(*o, f.mul(*x, y));
                }
            }
        }
        out
    }
    fn contract(&self, i: i64, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if i < 0 {
            return Ok(Vec::new());
        }
        if i >= self.hi() {
            return Err(underflow(i + 1, self.hi()));
        }
        let f = self.complex.field();
        let mut out = vec![Scalar::ZERO; self.complex.dim(i + 1)];
        for (idx, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            match self.kind {
                Kind::Minimal => {
                    for (o, &y) in out.iter_mut().zip(&self.maps[i as usize][idx]) {
                        *o = f.add(*o, f.mul(*x, y));
                    }
                }
                Kind::Bar => {
                    if let Some(k) = self.bar_contract_index(i, idx) {
                        out[k] = f.add(out[k], *x);
                    }
                }
            }
        }
        Ok(out)
    }
    fn contract_unit(&self, i: i64, idx: usize) -> Result<Vec<Scalar>> {
        if i < 0 || i >= self.hi() {
            return Err(underflow(i + 1, self.hi()));
        }
        match self.kind {
            Kind::Minimal => Ok(self.maps[i as usize][idx].clone()),
            Kind::Bar => {
                let mut out = vec![Scalar::ZERO; self.complex.dim(i + 1)];
                if let Some(k) = self.bar_contract_index(i, idx) {
                    out[k] = Scalar::ONE;
                }
                Ok(out)
            }
        }
    }
}

impl Resolution {
    /// s(g·[g1|…|gi]) = [g|g1|…|gi], or zero when g = 1.
    fn bar_contract_index(&self, i: i64, idx: usize) -> Option<usize> {
        let n = self.group().order();
        let (gen, g) = (idx / n, idx % n);
        if g == 0 {
            return None;
        }
        let new = (g - 1) * (n - 1).pow(i as u32) + gen;
        Some(new * n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contract::verify_contraction;

    fn acyclic(p: &Resolution) -> bool {
        let c = p.complex();
        (1..c.hi()).all(|i| c.homology(i).unwrap().dim == 0)
    }

    #[test]
    fn minimal_ranks() {
        let f = Field::gf2();
        let p = Resolution::minimal(&Group::preset("C2xC2").unwrap(), &f, 5).unwrap();
        assert_eq!(p.ranks(), vec![1, 2, 3, 4, 5, 6]);
        let q = Resolution::minimal(&Group::preset("Q8").unwrap(), &f, 7).unwrap();
        assert_eq!(q.ranks(), vec![1, 2, 2, 1, 1, 2, 2, 1]);
        let c = Resolution::minimal(&Group::preset("C2").unwrap(), &f, 4).unwrap();
        assert_eq!(c.ranks(), vec![1; 5]);
        assert!(acyclic(&p) && acyclic(&q));
    }

    #[test]
    fn contractions_hold() {
        let f = Field::gf2();
        for name in ["C2", "C4", "C2xC2"] {
            let g = Group::preset(name).unwrap();
            let p = Resolution::minimal(&g, &f, 4).unwrap();
            assert!(verify_contraction(&p, 3).unwrap(), "{name}");
            assert!(verify_contraction(&p.perturbed(7).unwrap(), 3).unwrap(), "{name}");
            let b = Resolution::bar(&g, &f, 3).unwrap();
            assert!(verify_contraction(&b, 2).unwrap(), "{name} bar");
        }
        let p = Resolution::minimal(&Group::preset("C3").unwrap(), &Field::prime(3).unwrap(), 4).unwrap();
        assert!(verify_contraction(&p, 3).unwrap());
        let b = Resolution::bar(&Group::preset("C3").unwrap(), &Field::prime(3).unwrap(), 3).unwrap();
        assert!(verify_contraction(&b, 2).unwrap());
    }

    #[test]
    fn bar_is_acyclic() {
        let f = Field::gf2();
        let b = Resolution::bar(&Group::preset("C2xC2").unwrap(), &f, 4).unwrap();
        assert_eq!(b.ranks(), vec![1, 3, 9, 27, 81]);
        assert!(acyclic(&b));
    }

    #[test]
    fn non_p_group_rejected() {
        let g = Group::preset("C3").unwrap();
        assert!(matches!(Resolution::minimal(&g, &Field::gf2(), 2), Err(Error::UnsupportedGroup(_))));
    }

    #[test]
    fn bar_budget() {
        let g = Group::preset("Q8").unwrap();
        assert!(matches!(Resolution::bar_with_budget(&g, &Field::gf2(), 6, 1_000_000), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn diagonals_are_chain_maps() {
        let f = Field::gf2();
        let g = Group::preset("C2xC2").unwrap();
        for p in [Resolution::minimal(&g, &f, 4).unwrap(), Resolution::bar(&g, &f, 3).unwrap()] {
            let p = Arc::new(p);
            let (t, d) = p.diagonal().unwrap();
            assert!(d.is_chain_map(p.complex(), &t.complex).unwrap());
        }
    }
}
