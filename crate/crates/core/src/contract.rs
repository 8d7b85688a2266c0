//! Contracting homotopies and the lifting procedure built on them.
//!
//! A contractible complex here is a free complex T, bounded below at `b`,
//! together with an augmentation ε: T_b → M, a section η: M → T_b and maps
//! s: T_i → T_{i+1} with ∂s + s∂ = 1 − ηε, where s∂ is zero on T_b.

use std::sync::Arc;

use crate::complex::{ChainComplex, ChainMap};
use crate::error::{underflow, Error, Result};
use crate::field::Scalar;
use crate::freemap::{FreeMap, Target};
use crate::group::RepModule;
use crate::matrix::KMatrix;
use crate::tensor::TensorComplex;

pub trait Contractible: Send + Sync {
    fn complex(&self) -> &ChainComplex;
    fn bottom(&self) -> i64 {
        self.complex().lo()
    }
    fn aug_module(&self) -> &RepModule;
    /// ε on a k-vector of the bottom degree.
    fn augment(&self, v: &[Scalar]) -> Vec<Scalar>;
    /// η on a vector of the augmentation module.
    fn unit(&self, m: &[Scalar]) -> Vec<Scalar>;
    /// s on a k-vector of degree i (needs i < hi).
    fn contract(&self, i: i64, v: &[Scalar]) -> Result<Vec<Scalar>>;
    /// s on the k-basis vector `idx` of degree i.
    fn contract_unit(&self, i: i64, idx: usize) -> Result<Vec<Scalar>> {
        let mut v = vec![Scalar::ZERO; self.complex().dim(i)];
        v[idx] = Scalar::ONE;
        self.contract(i, &v)
    }
}

/// Check ∂s + s∂ = 1 − ηε on every k-basis vector of degrees bottom..=hi.
pub fn verify_contraction(c: &dyn Contractible, hi: i64) -> Result<bool> {
    let cx = c.complex();
    let f = cx.field();
    let b = c.bottom();
    for i in b..=hi {
        for idx in 0..cx.dim(i) {
            let mut v = vec![Scalar::ZERO; cx.dim(i)];
            v[idx] = Scalar::ONE;
            let s = c.contract(i, &v)?;
            let mut lhs = cx.apply_diff(i + 1, &s)?;
            let extra = if i == b {
                c.unit(&c.augment(&v))
            } else {
                c.contract(i - 1, &cx.apply_diff(i, &v)?)?
            };
            for (x, y) in lhs.iter_mut().zip(&extra) {
                *x = f.add(*x, *y);
            }
            if lhs != v {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// ΣⁿT with contraction (−1)ⁿs.
pub struct Shifted {
    pub inner: Arc<dyn Contractible>,
    pub n: i64,
    complex: ChainComplex,
}

impl Shifted {
    pub fn new(inner: Arc<dyn Contractible>, n: i64) -> Shifted {
        let complex = inner.complex().shift(n);
        Shifted { inner, n, complex }
    }
}

impl Contractible for Shifted {
    fn complex(&self) -> &ChainComplex {
        &self.complex
    }
    fn aug_module(&self) -> &RepModule {
        self.inner.aug_module()
    }
    fn augment(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.inner.augment(v)
    }
    fn unit(&self, m: &[Scalar]) -> Vec<Scalar> {
        self.inner.unit(m)
    }
    fn contract(&self, i: i64, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let s = self.complex.field().sign(self.n);
        let f = self.complex.field();
        Ok(self.inner.contract(i - self.n, v)?.into_iter().map(|x| f.mul(s, x)).collect())
    }
    fn contract_unit(&self, i: i64, idx: usize) -> Result<Vec<Scalar>> {
        let s = self.complex.field().sign(self.n);
        let f = self.complex.field();
        Ok(self.inner.contract_unit(i - self.n, idx)?.into_iter().map(|x| f.mul(s, x)).collect())
    }
}

/// Contraction of C⊗D from contractions of the factors (augmented over k):
/// S(x⊗y) = s x⊗y + (−1)^b ηεx ⊗ s y, b the bottom degree of C.
pub struct TensorContraction {
    pub tensor: Arc<TensorComplex>,
    pub left: Arc<dyn Contractible>,
    pub right: Arc<dyn Contractible>,
    module: RepModule,
    left_eps: Vec<Scalar>,
    right_eps: Vec<Scalar>,
    left_eta: Vec<(usize, Scalar)>,
}

fn nonzeros(v: &[Scalar]) -> Vec<(usize, Scalar)> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(k, &x)| (k, x)).collect()
}

impl TensorContraction {
    pub fn new(
        tensor: Arc<TensorComplex>,
        left: Arc<dyn Contractible>,
        right: Arc<dyn Contractible>,
    ) -> Result<TensorContraction> {
        for c in [&left, &right] {
            let m = c.aug_module();
            if m.dim() != 1 || !m.is_trivial() {
                return Err(Error::PreconditionViolated("tensor contraction needs augmentations over k".into()));
            }
        }
        let n = tensor.group().order();
        // ε on generators (the value is G-invariant).
        let eps = |c: &Arc<dyn Contractible>| {
            let b = c.bottom();
            (0..c.complex().rank(b))
                .map(|a| {
                    let mut v = vec![Scalar::ZERO; c.complex().dim(b)];
                    v[a * n] = Scalar::ONE;
                    c.augment(&v)[0]
                })
                .collect::<Vec<_>>()
        };
        let left_eps = eps(&left);
        let right_eps = eps(&right);
        let left_eta = nonzeros(&left.unit(&[Scalar::ONE]));
        let module = left.aug_module().clone();
        Ok(TensorContraction { tensor, left, right, module, left_eps, right_eps, left_eta })
    }
}

impl Contractible for TensorContraction {
    fn complex(&self) -> &ChainComplex {
        &self.tensor.complex
    }
    fn aug_module(&self) -> &RepModule {
        &self.module
    }
    fn augment(&self, v: &[Scalar]) -> Vec<Scalar> {
        let t = &self.tensor;
        let f = t.field();
        let m = t.lo();
        let mut acc = Scalar::ZERO;
        for (idx, &c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = t.decompose(m, idx);
            let e = f.mul(self.left_eps[d.a], self.right_eps[d.b]);
            acc = f.add(acc, f.mul(c, e));
        }
        vec![acc]
    }
    fn unit(&self, m: &[Scalar]) -> Vec<Scalar> {
        let t = &self.tensor;
        let mut out = vec![Scalar::ZERO; t.complex.dim(t.lo())];
        let r = nonzeros(&self.right.unit(&[Scalar::ONE]));
        t.tensor_acc_sparse(self.left.bottom(), self.right.bottom(), &self.left_eta, &r, m[0], &mut out);
        out
    }
    fn contract(&self, m: i64, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let t = &self.tensor;
        if m + 1 > t.hi() {
            return Err(underflow(m + 1, t.hi()));
        }
        let f = t.field();
        let grp = t.group();
        let n = grp.order();
        let b = self.left.bottom();
        let sign_b = f.sign(b);
        let mut out = vec![Scalar::ZERO; t.complex.dim(m + 1)];
        for (idx, &c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = t.decompose(m, idx);
            let x = d.a * n + d.g;
            let y = d.b * n + grp.mul(d.g, d.h);
            let sx = nonzeros(&self.left.contract_unit(d.i, x)?);
            if !sx.is_empty() {
                t.tensor_acc_sparse(d.i + 1, d.j, &sx, &[(y, Scalar::ONE)], c, &mut out);
            }
            if d.i == b {
                let e = self.left_eps[d.a];
                if !e.is_zero() {
                    let sy = nonzeros(&self.right.contract_unit(d.j, y)?);
                    if !sy.is_empty() {
                        t.tensor_acc_sparse(b, d.j + 1, &self.left_eta, &sy, f.mul(f.mul(c, e), sign_b), &mut out);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Build F of degree d with D(F) = φ (or D(F) = 0 when `rhs` is None), where
/// F sends the source degree b − d into the bottom via η∘c for the cochain
/// `bottom` (generator-wise values in the augmentation module). Above that
/// F(e) = s(φ(e) + (−1)^d F(∂e)).
pub fn lift(
    src: &ChainComplex,
    tgt: &dyn Contractible,
    degree: i64,
    rhs: Option<&ChainMap>,
    bottom: Option<&[Vec<Scalar>]>,
    through: i64,
) -> Result<ChainMap> {
    let tc = tgt.complex();
    let b = tgt.bottom();
    let grp = src.group().clone();
    let f = src.field().clone();
    if through + degree > tc.hi() {
        return Err(underflow(through + degree, tc.hi()));
    }
    if let Some(r) = rhs {
        if r.degree() != degree - 1 {
            return Err(Error::Mismatch);
        }
        if through > r.hi() {
            return Err(underflow(through, r.hi()));
        }
    }
    let sgn = f.sign(degree);
    let mut comps: Vec<FreeMap> = Vec::new();
    for i in src.lo()..=through {
        let td = i + degree;
        let trank = tc.rank(td);
        if td < b {
            comps.push(FreeMap::zero(&grp, &f, src.rank(i), Target::Free(trank)));
            continue;
        }
        if td == b {
            let cols = (0..src.rank(i))
                .map(|a| match bottom {
                    Some(c) => tgt.unit(&c[a]),
                    None => vec![Scalar::ZERO; tc.dim(td)],
                })
                .collect();
            comps.push(FreeMap::from_columns(&grp, &f, Target::Free(trank), cols));
            continue;
        }
        let mut cols = Vec::with_capacity(src.rank(i));
        let ds = src.diff_ref(i);
        for a in 0..src.rank(i) {
            let mut rho = match rhs {
                Some(r) => r.apply(i, &{
                    let mut e = vec![Scalar::ZERO; src.dim(i)];
                    e[a * grp.order()] = Scalar::ONE;
                    e
                })?,
                None => vec![Scalar::ZERO; tc.dim(td - 1)],
            };
            if let (Some(ds), Some(prev)) = (ds, comps.last()) {
                if i > src.lo() {
                    prev.apply_acc(ds.column(a), sgn, &mut rho);
                }
            }
            if td - 1 == b {
                let e = tgt.augment(&rho);
                if e.iter().any(|x| !x.is_zero()) {
                    return Err(Error::HomotopySearchFailed(format!(
                        "bottom cochain does not satisfy the boundary condition at source degree {i}"
                    )));
                }
            }
            cols.push(tgt.contract(td - 1, &rho)?);
        }
        comps.push(FreeMap::from_columns(&grp, &f, Target::Free(trank), cols));
    }
    ChainMap::new(src, tc, degree, comps)
}

/// Solve for the bottom cochain c of a lift with D(F) = φ: on generators e of
/// source degree b − d + 1, ε(φ(e)) + (−1)^d c(∂e) = 0. Returns None when the
/// system has no solution.
pub fn solve_bottom(
    src: &ChainComplex,
    tgt: &dyn Contractible,
    degree: i64,
    rhs: &ChainMap,
) -> Result<Option<Vec<Vec<Scalar>>>> {
    let f = src.field().clone();
    let n = src.group().order();
    let m = tgt.aug_module();
    let dm = m.dim();
    let i0 = tgt.bottom() - degree;
    let r0 = src.rank(i0);
    let r1 = src.rank(i0 + 1);
    if r0 == 0 {
        return Ok(Some(Vec::new()));
    }
    let mut a = KMatrix::zeros(&f, r1 * dm, r0 * dm);
    let mut rhs_v = vec![Scalar::ZERO; r1 * dm];
    let sgn = f.sign(degree);
    if r1 > 0 {
        let ds = src.diff(i0 + 1)?;
        for e in 0..r1 {
            let mut unit = vec![Scalar::ZERO; src.dim(i0 + 1)];
            unit[e * n] = Scalar::ONE;
            let eps = tgt.augment(&rhs.apply(i0 + 1, &unit)?);
            for (k, x) in eps.iter().enumerate() {
                rhs_v[e * dm + k] = f.neg(*x);
            }
            for (idx, &c) in ds.column(e).iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (ag, h) = (idx / n, idx % n);
                let act = m.action(h);
                let cc = f.mul(sgn, c);
                for r in 0..dm {
                    for s in 0..dm {
                        let x = act.get(r, s);
                        if !x.is_zero() {
                            let (row, col) = (e * dm + r, ag * dm + s);
                            a.set(row, col, f.add(a.get(row, col), f.mul(cc, x)));
                        }
                    }
                }
            }
        }
    }
    Ok(a.solve(&rhs_v)?.map(|x| x.chunks(dm).map(|c| c.to_vec()).collect()))
}
