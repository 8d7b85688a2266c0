//! Syzygies, the modules L_ζ, Ext groups between modules and the action of a
//! cohomology class on them. This is an independent route to the
//! productive/semi-productive properties, straight from their definitions.

use std::sync::Arc;

use crate::cohomology::{CohClass, Cohomology};
use crate::complex::{eval_cochain, ChainComplex, ChainMap};
use crate::contract::{lift, Contractible};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::freemap::{FreeMap, Target};
use crate::group::RepModule;
use crate::matrix::{KMatrix, Subspace};
use crate::resolution::Resolution;
use crate::steenrod::{Status, Verdict, Witness};

/// Ωⁿk: k for n = 0, otherwise the kernel of ∂_{n−1} (∂_0 = ε) inside P_{n−1}.
pub fn omega_subspace(res: &Resolution, n: usize) -> Result<Subspace> {
    let p = res.complex();
    if n == 0 {
        return Err(Error::PreconditionViolated("Ω⁰ is not a submodule of a free term".into()));
    }
    let d = if n == 1 { res.augmentation().to_k() } else { p.diff(n as i64 - 1)?.to_k() };
    let k = d.kernel_basis();
    Ok(Subspace::from_vectors(p.field(), p.dim(n as i64 - 1), &k.to_rows()))
}

pub fn omega(res: &Resolution, n: usize) -> Result<RepModule> {
    if n == 0 {
        return Ok(res.module().clone());
    }
    if res.hi() < n as i64 {
        return Err(Error::TruncationUnderflow { needed: n as i64, bound: res.hi() });
    }
    let p = res.complex();
    RepModule::free(p.group(), p.field(), p.rank(n as i64 - 1)).restrict(&omega_subspace(res, n)?)
}

/// L_ζ as a submodule of P_{n−1}: the kernel of ∂y ↦ ζ(y) on Ωⁿk.
pub fn lzeta_subspace(ring: &Cohomology, z: &CohClass) -> Result<Subspace> {
    if z.is_zero() {
        return Err(Error::ZeroClass);
    }
    let n = z.degree;
    if n == 0 {
        return Err(Error::PreconditionViolated("L_ζ needs deg ζ ≥ 1".into()));
    }
    let res = ring.resolution();
    let p = res.complex();
    let f = p.field();
    let om = omega_subspace(res, n)?;
    let dn = p.diff(n as i64)?.to_k();
    let rows = om.basis().to_rows();
    let rhs = KMatrix::from_columns(f, p.dim(n as i64 - 1), &rows);
    let sols = dn.solve_many(&rhs)?;
    let mut w = Vec::with_capacity(rows.len());
    for s in sols {
        let y = s.ok_or_else(|| Error::PreconditionViolated("Ωⁿ is not the image of ∂_n".into()))?;
        w.push(eval_cochain(&z.cocycle, &y, f, p.group().order()));
    }
    // Kernel of the functional w on Ω-coordinates.
    let wm = KMatrix::from_rows(f, &[w])?;
    let ker = wm.kernel_basis();
    let mut vecs = Vec::with_capacity(ker.rows());
    for r in 0..ker.rows() {
        let mut v = vec![Scalar::ZERO; om.ambient()];
        for (k, &c) in ker.row(r).iter().enumerate() {
            if !c.is_zero() {
                for (o, &y) in v.iter_mut().zip(&rows[k]) {
                    *o = f.add(*o, f.mul(c, y));
                }
            }
        }
        vecs.push(v);
    }
    Ok(Subspace::from_vectors(f, om.ambient(), &vecs))
}

pub fn lzeta(ring: &Cohomology, z: &CohClass) -> Result<RepModule> {
    let sub = lzeta_subspace(ring, z)?;
    let p = ring.resolution().complex();
    RepModule::free(p.group(), p.field(), p.rank(z.degree as i64 - 1)).restrict(&sub)
}

/// Hom_kG(P_i, N) ≅ N^{rank i}; δu = u∘∂.
pub struct Ext {
    pub res: Arc<Resolution>,
    pub target: RepModule,
    bases: Vec<(Subspace, Subspace)>,
}

/// Matrix of δ: Hom(P_i, N) → Hom(P_{i+1}, N), shape (r_{i+1}·dim N) × (r_i·dim N).
pub fn hom_coboundary(p: &ChainComplex, target: &RepModule, i: i64) -> Result<KMatrix> {
    let f = p.field();
    let n = p.group().order();
    let dn = target.dim();
    let (r0, r1) = (p.rank(i), p.rank(i + 1));
    let mut m = KMatrix::zeros(f, r1 * dn, r0 * dn);
    if r1 == 0 || r0 == 0 {
        return Ok(m);
    }
    let d = p.diff(i + 1)?;
    for e in 0..r1 {
        for (idx, &c) in d.column(e).iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (a, h) = (idx / n, idx % n);
            let act = target.action(h);
            for r in 0..dn {
                for s in 0..dn {
                    let x = act.get(r, s);
                    if !x.is_zero() {
                        let (row, col) = (e * dn + r, a * dn + s);
                        m.set(row, col, f.add(m.get(row, col), f.mul(c, x)));
                    }
                }
            }
        }
    }
    Ok(m)
}

impl Ext {
    /// Ext^i(M, N) for i ≤ res.hi() − 1, with M the module resolved by `res`.
    pub fn new(res: Arc<Resolution>, target: &RepModule) -> Result<Ext> {
        let p = res.complex().clone();
        let f = p.field().clone();
        let dn = target.dim();
        let mut bases = Vec::new();
        for i in 0..p.hi() {
            let amb = p.rank(i) * dn;
            let z = hom_coboundary(&p, target, i)?.kernel_basis().to_rows();
            let b = if i == 0 {
                Subspace::zero(&f, amb)
            } else {
                Subspace::from_vectors(&f, amb, &hom_coboundary(&p, target, i - 1)?.transpose().to_rows())
            };
            let red: Vec<Vec<Scalar>> = z.iter().map(|v| b.reduce(v)).collect();
            bases.push((b, Subspace::from_vectors(&f, amb, &red)));
        }
        Ok(Ext { res, target: target.clone(), bases })
    }

    pub fn cap(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn dim(&self, i: usize) -> usize {
        self.bases[i].1.dim()
    }

    /// Canonical cocycle representatives of a basis of Ext^i.
    pub fn basis(&self, i: usize) -> Vec<Vec<Scalar>> {
        self.bases[i].1.basis().to_rows()
    }

    /// Coordinates of the class of a cocycle.
    pub fn coords(&self, i: usize, u: &[Scalar]) -> Result<Vec<Scalar>> {
        let (b, reps) = &self.bases[i];
        reps.coordinates(&b.reduce(u)).ok_or_else(|| Error::PreconditionViolated("not a cocycle".into()))
    }

    /// u∘f for a cocycle u on degree i and a map f of degree −n: values on
    /// generators of degree i + n.
    pub fn precompose(&self, u: &[Scalar], f: &ChainMap, i: usize) -> Result<Vec<Scalar>> {
        let n = (-f.degree()) as usize;
        let comp = f.comp((i + n) as i64)?;
        let ord = self.res.group().order();
        let dn = self.target.dim();
        let mut out = Vec::with_capacity(comp.src_rank() * dn);
        for col in comp.columns() {
            let mut v = vec![Scalar::ZERO; dn];
            for (idx, &c) in col.iter().enumerate() {
                if !c.is_zero() {
                    let (a, h) = (idx / ord, idx % ord);
                    self.target.act_acc(h, &u[a * dn..(a + 1) * dn], c, &mut v);
                }
            }
            out.extend(v);
        }
        Ok(out)
    }
}

/// P⊗M for a module M: free on e_a ⊗ m_b, where the free coordinate
/// (a, b, h) is h·e_a ⊗ ρ(h)m_b. Contraction s⊗id.
pub struct ModuleTensor {
    pub res: Arc<Resolution>,
    pub module: RepModule,
    complex: ChainComplex,
    inv_actions: Vec<KMatrix>,
}

impl ModuleTensor {
    pub fn new(res: Arc<Resolution>, module: &RepModule) -> Result<ModuleTensor> {
        let p = res.complex().clone();
        let g = p.group().clone();
        let f = p.field().clone();
        let n = g.order();
        let dm = module.dim();
        let inv_actions: Vec<KMatrix> = (0..n).map(|h| module.action(g.inv(h)).clone()).collect();
        let mut mt = ModuleTensor {
            res,
            module: module.clone(),
            complex: ChainComplex::zero_diff(&g, &f, 0, &[0]),
            inv_actions,
        };
        let mut diffs = vec![FreeMap::zero(&g, &f, p.rank(0) * dm, Target::Free(0))];
        for i in 1..=p.hi() {
            let d = p.diff(i)?;
            let mut cols = Vec::new();
            for a in 0..p.rank(i) {
                for b in 0..dm {
                    let mut mb = vec![Scalar::ZERO; dm];
                    mb[b] = Scalar::ONE;
                    cols.push(mt.product_to_free(p.rank(i - 1), d.column(a), &mb));
                }
            }
            diffs.push(FreeMap::from_columns(&g, &f, Target::Free(p.rank(i - 1) * dm), cols));
        }
        mt.complex = ChainComplex::new(&g, &f, 0, diffs)?;
        Ok(mt)
    }

    /// Free coordinates of x ⊗ m, x a k-vector in a term of rank `rank`.
    fn product_to_free(&self, rank: usize, x: &[Scalar], m: &[Scalar]) -> Vec<Scalar> {
        let f = self.module.field();
        let n = self.module.group().order();
        let dm = self.module.dim();
        let mut out = vec![Scalar::ZERO; rank * dm * n];
        for (idx, &c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (a, h) = (idx / n, idx % n);
            let w = self.inv_actions[h].mul_vec(m).expect("dimension");
            for (b, &y) in w.iter().enumerate() {
                if !y.is_zero() {
                    let k = (a * dm + b) * n + h;
                    out[k] = f.add(out[k], f.mul(c, y));
                }
            }
        }
        out
    }

    /// (x, m) summands of a free-coordinate vector: h·e_a ⊗ ρ(h)m_b.
    fn for_each_term(&self, v: &[Scalar], mut f: impl FnMut(usize, usize, Vec<Scalar>, Scalar)) {
        let n = self.module.group().order();
        let dm = self.module.dim();
        for (idx, &c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (gen, h) = (idx / n, idx % n);
            let (a, b) = (gen / dm, gen % dm);
            let m = self.module.action(h).column(b);
            f(a, h, m, c);
        }
    }

    /// Apply ζ⊗id: values on P_n ⊗ M of a k-valued cochain on P_n.
    pub fn eval_cochain_tensor(&self, values: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let f = self.module.field().clone();
        let mut out = vec![Scalar::ZERO; self.module.dim()];
        self.for_each_term(v, |a, _h, m, c| {
            let s = f.mul(c, values[a]);
            if !s.is_zero() {
                for (o, y) in out.iter_mut().zip(m) {
                    *o = f.add(*o, f.mul(s, y));
                }
            }
        });
        out
    }
}

impl Contractible for ModuleTensor {
    fn complex(&self) -> &ChainComplex {
        &self.complex
    }
    fn aug_module(&self) -> &RepModule {
        &self.module
    }
    fn augment(&self, v: &[Scalar]) -> Vec<Scalar> {
        let eps: Vec<Scalar> = self.res.aug_values().iter().map(|x| x[0]).collect();
        self.eval_cochain_tensor(&eps, v)
    }
    fn unit(&self, m: &[Scalar]) -> Vec<Scalar> {
        let eta = self.res.unit(&[Scalar::ONE]);
        self.product_to_free(self.res.complex().rank(0), &eta, m)
    }
    fn contract(&self, i: i64, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let p = self.res.complex();
        let f = self.module.field().clone();
        let n = p.group().order();
        let mut out = vec![Scalar::ZERO; self.complex.dim(i + 1)];
        let mut err = None;
        self.for_each_term(v, |a, h, m, c| {
            match self.res.contract_unit(i, a * n + h) {
                Ok(sx) => {
                    let t = self.product_to_free(p.rank(i + 1), &sx, &m);
                    for (o, y) in out.iter_mut().zip(t) {
                        *o = f.add(*o, f.mul(c, y));
                    }
                }
                Err(e) => err = Some(e),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }
}

/// The action of ζ on Ext*(M, N) through a resolution of M.
pub struct ZetaAction {
    pub res_m: Arc<Resolution>,
    pub zeta_m: ChainMap,
}

impl ZetaAction {
    /// Build ζ̂_M by lifting the cocycle (ζ⊗id)∘φ_n, φ: P(M) → P⊗M covering id_M.
    pub fn new(ring: &Cohomology, z: &CohClass, res_m: Arc<Resolution>) -> Result<ZetaAction> {
        let n = z.degree as i64;
        let pm = ModuleTensor::new(ring.resolution().clone(), res_m.module())?;
        let top = res_m.hi().min(pm.complex().hi());
        let base = res_m.aug_values();
        let phi = lift(res_m.complex(), &pm, 0, None, Some(&base), top)?;
        let comp = phi.comp(n)?;
        let bottom: Vec<Vec<Scalar>> = comp.columns().iter().map(|c| pm.eval_cochain_tensor(&z.cocycle, c)).collect();
        let zeta_m = lift(res_m.complex(), res_m.as_ref(), -n, None, Some(&bottom), res_m.hi())?;
        Ok(ZetaAction { res_m, zeta_m })
    }

    /// Matrix Ext^i(M, N) → Ext^{i+n}(M, N) in canonical coordinates.
    pub fn matrix(&self, ext: &Ext, i: usize) -> Result<KMatrix> {
        let n = (-self.zeta_m.degree()) as usize;
        let rows = ext.dim(i + n);
        let mut cols = Vec::new();
        for u in ext.basis(i) {
            let img = ext.precompose(&u, &self.zeta_m, i)?;
            cols.push(ext.coords(i + n, &img)?);
        }
        Ok(KMatrix::from_columns(ext.res.field(), rows, &cols))
    }
}

fn oracle(ring: &Cohomology, z: &CohClass, cap: usize, target_is_l: bool) -> Result<Verdict> {
    if z.is_zero() {
        return Err(Error::ZeroClass);
    }
    let n = z.degree;
    let l = lzeta(ring, z)?;
    let res_l = Arc::new(Resolution::of_module(&l, cap as i64 + 1, None)?);
    let target = if target_is_l { l.clone() } else { RepModule::trivial(ring.group(), ring.field(), 1) };
    let ext = Ext::new(res_l.clone(), &target)?;
    let act = ZetaAction::new(ring, z, res_l)?;
    if cap < n {
        return Ok(Verdict { status: Status::YesUpToDegree(cap), witness: None });
    }
    for i in 0..=cap - n {
        for u in ext.basis(i) {
            let img = ext.precompose(&u, &act.zeta_m, i)?;
            if ext.coords(i + n, &img)?.iter().any(|x| !x.is_zero()) {
                return Ok(Verdict { status: Status::No, witness: Some(Witness::Oracle { degree: i, cocycle: u }) });
            }
        }
    }
    Ok(Verdict { status: Status::YesUpToDegree(cap), witness: None })
}

/// Does ζ annihilate Ext^i(L_ζ, L_ζ) for i + n ≤ cap?
pub fn oracle_productive(ring: &Cohomology, z: &CohClass, cap: usize) -> Result<Verdict> {
    oracle(ring, z, cap, true)
}

/// Does ζ annihilate Ext^i(L_ζ, k) for i + n ≤ cap?
pub fn oracle_semiproductive(ring: &Cohomology, z: &CohClass, cap: usize) -> Result<Verdict> {
    oracle(ring, z, cap, false)
}

/// Dimensions of Ext^i(M, N) for i ≤ cap.
pub fn ext_dims(m: &RepModule, n: &RepModule, cap: usize) -> Result<Vec<usize>> {
    let res = Arc::new(Resolution::of_module(m, cap as i64 + 1, None)?);
    let ext = Ext::new(res, n)?;
    Ok((0..=cap).map(|i| ext.dim(i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::group::Group;
    use crate::parse::parse_class;

    #[test]
    fn syzygy_dimensions() {
        let f = Field::gf2();
        let c2 = Resolution::minimal(&Group::preset("C2").unwrap(), &f, 3).unwrap();
        assert_eq!(omega(&c2, 0).unwrap().dim(), 1);
        assert_eq!(omega(&c2, 1).unwrap().dim(), 1);
        let v4 = Resolution::minimal(&Group::preset("C2xC2").unwrap(), &f, 3).unwrap();
        assert_eq!(omega(&v4, 1).unwrap().dim(), 3);
    }

    #[test]
    fn lzeta_dimensions() {
        let h = Cohomology::minimal(&Group::preset("C2xC2").unwrap(), &Field::gf2(), 4).unwrap();
        let x = parse_class(&h, "x").unwrap();
        assert_eq!(lzeta(&h, &x).unwrap().dim(), 2);
        let z = parse_class(&h, "x^2+x*y+y^2").unwrap();
        let om = omega(h.resolution(), 2).unwrap().dim();
        assert_eq!(lzeta(&h, &z).unwrap().dim(), om - 1);
        let c2 = Cohomology::minimal(&Group::preset("C2").unwrap(), &Field::gf2(), 3).unwrap();
        let t = c2.basis(1).unwrap().remove(0);
        assert_eq!(lzeta(&c2, &t).unwrap().dim(), 0);
    }

    #[test]
    fn ext_matches_cohomology() {
        for name in ["C2xC2", "C4", "Q8"] {
            let g = Group::preset(name).unwrap();
            let f = Field::gf2();
            let h = Cohomology::minimal(&g, &f, 5).unwrap();
            let k = RepModule::trivial(&g, &f, 1);
            let dims = ext_dims(&k, &k, 5).unwrap();
            for (i, d) in dims.iter().enumerate() {
                assert_eq!(*d, h.dim(i).unwrap(), "{name} {i}");
            }
        }
    }

    #[test]
    fn free_module_has_no_higher_ext() {
        let g = Group::preset("C2xC2").unwrap();
        let f = Field::gf2();
        let kg = RepModule::free(&g, &f, 1);
        let k = RepModule::trivial(&g, &f, 1);
        let dims = ext_dims(&kg, &k, 3).unwrap();
        assert_eq!(&dims[1..], &[0, 0, 0]);
        let r = Resolution::of_module(&kg, 3, None).unwrap();
        assert_eq!(r.ranks(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn action_on_k_matches_cup_product() {
        let h = Cohomology::minimal(&Group::preset("C2xC2").unwrap(), &Field::gf2(), 4).unwrap();
        let z = parse_class(&h, "x+y").unwrap();
        let ext = Ext::new(h.resolution().clone(), &RepModule::trivial(h.group(), h.field(), 1)).unwrap();
        let act = ZetaAction::new(&h, &z, h.resolution().clone()).unwrap();
        for d in 0..=2 {
            let a = act.matrix(&ext, d).unwrap();
            let b = h.mult_matrix(&z, d).unwrap();
            assert_eq!(a.rank(), b.rank());
            assert_eq!(a, b);
        }
    }
}
