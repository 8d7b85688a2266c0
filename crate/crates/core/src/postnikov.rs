//! The sphere complex P(ζ), its doubled extension P(ζ⊕ζ), the chain map ψ
//! covering k → k⊗k, the obstruction ηψ and, when it vanishes, the lifted
//! comultiplication P(ζ) → P(ζ)⊗P(ζ).
//!
//! Q = Σ^{n−1}P throughout, and α: P → Q is ζ̂ read as a degree −1 map, so
//! ∂(q, p) = (∂_Q q + αp, ∂_P p).

use std::sync::Arc;

use crate::cohomology::{CohClass, Cohomology};
use crate::complex::{
    coboundary_matrix, extension_rotate, extension_total, factor_decision, find_homotopy, reduce_by_homotopy,
    BlockComplex, ChainComplex, ChainMap, Factorization,
};
use crate::contract::{lift, solve_bottom, Contractible, Shifted, TensorContraction};
use crate::error::{underflow, Error, Result};
use crate::field::Scalar;
use crate::freemap::FreeMap;
use crate::resolution::Resolution;
use crate::steenrod;
use crate::tensor::TensorComplex;

pub struct PolarizedSphere {
    pub n: usize,
    pub p: Arc<ChainComplex>,
    pub q: Arc<ChainComplex>,
    pub alpha: ChainMap,
    /// Blocks (Q, P).
    pub total: BlockComplex,
    q_contraction: Arc<Shifted>,
    res: Arc<Resolution>,
}

impl PolarizedSphere {
    pub fn complex(&self) -> &Arc<ChainComplex> {
        &self.total.complex
    }

    /// ε: P(ζ)_0 → k on generators; the Q block never contributes.
    pub fn augmentation(&self) -> Vec<Scalar> {
        let mut eps = vec![Scalar::ZERO; self.total.complex.rank(0)];
        let off = self.total.offset(1, 0);
        for (k, v) in self.res.aug_values().iter().enumerate() {
            eps[off + k] = v[0];
        }
        eps
    }

    pub fn homology_dims(&self) -> Result<Vec<usize>> {
        let c = &self.total.complex;
        (c.lo()..c.hi()).map(|i| Ok(c.homology(i)?.dim)).collect()
    }
}

pub fn build_p_zeta(ring: &Cohomology, z: &CohClass) -> Result<PolarizedSphere> {
    if z.is_zero() {
        return Err(Error::ZeroClass);
    }
    if z.degree == 0 {
        return Err(Error::PreconditionViolated("P(ζ) needs n ≥ 1".into()));
    }
    let res = ring.resolution().clone();
    let n = z.degree as i64;
    let p = res.complex().clone();
    let q_contraction = Arc::new(Shifted::new(res.clone(), n - 1));
    let q = Arc::new(q_contraction.complex().clone());
    let alpha = ring.chain_rep(z)?.reinterpret(&p, &q, -1)?;
    let total = extension_total(&q, &p, &alpha)?;
    Ok(PolarizedSphere { n: z.degree, p, q, alpha, total, q_contraction, res })
}

/// The extension class read back from P(ζ): the class of the (0, 1) block of
/// the differential, as a degree −n self-map of P.
pub fn extension_class(ring: &Cohomology, s: &PolarizedSphere) -> Result<CohClass> {
    let d = &s.total.complex;
    let mut comps = Vec::new();
    for i in d.lo().max(0)..=s.p.hi().min(d.hi()) {
        let m = d.diff(i)?;
        let so = s.total.offset(1, i);
        let to = s.total.offset(0, i - 1);
        comps.push(m.select_src(so..so + s.p.rank(i)).select_dst(to..to + s.q.rank(i - 1)));
    }
    let a = ChainMap::new(&s.p, &s.q, -1, comps)?;
    ring.class_of_map(&a.reinterpret(&s.p, &s.p, -(s.n as i64))?)
}

/// Check ∂H + H∂ = id − jq for the rotation of P(ζ).
pub fn rotation_holds(s: &PolarizedSphere) -> Result<bool> {
    let rot = extension_rotate(&s.q, &s.p, &s.alpha)?;
    let c = &rot.complex.complex;
    let jq = rot.j.compose(&rot.q)?;
    let id = ChainMap::identity(c);
    let defect = rot.h.defect(c, c)?;
    let f = c.field();
    for (k, d) in defect.iter().enumerate() {
        let i = c.lo() + k as i64;
        if i > jq.hi() {
            break;
        }
        // D(H) = ∂H − (−1)^1 H∂ = ∂H + H∂.
        let want = id.comp(i)?.lin(f.neg(Scalar::ONE), &jq.comp(i)?)?;
        if *d != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// P(ζ⊕ζ) with blocks (Q⊗P, P⊗Q, P⊗P).
pub struct Doubled {
    pub qp: Arc<TensorComplex>,
    pub pq: Arc<TensorComplex>,
    pub pp: Arc<TensorComplex>,
    pub alpha_id: ChainMap,
    pub id_alpha: ChainMap,
    pub total: BlockComplex,
}

pub fn build_p_zeta_plus(ring: &Cohomology, s: &PolarizedSphere) -> Result<Doubled> {
    let (pp, _) = ring.diagonal()?;
    let pp = pp.clone();
    let qp = Arc::new(TensorComplex::new(s.q.clone(), s.p.clone())?);
    let pq = Arc::new(TensorComplex::new(s.p.clone(), s.q.clone())?);
    let id = ChainMap::identity(&s.p);
    let alpha_id = pp.cross(&qp, &s.alpha, &id)?;
    let id_alpha = pp.cross(&pq, &id, &s.alpha)?;
    let total = ChainComplex::triangular(
        &[&qp.complex, &pq.complex, &pp.complex],
        &[(0, 2, &alpha_id), (1, 2, &id_alpha)],
    )?;
    Ok(Doubled { qp, pq, pp, alpha_id, id_alpha, total })
}

pub struct PsiData {
    pub delta: ChainMap,
    pub delta1: ChainMap,
    pub delta2: ChainMap,
    pub h1: ChainMap,
    pub h2: ChainMap,
    pub cup1: ChainMap,
    pub h_prime: ChainMap,
    pub psi: ChainMap,
}

fn lift_with_bottom(src: &ChainComplex, tgt: &dyn Contractible, d: i64, rhs: &ChainMap, through: i64) -> Result<ChainMap> {
    let bottom = solve_bottom(src, tgt, d, rhs)?
        .ok_or_else(|| Error::HomotopySearchFailed("no bottom cochain for the homotopy".into()))?;
    lift(src, tgt, d, Some(rhs), Some(&bottom), through)
}

/// Every bottom generator goes to η(1).
fn unit_bottom(src: &ChainComplex) -> Vec<Vec<Scalar>> {
    vec![vec![Scalar::ONE]; src.rank(src.lo())]
}

/// ψ = [[Δ₁, H₁], [Δ₂, H₂], [0, Δ]] with H₂ = TH₁ + H′α + (id×α)HΔ, the cup-1
/// homotopy H entering through its defect Δ − TΔ.
pub fn build_psi(ring: &Cohomology, s: &PolarizedSphere, dbl: &Doubled) -> Result<PsiData> {
    let res = s.res.clone();
    let p: Arc<dyn Contractible> = res.clone();
    let q: Arc<dyn Contractible> = s.q_contraction.clone();
    let qpc = TensorContraction::new(dbl.qp.clone(), q.clone(), p.clone())?;
    let pqc = TensorContraction::new(dbl.pq.clone(), p.clone(), q.clone())?;
    let top = s.p.hi() - 1;
    let (_, delta) = ring.diagonal()?;
    let delta = delta.clone();

    let qtop = top + s.n as i64 - 1;
    let delta1 = lift(&s.q, &qpc, 0, None, Some(&unit_bottom(&s.q)), qtop)?;
    let delta2 = lift(&s.q, &pqc, 0, None, Some(&unit_bottom(&s.q)), qtop)?;
    let rhs1 = delta1.compose(&s.alpha)?.sub(&dbl.alpha_id.compose(&delta)?)?;
    let h1 = lift_with_bottom(&s.p, &qpc, 0, &rhs1, top.min(rhs1.hi()))?;

    let t_qp = dbl.qp.transposition(&dbl.pq)?;
    let rhs_p = delta2.sub(&t_qp.compose(&delta1)?)?;
    let h_prime = lift(&s.q, &pqc, 1, Some(&rhs_p), None, (qtop - 1).min(rhs_p.hi()))?;
    let cup1 = steenrod::cup1_homotopy(ring)?.clone();
    let h2 = t_qp
        .compose(&h1)?
        .add(&h_prime.compose(&s.alpha)?)?
        .add(&dbl.id_alpha.compose(&cup1)?)?;
    let hi = h1.hi().min(h2.hi());
    let psi = ChainMap::from_blocks(
        &s.total,
        &dbl.total,
        0,
        &[
            (0, 0, &delta1.restrict(hi + s.n as i64 - 1)),
            (0, 1, &h1.restrict(hi)),
            (1, 0, &delta2.restrict(hi + s.n as i64 - 1)),
            (1, 1, &h2.restrict(hi)),
            (2, 1, &delta.restrict(hi)),
        ],
    )?;
    Ok(PsiData { delta, delta1, delta2, h1, h2, cup1, h_prime, psi })
}

/// Maps out of P(ζ⊕ζ) and the Q⊗Q corner used by the obstruction.
struct Corner {
    qq: Arc<TensorComplex>,
    qqc: TensorContraction,
    id_alpha_q: ChainMap,
    alpha_id_q: ChainMap,
    eta: ChainMap,
}

fn corner(s: &PolarizedSphere, dbl: &Doubled) -> Result<Corner> {
    let q: Arc<dyn Contractible> = s.q_contraction.clone();
    let qq = Arc::new(TensorComplex::new(s.q.clone(), s.q.clone())?);
    let qqc = TensorContraction::new(qq.clone(), q.clone(), q)?;
    let id_q = ChainMap::identity(&s.q);
    let id_alpha_q = dbl.qp.cross(&qq, &id_q, &s.alpha)?;
    let alpha_id_q = dbl.pq.cross(&qq, &s.alpha, &id_q)?;
    let qq_block = BlockComplex { complex: qq.complex.clone(), parts: vec![qq.complex.shape().clone()] };
    let eta = ChainMap::from_blocks(&dbl.total, &qq_block, -1, &[(0, 0, &id_alpha_q), (0, 1, &alpha_id_q)])?;
    Ok(Corner { qq, qqc, id_alpha_q, alpha_id_q, eta })
}

/// The reduction of (ε⊗ε)ηψ to a cocycle on P_{2n−1}.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// Values of φ = (ε⊗ε)ηψ on generators of P(ζ)_{2n−1}.
    pub phi: Vec<Scalar>,
    /// G on Q_{2n−2} with G∘∂_Q = φ₁.
    pub g: Vec<Scalar>,
    /// φ₂′ = φ₂ − G∘α as a class in H^{2n−1}.
    pub reduced: CohClass,
    pub factor: Factorization,
}

#[derive(Clone, Debug)]
pub struct Obstruction {
    pub vanishes: bool,
    /// Bottom cochain of a null-homotopy of ηψ when one exists.
    pub null_bottom: Option<Vec<Vec<Scalar>>>,
    pub reduction: Option<Reduction>,
    /// φ₂′ modulo (ζ).
    pub residue: Option<CohClass>,
    /// Sq̃^{n−1}ζ modulo (ζ), in characteristic 2.
    pub sq_residue: Option<CohClass>,
    /// u with φ₂′ ≃ uα, when the factorization exists.
    pub multiplier: Option<CohClass>,
}

/// Everything needed for the obstruction and the lift, built once per ζ.
pub struct Postnikov {
    pub sphere: PolarizedSphere,
    pub doubled: Doubled,
    pub psi: PsiData,
    corner: Corner,
}

impl Postnikov {
    pub fn new(ring: &Cohomology, z: &CohClass) -> Result<Postnikov> {
        let need = 2 * z.degree as i64 + 1;
        if ring.resolution().hi() < need {
            return Err(underflow(need, ring.resolution().hi()));
        }
        let sphere = build_p_zeta(ring, z)?;
        let doubled = build_p_zeta_plus(ring, &sphere)?;
        let psi = build_psi(ring, &sphere, &doubled)?;
        let corner = corner(&sphere, &doubled)?;
        Ok(Postnikov { sphere, doubled, psi, corner })
    }

    fn eta_psi(&self) -> Result<ChainMap> {
        self.corner.eta.compose(&self.psi.psi)
    }

    pub fn obstruction(&self, ring: &Cohomology, z: &CohClass) -> Result<Obstruction> {
        let s = &self.sphere;
        let n = s.n as i64;
        let f = ring.field().clone();
        let b = s.complex();
        let ep = self.eta_psi()?;
        let null_bottom = solve_bottom(b, &self.corner.qqc, 0, &ep.scale(f.neg(Scalar::ONE)))?;
        let vanishes = null_bottom.is_some();

        let m = 2 * n - 1;
        let comp = ep.comp(m)?;
        let phi: Vec<Scalar> = comp.columns().iter().map(|c| self.corner.qqc.augment(c)[0]).collect();
        let rq = s.total.parts[0].rank(m);
        let delta_q = coboundary_matrix(&s.q, m)?;
        let reduction = match delta_q.solve(&phi[..rq])? {
            Some(g) => {
                let reduced = reduce_by_homotopy(&phi, &s.total, &g, &s.alpha, m)?;
                let mut cleared = vec![Scalar::ZERO; rq];
                cleared.extend_from_slice(&reduced);
                let factor = factor_decision(&cleared, &s.total, &s.q, &s.p, &s.alpha, m)?;
                let reduced = ring.from_cocycle(m as usize, &reduced)?;
                Some(Reduction { phi: phi.clone(), g, reduced, factor })
            }
            None => None,
        };
        let residue = reduction.as_ref().map(|r| ring.residue(&r.reduced, z)).transpose()?;
        let multiplier = match &reduction {
            Some(Reduction { factor: Factorization::Solvable { u, .. }, .. }) => Some(ring.from_cocycle(s.n - 1, u)?),
            _ => None,
        };
        let sq_residue = if f.characteristic() == 2 {
            let t = steenrod::sq_with(ring, z, &self.psi.cup1)?;
            Some(ring.residue(&t, z)?)
        } else {
            None
        };
        if let (Some(a), Some(b)) = (&residue, &sq_residue) {
            if a != b {
                return Err(Error::PreconditionViolated("block residue and (ζ⊗ζ)HΔ residue disagree".into()));
            }
        }
        Ok(Obstruction { vanishes, null_bottom, reduction, residue, sq_residue, multiplier })
    }

    /// P(ζ)⊗P(ζ) modelled on the blocks (Q⊗Q, Q⊗P, P⊗Q, P⊗P).
    fn square(&self) -> Result<BlockComplex> {
        let d = &self.doubled;
        let c = &self.corner;
        ChainComplex::triangular(
            &[&c.qq.complex, &d.qp.complex, &d.pq.complex, &d.pp.complex],
            &[(0, 1, &c.id_alpha_q), (0, 2, &c.alpha_id_q), (1, 3, &d.alpha_id), (2, 3, &d.id_alpha)],
        )
    }

    pub fn lift_comultiplication(&self, obstruction: &Obstruction) -> Result<Comultiplication> {
        let Some(bottom) = &obstruction.null_bottom else {
            return Err(Error::ObstructionNonzero);
        };
        let s = &self.sphere;
        let b = s.complex();
        let f = b.field().clone();
        let rhs = self.eta_psi()?.scale(f.neg(Scalar::ONE));
        let through = rhs.hi().min(self.psi.psi.hi());
        let k = lift(b, &self.corner.qqc, 0, Some(&rhs), Some(bottom), through)?;
        let square = self.square()?;
        let mut comps = Vec::new();
        for i in b.lo()..=through {
            let (ki, pi) = (k.comp(i)?, self.psi.psi.comp(i)?);
            let cols = ki.columns().iter().zip(pi.columns()).map(|(x, y)| [x.as_slice(), y.as_slice()].concat()).collect();
            let tr = square.complex.rank(i);
            comps.push(FreeMap::from_columns(b.group(), &f, crate::freemap::Target::Free(tr), cols));
        }
        let map = ChainMap::new(b, &square.complex, 0, comps)?;
        Ok(Comultiplication { map, square, null_homotopy: k })
    }

    /// Homotopies (id⊗ε)ψ̃ ≃ id and (ε⊗id)ψ̃ ≃ id through `through`.
    pub fn counit_homotopies(&self, c: &Comultiplication, through: i64) -> Result<(Option<ChainMap>, Option<ChainMap>)> {
        let s = &self.sphere;
        let d = &self.doubled;
        let eps_p: Vec<Scalar> = s.res.aug_values().iter().map(|v| v[0]).collect();
        // Right counit: Q⊗P → Q and P⊗P → P; left counit: P⊗Q → Q and P⊗P → P.
        let r_qp = d.qp.counit_right(Some(&eps_p))?;
        let r_pp = d.pp.counit_right(Some(&eps_p))?;
        let l_pq = d.pq.counit_left(Some(&eps_p))?;
        let l_pp = d.pp.counit_left(Some(&eps_p))?;
        let right = ChainMap::from_blocks(&c.square, &s.total, 0, &[(0, 1, &r_qp), (1, 3, &r_pp)])?;
        let left = ChainMap::from_blocks(&c.square, &s.total, 0, &[(0, 2, &l_pq), (1, 3, &l_pp)])?;
        let id = ChainMap::identity(s.complex());
        let mut out = Vec::new();
        for e in [right, left] {
            let comp = e.compose(&c.map)?;
            out.push(find_homotopy(&comp, &id, s.complex(), s.complex(), through)?);
        }
        let l = out.pop().unwrap();
        let r = out.pop().unwrap();
        Ok((r, l))
    }
}

pub struct Comultiplication {
    /// ψ̃: P(ζ) → P(ζ)⊗P(ζ) with blocks (Q⊗Q, Q⊗P, P⊗Q, P⊗P).
    pub map: ChainMap,
    pub square: BlockComplex,
    pub null_homotopy: ChainMap,
}

impl Comultiplication {
    /// π∘ψ̃, the part of ψ̃ outside the Q⊗Q corner.
    pub fn projected(&self, doubled: &Doubled, sphere: &PolarizedSphere) -> Result<ChainMap> {
        let b = sphere.complex();
        let mut comps = Vec::new();
        for i in b.lo()..=self.map.hi() {
            let m = self.map.comp(i)?;
            let off = self.square.offset(1, i);
            comps.push(m.select_dst(off..self.square.complex.rank(i)));
        }
        ChainMap::new(b, &doubled.total.complex, 0, comps)
    }
}

pub fn obstruction(ring: &Cohomology, z: &CohClass) -> Result<Obstruction> {
    Postnikov::new(ring, z)?.obstruction(ring, z)
}

pub fn lift_comultiplication(ring: &Cohomology, z: &CohClass) -> Result<(Postnikov, Comultiplication)> {
    let pk = Postnikov::new(ring, z)?;
    let ob = pk.obstruction(ring, z)?;
    let c = pk.lift_comultiplication(&ob)?;
    Ok((pk, c))
}

#[derive(Clone, Debug)]
pub struct ChoiceReport {
    pub first: Obstruction,
    pub second: Obstruction,
    pub verdicts_agree: bool,
    pub residues_agree: bool,
}

/// Recompute the obstruction from a resolution with a perturbed contraction,
/// which changes Δ, Δ₁, Δ₂, H, H′, H₁ and ζ̂ but not P.
pub fn choice_independence_check(ring: &Cohomology, z: &CohClass, seed: u64) -> Result<ChoiceReport> {
    let first = obstruction(ring, z)?;
    let other = Cohomology::new(Arc::new(ring.resolution().perturbed(seed)?))?;
    let z2 = other.from_coords(z.degree, &z.coords)?;
    let second = obstruction(&other, &z2)?;
    let verdicts_agree = first.vanishes == second.vanishes;
    let residues_agree = match (&first.residue, &second.residue) {
        (Some(a), Some(b)) => a.coords == b.coords,
        (None, None) => true,
        _ => false,
    };
    Ok(ChoiceReport { first, second, verdicts_agree, residues_agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::group::Group;
    use crate::parse::parse_class;

    fn klein(cap: usize) -> Cohomology {
        Cohomology::minimal(&Group::preset("C2xC2").unwrap(), &Field::gf2(), cap).unwrap()
    }

    #[test]
    fn sphere_homology() {
        let h = klein(4);
        let x = parse_class(&h, "x").unwrap();
        let s = build_p_zeta(&h, &x).unwrap();
        let dims = s.homology_dims().unwrap();
        assert_eq!(dims[0], 2);
        assert!(dims[1..].iter().all(|&d| d == 0));
        let z = parse_class(&h, "x^2+x*y+y^2").unwrap();
        let s = build_p_zeta(&h, &z).unwrap();
        let dims = s.homology_dims().unwrap();
        assert_eq!(&dims[..2], &[1, 1]);
        assert!(dims[2..].iter().all(|&d| d == 0));
        assert_eq!(extension_class(&h, &s).unwrap(), z);
        assert!(rotation_holds(&s).unwrap());
    }

    #[test]
    fn psi_is_a_chain_map() {
        let h = klein(4);
        let z = parse_class(&h, "x+y").unwrap();
        let pk = Postnikov::new(&h, &z).unwrap();
        assert!(pk.psi.psi.is_chain_map(pk.sphere.complex(), &pk.doubled.total.complex).unwrap());
        let ep = pk.eta_psi().unwrap();
        assert!(ep.is_chain_map(pk.sphere.complex(), &pk.corner.qq.complex).unwrap());
    }

    #[test]
    fn obstruction_examples() {
        let h = klein(5);
        let z = parse_class(&h, "x+y").unwrap();
        let ob = obstruction(&h, &z).unwrap();
        assert!(ob.vanishes);
        let z = parse_class(&h, "x^2+x*y+y^2").unwrap();
        let ob = obstruction(&h, &z).unwrap();
        assert!(!ob.vanishes);
        let want = h.residue(&parse_class(&h, "x^2*y+x*y^2").unwrap(), &z).unwrap();
        assert_eq!(ob.residue.unwrap(), want);
    }

    #[test]
    fn comultiplication_counits() {
        let h = klein(5);
        let z = parse_class(&h, "x+y").unwrap();
        let (pk, c) = lift_comultiplication(&h, &z).unwrap();
        assert!(c.map.is_chain_map(pk.sphere.complex(), &c.square.complex).unwrap());
        let (r, l) = pk.counit_homotopies(&c, 4).unwrap();
        assert!(r.is_some() && l.is_some());
    }

    #[test]
    fn odd_prime_even_degree_vanishes() {
        let h = Cohomology::minimal(&Group::preset("C3").unwrap(), &Field::prime(3).unwrap(), 5).unwrap();
        for z in h.basis(2).unwrap() {
            let ob = obstruction(&h, &z).unwrap();
            assert!(ob.vanishes);
            assert!(ob.sq_residue.is_none());
        }
    }

    #[test]
    fn projection_recovers_psi() {
        let h = klein(5);
        let z = parse_class(&h, "x").unwrap();
        let (pk, c) = lift_comultiplication(&h, &z).unwrap();
        let pr = c.projected(&pk.doubled, &pk.sphere).unwrap();
        for i in pr.lo()..=pr.hi() {
            assert_eq!(pr.comp(i).unwrap(), pk.psi.psi.comp(i).unwrap());
        }
    }

    #[test]
    fn nonzero_obstruction_refuses_lift() {
        let h = klein(5);
        let z = parse_class(&h, "x^2+x*y+y^2").unwrap();
        assert!(matches!(lift_comultiplication(&h, &z), Err(Error::ObstructionNonzero)));
    }

    #[test]
    fn agrees_with_steenrod_criterion() {
        let h = klein(5);
        for expr in ["x", "y", "x+y", "x^2", "x*y", "x^2+x*y", "x^2+x*y+y^2"] {
            let z = parse_class(&h, expr).unwrap();
            let ob = obstruction(&h, &z).unwrap();
            let v = steenrod::is_productive(&h, &z, 4).unwrap();
            assert_eq!(ob.vanishes, v.is_yes(), "{expr}");
            assert_eq!(ob.vanishes, matches!(ob.reduction.as_ref().unwrap().factor, Factorization::Solvable { .. }));
        }
    }

    #[test]
    fn choices_do_not_matter() {
        let h = klein(5);
        for expr in ["x+y", "x^2+x*y+y^2"] {
            let z = parse_class(&h, expr).unwrap();
            let r = choice_independence_check(&h, &z, 7).unwrap();
            assert!(r.verdicts_agree && r.residues_agree, "{expr}");
        }
    }
}
