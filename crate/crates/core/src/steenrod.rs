//! The cup-1 homotopy, the top-minus-one Steenrod square, triple Massey
//! products and the productive/semi-productive criteria.

use serde::Serialize;

use crate::cohomology::{CohClass, Cohomology};
use crate::complex::ChainMap;
use crate::contract::{lift, solve_bottom, TensorContraction};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::lzeta;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Yes,
    No,
    YesUpToDegree(usize),
    Undetermined(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// u with uζ equal to the target class.
    Multiplier(CohClass),
    /// A class that is not a multiple of ζ, reduced modulo (ζ).
    Residue(CohClass),
    /// v ∈ Ann(ζ) with v·Sq̃ζ ∉ (ζ), and the residue of that product.
    Failing { v: CohClass, residue: CohClass },
    /// A cocycle on P(L_ζ) in the given Ext degree whose ζ-translate is nonzero.
    Oracle { degree: usize, cocycle: Vec<Scalar> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self.status, Status::Yes | Status::YesUpToDegree(_))
    }
}

fn need_char2(ring: &Cohomology) -> Result<()> {
    let p = ring.field().characteristic();
    if p != 2 {
        return Err(Error::WrongCharacteristic(p));
    }
    Ok(())
}

/// H: P → P⊗P of degree 1 with ∂H + H∂ = Δ − TΔ, through source degree `through`.
pub fn cup1_homotopy_through(ring: &Cohomology, through: i64) -> Result<ChainMap> {
    let res = ring.resolution().clone();
    let (t, d) = ring.diagonal()?;
    let tr = t.transposition(t)?;
    let rhs = d.sub(&tr.compose(d)?)?;
    let tc = TensorContraction::new(t.clone(), res.clone(), res.clone())?;
    let through = through.min(rhs.hi()).min(t.hi() - 1);
    lift(res.complex(), &tc, 1, Some(&rhs), None, through)
}

/// The cached cup-1 homotopy through the top of the window.
pub fn cup1_homotopy(ring: &Cohomology) -> Result<&ChainMap> {
    if ring.cup1.get().is_none() {
        let h = cup1_homotopy_through(ring, i64::MAX)?;
        let _ = ring.cup1.set(h);
    }
    Ok(ring.cup1.get().unwrap())
}

/// Sq̃^{n−1}ζ: the class of e ↦ (ζ⊗ζ)(H e) on P_{2n−1}.
pub fn sq(ring: &Cohomology, z: &CohClass) -> Result<CohClass> {
    need_char2(ring)?;
    if z.degree == 0 {
        return Err(Error::PreconditionViolated("Sq̃^{n−1} needs n ≥ 1".into()));
    }
    sq_with(ring, z, cup1_homotopy(ring)?)
}

pub fn sq_with(ring: &Cohomology, z: &CohClass, h: &ChainMap) -> Result<CohClass> {
    let n = z.degree as i64;
    let (t, _) = ring.diagonal()?;
    let comp = h.comp(2 * n - 1)?;
    let values: Vec<Scalar> =
        comp.columns().iter().map(|c| t.eval_cross_cochain(2 * n, n, &z.cocycle, &z.cocycle, c)).collect();
    ring.from_cocycle(2 * n as usize - 1, &values)
}

/// X with D(X) = û∘v̂ (degree 1 − r − s); None when uv ≠ 0.
fn null_homotopy(ring: &Cohomology, u_hat: &ChainMap, v_hat: &ChainMap) -> Result<Option<ChainMap>> {
    let res = ring.resolution();
    let p = res.complex();
    let prod = u_hat.compose(v_hat)?;
    let d = prod.degree() + 1;
    let through = prod.hi().min(p.hi() - d.max(0));
    let Some(bottom) = solve_bottom(p, res.as_ref(), d, &prod)? else {
        return Ok(None);
    };
    Ok(Some(lift(p, res.as_ref(), d, Some(&prod), Some(&bottom), through)?))
}

#[derive(Clone, Debug)]
pub struct Massey {
    pub representative: CohClass,
    pub indeterminacy: Vec<CohClass>,
}

/// ⟨u, v, w⟩ = class of Hŵ − (−1)^r ûK with D(H) = ûv̂ and D(K) = v̂ŵ.
pub fn massey_triple(ring: &Cohomology, u: &CohClass, v: &CohClass, w: &CohClass) -> Result<Massey> {
    let (r, s, t) = (u.degree, v.degree, w.degree);
    let top = r + s + t - 1;
    if top > ring.cap() {
        return Err(crate::error::Error::TruncationUnderflow { needed: top as i64 + 1, bound: ring.cap() as i64 + 1 });
    }
    let u_hat = ring.chain_rep(u)?;
    let v_hat = ring.chain_rep(v)?;
    let w_hat = ring.chain_rep(w)?;
    let h = null_homotopy(ring, &u_hat, &v_hat)?.ok_or_else(|| Error::ProductsNonzero("uv ≠ 0".into()))?;
    let k = null_homotopy(ring, &v_hat, &w_hat)?.ok_or_else(|| Error::ProductsNonzero("vw ≠ 0".into()))?;
    let f = ring.field();
    let x = h.compose(&w_hat)?.lin(f.neg(f.sign(r as i64)), &u_hat.compose(&k)?)?;
    let representative = ring.class_of_map(&x)?;
    let mut span = ring.multiples(u, s + t - 1)?;
    span = span.sum(&ring.multiples(w, r + s - 1)?);
    let indeterminacy = span.basis().to_rows().iter().map(|c| ring.from_coords(top, c)).collect::<Result<_>>()?;
    Ok(Massey { representative, indeterminacy })
}

/// μ(v): the residue of ⟨ζ, v, ζ⟩ modulo (ζ).
pub fn massey_mu(ring: &Cohomology, z: &CohClass, v: &CohClass) -> Result<CohClass> {
    if !ring.cup(v, z)?.is_zero() {
        return Err(Error::PreconditionViolated("vζ ≠ 0".into()));
    }
    let m = massey_triple(ring, z, v, z)?;
    ring.residue(&m.representative, z)
}

/// The residue of v·Sq̃^{n−1}ζ modulo (ζ).
pub fn hirsch_residue(ring: &Cohomology, z: &CohClass, v: &CohClass) -> Result<CohClass> {
    let t = sq(ring, z)?;
    ring.residue(&ring.cup(v, &t)?, z)
}

/// Productivity via the Steenrod criterion (p = 2), the even-degree theorem
/// (p odd, n even), or the bounded Ext oracle (p odd, n odd).
pub fn is_productive(ring: &Cohomology, z: &CohClass, cap: usize) -> Result<Verdict> {
    if z.is_zero() {
        return Err(Error::ZeroClass);
    }
    if z.degree == 0 {
        return Err(Error::PreconditionViolated("degree must be at least 1".into()));
    }
    let p = ring.field().characteristic();
    if p == 2 {
        let t = sq(ring, z)?;
        return Ok(match ring.ideal_member(&t, z)? {
            Some(u) => Verdict { status: Status::Yes, witness: Some(Witness::Multiplier(u)) },
            None => Verdict { status: Status::No, witness: Some(Witness::Residue(ring.residue(&t, z)?)) },
        });
    }
    if z.degree % 2 == 0 {
        return Ok(Verdict { status: Status::Yes, witness: None });
    }
    lzeta::oracle_productive(ring, z, cap)
}

/// Scale so the last nonzero coordinate is 1.
fn normalize(ring: &Cohomology, v: &CohClass) -> Result<CohClass> {
    match v.coords.iter().rev().find(|c| !c.is_zero()) {
        Some(&c) => ring.scale(ring.field().inv(c), v),
        None => Ok(v.clone()),
    }
}

/// Semi-productivity: every v ∈ Ann^d(ζ), d ≤ cap, has v·Sq̃^{n−1}ζ ∈ (ζ).
pub fn is_semiproductive(ring: &Cohomology, z: &CohClass, cap: usize) -> Result<Verdict> {
    need_char2(ring)?;
    if z.is_zero() {
        return Err(Error::ZeroClass);
    }
    let t = sq(ring, z)?;
    for d in 0..=cap {
        for v in ring.annihilator_basis(z, d)? {
            let vt = ring.cup(&v, &t)?;
            if ring.ideal_member(&vt, z)?.is_none() {
                let v = normalize(ring, &v)?;
                let residue = ring.residue(&ring.cup(&v, &t)?, z)?;
                return Ok(Verdict { status: Status::No, witness: Some(Witness::Failing { v, residue }) });
            }
        }
    }
    Ok(Verdict { status: Status::YesUpToDegree(cap), witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::group::Group;
    use crate::parse::parse_class;

    #[test]
    fn cup1_defect() {
        let h = Cohomology::minimal(&Group::preset("C2xC2").unwrap(), &Field::gf2(), 5).unwrap();
        let c = cup1_homotopy(&h).unwrap();
        let (t, d) = h.diagonal().unwrap();
        let rhs = d.sub(&t.transposition(t).unwrap().compose(d).unwrap()).unwrap();
        let p = h.resolution().complex();
        let defect = c.defect(p, &t.complex).unwrap();
        for (k, m) in defect.iter().enumerate() {
            assert_eq!(*m, rhs.comp(k as i64).unwrap());
        }
    }

    #[test]
    fn sq_zero_is_identity_on_rational_classes() {
        let h = Cohomology::minimal(&Group::preset("C2xC2").unwrap(), &Field::gf2(), 3).unwrap();
        for x in h.basis(1).unwrap() {
            assert_eq!(sq(&h, &x).unwrap(), x);
        }
        let z = parse_class(&h, "x^2+x*y+y^2").unwrap();
        assert_eq!(sq(&h, &z).unwrap(), parse_class(&h, "x^2*y+x*y^2").unwrap());
    }

    #[test]
    fn wrong_characteristic() {
        let h = Cohomology::minimal(&Group::preset("C3").unwrap(), &Field::prime(3).unwrap(), 3).unwrap();
        let x = h.basis(1).unwrap().remove(0);
        assert!(matches!(sq(&h, &x), Err(Error::WrongCharacteristic(3))));
    }
}
