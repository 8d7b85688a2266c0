//! The cohomology ring H*(G, k) through a degree cap.
//!
//! Cochains in degree n are values on the free generators of P_n, so
//! Hom_kG(P_n, k) = k^{rank n}. The canonical basis of Hⁿ is the rref basis of
//! the cocycles reduced modulo the coboundaries; coordinates of a class are
//! read off at the pivots.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::complex::{coboundary_matrix, eval_cochain, ChainMap};
use crate::contract::lift;
use crate::error::{underflow, Error, Result};
use crate::field::{Field, Scalar};
use crate::group::Group;
use crate::matrix::{KMatrix, Subspace};
use crate::resolution::Resolution;
use crate::tensor::TensorComplex;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohClass {
    pub degree: usize,
    pub coords: Vec<Scalar>,
    /// Canonical cocycle, as values on the generators of P_degree.
    pub cocycle: Vec<Scalar>,
}

impl CohClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassJson {
    pub degree: usize,
    pub coords: Vec<String>,
    pub expr: String,
}

#[derive(Debug)]
struct DegreeBasis {
    coboundaries: Subspace,
    reps: Subspace,
}

pub struct Cohomology {
    res: Arc<Resolution>,
    bases: Vec<DegreeBasis>,
    diagonal: OnceLock<(Arc<TensorComplex>, ChainMap)>,
    pub(crate) cup1: OnceLock<ChainMap>,
}

impl Cohomology {
    pub fn new(res: Arc<Resolution>) -> Result<Cohomology> {
        let p = res.complex().clone();
        let f = p.field().clone();
        let mut bases = Vec::new();
        for n in 0..p.hi() {
            let r = p.rank(n);
            let delta = coboundary_matrix(&p, n + 1)?;
            let z = delta.kernel_basis().to_rows();
            let b = if n == 0 {
                Subspace::zero(&f, r)
            } else {
                Subspace::from_vectors(&f, r, &coboundary_matrix(&p, n)?.transpose().to_rows())
            };
            let reduced: Vec<Vec<Scalar>> = z.iter().map(|v| b.reduce(v)).collect();
            let reps = Subspace::from_vectors(&f, r, &reduced);
            bases.push(DegreeBasis { coboundaries: b, reps });
        }
        Ok(Cohomology { res, bases, diagonal: OnceLock::new(), cup1: OnceLock::new() })
    }

    /// Cohomology computed from a fresh minimal resolution through `cap + 1`.
    pub fn minimal(group: &Group, field: &Field, cap: usize) -> Result<Cohomology> {
        Cohomology::new(Arc::new(Resolution::minimal(group, field, cap as i64 + 1)?))
    }

    pub fn resolution(&self) -> &Arc<Resolution> {
        &self.res
    }
    pub fn field(&self) -> &Field {
        self.res.field()
    }
    pub fn group(&self) -> &Group {
        self.res.group()
    }
    /// Highest degree with a basis.
    pub fn cap(&self) -> usize {
        self.bases.len() - 1
    }

    fn basis_of(&self, n: usize) -> Result<&DegreeBasis> {
        self.bases.get(n).ok_or_else(|| underflow(n as i64 + 1, self.res.hi()))
    }

    pub fn dim(&self, n: usize) -> Result<usize> {
        Ok(self.basis_of(n)?.reps.dim())
    }

    /// The canonical basis cocycles of Hⁿ.
    pub fn basis(&self, n: usize) -> Result<Vec<CohClass>> {
        let d = self.dim(n)?;
        (0..d)
            .map(|i| {
                let mut c = vec![Scalar::ZERO; d];
                c[i] = Scalar::ONE;
                self.from_coords(n, &c)
            })
            .collect()
    }

    pub fn from_coords(&self, n: usize, coords: &[Scalar]) -> Result<CohClass> {
        let b = self.basis_of(n)?;
        if coords.len() != b.reps.dim() {
            return Err(Error::DimensionMismatch(format!("H^{n} has dimension {}, got {} coordinates", b.reps.dim(), coords.len())));
        }
        let f = self.field();
        let mut cocycle = vec![Scalar::ZERO; b.reps.ambient()];
        for (k, &c) in coords.iter().enumerate() {
            if !c.is_zero() {
                for (o, &y) in cocycle.iter_mut().zip(b.reps.basis().row(k)) {
                    *o = f.add(*o, f.mul(c, y));
                }
            }
        }
        Ok(CohClass { degree: n, coords: coords.to_vec(), cocycle })
    }

    /// The class of a cocycle given by values on generators.
    pub fn from_cocycle(&self, n: usize, values: &[Scalar]) -> Result<CohClass> {
        if !self.is_cocycle(n, values)? {
            return Err(Error::PreconditionViolated(format!("not a cocycle in degree {n}")));
        }
        let b = self.basis_of(n)?;
        let red = b.coboundaries.reduce(values);
        let coords = b
            .reps
            .coordinates(&red)
            .ok_or_else(|| Error::PreconditionViolated("cocycle outside the computed span".into()))?;
        self.from_coords(n, &coords)
    }

    pub fn is_cocycle(&self, n: usize, values: &[Scalar]) -> Result<bool> {
        let p = self.res.complex();
        let delta = coboundary_matrix(p, n as i64 + 1)?;
        Ok(delta.mul_vec(values)?.iter().all(|x| x.is_zero()))
    }

    pub fn is_coboundary(&self, n: usize, values: &[Scalar]) -> Result<bool> {
        Ok(self.basis_of(n)?.coboundaries.contains(values))
    }

    pub fn zero(&self, n: usize) -> Result<CohClass> {
        self.from_coords(n, &vec![Scalar::ZERO; self.dim(n)?])
    }

    /// The unit [ε] in H⁰.
    pub fn one(&self) -> Result<CohClass> {
        self.from_cocycle(0, &self.res.aug_values().iter().map(|v| v[0]).collect::<Vec<_>>())
    }

    pub fn add(&self, a: &CohClass, b: &CohClass) -> Result<CohClass> {
        self.lin(a, Scalar::ONE, b)
    }

    /// a + c·b
    pub fn lin(&self, a: &CohClass, c: Scalar, b: &CohClass) -> Result<CohClass> {
        if a.degree != b.degree {
            return Err(Error::NonHomogeneous(a.degree, b.degree));
        }
        let f = self.field();
        let coords: Vec<Scalar> = a.coords.iter().zip(&b.coords).map(|(&x, &y)| f.add(x, f.mul(c, y))).collect();
        self.from_coords(a.degree, &coords)
    }

    pub fn scale(&self, c: Scalar, a: &CohClass) -> Result<CohClass> {
        let f = self.field();
        self.from_coords(a.degree, &a.coords.iter().map(|&x| f.mul(c, x)).collect::<Vec<_>>())
    }

    /// ζ̂: the degree −n self-map of P lifting the cocycle of ζ, valid through
    /// source degree `through`.
    pub fn chain_rep_through(&self, z: &CohClass, through: i64) -> Result<ChainMap> {
        let p = self.res.complex();
        let bottom: Vec<Vec<Scalar>> = z.cocycle.iter().map(|&c| vec![c]).collect();
        lift(p, self.res.as_ref(), -(z.degree as i64), None, Some(&bottom), through)
    }

    pub fn chain_rep(&self, z: &CohClass) -> Result<ChainMap> {
        self.chain_rep_through(z, self.res.hi())
    }

    /// Read the class of a degree −n chain map P → P as ε∘f_n.
    pub fn class_of_map(&self, f: &ChainMap) -> Result<CohClass> {
        let n = (-f.degree()) as usize;
        let comp = f.comp(n as i64)?;
        let eps = self.res.aug_values();
        let values: Vec<Scalar> = comp.columns().iter().map(|c| self.eval_on_p0(&eps, c)).collect();
        self.from_cocycle(n, &values)
    }

    fn eval_on_p0(&self, eps: &[Vec<Scalar>], v: &[Scalar]) -> Scalar {
        let e: Vec<Scalar> = eps.iter().map(|x| x[0]).collect();
        eval_cochain(&e, v, self.field(), self.group().order())
    }

    /// Values of the cocycle x∘ŷ on generators of P_{n+m}, given ŷ.
    pub fn compose_cocycle(&self, x: &CohClass, y_hat: &ChainMap) -> Result<Vec<Scalar>> {
        let m = (-y_hat.degree()) as usize;
        let comp = y_hat.comp((x.degree + m) as i64)?;
        let n = self.group().order();
        Ok(comp.columns().iter().map(|c| eval_cochain(&x.cocycle, c, self.field(), n)).collect())
    }

    /// xy, represented by x̂∘ŷ.
    pub fn cup(&self, x: &CohClass, y: &CohClass) -> Result<CohClass> {
        let top = x.degree + y.degree;
        self.basis_of(top)?;
        let y_hat = self.chain_rep_through(y, top as i64)?;
        self.from_cocycle(top, &self.compose_cocycle(x, &y_hat)?)
    }

    pub fn diagonal(&self) -> Result<&(Arc<TensorComplex>, ChainMap)> {
        if self.diagonal.get().is_none() {
            let d = self.res.diagonal()?;
            let _ = self.diagonal.set(d);
        }
        Ok(self.diagonal.get().unwrap())
    }

    /// xy via the pairing e ↦ (x⊗y)(Δe).
    pub fn cup_diagonal(&self, x: &CohClass, y: &CohClass) -> Result<CohClass> {
        let top = x.degree + y.degree;
        self.basis_of(top)?;
        let (t, d) = self.diagonal()?;
        let comp = d.comp(top as i64)?;
        let values: Vec<Scalar> = comp
            .columns()
            .iter()
            .map(|c| t.eval_cross_cochain(top as i64, x.degree as i64, &x.cocycle, &y.cocycle, c))
            .collect();
        self.from_cocycle(top, &values)
    }

    /// Matrix of v ↦ vζ from Hᵈ to H^{d+n}, columns indexed by the basis of Hᵈ.
    pub fn mult_matrix(&self, z: &CohClass, d: usize) -> Result<KMatrix> {
        let top = d + z.degree;
        let rows = self.dim(top)?;
        let basis = self.basis(d)?;
        let z_hat = self.chain_rep_through(z, top as i64)?;
        let mut cols = Vec::with_capacity(basis.len());
        for b in &basis {
            cols.push(self.from_cocycle(top, &self.compose_cocycle(b, &z_hat)?)?.coords);
        }
        Ok(KMatrix::from_columns(self.field(), rows, &cols))
    }

    /// u with uζ = t, if one exists.
    pub fn ideal_member(&self, t: &CohClass, z: &CohClass) -> Result<Option<CohClass>> {
        if t.degree < z.degree {
            return Err(Error::PreconditionViolated("target degree below the divisor".into()));
        }
        let d = t.degree - z.degree;
        let m = self.mult_matrix(z, d)?;
        match m.solve(&t.coords)? {
            Some(u) => Ok(Some(self.from_coords(d, &u)?)),
            None => Ok(None),
        }
    }

    /// Canonical representative of t modulo the ideal (ζ) in degree deg t.
    pub fn residue(&self, t: &CohClass, z: &CohClass) -> Result<CohClass> {
        if t.degree < z.degree {
            return Ok(t.clone());
        }
        let m = self.mult_matrix(z, t.degree - z.degree)?;
        let image = Subspace::from_vectors(self.field(), m.rows(), &m.transpose().to_rows());
        self.from_coords(t.degree, &image.reduce(&t.coords))
    }

    /// Span of the classes aζ for a ∈ Hᵈ, as a subspace of H^{d+n} coordinates.
    pub fn multiples(&self, z: &CohClass, d: usize) -> Result<Subspace> {
        let m = self.mult_matrix(z, d)?;
        Ok(Subspace::from_vectors(self.field(), m.rows(), &m.transpose().to_rows()))
    }

    /// Basis of {v ∈ Hᵈ : vζ = 0}.
    pub fn annihilator_basis(&self, z: &CohClass, d: usize) -> Result<Vec<CohClass>> {
        let m = self.mult_matrix(z, d)?;
        m.kernel_basis().to_rows().iter().map(|c| self.from_coords(d, c)).collect()
    }

    pub fn to_json(&self, c: &CohClass) -> ClassJson {
        let f = self.field();
        let expr = crate::parse::format_class(self, c).unwrap_or_default();
        ClassJson { degree: c.degree, coords: c.coords.iter().map(|&x| f.format_scalar(x)).collect(), expr }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(name: &str, field: Field, cap: usize) -> Cohomology {
        Cohomology::minimal(&Group::preset(name).unwrap(), &field, cap).unwrap()
    }

    #[test]
    fn dimensions() {
        let h = ring("C2xC2", Field::gf2(), 8);
        for n in 0..=8 {
            assert_eq!(h.dim(n).unwrap(), n + 1);
        }
        let q = ring("Q8", Field::gf2(), 7);
        let dims: Vec<usize> = (0..=7).map(|n| q.dim(n).unwrap()).collect();
        assert_eq!(dims, vec![1, 2, 2, 1, 1, 2, 2, 1]);
    }

    #[test]
    fn unit_and_round_trip() {
        let h = ring("C2xC2", Field::gf2(), 4);
        let one = h.one().unwrap();
        for n in 0..=3 {
            for b in h.basis(n).unwrap() {
                assert_eq!(h.cup(&one, &b).unwrap(), b);
                assert_eq!(h.cup(&b, &one).unwrap(), b);
                let rep = h.chain_rep(&b).unwrap();
                assert_eq!(h.class_of_map(&rep).unwrap(), b);
            }
        }
    }

    #[test]
    fn cup_products_agree() {
        for (name, f) in [("C2xC2", Field::gf2()), ("C4", Field::gf2()), ("C3", Field::prime(3).unwrap())] {
            let h = ring(name, f, 4);
            for n in 0..=2 {
                for m in 0..=2 {
                    for x in h.basis(n).unwrap() {
                        for y in h.basis(m).unwrap() {
                            assert_eq!(h.cup(&x, &y).unwrap(), h.cup_diagonal(&x, &y).unwrap(), "{name} {n} {m}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn polynomial_ring_in_degree_two() {
        let h = ring("C2xC2", Field::gf2(), 3);
        let b = h.basis(1).unwrap();
        let (x, y) = (&b[0], &b[1]);
        let prods = [h.cup(x, x).unwrap(), h.cup(x, y).unwrap(), h.cup(y, y).unwrap()];
        let m = KMatrix::from_rows(h.field(), &prods.iter().map(|p| p.coords.clone()).collect::<Vec<_>>()).unwrap();
        assert_eq!(m.rank(), 3);
        assert_eq!(h.cup(x, y).unwrap(), h.cup(y, x).unwrap());
    }
}
