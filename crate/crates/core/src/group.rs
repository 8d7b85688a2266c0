//! Finite groups given by multiplication tables, the group algebra kG and
//! finite-dimensional kG-modules given by action matrices.
//!
//! Preset element orderings (identity is always index 0):
//!
//! | preset | index i stands for |
//! |---|---|
//! | `Cn` (n = 2, 3, 4, 8) | t^i |
//! | `C2xC2` | a^(i&1) b^(i>>1), product is XOR |
//! | `C2xC2xC2` | bits of i are the three coordinates, product is XOR |
//! | `C3xC3` | a^(i%3) b^(i/3) |
//! | `Q8` | 1, -1, i, -i, j, -j, k, -k |
//! | `D8` | r^i for i < 4, then s r^(i-4) |

use std::fmt;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::{KMatrix, Subspace};

pub const PRESETS: &[&str] = &["C2", "C3", "C4", "C8", "C2xC2", "C2xC2xC2", "C3xC3", "Q8", "D8"];

struct GroupInner {
    name: String,
    order: usize,
    table: Vec<usize>,
    inv: Vec<usize>,
}

#[derive(Clone)]
pub struct Group(Arc<GroupInner>);

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.order == other.0.order && self.0.table == other.0.table)
    }
}
impl Eq for Group {}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({}, order {})", self.0.name, self.0.order)
    }
}

#[derive(Deserialize)]
struct TableFile {
    order: usize,
    table: Vec<Vec<usize>>,
}

impl Group {
    pub fn from_table(name: &str, table: &[Vec<usize>]) -> Result<Group> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n) || table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::NotLatinSquare);
        }
        for r in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for c in 0..n {
                if std::mem::replace(&mut seen_row[table[r][c]], true)
                    || std::mem::replace(&mut seen_col[table[c][r]], true)
                {
                    return Err(Error::NotLatinSquare);
                }
            }
        }
        if (0..n).any(|g| table[0][g] != g || table[g][0] != g) {
            return Err(Error::NoIdentity);
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::NonAssociative);
                    }
                }
            }
        }
        let inv = (0..n).map(|g| (0..n).find(|&h| table[g][h] == 0).unwrap()).collect();
        Ok(Group(Arc::new(GroupInner {
            name: name.to_string(),
            order: n,
            table: table.iter().flatten().copied().collect(),
            inv,
        })))
    }

    /// Parse the JSON table format `{"order": n, "table": [[...]]}`.
    pub fn from_json(name: &str, text: &str) -> Result<Group> {
        let t: TableFile = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        if t.table.len() != t.order {
            return Err(Error::Input(format!("order {} but table has {} rows", t.order, t.table.len())));
        }
        Group::from_table(name, &t.table)
    }

    pub fn preset(name: &str) -> Result<Group> {
        let cyclic = |n: usize| -> Vec<Vec<usize>> { (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect() };
        let table: Vec<Vec<usize>> = match name {
            "C2" => cyclic(2),
            "C3" => cyclic(3),
            "C4" => cyclic(4),
            "C8" => cyclic(8),
            "C2xC2" => (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect(),
            "C2xC2xC2" => (0..8).map(|a| (0..8).map(|b| a ^ b).collect()).collect(),
            "C3xC3" => (0..9)
                .map(|a| (0..9).map(|b| (a % 3 + b % 3) % 3 + 3 * ((a / 3 + b / 3) % 3)).collect())
                .collect(),
            "Q8" => (0..8).map(|a| (0..8).map(|b| quaternion_mul(a, b)).collect()).collect(),
            "D8" => (0..8).map(|a| (0..8).map(|b| dihedral_mul(a, b)).collect()).collect(),
            _ => return Err(Error::UnknownPreset(name.to_string())),
        };
        Group::from_table(name, &table)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.0.order
    }
    pub fn name(&self) -> &str {
        &self.0.name
    }
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.0.table[a * self.0.order + b]
    }
    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.0.inv[a]
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        let orders: Vec<usize> = (0..self.order()).map(|g| self.element_order(g)).collect();
        orders.iter().fold(1, |acc, &o| lcm(acc, o))
    }

    pub fn is_p_group(&self, p: u32) -> bool {
        let mut n = self.order();
        while n % p as usize == 0 {
            n /= p as usize;
        }
        n == 1
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

// Index 2u + s: u in {1, i, j, k}, s = 1 for a minus sign.
fn quaternion_mul(a: usize, b: usize) -> usize {
    const UNIT: [[(usize, usize); 4]; 4] = [
        [(0, 0), (1, 0), (2, 0), (3, 0)],
        [(1, 0), (0, 1), (3, 0), (2, 1)],
        [(2, 0), (3, 1), (0, 1), (1, 0)],
        [(3, 0), (2, 0), (1, 1), (0, 1)],
    ];
    let (u, v) = UNIT[a / 2][b / 2];
    2 * u + ((a % 2) ^ (b % 2) ^ v)
}

fn dihedral_mul(a: usize, b: usize) -> usize {
    let (sa, ra) = (a / 4, a % 4);
    let (sb, rb) = (b / 4, b % 4);
    match (sa, sb) {
        (0, 0) => (ra + rb) % 4,
        (0, 1) => 4 + (rb + 4 - ra) % 4,
        (1, 0) => 4 + (ra + rb) % 4,
        _ => (rb + 4 - ra) % 4,
    }
}

/// An element of kG as a coefficient vector indexed by group elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElem {
    pub group: Group,
    pub field: Field,
    pub coeffs: Vec<Scalar>,
}

impl AlgebraElem {
    pub fn zero(group: &Group, field: &Field) -> AlgebraElem {
        AlgebraElem { group: group.clone(), field: field.clone(), coeffs: vec![Scalar::ZERO; group.order()] }
    }

    pub fn basis(group: &Group, field: &Field, g: usize) -> AlgebraElem {
        let mut e = AlgebraElem::zero(group, field);
        e.coeffs[g] = Scalar::ONE;
        e
    }

    pub fn from_ints(group: &Group, field: &Field, c: &[i64]) -> AlgebraElem {
        assert_eq!(c.len(), group.order());
        AlgebraElem { group: group.clone(), field: field.clone(), coeffs: c.iter().map(|&x| field.from_int(x)).collect() }
    }

    pub fn add(&self, other: &AlgebraElem) -> Result<AlgebraElem> {
        if self.group != other.group || self.field != other.field {
            return Err(Error::Mismatch);
        }
        let f = &self.field;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(AlgebraElem { group: self.group.clone(), field: f.clone(), coeffs })
    }

    /// Convolution product: (ab)(g) = sum over hh' = g of a(h) b(h').
    pub fn mul(&self, other: &AlgebraElem) -> Result<AlgebraElem> {
        if self.group != other.group || self.field != other.field {
            return Err(Error::Mismatch);
        }
        let (f, g) = (&self.field, &self.group);
        let mut out = AlgebraElem::zero(g, f);
        for (h, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (h2, &b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    let i = g.mul(h, h2);
                    out.coeffs[i] = f.add(out.coeffs[i], f.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Matrix of left multiplication by this element on kG.
    pub fn regular_matrix(&self) -> KMatrix {
        let (f, g) = (&self.field, &self.group);
        let n = g.order();
        let mut m = KMatrix::zeros(f, n, n);
        for (h, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for x in 0..n {
                let r = g.mul(h, x);
                m.set(r, x, f.add(m.get(r, x), a));
            }
        }
        m
    }
}

/// A finite-dimensional kG-module: one matrix per group element, acting on columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepModule {
    group: Group,
    field: Field,
    dim: usize,
    actions: Arc<Vec<KMatrix>>,
    trivial: bool,
}

impl RepModule {
    pub fn new(group: &Group, field: &Field, actions: Vec<KMatrix>) -> Result<RepModule> {
        if actions.len() != group.order() {
            return Err(Error::DimensionMismatch("one action matrix per group element".into()));
        }
        let dim = actions[0].rows();
        if actions.iter().any(|a| a.rows() != dim || a.cols() != dim) {
            return Err(Error::DimensionMismatch("action matrices must be square".into()));
        }
        if actions[0] != KMatrix::identity(field, dim) {
            return Err(Error::PreconditionViolated("identity must act trivially".into()));
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                if actions[g].mul(&actions[h])? != actions[group.mul(g, h)] {
                    return Err(Error::PreconditionViolated("action is not a homomorphism".into()));
                }
            }
        }
        let trivial = actions.iter().all(|a| *a == actions[0]);
        Ok(RepModule { group: group.clone(), field: field.clone(), dim, actions: Arc::new(actions), trivial })
    }

    pub fn trivial(group: &Group, field: &Field, dim: usize) -> RepModule {
        let id = KMatrix::identity(field, dim);
        RepModule {
            group: group.clone(),
            field: field.clone(),
            dim,
            actions: Arc::new(vec![id; group.order()]),
            trivial: true,
        }
    }

    /// kG^r with basis h·e_a at index a|G| + h.
    pub fn free(group: &Group, field: &Field, rank: usize) -> RepModule {
        let n = group.order();
        let actions = (0..n)
            .map(|g| {
                let mut m = KMatrix::zeros(field, rank * n, rank * n);
                for a in 0..rank {
                    for h in 0..n {
                        m.set(a * n + group.mul(g, h), a * n + h, Scalar::ONE);
                    }
                }
                m
            })
            .collect();
        RepModule { group: group.clone(), field: field.clone(), dim: rank * n, actions: Arc::new(actions), trivial: n == 1 }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }
    pub fn action(&self, g: usize) -> &KMatrix {
        &self.actions[g]
    }

    /// out += c · ρ(g) v
    pub fn act_acc(&self, g: usize, v: &[Scalar], c: Scalar, out: &mut [Scalar]) {
        let f = &self.field;
        if self.trivial {
            for (o, &x) in out.iter_mut().zip(v) {
                if !x.is_zero() {
                    *o = f.add(*o, f.mul(c, x));
                }
            }
            return;
        }
        let m = &self.actions[g];
        for (j, &x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let cx = f.mul(c, x);
            for (i, o) in out.iter_mut().enumerate() {
                let a = m.get(i, j);
                if !a.is_zero() {
                    *o = f.add(*o, f.mul(a, cx));
                }
            }
        }
    }

    /// span{(g − 1)v}: the radical when G is a p-group in characteristic p.
    pub fn radical(&self, vectors: &[Vec<Scalar>]) -> Subspace {
        let f = &self.field;
        let mut rows = Vec::new();
        for v in vectors {
            for g in 1..self.group.order() {
                let mut w = self.actions[g].mul_vec(v).expect("dimension");
                for (x, &y) in w.iter_mut().zip(v) {
                    *x = f.sub(*x, y);
                }
                rows.push(w);
            }
        }
        Subspace::from_vectors(f, self.dim, &rows)
    }

    /// The submodule spanned by a G-stable subspace, with its basis as rows.
    pub fn restrict(&self, sub: &Subspace) -> Result<RepModule> {
        let b = sub.basis();
        let d = sub.dim();
        let mut actions = Vec::with_capacity(self.group.order());
        for g in 0..self.group.order() {
            let mut m = KMatrix::zeros(&self.field, d, d);
            for i in 0..d {
                let w = self.actions[g].mul_vec(b.row(i))?;
                let c = sub.coordinates(&w).ok_or(Error::NotGStable)?;
                m.set_column(i, &c);
            }
            actions.push(m);
        }
        Ok(RepModule { group: self.group.clone(), field: self.field.clone(), dim: d, trivial: actions.iter().all(|a| *a == actions[0]), actions: Arc::new(actions) })
    }

    /// Quotient by a G-stable subspace. Basis of the quotient: unit vectors at
    /// the non-pivot columns of the subspace.
    pub fn quotient(&self, sub: &Subspace) -> Result<(RepModule, Vec<usize>)> {
        let mut is_pivot = vec![false; self.dim];
        for &p in sub.pivots() {
            is_pivot[p] = true;
        }
        let keep: Vec<usize> = (0..self.dim).filter(|&i| !is_pivot[i]).collect();
        let mut actions = Vec::with_capacity(self.group.order());
        for g in 0..self.group.order() {
            let mut m = KMatrix::zeros(&self.field, keep.len(), keep.len());
            for (j, &c) in keep.iter().enumerate() {
                let w = sub.reduce(&self.actions[g].column(c));
                for (i, &r) in keep.iter().enumerate() {
                    m.set(i, j, w[r]);
                }
            }
            actions.push(m);
        }
        for g in 0..self.group.order() {
            for v in sub.basis().to_rows() {
                if !sub.contains(&self.actions[g].mul_vec(&v)?) {
                    return Err(Error::NotGStable);
                }
            }
        }
        let trivial = actions.iter().all(|a| *a == actions[0]);
        Ok((RepModule { group: self.group.clone(), field: self.field.clone(), dim: keep.len(), actions: Arc::new(actions), trivial }, keep))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_groups() {
        for name in PRESETS {
            let g = Group::preset(name).unwrap();
            assert_eq!(g.mul(0, 3 % g.order()), 3 % g.order());
        }
        let v = Group::preset("C2xC2").unwrap();
        assert_eq!((v.order(), v.exponent()), (4, 2));
        let q = Group::preset("Q8").unwrap();
        let involutions: Vec<usize> = (0..8).filter(|&g| q.element_order(g) == 2).collect();
        assert_eq!(involutions, vec![1]);
        assert_eq!(q.mul(2, 4), 6); // ij = k
        let d = Group::preset("D8").unwrap();
        assert_eq!(d.mul(4, 1), 5);
        assert_eq!(d.mul(1, 4), 7); // r s = s r^-1
        assert_eq!(Group::preset("C4").unwrap().exponent(), 4);
        assert!(matches!(Group::preset("S3"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn table_validation() {
        assert_eq!(Group::from_table("1", &[vec![0]]).unwrap().order(), 1);
        assert_eq!(Group::from_table("bad", &[vec![0, 1], vec![1, 1]]), Err(Error::NotLatinSquare));
        assert_eq!(Group::from_table("bad", &[vec![1, 0], vec![0, 1]]), Err(Error::NoIdentity));
        let g = Group::from_json("C2", r#"{"order": 2, "table": [[0,1],[1,0]]}"#).unwrap();
        assert_eq!(g.order(), 2);
    }

    #[test]
    fn nonassociative_rejected() {
        // A Latin square with identity 0 that is not a group (order 5 loop).
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert_eq!(Group::from_table("loop", &t), Err(Error::NonAssociative));
    }

    #[test]
    fn algebra_products() {
        let g = Group::preset("C2").unwrap();
        let f = Field::gf2();
        let one_t = AlgebraElem::from_ints(&g, &f, &[1, 1]);
        assert!(one_t.mul(&one_t).unwrap().is_zero());
        let t = AlgebraElem::basis(&g, &f, 1);
        assert_eq!(t.mul(&t).unwrap(), AlgebraElem::basis(&g, &f, 0));
        assert_eq!(AlgebraElem::basis(&g, &f, 0).mul(&one_t).unwrap(), one_t);
        let all_ones = KMatrix::from_ints(&f, &[&[1, 1], &[1, 1]]);
        assert_eq!(one_t.regular_matrix(), all_ones);
    }

    #[test]
    fn free_module_is_a_module() {
        let g = Group::preset("Q8").unwrap();
        let f = Field::gf4();
        let m = RepModule::free(&g, &f, 2);
        let again = RepModule::new(&g, &f, (0..8).map(|x| m.action(x).clone()).collect()).unwrap();
        assert_eq!(again.dim(), 16);
    }
}
