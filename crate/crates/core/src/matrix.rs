//! Dense matrices over GF(p^m) and exact elimination.
//!
//! Storage is a row-major grid of [`Scalar`]s. Elimination converts to a
//! packed form first: GF(2) rows become bit vectors, GF(4) rows become two
//! bit planes, and prime fields use plain `u32` arithmetic. All three paths
//! pick the lowest-index nonzero row as pivot, column by column, so the
//! reduced form is canonical.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

#[derive(Clone, PartialEq, Eq)]
pub struct KMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for KMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "KMatrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows.min(16) {
            let row: Vec<String> = self.row(r).iter().map(|s| self.field.format_scalar(*s)).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl KMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> KMatrix {
        KMatrix { field: field.clone(), rows, cols, data: vec![Scalar::ZERO; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> KMatrix {
        let mut m = KMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Scalar::ONE);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<Scalar>]) -> Result<KMatrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(KMatrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Rows given as small integers reduced into the prime field.
    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> KMatrix {
        let rows: Vec<Vec<Scalar>> =
            rows.iter().map(|r| r.iter().map(|&x| field.from_int(x)).collect()).collect();
        KMatrix::from_rows(field, &rows).expect("rectangular")
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: &Field, rows: usize, cols: &[Vec<Scalar>]) -> KMatrix {
        let mut m = KMatrix::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x;
            }
        }
        m
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.data[r * self.cols + c]
    }
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }
    #[inline]
    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [Scalar] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[Scalar]) {
        assert_eq!(v.len(), self.rows);
        for (r, &x) in v.iter().enumerate() {
            self.set(r, c, x);
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| s.is_zero())
    }

    pub fn transpose(&self) -> KMatrix {
        let mut t = KMatrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    fn check_same_shape(&self, other: &KMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &KMatrix) -> Result<KMatrix> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(KMatrix { field: f.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &KMatrix) -> Result<KMatrix> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(KMatrix { field: f.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn add_assign(&mut self, other: &KMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field.clone();
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.add(*a, b);
        }
    }

    pub fn scale(&self, s: Scalar) -> KMatrix {
        let f = &self.field;
        KMatrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, s)).collect(),
        }
    }

    pub fn neg(&self) -> KMatrix {
        self.scale(self.field.neg(Scalar::ONE))
    }

    pub fn mul(&self, other: &KMatrix) -> Result<KMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = KMatrix::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = out.row_mut(r);
                for (d, &b) in dst.iter_mut().zip(orow) {
                    if !b.is_zero() {
                        *d = f.add(*d, f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = &self.field;
        let mut out = vec![Scalar::ZERO; self.rows];
        for (c, &x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                let a = self.data[r * self.cols + c];
                if !a.is_zero() {
                    *o = f.add(*o, f.mul(a, x));
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch("row vector length".into()));
        }
        let f = &self.field;
        let mut out = vec![Scalar::ZERO; self.cols];
        for (r, &x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(r)) {
                if !a.is_zero() {
                    *o = f.add(*o, f.mul(a, x));
                }
            }
        }
        Ok(out)
    }

    pub fn hstack(&self, other: &KMatrix) -> Result<KMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts".into()));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(KMatrix { field: self.field.clone(), rows: self.rows, cols, data })
    }

    pub fn vstack(&self, other: &KMatrix) -> Result<KMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(KMatrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn select_rows(&self, idx: &[usize]) -> KMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        KMatrix { field: self.field.clone(), rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> KMatrix {
        let mut m = KMatrix::zeros(&self.field, self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    /// Reduced row echelon form with the list of pivot columns.
    pub fn rref(&self) -> (KMatrix, Vec<usize>) {
        let mut e = Packed::from_matrix(self);
        let pivots = e.eliminate(self.cols);
        let mut r = e.into_matrix();
        r.truncate_rows(pivots.len().max(0));
        r.pad_rows(self.rows);
        (r, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut e = Packed::from_matrix(self);
        e.eliminate(self.cols).len()
    }

    fn truncate_rows(&mut self, n: usize) {
        self.rows = n.min(self.rows);
        self.data.truncate(self.rows * self.cols);
    }

    fn pad_rows(&mut self, n: usize) {
        if n > self.rows {
            self.data.resize(n * self.cols, Scalar::ZERO);
            self.rows = n;
        }
    }

    /// Rows of the reduced form that are nonzero: an rref basis of the row space.
    pub fn row_space(&self) -> Subspace {
        let mut e = Packed::from_matrix(self);
        let pivots = e.eliminate(self.cols);
        let mut m = e.into_matrix();
        m.truncate_rows(pivots.len());
        Subspace { basis: m, pivots }
    }

    /// Basis of the right null space `{v : M v = 0}` as rows, in rref.
    pub fn kernel_basis(&self) -> KMatrix {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut k = KMatrix::zeros(f, free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            k.set(i, fc, Scalar::ONE);
            for (row, &pc) in pivots.iter().enumerate() {
                let v = r.get(row, fc);
                if !v.is_zero() {
                    k.set(i, pc, f.neg(v));
                }
            }
        }
        // Free-variable construction is already reduced; normalize anyway.
        k.row_space().basis
    }

    /// Solve `A x = b`. Returns `None` when `b` is not in the image; otherwise
    /// the solution with zeros in every free-variable position.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let rhs = KMatrix::from_columns(&self.field, self.rows, &[b.to_vec()]);
        Ok(self.solve_many(&rhs)?.pop().unwrap())
    }

    /// Solve `A X = B` column by column with one elimination.
    pub fn solve_many(&self, b: &KMatrix) -> Result<Vec<Option<Vec<Scalar>>>> {
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch("solve_many row counts".into()));
        }
        let aug = self.hstack(b)?;
        let mut e = Packed::from_matrix(&aug);
        let pivots = e.eliminate(self.cols);
        let r = e.into_matrix();
        let mut out = Vec::with_capacity(b.cols);
        for j in 0..b.cols {
            let col = self.cols + j;
            let consistent = (pivots.len()..r.rows).all(|row| r.get(row, col).is_zero());
            if !consistent {
                out.push(None);
                continue;
            }
            let mut x = vec![Scalar::ZERO; self.cols];
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = r.get(row, col);
            }
            out.push(Some(x));
        }
        Ok(out)
    }
}

/// A subspace of `k^n` held as an rref basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    basis: KMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: &Field, n: usize) -> Subspace {
        Subspace { basis: KMatrix::zeros(field, 0, n), pivots: vec![] }
    }

    pub fn from_vectors(field: &Field, n: usize, vecs: &[Vec<Scalar>]) -> Subspace {
        if vecs.is_empty() {
            return Subspace::zero(field, n);
        }
        KMatrix::from_rows(field, vecs).expect("vectors of equal length").row_space()
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    pub fn basis(&self) -> &KMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `v` minus its projection on the pivot coordinates; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        coords_mod_subspace_unchecked(v, &self.basis, &self.pivots)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(|s| s.is_zero())
    }

    /// Coordinates of a vector in the span with respect to the rref basis.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p]).collect())
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        self.basis.vstack(&other.basis).expect("same ambient").row_space()
    }
}

fn coords_mod_subspace_unchecked(v: &[Scalar], s: &KMatrix, pivots: &[usize]) -> Vec<Scalar> {
    let f = s.field();
    let mut out = v.to_vec();
    for (row, &pc) in pivots.iter().enumerate() {
        let c = out[pc];
        if c.is_zero() {
            continue;
        }
        for (o, &b) in out.iter_mut().zip(s.row(row)) {
            if !b.is_zero() {
                *o = f.sub(*o, f.mul(c, b));
            }
        }
    }
    out
}

/// Reduce `v` modulo the span of the rows of `s`, which must be in rref.
pub fn coords_mod_subspace(v: &[Scalar], s: &KMatrix) -> Result<Vec<Scalar>> {
    if v.len() != s.cols() {
        return Err(Error::DimensionMismatch("vector vs subspace ambient".into()));
    }
    let mut pivots = Vec::new();
    for r in 0..s.rows() {
        match s.row(r).iter().position(|x| !x.is_zero()) {
            Some(p) if s.get(r, p) == Scalar::ONE => pivots.push(p),
            Some(_) => return Err(Error::PreconditionViolated("subspace rows not in rref".into())),
            None => {}
        }
    }
    let nz: Vec<usize> = (0..s.rows()).filter(|&r| s.row(r).iter().any(|x| !x.is_zero())).collect();
    let s = s.select_rows(&nz);
    Ok(coords_mod_subspace_unchecked(v, &s, &pivots))
}

/// Packed elimination workspace.
enum Packed {
    Gf2 { field: Field, rows: usize, cols: usize, words: usize, bits: Vec<u64> },
    Gf4 { field: Field, rows: usize, cols: usize, words: usize, lo: Vec<u64>, hi: Vec<u64> },
    Prime { field: Field, rows: usize, cols: usize, p: u32, data: Vec<u32> },
    Generic(KMatrix),
}

impl Packed {
    fn from_matrix(m: &KMatrix) -> Packed {
        let f = m.field();
        let (rows, cols) = (m.rows, m.cols);
        let words = cols.div_ceil(64).max(1);
        if f.size() == 2 {
            let mut bits = vec![0u64; rows * words];
            for r in 0..rows {
                for c in 0..cols {
                    if m.get(r, c).0 == 1 {
                        bits[r * words + c / 64] |= 1 << (c % 64);
                    }
                }
            }
            Packed::Gf2 { field: f.clone(), rows, cols, words, bits }
        } else if f.size() == 4 {
            let mut lo = vec![0u64; rows * words];
            let mut hi = vec![0u64; rows * words];
            for r in 0..rows {
                for c in 0..cols {
                    let v = m.get(r, c).0;
                    if v & 1 != 0 {
                        lo[r * words + c / 64] |= 1 << (c % 64);
                    }
                    if v & 2 != 0 {
                        hi[r * words + c / 64] |= 1 << (c % 64);
                    }
                }
            }
            Packed::Gf4 { field: f.clone(), rows, cols, words, lo, hi }
        } else if f.degree() == 1 {
            let data = m.data.iter().map(|s| s.0 as u32).collect();
            Packed::Prime { field: f.clone(), rows, cols, p: f.characteristic(), data }
        } else {
            Packed::Generic(m.clone())
        }
    }

    fn into_matrix(self) -> KMatrix {
        match self {
            Packed::Gf2 { field, rows, cols, words, bits } => {
                let mut m = KMatrix::zeros(&field, rows, cols);
                for r in 0..rows {
                    for c in 0..cols {
                        if bits[r * words + c / 64] >> (c % 64) & 1 == 1 {
                            m.set(r, c, Scalar::ONE);
                        }
                    }
                }
                m
            }
            Packed::Gf4 { field, rows, cols, words, lo, hi } => {
                let mut m = KMatrix::zeros(&field, rows, cols);
                for r in 0..rows {
                    for c in 0..cols {
                        let w = r * words + c / 64;
                        let b = (lo[w] >> (c % 64) & 1) | ((hi[w] >> (c % 64) & 1) << 1);
                        m.set(r, c, Scalar(b as u16));
                    }
                }
                m
            }
            Packed::Prime { field, rows, cols, data, .. } => KMatrix {
                field,
                rows,
                cols,
                data: data.into_iter().map(|x| Scalar(x as u16)).collect(),
            },
            Packed::Generic(m) => m,
        }
    }

    /// Reduce to rref, searching pivots among the first `limit` columns.
    fn eliminate(&mut self, limit: usize) -> Vec<usize> {
        match self {
            Packed::Gf2 { rows, words, bits, .. } => {
                let (rows, words) = (*rows, *words);
                let mut pivots = Vec::new();
                for c in 0..limit {
                    let rank = pivots.len();
                    if rank == rows {
                        break;
                    }
                    let (w, b) = (c / 64, 1u64 << (c % 64));
                    let Some(pr) = (rank..rows).find(|&r| bits[r * words + w] & b != 0) else {
                        continue;
                    };
                    if pr != rank {
                        for k in 0..words {
                            bits.swap(pr * words + k, rank * words + k);
                        }
                    }
                    let prow: Vec<u64> = bits[rank * words..(rank + 1) * words].to_vec();
                    for r in 0..rows {
                        if r != rank && bits[r * words + w] & b != 0 {
                            let row = &mut bits[r * words..(r + 1) * words];
                            for (x, y) in row.iter_mut().zip(&prow).skip(w) {
                                *x ^= y;
                            }
                        }
                    }
                    pivots.push(c);
                }
                pivots
            }
            Packed::Gf4 { rows, words, lo, hi, .. } => {
                let (rows, words) = (*rows, *words);
                let get = |lo: &[u64], hi: &[u64], r: usize, c: usize| -> u8 {
                    let w = r * words + c / 64;
                    ((lo[w] >> (c % 64) & 1) | ((hi[w] >> (c % 64) & 1) << 1)) as u8
                };
                // Multiply planes by a nonzero scalar 1, a (=2) or a^2 (=3).
                fn scale(l: u64, h: u64, s: u8) -> (u64, u64) {
                    match s {
                        1 => (l, h),
                        2 => (h, l ^ h),
                        3 => (l ^ h, l),
                        _ => (0, 0),
                    }
                }
                const INV: [u8; 4] = [0, 1, 3, 2];
                let mut pivots = Vec::new();
                for c in 0..limit {
                    let rank = pivots.len();
                    if rank == rows {
                        break;
                    }
                    let Some(pr) = (rank..rows).find(|&r| get(lo, hi, r, c) != 0) else {
                        continue;
                    };
                    if pr != rank {
                        for k in 0..words {
                            lo.swap(pr * words + k, rank * words + k);
                            hi.swap(pr * words + k, rank * words + k);
                        }
                    }
                    let s = INV[get(lo, hi, rank, c) as usize];
                    let w0 = c / 64;
                    for k in w0..words {
                        let i = rank * words + k;
                        let (l, h) = scale(lo[i], hi[i], s);
                        lo[i] = l;
                        hi[i] = h;
                    }
                    let plo: Vec<u64> = lo[rank * words..(rank + 1) * words].to_vec();
                    let phi: Vec<u64> = hi[rank * words..(rank + 1) * words].to_vec();
                    for r in 0..rows {
                        if r == rank {
                            continue;
                        }
                        let e = get(lo, hi, r, c);
                        if e == 0 {
                            continue;
                        }
                        for k in w0..words {
                            let (l, h) = scale(plo[k], phi[k], e);
                            lo[r * words + k] ^= l;
                            hi[r * words + k] ^= h;
                        }
                    }
                    pivots.push(c);
                }
                pivots
            }
            Packed::Prime { rows, cols, p, data, .. } => {
                let (rows, cols, p) = (*rows, *cols, *p);
                let inv = |a: u32| -> u32 {
                    let mut r = 1u64;
                    let (mut b, mut e) = (a as u64, (p - 2) as u64);
                    while e > 0 {
                        if e & 1 == 1 {
                            r = r * b % p as u64;
                        }
                        b = b * b % p as u64;
                        e >>= 1;
                    }
                    r as u32
                };
                let mut pivots = Vec::new();
                for c in 0..limit {
                    let rank = pivots.len();
                    if rank == rows {
                        break;
                    }
                    let Some(pr) = (rank..rows).find(|&r| data[r * cols + c] != 0) else {
                        continue;
                    };
                    if pr != rank {
                        for k in 0..cols {
                            data.swap(pr * cols + k, rank * cols + k);
                        }
                    }
                    let s = inv(data[rank * cols + c]);
                    for k in c..cols {
                        let x = &mut data[rank * cols + k];
                        *x = *x * s % p;
                    }
                    let prow: Vec<u32> = data[rank * cols..(rank + 1) * cols].to_vec();
                    for r in 0..rows {
                        if r == rank {
                            continue;
                        }
                        let e = data[r * cols + c];
                        if e == 0 {
                            continue;
                        }
                        let m = p - e;
                        let row = &mut data[r * cols..(r + 1) * cols];
                        for (x, &y) in row.iter_mut().zip(&prow).skip(c) {
                            *x = (*x + m * y) % p;
                        }
                    }
                    pivots.push(c);
                }
                pivots
            }
            Packed::Generic(m) => {
                let f = m.field().clone();
                let (rows, cols) = (m.rows, m.cols);
                let mut pivots = Vec::new();
                for c in 0..limit {
                    let rank = pivots.len();
                    if rank == rows {
                        break;
                    }
                    let Some(pr) = (rank..rows).find(|&r| !m.get(r, c).is_zero()) else {
                        continue;
                    };
                    if pr != rank {
                        for k in 0..cols {
                            m.data.swap(pr * cols + k, rank * cols + k);
                        }
                    }
                    let s = f.inv(m.get(rank, c));
                    for k in c..cols {
                        let v = f.mul(m.get(rank, k), s);
                        m.set(rank, k, v);
                    }
                    let prow = m.row(rank).to_vec();
                    for r in 0..rows {
                        if r == rank {
                            continue;
                        }
                        let e = m.get(r, c);
                        if e.is_zero() {
                            continue;
                        }
                        let row = m.row_mut(r);
                        for (x, &y) in row.iter_mut().zip(&prow).skip(c) {
                            *x = f.sub(*x, f.mul(e, y));
                        }
                    }
                    pivots.push(c);
                }
                pivots
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_examples() {
        let f = Field::gf2();
        let id = KMatrix::identity(&f, 3);
        assert_eq!(id.rref(), (id.clone(), vec![0, 1, 2]));
        let z = KMatrix::zeros(&f, 2, 3);
        assert_eq!(z.rref(), (z.clone(), vec![]));
        let m = KMatrix::from_ints(&f, &[&[1, 1], &[1, 1]]);
        let (r, p) = m.rref();
        assert_eq!(r, KMatrix::from_ints(&f, &[&[1, 1], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn kernel_examples() {
        let f = Field::gf2();
        assert_eq!(KMatrix::identity(&f, 3).kernel_basis().rows(), 0);
        assert_eq!(KMatrix::zeros(&f, 2, 2).kernel_basis(), KMatrix::identity(&f, 2));
        let k = KMatrix::from_ints(&f, &[&[1, 1]]).kernel_basis();
        assert_eq!(k, KMatrix::from_ints(&f, &[&[1, 1]]));
    }

    #[test]
    fn solve_examples() {
        let f = Field::gf4();
        let a = f.generator();
        let m = KMatrix::from_rows(&f, &[vec![a]]).unwrap();
        let x = m.solve(&[Scalar::ONE]).unwrap().unwrap();
        assert_eq!(x, vec![f.mul(a, a)]);
        assert_eq!(x[0], f.add(a, Scalar::ONE));
        let z = KMatrix::zeros(&f, 1, 1);
        assert_eq!(z.solve(&[Scalar::ONE]).unwrap(), None);
        assert!(matches!(z.solve(&[]), Err(Error::DimensionMismatch(_))));
        let id = KMatrix::identity(&f, 2);
        assert_eq!(id.solve(&[a, Scalar::ONE]).unwrap(), Some(vec![a, Scalar::ONE]));
    }

    #[test]
    fn coords_mod_examples() {
        let f = Field::gf2();
        let s = KMatrix::from_ints(&f, &[&[1, 0, 0]]);
        let v: Vec<Scalar> = [1, 1, 0].iter().map(|&x| f.from_int(x)).collect();
        let r = coords_mod_subspace(&v, &s).unwrap();
        assert_eq!(r, [0, 1, 0].iter().map(|&x| f.from_int(x)).collect::<Vec<_>>());
        let empty = KMatrix::zeros(&f, 0, 3);
        assert_eq!(coords_mod_subspace(&v, &empty).unwrap(), v);
        let inside: Vec<Scalar> = vec![Scalar::ONE, Scalar::ZERO, Scalar::ZERO];
        assert!(coords_mod_subspace(&inside, &s).unwrap().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn packed_paths_agree_with_generic() {
        // GF(9) goes through the generic path; compare rank with a GF(3) embedding.
        let f: Field = "3".parse().unwrap();
        let m = KMatrix::from_ints(&f, &[&[1, 2, 0], &[2, 1, 0], &[0, 0, 1]]);
        let (r, p) = m.rref();
        assert_eq!(p, vec![0, 2]);
        assert_eq!(r.row(0), &[Scalar(1), Scalar(2), Scalar(0)]);
    }
}
