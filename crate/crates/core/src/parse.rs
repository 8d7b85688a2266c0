//! Class expressions such as `x^2+x*y+y^2` or `x+a*y`.
//!
//! Generators are the canonical basis of H¹, named `x0, x1, …` and, when there
//! are at most three, also `x, y, z`. The literal `a` is the field generator;
//! integer literals are reduced into the prime field.

use crate::cohomology::{CohClass, Cohomology};
use crate::error::{Error, Result};
use crate::field::Scalar;

/// What the parser builds: classes in a ring, or just degrees.
trait Eval {
    type Value;
    fn degree(&self, v: &Self::Value) -> usize;
    fn scalar(&self, n: u64) -> Result<Self::Value>;
    fn field_generator(&self) -> Result<Self::Value>;
    fn generator(&self, name: &str) -> Result<Self::Value>;
    /// a + c·b with c = ±1.
    fn sum(&self, a: &Self::Value, negate: bool, b: &Self::Value) -> Result<Self::Value>;
    fn neg(&self, a: &Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn one(&self) -> Result<Self::Value>;
}

struct Classes<'a> {
    ring: &'a Cohomology,
    gens: Vec<CohClass>,
}

fn generator_index(name: &str, r: Option<usize>) -> Option<usize> {
    let short = r.map_or(true, |r| r <= 3);
    match name {
        "x" if short => Some(0),
        "y" if short => Some(1),
        "z" if short => Some(2),
        _ => name.strip_prefix('x').and_then(|s| s.parse::<usize>().ok()),
    }
}

impl Eval for Classes<'_> {
    type Value = CohClass;
    fn degree(&self, v: &CohClass) -> usize {
        v.degree
    }
    fn scalar(&self, n: u64) -> Result<CohClass> {
        let f = self.ring.field();
        let c = f.from_int((n % f.characteristic() as u64) as i64);
        self.ring.scale(c, &self.ring.one()?)
    }
    fn field_generator(&self) -> Result<CohClass> {
        self.ring.scale(self.ring.field().generator(), &self.ring.one()?)
    }
    fn generator(&self, name: &str) -> Result<CohClass> {
        match generator_index(name, Some(self.gens.len())) {
            Some(i) if i < self.gens.len() => Ok(self.gens[i].clone()),
            _ => Err(Error::UnknownGenerator(name.into())),
        }
    }
    fn sum(&self, a: &CohClass, negate: bool, b: &CohClass) -> Result<CohClass> {
        let f = self.ring.field();
        let c = if negate { f.neg(Scalar::ONE) } else { Scalar::ONE };
        self.ring.lin(a, c, b)
    }
    fn neg(&self, a: &CohClass) -> Result<CohClass> {
        self.ring.scale(self.ring.field().neg(Scalar::ONE), a)
    }
    fn mul(&self, a: &CohClass, b: &CohClass) -> Result<CohClass> {
        self.ring.cup(a, b)
    }
    fn one(&self) -> Result<CohClass> {
        self.ring.one()
    }
}

/// Degrees only: generators have degree 1 and scalars degree 0.
struct Degrees;

impl Eval for Degrees {
    type Value = usize;
    fn degree(&self, v: &usize) -> usize {
        *v
    }
    fn scalar(&self, _: u64) -> Result<usize> {
        Ok(0)
    }
    fn field_generator(&self) -> Result<usize> {
        Ok(0)
    }
    fn generator(&self, name: &str) -> Result<usize> {
        generator_index(name, None).map(|_| 1).ok_or_else(|| Error::UnknownGenerator(name.into()))
    }
    fn sum(&self, a: &usize, _: bool, _: &usize) -> Result<usize> {
        Ok(*a)
    }
    fn neg(&self, a: &usize) -> Result<usize> {
        Ok(*a)
    }
    fn mul(&self, a: &usize, b: &usize) -> Result<usize> {
        Ok(a + b)
    }
    fn one(&self) -> Result<usize> {
        Ok(0)
    }
}

struct Parser<'a, E: Eval> {
    src: &'a [u8],
    pos: usize,
    eval: E,
}

fn parse_err(pos: usize, expected: &str) -> Error {
    Error::Parse { position: pos, expected: expected.into() }
}

impl<E: Eval> Parser<'_, E> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self, a: E::Value, b: E::Value, negate: bool) -> Result<E::Value> {
        let (da, db) = (self.eval.degree(&a), self.eval.degree(&b));
        if da != db {
            return Err(Error::NonHomogeneous(da, db));
        }
        self.eval.sum(&a, negate, &b)
    }

    fn expr(&mut self) -> Result<E::Value> {
        let mut acc = if self.peek() == Some(b'-') {
            self.pos += 1;
            let t = self.term()?;
            self.eval.neg(&t)?
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(c @ (b'+' | b'-')) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = self.sum(acc, t, c == b'-')?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<E::Value> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let p = self.power()?;
            acc = self.eval.mul(&acc, &p)?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<E::Value> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        let e = self.number().ok_or_else(|| parse_err(start, "exponent"))?;
        let mut acc = self.eval.one()?;
        for _ in 0..e {
            acc = self.eval.mul(&acc, &base)?;
        }
        Ok(acc)
    }

    fn number(&mut self) -> Option<u64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn atom(&mut self) -> Result<E::Value> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(parse_err(self.pos, "')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let v = self.number().ok_or_else(|| parse_err(start, "integer"))?;
                self.eval.scalar(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if name == "a" {
                    return self.eval.field_generator();
                }
                self.eval.generator(name)
            }
            _ => Err(parse_err(self.pos, "generator, scalar or '('")),
        }
    }
}

fn run<E: Eval>(eval: E, expr: &str) -> Result<E::Value> {
    let mut p = Parser { src: expr.as_bytes(), pos: 0, eval };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(parse_err(p.pos, "'+', '-', '*' or end of input"));
    }
    Ok(v)
}

/// The degree of an expression, from its syntax alone.
pub fn expr_degree(expr: &str) -> Result<usize> {
    run(Degrees, expr)
}

pub fn parse_class(ring: &Cohomology, expr: &str) -> Result<CohClass> {
    let gens = ring.basis(1)?;
    run(Classes { ring, gens }, expr)
}

/// `n:c0,c1,…` with coordinates in the canonical basis of Hⁿ.
pub fn parse_coords(ring: &Cohomology, text: &str) -> Result<CohClass> {
    let (deg, rest) = text.split_once(':').ok_or_else(|| parse_err(0, "'degree:coordinates'"))?;
    let n: usize = deg.trim().parse().map_err(|_| parse_err(0, "degree"))?;
    let f = ring.field();
    let mut coords = Vec::new();
    if !rest.trim().is_empty() {
        for tok in rest.split(',') {
            coords.push(f.parse_scalar(tok.trim()).ok_or_else(|| parse_err(deg.len() + 1, "field element"))?);
        }
    }
    ring.from_coords(n, &coords)
}

fn generator_names(r: usize) -> Vec<String> {
    if r <= 3 {
        ["x", "y", "z"][..r].iter().map(|s| s.to_string()).collect()
    } else {
        (0..r).map(|i| format!("x{i}")).collect()
    }
}

/// Exponent vectors of degree d in r variables, lexicographically descending.
fn monomials(r: usize, d: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for e in (0..=d).rev() {
        for mut rest in monomials(r - 1, d - e) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

/// Render a class as a polynomial in the degree-one generators when it lies in
/// their span, otherwise as `n:c0,c1,…`. The output is accepted by
/// [`parse_class`] or [`parse_coords`] respectively.
pub fn format_class(ring: &Cohomology, c: &CohClass) -> Result<String> {
    let f = ring.field();
    let coords_form = || {
        let cs: Vec<String> = c.coords.iter().map(|&x| f.format_scalar(x)).collect();
        format!("{}:{}", c.degree, cs.join(","))
    };
    if c.degree == 0 {
        return Ok(f.format_scalar(c.coords[0]));
    }
    if c.is_zero() {
        return Ok(coords_form());
    }
    let gens = ring.basis(1)?;
    let names = generator_names(gens.len());
    let mons = monomials(gens.len(), c.degree);
    if mons.len() > 64 {
        return Ok(coords_form());
    }
    let mut cols = Vec::new();
    for m in &mons {
        let mut acc = ring.one()?;
        for (g, &e) in gens.iter().zip(m) {
            for _ in 0..e {
                acc = ring.cup(&acc, g)?;
            }
        }
        cols.push(acc.coords);
    }
    let mat = crate::matrix::KMatrix::from_columns(f, c.coords.len(), &cols);
    let Some(sol) = mat.solve(&c.coords)? else {
        return Ok(coords_form());
    };
    let mut terms = Vec::new();
    for (m, &k) in mons.iter().zip(&sol) {
        if k.is_zero() {
            continue;
        }
        let mono: Vec<String> = names
            .iter()
            .zip(m)
            .filter(|(_, &e)| e > 0)
            .map(|(n, &e)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
            .collect();
        let coef = f.format_scalar(k);
        let coef = if coef.contains('+') { format!("({coef})") } else { coef };
        terms.push(if k == Scalar::ONE { mono.join("*") } else { format!("{coef}*{}", mono.join("*")) });
    }
    Ok(terms.join("+"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::group::Group;

    #[test]
    fn parses_examples() {
        let h = Cohomology::minimal(&Group::preset("C2xC2").unwrap(), &Field::gf2(), 3).unwrap();
        let s = parse_class(&h, "x+y").unwrap();
        assert_eq!(s.coords, vec![Scalar::ONE, Scalar::ONE]);
        let z = parse_class(&h, "x^2+x*y+y^2").unwrap();
        assert_eq!(z.degree, 2);
        assert!(!z.is_zero());
        assert!(matches!(parse_class(&h, "x+y^2"), Err(Error::NonHomogeneous(1, 2))));
        assert!(matches!(parse_class(&h, "w"), Err(Error::UnknownGenerator(_))));
        assert!(matches!(parse_class(&h, "x+*y"), Err(Error::Parse { position: 2, .. })));
        assert_eq!(parse_class(&h, "x0").unwrap(), parse_class(&h, "x").unwrap());
        assert_eq!(expr_degree("a*x^2*(y+x)").unwrap(), 3);
        assert!(matches!(expr_degree("x+y^2"), Err(Error::NonHomogeneous(1, 2))));
        let g4 = Cohomology::minimal(&Group::preset("C2xC2").unwrap(), &Field::gf4(), 2).unwrap();
        let c = parse_class(&g4, "x+a*y").unwrap();
        assert_eq!(c.coords, vec![Scalar::ONE, Field::gf4().generator()]);
    }

    #[test]
    fn format_round_trips() {
        let h = Cohomology::minimal(&Group::preset("C2xC2").unwrap(), &Field::gf4(), 3).unwrap();
        for e in ["a^2*x+y", "x^2+x*y+y^2", "a*x^2*y+y^3", "x"] {
            let c = parse_class(&h, e).unwrap();
            let s = format_class(&h, &c).unwrap();
            assert_eq!(s, e);
            assert_eq!(parse_class(&h, &s).unwrap(), c);
        }
        let q = Cohomology::minimal(&Group::preset("Q8").unwrap(), &Field::gf2(), 4).unwrap();
        let e = q.basis(4).unwrap().remove(0);
        let s = format_class(&q, &e).unwrap();
        assert_eq!(s, "4:1");
        assert_eq!(parse_coords(&q, &s).unwrap(), e);
    }
}
