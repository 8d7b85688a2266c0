//! Finite fields GF(p^m) with table-driven arithmetic.
//!
//! An element is encoded as the integer `c0 + c1 p + ... + c_{m-1} p^{m-1}`
//! where `c0 + c1 a + ...` is its polynomial in the generator `a`. With this
//! encoding the prime subfield is exactly `0..p` and the generator is `p`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Upper bound on the field size; the inverse, log and exp tables are dense.
pub const MAX_FIELD_SIZE: usize = 1 << 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(pub u16);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);
    pub const ONE: Scalar = Scalar(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct FieldInner {
    p: u32,
    m: u32,
    q: u32,
    poly: Vec<u32>,
    exp: Vec<u16>,
    log: Vec<u32>,
    inv: Vec<u16>,
    // Dense addition table, only for small fields with p odd.
    add: Option<Vec<u16>>,
    neg: Vec<u16>,
}

/// A validated description of GF(p^m). Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.poly == other.0.poly)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.spec_string())
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` modulo the monic polynomial `b`, coefficients low to high.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap() % p;
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                let t = &mut r[shift + i];
                *t = (*t + p * p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let m = poly.len() - 1;
    if m <= 1 {
        return true;
    }
    // Try every monic divisor of degree 1..=m/2.
    for d in 1..=m / 2 {
        let count = (p as usize).pow(d as u32);
        for code in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                f.push((c % p as usize) as u32);
                c /= p as usize;
            }
            f.push(1);
            if poly_rem(poly, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Build GF(p^m) from the coefficients `c0..cm` (low to high) of a monic
    /// irreducible polynomial. For `m == 1` the polynomial is ignored.
    pub fn new(p: u32, m: u32, poly: &[u32]) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q > MAX_FIELD_SIZE as u64 {
            return Err(Error::UnsupportedSize(q));
        }
        let q = q as u32;
        let poly: Vec<u32> = if m == 1 {
            vec![0, 1]
        } else {
            if poly.len() != m as usize + 1 || poly[m as usize] % p != 1 {
                return Err(Error::InvalidField(format!(
                    "polynomial must be monic of degree {m}"
                )));
            }
            let poly: Vec<u32> = poly.iter().map(|c| c % p).collect();
            if !is_irreducible(&poly, p) {
                return Err(Error::ReduciblePolynomial(poly));
            }
            poly
        };

        let decode = |x: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(m as usize);
            let mut x = x;
            for _ in 0..m {
                v.push(x % p);
                x /= p;
            }
            v
        };
        let encode = |v: &[u32]| -> u32 {
            let mut x = 0;
            for &c in v.iter().rev() {
                x = x * p + c;
            }
            x
        };
        let slow_mul = |a: u32, b: u32| -> u32 {
            let (a, b) = (decode(a), decode(b));
            let mut prod = vec![0u32; 2 * m as usize];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let mut r = if m == 1 { prod } else { poly_rem(&prod, &poly, p) };
            r.resize(m as usize, 0);
            r.truncate(m as usize);
            encode(&r)
        };

        // Search for a primitive element.
        let order = q - 1;
        let mut exp = vec![0u16; order.max(1) as usize];
        let mut log = vec![0u32; q as usize];
        'search: for g in 1..q {
            let mut x = 1u32;
            for (k, slot) in exp.iter_mut().enumerate() {
                if k > 0 && x == 1 {
                    continue 'search;
                }
                *slot = x as u16;
                x = slow_mul(x, g);
            }
            if x != 1 {
                continue;
            }
            break;
        }
        for (k, &e) in exp.iter().enumerate() {
            log[e as usize] = k as u32;
        }
        let mut inv = vec![0u16; q as usize];
        for x in 1..q {
            let l = log[x as usize];
            inv[x as usize] = exp[((order - l) % order) as usize];
        }
        let mut neg = vec![0u16; q as usize];
        for (x, slot) in neg.iter_mut().enumerate() {
            let v: Vec<u32> = decode(x as u32).iter().map(|&c| (p - c) % p).collect();
            *slot = encode(&v) as u16;
        }
        let add = if p != 2 && q <= 256 {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    let (da, db) = (decode(a), decode(b));
                    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    t[(a * q + b) as usize] = encode(&s) as u16;
                }
            }
            Some(t)
        } else {
            None
        };
        Ok(Field(Arc::new(FieldInner { p, m, q, poly, exp, log, inv, add, neg })))
    }

    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1, &[])
    }

    /// GF(2), the main case.
    pub fn gf2() -> Field {
        Field::prime(2).expect("GF(2)")
    }

    /// GF(4) with generator `a` satisfying `a^2 = a + 1`.
    pub fn gf4() -> Field {
        Field::new(2, 2, &[1, 1, 1]).expect("GF(4)")
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.m
    }

    pub fn size(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.poly
    }

    /// The field generator `a` (equal to 1's successor in GF(p)).
    pub fn generator(&self) -> Scalar {
        if self.0.m == 1 {
            Scalar(self.0.exp[if self.0.q > 2 { 1 } else { 0 }])
        } else {
            Scalar(self.0.p as u16)
        }
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        Scalar(n.rem_euclid(self.0.p as i64) as u16)
    }

    /// Sign `(-1)^e` as a scalar.
    #[inline]
    pub fn sign(&self, e: i64) -> Scalar {
        if e.rem_euclid(2) == 0 {
            Scalar::ONE
        } else {
            self.neg(Scalar::ONE)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Scalar> {
        (0..self.0.q).map(|x| Scalar(x as u16))
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        let f = &*self.0;
        if f.p == 2 {
            return Scalar(a.0 ^ b.0);
        }
        if let Some(t) = &f.add {
            return Scalar(t[a.0 as usize * f.q as usize + b.0 as usize]);
        }
        if f.m == 1 {
            return Scalar(((a.0 as u32 + b.0 as u32) % f.p) as u16);
        }
        let (mut x, mut y, mut r, mut place) = (a.0 as u32, b.0 as u32, 0u32, 1u32);
        for _ in 0..f.m {
            r += ((x % f.p + y % f.p) % f.p) * place;
            x /= f.p;
            y /= f.p;
            place *= f.p;
        }
        Scalar(r as u16)
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        Scalar(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        if a.0 == 0 || b.0 == 0 {
            return Scalar::ZERO;
        }
        let f = &*self.0;
        let order = f.q - 1;
        let l = f.log[a.0 as usize] + f.log[b.0 as usize];
        Scalar(f.exp[(if l >= order { l - order } else { l }) as usize])
    }

    /// Multiplicative inverse; `inv(0)` is a logic error and returns 0.
    #[inline]
    pub fn inv(&self, a: Scalar) -> Scalar {
        Scalar(self.0.inv[a.0 as usize])
    }

    pub fn pow(&self, a: Scalar, e: u64) -> Scalar {
        if e == 0 {
            return Scalar::ONE;
        }
        if a.is_zero() {
            return Scalar::ZERO;
        }
        let order = (self.0.q - 1) as u64;
        let l = (self.0.log[a.0 as usize] as u64 * (e % order)) % order;
        Scalar(self.0.exp[l as usize])
    }

    pub fn frobenius(&self, a: Scalar) -> Scalar {
        self.pow(a, self.0.p as u64)
    }

    /// Coefficients of `a` in the power basis `1, a, a^2, ...`.
    pub fn coeffs(&self, a: Scalar) -> Vec<u32> {
        let mut x = a.0 as u32;
        (0..self.0.m)
            .map(|_| {
                let c = x % self.0.p;
                x /= self.0.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Scalar {
        let mut x = 0u32;
        for &v in c.iter().rev() {
            x = x * self.0.p + v % self.0.p;
        }
        Scalar(x as u16)
    }

    pub fn is_prime_field_element(&self, a: Scalar) -> bool {
        (a.0 as u32) < self.0.p
    }

    /// Text form accepted by [`FromStr`]: `"2"` or `"2^2:1,1,1"`.
    pub fn spec_string(&self) -> String {
        if self.0.m == 1 {
            format!("{}", self.0.p)
        } else {
            let cs: Vec<String> = self.0.poly.iter().map(|c| c.to_string()).collect();
            format!("{}^{}:{}", self.0.p, self.0.m, cs.join(","))
        }
    }

    /// Render a scalar using `a` for the generator, e.g. `a^2`, `a+1`, `2`.
    /// Inverse of [`format_scalar`](Self::format_scalar): sums of terms `c`,
    /// `a`, `a^k`, `c*a^k`.
    pub fn parse_scalar(&self, text: &str) -> Option<Scalar> {
        let mut acc = Scalar::ZERO;
        let text = text.trim();
        if text.is_empty() {
            return None;
        }
        for term in text.split('+') {
            let term = term.trim();
            let (c, mon) = match term.split_once('*') {
                Some((c, m)) => (c.trim().parse::<i64>().ok()?, Some(m.trim())),
                None if term.starts_with('a') => (1, Some(term)),
                None => (term.parse::<i64>().ok()?, None),
            };
            let mut v = self.from_int(c);
            if let Some(m) = mon {
                let e = match m {
                    "a" => 1,
                    _ => m.strip_prefix("a^")?.parse::<u64>().ok()?,
                };
                v = self.mul(v, self.pow(self.generator(), e));
            }
            acc = self.add(acc, v);
        }
        Some(acc)
    }

    pub fn format_scalar(&self, s: Scalar) -> String {
        if self.0.m == 1 {
            return s.0.to_string();
        }
        if s.is_zero() {
            return "0".into();
        }
        // Prefer the power form when it is short.
        let l = self.0.log[s.0 as usize];
        if self.0.p == 2 {
            return match l {
                0 => "1".into(),
                1 => "a".into(),
                _ => format!("a^{l}"),
            };
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs(s).iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => "a".into(),
                _ => format!("a^{i}"),
            };
            terms.push(match (*c, mon.is_empty()) {
                (c, true) => c.to_string(),
                (1, false) => mon,
                (c, false) => format!("{c}*{mon}"),
            });
        }
        terms.join("+")
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        let bad = || Error::InvalidField(format!("cannot parse field spec {s:?}"));
        let s = s.trim();
        match s.split_once(':') {
            None => {
                let (p, m) = match s.split_once('^') {
                    Some((p, m)) => (p, m),
                    None => (s, "1"),
                };
                let p: u32 = p.trim().parse().map_err(|_| bad())?;
                let m: u32 = m.trim().parse().map_err(|_| bad())?;
                if m != 1 {
                    return Err(Error::InvalidField(
                        "extension fields need an explicit polynomial".into(),
                    ));
                }
                Field::prime(p)
            }
            Some((head, coeffs)) => {
                let (p, m) = head.split_once('^').ok_or_else(bad)?;
                let p: u32 = p.trim().parse().map_err(|_| bad())?;
                let m: u32 = m.trim().parse().map_err(|_| bad())?;
                let poly = coeffs
                    .split(',')
                    .map(|c| c.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                Field::new(p, m, &poly)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_generator_relation() {
        let f = Field::gf4();
        let a = f.generator();
        // a^2 + a + 1 = 0
        let s = f.add(f.add(f.mul(a, a), a), Scalar::ONE);
        assert!(s.is_zero());
        assert_eq!(f.inv(a), f.mul(a, a));
        assert_eq!(f.spec_string(), "2^2:1,1,1");
    }

    #[test]
    fn reducible_and_nonprime_rejected() {
        assert!(matches!(Field::new(2, 2, &[0, 1, 1]), Err(Error::ReduciblePolynomial(_))));
        assert!(matches!(Field::prime(4), Err(Error::NonPrime(4))));
        assert!(matches!(Field::prime(65537), Err(Error::UnsupportedSize(_))));
        assert!(matches!("2^17:1".parse::<Field>(), Err(_)));
    }

    #[test]
    fn parse_specs() {
        let f: Field = "2".parse().unwrap();
        assert_eq!(f.size(), 2);
        let f: Field = "2^2:1,1,1".parse().unwrap();
        assert_eq!(f.size(), 4);
        let f: Field = "3^2:1,0,1".parse().unwrap(); // t^2 + 1 over GF(3)
        assert_eq!(f.size(), 9);
        assert!("3^2:2,0,1".parse::<Field>().is_err()); // t^2 - 1 splits
    }

    #[test]
    fn field_axioms_gf9() {
        let f: Field = "3^2:1,0,1".parse().unwrap();
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), Scalar::ZERO);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a)), Scalar::ONE);
            }
            for b in f.elements() {
                for c in f.elements() {
                    let lhs = f.mul(a, f.add(b, c));
                    let rhs = f.add(f.mul(a, b), f.mul(a, c));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn frobenius_properties() {
        for f in [Field::gf4(), "3^2:1,0,1".parse().unwrap(), "2^3:1,1,0,1".parse().unwrap()] {
            let fixed: Vec<_> = f.elements().filter(|&a| f.frobenius(a) == a).collect();
            assert_eq!(fixed.len() as u32, f.characteristic());
            assert!(fixed.iter().all(|&a| f.is_prime_field_element(a)));
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                    assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
                }
            }
        }
        let f = Field::gf4();
        for a in f.elements() {
            assert_eq!(f.frobenius(f.frobenius(a)), a);
        }
    }
}
