//! Randomized invariants of the field, linear algebra and ring layers.

use std::sync::OnceLock;

use proptest::prelude::*;

use crate::cohomology::{CohClass, Cohomology};
use crate::group::Group;
use crate::parse::{format_class, parse_class, parse_coords};
use crate::steenrod;
use crate::{Field, KMatrix, Scalar};

fn fields() -> Vec<Field> {
    vec![
        Field::gf2(),
        Field::prime(3).unwrap(),
        Field::prime(5).unwrap(),
        Field::gf4(),
        Field::new(3, 2, &[2, 2, 1]).unwrap(),
        Field::new(2, 3, &[1, 1, 0, 1]).unwrap(),
    ]
}

fn elem(f: &Field, k: u32) -> Scalar {
    f.elements().nth((k % f.size()) as usize).unwrap()
}

fn klein2() -> &'static Cohomology {
    static R: OnceLock<Cohomology> = OnceLock::new();
    R.get_or_init(|| Cohomology::minimal(&Group::preset("C2xC2").unwrap(), &Field::gf2(), 6).unwrap())
}

fn klein4() -> &'static Cohomology {
    static R: OnceLock<Cohomology> = OnceLock::new();
    R.get_or_init(|| Cohomology::minimal(&Group::preset("C2xC2").unwrap(), &Field::gf4(), 4).unwrap())
}

fn class(ring: &Cohomology, n: usize, seed: &[u32]) -> CohClass {
    let f = ring.field();
    let coords: Vec<Scalar> = (0..ring.dim(n).unwrap()).map(|i| elem(f, seed[i % seed.len()] + i as u32)).collect();
    ring.from_coords(n, &coords).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(fi in 0usize..6, a in 0u32..64, b in 0u32..64, c in 0u32..64) {
        let f = &fields()[fi];
        let (a, b, c) = (elem(f, a), elem(f, b), elem(f, c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Scalar::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a)), Scalar::ONE);
        }
        prop_assert_eq!(f.pow(a, f.size() as u64), a);
    }

    #[test]
    fn scalar_text_round_trips(fi in 0usize..6, a in 0u32..64) {
        let f = &fields()[fi];
        let a = elem(f, a);
        prop_assert_eq!(f.parse_scalar(&f.format_scalar(a)), Some(a));
    }

    #[test]
    fn rank_nullity_and_solve(fi in 0usize..6, rows in 1usize..6, cols in 1usize..6, seed in prop::collection::vec(0u32..64, 36)) {
        let f = &fields()[fi];
        let data: Vec<Vec<Scalar>> =
            (0..rows).map(|r| (0..cols).map(|c| elem(f, seed[r * 6 + c])).collect()).collect();
        let m = KMatrix::from_rows(f, &data).unwrap();
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.rows(), cols);
        for k in kernel.to_rows() {
            prop_assert!(m.mul_vec(&k).unwrap().iter().all(|x| x.is_zero()));
        }
        let x: Vec<Scalar> = (0..cols).map(|c| elem(f, seed[c] * 7 + 1)).collect();
        let b = m.mul_vec(&x).unwrap();
        let y = m.solve(&b).unwrap().expect("consistent system");
        prop_assert_eq!(m.mul_vec(&y).unwrap(), b);
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn cup_is_graded_commutative_and_associative(a in prop::collection::vec(0u32..4, 3), b in prop::collection::vec(0u32..4, 3), c in prop::collection::vec(0u32..4, 3), n in 1usize..3) {
        let h = klein2();
        let (x, y, z) = (class(h, n, &a), class(h, 1, &b), class(h, 2, &c));
        prop_assert_eq!(h.cup(&x, &y).unwrap(), h.cup(&y, &x).unwrap());
        let l = h.cup(&h.cup(&x, &y).unwrap(), &z).unwrap();
        let r = h.cup(&x, &h.cup(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
        prop_assert_eq!(h.cup(&x, &y).unwrap(), h.cup_diagonal(&x, &y).unwrap());
    }

    #[test]
    fn steenrod_square_is_additive(a in prop::collection::vec(0u32..4, 3), b in prop::collection::vec(0u32..4, 3), n in 1usize..3) {
        let h = klein2();
        let (x, y) = (class(h, n, &a), class(h, n, &b));
        let s = h.add(&steenrod::sq(h, &x).unwrap(), &steenrod::sq(h, &y).unwrap()).unwrap();
        prop_assert_eq!(steenrod::sq(h, &h.add(&x, &y).unwrap()).unwrap(), s);
    }

    #[test]
    fn bottom_square_is_frobenius_semilinear(a in prop::collection::vec(0u32..4, 2), l in 0u32..4) {
        let h = klein4();
        let f = h.field();
        let x = class(h, 1, &a);
        let lam = elem(f, l);
        let lhs = steenrod::sq(h, &h.scale(lam, &x).unwrap()).unwrap();
        let rhs = h.scale(f.frobenius(lam), &steenrod::sq(h, &x).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn class_text_round_trips(a in prop::collection::vec(0u32..4, 4), n in 0usize..4) {
        let h = klein4();
        let x = class(h, n, &a);
        let s = format_class(h, &x).unwrap();
        let back = if s.contains(':') { parse_coords(h, &s) } else { parse_class(h, &s) };
        prop_assert_eq!(back.unwrap(), x);
    }

    #[test]
    fn residue_differs_by_a_multiple(a in prop::collection::vec(0u32..2, 4), b in prop::collection::vec(0u32..2, 3)) {
        let h = klein2();
        let t = class(h, 3, &a);
        let z = class(h, 2, &b);
        prop_assume!(!z.is_zero());
        let r = h.residue(&t, &z).unwrap();
        let diff = h.lin(&t, Field::gf2().neg(Scalar::ONE), &r).unwrap();
        prop_assert!(h.ideal_member(&diff, &z).unwrap().is_some());
        prop_assert_eq!(h.residue(&r, &z).unwrap(), r);
    }
}
