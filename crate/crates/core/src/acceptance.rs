//! The ten acceptance checks, shared by the `acceptance` test target and the
//! `selftest` subcommand. Each check reports pass/fail, a one-line detail and
//! its wall time against a pinned limit.

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::cohomology::{CohClass, Cohomology};
use crate::complex::{find_homotopy, ChainMap};
use crate::contract::{verify_contraction, TensorContraction};
use crate::error::Result;
use crate::field::{Field, Scalar};
use crate::group::{AlgebraElem, Group};
use crate::lzeta;
use crate::parse::parse_class;
use crate::postnikov;
use crate::resolution::Resolution;
use crate::steenrod::{self, Status};

#[derive(Clone, Debug)]
pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<28} {:>8.2}s (limit {}s)  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

type CheckFn = fn() -> Result<(bool, String)>;

const CHECKS: [(&str, u64, CheckFn); 10] = [
    ("gf4-polarized-degree-one", 5, gf4_degree_one),
    ("klein-quadric", 10, klein_quadric),
    ("quaternion-semiproductive", 60, quaternion_semiproductive),
    ("obstruction-vs-steenrod", 900, obstruction_vs_steenrod),
    ("criterion-vs-oracle", 1200, criterion_vs_oracle),
    ("massey-vs-hirsch", 600, massey_vs_hirsch),
    ("odd-prime-comultiplication", 600, odd_prime),
    ("structural-invariants", 300, structural),
    ("choice-independence", 900, choice_independence),
    ("cyclic4-massey-cube", 30, cyclic4_massey),
];

pub fn count() -> usize {
    CHECKS.len()
}

/// Run check `id` (1-based).
pub fn run(id: usize) -> Check {
    let (name, limit, f) = CHECKS[id - 1];
    let limit = Duration::from_secs(limit);
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let passed = ok && elapsed <= limit;
    let detail = if ok && !passed { format!("{detail}; over time") } else { detail };
    Check { id, name, passed, detail, elapsed, limit }
}

pub fn run_all() -> Vec<Check> {
    (1..=count()).map(run).collect()
}

fn ring(group: &str, field: Field, cap: usize) -> Result<Cohomology> {
    Cohomology::minimal(&Group::preset(group)?, &field, cap)
}

/// Every nonzero class of Hⁿ.
pub fn nonzero_classes(ring: &Cohomology, n: usize) -> Result<Vec<CohClass>> {
    let d = ring.dim(n)?;
    let elems: Vec<Scalar> = ring.field().elements().collect();
    let q = elems.len();
    let mut out = Vec::new();
    for code in 1..q.pow(d as u32) {
        let mut c = code;
        let coords: Vec<Scalar> = (0..d)
            .map(|_| {
                let s = elems[c % q];
                c /= q;
                s
            })
            .collect();
        out.push(ring.from_coords(n, &coords)?);
    }
    Ok(out)
}

fn fmt(ring: &Cohomology, c: &CohClass) -> String {
    format!("{:?}", ring.to_json(c).coords)
}

fn gf4_degree_one() -> Result<(bool, String)> {
    let h = ring("C2xC2", Field::gf4(), 4)?;
    let f = h.field().clone();
    let a = f.generator();
    let mut ok = true;
    let mut seen = Vec::new();
    for (lambda, want) in [(Scalar::ZERO, true), (Scalar::ONE, true), (a, false), (f.mul(a, a), false)] {
        let z = h.from_coords(1, &[Scalar::ONE, lambda])?;
        let v = steenrod::is_productive(&h, &z, 4)?;
        ok &= v.is_yes() == want;
        seen.push(format!("{}:{}", f.format_scalar(lambda), if v.is_yes() { "Yes" } else { "No" }));
    }
    let z = parse_class(&h, "x+a*y")?;
    let s = steenrod::sq(&h, &z)?;
    let want = parse_class(&h, "x+a^2*y")?;
    ok &= s == want;
    Ok((ok, format!("productive {}; Sq0(x+ay) = {}", seen.join(" "), fmt(&h, &s))))
}

fn klein_quadric() -> Result<(bool, String)> {
    let h = ring("C2xC2", Field::gf2(), 9)?;
    let z = parse_class(&h, "x^2+x*y+y^2")?;
    let s = steenrod::sq(&h, &z)?;
    let mut ok = s == parse_class(&h, "x^2*y+x*y^2")?;
    let p = steenrod::is_productive(&h, &z, 6)?;
    ok &= p.status == Status::No;
    let semi = steenrod::is_semiproductive(&h, &z, 6)?;
    ok &= semi.status == Status::YesUpToDegree(6);
    let mut ann = 0;
    for d in 0..=6 {
        ann += h.annihilator_basis(&z, d)?.len();
    }
    ok &= ann == 0;
    Ok((ok, format!("Sq1 = {}; productive {:?}; semi {:?}; dim Ann<=6 = {ann}", fmt(&h, &s), p.status, semi.status)))
}

fn quaternion_semiproductive() -> Result<(bool, String)> {
    let h = ring("Q8", Field::gf4(), 3)?;
    let z = parse_class(&h, "a*x+y")?;
    let u = parse_class(&h, "a^2*x+y")?;
    let mut ok = h.cup(&z, &u)?.is_zero();
    let prod = h.cup(&u, &steenrod::sq(&h, &z)?)?;
    let res = h.residue(&prod, &z)?;
    ok &= !res.is_zero() && res == h.residue(&parse_class(&h, "a*x^2+y^2")?, &z)?;
    let v = steenrod::is_semiproductive(&h, &z, 1)?;
    let witness_ok = matches!(&v.witness, Some(steenrod::Witness::Failing { v, .. }) if *v == u);
    ok &= v.status == Status::No && witness_ok;
    Ok((ok, format!("zu = 0; residue {}; semi {:?}, witness u: {witness_ok}", fmt(&h, &res), v.status)))
}

fn obstruction_vs_steenrod() -> Result<(bool, String)> {
    let mut corpus: Vec<(Cohomology, Vec<usize>)> = Vec::new();
    corpus.push((ring("C2xC2", Field::gf2(), 5)?, vec![1, 2]));
    corpus.push((ring("C2xC2", Field::gf4(), 5)?, vec![2]));
    corpus.push((ring("Q8", Field::gf2(), 5)?, vec![1]));
    let (mut total, mut agree, mut vanish) = (0, 0, 0);
    for (h, degrees) in &corpus {
        for &n in degrees {
            for z in nonzero_classes(h, n)? {
                let ob = postnikov::obstruction(h, &z)?;
                let member = h.ideal_member(&steenrod::sq(h, &z)?, &z)?.is_some();
                total += 1;
                agree += (ob.vanishes == member) as usize;
                vanish += ob.vanishes as usize;
            }
        }
    }
    Ok((agree == total, format!("{agree}/{total} agree ({vanish} vanish)")))
}

fn criterion_vs_oracle() -> Result<(bool, String)> {
    let k2 = ring("C2xC2", Field::gf2(), 6)?;
    let k4 = ring("C2xC2", Field::gf4(), 6)?;
    let q8 = ring("Q8", Field::gf2(), 6)?;
    let mut cases: Vec<(&Cohomology, CohClass)> = Vec::new();
    for n in 1..=2 {
        for z in nonzero_classes(&k2, n)? {
            cases.push((&k2, z));
        }
    }
    for e in ["x+a*y", "x+a^2*y", "x+y"] {
        cases.push((&k4, parse_class(&k4, e)?));
    }
    for z in nonzero_classes(&q8, 1)? {
        cases.push((&q8, z));
    }
    let (mut agree, mut yes, mut no) = (0, 0, 0);
    for (h, z) in &cases {
        let p = steenrod::is_productive(h, z, 4)?;
        let po = lzeta::oracle_productive(h, z, 4)?;
        let s = steenrod::is_semiproductive(h, z, 4)?;
        let so = lzeta::oracle_semiproductive(h, z, 4)?;
        if p.is_yes() {
            yes += 1;
        } else {
            no += 1;
        }
        agree += (p.is_yes() == po.is_yes() && s.is_yes() == so.is_yes()) as usize;
    }
    let ok = agree == cases.len() && cases.len() >= 12 && yes > 0 && no > 0;
    Ok((ok, format!("{agree}/{} agree ({yes} productive, {no} not)", cases.len())))
}

/// All elements of the span of `basis` (or just the basis when it is large).
fn span(ring: &Cohomology, basis: &[CohClass]) -> Result<Vec<CohClass>> {
    let q = ring.field().size() as usize;
    if basis.is_empty() || q.pow(basis.len() as u32) > 256 {
        return Ok(basis.to_vec());
    }
    let elems: Vec<Scalar> = ring.field().elements().collect();
    let mut out = Vec::new();
    for code in 1..q.pow(basis.len() as u32) {
        let mut c = code;
        let mut acc = ring.zero(basis[0].degree)?;
        for b in basis {
            acc = ring.lin(&acc, elems[c % q], b)?;
            c /= q;
        }
        out.push(acc);
    }
    Ok(out)
}

fn massey_vs_hirsch() -> Result<(bool, String)> {
    let corpus = [
        ("C2xC2", Field::gf2(), vec![1, 2]),
        ("C2xC2", Field::gf4(), vec![1]),
        ("Q8", Field::gf2(), vec![1]),
        ("Q8", Field::gf4(), vec![1]),
    ];
    let (mut pairs, mut agree, mut nonzero) = (0, 0, 0);
    for (g, f, degrees) in corpus {
        let h = ring(g, f, 5)?;
        for n in degrees {
            for z in nonzero_classes(&h, n)? {
                for d in 0..=(6 - 2 * n) {
                    for v in span(&h, &h.annihilator_basis(&z, d)?)? {
                        let mu = steenrod::massey_mu(&h, &z, &v)?;
                        let hr = steenrod::hirsch_residue(&h, &z, &v)?;
                        pairs += 1;
                        agree += (mu == hr) as usize;
                        nonzero += !mu.is_zero() as usize;
                    }
                }
            }
        }
    }
    Ok((agree == pairs && pairs > 0, format!("{agree}/{pairs} pairs agree ({nonzero} nonzero)")))
}

fn odd_prime() -> Result<(bool, String)> {
    let f3 = Field::prime(3)?;
    let mut notes = Vec::new();
    let mut ok = true;
    for g in ["C3", "C3xC3"] {
        let h = ring(g, f3.clone(), 5)?;
        let through = h.resolution().hi() - 2;
        let (mut count, mut good) = (0, 0);
        for z in nonzero_classes(&h, 2)? {
            count += 1;
            let (pk, c) = postnikov::lift_comultiplication(&h, &z)?;
            let (r, l) = pk.counit_homotopies(&c, through)?;
            good += (r.is_some() && l.is_some()) as usize;
        }
        ok &= good == count;
        notes.push(format!("{g}: {good}/{count} lifted with counit homotopies"));
    }
    Ok((ok, notes.join("; ")))
}

fn structural() -> Result<(bool, String)> {
    let mut failed: Vec<&str> = Vec::new();
    let mut check = |name: &'static str, ok: bool| {
        if !ok {
            failed.push(name);
        }
    };
    let klein = Group::preset("C2xC2")?;
    let f2 = Field::gf2();
    let f3 = Field::prime(3)?;

    let dims: Vec<usize> = {
        let h = Cohomology::minimal(&klein, &f2, 8)?;
        (0..=8).map(|n| h.dim(n)).collect::<Result<_>>()?
    };
    check("klein dims", dims == (1..=9).collect::<Vec<_>>());
    let q8 = Cohomology::minimal(&Group::preset("Q8")?, &f2, 7)?;
    let qd: Vec<usize> = (0..=7).map(|n| q8.dim(n)).collect::<Result<_>>()?;
    check("Q8 dims", qd == vec![1, 2, 2, 1, 1, 2, 2, 1]);

    for (g, f) in [("C2", f2.clone()), ("C2xC2", f2.clone()), ("C3", f3.clone()), ("Q8", f2.clone())] {
        let res = Arc::new(Resolution::minimal(&Group::preset(g)?, &f, 6)?);
        let c = res.complex();
        let mut sq_zero = true;
        for i in c.lo() + 1..=c.hi() {
            sq_zero &= c.diff(i - 1)?.compose(&c.diff(i)?)?.is_zero();
        }
        check("d^2 = 0", sq_zero);
        check("resolution contraction", verify_contraction(res.as_ref(), 5)?);
        check("perturbed contraction", verify_contraction(&res.perturbed(3)?, 5)?);
        let (t, d) = res.diagonal()?;
        check("diagonal chain map", d.is_chain_map(c, &t.complex)?);
        let tc = TensorContraction::new(t.clone(), res.clone(), res.clone())?;
        check("tensor contraction", verify_contraction(&tc, 4)?);
        let tr = t.transposition(&t)?;
        check("T chain map", tr.is_chain_map(&t.complex, &t.complex)?);
        let tt = tr.compose(&tr)?;
        check("T^2 = id", (tt.lo()..=tt.hi()).all(|i| tt.comp(i).ok() == ChainMap::identity(&t.complex).comp(i).ok()));
        // find_homotopy soundness on Δ ≃ TΔ.
        let td = tr.compose(&d)?;
        match find_homotopy(&d, &td, c, &t.complex, 3)? {
            Some(hm) => {
                let defect = hm.defect(c, &t.complex)?;
                let diff = d.sub(&td)?;
                check("find_homotopy", defect.iter().enumerate().take(4).all(|(k, m)| diff.comp(k as i64).ok().as_ref() == Some(m)));
            }
            None => check("find_homotopy", false),
        }
    }

    // Interchange law with signs over GF(3): (f×g)(f′×g′) = (−1)^{|g||f′|} ff′×gg′.
    let c3 = Cohomology::minimal(&Group::preset("C3")?, &f3, 5)?;
    let x = c3.basis(1)?.remove(0);
    let y = c3.basis(2)?.remove(0);
    let xh = c3.chain_rep(&x)?;
    let yh = c3.chain_rep(&y)?;
    let (t, _) = c3.diagonal()?;
    let p = c3.resolution().complex();
    let id = ChainMap::identity(p);
    let lhs = t.cross(t, &xh, &xh)?.compose(&t.cross(t, &yh, &id)?)?;
    let rhs = t.cross(t, &xh.compose(&yh)?, &xh.compose(&id)?)?;
    let sign = f3.sign((xh.degree() * yh.degree()) as i64);
    let hi = lhs.hi().min(rhs.hi());
    check(
        "cross sign law",
        (lhs.lo()..=hi).all(|i| lhs.comp(i).ok() == rhs.comp(i).ok().map(|m| m.scale(sign))),
    );

    // Rotation identity for a few sphere complexes.
    let k = Cohomology::minimal(&klein, &f2, 5)?;
    for e in ["x", "x+y", "x^2+x*y+y^2"] {
        let s = postnikov::build_p_zeta(&k, &parse_class(&k, e)?)?;
        check("rotation identity", postnikov::rotation_holds(&s)?);
    }

    // Bar against minimal.
    for g in ["C2", "C2xC2"] {
        let grp = Group::preset(g)?;
        let bar = Cohomology::new(Arc::new(Resolution::bar(&grp, &f2, 4)?))?;
        let min = Cohomology::minimal(&grp, &f2, 3)?;
        let same = (0..=3).all(|n| bar.dim(n).ok() == min.dim(n).ok());
        check("bar vs minimal", same);
    }
    failed.dedup();
    let ok = failed.is_empty();
    let detail = if ok { "all structural checks hold".to_string() } else { format!("failed: {}", failed.join(", ")) };
    Ok((ok, detail))
}

fn choice_independence() -> Result<(bool, String)> {
    let corpus = [("C2xC2", vec![1, 2]), ("Q8", vec![1])];
    let (mut runs, mut good) = (0, 0);
    for (g, degrees) in corpus {
        let h = ring(g, Field::gf2(), 5)?;
        for n in degrees {
            for z in nonzero_classes(&h, n)? {
                let s = steenrod::sq(&h, &z)?;
                for seed in 1..=3u64 {
                    let other = Cohomology::new(Arc::new(h.resolution().perturbed(seed)?))?;
                    let z2 = other.from_coords(n, &z.coords)?;
                    let s2 = steenrod::sq(&other, &z2)?;
                    let r = postnikov::choice_independence_check(&h, &z, seed)?;
                    runs += 1;
                    good += (s2.coords == s.coords && r.verdicts_agree && r.residues_agree) as usize;
                }
            }
        }
    }
    Ok((good == runs, format!("{good}/{runs} regenerations invariant")))
}

/// ⟨x, x, x⟩ on C4 by exhaustive search over defining systems on the rank-one
/// minimal resolution, where every map P_i → P_j is multiplication by an
/// element of the commutative ring kC4.
pub fn cyclic4_brute_force() -> Result<Vec<Scalar>> {
    let g = Group::preset("C4")?;
    let f = Field::gf2();
    let res = Resolution::minimal(&g, &f, 4)?;
    let c = res.complex();
    // d[i] is ∂_{i+1}.
    let d: Vec<AlgebraElem> = (1..=4).map(|i| Ok(c.diff(i)?.entry(0, 0))).collect::<Result<_>>()?;
    let aug = |a: &AlgebraElem| a.coeffs.iter().fold(Scalar::ZERO, |s, &x| f.add(s, x));
    let all: Vec<AlgebraElem> = (0..16)
        .map(|m| AlgebraElem::from_ints(&g, &f, &[m & 1, (m >> 1) & 1, (m >> 2) & 1, (m >> 3) & 1]))
        .collect();
    let mul = |a: &AlgebraElem, b: &AlgebraElem| a.mul(b).unwrap();
    let add = |a: &AlgebraElem, b: &AlgebraElem| a.add(b).unwrap();
    // x̂ = (x1, x2, x3) with x_i: P_i → P_{i−1}, ε x1 = 1 and ∂x̂ + x̂∂ = 0.
    let mut reps = Vec::new();
    for x1 in all.iter().filter(|a| aug(a) == Scalar::ONE) {
        for x2 in &all {
            if add(&mul(&d[0], x2), &mul(x1, &d[1])).is_zero() {
                for x3 in &all {
                    if add(&mul(&d[1], x3), &mul(x2, &d[2])).is_zero() {
                        reps.push([x1.clone(), x2.clone(), x3.clone()]);
                    }
                }
            }
        }
    }
    // H = (h1, h2, h3) of degree −1 with ∂H + H∂ = x̂x̂ in source degrees 2
    // and 3; degree 1 lands in P_{−1} = 0.
    let mut values = Vec::new();
    for r in &reps {
        let sq = [mul(&r[0], &r[1]), mul(&r[1], &r[2])];
        let mut homs = Vec::new();
        for h1 in &all {
            for h2 in &all {
                if add(&mul(&d[0], h2), &mul(h1, &d[1])) != sq[0] {
                    continue;
                }
                if all.iter().any(|h3| add(&mul(&d[1], h3), &mul(h2, &d[2])) == sq[1]) {
                    homs.push((h1.clone(), h2.clone()));
                }
            }
        }
        for (h1, _) in &homs {
            for (_, k2) in &homs {
                // X = Hx̂ + x̂K on P_2, read through ε.
                let x = add(&mul(&r[1], h1), &mul(k2, &r[0]));
                let v = aug(&x);
                if !values.contains(&v) {
                    values.push(v);
                }
            }
        }
    }
    Ok(values)
}

fn cyclic4_massey() -> Result<(bool, String)> {
    let h = ring("C4", Field::gf2(), 3)?;
    let x = h.basis(1)?.remove(0);
    let m = steenrod::massey_triple(&h, &x, &x, &x)?;
    let brute = cyclic4_brute_force()?;
    let indeterminacy_zero = m.indeterminacy.iter().all(|c| c.is_zero());
    let agree = brute.len() == 1 && m.representative.coords == brute;
    let nonzero = !m.representative.is_zero();
    let ok = indeterminacy_zero && agree && nonzero;
    Ok((
        ok,
        format!(
            "<x,x,x> = {}; brute force {:?}; J = 0: {indeterminacy_zero}; nonzero: {nonzero}",
            fmt(&h, &m.representative),
            brute.iter().map(|s| h.field().format_scalar(*s)).collect::<Vec<_>>()
        ),
    ))
}
