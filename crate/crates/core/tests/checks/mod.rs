//! Randomized property checks, shared by the property suite and the acceptance run.

use crate::common::*;
use mahler::newton::mu_nu;
use mahler::normalize::{gcrd, normalize_l0, OperatorFamily};
use mahler::poly::{floor_i64, graeffe, mahler_substitute};
use mahler::rational_solver::{
    alt_denominator_bound, bell_coons_test, canonical_span, denominator_bound, rational_basis,
    rational_basis_unshortcut, transcendence_test, RationalFunction, Verdict,
};
use mahler::solver::{
    approximate_series_basis, certify_puiseux, certify_series, polynomial_basis, polynomial_solutions_bounded,
    puiseux_basis_all, series_basis,
};
use mahler::rmatrix::{build_submatrix, entry_oracle};
use mahler::{MahlerOperator, PhiTransform, Poly, Rational};
use num::Zero;
use rand::Rng;

const SERIES_LEN: usize = 30;

/// Random operator with `ℓ_0 ≠ 0`; a third of them also satisfy `L(1) = 0`.
fn small_operator<R: Rng>(rng: &mut R) -> MahlerOperator {
    let b = rng.gen_range(2..=3);
    let r = rng.gen_range(1..=3);
    let d = rng.gen_range(0..=8);
    let l = random_operator(rng, b, r, d, true);
    if !rng.gen_bool(1.0 / 3.0) {
        return l;
    }
    let mut cs = l.coeffs().to_vec();
    cs[0] = -&cs[1..].iter().fold(Poly::zero(), |a, c| &a + c);
    if cs[0].is_zero() {
        cs[0] = Poly::one();
    }
    op(b, cs)
}

fn series_rows(b: &[mahler::solver::TruncatedSeries], len: usize) -> Vec<Vec<Rational>> {
    echelon(dense_rows(b.iter().map(|s| s.coefficients[..len.min(s.coefficients.len())].to_vec()), len))
}

fn v0(l: &MahlerOperator) -> u64 {
    l.coeff(0).valuation().unwrap()
}

pub fn series_and_polynomials_match_brute_force() {
    let mut g = rng(1);
    let mut nontrivial = 0;
    for _ in 0..220 {
        let l = small_operator(&mut g);
        let fnu = floor_i64(&mu_nu(&l).unwrap().0).unwrap();
        let approx = approximate_series_basis(&l).unwrap();
        if fnu >= 0 {
            let t = fnu as usize + 1;
            let brute = brute_series(&l, t, v0(&l) + t as u64);
            assert_eq!(series_rows(&approx.elements, t), brute, "{l}");
        } else {
            assert!(approx.is_empty());
        }
        let s = series_basis(&l, SERIES_LEN - 1).unwrap();
        let brute = brute_series(&l, SERIES_LEN, v0(&l) + SERIES_LEN as u64);
        assert_eq!(series_rows(&s.elements, SERIES_LEN), brute, "{l}");
        nontrivial += usize::from(!brute.is_empty());
        let d = l.degree().unwrap();
        let polys = polynomial_basis(&l).unwrap();
        let rows = echelon(dense_rows(polys.elements.iter().map(Poly::to_dense), d as usize + 2));
        assert_eq!(rows, brute_polys(&l, d + 1), "{l}");
        for w in 1..4u64 {
            let pb = polynomial_solutions_bounded(&l, w as usize).unwrap();
            let rows = echelon(dense_rows(pb.elements.iter().map(Poly::to_dense), w as usize));
            assert_eq!(rows, brute_polys(&l, w - 1), "{l} w={w}");
        }
    }
    assert!(nontrivial >= 40, "only {nontrivial} operators had series solutions");
}

pub fn certificates_hold_for_every_output() {
    let mut g = rng(2);
    for _ in 0..120 {
        let l = small_operator(&mut g);
        let n = 25u64;
        for s in series_basis(&l, n as usize).unwrap().elements {
            let e = certify_series(&l, &s).unwrap();
            assert!(e >= Rational::from_integer((v0(&l) + n).into()), "{l}");
        }
        for s in puiseux_basis_all(&l, 12).unwrap().elements {
            certify_puiseux(&l, &s).unwrap();
        }
        for p in polynomial_basis(&l).unwrap().elements {
            assert!(l.apply_poly(&p).unwrap().is_zero());
        }
        for f in rational_basis(&l).unwrap().elements {
            assert!(f.solves(&l).unwrap(), "{l} {f}");
        }
    }
}

pub fn graeffe_identities() {
    let mut g = rng(3);
    for _ in 0..210 {
        let b = g.gen_range(2..=3);
        let i = g.gen_range(1..=2);
        let d = g.gen_range(0..=4);
        let p = random_poly(&mut g, d);
        let mp = mahler_substitute(&p, b, i).unwrap();
        assert_eq!(graeffe(&mp, b, i).unwrap(), p.pow(b.pow(i as u32)), "{p}");
        let gp = graeffe(&p, b, i).unwrap();
        assert!(p.divides(&mahler_substitute(&gp, b, i).unwrap()), "{p}");
        let s = random_poly(&mut g, 2);
        let other = random_poly(&mut g, 5);
        for qv in [&p * &s, other] {
            let mq = mahler_substitute(&qv, b, i).unwrap();
            assert_eq!(p.divides(&qv), mp.divides(&mq));
        }
    }
}

pub fn sections_reconstruct() {
    let mut g = rng(4);
    for _ in 0..210 {
        let b = g.gen_range(2..=3);
        let r = g.gen_range(1..=3);
        let l = random_operator(&mut g, b, r, 9, false);
        let secs: Vec<_> = (0..b).map(|i| l.section(i)).collect();
        assert_eq!(MahlerOperator::from_sections(b, &secs).unwrap(), l);
        let p2 = random_operator(&mut g, b, 1, 2, true);
        let m = MahlerOperator::m_power(b, 1);
        let p1 = random_operator(&mut g, b, 1, 3, true);
        let lhs = p1.multiply(&m).unwrap().multiply(&p2).unwrap();
        for i in 0..b {
            let rhs = p1.multiply(&m).unwrap().section(i).multiply(&p2).unwrap();
            assert_eq!(lhs.section(i), rhs);
        }
    }
}

/// Random `A·B` with `ℓ_0(A) = 0`, so the product has a zero trailing coefficient.
fn zero_trailing<R: Rng>(rng: &mut R) -> MahlerOperator {
    let b = 2;
    if rng.gen_bool(0.3) {
        let r = rng.gen_range(1..=3);
        return random_operator(rng, b, r, 4, false);
    }
    let ra = rng.gen_range(1..=2);
    let a = random_operator(rng, b, ra, 2, false);
    let r = rng.gen_range(1..=2);
    let mut bop = random_operator(rng, b, r, 2, true);
    if rng.gen_bool(0.5) {
        let mut cs = bop.coeffs().to_vec();
        cs[0] = -&cs[1..].iter().fold(Poly::zero(), |x, c| &x + c);
        if !cs[0].is_zero() {
            bop = op(b, cs);
        }
    }
    a.multiply(&bop).unwrap()
}

pub fn normalization_preserves_series_solutions() {
    let mut g = rng(5);
    let mut nontrivial = 0;
    for _ in 0..110 {
        let l = zero_trailing(&mut g);
        let n = normalize_l0(&l).unwrap();
        assert!(!n.primitive.coeff(0).is_zero());
        let ours = series_basis(&n.primitive, SERIES_LEN - 1).unwrap();
        let unknowns = 6 * SERIES_LEN as u64;
        let brute = brute_series(&l, SERIES_LEN, l.radix() * unknowns);
        assert_eq!(series_rows(&ours.elements, SERIES_LEN), brute, "{l}");
        nontrivial += usize::from(!brute.is_empty());
    }
    assert!(nontrivial >= 20, "only {nontrivial} operators had series solutions");
}

pub fn gcrd_divides_family() {
    let mut g = rng(6);
    for _ in 0..110 {
        let b = g.gen_range(2..=3);
        let nz = g.gen_bool(0.8);
        let common = random_operator(&mut g, b, 1, 2, nz);
        let k = g.gen_range(1..=3);
        let members: Vec<MahlerOperator> = (0..k)
            .map(|_| {
                let ra = g.gen_range(0..=1);
                let nz = ra == 0 || g.gen_bool(0.7);
                let left = random_operator(&mut g, b, ra, 2, nz);
                left.multiply(&common).unwrap()
            })
            .collect();
        let out = gcrd(&OperatorFamily::new(members.clone()).unwrap()).unwrap();
        for m in &members {
            assert!(m.right_divide(&out.primitive).unwrap().2.is_zero(), "{m} by {}", out.primitive);
        }
        assert!(out.primitive.right_divide(&common).unwrap().2.is_zero());
    }
}

/// Operator `A · (M(p) q − p M(q) M)` annihilating `p/q`.
fn with_rational_solution<R: Rng>(rng: &mut R) -> (MahlerOperator, RationalFunction) {
    let b = rng.gen_range(2..=3);
    let p = random_poly(rng, 2);
    let mut qd = random_poly(rng, 2);
    if rng.gen_bool(0.3) {
        qd = qd.shift(1).unwrap();
    }
    let base = annihilator(b, &p, &qd);
    let ra = rng.gen_range(0..=1);
    let a = random_operator(rng, b, ra, 1, true);
    let l = a.multiply(&base).unwrap();
    (l, RationalFunction::new(p, 0, qd).unwrap())
}

pub fn rational_bounds_and_guards() {
    let mut g = rng(7);
    let mut checked = 0;
    for it in 0..160 {
        let (l, known) = if it % 2 == 0 {
            with_rational_solution(&mut g)
        } else {
            (small_operator(&mut g), RationalFunction::zero())
        };
        let (b, r) = (l.radix(), l.order() as u32);
        let lr = l.leading().unwrap().degree().unwrap();
        let d = l.degree().unwrap();
        let bound = denominator_bound(&l).unwrap();
        let cap = if b == 2 { lr } else { lr / b.pow(r - 1) };
        assert!(bound.q_star.degree().unwrap() <= cap, "{l}");
        let alt = alt_denominator_bound(&l).unwrap();
        let basis = rational_basis(&l).unwrap();
        let mut found = basis.elements.clone();
        if !known.is_zero() {
            let (den, nums) = canonical_span(&basis.elements).unwrap();
            let (kden, knum) = canonical_span(std::slice::from_ref(&known)).unwrap();
            let l_all = den.lcm(&kden);
            let lift = |n: &Poly, dd: &Poly| (n * &l_all.exact_div(dd).unwrap()).to_dense();
            let mut rows: Vec<_> = nums.iter().map(|n| lift(n, &den)).collect();
            let before = echelon(rows.clone()).len();
            rows.push(lift(&knum[0], &kden));
            assert_eq!(echelon(rows).len(), before, "{l}: missing {known}");
            found.push(known.clone());
        }
        for f in found.iter().filter(|f| !f.is_zero()) {
            checked += 1;
            assert!(f.x_power() <= bound.v_bar, "{l} {f}");
            assert!(f.denominator().divides(&bound.q_star), "{l} {f}");
            assert!(f.denominator().divides(&alt), "{l} {f}");
            assert!(f.denominator().degree().unwrap() * b.pow(r) <= 3 * lr, "{l} {f}");
            let full = f.full_denominator().unwrap().degree().unwrap();
            let slack = d / (b.pow(r) - b.pow(r - 1));
            assert!(f.numerator().degree().unwrap() <= full + slack, "{l} {f}");
        }
    }
    assert!(checked >= 80);
}

pub fn low_degree_operators_have_only_constants() {
    let mut g = rng(8);
    let mut count = 0;
    while count < 110 {
        let b: u64 = g.gen_range(2..=3);
        let r = g.gen_range(2..=3u32);
        let cap = b.pow(r - 1) - 1;
        let mut l = random_operator(&mut g, b, r as usize, cap.min(6), true);
        if g.gen_bool(0.4) {
            let mut cs = l.coeffs().to_vec();
            cs[0] = -&cs[1..].iter().fold(Poly::zero(), |a, c| &a + c);
            if cs[0].is_zero() {
                continue;
            }
            l = op(b, cs);
        }
        count += 1;
        let full = rational_basis_unshortcut(&l, &Default::default()).unwrap();
        assert!(full.elements.iter().all(|f| f.numerator().is_constant() && f.full_denominator().unwrap().is_constant()));
        assert_eq!(full.elements, rational_basis(&l).unwrap().elements, "{l}");
    }
}

pub fn bound_factor_is_maximal() {
    let mut g = rng(9);
    for _ in 0..60 {
        let b = g.gen_range(2..=3);
        let r = g.gen_range(1..=2u64);
        let f = random_poly(&mut g, 2);
        let lead = &mahler_substitute(&f, b, r).unwrap() * &random_poly(&mut g, 3);
        let mut cs = vec![random_poly(&mut g, 3)];
        cs.extend((1..r).map(|_| Poly::zero()));
        cs.push(lead.clone());
        let l = op(b, cs);
        let u1 = denominator_bound(&l).unwrap().u[0].clone();
        assert!(mahler_substitute(&u1, b, r).unwrap().divides(&lead));
        assert!(f.monic().divides(&u1) || f.is_constant());
        for c in -3..=3i64 {
            let trial = &u1 * &terms(&[(0, -c), (1, 1)]);
            assert!(!mahler_substitute(&trial, b, r).unwrap().divides(&lead));
        }
    }
}

pub fn transcendence_tests_agree() {
    let mut g = rng(10);
    let mut pairs = 0;
    let mut rational = 0;
    for it in 0..150 {
        let l = if it % 3 == 0 { with_rational_solution(&mut g).0 } else { small_operator(&mut g) };
        let Ok(nu) = mu_nu(&l) else { continue };
        let fnu = floor_i64(&nu.0).unwrap();
        if fnu < 0 {
            continue;
        }
        let basis = series_basis(&l, fnu as usize).unwrap();
        if basis.is_empty() {
            continue;
        }
        let mut prefix = vec![Rational::zero(); fnu as usize + 1];
        for s in &basis.elements {
            let c = random_rational(&mut g);
            for (a, y) in prefix.iter_mut().zip(&s.coefficients) {
                *a += &c * y;
            }
        }
        let ours = transcendence_test(&l, &prefix).unwrap();
        let theirs = bell_coons_test(&l, &prefix).unwrap();
        assert_eq!(ours.verdict, theirs.verdict, "{l} {prefix:?}");
        pairs += 1;
        if ours.verdict == Verdict::Rational {
            rational += 1;
            let w = ours.witness.unwrap();
            assert!(w.solves(&l).unwrap());
            assert_eq!(w.laurent(prefix.len())[w.x_power() as usize..], prefix[..]);
        }
    }
    assert!(pairs >= 40 && rational >= 10, "pairs {pairs}, rational {rational}");
}

pub fn submatrix_matches_oracle() {
    let mut g = rng(11);
    let mut positions = 0;
    for _ in 0..50 {
        let b = g.gen_range(2..=3u64);
        let r = g.gen_range(1..=3);
        let l = random_operator(&mut g, b, r, 8, true);
        let phi = if g.gen_bool(0.5) {
            PhiTransform::identity()
        } else {
            let alpha = g.gen_range(-2..=2i64);
            let beta = if b == 2 { [1, 3][g.gen_range(0..2)] } else { g.gen_range(1..=2) };
            PhiTransform::new(alpha, beta, -2 * b.pow(r as u32) as i64)
        };
        let w = 60;
        let mut e: Vec<u64> = (0..20).map(|_| g.gen_range(0..400)).collect();
        e.sort();
        e.dedup();
        let m = build_submatrix(&l, &phi, w, &e).unwrap();
        for _ in 0..20 {
            let i = g.gen_range(0..e.len());
            let n = g.gen_range(0..w);
            assert_eq!(m.get(i, n), entry_oracle(&l, &phi, e[i], n as u64).unwrap(), "{l} row {}", e[i]);
            positions += 1;
        }
    }
    assert!(positions >= 1000);
}

/// Every check with its name.
#[allow(dead_code)]
pub const ALL: &[(&str, fn())] = &[
    ("series_and_polynomials_match_brute_force", series_and_polynomials_match_brute_force),
    ("certificates_hold_for_every_output", certificates_hold_for_every_output),
    ("graeffe_identities", graeffe_identities),
    ("sections_reconstruct", sections_reconstruct),
    ("normalization_preserves_series_solutions", normalization_preserves_series_solutions),
    ("gcrd_divides_family", gcrd_divides_family),
    ("rational_bounds_and_guards", rational_bounds_and_guards),
    ("low_degree_operators_have_only_constants", low_degree_operators_have_only_constants),
    ("bound_factor_is_maximal", bound_factor_is_maximal),
    ("transcendence_tests_agree", transcendence_tests_agree),
];
