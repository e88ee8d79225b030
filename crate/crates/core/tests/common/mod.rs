//! Fixtures, random generators and brute-force oracles shared by the
//! integration suites.
#![allow(dead_code)]

use mahler::{MahlerOperator, Poly, Rational};
use num::{BigInt, One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qq(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn terms(ts: &[(u64, i64)]) -> Poly {
    Poly::from_int_terms(ts)
}

/// Polynomial with unit coefficients: `e ≥ 0` gives `+x^e`, `e < 0` gives `−x^(−e)`;
/// the constant term is passed separately.
pub fn pm(constant: i64, es: &[i64]) -> Poly {
    let mut ts = vec![(0u64, constant)];
    ts.extend(es.iter().map(|&e| (e.unsigned_abs(), e.signum())));
    terms(&ts)
}

pub fn prod(ps: &[Poly]) -> Poly {
    ps.iter().fold(Poly::one(), |a, p| &a * p)
}

pub fn op(b: u64, cs: Vec<Poly>) -> MahlerOperator {
    MahlerOperator::new(b, cs)
}

/// `x^3(1−x^3+x^6)(1−x^7−x^10) M^2 − (1−x^28−x^31−x^37−x^40) M + x^6(1+x)(1−x^21−x^30)`, radix 3.
pub fn running_example() -> MahlerOperator {
    let l2 = prod(&[terms(&[(3, 1)]), pm(1, &[-3, 6]), pm(1, &[-7, -10])]);
    let l1 = -&pm(1, &[-28, -31, -37, -40]);
    let l0 = prod(&[terms(&[(6, 1)]), pm(1, &[1]), pm(1, &[-21, -30])]);
    op(3, vec![l0, l1, l2])
}

/// The radix-3 order-2 operator whose rational solutions are `1/(2x−1)` and `1/(x^2−x−1)`.
pub fn rational_pair() -> MahlerOperator {
    let l2 = prod(&[
        terms(&[(0, 3), (1, -1), (3, -1), (4, 2)]),
        terms(&[(0, -1), (9, 2)]),
        pm(-1, &[-9, 18]),
    ]);
    let l1 = -&prod(&[
        pm(1, &[2]),
        terms(&[(0, -1), (3, 2)]),
        pm(1, &[4]),
        pm(-1, &[-3, 6]),
        terms(&[(0, 3), (1, -1), (9, -1), (10, 2)]),
    ]);
    let l0 = prod(&[
        terms(&[(2, 1)]),
        terms(&[(0, -1), (1, 2)]),
        pm(1, &[1, 2]),
        pm(1, &[-1, 2]),
        pm(-1, &[-1, 2]),
        terms(&[(0, 3), (3, -1), (9, -1), (12, 2)]),
    ]);
    op(3, vec![l0, l1, l2])
}

/// Radix-3 order-4 operator with `ℓ_0 = 0`.
pub fn reducible() -> MahlerOperator {
    let l1 = prod(&[terms(&[(9, 1)]), pm(1, &[-15, 51, 54, -87, 108]), pm(1, &[-12, 24])]);
    let l2 = -&prod(&[
        terms(&[(3, 1)]),
        pm(
            1,
            &[
                6, -20, -21, 30, 32, 33, 36, -44, -45, 54, 56, 57, 60, -68, -69, 80, 81, 84, 90, -92, -93,
                104, 105, 108, 114, -116, -117, 138, 144,
            ],
        ),
    ]);
    let l3 = pm(
        1,
        &[
            3, -5, 17, 18, 21, -23, -29, 35, 36, 39, -47, 54, 57, 72, 75, 90, 93, -95, 107, 108, 111, -113,
            -119, 125, 126, 129, -137, 144, 147,
        ],
    );
    let l4 = -&prod(&[pm(1, &[27, 54]), pm(1, &[-27, 54]), pm(1, &[-5, 17, 18, -29, 36])]);
    op(3, vec![Poly::zero(), l1, l2, l3, l4])
}

/// Content-free part of the operator that ends the reduction of [`reducible`].
pub fn reducible_result() -> MahlerOperator {
    let l0 = prod(&[terms(&[(2, 1)]), pm(1, &[-4, 8])]);
    let l1 = -&prod(&[pm(1, &[-2, 4, -6, 8]), pm(1, &[2, 2, 4])]);
    let l2 = prod(&[pm(1, &[3, 6]), pm(1, &[-3, 6])]);
    op(3, vec![l0, l1, l2])
}

/// Content removed from [`reducible_result`].
pub fn reducible_content() -> Poly {
    prod(&[terms(&[(3, 1)]), pm(1, &[1, 2]), pm(1, &[-1, 2])])
}

/// Order-11 radix-3 sparse operator with two Puiseux solutions.
pub fn sparse_eleven() -> MahlerOperator {
    let t = |ts: &[(u64, i64)]| terms(ts);
    op(
        3,
        vec![
            t(&[(568, 1)]),
            t(&[(1218, -1), (1705, -1)]),
            t(&[(3655, 1)]),
            t(&[(162, -1), (10962, 1)]),
            t(&[(0, 1), (487, 1), (4104, -1), (4536, -1), (32887, -1)]),
            t(&[(1, -1), (11826, 1), (12313, 1), (13122, 1), (13609, 1)]),
            t(&[(0, -1), (35479, -1), (39367, -1)]),
            t(&[(1, 1), (95634, 1), (106434, -1), (118098, -1)]),
            t(&[(286416, -1), (286903, -1), (319303, 1), (354295, 1)]),
            t(&[(859249, 1)]),
            t(&[(2577744, 1)]),
            t(&[(7733233, -1)]),
        ],
    )
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let n: i64 = rng.gen_range(-5..=5);
        if n != 0 {
            let d: i64 = if rng.gen_bool(0.8) { 1 } else { rng.gen_range(2..=4) };
            return qq(n, d);
        }
    }
}

/// Random polynomial of degree at most `d`, nonzero.
pub fn random_poly<R: Rng>(rng: &mut R, d: u64) -> Poly {
    loop {
        let mut ts = Vec::new();
        for e in 0..=d {
            if rng.gen_bool(0.5) {
                ts.push((e, random_rational(rng)));
            }
        }
        let p = Poly::from_terms(ts);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random operator of order exactly `r`, coefficient degrees at most `d`.
pub fn random_operator<R: Rng>(rng: &mut R, b: u64, r: usize, d: u64, l0_nonzero: bool) -> MahlerOperator {
    let mut cs: Vec<Poly> = (0..=r)
        .map(|k| if k == r || (k == 0 && l0_nonzero) || rng.gen_bool(0.7) { random_poly(rng, d) } else { Poly::zero() })
        .collect();
    if !l0_nonzero {
        cs[0] = Poly::zero();
    }
    op(b, cs)
}

/// First-order operator `M(p)·q − p·M(q)·M` annihilating `p/q`.
pub fn annihilator(b: u64, p: &Poly, qd: &Poly) -> MahlerOperator {
    let mp = p.compose_power(b).unwrap();
    let mq = qd.compose_power(b).unwrap();
    op(b, vec![&mp * qd, -&(p * &mq)])
}

/// Reduced row echelon form, pivots monic at the first nonzero entry, zero rows dropped.
pub fn echelon(mut rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let n = rows.iter().map(Vec::len).max().unwrap_or(0);
    for r in &mut rows {
        r.resize(n, Rational::zero());
    }
    let mut top = 0;
    for c in 0..n {
        let Some(p) = (top..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(top, p);
        let inv = rows[top][c].recip();
        for v in rows[top].iter_mut() {
            *v *= &inv;
        }
        let piv = rows[top].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != top && !row[c].is_zero() {
                let f = row[c].clone();
                for (a, b) in row.iter_mut().zip(&piv) {
                    *a -= &f * b;
                }
            }
        }
        top += 1;
    }
    rows.truncate(top);
    rows
}

/// Kernel of the matrix with the given rows, in echelon form.
pub fn nullspace(rows: Vec<Vec<Rational>>, n: usize) -> Vec<Vec<Rational>> {
    let e = echelon(rows);
    let pivots: Vec<usize> = e.iter().map(|r| r.iter().position(|c| !c.is_zero()).unwrap()).collect();
    let mut out = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); n];
        v[free] = Rational::one();
        for (row, &p) in e.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        out.push(v);
    }
    echelon(out)
}

/// Coefficient `m` of `L x^n`, straight from the definition.
fn image_coeff(l: &MahlerOperator, n: u64, m: u64) -> Rational {
    let b = l.radix();
    let mut acc = Rational::zero();
    let mut bk = 1u64;
    for c in l.coeffs() {
        if let Some(j) = (bk * n <= m).then(|| m - bk * n) {
            acc += c.coeff(j);
        }
        bk *= b;
    }
    acc
}

/// Polynomial solutions of degree `≤ deg`, by undetermined coefficients.
pub fn brute_polys(l: &MahlerOperator, deg: u64) -> Vec<Vec<Rational>> {
    let n = deg as usize + 1;
    let top = l.degree().unwrap_or(0) + l.radix().pow(l.order() as u32) * deg;
    let rows: Vec<Vec<Rational>> =
        (0..=top).map(|m| (0..n as u64).map(|j| image_coeff(l, j, m)).collect()).collect();
    nullspace(rows, n)
}

/// Truncations to length `t` of the power-series solutions, by undetermined
/// coefficients on `extra` more unknowns and all equations they fully determine.
pub fn brute_series(l: &MahlerOperator, t: usize, rows: u64) -> Vec<Vec<Rational>> {
    let n = rows as usize + 1;
    let eqs: Vec<Vec<Rational>> =
        (0..rows).map(|m| (0..n as u64).map(|j| image_coeff(l, j, m)).collect()).collect();
    let ker = nullspace(eqs, n);
    echelon(ker.into_iter().map(|v| v[..t].to_vec()).collect())
}

pub fn dense_rows<I: IntoIterator<Item = Vec<Rational>>>(it: I, len: usize) -> Vec<Vec<Rational>> {
    it.into_iter()
        .map(|mut v| {
            v.resize(len, Rational::zero());
            v
        })
        .collect()
}
