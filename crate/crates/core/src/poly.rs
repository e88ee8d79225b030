//! Exact rationals and sparse univariate polynomials over ℚ.
//!
//! Besides ring arithmetic this module provides the Mahler substitution
//! `x ↦ x^(b^i)`, the Gräffe operator of radix `b^i`, radix sections and
//! `lcm(a, Ma, …, M^(r-1) a)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{checked_pow, overflow, Error, Result};

pub type Rational = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `n/d`; panics on `d = 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"±digits"` or `"±digits/digits"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Malformed(format!("bad rational {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let digits = |t: &str, signed: bool| {
        let body = if signed { t.strip_prefix(['+', '-']).unwrap_or(t) } else { t };
        !body.is_empty() && body.bytes().all(|c| c.is_ascii_digit())
    };
    if !digits(n, true) || !digits(d, false) {
        return Err(bad());
    }
    let n: BigInt = n.trim_start_matches('+').parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Integer floor of a rational.
pub fn floor_i64(q: &Rational) -> Result<i64> {
    i64::try_from(q.floor().to_integer()).map_err(|_| overflow("floor"))
}

/// A polynomial stored as strictly increasing `(exponent, nonzero coefficient)` pairs.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(u64, Rational)>,
}

pub(crate) static ZERO_POLY: Poly = Poly { terms: Vec::new() };

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn x() -> Self {
        Self::monomial(1, Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(e: u64, c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(e, c)] }
        }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (u64, Rational)>>(it: I) -> Self {
        let mut v: Vec<(u64, Rational)> = it.into_iter().collect();
        v.sort_by_key(|t| t.0);
        Self::from_sorted(v)
    }

    fn from_sorted(v: Vec<(u64, Rational)>) -> Self {
        let mut out: Vec<(u64, Rational)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((e, c));
                }
            }
        }
        if out.last().is_some_and(|t| t.1.is_zero()) {
            out.pop();
        }
        Poly { terms: out }
    }

    /// Trusted constructor; the caller guarantees canonical order and nonzero coefficients.
    pub(crate) fn from_canonical(terms: Vec<(u64, Rational)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|t| !t.1.is_zero()));
        Poly { terms }
    }

    /// Dense integer coefficients, lowest degree first.
    pub fn from_ints(cs: &[i64]) -> Self {
        Self::from_sorted(cs.iter().enumerate().map(|(i, &c)| (i as u64, rat(c))).collect())
    }

    /// Sparse integer terms `(exponent, coefficient)`.
    pub fn from_int_terms(ts: &[(u64, i64)]) -> Self {
        Self::from_terms(ts.iter().map(|&(e, c)| (e, rat(c))))
    }

    pub fn from_dense(cs: &[Rational]) -> Self {
        Poly {
            terms: cs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as u64, c.clone()))
                .collect(),
        }
    }

    /// Dense coefficient vector of length `degree + 1` (empty for zero).
    pub fn to_dense(&self) -> Vec<Rational> {
        let Some(d) = self.degree() else { return Vec::new() };
        let mut v = vec![Rational::zero(); d as usize + 1];
        for (e, c) in &self.terms {
            v[*e as usize] = c.clone();
        }
        v
    }

    pub fn terms(&self) -> &[(u64, Rational)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(u64, Rational)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.degree().is_none_or(|d| d == 0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.last().map(|t| t.0)
    }

    pub fn valuation(&self) -> Option<u64> {
        self.terms.first().map(|t| t.0)
    }

    pub fn coeff(&self, e: u64) -> Rational {
        match self.terms.binary_search_by_key(&e, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.terms.last().map(|t| &t.1)
    }

    pub fn trailing_coeff(&self) -> Option<&Rational> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect() }
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: u64) -> Result<Poly> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.checked_add(k).ok_or_else(|| overflow("shift"))?, c.clone())))
            .collect::<Result<_>>()?;
        Ok(Poly { terms })
    }

    /// Division by `x^k`; the caller guarantees `k ≤ valuation`.
    pub fn unshift(&self, k: u64) -> Poly {
        debug_assert!(self.valuation().is_none_or(|v| v >= k));
        Poly { terms: self.terms.iter().map(|(e, c)| (e - k, c.clone())).collect() }
    }

    pub fn monic(&self) -> Poly {
        match self.leading_coeff() {
            None => Poly::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut prev = self.degree().unwrap_or(0);
        for (e, c) in self.terms.iter().rev() {
            acc *= pow_rat(x, prev - e);
            acc += c;
            prev = *e;
        }
        acc * pow_rat(x, prev)
    }

    /// Composition with `x ↦ x^m`.
    pub fn compose_power(&self, m: u64) -> Result<Poly> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.checked_mul(m).ok_or_else(|| overflow("substitution"))?, c.clone())))
            .collect::<Result<_>>()?;
        Ok(Poly { terms })
    }

    pub fn derivative(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|t| t.0 > 0)
                .map(|(e, c)| (e - 1, c * rat(*e as i64)))
                .collect(),
        }
    }

    pub fn pow(&self, n: u64) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let Some(nd) = self.degree() else { return (Poly::zero(), Poly::zero()) };
        if nd < dd {
            return (Poly::zero(), self.clone());
        }
        let dv = d.valuation().unwrap();
        if d.len() == 1 {
            let inv = d.terms[0].1.recip();
            let mut q = Vec::new();
            let mut r = Vec::new();
            for (e, c) in &self.terms {
                if *e >= dv {
                    q.push((e - dv, c * &inv));
                } else {
                    r.push((*e, c.clone()));
                }
            }
            return (Poly { terms: q }, Poly { terms: r });
        }
        let lc_inv = d.leading_coeff().unwrap().recip();
        let mut rem = self.to_dense();
        let mut q = vec![Rational::zero(); (nd - dd) as usize + 1];
        for i in (0..=(nd - dd) as usize).rev() {
            let top = i + dd as usize;
            if rem[top].is_zero() {
                continue;
            }
            let f = &rem[top] * &lc_inv;
            for (e, c) in &d.terms {
                let idx = i + *e as usize;
                rem[idx] -= &f * c;
            }
            q[i] = f;
        }
        rem.truncate(dd as usize);
        (Poly::from_dense(&q), Poly::from_dense(&rem))
    }

    /// Exact division; fails when the remainder is nonzero.
    pub fn exact_div(&self, d: &Poly) -> Result<Poly> {
        if d.is_zero() {
            return Err(Error::InexactDivision);
        }
        let (q, r) = self.div_rem(d);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision)
        }
    }

    /// Whether `self` divides `other`.
    pub fn divides(&self, other: &Poly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.monic();
        let mut b = other.monic();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.div_rem(&b).1.monic();
            a = b;
            b = r;
        }
        a
    }

    /// Monic lcm; zero if either argument is zero.
    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(other);
        (self * &other.exact_div(&g).expect("gcd divides")).monic()
    }

    /// Rational content with the sign of the leading coefficient, so that
    /// `self / content` has coprime integer coefficients and positive leading coefficient.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            num = num::Integer::gcd(&num, c.numer());
            den = num::Integer::lcm(&den, c.denom());
        }
        if num.is_zero() {
            return Rational::zero();
        }
        let c = Rational::new(num, den);
        if self.leading_coeff().unwrap().is_negative() {
            -c
        } else {
            c
        }
    }

    pub fn primitive_part(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.content().recip())
    }

    /// Splits off the largest power of `x`: returns `(v, self / x^v)`.
    pub fn split_x_power(&self) -> (u64, Poly) {
        match self.valuation() {
            None => (0, Poly::zero()),
            Some(v) => (v, self.unshift(v)),
        }
    }

    /// Truncation modulo `x^n`.
    pub fn truncate(&self, n: u64) -> Poly {
        Poly { terms: self.terms.iter().filter(|t| t.0 < n).cloned().collect() }
    }
}

fn pow_rat(x: &Rational, n: u64) -> Rational {
    num::pow::pow(x.clone(), n as usize)
}

fn merge(a: &Poly, b: &Poly, negate_b: bool) -> Poly {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let (ta, tb) = (&a.terms, &b.terms);
    let nb = |c: &Rational| if negate_b { -c } else { c.clone() };
    while i < ta.len() || j < tb.len() {
        if j == tb.len() || (i < ta.len() && ta[i].0 < tb[j].0) {
            out.push(ta[i].clone());
            i += 1;
        } else if i == ta.len() || tb[j].0 < ta[i].0 {
            out.push((tb[j].0, nb(&tb[j].1)));
            j += 1;
        } else {
            let c = if negate_b { &ta[i].1 - &tb[j].1 } else { &ta[i].1 + &tb[j].1 };
            if !c.is_zero() {
                out.push((ta[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    Poly { terms: out }
}

fn mul_impl(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let lo = a.valuation().unwrap() + b.valuation().unwrap();
    let hi = a.degree().unwrap().checked_add(b.degree().unwrap()).expect("exponent overflow");
    let span = (hi - lo) as u128 + 1;
    let products = (a.len() * b.len()) as u128;
    if span <= 4 * products + 64 {
        let mut acc = vec![Rational::zero(); span as usize];
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                acc[(ea + eb - lo) as usize] += ca * cb;
            }
        }
        Poly {
            terms: acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (lo + i as u64, c))
                .collect(),
        }
    } else {
        let mut v = Vec::with_capacity(products as usize);
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                v.push((ea + eb, ca * cb));
            }
        }
        v.sort_by_key(|t| t.0);
        Poly::from_sorted(v)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        merge(self, o, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        merge(self, o, true)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        mul_impl(self, o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, o: Poly) -> Poly {
                (&self).$f(&o)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $f(self, o: &Poly) -> Poly {
                (&self).$f(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let unit = a.is_one();
            match (*e, unit) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}*x")?,
                (_, true) => write!(f, "x^{e}")?,
                (_, false) => write!(f, "{a}*x^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// `M^i p`: substitutes `x^(b^i)` for `x`.
pub fn mahler_substitute(p: &Poly, b: u64, i: u64) -> Result<Poly> {
    if b < 2 {
        return Err(Error::InvalidArgument("radix must be at least 2".into()));
    }
    p.compose_power(checked_pow(b, i)?)
}

/// Radix sections `(f_0, …, f_{m-1})` with `p = Σ x^i f_i(x^m)`.
pub fn poly_sections(p: &Poly, m: u64) -> Vec<Poly> {
    assert!(m >= 1);
    let mut parts: Vec<Vec<(u64, Rational)>> = vec![Vec::new(); m as usize];
    for (e, c) in p.terms() {
        parts[(e % m) as usize].push((e / m, c.clone()));
    }
    parts.into_iter().map(Poly::from_canonical).collect()
}

/// Inverse of [`poly_sections`].
pub fn reassemble_sections(fs: &[Poly]) -> Result<Poly> {
    let m = fs.len() as u64;
    let mut terms = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        for (e, c) in f.terms() {
            let exp = e
                .checked_mul(m)
                .and_then(|v| v.checked_add(i as u64))
                .ok_or_else(|| overflow("sections"))?;
            terms.push((exp, c.clone()));
        }
    }
    Ok(Poly::from_terms(terms))
}

/// Fraction-free determinant over ℚ[x] (Bareiss).
pub(crate) fn poly_det(mut a: Vec<Vec<Poly>>) -> Poly {
    let n = a.len();
    if n == 0 {
        return Poly::one();
    }
    let mut sign = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = !sign;
                }
                None => return Poly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = t.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// One Gräffe step of radix `b`: `Res_y(y^b − x, p(y))`.
fn graeffe_once(p: &Poly, b: u64) -> Poly {
    let f = poly_sections(p, b);
    let n = b as usize;
    let x = Poly::x();
    // Column j holds p·y^j reduced modulo y^b = x.
    let mut m = vec![vec![Poly::zero(); n]; n];
    for (j, _) in (0..n).enumerate() {
        for (i, fi) in f.iter().enumerate() {
            let row = (i + j) % n;
            m[row][j] = if i + j >= n { fi * &x } else { fi.clone() };
        }
    }
    poly_det(m)
}

/// `G^i p = Res_y(y^(b^i) − x, p(y))`, not unit-normalized.
///
/// Iterating the radix-`b` step `i` times gives exactly the radix-`b^i` resultant.
pub fn graeffe(p: &Poly, b: u64, i: u64) -> Result<Poly> {
    if b < 2 {
        return Err(Error::InvalidArgument("radix must be at least 2".into()));
    }
    checked_pow(b, i)?;
    let mut q = p.clone();
    for _ in 0..i {
        q = graeffe_once(&q, b);
    }
    Ok(q)
}

/// Monic associate of [`graeffe`].
pub fn graeffe_monic(p: &Poly, b: u64, i: u64) -> Result<Poly> {
    Ok(graeffe(p, b, i)?.monic())
}

/// `lcm(a, Ma, …, M^(r-1) a)`, monic.
pub fn lcm_orbit(a: &Poly, b: u64, r: u64) -> Result<Poly> {
    if a.is_zero() {
        return Err(Error::InvalidArgument("lcm orbit of zero".into()));
    }
    if r == 0 {
        return Err(Error::InvalidArgument("lcm orbit needs r >= 1".into()));
    }
    let mut acc = a.monic();
    let mut cur = a.clone();
    for _ in 1..r {
        cur = mahler_substitute(&cur, b, 1)?;
        acc = acc.lcm(&cur);
    }
    Ok(acc)
}
