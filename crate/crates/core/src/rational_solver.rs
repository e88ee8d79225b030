//! Rational solutions: denominator bounds, numerator search, ramified
//! rational solutions and transcendence tests for series solutions.

use std::fmt;

use num::{BigInt, Integer, One, Zero};

use crate::error::{checked_pow, overflow, Error, Result};
use crate::linalg::{rank, reduced_echelon, solve};
use crate::newton::{mu_nu, ramification_data};
use crate::operator::{MahlerOperator, PhiTransform};
use crate::poly::{floor_i64, graeffe, lcm_orbit, mahler_substitute, poly_sections, Poly, Rational};
use crate::rmatrix::Prolonger;
use crate::solver::{polynomial_solutions_bounded_with, prepare, SolutionBasis, SolveOptions};

/// `numerator / (x^x_power · denominator)` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    numerator: Poly,
    x_power: u64,
    denominator: Poly,
}

impl RationalFunction {
    /// Reduces `p / (x^v q)` to lowest terms with `q` monic and `q(0) ≠ 0`.
    pub fn new(p: Poly, v: u64, q: Poly) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        if p.is_zero() {
            return Ok(Self::zero());
        }
        let g = p.gcd(&q);
        let mut p = p.exact_div(&g)?;
        let (a, q) = q.exact_div(&g)?.split_x_power();
        let mut v = v.checked_add(a).ok_or_else(|| overflow("x power"))?;
        let c = p.valuation().unwrap().min(v);
        p = p.unshift(c);
        v -= c;
        let lc = q.leading_coeff().unwrap().clone();
        Ok(RationalFunction { numerator: p.scale(&lc.recip()), x_power: v, denominator: q.monic() })
    }

    pub fn zero() -> Self {
        RationalFunction { numerator: Poly::zero(), x_power: 0, denominator: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction { numerator: p, x_power: 0, denominator: Poly::one() }
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn x_power(&self) -> u64 {
        self.x_power
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Full denominator `x^v q`.
    pub fn full_denominator(&self) -> Result<Poly> {
        self.denominator.shift(self.x_power)
    }

    /// Laurent coefficients of indices `−v, …, len − 1`.
    pub fn laurent(&self, len: usize) -> Vec<Rational> {
        series_quotient(&self.numerator, &self.denominator, len + self.x_power as usize)
    }

    /// Whether `L y = 0`, decided exactly by clearing `∏ M^i (x^v q)`.
    pub fn solves(&self, l: &MahlerOperator) -> Result<bool> {
        if self.is_zero() {
            return Ok(true);
        }
        let den = self.full_denominator()?;
        let b = l.radix();
        let r = l.order();
        let images: Vec<Poly> =
            (0..=r).map(|i| mahler_substitute(&den, b, i as u64)).collect::<Result<_>>()?;
        let mut acc = Poly::zero();
        for (k, lk) in l.coeffs().iter().enumerate() {
            if lk.is_zero() {
                continue;
            }
            let mut t = lk * &mahler_substitute(&self.numerator, b, k as u64)?;
            for (i, m) in images.iter().enumerate() {
                if i != k {
                    t = &t * m;
                }
            }
            acc = &acc + &t;
        }
        Ok(acc.is_zero())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = match (self.x_power, self.denominator.is_constant()) {
            (0, true) => return write!(f, "{}", self.numerator),
            (0, false) => format!("({})", self.denominator),
            (1, true) => "x".to_string(),
            (v, true) => format!("x^{v}"),
            (1, false) => format!("(x*({}))", self.denominator),
            (v, false) => format!("(x^{v}*({}))", self.denominator),
        };
        write!(f, "({})/{den}", self.numerator)
    }
}

/// `f(x^(1/ramification))` for a rational function `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamifiedRational {
    pub ramification: u64,
    pub function: RationalFunction,
}

impl RamifiedRational {
    /// Lowers the ramification to the smallest one the exponents allow.
    fn reduced(self) -> Self {
        let f = &self.function;
        let mut g = self.ramification;
        for e in f.numerator.terms().iter().chain(f.denominator.terms()).map(|t| t.0) {
            g = g.gcd(&e);
        }
        g = g.gcd(&f.x_power);
        if g <= 1 {
            return self;
        }
        let squeeze = |p: &Poly| Poly::from_terms(p.terms().iter().map(|(e, c)| (e / g, c.clone())));
        RamifiedRational {
            ramification: self.ramification / g,
            function: RationalFunction {
                numerator: squeeze(&f.numerator),
                x_power: f.x_power / g,
                denominator: squeeze(&f.denominator),
            },
        }
    }
}

impl fmt::Display for RamifiedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ramification == 1 {
            write!(f, "{}", self.function)
        } else {
            write!(f, "[{}] at x = t^{}", self.function, self.ramification)
        }
    }
}

/// Power-series quotient `p/q` to `len` terms; `q(0) ≠ 0`.
fn series_quotient(p: &Poly, q: &Poly, len: usize) -> Vec<Rational> {
    let q0 = q.coeff(0).recip();
    let mut out: Vec<Rational> = Vec::with_capacity(len);
    for n in 0..len {
        let mut acc = p.coeff(n as u64);
        for (e, c) in q.terms() {
            let e = *e as usize;
            if e == 0 || e > n {
                continue;
            }
            acc -= c * &out[n - e];
        }
        out.push(acc * &q0);
    }
    out
}

/// Output of the denominator bound with its intermediate values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenominatorBound {
    pub q_star: Poly,
    pub v_bar: u64,
    /// `u_1, …, u_(t+1)`, the last one constant.
    pub u: Vec<Poly>,
    pub u_tilde: Poly,
}

fn require_bound_input(l: &MahlerOperator) -> Result<()> {
    if l.is_zero() {
        return Err(Error::ZeroOperator);
    }
    if l.coeff(0).is_zero() {
        return Err(Error::ZeroTrailingCoefficient);
    }
    if l.order() == 0 {
        return Err(Error::InvalidArgument("operator of order 0".into()));
    }
    Ok(())
}

fn gcd_all(ps: &[Poly]) -> Poly {
    ps.iter().fold(Poly::zero(), |g, f| g.gcd(f))
}

/// Denominator bound `x^v̄ q★` from the leading coefficient.
pub fn denominator_bound(l: &MahlerOperator) -> Result<DenominatorBound> {
    require_bound_input(l)?;
    let b = l.radix();
    let r = l.order() as u64;
    let br = checked_pow(b, r)?;
    let mut ell = l.leading().unwrap().clone();
    let mut u = Vec::new();
    let mut acc = Poly::one();
    loop {
        let uk = gcd_all(&poly_sections(&ell, br));
        u.push(uk.clone());
        if uk.degree() == Some(0) {
            break;
        }
        let m = mahler_substitute(&uk, b, r)?;
        ell = &ell.exact_div(&m)? * &lcm_orbit(&uk, b, r)?;
        acc = &acc * &uk;
    }
    let u_tilde = gcd_all(&poly_sections(&ell, br / b));
    let q_star = (&acc * &graeffe(&u_tilde, b, 1)?).monic();
    let delta = l.degree().unwrap();
    let v_bar = delta / (br - br / b);
    Ok(DenominatorBound { q_star, v_bar, u, u_tilde })
}

/// Coarser bound `∏_(k=r)^(r+K) G^k ℓ_r`, `K = ⌊log_b(3 deg ℓ_r)⌋ − r`.
pub fn alt_denominator_bound(l: &MahlerOperator) -> Result<Poly> {
    require_bound_input(l)?;
    let b = l.radix();
    let r = l.order() as u64;
    let lr = l.leading().unwrap();
    let dr = lr.degree().unwrap();
    if dr < checked_pow(b, r - 1)? {
        return Ok(Poly::one());
    }
    // ⌊log_b(3 dr)⌋ by repeated multiplication.
    let mut top = 0u64;
    let mut p = b as u128;
    while p <= 3 * dr as u128 {
        top += 1;
        p *= b as u128;
    }
    let mut out = Poly::one();
    let mut g = graeffe(lr, b, r)?;
    for k in r..=top {
        if k > r {
            g = graeffe(&g, b, 1)?;
        }
        out = &out * &g;
    }
    Ok(out.monic())
}

/// Common denominator and numerators of a rational basis, unreduced.
struct RawRationalBasis {
    v_bar: u64,
    q_star: Poly,
    numerators: Vec<Poly>,
}

impl RawRationalBasis {
    fn elements(&self) -> Result<Vec<RationalFunction>> {
        self.numerators
            .iter()
            .map(|p| RationalFunction::new(p.clone(), self.v_bar, self.q_star.clone()))
            .collect()
    }
}

fn raw_rational_basis(l: &MahlerOperator, opts: &SolveOptions, shortcut: bool) -> Result<RawRationalBasis> {
    let empty = RawRationalBasis { v_bar: 0, q_star: Poly::one(), numerators: vec![] };
    let Some(l) = prepare(l, opts)? else { return Ok(empty) };
    let b = l.radix();
    let r = l.order() as u64;
    let delta = l.degree().unwrap();
    if shortcut && delta < checked_pow(b, r - 1)? {
        let sum = l.coeffs().iter().fold(Poly::zero(), |a, c| &a + c);
        let numerators = if sum.is_zero() { vec![Poly::one()] } else { vec![] };
        return Ok(RawRationalBasis { numerators, ..empty });
    }
    let bound = denominator_bound(&l)?;
    let (q, v) = (&bound.q_star, bound.v_bar);
    let top = (b as u128 * delta as u128) / (b as u128 - 1);
    let images: Vec<Poly> = (0..=r).map(|i| mahler_substitute(q, b, i)).collect::<Result<_>>()?;
    let mut coeffs = Vec::with_capacity(r as usize + 1);
    for (k, lk) in l.coeffs().iter().enumerate() {
        let ek = top
            .checked_sub(checked_pow(b, k as u64)? as u128 * v as u128)
            .ok_or_else(|| Error::Invariant("negative shift in the auxiliary equation".into()))?;
        let mut c = lk.shift(u64::try_from(ek).map_err(|_| overflow("shift"))?)?;
        for (i, m) in images.iter().enumerate() {
            if i != k {
                c = &c * m;
            }
        }
        coeffs.push(c);
    }
    let lt = MahlerOperator::new(b, coeffs);
    let w = q.degree().unwrap() + 2 * v + 1;
    let sols = polynomial_solutions_bounded_with(&lt, w as usize, opts)?;
    Ok(RawRationalBasis { v_bar: v, q_star: q.clone(), numerators: sols.elements })
}

/// Basis of the rational solutions.
pub fn rational_basis(l: &MahlerOperator) -> Result<SolutionBasis<RationalFunction>> {
    rational_basis_with(l, &SolveOptions::default())
}

pub fn rational_basis_with(
    l: &MahlerOperator,
    opts: &SolveOptions,
) -> Result<SolutionBasis<RationalFunction>> {
    Ok(SolutionBasis { elements: raw_rational_basis(l, opts, true)?.elements()? })
}

/// Same as [`rational_basis_with`] but always runs the full bound and search,
/// even when the degree test already rules out nonconstant solutions.
pub fn rational_basis_unshortcut(
    l: &MahlerOperator,
    opts: &SolveOptions,
) -> Result<SolutionBasis<RationalFunction>> {
    Ok(SolutionBasis { elements: raw_rational_basis(l, opts, false)?.elements()? })
}

/// Common denominator and reduced-echelon numerators spanning the same space.
pub fn canonical_span(fs: &[RationalFunction]) -> Result<(Poly, Vec<Poly>)> {
    let mut den = Poly::one();
    for f in fs {
        den = den.lcm(&f.full_denominator()?);
    }
    let rows: Vec<Vec<Rational>> = fs
        .iter()
        .map(|f| Ok((&f.numerator * &den.exact_div(&f.full_denominator()?)?).to_dense()))
        .collect::<Result<_>>()?;
    Ok((den, reduced_echelon(rows).iter().map(|v| Poly::from_dense(v)).collect()))
}

/// Solutions in `ℚ(x^(1/*))`.
pub fn ramified_rational_basis(l: &MahlerOperator) -> Result<SolutionBasis<RamifiedRational>> {
    ramified_rational_basis_with(l, &SolveOptions::default())
}

pub fn ramified_rational_basis_with(
    l: &MahlerOperator,
    opts: &SolveOptions,
) -> Result<SolutionBasis<RamifiedRational>> {
    if l.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let w = l.m_valuation().unwrap();
    let ls = l.strip_right_m(w);
    if ls.order() == 0 {
        return Ok(SolutionBasis::empty());
    }
    let (_, n) = ramification_data(&ls)?;
    let vmin = ls.valuations().into_iter().flatten().min().unwrap();
    let gamma = i64::try_from(n as u128 * vmin as u128).map_err(|_| overflow("gamma"))?;
    let phi = PhiTransform::new(0, n, gamma);
    let lt = ls.phi_apply(&phi)?;
    let ram = checked_pow(ls.radix(), w as u64)?.checked_mul(n).ok_or_else(|| overflow("ramification"))?;
    let elements = rational_basis_with(&lt, opts)?
        .elements
        .into_iter()
        .map(|function| RamifiedRational { ramification: ram, function }.reduced())
        .collect();
    Ok(SolutionBasis { elements })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Rational,
    Transcendental,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestMethod {
    RationalBasis,
    BellCoons,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscendenceVerdict {
    pub verdict: Verdict,
    pub witness: Option<RationalFunction>,
    pub method: TestMethod,
}

/// Normalized operator and `⌊ν⌋ + 1`, or `None` when only `y = 0` is a series solution.
fn series_context(l: &MahlerOperator, opts: &SolveOptions) -> Result<Option<(MahlerOperator, usize)>> {
    let Some(lp) = prepare(l, opts)? else { return Ok(None) };
    let f = floor_i64(&mu_nu(&lp)?.0)?;
    Ok(if f < 0 { None } else { Some((lp, f as usize + 1)) })
}

/// Checks that `prefix` is the start of a series solution and extends it to `len`.
fn checked_prefix(l: &MahlerOperator, prefix: &[Rational], len: usize, opts: &SolveOptions) -> Result<Option<Vec<Rational>>> {
    match series_context(l, opts)? {
        None => {
            if prefix.iter().all(Zero::is_zero) {
                Ok(None)
            } else {
                Err(Error::IncompatiblePrefix)
            }
        }
        Some((lp, need)) => {
            if prefix.len() < need {
                return Err(Error::InsufficientPrefix { need, got: prefix.len() });
            }
            let pro = Prolonger::new(&lp, &PhiTransform::identity())?;
            Ok(Some(pro.extend(prefix, len.saturating_sub(prefix.len()))?))
        }
    }
}

/// Decides whether the series solution starting with `prefix` is rational.
pub fn transcendence_test(l: &MahlerOperator, prefix: &[Rational]) -> Result<TranscendenceVerdict> {
    transcendence_test_with(l, prefix, &SolveOptions::default())
}

pub fn transcendence_test_with(
    l: &MahlerOperator,
    prefix: &[Rational],
    opts: &SolveOptions,
) -> Result<TranscendenceVerdict> {
    let rational = |w: RationalFunction| TranscendenceVerdict {
        verdict: Verdict::Rational,
        witness: Some(w),
        method: TestMethod::RationalBasis,
    };
    if checked_prefix(l, prefix, 0, opts)?.is_none() {
        return Ok(rational(RationalFunction::zero()));
    }
    let raw = raw_rational_basis(l, opts, true)?;
    let (s, unit) = raw.q_star.split_x_power();
    let v = (raw.v_bar + s) as usize;
    let len = prefix.len();
    let cols: Vec<Vec<Rational>> = raw
        .numerators
        .iter()
        .map(|p| series_quotient(p, &unit, len + v))
        .collect();
    let rows: Vec<Vec<Rational>> =
        (0..len + v).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let rhs: Vec<Rational> = std::iter::repeat_n(Rational::zero(), v).chain(prefix.iter().cloned()).collect();
    match solve(&rows, &rhs, cols.len()) {
        Some(c) => {
            let num = raw
                .numerators
                .iter()
                .zip(&c)
                .fold(Poly::zero(), |a, (p, ci)| &a + &p.scale(ci));
            Ok(rational(RationalFunction::new(num, raw.v_bar, raw.q_star)?))
        }
        None => Ok(TranscendenceVerdict {
            verdict: Verdict::Transcendental,
            witness: None,
            method: TestMethod::RationalBasis,
        }),
    }
}

/// `(κ, B)` of the Hankel criterion.
pub fn bell_coons_sizes(l: &MahlerOperator) -> Result<(u64, u64)> {
    require_bound_input(l)?;
    let b = BigInt::from(l.radix());
    let r = l.order() as u32;
    let d = BigInt::from(l.degree().unwrap());
    let one = BigInt::one();
    let br = num::pow(b.clone(), r as usize);
    let k1 = (&b - &one) * &d / (&br * &b - &br * 2 + &one);
    let k2 = &d / ((&b - &one) * num::pow(b.clone(), r as usize - 1));
    let kappa = k1 + k2 + &one;
    let big_b = &d + &kappa * (&br * &b - &one) / (&b - &one);
    let fit = |v: BigInt| u64::try_from(v).map_err(|_| overflow("Hankel size"));
    Ok((fit(kappa)?, fit(big_b)?))
}

/// Whether the Hankel matrix `(y_(i+j))`, `i ≤ κ`, `j ≤ B`, has full rank `κ + 1`.
pub fn bell_coons_rank(l: &MahlerOperator, series: &[Rational]) -> Result<bool> {
    let (kappa, big_b) = bell_coons_sizes(l)?;
    let need = kappa as usize + big_b as usize + 1;
    if series.len() < need {
        return Err(Error::InsufficientPrefix { need, got: series.len() });
    }
    let rows: Vec<Vec<Rational>> = (0..=kappa as usize)
        .map(|i| series[i..=i + big_b as usize].to_vec())
        .collect();
    Ok(rank(rows) == kappa as usize + 1)
}

/// Hankel-rank verdict after prolonging `prefix` as far as the criterion needs.
pub fn bell_coons_test(l: &MahlerOperator, prefix: &[Rational]) -> Result<TranscendenceVerdict> {
    bell_coons_test_with(l, prefix, &SolveOptions::default())
}

pub fn bell_coons_test_with(
    l: &MahlerOperator,
    prefix: &[Rational],
    opts: &SolveOptions,
) -> Result<TranscendenceVerdict> {
    let Some(lp) = prepare(l, opts)? else {
        checked_prefix(l, prefix, 0, opts)?;
        return Ok(TranscendenceVerdict { verdict: Verdict::Rational, witness: None, method: TestMethod::BellCoons });
    };
    let (kappa, big_b) = bell_coons_sizes(&lp)?;
    let need = kappa as usize + big_b as usize + 1;
    let series = checked_prefix(&lp, prefix, need, opts)?.unwrap_or_else(|| vec![Rational::zero(); need]);
    let verdict = if bell_coons_rank(&lp, &series)? { Verdict::Transcendental } else { Verdict::Rational };
    Ok(TranscendenceVerdict { verdict, witness: None, method: TestMethod::BellCoons })
}
