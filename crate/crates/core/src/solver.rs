//! Series, polynomial and Puiseux solution bases.

use num::{BigInt, One, Zero};

use crate::error::{checked_pow, overflow, Error, Result};
use crate::exec::Exec;
use crate::newton::{mu_nu, ramification_data, select_edge_for_ramification};
use crate::normalize::normalize_l0;
use crate::operator::{MahlerOperator, PhiTransform};
use crate::poly::{floor_i64, Poly, Rational};
use crate::rmatrix::{solve_prescribed_with, Orientation, Prolonger};

/// `c_0 + c_1 x + ⋯ + c_T x^T + O(x^(T+1))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub coefficients: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn truncation_order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn valuation(&self) -> Option<usize> {
        self.coefficients.iter().position(|c| !c.is_zero())
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_dense(&self.coefficients)
    }
}

/// `Σ c_i x^(e_i) + O(x^τ)` with exponent denominators dividing `ramification`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxSeries {
    pub ramification: u64,
    pub terms: Vec<(Rational, Rational)>,
    pub truncation_order: Rational,
}

impl PuiseuxSeries {
    pub fn valuation(&self) -> Option<&Rational> {
        self.terms.first().map(|t| &t.0)
    }

    /// Unramified view of a series.
    pub fn from_series(s: &TruncatedSeries) -> Self {
        PuiseuxSeries {
            ramification: 1,
            terms: s
                .coefficients
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (Rational::from_integer(BigInt::from(i)), c.clone()))
                .collect(),
            truncation_order: Rational::from_integer(BigInt::from(s.coefficients.len())),
        }
    }
}

/// A canonical basis: echelon-reduced with monic pivots at the leading exponents, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionBasis<T> {
    pub elements: Vec<T>,
}

impl<T> SolutionBasis<T> {
    pub fn empty() -> Self {
        SolutionBasis { elements: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Solver switches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Normalize operators with `ℓ_0 = 0` instead of failing.
    pub auto_normalize: bool,
    pub exec: Exec,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { auto_normalize: true, exec: Exec::default() }
    }
}

/// Operator with `ℓ_0 ≠ 0` equivalent to `l` over `ℚ((x))`; `None` when only `y = 0` solves it.
pub(crate) fn prepare(l: &MahlerOperator, opts: &SolveOptions) -> Result<Option<MahlerOperator>> {
    if l.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let l = if l.coeff(0).is_zero() {
        if !opts.auto_normalize {
            return Err(Error::ZeroTrailingCoefficient);
        }
        normalize_l0(l)?.primitive
    } else {
        l.clone()
    };
    Ok(if l.order() == 0 { None } else { Some(l) })
}

fn nonneg_floor(q: &Rational) -> Result<Option<u64>> {
    let f = floor_i64(q)?;
    Ok(if f < 0 { None } else { Some(f as u64) })
}

/// Truncations to order `⌊ν⌋+1` of all power-series solutions.
pub fn approximate_series_basis(l: &MahlerOperator) -> Result<SolutionBasis<TruncatedSeries>> {
    approximate_series_basis_with(l, &SolveOptions::default())
}

pub fn approximate_series_basis_with(
    l: &MahlerOperator,
    opts: &SolveOptions,
) -> Result<SolutionBasis<TruncatedSeries>> {
    let Some(l) = prepare(l, opts)? else { return Ok(SolutionBasis::empty()) };
    approximate_prepared(&l, opts.exec)
}

fn approximate_prepared(l: &MahlerOperator, exec: Exec) -> Result<SolutionBasis<TruncatedSeries>> {
    let (nu, mu) = mu_nu(l)?;
    let Some(fnu) = nonneg_floor(&nu)? else { return Ok(SolutionBasis::empty()) };
    let h = nonneg_floor(&mu)?.ok_or_else(|| Error::Invariant("mu < 0 with nu >= 0".into()))? + 1;
    let w = fnu as usize + 1;
    let mut e = Vec::with_capacity(w);
    for n in 0..w as u64 {
        let mut best: Option<u64> = None;
        for (k, c) in l.coeffs().iter().enumerate() {
            let Some(vk) = c.valuation() else { continue };
            let Ok(bk) = l.radix_pow(k) else { continue };
            let Some(v) = bk.checked_mul(n).and_then(|t| t.checked_add(vk)) else { continue };
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        e.push(best.expect("l_0 is nonzero"));
    }
    let k = solve_prescribed_with(l, &PhiTransform::identity(), h, w, &e, Orientation::Lower, exec)?;
    Ok(SolutionBasis {
        elements: k.vectors.into_iter().map(|c| TruncatedSeries { coefficients: c }).collect(),
    })
}

/// Power-series solutions to truncation order `n + 1`.
///
/// When `n < ⌊ν⌋` the approximate solutions are returned unshortened, since
/// cutting them could merge distinct solutions.
pub fn series_basis(l: &MahlerOperator, n: usize) -> Result<SolutionBasis<TruncatedSeries>> {
    series_basis_with(l, n, &SolveOptions::default())
}

pub fn series_basis_with(
    l: &MahlerOperator,
    n: usize,
    opts: &SolveOptions,
) -> Result<SolutionBasis<TruncatedSeries>> {
    let Some(l) = prepare(l, opts)? else { return Ok(SolutionBasis::empty()) };
    let approx = approximate_prepared(&l, opts.exec)?;
    if approx.is_empty() {
        return Ok(approx);
    }
    let pro = Prolonger::new(&l, &PhiTransform::identity())?;
    let extra = (n + 1).saturating_sub(pro.approx_len());
    extend_all(&pro, approx, extra, opts.exec)
}

fn extend_all(
    pro: &Prolonger,
    approx: SolutionBasis<TruncatedSeries>,
    extra: usize,
    exec: Exec,
) -> Result<SolutionBasis<TruncatedSeries>> {
    if extra == 0 {
        return Ok(approx);
    }
    let elements = exec
        .map(&approx.elements, |s| pro.extend(&s.coefficients, extra))
        .into_iter()
        .map(|r| r.map(|c| TruncatedSeries { coefficients: c }))
        .collect::<Result<_>>()?;
    Ok(SolutionBasis { elements })
}

/// Polynomial solutions of degree `< w`.
pub fn polynomial_solutions_bounded(l: &MahlerOperator, w: usize) -> Result<SolutionBasis<Poly>> {
    polynomial_solutions_bounded_with(l, w, &SolveOptions::default())
}

pub fn polynomial_solutions_bounded_with(
    l: &MahlerOperator,
    w: usize,
    opts: &SolveOptions,
) -> Result<SolutionBasis<Poly>> {
    if w == 0 {
        return Err(Error::InvalidArgument("degree bound w must be at least 1".into()));
    }
    let Some(l) = prepare(l, opts)? else { return Ok(SolutionBasis::empty()) };
    let (nu, _) = mu_nu(&l)?;
    if nonneg_floor(&nu)?.is_none() {
        return Ok(SolutionBasis::empty());
    }
    let r = l.order();
    let d = l.degree().unwrap();
    let br = l.radix_pow(r)?;
    let h = (w as u64 - 1)
        .checked_mul(br)
        .and_then(|t| t.checked_add(d + 1))
        .ok_or_else(|| overflow("polynomial bound"))?;
    let mut e = Vec::with_capacity(w);
    for n in 0..w as u64 {
        let mut best = 0u64;
        for (k, c) in l.coeffs().iter().enumerate() {
            let Some(dk) = c.degree() else { continue };
            let v = l
                .radix_pow(k)?
                .checked_mul(n)
                .and_then(|t| t.checked_add(dk))
                .ok_or_else(|| overflow("polynomial rows"))?;
            best = best.max(v);
        }
        e.push(best);
    }
    let k = solve_prescribed_with(&l, &PhiTransform::identity(), h, w, &e, Orientation::Upper, opts.exec)?;
    Ok(SolutionBasis { elements: k.vectors.iter().map(|v| Poly::from_dense(v)).collect() })
}

/// All polynomial solutions.
pub fn polynomial_basis(l: &MahlerOperator) -> Result<SolutionBasis<Poly>> {
    polynomial_basis_with(l, &SolveOptions::default())
}

pub fn polynomial_basis_with(l: &MahlerOperator, opts: &SolveOptions) -> Result<SolutionBasis<Poly>> {
    let Some(lp) = prepare(l, opts)? else { return Ok(SolutionBasis::empty()) };
    polynomial_solutions_bounded_with(&lp, polynomial_degree_bound(&lp)? as usize + 1, opts)
}

/// `⌊max_k d_k / (b^(r−1)(b−1))⌋`.
pub fn polynomial_degree_bound(l: &MahlerOperator) -> Result<u64> {
    let r = l.order() as u64;
    let b = l.radix();
    let denom = checked_pow(b, r.saturating_sub(1))?.checked_mul(b - 1).ok_or_else(|| overflow("bound"))?;
    Ok(l.degree().unwrap_or(0) / denom)
}

/// Puiseux solutions in `ℚ((x^(1/N)))`, truncated after exponent `n`.
pub fn puiseux_basis(l: &MahlerOperator, n_ram: u64, n: u64) -> Result<SolutionBasis<PuiseuxSeries>> {
    puiseux_basis_with(l, n_ram, n, &SolveOptions::default())
}

pub fn puiseux_basis_with(
    l: &MahlerOperator,
    n_ram: u64,
    n: u64,
    opts: &SolveOptions,
) -> Result<SolutionBasis<PuiseuxSeries>> {
    let (l1, w) = strip(l)?;
    if l1.order() == 0 {
        return Ok(SolutionBasis::empty());
    }
    let bw = l.radix_pow(w)?;
    let inner_n = n.checked_mul(bw).ok_or_else(|| overflow("order"))?;
    let basis = puiseux_core(&l1, n_ram, inner_n, opts.exec)?;
    Ok(rescale(basis, bw))
}

/// Puiseux solutions with the ramification index detected from the Newton polygon.
pub fn puiseux_basis_all(l: &MahlerOperator, n: u64) -> Result<SolutionBasis<PuiseuxSeries>> {
    puiseux_basis_all_with(l, n, &SolveOptions::default())
}

pub fn puiseux_basis_all_with(
    l: &MahlerOperator,
    n: u64,
    opts: &SolveOptions,
) -> Result<SolutionBasis<PuiseuxSeries>> {
    let (l1, _) = strip(l)?;
    if l1.order() == 0 {
        return Ok(SolutionBasis::empty());
    }
    let (_, n_ram) = ramification_data(&l1)?;
    puiseux_basis_with(l, n_ram, n, opts)
}

fn strip(l: &MahlerOperator) -> Result<(MahlerOperator, usize)> {
    let w = l.m_valuation().ok_or(Error::ZeroOperator)?;
    Ok((l.strip_right_m(w), w))
}

fn rescale(basis: SolutionBasis<PuiseuxSeries>, bw: u64) -> SolutionBasis<PuiseuxSeries> {
    if bw == 1 {
        return basis;
    }
    let f = Rational::from_integer(BigInt::from(bw));
    SolutionBasis {
        elements: basis
            .elements
            .into_iter()
            .map(|s| PuiseuxSeries {
                ramification: s.ramification * bw,
                terms: s.terms.into_iter().map(|(e, c)| (e / &f, c)).collect(),
                truncation_order: s.truncation_order / &f,
            })
            .collect(),
    }
}

/// The substitution of the rightmost admissible edge with slope in `N^{-1}ℤ`.
pub fn ramification_transform(l: &MahlerOperator, n_ram: u64) -> Result<(Rational, PhiTransform)> {
    let (s, c) = select_edge_for_ramification(l, n_ram)?;
    let nq = Rational::from_integer(BigInt::from(n_ram));
    let to_i64 = |q: Rational| -> Result<i64> {
        debug_assert!(q.is_integer());
        i64::try_from(q.to_integer()).map_err(|_| overflow("transform"))
    };
    let alpha = to_i64(-(&s * &nq))?;
    let gamma = to_i64(&c * &nq)?;
    Ok((s, PhiTransform::new(alpha, n_ram, gamma)))
}

fn puiseux_core(l: &MahlerOperator, n_ram: u64, n: u64, exec: Exec) -> Result<SolutionBasis<PuiseuxSeries>> {
    if n_ram == 0 || num::Integer::gcd(&n_ram, &l.radix()) != 1 {
        return Err(Error::InvalidArgument(format!(
            "ramification {n_ram} must be positive and coprime to the radix"
        )));
    }
    let phi = match ramification_transform(l, n_ram) {
        Ok((_, phi)) => phi,
        Err(Error::NoAdmissibleEdge(_)) => return Ok(SolutionBasis::empty()),
        Err(e) => return Err(e),
    };
    let lt = l.phi_apply(&phi)?;
    for (k, (vt, v)) in lt.valuations().iter().zip(l.valuations()).enumerate() {
        if let (Some(vt), Some(v)) = (vt, v) {
            let bk = l.radix_pow(k)? as i128;
            let expect = -(phi.gamma as i128) + phi.alpha as i128 * bk + phi.beta as i128 * v as i128;
            if *vt as i128 != expect {
                return Err(Error::Invariant("transformed valuations disagree".into()));
            }
        }
    }
    let approx = approximate_prepared(&lt, exec)?;
    if approx.is_empty() {
        return Ok(SolutionBasis::empty());
    }
    let pro = Prolonger::new(&lt, &PhiTransform::identity())?;
    // Last t-index needed: N(s + n).
    let top = -(phi.alpha as i128) + n_ram as i128 * n as i128;
    let extra = (top + 1 - pro.approx_len() as i128).max(0);
    let extra = usize::try_from(extra).map_err(|_| overflow("prolongation length"))?;
    let z = extend_all(&pro, approx, extra, exec)?;
    let nq = Rational::from_integer(BigInt::from(n_ram));
    let shift = |i: i128| Rational::new(BigInt::from(i + phi.alpha as i128), BigInt::one()) / &nq;
    Ok(SolutionBasis {
        elements: z
            .elements
            .into_iter()
            .map(|zs| {
                let len = zs.coefficients.len() as i128;
                PuiseuxSeries {
                    ramification: n_ram,
                    terms: zs
                        .coefficients
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(i, c)| (shift(i as i128), c))
                        .collect(),
                    truncation_order: shift(len),
                }
            })
            .collect(),
    })
}

/// Smallest exponent of `L` applied to the missing tail of a truncation at `tau`.
fn tail_bound(l: &MahlerOperator, tau: &Rational) -> Result<Rational> {
    let mut best: Option<Rational> = None;
    for (k, c) in l.coeffs().iter().enumerate() {
        let Some(v) = c.valuation() else { continue };
        let bk = Rational::from_integer(BigInt::from(l.radix_pow(k)?));
        let e = Rational::from_integer(BigInt::from(v)) + bk * tau;
        if best.as_ref().is_none_or(|b| e < *b) {
            best = Some(e);
        }
    }
    best.ok_or(Error::ZeroOperator)
}

/// Verifies `L y ≡ 0` below the order guaranteed by the truncation and returns that order.
pub fn certify_series(l: &MahlerOperator, s: &TruncatedSeries) -> Result<Rational> {
    certify_puiseux(l, &PuiseuxSeries::from_series(s))
}

/// As [`certify_series`] for a Puiseux series: `L ŷ = O(x^e)` with the returned `e`.
pub fn certify_puiseux(l: &MahlerOperator, s: &PuiseuxSeries) -> Result<Rational> {
    let e = tail_bound(l, &s.truncation_order)?;
    let nb = BigInt::from(s.ramification);
    let nq = Rational::from_integer(nb.clone());
    let scaled_bound = (&e * &nq).ceil().to_integer();
    // Work with exponents scaled by the ramification index.
    let mut acc: Vec<(BigInt, Rational)> = Vec::new();
    for (k, c) in l.coeffs().iter().enumerate() {
        let bk = BigInt::from(l.radix_pow(k)?);
        for (a, y) in &s.terms {
            let sa = (a * &nq).to_integer();
            for (j, v) in c.terms() {
                let ex = &sa * &bk + BigInt::from(*j) * &nb;
                if ex < scaled_bound {
                    acc.push((ex, v * y));
                }
            }
        }
    }
    acc.sort_by(|x, y| x.0.cmp(&y.0));
    let mut i = 0;
    while i < acc.len() {
        let mut sum = Rational::zero();
        let mut j = i;
        while j < acc.len() && acc[j].0 == acc[i].0 {
            sum += &acc[j].1;
            j += 1;
        }
        if !sum.is_zero() {
            return Err(Error::Invariant(format!("residual term at exponent {}/{}", acc[i].0, nb)));
        }
        i = j;
    }
    Ok(e)
}
