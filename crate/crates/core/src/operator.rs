//! Linear Mahler operators `L = Σ ℓ_k M^k` with `M x = x^b M`.

use std::fmt;

use num::{One, Zero};

use crate::error::{checked_pow, overflow, Error, Result};
use crate::exec::Exec;
use crate::poly::{mahler_substitute, Poly, Rational, ZERO_POLY};

/// A Mahler operator of radix `b`; the zero operator has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MahlerOperator {
    radix: u64,
    coeffs: Vec<Poly>,
}

/// The substitution `φ(x^j M^k) = x^(α b^k + β j − γ) M^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhiTransform {
    pub alpha: i64,
    pub beta: u64,
    pub gamma: i64,
}

impl PhiTransform {
    pub fn identity() -> Self {
        PhiTransform { alpha: 0, beta: 1, gamma: 0 }
    }

    pub fn new(alpha: i64, beta: u64, gamma: i64) -> Self {
        PhiTransform { alpha, beta, gamma }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub(crate) fn check(&self, radix: u64) -> Result<()> {
        if self.beta == 0 || num::Integer::gcd(&self.beta, &radix) != 1 {
            return Err(Error::InvalidArgument(format!(
                "beta = {} must be positive and coprime to the radix {radix}",
                self.beta
            )));
        }
        Ok(())
    }

    /// Image exponent of `x^j M^k` given `b^k`.
    pub(crate) fn exponent(&self, bk: u64, j: u64) -> Result<i128> {
        let v = self.alpha as i128 * bk as i128 + self.beta as i128 * j as i128 - self.gamma as i128;
        Ok(v)
    }
}

impl MahlerOperator {
    /// Builds an operator, trimming zero leading coefficients.
    pub fn new(radix: u64, mut coeffs: Vec<Poly>) -> Self {
        assert!(radix >= 2, "radix must be at least 2");
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        MahlerOperator { radix, coeffs }
    }

    pub fn zero(radix: u64) -> Self {
        Self::new(radix, Vec::new())
    }

    pub fn one(radix: u64) -> Self {
        Self::new(radix, vec![Poly::one()])
    }

    /// The operator `M^k`.
    pub fn m_power(radix: u64, k: usize) -> Self {
        let mut c = vec![Poly::zero(); k];
        c.push(Poly::one());
        Self::new(radix, c)
    }

    pub fn radix(&self) -> u64 {
        self.radix
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Poly {
        self.coeffs.get(k).unwrap_or(&ZERO_POLY)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order `r`; zero for the zero operator.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&Poly> {
        self.coeffs.last()
    }

    /// Maximum coefficient degree.
    pub fn degree(&self) -> Option<u64> {
        self.coeffs.iter().filter_map(Poly::degree).max()
    }

    /// Least `k` with `ℓ_k ≠ 0`.
    pub fn m_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn valuations(&self) -> Vec<Option<u64>> {
        self.coeffs.iter().map(Poly::valuation).collect()
    }

    pub fn degrees(&self) -> Vec<Option<u64>> {
        self.coeffs.iter().map(Poly::degree).collect()
    }

    /// `b^k`, checked.
    pub fn radix_pow(&self, k: usize) -> Result<u64> {
        checked_pow(self.radix, k as u64)
    }

    /// All monomials `(k, j, ℓ_{k,j})`.
    pub fn monomials(&self) -> impl Iterator<Item = (usize, u64, &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .flat_map(|(k, p)| p.terms().iter().map(move |(j, c)| (k, *j, c)))
    }

    fn same_radix(&self, o: &Self) -> Result<()> {
        if self.radix != o.radix {
            return Err(Error::RadixMismatch(self.radix, o.radix));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_radix(o)?;
        let n = self.coeffs.len().max(o.coeffs.len());
        Ok(Self::new(self.radix, (0..n).map(|k| self.coeff(k) + o.coeff(k)).collect()))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_radix(o)?;
        let n = self.coeffs.len().max(o.coeffs.len());
        Ok(Self::new(self.radix, (0..n).map(|k| self.coeff(k) - o.coeff(k)).collect()))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.radix, self.coeffs.iter().map(|c| -c).collect())
    }

    /// Left multiplication by a polynomial.
    pub fn scale_left(&self, p: &Poly) -> Self {
        Self::new(self.radix, self.coeffs.iter().map(|c| p * c).collect())
    }

    /// Right multiplication by `M^w`.
    pub fn shift_right_m(&self, w: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![Poly::zero(); w];
        c.extend(self.coeffs.iter().cloned());
        Self::new(self.radix, c)
    }

    /// Removes a right factor `M^w`; the caller guarantees `w ≤` M-valuation.
    pub fn strip_right_m(&self, w: usize) -> Self {
        debug_assert!(self.m_valuation().is_none_or(|v| v >= w));
        Self::new(self.radix, self.coeffs.iter().skip(w).cloned().collect())
    }

    /// Operator product `A·B`.
    pub fn multiply(&self, o: &Self) -> Result<Self> {
        self.same_radix(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(self.radix));
        }
        let mut out = vec![Poly::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (kk, bcoef) in o.coeffs.iter().enumerate() {
                if bcoef.is_zero() {
                    continue;
                }
                let t = a * &mahler_substitute(bcoef, self.radix, k as u64)?;
                out[k + kk] = &out[k + kk] + &t;
            }
        }
        Ok(Self::new(self.radix, out))
    }

    /// `p·M^k·self`.
    fn left_term_times(&self, p: &Poly, k: usize) -> Result<Self> {
        let mut out = vec![Poly::zero(); k];
        for c in &self.coeffs {
            out.push(p * &mahler_substitute(c, self.radix, k as u64)?);
        }
        Ok(Self::new(self.radix, out))
    }

    /// Fraction-free right pseudo-division: `c·A = Q·B + R` with `order R < order B`.
    pub fn right_divide(&self, b: &Self) -> Result<(Poly, Self, Self)> {
        self.same_radix(b)?;
        if b.is_zero() {
            return Err(Error::ZeroOperator);
        }
        let s = b.order();
        let lb = b.leading().unwrap();
        let mut c = Poly::one();
        let mut q = Self::zero(self.radix);
        let mut r = self.clone();
        while !r.is_zero() && r.order() >= s {
            let k = r.order() - s;
            let a = r.leading().unwrap().clone();
            let mlb = mahler_substitute(lb, self.radix, k as u64)?;
            let g = mlb.gcd(&a);
            let m = mlb.exact_div(&g)?;
            let t = a.exact_div(&g)?;
            let sub = b.left_term_times(&t, k)?;
            let next = r.scale_left(&m).sub(&sub)?;
            if !next.is_zero() && next.order() >= r.order() {
                return Err(Error::Invariant("pseudo-division did not reduce the order".into()));
            }
            r = next;
            c = &m * &c;
            q = q.scale_left(&m).add(&Self::m_power(self.radix, k).scale_left(&t))?;
        }
        Ok((c, q, r))
    }

    /// Applies `φ` coefficientwise.
    pub fn phi_apply(&self, phi: &PhiTransform) -> Result<Self> {
        phi.check(self.radix)?;
        if phi.is_identity() {
            return Ok(self.clone());
        }
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            let bk = self.radix_pow(k)?;
            let mut terms = Vec::with_capacity(c.len());
            for (j, v) in c.terms() {
                let e = phi.exponent(bk, *j)?;
                if e < 0 {
                    return Err(Error::NegativeExponent);
                }
                let e = u64::try_from(e).map_err(|_| overflow("phi"))?;
                terms.push((e, v.clone()));
            }
            out.push(Poly::from_canonical(terms));
        }
        Ok(Self::new(self.radix, out))
    }

    /// The section `S_i`: `x^j M^(k+1) ↦ x^((j−i)/b) M^k` when `b | j − i`, else 0.
    pub fn section(&self, i: u64) -> Self {
        assert!(i < self.radix);
        let b = self.radix;
        let out = self
            .coeffs
            .iter()
            .skip(1)
            .map(|c| {
                Poly::from_canonical(
                    c.terms()
                        .iter()
                        .filter(|(j, _)| *j >= i && (j - i).is_multiple_of(b))
                        .map(|(j, v)| ((j - i) / b, v.clone()))
                        .collect(),
                )
            })
            .collect();
        Self::new(self.radix, out)
    }

    /// `Σ_i x^i M S_i`, the inverse of taking all sections.
    pub fn from_sections(radix: u64, sections: &[Self]) -> Result<Self> {
        let mut acc = Self::zero(radix);
        for (i, s) in sections.iter().enumerate() {
            let t = s.left_term_times(&Poly::monomial(i as u64, Rational::one()), 1)?;
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// `R(L_1, L_2) = c_2 L_1 − c_1 L_2` for operators of M-valuation 0.
    pub fn interreduce(&self, o: &Self) -> Result<Self> {
        self.same_radix(o)?;
        if self.m_valuation() != Some(0) || o.m_valuation() != Some(0) {
            return Err(Error::InvalidArgument("interreduce needs M-valuation 0".into()));
        }
        self.scale_left(&o.coeffs[0]).sub(&o.scale_left(&self.coeffs[0]))
    }

    /// `(content, primitive)` with `self = content·primitive` and `ℓ_r` of the primitive part monic.
    pub fn primitive_part(&self) -> Result<(Poly, Self)> {
        if self.is_zero() {
            return Err(Error::ZeroOperator);
        }
        let mut g = Poly::zero();
        for c in self.coeffs.iter().filter(|c| !c.is_zero()) {
            g = g.gcd(c);
            if g.degree() == Some(0) {
                break;
            }
        }
        let mut prim: Vec<Poly> = self
            .coeffs
            .iter()
            .map(|c| if c.is_zero() { Ok(Poly::zero()) } else { c.exact_div(&g) })
            .collect::<Result<_>>()?;
        let lc = prim.last().unwrap().leading_coeff().unwrap().clone();
        let inv = lc.recip();
        for c in &mut prim {
            *c = c.scale(&inv);
        }
        Ok((g.scale(&lc), Self::new(self.radix, prim)))
    }

    /// `L y mod x^t` for a dense series `y`.
    pub fn apply_truncated(&self, y: &[Rational], t: usize) -> Result<Vec<Rational>> {
        self.apply_truncated_with(y, t, Exec::default())
    }

    pub fn apply_truncated_with(&self, y: &[Rational], t: usize, exec: Exec) -> Result<Vec<Rational>> {
        let powers: Vec<Option<u64>> =
            (0..self.coeffs.len()).map(|k| self.radix_pow(k).ok()).collect();
        const CHUNK: usize = 4096;
        let chunks = t.div_ceil(CHUNK);
        let parts = exec.map_range(chunks, |ci| {
            let lo = ci * CHUNK;
            let hi = (lo + CHUNK).min(t);
            let mut out = vec![Rational::zero(); hi - lo];
            for (k, c) in self.coeffs.iter().enumerate() {
                for (j, v) in c.terms() {
                    let j = *j as usize;
                    if j >= hi {
                        break;
                    }
                    match powers[k] {
                        Some(bk) if bk as u128 <= usize::MAX as u128 => {
                            let bk = bk as usize;
                            let first = if lo > j { (lo - j).div_ceil(bk) } else { 0 };
                            let last = ((hi - 1 - j) / bk).min(y.len().saturating_sub(1));
                            if y.is_empty() {
                                continue;
                            }
                            for n in first..=last {
                                if !y[n].is_zero() {
                                    out[j + bk * n - lo] += v * &y[n];
                                }
                            }
                        }
                        _ => {
                            if j >= lo && !y.is_empty() && !y[0].is_zero() {
                                out[j - lo] += v * &y[0];
                            }
                        }
                    }
                }
            }
            out
        });
        Ok(parts.into_iter().flatten().collect())
    }

    /// `L y` for a sparse `y`, truncated modulo `x^t` when `t` is given.
    pub fn apply_sparse(&self, y: &Poly, t: Option<u64>) -> Result<Poly> {
        let mut acc = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let bk = self.radix_pow(k);
            for (n, yn) in y.terms() {
                let base = match &bk {
                    Ok(bk) => bk.checked_mul(*n),
                    Err(_) if *n == 0 => Some(0),
                    Err(_) => None,
                };
                let Some(base) = base else {
                    if t.is_some() {
                        continue;
                    }
                    return Err(overflow("apply"));
                };
                if t.is_some_and(|t| base >= t) {
                    continue;
                }
                for (j, v) in c.terms() {
                    let m = base.checked_add(*j).ok_or_else(|| overflow("apply"))?;
                    if t.is_some_and(|t| m >= t) {
                        break;
                    }
                    acc.push((m, v * yn));
                }
            }
        }
        Ok(Poly::from_terms(acc))
    }

    /// Exact `L p` for a polynomial `p`.
    pub fn apply_poly(&self, p: &Poly) -> Result<Poly> {
        self.apply_sparse(p, None)
    }
}

impl fmt::Display for MahlerOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*M")?,
                _ => write!(f, "({c})*M^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MahlerOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MahlerOperator[b={}]({self})", self.radix)
    }
}
