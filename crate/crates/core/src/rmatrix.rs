//! The recurrence matrix `R(φ(L))` of a Mahler operator.
//!
//! `R_{m,n}` is the coefficient of `y_n x^m` in `φ(L) y`. Rows are built
//! without materializing `φ(L)`: monomials of `ℓ_k` are bucketed by `j mod b^k`,
//! so a row costs one bucket lookup per order plus its nonzero entries.

use std::collections::{BTreeMap, HashMap};

use num::Zero;

use crate::error::{overflow, Error, Result};
use crate::exec::Exec;
use crate::linalg::{reduced_echelon, StreamingKernel};
use crate::newton::mu_nu;
use crate::operator::{MahlerOperator, PhiTransform};
use crate::poly::{floor_i64, Poly, Rational};

/// Finite row-sparse submatrix `S_E` of `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowSparseMatrix {
    pub width: usize,
    /// The row indices `m_i` of `E`.
    pub row_labels: Vec<u64>,
    /// Per row, strictly increasing columns with nonzero values.
    pub rows: Vec<Vec<(usize, Rational)>>,
}

impl RowSparseMatrix {
    pub fn get(&self, i: usize, n: usize) -> Rational {
        match self.rows[i].binary_search_by_key(&n, |t| t.0) {
            Ok(p) => self.rows[i][p].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// Canonical basis of a kernel: reduced echelon, monic pivots at the lowest index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    pub width: usize,
    pub vectors: Vec<Vec<Rational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Lower,
    Upper,
}

struct Strip {
    bk: u64,
    inv_beta: u64,
    // j mod b^k -> (β j, ℓ_{k,j}) sorted by β j
    buckets: HashMap<u64, Vec<(u128, Rational)>>,
}

/// Row generator for `R(φ(L))`.
pub(crate) struct RowEngine {
    phi: PhiTransform,
    strips: Vec<Strip>,
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (m as i128, (a % m) as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(m as i128) as u64
}

impl RowEngine {
    pub(crate) fn new(l: &MahlerOperator, phi: &PhiTransform) -> Result<Self> {
        phi.check(l.radix())?;
        let mut strips = Vec::new();
        for (k, c) in l.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let bk = l.radix_pow(k)?;
            let mut buckets: HashMap<u64, Vec<(u128, Rational)>> = HashMap::new();
            for (j, v) in c.terms() {
                if phi.exponent(bk, *j)? < 0 {
                    return Err(Error::NegativeExponent);
                }
                buckets.entry(j % bk).or_default().push((phi.beta as u128 * *j as u128, v.clone()));
            }
            strips.push(Strip { bk, inv_beta: mod_inverse(phi.beta % bk, bk), buckets });
        }
        Ok(RowEngine { phi: *phi, strips })
    }

    /// Nonzero entries `(n, R_{m,n})` of row `m` with `n < width`.
    pub(crate) fn row(&self, m: u64, width: Option<u64>) -> Vec<(usize, Rational)> {
        let mut out: Vec<(usize, Rational)> = Vec::new();
        for s in &self.strips {
            let bk = s.bk as i128;
            let big_b = m as i128 + self.phi.gamma as i128 - self.phi.alpha as i128 * bk;
            if big_b < 0 {
                continue;
            }
            let j0 = ((s.inv_beta as u128 * (big_b % bk) as u128) % s.bk as u128) as u64;
            let Some(bucket) = s.buckets.get(&j0) else { continue };
            let hi = bucket.partition_point(|t| t.0 as i128 <= big_b);
            let lo = match width {
                Some(w) => {
                    let floor = big_b - bk * w as i128;
                    bucket.partition_point(|t| (t.0 as i128) <= floor)
                }
                None => 0,
            };
            for (bj, v) in &bucket[lo..hi] {
                let col = ((big_b - *bj as i128) / bk) as usize;
                out.push((col, v.clone()));
            }
        }
        out.sort_by_key(|t| t.0);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(out.len());
        for (c, v) in out {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|t| !t.1.is_zero());
        merged
    }
}

/// Rows `E` of `R(φ(L))` restricted to the first `w` columns.
pub fn build_submatrix(
    l: &MahlerOperator,
    phi: &PhiTransform,
    w: usize,
    e: &[u64],
) -> Result<RowSparseMatrix> {
    build_submatrix_with(l, phi, w, e, Exec::default())
}

pub fn build_submatrix_with(
    l: &MahlerOperator,
    phi: &PhiTransform,
    w: usize,
    e: &[u64],
    exec: Exec,
) -> Result<RowSparseMatrix> {
    if e.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidArgument("row indices must increase".into()));
    }
    let engine = RowEngine::new(l, phi)?;
    let rows = exec.map(e, |&m| engine.row(m, Some(w as u64)));
    Ok(RowSparseMatrix { width: w, row_labels: e.to_vec(), rows })
}

/// `R_{m,n}` by direct summation over the support of `L`.
pub fn entry_oracle(l: &MahlerOperator, phi: &PhiTransform, m: u64, n: u64) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (k, j, c) in l.monomials() {
        let bk = l.radix_pow(k)?;
        let lhs = phi.exponent(bk, j)? + bk as i128 * n as i128;
        if lhs == m as i128 {
            acc += c;
        }
    }
    Ok(acc)
}

/// Basis of `{y ∈ ℚ[x]_{<w} : φ(L) y ≡ 0 mod x^h}` using the triangular rows `E`.
pub fn solve_prescribed(
    l: &MahlerOperator,
    phi: &PhiTransform,
    h: u64,
    w: usize,
    e: &[u64],
    orientation: Orientation,
) -> Result<KernelBasis> {
    solve_prescribed_with(l, phi, h, w, e, orientation, Exec::default())
}

pub fn solve_prescribed_with(
    l: &MahlerOperator,
    phi: &PhiTransform,
    h: u64,
    w: usize,
    e: &[u64],
    orientation: Orientation,
    exec: Exec,
) -> Result<KernelBasis> {
    if e.len() != w {
        return Err(Error::InvalidArgument(format!("|E| = {} but w = {w}", e.len())));
    }
    if e.iter().any(|&m| m >= h) {
        return Err(Error::InvalidArgument("row index beyond h".into()));
    }
    let s = build_submatrix_with(l, phi, w, e, exec)?;
    let r = l.order();

    // Substitution with unit seeding at zero diagonal entries.
    let mut cands: Vec<Vec<Rational>> = Vec::new();
    let mut zeros = 0usize;
    let order: Vec<usize> = match orientation {
        Orientation::Lower => (0..w).collect(),
        Orientation::Upper => (0..w).rev().collect(),
    };
    for i in order {
        let row = &s.rows[i];
        let off = row.iter().any(|(c, _)| match orientation {
            Orientation::Lower => *c > i,
            Orientation::Upper => *c < i,
        });
        if off {
            return Err(Error::Invariant(format!("row {} is not triangular", e[i])));
        }
        let diag = s.get(i, i);
        if diag.is_zero() {
            zeros += 1;
            if zeros > r {
                return Err(Error::TooManyZeroDiagonals(zeros, r));
            }
            let mut g = vec![Rational::zero(); w];
            g[i] = Rational::from_integer(1.into());
            cands.push(g);
        } else {
            for g in cands.iter_mut() {
                let mut acc = Rational::zero();
                for (c, v) in row {
                    if *c != i && !g[*c].is_zero() {
                        acc += v * &g[*c];
                    }
                }
                g[i] = -acc / &diag;
            }
        }
    }
    if cands.is_empty() {
        return Ok(KernelBasis { width: w, vectors: Vec::new() });
    }

    // Residuals φ(L) g mod x^h and their kernel.
    let lt = l.phi_apply(phi)?;
    let residuals: Vec<Poly> = exec
        .map(&cands, |g| lt.apply_sparse(&Poly::from_dense(g), Some(h)))
        .into_iter()
        .collect::<Result<_>>()?;
    let rho = cands.len();
    let mut rows: BTreeMap<u64, Vec<Rational>> = BTreeMap::new();
    for (j, res) in residuals.iter().enumerate() {
        for (m, v) in res.terms() {
            rows.entry(*m).or_insert_with(|| vec![Rational::zero(); rho])[j] = v.clone();
        }
    }
    let mut ker = StreamingKernel::new(rho);
    for row in rows.values() {
        ker.push_row(row);
        if ker.dim() == 0 {
            break;
        }
    }
    let vectors: Vec<Vec<Rational>> = ker
        .into_basis()
        .into_iter()
        .map(|lam| {
            let mut f = vec![Rational::zero(); w];
            for (g, c) in cands.iter().zip(&lam) {
                if c.is_zero() {
                    continue;
                }
                for (a, b) in f.iter_mut().zip(g) {
                    if !b.is_zero() {
                        *a += c * b;
                    }
                }
            }
            f
        })
        .collect();
    Ok(KernelBasis { width: w, vectors: reduced_echelon(vectors) })
}

/// Extends approximate series solutions of `φ(L)` term by term.
pub(crate) struct Prolonger {
    engine: RowEngine,
    lt: MahlerOperator,
    v0: u64,
    floor_nu: u64,
}

impl Prolonger {
    pub(crate) fn new(l: &MahlerOperator, phi: &PhiTransform) -> Result<Self> {
        let lt = l.phi_apply(phi)?;
        let (nu, _) = mu_nu(&lt)?;
        let fnu = floor_i64(&nu)?;
        if fnu < 0 {
            return Err(Error::InvalidArgument("no approximate solutions when nu < 0".into()));
        }
        let v0 = lt.coeff(0).valuation().ok_or(Error::ZeroTrailingCoefficient)?;
        Ok(Prolonger { engine: RowEngine::new(l, phi)?, lt, v0, floor_nu: fnu as u64 })
    }

    pub(crate) fn approx_len(&self) -> usize {
        self.floor_nu as usize + 1
    }

    pub(crate) fn extend(&self, approx: &[Rational], n: usize) -> Result<Vec<Rational>> {
        if approx.len() < self.approx_len() {
            return Err(Error::InvalidArgument("prefix shorter than floor(nu) + 1".into()));
        }
        let check_to = self.v0.checked_add(approx.len() as u64).ok_or_else(|| overflow("prolong"))?;
        if !self.lt.apply_sparse(&Poly::from_dense(approx), Some(check_to))?.is_zero() {
            return Err(Error::IncompatiblePrefix);
        }
        let mut y = approx.to_vec();
        y.reserve(n);
        for _ in 0..n {
            let p = y.len();
            let m = self.v0 + p as u64;
            let row = self.engine.row(m, None);
            let mut acc = Rational::zero();
            let mut diag = None;
            for (c, v) in row {
                if c == p {
                    diag = Some(v);
                } else if c > p {
                    return Err(Error::Invariant("prolongation row beyond pivot".into()));
                } else if !y[c].is_zero() {
                    acc += v * &y[c];
                }
            }
            let diag = diag.ok_or_else(|| Error::Invariant("zero pivot during prolongation".into()))?;
            y.push(-acc / diag);
        }
        Ok(y)
    }
}

/// Appends `n` coefficients to an approximate series solution of `φ(L)`.
pub fn prolong(
    l: &MahlerOperator,
    phi: &PhiTransform,
    approx: &[Rational],
    n: usize,
) -> Result<Vec<Rational>> {
    Prolonger::new(l, phi)?.extend(approx, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn inverse() {
        assert_eq!(mod_inverse(2, 9), 5);
        assert_eq!(mod_inverse(65, 3), 2);
        assert_eq!(mod_inverse(1, 1), 0);
    }

    #[test]
    fn constants_of_m_minus_one() {
        let l = MahlerOperator::new(2, vec![Poly::from_ints(&[-1]), Poly::one()]);
        let k = solve_prescribed(&l, &PhiTransform::identity(), 1, 1, &[0], Orientation::Lower).unwrap();
        assert_eq!(k.vectors, vec![vec![rat(1)]]);
        let m = build_submatrix(&l, &PhiTransform::identity(), 3, &[]).unwrap();
        assert!(m.rows.is_empty());
    }

    #[test]
    fn engine_vs_oracle_small() {
        let l = MahlerOperator::new(
            3,
            vec![Poly::from_ints(&[0, 2, 1]), Poly::from_ints(&[1, 0, -1]), Poly::from_ints(&[0, 0, 5, 1])],
        );
        let phi = PhiTransform::new(1, 2, 1);
        let e: Vec<u64> = (0..40).collect();
        let s = build_submatrix(&l, &phi, 30, &e).unwrap();
        for (i, &m) in e.iter().enumerate() {
            for n in 0..30 {
                assert_eq!(s.get(i, n), entry_oracle(&l, &phi, m, n as u64).unwrap(), "m={m} n={n}");
            }
        }
    }

    #[test]
    fn prolong_zero_terms() {
        let l = MahlerOperator::new(2, vec![Poly::from_ints(&[-1]), Poly::one()]);
        let y = prolong(&l, &PhiTransform::identity(), &[rat(3)], 0).unwrap();
        assert_eq!(y, vec![rat(3)]);
        let y = prolong(&l, &PhiTransform::identity(), &[rat(3)], 4).unwrap();
        assert_eq!(y, vec![rat(3), rat(0), rat(0), rat(0), rat(0)]);
    }
}
