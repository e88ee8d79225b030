//! Dense exact linear algebra over ℚ on small matrices.

use num::Zero;

use crate::poly::Rational;

/// Reduced row echelon form with the pivot of each row at its first nonzero
/// entry, pivots monic, rows sorted by pivot position, zero rows dropped.
pub fn reduced_echelon(mut rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
    for r in &mut rows {
        r.resize(ncols, Rational::zero());
    }
    let mut out: Vec<Vec<Rational>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for mut r in rows {
        for (p, pr) in pivots.iter().zip(out.iter()) {
            if !r[*p].is_zero() {
                let f = r[*p].clone();
                for (a, b) in r.iter_mut().zip(pr.iter()).skip(*p) {
                    *a -= &f * b;
                }
            }
        }
        let Some(p) = r.iter().position(|c| !c.is_zero()) else { continue };
        let inv = r[p].recip();
        for a in r.iter_mut().skip(p) {
            *a *= &inv;
        }
        for o in out.iter_mut() {
            if !o[p].is_zero() {
                let f = o[p].clone();
                for (a, b) in o.iter_mut().zip(r.iter()).skip(p) {
                    *a -= &f * b;
                }
            }
        }
        out.push(r);
        pivots.push(p);
    }
    let mut idx: Vec<usize> = (0..out.len()).collect();
    idx.sort_by_key(|&i| pivots[i]);
    idx.into_iter().map(|i| out[i].clone()).collect()
}

pub fn rank(rows: Vec<Vec<Rational>>) -> usize {
    reduced_echelon(rows).len()
}

/// Canonical basis of `{v : A v = 0}` for `A` given by rows of width `ncols`.
pub fn kernel(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut k = StreamingKernel::new(ncols);
    for r in rows {
        k.push_row(r);
    }
    reduced_echelon(k.into_basis())
}

/// One solution of `A v = rhs`, if any.
pub fn solve(rows: &[Vec<Rational>], rhs: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let aug: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, c)| {
            let mut v = r.clone();
            v.resize(ncols, Rational::zero());
            v.push(-c);
            v
        })
        .collect();
    // Solutions are kernel vectors of [A | -rhs] with last coordinate 1.
    let ker = kernel(&aug, ncols + 1);
    let v = ker.into_iter().find(|v| !v[ncols].is_zero())?;
    let s = v[ncols].recip();
    Some(v[..ncols].iter().map(|c| c * &s).collect())
}

/// Kernel of a matrix whose rows arrive one at a time.
pub struct StreamingKernel {
    basis: Vec<Vec<Rational>>,
}

impl StreamingKernel {
    /// Starts from the full space of dimension `n`.
    pub fn new(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::from_integer(1.into());
                v
            })
            .collect();
        StreamingKernel { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Restricts to vectors orthogonal to `row`.
    pub fn push_row(&mut self, row: &[Rational]) {
        if self.basis.is_empty() {
            return;
        }
        let dots: Vec<Rational> = self
            .basis
            .iter()
            .map(|v| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect();
        let Some(p) = dots.iter().position(|d| !d.is_zero()) else { return };
        let pv = self.basis.remove(p);
        let pd = dots[p].clone();
        let mut j = 0;
        for (i, d) in dots.iter().enumerate() {
            if i == p {
                continue;
            }
            if !d.is_zero() {
                let f = d / &pd;
                for (a, b) in self.basis[j].iter_mut().zip(&pv) {
                    *a -= &f * b;
                }
            }
            j += 1;
        }
    }

    pub fn into_basis(self) -> Vec<Vec<Rational>> {
        self.basis
    }
}
