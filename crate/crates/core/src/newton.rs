//! Newton diagrams and polygons of Mahler operators.
//!
//! Each monomial `x^j M^k` contributes the point `(b^k, j)`. The lower hull
//! (through the valuations `v_k`) yields candidate valuations of series
//! solutions, the upper hull (through the degrees `d_k`) candidate degrees of
//! polynomial solutions. An edge is admissible when the coefficients of the
//! monomials lying on it sum to zero.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::operator::MahlerOperator;
use crate::poly::Rational;

/// One edge of a Newton polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonEdge {
    /// Left endpoint `(b^k, j)`.
    pub left: (u64, u64),
    /// Right endpoint `(b^k, j)`.
    pub right: (u64, u64),
    /// Orders `k` of the endpoints.
    pub orders: (usize, usize),
    pub slope: Rational,
    /// `V`-intercept of the supporting line `V = slope·U + intercept`.
    pub intercept: Rational,
    pub admissible: bool,
    /// Diagram points `(k, j)` lying on the edge.
    pub edge_points: Vec<(usize, u64)>,
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

fn hull(pts: &[(usize, u64, u64)], lower: bool) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::new();
    for i in 0..pts.len() {
        while h.len() >= 2 {
            let a = pts[h[h.len() - 2]];
            let b = pts[h[h.len() - 1]];
            let c = pts[i];
            let cross = (big(b.1) - big(a.1)) * (big(c.2) - big(a.2))
                - (big(b.2) - big(a.2)) * (big(c.1) - big(a.1));
            let drop = if lower { !cross.is_positive() } else { !cross.is_negative() };
            if drop {
                h.pop();
            } else {
                break;
            }
        }
        h.push(i);
    }
    h
}

fn polygon(l: &MahlerOperator, lower: bool) -> Result<Vec<PolygonEdge>> {
    if l.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let mut pts = Vec::new();
    for (k, c) in l.coeffs().iter().enumerate() {
        let j = if lower { c.valuation() } else { c.degree() };
        if let Some(j) = j {
            pts.push((k, l.radix_pow(k)?, j));
        }
    }
    let h = hull(&pts, lower);
    let mut edges = Vec::new();
    for w in h.windows(2) {
        let (ka, ua, va) = pts[w[0]];
        let (kb, ub, vb) = pts[w[1]];
        let slope = Rational::new(big(vb) - big(va), big(ub) - big(ua));
        let intercept = Rational::from(big(va)) - &slope * Rational::from(big(ua));
        let mut edge_points = Vec::new();
        let mut sum = Rational::zero();
        for k in ka..=kb {
            let c = l.coeff(k);
            if c.is_zero() {
                continue;
            }
            let u = Rational::from(big(l.radix_pow(k)?));
            let v = &slope * u + &intercept;
            if !v.is_integer() || v.is_negative() {
                continue;
            }
            let Ok(j) = u64::try_from(v.to_integer()) else { continue };
            let cj = c.coeff(j);
            if !cj.is_zero() {
                edge_points.push((k, j));
                sum += cj;
            }
        }
        edges.push(PolygonEdge {
            left: (ua, va),
            right: (ub, vb),
            orders: (ka, kb),
            slope,
            intercept,
            admissible: sum.is_zero(),
            edge_points,
        });
    }
    Ok(edges)
}

/// Lower Newton polygon, edges left to right.
pub fn lower_polygon(l: &MahlerOperator) -> Result<Vec<PolygonEdge>> {
    polygon(l, true)
}

/// Upper Newton polygon, edges left to right.
pub fn upper_polygon(l: &MahlerOperator) -> Result<Vec<PolygonEdge>> {
    polygon(l, false)
}

fn negated_admissible(edges: Vec<PolygonEdge>) -> Vec<Rational> {
    let mut v: Vec<Rational> = edges.into_iter().filter(|e| e.admissible).map(|e| -e.slope).collect();
    v.sort();
    v.dedup();
    v
}

/// Possible valuations of Puiseux solutions: opposites of admissible lower slopes.
pub fn candidate_valuations(l: &MahlerOperator) -> Result<Vec<Rational>> {
    Ok(negated_admissible(lower_polygon(l)?))
}

/// Possible degrees of polynomial solutions: opposites of admissible upper slopes.
/// Values are reported raw; callers keep the nonnegative integers.
pub fn candidate_degrees(l: &MahlerOperator) -> Result<Vec<Rational>> {
    Ok(negated_admissible(upper_polygon(l)?))
}

/// `ν = max_{k≥1} (v_0 − v_k)/(b^k − 1)` and `μ = v_0 + ν`.
pub fn mu_nu(l: &MahlerOperator) -> Result<(Rational, Rational)> {
    if l.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let v0 = l.coeff(0).valuation().ok_or(Error::ZeroTrailingCoefficient)?;
    if l.order() == 0 {
        return Err(Error::InvalidArgument("order zero operator has no (nu, mu)".into()));
    }
    let mut nu: Option<Rational> = None;
    for k in 1..=l.order() {
        let Some(vk) = l.coeff(k).valuation() else { continue };
        let q = Rational::new(big(v0) - big(vk), big(l.radix_pow(k)?) - BigInt::one());
        if nu.as_ref().is_none_or(|n| q > *n) {
            nu = Some(q);
        }
    }
    let nu = nu.expect("leading coefficient is nonzero");
    let mu = Rational::from(big(v0)) + &nu;
    Ok((nu, mu))
}

/// Slope denominators coprime to `b` of admissible lower edges, and their lcm `N`.
pub fn ramification_data(l: &MahlerOperator) -> Result<(Vec<u64>, u64)> {
    if l.coeff(0).is_zero() {
        return Err(if l.is_zero() { Error::ZeroOperator } else { Error::ZeroTrailingCoefficient });
    }
    let b = big(l.radix());
    let mut q: Vec<u64> = lower_polygon(l)?
        .into_iter()
        .filter(|e| e.admissible && e.slope.denom().gcd(&b).is_one())
        .map(|e| u64::try_from(e.slope.denom().clone()).expect("denominator fits"))
        .collect();
    q.sort_unstable();
    q.dedup();
    let n = q.iter().fold(1u64, |acc, &d| acc.lcm(&d));
    Ok((q, n))
}

/// Slope and intercept of the rightmost admissible lower edge with slope in `N^{-1}ℤ`.
pub fn select_edge_for_ramification(l: &MahlerOperator, n: u64) -> Result<(Rational, Rational)> {
    let nb = Rational::from(big(n));
    lower_polygon(l)?
        .into_iter()
        .rev()
        .find(|e| e.admissible && (&e.slope * &nb).is_integer())
        .map(|e| (e.slope, e.intercept))
        .ok_or(Error::NoAdmissibleEdge(n))
}
