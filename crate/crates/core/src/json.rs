//! JSON wire format for polynomials and operators.
//!
//! A polynomial is a list of `[exponent, "coefficient"]` pairs with strictly
//! increasing exponents and nonzero coefficients. An operator is
//! `{"radix": b, "coefficients": [{"order": k, "terms": <poly>}, …]}`;
//! omitted orders are zero.

use num::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::operator::MahlerOperator;
use crate::poly::{parse_rational, Poly, Rational};

pub type PolyFragment = Vec<(u64, String)>;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CoefficientDoc {
    pub order: usize,
    pub terms: PolyFragment,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct OperatorDoc {
    pub radix: u64,
    pub coefficients: Vec<CoefficientDoc>,
}

pub fn rational_to_string(q: &Rational) -> String {
    q.to_string()
}

pub fn poly_to_fragment(p: &Poly) -> PolyFragment {
    p.terms().iter().map(|(e, c)| (*e, rational_to_string(c))).collect()
}

pub fn poly_from_fragment(f: &[(u64, String)]) -> Result<Poly> {
    let mut terms = Vec::with_capacity(f.len());
    for (i, (e, c)) in f.iter().enumerate() {
        if i > 0 && f[i - 1].0 >= *e {
            return Err(Error::Malformed("exponents must be strictly increasing".into()));
        }
        let q = parse_rational(c)?;
        if q.is_zero() {
            return Err(Error::Malformed("zero coefficient in term list".into()));
        }
        terms.push((*e, q));
    }
    Ok(Poly::from_terms(terms))
}

pub fn operator_to_doc(l: &MahlerOperator) -> OperatorDoc {
    OperatorDoc {
        radix: l.radix(),
        coefficients: l
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| CoefficientDoc { order: k, terms: poly_to_fragment(c) })
            .collect(),
    }
}

pub fn operator_from_doc(d: &OperatorDoc) -> Result<MahlerOperator> {
    if d.radix < 2 {
        return Err(Error::Malformed("radix must be at least 2".into()));
    }
    let mut coeffs: Vec<Poly> = Vec::new();
    for (i, c) in d.coefficients.iter().enumerate() {
        if i > 0 && d.coefficients[i - 1].order >= c.order {
            return Err(Error::Malformed("orders must be strictly increasing".into()));
        }
        coeffs.resize(c.order, Poly::zero());
        coeffs.push(poly_from_fragment(&c.terms)?);
    }
    if coeffs.last().is_some_and(Poly::is_zero) {
        return Err(Error::Unsupported("leading coefficient is zero".into()));
    }
    Ok(MahlerOperator::new(d.radix, coeffs))
}

pub fn operator_to_value(l: &MahlerOperator) -> Value {
    serde_json::to_value(operator_to_doc(l)).expect("serializable")
}

/// Compact canonical serialization.
pub fn operator_to_string(l: &MahlerOperator) -> String {
    serde_json::to_string(&operator_to_doc(l)).expect("serializable")
}

pub fn operator_from_value(v: &Value) -> Result<MahlerOperator> {
    let d: OperatorDoc =
        serde_json::from_value(v.clone()).map_err(|e| Error::Malformed(e.to_string()))?;
    operator_from_doc(&d)
}

pub fn operator_from_str(s: &str) -> Result<MahlerOperator> {
    let d: OperatorDoc = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
    operator_from_doc(&d)
}
