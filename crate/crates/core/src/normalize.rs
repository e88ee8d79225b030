//! Operators with zero trailing coefficient and right gcds of families.
//!
//! `split` replaces an operator of positive M-valuation by its sections until
//! every member has `ℓ_0 ≠ 0`; interreduction then cancels trailing
//! coefficients pairwise until one operator remains.

use std::cmp::Reverse;

use crate::error::{Error, Result};
use crate::json::operator_to_string;
use crate::operator::MahlerOperator;
use crate::poly::Poly;

/// A nonempty family of nonzero operators sharing one radix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorFamily {
    members: Vec<MahlerOperator>,
}

impl OperatorFamily {
    pub fn new(members: Vec<MahlerOperator>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
        for m in &members {
            if m.radix() != first.radix() {
                return Err(Error::RadixMismatch(first.radix(), m.radix()));
            }
            if m.is_zero() {
                return Err(Error::ZeroOperator);
            }
        }
        Ok(OperatorFamily { members })
    }

    pub fn members(&self) -> &[MahlerOperator] {
        &self.members
    }

    pub fn radix(&self) -> u64 {
        self.members[0].radix()
    }
}

/// A reduced operator, raw and as `content · primitive`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub raw: MahlerOperator,
    pub content: Poly,
    pub primitive: MahlerOperator,
}

impl Normalized {
    fn from_raw(raw: MahlerOperator) -> Result<Self> {
        let (content, primitive) = raw.primitive_part()?;
        Ok(Normalized { raw, content, primitive })
    }
}

/// Recursive sections down to M-valuation 0.
pub fn split(l: &MahlerOperator) -> Result<Vec<MahlerOperator>> {
    if l.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let mut out = Vec::new();
    split_into(l, &mut out)?;
    Ok(out)
}

fn split_into(l: &MahlerOperator, out: &mut Vec<MahlerOperator>) -> Result<()> {
    if l.is_zero() {
        return Ok(());
    }
    if l.m_valuation() == Some(0) {
        out.push(l.clone());
        return Ok(());
    }
    let secs: Vec<MahlerOperator> = (0..l.radix()).map(|i| l.section(i)).collect();
    if cfg!(debug_assertions) && MahlerOperator::from_sections(l.radix(), &secs)? != *l {
        return Err(Error::Invariant("sections do not reconstruct the operator".into()));
    }
    for s in &secs {
        split_into(s, out)?;
    }
    Ok(())
}

fn reduce(mut set: Vec<MahlerOperator>, budget: usize) -> Result<MahlerOperator> {
    let mut steps = 0usize;
    loop {
        match set.len() {
            0 => return Err(Error::Invariant("reduction emptied the family".into())),
            1 => return Ok(set.pop().unwrap()),
            _ => {}
        }
        steps += 1;
        if steps > budget {
            return Err(Error::Invariant("interreduction did not terminate".into()));
        }
        set.sort_by_cached_key(|l| (Reverse(l.order()), l.degree(), operator_to_string(l)));
        let l1 = set.remove(0);
        let red = l1.interreduce(&set[0])?;
        if !red.is_zero() {
            set.extend(split(&red)?);
        }
    }
}

fn budget(members: &[MahlerOperator]) -> usize {
    let r = members.iter().map(MahlerOperator::order).max().unwrap_or(0) as u32;
    let b = members[0].radix() as usize;
    b.saturating_pow(r + 1).saturating_mul(members.len() + 1).saturating_mul(64).max(10_000)
}

/// Single operator with `ℓ_0 ≠ 0` and the same solutions in `ℚ((x))`.
pub fn normalize_l0(l: &MahlerOperator) -> Result<Normalized> {
    let parts = split(l)?;
    let n = budget(&parts);
    Normalized::from_raw(reduce(parts, n)?)
}

/// Greatest common right divisor of a family.
pub fn gcrd(family: &OperatorFamily) -> Result<Normalized> {
    let w = family.members().iter().filter_map(MahlerOperator::m_valuation).min().unwrap();
    let mut parts = Vec::new();
    for m in family.members() {
        parts.extend(split(&m.strip_right_m(w))?);
    }
    let n = budget(&parts);
    Normalized::from_raw(reduce(parts, n)?.shift_right_m(w))
}
