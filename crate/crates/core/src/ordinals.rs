//! Ordinals below ω^ω in Cantor normal form, the per-ordinal injections into
//! ω, and the two-variable function built from them.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domination::{check_sepdom, solve_sepdom_table, DominationError, FuncTable, SepDomCert, SepDomCheck};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("exponents must strictly decrease (term {0})")]
    NotDecreasing(usize),
    #[error("coefficient of term {0} must be positive")]
    ZeroCoefficient(usize),
    #[error("{beta} is above {alpha}")]
    OutOfDomain { alpha: CnfOrdinal, beta: CnfOrdinal },
    #[error("empty ordinal list")]
    EmptyList,
    #[error("code for ({alpha}, {beta}) does not fit in 64 bits")]
    CodeOverflow { alpha: CnfOrdinal, beta: CnfOrdinal },
    #[error(transparent)]
    Domination(#[from] DominationError),
}

impl OrdinalError {
    pub fn is_precondition(&self) -> bool {
        matches!(self, OrdinalError::OutOfDomain { .. } | OrdinalError::CodeOverflow { .. })
    }
}

/// `ω^{e₁}·c₁ + … + ω^{e_m}·c_m` with `e₁ > … > e_m` and every `c_i ≥ 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u64, u64)>", into = "Vec<(u64, u64)>")]
pub struct CnfOrdinal {
    terms: Vec<(u64, u64)>,
}

impl TryFrom<Vec<(u64, u64)>> for CnfOrdinal {
    type Error = OrdinalError;
    fn try_from(terms: Vec<(u64, u64)>) -> Result<Self, Self::Error> {
        CnfOrdinal::new(terms)
    }
}

impl From<CnfOrdinal> for Vec<(u64, u64)> {
    fn from(a: CnfOrdinal) -> Self {
        a.terms
    }
}

impl CnfOrdinal {
    pub fn new(terms: Vec<(u64, u64)>) -> Result<Self, OrdinalError> {
        if let Some(i) = terms.iter().position(|&(_, c)| c == 0) {
            return Err(OrdinalError::ZeroCoefficient(i));
        }
        if let Some(i) = terms.windows(2).position(|w| w[0].0 <= w[1].0) {
            return Err(OrdinalError::NotDecreasing(i + 1));
        }
        Ok(CnfOrdinal { terms })
    }

    pub fn zero() -> Self {
        CnfOrdinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            CnfOrdinal { terms: vec![(0, n)] }
        }
    }

    /// `ω^e · c`.
    pub fn monomial(e: u64, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            CnfOrdinal { terms: vec![(e, c)] }
        }
    }

    pub fn omega() -> Self {
        Self::monomial(1, 1)
    }

    pub fn terms(&self) -> &[(u64, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value of a finite ordinal.
    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, n)] => Some(*n),
            _ => None,
        }
    }

    /// Leading exponent, 0 for the ordinal 0.
    pub fn degree(&self) -> u64 {
        self.terms.first().map_or(0, |t| t.0)
    }
}

impl Ord for CnfOrdinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let o = a.0.cmp(&b.0).then(a.1.cmp(&b.1));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for CnfOrdinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CnfOrdinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("ω")?,
                (1, c) => write!(f, "ω·{c}")?,
                (e, 1) => write!(f, "ω^{e}")?,
                (e, c) => write!(f, "ω^{e}·{c}")?,
            }
        }
        Ok(())
    }
}

pub fn ord_cmp(a: &CnfOrdinal, b: &CnfOrdinal) -> Ordering {
    a.cmp(b)
}

/// Cantor pairing `⟨a, b⟩ = (a+b)(a+b+1)/2 + b`.
pub fn pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    (&s * (&s + 1u32)) / 2u32 + b
}

/// `code([]) = 0`, `code((e,c) :: rest) = 1 + ⟨⟨e, c⟩, code(rest)⟩`.
pub fn cnf_code(beta: &CnfOrdinal) -> BigUint {
    beta.terms
        .iter()
        .rev()
        .fold(BigUint::zero(), |rest, &(e, c)| pair(&pair(&BigUint::from(e), &BigUint::from(c)), &rest) + 1u32)
}

/// The injection of `{β ≤ α}` into ω: the identity for finite `α`, the CNF
/// code otherwise.
pub fn f_alpha(alpha: &CnfOrdinal, beta: &CnfOrdinal) -> Result<BigUint, OrdinalError> {
    if beta > alpha {
        return Err(OrdinalError::OutOfDomain { alpha: alpha.clone(), beta: beta.clone() });
    }
    Ok(match alpha.as_finite() {
        Some(_) => BigUint::from(beta.as_finite().expect("β ≤ α finite")),
        None => cnf_code(beta),
    })
}

/// `f_α(β)` when `β ≤ α`, else 0.
pub fn big_f(alpha: &CnfOrdinal, beta: &CnfOrdinal) -> BigUint {
    f_alpha(alpha, beta).unwrap_or_default()
}

/// Every `β ≤ α` whose exponents are at most `α`'s degree and whose
/// coefficients are at most `max_coeff`, in increasing order.
pub fn enumerate_up_to(alpha: &CnfOrdinal, max_coeff: u64) -> Vec<CnfOrdinal> {
    let degree = alpha.degree();
    // Each exponent 0..=degree gets a coefficient in 0..=max_coeff.
    let mut out = vec![CnfOrdinal::zero()];
    for e in (0..=degree).rev() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=max_coeff).map(move |c| {
                    let mut terms = prefix.terms.clone();
                    if c > 0 {
                        terms.push((e, c));
                    }
                    CnfOrdinal { terms }
                })
            })
            .collect();
    }
    out.retain(|b| b <= alpha);
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountableDemo {
    pub ordinals: Vec<CnfOrdinal>,
    pub table: FuncTable,
    pub cert: SepDomCert,
    pub check: SepDomCheck,
}

/// `F` on `ordinals × ordinals` with its max-form certificate, checked on
/// every entry.
pub fn demo_countable_domination(ordinals: &[CnfOrdinal]) -> Result<CountableDemo, OrdinalError> {
    if ordinals.is_empty() {
        return Err(OrdinalError::EmptyList);
    }
    let rows = ordinals
        .iter()
        .map(|a| {
            ordinals
                .iter()
                .map(|b| {
                    big_f(a, b).to_u64().ok_or_else(|| OrdinalError::CodeOverflow { alpha: a.clone(), beta: b.clone() })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let table = FuncTable::new(rows)?;
    let cert = solve_sepdom_table(&table);
    let check = check_sepdom(&table, &cert)?;
    Ok(CountableDemo { ordinals: ordinals.to_vec(), table, cert, check })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn ord(terms: &[(u64, u64)]) -> CnfOrdinal {
        CnfOrdinal::new(terms.to_vec()).unwrap()
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(ord_cmp(&CnfOrdinal::zero(), &CnfOrdinal::zero()), Ordering::Equal);
        assert_eq!(ord_cmp(&CnfOrdinal::omega(), &CnfOrdinal::finite(5)), Ordering::Greater);
        assert_eq!(ord_cmp(&ord(&[(2, 1), (0, 3)]), &ord(&[(1, 7)])), Ordering::Greater);
        assert!(ord(&[(1, 2)]) > ord(&[(1, 1), (0, 100)]));
    }

    #[test]
    fn validation_and_json() {
        assert_eq!(CnfOrdinal::new(vec![(1, 1), (1, 2)]), Err(OrdinalError::NotDecreasing(1)));
        assert_eq!(CnfOrdinal::new(vec![(1, 0)]), Err(OrdinalError::ZeroCoefficient(0)));
        let a: CnfOrdinal = serde_json::from_str("[[2,3],[0,5]]").unwrap();
        assert_eq!(a.to_string(), "ω^2·3 + 5");
        assert_eq!(serde_json::to_string(&a).unwrap(), "[[2,3],[0,5]]");
        assert!(serde_json::from_str::<CnfOrdinal>("[[0,5],[2,3]]").is_err());
    }

    #[test]
    fn injection_examples() {
        assert_eq!(f_alpha(&CnfOrdinal::finite(5), &CnfOrdinal::finite(3)).unwrap(), BigUint::from(3u32));
        // ⟨1,1⟩ = 4, ⟨4,0⟩ = 10, plus one.
        assert_eq!(f_alpha(&CnfOrdinal::omega(), &CnfOrdinal::omega()).unwrap(), BigUint::from(11u32));
        assert!(matches!(
            f_alpha(&CnfOrdinal::finite(3), &CnfOrdinal::finite(4)),
            Err(OrdinalError::OutOfDomain { .. })
        ));
        let omega = CnfOrdinal::omega();
        let mut seen = HashSet::new();
        for b in (0..200).map(CnfOrdinal::finite).chain([omega.clone()]) {
            assert!(seen.insert(f_alpha(&omega, &b).unwrap()));
        }
    }

    #[test]
    fn big_f_examples() {
        assert_eq!(big_f(&CnfOrdinal::finite(3), &CnfOrdinal::omega()), BigUint::zero());
        assert_eq!(big_f(&CnfOrdinal::finite(5), &CnfOrdinal::finite(3)), BigUint::from(3u32));
        let a = ord(&[(2, 1), (0, 4)]);
        assert_eq!(big_f(&a, &a), cnf_code(&a));
    }

    #[test]
    fn enumeration() {
        let w2 = CnfOrdinal::monomial(2, 1);
        let all = enumerate_up_to(&w2, 3);
        // ω²·1 and everything below with exponents ≤ 1.
        assert_eq!(all.len(), 16 + 1);
        assert_eq!(all.last(), Some(&w2));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn demo_examples() {
        let single = demo_countable_domination(&[CnfOrdinal::zero()]).unwrap();
        assert_eq!(single.table.entries(), &[vec![0]]);
        assert_eq!(single.cert.g, vec![0]);
        let ten: Vec<CnfOrdinal> = (0..10).map(CnfOrdinal::finite).collect();
        assert!(demo_countable_domination(&ten).unwrap().check.holds);
        let mixed =
            vec![CnfOrdinal::zero(), CnfOrdinal::omega(), CnfOrdinal::monomial(1, 2), CnfOrdinal::monomial(2, 1)];
        let demo = demo_countable_domination(&mixed).unwrap();
        assert!(demo.check.holds);
        assert_eq!(demo.table.get(0, 1), 0);
        assert_eq!(demo_countable_domination(&[]), Err(OrdinalError::EmptyList));
    }

    fn arb_ordinal() -> impl Strategy<Value = CnfOrdinal> {
        proptest::collection::btree_map(0u64..4, 1u64..6, 0..4)
            .prop_map(|m| CnfOrdinal::new(m.into_iter().rev().collect()).unwrap())
    }

    proptest! {
        #[test]
        fn comparison_is_a_total_order(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
            prop_assert_eq!(ord_cmp(&a, &b), ord_cmp(&b, &a).reverse());
            prop_assert_eq!(ord_cmp(&a, &b) == Ordering::Equal, a == b);
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
        }

        #[test]
        fn big_f_vanishes_above_the_diagonal(a in arb_ordinal(), b in arb_ordinal()) {
            if b > a {
                prop_assert!(big_f(&a, &b).is_zero());
            } else {
                prop_assert_eq!(big_f(&a, &b), f_alpha(&a, &b).unwrap());
            }
        }

        #[test]
        fn demo_always_checks(list in proptest::collection::vec(arb_ordinal(), 1..8)) {
            prop_assert!(demo_countable_domination(&list).unwrap().check.holds);
        }
    }
}
