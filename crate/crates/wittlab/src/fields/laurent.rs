//! Formal sums of tower monomials, used to evaluate diagonal forms at
//! candidate witnesses exactly.

use std::collections::BTreeMap;

use num::Zero;

use crate::fields::{Scalar, TowerMonomial};

/// Adds two base scalars, returning `None` on exact cancellation.
/// Symbolic AC tags add inside the prime subfield.
pub fn scalar_add(a: &Scalar, b: &Scalar) -> Option<Scalar> {
    let sum = match (a, b) {
        (Scalar::Fq(x), Scalar::Fq(y)) => Scalar::Fq(x.add(y)),
        (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
        (Scalar::Ac(x), Scalar::Ac(y)) => {
            let tag = x.tag() + y.tag();
            match crate::fields::AcUnit::new(x.characteristic(), tag) {
                Ok(u) => Scalar::Ac(u),
                Err(_) => return None, // summed to zero
            }
        }
        _ => unreachable!("mixed scalar kinds"),
    };
    let zero = match &sum {
        Scalar::Fq(x) => x.is_zero(),
        Scalar::Rat(x) => x.is_zero(),
        Scalar::Ac(_) => false,
    };
    if zero {
        None
    } else {
        Some(sum)
    }
}

/// A Laurent polynomial in the tower uniformizers: a finite formal sum of
/// monomials with distinct exponent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    terms: BTreeMap<Vec<i64>, Scalar>,
}

impl LaurentPoly {
    pub fn zero() -> LaurentPoly {
        LaurentPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_monomial(m: &TowerMonomial) -> LaurentPoly {
        let mut l = LaurentPoly::zero();
        l.add_monomial(m);
        l
    }

    pub fn add_monomial(&mut self, m: &TowerMonomial) {
        match self.terms.remove(&m.exps) {
            None => {
                self.terms.insert(m.exps.clone(), m.scalar.clone());
            }
            Some(existing) => {
                if let Some(sum) = scalar_add(&existing, &m.scalar) {
                    self.terms.insert(m.exps.clone(), sum);
                }
            }
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, s) in &other.terms {
            out.add_monomial(&TowerMonomial {
                scalar: s.clone(),
                exps: e.clone(),
            });
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
}
