//! Zero sets of multiplicative functions and the compatibility condition.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphism::MultiplicativeFunction;
use crate::semigroup::{ElementSet, FiniteSemigroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("χ is identically zero")]
    ChiIsZero,
}

/// `I_χ`, `I_χ²`, `I_χ \ I_χ²` and `P_χ` for a nonzero multiplicative `χ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChiIdealStructure {
    #[serde(skip)]
    pub chi: MultiplicativeFunction,
    pub i_chi: ElementSet,
    pub i_chi_sq: ElementSet,
    pub i_minus_sq: ElementSet,
    pub p_chi: ElementSet,
}

impl ChiIdealStructure {
    /// `S \ I_χ`.
    pub fn units(&self, s: &FiniteSemigroup) -> ElementSet {
        s.all().difference(self.i_chi)
    }
}

pub fn chi_structure(s: &FiniteSemigroup, chi: &MultiplicativeFunction) -> Result<ChiIdealStructure, IdealError> {
    if chi.is_identically_zero() {
        return Err(IdealError::ChiIsZero);
    }
    let i_chi = chi.zero_set();
    let i_chi_sq = s.product_set(i_chi, i_chi);
    let i_minus_sq = i_chi.difference(i_chi_sq);
    let outside = s.all().difference(i_chi);
    let p_chi = i_minus_sq
        .iter()
        .filter(|&p| {
            outside.iter().all(|u| {
                outside.iter().all(|v| {
                    let up = s.mul(u, p);
                    let pv = s.mul(p, v);
                    let upv = s.mul(up, v);
                    i_minus_sq.contains(up) && i_minus_sq.contains(pv) && i_minus_sq.contains(upv)
                })
            })
        })
        .collect();
    Ok(ChiIdealStructure { chi: chi.clone(), i_chi, i_chi_sq, i_minus_sq, p_chi })
}

/// Witnesses for one prime ideal: `q ↦ Some(w)` with `w ∉ I`, `qw ∈ I²`, or `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeIdealWitnesses {
    pub ideal: ElementSet,
    pub witnesses: BTreeMap<usize, Option<usize>>,
}

impl PrimeIdealWitnesses {
    pub fn failing(&self) -> impl Iterator<Item = usize> + '_ {
        self.witnesses.iter().filter(|(_, w)| w.is_none()).map(|(&q, _)| q)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub s2_equals_s: bool,
    pub prime_ideals: Vec<PrimeIdealWitnesses>,
    pub compatible: bool,
}

impl CompatibilityReport {
    /// First `(ideal, q)` for which no witness exists.
    pub fn first_failure(&self) -> Option<(ElementSet, usize)> {
        self.prime_ideals
            .iter()
            .find_map(|p| p.failing().next().map(|q| (p.ideal, q)))
    }
}

/// `S² = S`, and every prime ideal `I` gives each `q ∈ I` some `w ∉ I` with
/// `qw ∈ I²`. On discrete finite carriers this is also t-compatibility.
pub fn is_compatible(s: &FiniteSemigroup) -> CompatibilityReport {
    let s2_equals_s = s.square() == s.all();
    let mut prime_ideals = Vec::new();
    for ideal in s.prime_ideals() {
        let sq = s.product_set(ideal, ideal);
        let outside = s.all().difference(ideal);
        let witnesses = ideal
            .iter()
            .map(|q| (q, outside.iter().find(|&w| sq.contains(s.mul(q, w)))))
            .collect();
        prime_ideals.push(PrimeIdealWitnesses { ideal, witnesses });
    }
    let compatible = s2_equals_s && prime_ideals.iter().all(|p| p.failing().next().is_none());
    CompatibilityReport { s2_equals_s, prime_ideals, compatible }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::{enumerate_multiplicative, CharValue};
    use crate::semigroup::catalog::*;

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn group_has_empty_structure() {
        let s = cyclic_group(3);
        for chi in enumerate_multiplicative(&s).iter().filter(|c| !c.is_identically_zero()) {
            let st = chi_structure(&s, chi).unwrap();
            assert!(st.i_chi.is_empty() && st.p_chi.is_empty());
        }
        let zero = enumerate_multiplicative(&s).into_iter().find(|c| c.is_identically_zero()).unwrap();
        assert_eq!(chi_structure(&s, &zero), Err(IdealError::ChiIsZero));
    }

    #[test]
    fn nilpotent_monoid_structure() {
        let s = monoid_1p0();
        let z = CharValue::Zero;
        let chi = MultiplicativeFunction::from_values(&s, vec![CharValue::ONE, z, z]).unwrap();
        let st = chi_structure(&s, &chi).unwrap();
        assert_eq!(st.i_chi, set(&[1, 2]));
        assert_eq!(st.i_chi_sq, set(&[2]));
        assert_eq!(st.i_minus_sq, set(&[1]));
        assert_eq!(st.p_chi, set(&[1]));

        let s = monoid_1pq0();
        let chi = MultiplicativeFunction::from_values(&s, vec![CharValue::ONE, z, z, z]).unwrap();
        let st = chi_structure(&s, &chi).unwrap();
        assert_eq!(st.i_chi, set(&[1, 2, 3]));
        assert_eq!(st.i_chi_sq, set(&[3]));
        assert_eq!(st.p_chi, set(&[1, 2]));
    }

    #[test]
    fn compatibility_examples() {
        for n in 1..=4 {
            assert!(is_compatible(&cyclic_group(n)).compatible);
        }
        let r = is_compatible(&monoid_1p0());
        assert!(r.s2_equals_s);
        assert!(!r.compatible);
        assert_eq!(r.first_failure(), Some((set(&[1, 2]), 1)));
        assert_eq!(r.prime_ideals[0].witnesses[&2], Some(0));

        let r = is_compatible(&null_abz());
        assert!(!r.s2_equals_s && !r.compatible);
    }

    #[test]
    fn report_json_shape() {
        let v = serde_json::to_value(is_compatible(&monoid_1p0())).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "s2_equals_s": true,
                "prime_ideals": [{"ideal": [1, 2], "witnesses": {"1": null, "2": 0}}],
                "compatible": false
            })
        );
    }
}
