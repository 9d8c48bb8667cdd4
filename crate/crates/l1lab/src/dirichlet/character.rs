//! Dirichlet characters stored as exponents on the unit-group generators.
//! Values are exact roots of unity e(k/N) until summation time.

use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::arith::gcd;
use super::group::UnitGroup;
use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// A character value: zero, or e(num/den) with num/den reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CharValue {
    Zero,
    Root { num: u64, den: u64 },
}

impl CharValue {
    pub fn root(k: u64, n: u64) -> Self {
        let k = k % n;
        let g = gcd(k, n);
        CharValue::Root { num: k / g, den: n / g }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, CharValue::Root { num: 0, .. })
    }

    /// (re, im) in binary64.
    pub fn to_c64(&self) -> (f64, f64) {
        match *self {
            CharValue::Zero => (0.0, 0.0),
            CharValue::Root { num, den } => {
                let x = 2.0 * num as f64 / den as f64;
                let (s, c) = (crate::special_functions::fast::sin_pi(x), crate::special_functions::fast::sin_pi(x + 0.5));
                (c, s)
            }
        }
    }
}

#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<UnitGroup>,
    exponents: Vec<u64>,
    conductor: u64,
    parity: Parity,
    chi2: CharValue,
}

impl std::fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "chi[{} mod {}]", self.id(), self.modulus())
    }
}

impl DirichletCharacter {
    pub fn new(group: Arc<UnitGroup>, exponents: Vec<u64>) -> Result<Self> {
        let gens = group.generators();
        if exponents.len() != gens.len() {
            return Err(domain(
                "DirichletCharacter",
                format!("expected {} exponents, got {}", gens.len(), exponents.len()),
            ));
        }
        let exponents: Vec<u64> = exponents.iter().zip(gens).map(|(e, g)| e % g.order).collect();
        let mut chi = Self { group, exponents, conductor: 1, parity: Parity::Even, chi2: CharValue::Zero };
        chi.conductor = compute_conductor(&chi);
        let q = chi.modulus();
        chi.parity = if chi.value(q - 1).is_one() { Parity::Even } else { Parity::Odd };
        chi.chi2 = chi.value(2);
        Ok(chi)
    }

    pub fn principal(group: Arc<UnitGroup>) -> Self {
        let r = group.generators().len();
        Self::new(group, vec![0; r]).expect("matching length")
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn chi2(&self) -> CharValue {
        self.chi2
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Exponents joined by dots; unique within a modulus.
    pub fn id(&self) -> String {
        self.exponents.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(".")
    }

    /// chi(a) = e(k / N) with N the group exponent; None when gcd(a, q) > 1.
    pub fn index(&self, a: u64) -> Option<u64> {
        let n = self.group.exponent();
        let d = self.group.dlog(a)?;
        let mut k = 0u64;
        for ((&x, &e), g) in d.iter().zip(&self.exponents).zip(self.group.generators()) {
            k = (k + (x as u64 * e % g.order) * (n / g.order)) % n;
        }
        Some(k)
    }

    pub fn value(&self, a: u64) -> CharValue {
        match self.index(a) {
            None => CharValue::Zero,
            Some(k) => CharValue::root(k, self.group.exponent()),
        }
    }

    /// Order of chi in the character group.
    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(self.group.generators())
            .fold(1, |acc, (&e, g)| {
                let o = g.order / gcd(e, g.order);
                acc / gcd(acc, o) * o
            })
    }

    pub fn conj(&self) -> Self {
        let exps = self.exponents.iter().zip(self.group.generators()).map(|(&e, g)| (g.order - e) % g.order).collect();
        Self::new(self.group.clone(), exps).expect("matching length")
    }

    pub fn is_real(&self) -> bool {
        self.order() <= 2
    }
}

impl Serialize for DirichletCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DirichletCharacter", 5)?;
        st.serialize_field("modulus", &self.modulus())?;
        st.serialize_field("exponents", &self.exponents)?;
        st.serialize_field("conductor", &self.conductor)?;
        st.serialize_field("parity", &self.parity)?;
        st.serialize_field("chi2", &self.chi2)?;
        st.end()
    }
}

/// Smallest f | q inducing chi, as a product over prime-power components.
pub fn conductor(chi: &DirichletCharacter) -> u64 {
    chi.conductor
}

fn compute_conductor(chi: &DirichletCharacter) -> u64 {
    let group = chi.group();
    let mut f = 1u64;
    for (ci, comp) in group.components().iter().enumerate() {
        let parts: Vec<(u64, u64)> = group
            .generators()
            .iter()
            .zip(&chi.exponents)
            .filter(|(g, _)| g.component == ci)
            .map(|(g, &e)| (e, g.order))
            .collect();
        let p = comp.prime;
        f *= if p == 2 {
            match parts.as_slice() {
                [] => 1,
                [(s, _)] => {
                    if *s == 0 {
                        1
                    } else {
                        4
                    }
                }
                [(s, _), (t, o)] => {
                    if *t != 0 {
                        // The 5-part has order 2^r and needs modulus 2^(r+2).
                        let ord = o / gcd(*t, *o);
                        4 * ord
                    } else if *s != 0 {
                        4
                    } else {
                        1
                    }
                }
                _ => unreachable!("at most two generators at 2"),
            }
        } else {
            let (e, o) = parts[0];
            if e == 0 {
                1
            } else {
                let mut ord = o / gcd(e, o);
                let mut pf = p;
                while ord % p == 0 {
                    ord /= p;
                    pf *= p;
                }
                pf
            }
        };
    }
    f
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CharacterFilter {
    pub even: bool,
    pub primitive: bool,
    pub chi2_eq_1: bool,
}

impl CharacterFilter {
    /// Even, primitive, chi(2) = 1.
    pub fn theorem1() -> Self {
        Self { even: true, primitive: true, chi2_eq_1: true }
    }

    fn accepts(&self, chi: &DirichletCharacter) -> bool {
        (!self.even || chi.parity() == Parity::Even)
            && (!self.primitive || chi.is_primitive())
            && (!self.chi2_eq_1 || chi.chi2().is_one())
    }
}

/// All characters mod q passing the filter, in lexicographic exponent order.
pub fn enumerate_characters(q: u64, filter: CharacterFilter) -> Result<Vec<DirichletCharacter>> {
    let group = Arc::new(UnitGroup::new(q)?);
    enumerate_in(&group, filter)
}

pub fn enumerate_in(group: &Arc<UnitGroup>, filter: CharacterFilter) -> Result<Vec<DirichletCharacter>> {
    if filter.chi2_eq_1 && group.modulus() % 2 == 0 {
        return Ok(Vec::new());
    }
    let orders = group.structure();
    let mut out = Vec::new();
    let mut exps = vec![0u64; orders.len()];
    loop {
        let chi = DirichletCharacter::new(group.clone(), exps.clone())?;
        if filter.accepts(&chi) {
            out.push(chi);
        }
        // Odometer with the last generator fastest.
        let mut i = orders.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_small_cases() {
        let f = CharacterFilter { even: true, primitive: true, chi2_eq_1: false };
        assert_eq!(enumerate_characters(5, f).unwrap().len(), 1);
        let f = CharacterFilter { chi2_eq_1: true, ..Default::default() };
        assert!(enumerate_characters(4, f).unwrap().is_empty());
        assert_eq!(enumerate_characters(7, f).unwrap().len(), 2);
        assert!(enumerate_characters(3, CharacterFilter::theorem1()).unwrap().is_empty());
    }

    #[test]
    fn principal_character_has_conductor_one() {
        let g = Arc::new(UnitGroup::new(12).unwrap());
        assert_eq!(DirichletCharacter::principal(g).conductor(), 1);
    }
}
