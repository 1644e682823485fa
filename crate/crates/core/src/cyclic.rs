//! Cyclic factor groups and the inclusion of an amalgamated subgroup as a
//! subgroup of k-th powers.
//!
//! A [`CyclicGroup`] with modulus `0` is the infinite cyclic group; modulus
//! `n >= 1` is `Z_n`. Elements are written additively as exponents of the
//! generator, so "multiplication" is addition of exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicGroup {
    modulus: u64,
}

impl CyclicGroup {
    pub const INFINITE: CyclicGroup = CyclicGroup { modulus: 0 };
    pub const TRIVIAL: CyclicGroup = CyclicGroup { modulus: 1 };

    pub fn infinite() -> Self {
        Self::INFINITE
    }

    /// `Z_n`; `n = 0` is accepted and means `Z`.
    pub fn finite(n: u64) -> Self {
        CyclicGroup { modulus: n }
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_infinite(self) -> bool {
        self.modulus == 0
    }

    /// Group order, `None` for `Z`.
    pub fn order(self) -> Option<u64> {
        (self.modulus != 0).then_some(self.modulus)
    }

    pub fn reduce(self, value: i64) -> i64 {
        match self.modulus {
            0 => value,
            n => value.rem_euclid(n as i64),
        }
    }

    pub fn element(self, value: i64) -> CyclicElement {
        CyclicElement {
            group: self,
            value: self.reduce(value),
        }
    }

    pub fn identity(self) -> CyclicElement {
        CyclicElement { group: self, value: 0 }
    }

    /// Order of the element with exponent `value`, `None` when infinite.
    pub fn element_order(self, value: i64) -> Option<u64> {
        let v = self.reduce(value);
        match self.modulus {
            0 if v == 0 => Some(1),
            0 => None,
            n => Some(n / gcd(n, v.unsigned_abs())),
        }
    }

    /// All elements, in increasing exponent order. Panics on `Z`.
    pub fn elements(self) -> impl Iterator<Item = CyclicElement> {
        assert!(!self.is_infinite(), "cannot list the elements of Z");
        (0..self.modulus as i64).map(move |v| CyclicElement { group: self, value: v })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicElement {
    group: CyclicGroup,
    value: i64,
}

impl CyclicElement {
    pub fn group(self) -> CyclicGroup {
        self.group
    }

    /// Canonical exponent: a residue in `[0, n-1]` for `Z_n`, any integer for `Z`.
    pub fn value(self) -> i64 {
        self.value
    }

    pub fn is_identity(self) -> bool {
        self.value == 0
    }

    pub fn inverse(self) -> Self {
        self.group.element(-self.value)
    }
}

/// Product of two elements of the same cyclic group.
pub fn cyclic_multiply(a: CyclicElement, b: CyclicElement) -> Result<CyclicElement> {
    if a.group != b.group {
        return Err(Error::GroupMismatch(format!(
            "Z_{} element multiplied by Z_{} element",
            a.group.modulus, b.group.modulus
        )));
    }
    Ok(a.group.element(a.value + b.value))
}

/// The amalgamated subgroup sits inside a factor as the subgroup of
/// `index`-th powers: its generator `d` maps to `u^index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    index: u64,
}

impl EmbeddingSpec {
    pub fn new(index: u64) -> Result<Self> {
        if index == 0 {
            return Err(Error::InvalidParameters("embedding index must be at least 1".into()));
        }
        Ok(EmbeddingSpec { index })
    }

    /// Same as [`EmbeddingSpec::new`] but also rejects the improper inclusion `k = 1`.
    pub fn proper(index: u64) -> Result<Self> {
        if index < 2 {
            return Err(Error::InvalidParameters(format!(
                "a proper inclusion needs index >= 2, got {index}"
            )));
        }
        Ok(EmbeddingSpec { index })
    }

    pub fn index(self) -> u64 {
        self.index
    }
}

/// Splits `g = u^r * (u^k)^m` with `r` in `[0, k-1]`.
///
/// Returns the transversal `u^r` in the factor and the tail `d^m` in the
/// amalgamated subgroup's own coordinates. When the factor is `Z_n` the
/// subgroup of k-th powers is `Z_{n/k}`, and `m` is reduced accordingly.
pub fn transversal_decompose(g: CyclicElement, emb: EmbeddingSpec) -> (CyclicElement, CyclicElement) {
    let k = emb.index as i64;
    let (r, m) = (g.value.rem_euclid(k), g.value.div_euclid(k));
    let sub = subgroup_of_powers(g.group, emb);
    (g.group.element(r), sub.element(m))
}

/// The cyclic group of `k`-th powers inside `group`.
pub fn subgroup_of_powers(group: CyclicGroup, emb: EmbeddingSpec) -> CyclicGroup {
    match group.modulus {
        0 => CyclicGroup::INFINITE,
        n => CyclicGroup::finite(n / gcd(n, emb.index)),
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Extended Euclid: returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b)`.
pub(crate) fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = extended_gcd(b, a.rem_euclid(b));
        (g, t, s - a.div_euclid(b) * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiply_examples() {
        let z3 = CyclicGroup::finite(3);
        assert_eq!(cyclic_multiply(z3.element(2), z3.element(2)).unwrap().value(), 1);
        let z = CyclicGroup::infinite();
        assert!(cyclic_multiply(z.element(5), z.element(-5)).unwrap().is_identity());
        let z2 = CyclicGroup::finite(2);
        assert!(cyclic_multiply(z2.element(1), z2.element(1)).unwrap().is_identity());
    }

    #[test]
    fn multiply_rejects_mixed_groups() {
        let err = cyclic_multiply(CyclicGroup::finite(2).element(1), CyclicGroup::finite(3).element(1));
        assert!(matches!(err, Err(Error::GroupMismatch(_))));
    }

    #[test]
    fn canonical_residues() {
        let z5 = CyclicGroup::finite(5);
        assert_eq!(z5.element(-1).value(), 4);
        assert_eq!(z5.element(12).value(), 2);
        assert_eq!(CyclicGroup::infinite().element(-7).value(), -7);
    }

    #[test]
    fn decompose_examples() {
        let z = CyclicGroup::infinite();
        let k2 = EmbeddingSpec::new(2).unwrap();

        let (t, d) = transversal_decompose(z.element(5), k2);
        assert_eq!((t.value(), d.value()), (1, 2));

        let (t, d) = transversal_decompose(z.element(-1), k2);
        assert_eq!((t.value(), d.value()), (1, -1));
        // u^1 * (u^2)^-1 recovers u^-1
        let back = cyclic_multiply(t, z.element(2 * d.value())).unwrap();
        assert_eq!(back.value(), -1);

        let (t, d) = transversal_decompose(z.element(4), k2);
        assert_eq!((t.value(), d.value()), (0, 2));
    }

    #[test]
    fn decompose_round_trip() {
        let z = CyclicGroup::infinite();
        for k in 2..=7u64 {
            let emb = EmbeddingSpec::new(k).unwrap();
            for g in -100..=100 {
                let (t, d) = transversal_decompose(z.element(g), emb);
                assert!((0..k as i64).contains(&t.value()));
                assert_eq!(t.value() == 0, g % k as i64 == 0);
                let back = cyclic_multiply(t, z.element(k as i64 * d.value())).unwrap();
                assert_eq!(back.value(), g);
            }
        }
    }

    #[test]
    fn finite_factor_with_full_index_has_trivial_subgroup() {
        let z5 = CyclicGroup::finite(5);
        let emb = EmbeddingSpec::new(5).unwrap();
        assert_eq!(subgroup_of_powers(z5, emb), CyclicGroup::TRIVIAL);
        for g in z5.elements() {
            let (t, d) = transversal_decompose(g, emb);
            assert_eq!(t, g);
            assert!(d.is_identity());
        }
    }

    #[test]
    fn embedding_validation() {
        assert!(EmbeddingSpec::new(0).is_err());
        assert!(EmbeddingSpec::new(1).is_ok());
        assert!(EmbeddingSpec::proper(1).is_err());
        assert!(EmbeddingSpec::proper(2).is_ok());
    }

    #[test]
    fn orders() {
        let z6 = CyclicGroup::finite(6);
        assert_eq!(z6.element_order(0), Some(1));
        assert_eq!(z6.element_order(2), Some(3));
        assert_eq!(z6.element_order(-1), Some(6));
        assert_eq!(CyclicGroup::infinite().element_order(3), None);
    }

    #[test]
    fn bezout() {
        for (a, b) in [(3, 2), (5, 3), (7, 4), (2, 9)] {
            let (g, s, t) = extended_gcd(a, b);
            assert_eq!(g, 1);
            assert_eq!(s * a + t * b, 1);
        }
    }
}
