//! The `(p, q)` torus knot group `<u, v | u^p = v^q>`, split as `E *_D F`
//! with `E = <u>`, `F = <v>`, `D = <d>`, `d = u^p = v^q`, together with its
//! quotient by the center, `h : T(p, q) -> Z_p * Z_q`.

use serde::{Deserialize, Serialize};

use crate::amalgam::{AmalgamGroup, FactorSide, NormalForm, Syllable};
use crate::cyclic::{extended_gcd, gcd};
use crate::error::{Error, Result};

/// Element of the torus knot group; the tail counts powers of the center `d`.
pub type TorusKnotElement = NormalForm;
/// Element of `Z_p * Z_q`.
pub type FreeProductElement = NormalForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CentralPower {
    Finite(u64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralBasis {
    /// The meridian.
    pub x: TorusKnotElement,
    /// Primitive element of the fibre direction with `y^root_exponent = b^m`.
    pub y: TorusKnotElement,
    pub root_exponent: u64,
    /// The central power `m` of the element the basis was built from.
    pub central_power: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusKnotGroup {
    p: u64,
    q: u64,
    knot: AmalgamGroup,
    quotient: AmalgamGroup,
}

pub fn torus_group(p: u64, q: u64) -> Result<TorusKnotGroup> {
    TorusKnotGroup::new(p, q)
}

impl TorusKnotGroup {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p < 2 || q < 2 {
            return Err(Error::InvalidParameters(format!(
                "torus knot parameters must be at least 2, got ({p}, {q})"
            )));
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidParameters(format!(
                "torus knot parameters must be coprime, got ({p}, {q})"
            )));
        }
        Ok(TorusKnotGroup {
            p,
            q,
            knot: AmalgamGroup::torus_amalgam(p, q)?,
            quotient: AmalgamGroup::free_product(p, q)?,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn knot_group(&self) -> &AmalgamGroup {
        &self.knot
    }

    pub fn quotient_group(&self) -> &AmalgamGroup {
        &self.quotient
    }

    pub fn u(&self) -> TorusKnotElement {
        self.knot.factor_element(FactorSide::Left, 1)
    }

    pub fn v(&self) -> TorusKnotElement {
        self.knot.factor_element(FactorSide::Right, 1)
    }

    /// The fibre class `d = u^p = v^q`, which generates the center.
    pub fn center_element(&self) -> TorusKnotElement {
        self.knot.tail_element(1)
    }

    /// Exponents `(a, b)` of the meridian `u^a v^b`: the solution of
    /// `a q + b p = 1` with `a` in `[1, p-1]`.
    pub fn meridian_exponents(&self) -> (i64, i64) {
        let (p, q) = (self.p as i64, self.q as i64);
        let (_, s, _) = extended_gcd(q, p);
        let a = s.rem_euclid(p);
        let b = (1 - a * q) / p;
        debug_assert_eq!(a * q + b * p, 1);
        (a, b)
    }

    pub fn meridian(&self) -> TorusKnotElement {
        let (a, b) = self.meridian_exponents();
        self.knot
            .normalize_exponents([(FactorSide::Left, a), (FactorSide::Right, b)])
    }

    /// Image in the abelianization `Z`: `u -> q`, `v -> p`, `d -> pq`.
    pub fn abelianize(&self, x: &TorusKnotElement) -> i64 {
        let (p, q) = (self.p as i64, self.q as i64);
        let syllables: i64 = x
            .syllables()
            .iter()
            .map(|s| match s.side {
                FactorSide::Left => s.transversal * q,
                FactorSide::Right => s.transversal * p,
            })
            .sum();
        syllables + x.tail() * p * q
    }

    /// `h(b)`: drop the center power. Transversals `u^r` (`0 < r < p`) stay
    /// nontrivial mod `p`, so the result is already a normal form.
    pub fn seifert_quotient(&self, b: &TorusKnotElement) -> FreeProductElement {
        NormalForm::from_parts(b.syllables().to_vec(), 0)
    }

    /// Smallest `m >= 1` with `b^m` central.
    ///
    /// The center is the kernel of `h`, so this is the order of `h(b)` in
    /// `Z_p * Z_q`. That order is finite exactly when `h(b)` is conjugate into
    /// a factor, which is read off the cyclic reduction.
    pub fn central_power(&self, b: &TorusKnotElement) -> CentralPower {
        match free_product_order(&self.quotient, &self.seifert_quotient(b)) {
            Some(m) => CentralPower::Finite(m),
            None => CentralPower::Infinite,
        }
    }

    pub fn peripheral_basis(&self, b: &TorusKnotElement) -> Result<PeripheralBasis> {
        let m = match self.central_power(b) {
            CentralPower::Finite(m) => m,
            CentralPower::Infinite => return Err(Error::InfiniteCentralPower),
        };
        let c = self.knot.power(b, m as i64);
        debug_assert_eq!(c.length(), 0);
        if c.tail() == 0 {
            return Err(Error::TrivialCentralPower);
        }
        Ok(PeripheralBasis {
            x: self.meridian(),
            y: self.knot.tail_element(c.tail().signum()),
            root_exponent: c.tail().unsigned_abs(),
            central_power: m,
        })
    }
}

/// Cyclic reduction in a free product: returns `(g, core)` with
/// `x = g core g^{-1}` and `core` cyclically reduced (length at most one, or
/// beginning and ending in different factors).
pub fn cyclic_reduction(group: &AmalgamGroup, x: &NormalForm) -> (NormalForm, NormalForm) {
    assert!(
        group.has_trivial_amalgam(),
        "cyclic reduction is implemented for free products only"
    );
    let mut core = x.clone();
    let mut conj = NormalForm::identity();
    while core.length() >= 2 && core.begins() == core.ends() {
        let last = *core.syllables().last().unwrap();
        let last_nf = NormalForm::from_parts(vec![last], 0);
        // core = g' (last) with g' = core minus last; last * core * last^-1
        core = group.mul(&group.mul(&last_nf, &core), &group.invert(&last_nf));
        conj = group.mul(&conj, &group.invert(&last_nf));
    }
    (conj, core)
}

/// Order of an element of a free product of finite cyclic groups, `None`
/// when infinite.
pub fn free_product_order(group: &AmalgamGroup, x: &NormalForm) -> Option<u64> {
    let (_, core) = cyclic_reduction(group, x);
    match core.syllables() {
        [] => Some(1),
        [Syllable { side, transversal }] => group.factor(*side).group.element_order(*transversal),
        _ => None,
    }
}
